"""Phrase-to-text dataset construction: permutation, joining, target pairing.

Each input set gets a single random permutation drawn from a generator
seeded by (seed, example id), so datasets are reproducible and the
permutation varies across seeds but not across references of the same
example.  Elements are joined with the literal separator "<s>" with one
space on each side; mapping the separator onto a tokenizer-specific
special token is the generation provider's concern.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Sequence

from .corpus import Example
from .errors import CorpusValidationError, MissingIdError, ProviderError
from .keyphrase import RecombinedInput
from .providers import DecodeConfig, SequenceGenerator

SEPARATOR = "<s>"
_JOIN = f" {SEPARATOR} "


@dataclass(frozen=True)
class P2TRecord:
    """One training or inference row of the phrase-to-text dataset."""

    id: str
    input_text: str
    permutation: tuple[int, ...]
    seed: int
    target: str | None = None

    def __post_init__(self):
        if sorted(self.permutation) != list(range(len(self.permutation))):
            raise CorpusValidationError(f"{self.id}: invalid permutation {self.permutation}")

    def elements(self) -> list[str]:
        return self.input_text.split(_JOIN)

    def to_record(self) -> dict:
        record = {"id": self.id, "input": self.input_text}
        if self.target is not None:
            record["target"] = self.target
        return record


def _permute(elements: Sequence[str], seed: int, example_id: str) -> tuple[int, ...]:
    rng = random.Random(f"{seed}|{example_id}")
    return tuple(rng.sample(range(len(elements)), len(elements)))


def _join(elements: Sequence[str], permutation: Sequence[int], example_id: str) -> str:
    for el in elements:
        if SEPARATOR in el:
            raise CorpusValidationError(
                f"{example_id}: element {el!r} contains the separator {SEPARATOR!r}"
            )
        if not el:
            raise CorpusValidationError(f"{example_id}: empty input element")
    return _JOIN.join(elements[i] for i in permutation)


def build_p2t_train(
    recombined: Sequence[RecombinedInput],
    examples: Sequence[Example],
    seed: int,
) -> list[P2TRecord]:
    """One record per (input set, reference), all sharing the set's permutation."""
    by_id = {ex.id: ex for ex in examples}
    if len(by_id) != len(examples):
        raise CorpusValidationError("duplicate example ids in corpus")
    records: list[P2TRecord] = []
    for rec in recombined:
        example = by_id.get(rec.source_example_id)
        if example is None:
            raise MissingIdError(rec.source_example_id)
        if not example.references:
            raise CorpusValidationError(f"{example.id}: training example without references")
        perm = _permute(rec.elements, seed, rec.source_example_id)
        input_text = _join(rec.elements, perm, rec.source_example_id)
        for reference in example.references:
            records.append(P2TRecord(rec.source_example_id, input_text, perm, seed, reference))
    return records


def build_p2t_infer(recombined: Sequence[RecombinedInput], seed: int) -> list[P2TRecord]:
    """One target-less record per input set, same permutation mechanics."""
    records = []
    for rec in recombined:
        perm = _permute(rec.elements, seed, rec.source_example_id)
        records.append(P2TRecord(rec.source_example_id, _join(rec.elements, perm, rec.source_example_id), perm, seed))
    return records


def p2t_generate(
    records: Sequence[P2TRecord],
    generator: SequenceGenerator,
    decode: DecodeConfig | None = None,
) -> list[tuple[str, str]]:
    """Run the generator over records; outputs stay aligned with inputs."""
    decode = decode or DecodeConfig()
    outputs: list[tuple[str, str]] = []
    for record in records:
        try:
            outputs.append((record.id, generator.generate(record.input_text, decode)))
        except ProviderError:
            raise
        except Exception as exc:
            raise ProviderError(f"generation failed: {exc}", record.id) from exc
    return outputs
