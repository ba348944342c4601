"""Concept-to-text data model, split construction, and JSONL I/O.

An example is an ordered set of concept words plus one or more human
reference sentences.  Splits are re-carved from an existing pool by
seeded stratified sampling over concept-set size: the per-size counts
are fixed by the split spec, the membership by the seed.
"""

from __future__ import annotations

import json
import logging
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

from .errors import CapacityError, CorpusValidationError, ParseError

logger = logging.getLogger(__name__)

MIN_CONCEPTS = 1
MAX_CONCEPTS = 16

SPLIT_NAMES = ("train_CG", "dev_CG", "test_CG", "dev_O", "test_O")

DEFAULT_SPLIT_SEED = 13


@dataclass(frozen=True)
class ConceptSet:
    """Ordered set of lowercase concept words."""

    concepts: tuple[str, ...]

    def __post_init__(self):
        if not (MIN_CONCEPTS <= len(self.concepts) <= MAX_CONCEPTS):
            raise CorpusValidationError(
                f"concept set must have {MIN_CONCEPTS}..{MAX_CONCEPTS} entries, got {len(self.concepts)}"
            )
        seen = set()
        for c in self.concepts:
            if not c or c != c.strip() or any(ch.isspace() for ch in c):
                raise CorpusValidationError(f"concept {c!r} is empty or contains whitespace")
            low = c.lower()
            if low in seen:
                raise CorpusValidationError(f"duplicate concept {low!r}")
            seen.add(low)

    def __iter__(self):
        return iter(self.concepts)

    def __len__(self):
        return len(self.concepts)

    @property
    def size(self) -> int:
        return len(self.concepts)


@dataclass(frozen=True)
class Example:
    """One concept set with its reference sentences."""

    id: str
    concept_set: ConceptSet
    references: tuple[str, ...]

    def __post_init__(self):
        if not self.id:
            raise CorpusValidationError("example id must be non-empty")
        if any(not r for r in self.references):
            raise CorpusValidationError(f"example {self.id!r}: empty reference sentence")

    @property
    def concepts(self) -> tuple[str, ...]:
        return self.concept_set.concepts

    @property
    def size(self) -> int:
        return self.concept_set.size


@dataclass(frozen=True)
class SplitSpec:
    """Target per-size counts for one re-carved split."""

    name: str
    counts: Mapping[int, int]
    seed: int = DEFAULT_SPLIT_SEED

    def __post_init__(self):
        if self.name not in SPLIT_NAMES:
            raise CorpusValidationError(f"unknown split name {self.name!r}; expected one of {SPLIT_NAMES}")
        if any(c < 0 for c in self.counts.values()):
            raise CorpusValidationError("split counts must be non-negative")
        object.__setattr__(self, "counts", dict(self.counts))

    @property
    def total(self) -> int:
        return sum(self.counts.values())


# Default per-size counts for the re-carved dev/test splits.
PAPER_DEV_CG_COUNTS = {3: 120, 4: 60, 5: 60}
PAPER_TEST_CG_COUNTS = {3: 0, 4: 180, 5: 180}


def paper_split_specs(seed: int = DEFAULT_SPLIT_SEED) -> tuple[SplitSpec, SplitSpec]:
    return (
        SplitSpec("dev_CG", PAPER_DEV_CG_COUNTS, seed=seed),
        SplitSpec("test_CG", PAPER_TEST_CG_COUNTS, seed=seed),
    )


def _example_from_record(record: dict, path: str | None, line: int) -> Example:
    for key in ("id", "concepts", "references"):
        if key not in record:
            raise ParseError(f"record missing field {key!r}", path, line)
    concepts = record["concepts"]
    references = record["references"]
    if not isinstance(concepts, list) or not all(isinstance(c, str) for c in concepts):
        raise ParseError("'concepts' must be a list of strings", path, line)
    if not isinstance(references, list) or not all(isinstance(r, str) for r in references):
        raise ParseError("'references' must be a list of strings", path, line)
    lowered = [c.lower() for c in concepts]
    if lowered != concepts:
        logger.warning("line %d: concepts %r lowercased on load", line, record["id"])
    try:
        return Example(str(record["id"]), ConceptSet(tuple(lowered)), tuple(references))
    except CorpusValidationError as exc:
        raise ParseError(str(exc), path, line) from exc


def load_corpus(path: str | Path, allow_empty_references: bool = False) -> list[Example]:
    """Read a JSONL corpus ({"id", "concepts", "references"} per line).

    Raises ParseError naming the line on malformed records and
    CorpusValidationError on duplicate ids.  Prediction-only concept
    sets (hidden-test style) can be loaded with allow_empty_references.
    """
    path = Path(path)
    examples: list[Example] = []
    seen_ids: set[str] = set()
    with path.open(encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            raw = raw.strip()
            if not raw:
                continue
            try:
                record = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid JSON ({exc.msg})", str(path), lineno) from exc
            example = _example_from_record(record, str(path), lineno)
            if not example.references and not allow_empty_references:
                raise ParseError("'references' must be non-empty", str(path), lineno)
            if example.id in seen_ids:
                raise CorpusValidationError(f"duplicate example id {example.id!r} at line {lineno}")
            seen_ids.add(example.id)
            examples.append(example)
    return examples


def write_corpus(examples: Iterable[Example], path: str | Path) -> None:
    """Write examples as one-JSON-object-per-line UTF-8."""
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        for ex in examples:
            record = {"id": ex.id, "concepts": list(ex.concepts), "references": list(ex.references)}
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")


def build_splits(
    dev_examples: list[Example],
    spec_dev: SplitSpec,
    spec_test: SplitSpec,
) -> tuple[list[Example], list[Example]]:
    """Carve two disjoint splits out of a pool, stratified by set size.

    Sampling is without replacement from a seeded shuffle of each size
    bucket (spec_dev.seed), so the result is a pure function of
    (examples, specs).  Raises CapacityError when a size bucket cannot
    cover the combined request.
    """
    buckets: dict[int, list[Example]] = {}
    for ex in dev_examples:
        buckets.setdefault(ex.size, []).append(ex)

    sizes = sorted(set(spec_dev.counts) | set(spec_test.counts))
    rng = random.Random(spec_dev.seed)
    dev_out: list[Example] = []
    test_out: list[Example] = []
    for size in sizes:
        want_dev = spec_dev.counts.get(size, 0)
        want_test = spec_test.counts.get(size, 0)
        pool = buckets.get(size, [])
        if want_dev + want_test > len(pool):
            raise CapacityError(size, want_dev + want_test, len(pool))
        shuffled = rng.sample(pool, len(pool))
        dev_out.extend(shuffled[:want_dev])
        test_out.extend(shuffled[want_dev:want_dev + want_test])
    return dev_out, test_out


def split_stats(examples: list[Example]) -> dict:
    """Per-size set counts plus totals, mirroring the dataset statistics table."""
    by_size: dict[int, int] = {}
    sentences = 0
    for ex in examples:
        by_size[ex.size] = by_size.get(ex.size, 0) + 1
        sentences += len(ex.references)
    stats: dict = {size: by_size[size] for size in sorted(by_size)}
    stats["total_sets"] = len(examples)
    stats["total_sentences"] = sentences
    return stats
