"""Mask-infilling recombination.

For an input set (c_1..c_n) the pipeline enumerates up to max_perms
permutations, scores each space-joined permutation's perplexity, keeps
the keep_top lowest, infills the mask template of each survivor, and
returns the output with the lowest perplexity.  Post-processing strips
the web artifacts large infillers tend to emit (URLs, bracketed agency
tags, trailing social-media fragments); outputs are scored after
post-processing.
"""

from __future__ import annotations

import itertools
import logging
import math
import random
import re
from dataclasses import dataclass, field
from typing import Sequence

from .errors import ProviderError
from .providers import MaskInfiller, PerplexityScorer

logger = logging.getLogger(__name__)

MASK = "<mask>"


@dataclass(frozen=True)
class InfillConfig:
    max_perms: int = 120
    keep_top: int = 10
    enumeration_seed: int = 13
    postprocess: bool = True

    def __post_init__(self):
        if self.max_perms < 1 or self.keep_top < 1:
            raise ValueError("max_perms and keep_top must be >= 1")
        if self.keep_top > self.max_perms:
            raise ValueError("keep_top must be <= max_perms")


@dataclass(frozen=True)
class InfillTemplate:
    """Masked rendering of an ordered input set."""

    elements: tuple[str, ...]

    def __post_init__(self):
        if not self.elements or any(not e for e in self.elements):
            raise ValueError("template needs non-empty elements")

    @property
    def rendered(self) -> str:
        return MASK + " " + f" {MASK} ".join(self.elements) + f" {MASK}"

    @property
    def mask_count(self) -> int:
        return len(self.elements) + 1


@dataclass
class InfillCandidate:
    """One permutation with its prompt score and, later, its output."""

    permutation: tuple[int, ...]
    prompt_ppl: float
    output: str | None = None
    output_ppl: float | None = None

    def to_record(self) -> dict:
        return {
            "perm": list(self.permutation),
            "prompt_ppl": self.prompt_ppl,
            "output": self.output,
            "output_ppl": self.output_ppl,
        }


@dataclass
class InfillResult:
    example_id: str
    best: InfillCandidate
    candidates: list[InfillCandidate] = field(default_factory=list)

    def to_record(self) -> dict:
        return {
            "id": self.example_id,
            "best": self.best.output,
            "best_ppl": self.best.output_ppl,
            "candidates": [c.to_record() for c in self.candidates],
        }


def enumerate_permutations(elements: Sequence[str], config: InfillConfig | None = None) -> list[tuple[int, ...]]:
    """All n! permutations when they fit under max_perms, else a seeded
    without-replacement sample of exactly max_perms distinct ones."""
    config = config or InfillConfig()
    n = len(elements)
    if n < 1:
        raise ValueError("need at least one element")
    if math.factorial(n) <= config.max_perms:
        return [tuple(p) for p in itertools.permutations(range(n))]
    rng = random.Random(config.enumeration_seed)
    seen: set[tuple[int, ...]] = set()
    out: list[tuple[int, ...]] = []
    while len(out) < config.max_perms:
        perm = tuple(rng.sample(range(n), n))
        if perm not in seen:
            seen.add(perm)
            out.append(perm)
    return out


def rank_permutations(
    elements: Sequence[str],
    permutations: Sequence[tuple[int, ...]],
    scorer: PerplexityScorer,
    config: InfillConfig | None = None,
) -> list[InfillCandidate]:
    """keep_top candidates by ascending prompt perplexity.

    The prompt is the space-joined permuted elements devoid of masks.
    Ties break on permutation lexicographic order; scorer failures drop
    the permutation with a warning, and all failing is an error.
    """
    config = config or InfillConfig()
    scored: list[InfillCandidate] = []
    for perm in permutations:
        prompt = " ".join(elements[i] for i in perm)
        try:
            ppl = float(scorer.ppl(prompt))
        except Exception as exc:
            logger.warning("scorer failed on permutation %s: %s", perm, exc)
            continue
        if not (math.isfinite(ppl) and ppl > 0):
            logger.warning("scorer returned invalid ppl %r for %s; skipped", ppl, perm)
            continue
        scored.append(InfillCandidate(tuple(perm), ppl))
    if not scored:
        raise ProviderError("perplexity scorer failed on every permutation")
    scored.sort(key=lambda c: (c.prompt_ppl, c.permutation))
    return scored[: config.keep_top]


def infill(
    candidates: Sequence[InfillCandidate],
    elements: Sequence[str],
    infiller: MaskInfiller,
    scorer: PerplexityScorer,
    config: InfillConfig | None = None,
) -> tuple[InfillCandidate, list[InfillCandidate]]:
    """Infill every candidate's template and pick the lowest-ppl output.

    Outputs are post-processed (when enabled) before scoring and
    selection.  Ties keep the earlier candidate.
    """
    config = config or InfillConfig()
    if not candidates:
        raise ValueError("no candidates to infill")
    completed: list[InfillCandidate] = []
    for cand in candidates:
        template = InfillTemplate(tuple(elements[i] for i in cand.permutation))
        try:
            output = infiller.infill(template.rendered)
        except Exception as exc:
            logger.warning("infiller failed on %s: %s", cand.permutation, exc)
            continue
        if config.postprocess:
            output = postprocess(output)
        if not output:
            logger.warning("empty output for %s; skipped", cand.permutation)
            continue
        try:
            cand.output = output
            cand.output_ppl = float(scorer.ppl(output))
        except Exception as exc:
            logger.warning("scorer failed on output of %s: %s", cand.permutation, exc)
            continue
        for element in template.elements:
            if element not in output:
                logger.warning(
                    "infilled output dropped element %r (perm %s)", element, cand.permutation
                )
        completed.append(cand)
    if not completed:
        raise ProviderError("infilling failed for every candidate")
    best = min(completed, key=lambda c: c.output_ppl)
    return best, completed


_URL_RE = re.compile(r"(?:https?://|www\.)\S+", re.IGNORECASE)
_AGENCY_RE = re.compile(r"[(\[](?:[A-Z][\w.&-]*)(?:\s+[A-Z][\w.&-]*){0,2}[)\]]")
_SOCIAL_RE = re.compile(r"pic\.twitter", re.IGNORECASE)


def postprocess(text: str) -> str:
    """Strip web artifacts from an infilled output; idempotent.

    Removes everything from "pic.twitter" on, URL substrings, and
    bracketed agency-style tags such as "(Reuters)", then collapses
    whitespace.
    """
    match = _SOCIAL_RE.search(text)
    if match:
        text = text[: match.start()]
    text = _URL_RE.sub(" ", text)
    text = _AGENCY_RE.sub(" ", text)
    return " ".join(text.split())


def infill_example(
    example_id: str,
    elements: Sequence[str],
    scorer: PerplexityScorer,
    infiller: MaskInfiller,
    config: InfillConfig | None = None,
) -> InfillResult:
    """Full per-example pipeline: enumerate, rank, infill, select."""
    config = config or InfillConfig()
    try:
        perms = enumerate_permutations(elements, config)
        ranked = rank_permutations(elements, perms, scorer, config)
        best, completed = infill(ranked, elements, infiller, scorer, config)
    except ProviderError as exc:
        raise ProviderError(str(exc), example_id) from exc
    return InfillResult(example_id, best, completed)
