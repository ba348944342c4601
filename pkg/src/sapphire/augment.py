"""Train-time concept-set augmentation from human references.

Keyword-based augmentation ranks candidate reference words by their
average embedding cosine similarity to the original concepts and adds
the best remaining candidate at each of k stages.  Attention-based
augmentation ranks words by the attention mass they receive from other
positions (last layer, summed over heads, pooled over subword pieces,
averaged over the references containing the word).

Both run at training time only; test-time inputs stay un-augmented.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .corpus import Example
from .errors import ProviderError
from .providers import AttentionProvider, ContextualEmbedder, KeywordExtractor, cosine
from .textproc import STOPWORDS

METHODS = ("kw", "att")

MAX_AUGMENT_K = 5

RANK_BEST = "best"
RANK_WORST = "worst"  # ablation flag, consistently weaker; off by default


@dataclass(frozen=True)
class CandidateWord:
    word: str
    score: float
    source_reference: int


@dataclass(frozen=True)
class CandidatePool:
    """Scored augmentation candidates for one example."""

    entries: tuple[CandidateWord, ...]

    @property
    def words(self) -> tuple[str, ...]:
        return tuple(e.word for e in self.entries)

    def score_of(self, word: str) -> float:
        for e in self.entries:
            if e.word == word:
                return e.score
        raise KeyError(word)


@dataclass(frozen=True)
class AugmentedExample:
    """An example whose input set gained ranked extra words."""

    base: Example
    added_words: tuple[str, ...]
    method: str
    k: int
    provenance: tuple[CandidateWord, ...] = field(default=(), compare=False)

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}")
        if not (0 <= self.k <= MAX_AUGMENT_K):
            raise ValueError(f"k must be in 0..{MAX_AUGMENT_K}")
        lowered = [w.lower() for w in self.added_words]
        if len(set(lowered)) != len(lowered):
            raise ValueError("added words contain duplicates")
        overlap = set(lowered) & {c.lower() for c in self.base.concepts}
        if overlap:
            raise ValueError(f"added words collide with concepts: {sorted(overlap)}")
        if len(self.added_words) > self.k:
            raise ValueError("more added words than k")

    def model_input(self) -> str:
        """Rendering fed to the generator: concepts first, then added words."""
        return " ".join(list(self.base.concepts) + list(self.added_words))

    def to_record(self) -> dict:
        return {
            "id": self.base.id,
            "concepts": list(self.base.concepts),
            "added": list(self.added_words),
            "method": self.method,
            "k": self.k,
            "references": list(self.base.references),
        }


def _check_k(k: int) -> None:
    if not (0 <= k <= MAX_AUGMENT_K):
        raise ValueError(f"k must be in 0..{MAX_AUGMENT_K}, got {k}")


def _greedy_select(pool: CandidatePool, k: int, rank: str) -> list[CandidateWord]:
    """k stages of argmax (argmin for rank=worst); lexicographic tie-break."""
    remaining = list(pool.entries)
    picked: list[CandidateWord] = []
    sign = 1.0 if rank == RANK_BEST else -1.0
    for _ in range(k):
        if not remaining:
            break
        best = min(remaining, key=lambda e: (-sign * e.score, e.word))
        picked.append(best)
        remaining = [e for e in remaining if e.word != best.word]
    return picked


# ---------------------------------------------------------------------------
# Keyword-based (Kw-aug)
# ---------------------------------------------------------------------------


def kw_candidates(
    example: Example,
    embedder: ContextualEmbedder,
    extractor: KeywordExtractor,
    stopwords: Iterable[str] = STOPWORDS,
) -> CandidatePool:
    """Keywords of the references scored by mean cosine to the concepts.

    Candidates exclude the concepts themselves and stopwords; duplicates
    keep the first reference they appeared in.
    """
    if not example.references:
        raise ValueError(f"example {example.id!r} has no references")
    stop = set(stopwords)
    concepts_low = {c.lower() for c in example.concepts}
    try:
        concept_vecs = [embedder.embed(c) for c in example.concepts]
    except Exception as exc:
        raise ProviderError(f"embedder failed on concepts: {exc}", example.id) from exc

    entries: list[CandidateWord] = []
    seen: set[str] = set()
    for ref_idx, reference in enumerate(example.references):
        for word in extractor.keywords(reference):
            low = word.lower()
            if low in seen or low in concepts_low or low in stop:
                continue
            seen.add(low)
            try:
                vec = embedder.embed(low)
                score = sum(cosine(vec, cv) for cv in concept_vecs) / len(concept_vecs)
            except Exception as exc:
                raise ProviderError(f"embedder failed on {low!r}: {exc}", example.id) from exc
            if not math.isfinite(score):
                raise ProviderError(f"non-finite similarity for {low!r}", example.id)
            entries.append(CandidateWord(low, score, ref_idx))
    return CandidatePool(tuple(entries))


def kw_augment(
    example: Example,
    k: int,
    embedder: ContextualEmbedder,
    extractor: KeywordExtractor,
    rank: str = RANK_BEST,
    stopwords: Iterable[str] = STOPWORDS,
) -> AugmentedExample:
    """Add the k reference keywords most similar to the concept set."""
    _check_k(k)
    picked = _greedy_select(kw_candidates(example, embedder, extractor, stopwords), k, rank)
    return AugmentedExample(
        base=example,
        added_words=tuple(e.word for e in picked),
        method="kw",
        k=k,
        provenance=tuple(picked),
    )


# ---------------------------------------------------------------------------
# Attention-based (Att-aug)
# ---------------------------------------------------------------------------


def att_candidates(
    example: Example,
    attention: AttentionProvider,
    exclude_stopwords: bool = True,
    stopwords: Iterable[str] = STOPWORDS,
) -> CandidatePool:
    """Reference words scored by aggregate received attention.

    Per reference, a word's score sums attention from all pieces outside
    the word into the word's pieces, over all heads; scores average over
    the references containing the word.  exclude_stopwords=False restores
    the raw ranking, in which function words can win.
    """
    stop = set(stopwords) if exclude_stopwords else set()
    concepts_low = {c.lower() for c in example.concepts}
    totals: dict[str, list[float]] = {}
    first_ref: dict[str, int] = {}
    for ref_idx, reference in enumerate(example.references):
        try:
            tokens, att, alignment = attention.attend_checked(reference)
        except ProviderError:
            raise
        except Exception as exc:
            raise ProviderError(f"attention failed: {exc}", example.id) from exc
        pieces_of: dict[str, set[int]] = {}
        for w_idx, tok in enumerate(tokens):
            pieces_of.setdefault(tok.lower(), set()).update(alignment[w_idx])
        n_pieces = att.shape[-1]
        for word, pieces in pieces_of.items():
            if word in concepts_low or word in stop or not word.isalpha():
                continue
            others = [i for i in range(n_pieces) if i not in pieces]
            cols = sorted(pieces)
            received = float(att[:, others, :][:, :, cols].sum()) if others and cols else 0.0
            totals.setdefault(word, []).append(received)
            first_ref.setdefault(word, ref_idx)
    entries = []
    for word in totals:
        score = sum(totals[word]) / len(totals[word])
        if not math.isfinite(score):
            raise ProviderError(f"non-finite attention score for {word!r}", example.id)
        entries.append(CandidateWord(word, score, first_ref[word]))
    entries.sort(key=lambda e: (e.source_reference, e.word))
    return CandidatePool(tuple(entries))


def att_augment(
    example: Example,
    k: int,
    attention: AttentionProvider,
    rank: str = RANK_BEST,
    exclude_stopwords: bool = True,
    stopwords: Iterable[str] = STOPWORDS,
) -> AugmentedExample:
    """Add the k most-attended reference words."""
    _check_k(k)
    pool = att_candidates(example, attention, exclude_stopwords, stopwords)
    picked = _greedy_select(pool, k, rank)
    return AugmentedExample(
        base=example,
        added_words=tuple(e.word for e in picked),
        method="att",
        k=k,
        provenance=tuple(picked),
    )


# ---------------------------------------------------------------------------
# Split-level driver
# ---------------------------------------------------------------------------


def augment_split(
    examples: Sequence[Example],
    method: str,
    k: int,
    embedder: ContextualEmbedder | None = None,
    extractor: KeywordExtractor | None = None,
    attention: AttentionProvider | None = None,
    rank: str = RANK_BEST,
    exclude_stopwords: bool = True,
    skip_errors: bool = False,
) -> list[AugmentedExample]:
    """Augment every example of a training split, order preserved.

    Per-example provider failures abort with the failing id unless
    skip_errors is set, in which case the example passes through with no
    added words.
    """
    if method not in METHODS:
        raise ValueError(f"method must be one of {METHODS}")
    _check_k(k)
    out: list[AugmentedExample] = []
    for example in examples:
        try:
            if method == "kw":
                if embedder is None or extractor is None:
                    raise ProviderError("kw augmentation needs an embedder and an extractor", example.id)
                out.append(kw_augment(example, k, embedder, extractor, rank))
            else:
                if attention is None:
                    raise ProviderError("att augmentation needs an attention provider", example.id)
                out.append(att_augment(example, k, attention, rank, exclude_stopwords))
        except ProviderError:
            if not skip_errors:
                raise
            out.append(AugmentedExample(example, (), method, k))
    return out
