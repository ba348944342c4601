"""Statistical keyphrase extraction and recombined input construction.

The extractor scores phrases with the YAKE family of local statistics
(Campos et al.'s collection-independent method): per-term features are
combined into a term score where lower means more salient, and candidate
phrases are scored by the product/sum combination below.  Only the
behavior on goldens is contractual, not bit-compatibility with any
particular third-party build.

Term features (per lowercased term):

    case    = max(tf_upper, tf_proper) / (1 + ln tf)
    pos     = ln(ln(3 + median(sentence indexes)))
    freq    = tf / (mean + std of non-stopword tf)
    rel     = 1 + (dl + dr) * tf / max_tf
              dl = distinct left co-terms / total left co-occurrences
    spread  = sentences containing the term / total sentences
    S(t)    = rel * pos / (case + freq / rel + spread / rel)

Candidate phrases are token windows of 2..max_n words inside one
punctuation-free chunk that neither start nor end with a stopword.
Interior stopwords do not contribute their own S(t); they contribute a
bigram-probability correction: with p = P(prev->stop) * P(stop->next)
(edge counts over term frequencies), the product gains a factor (2 - p)
and the sum loses (1 - p).  The phrase score is

    S(kw) = prod / (tf_kw * (1 + sum))

ranked ascending.  Near-duplicates (normalized edit-distance similarity
>= dedup_threshold) keep only the better-scoring phrase, and selection
is greedy best-score-first with pairwise disjoint source spans.
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .corpus import Example
from .errors import MissingIdError
from .textproc import STOPWORDS, is_word, normalize_token, split_sentences, tokenize

ORIGINS = ("reference", "baseline_generation")


@dataclass(frozen=True)
class ExtractionConfig:
    max_n: int = 5
    max_phrases: int = 5
    dedup_threshold: float = 0.9
    stopword_list: frozenset[str] = STOPWORDS
    seed: int = 13  # reserved for stochastic extensions; extraction is deterministic
    window: int = 1

    def __post_init__(self):
        if self.max_n < 2:
            raise ValueError("max_n must be >= 2 (1-grams are never extracted)")
        if self.max_phrases < 1:
            raise ValueError("max_phrases must be >= 1")
        if not (0.0 < self.dedup_threshold <= 1.0):
            raise ValueError("dedup_threshold must be in (0, 1]")
        object.__setattr__(self, "stopword_list", frozenset(w.lower() for w in self.stopword_list))


@dataclass(frozen=True)
class Keyphrase:
    """A scored multi-token span; lower score = more salient."""

    tokens: tuple[str, ...]
    source_span: tuple[int, int]  # [start, end) over the word tokens of the source
    score: float

    @property
    def text(self) -> str:
        return " ".join(self.tokens)


@dataclass(frozen=True)
class RecombinedInput:
    """Mixed set of keyphrases and restored concept words for one example."""

    source_example_id: str
    elements: tuple[str, ...]
    origin: str
    keyphrases: tuple[Keyphrase, ...] = field(default=(), compare=False)

    def __post_init__(self):
        if self.origin not in ORIGINS:
            raise ValueError(f"origin must be one of {ORIGINS}, got {self.origin!r}")

    def to_record(self) -> dict:
        return {"id": self.source_example_id, "elements": list(self.elements), "origin": self.origin}

    @classmethod
    def from_record(cls, record: dict) -> "RecombinedInput":
        return cls(str(record["id"]), tuple(record["elements"]), record["origin"])


# ---------------------------------------------------------------------------
# Document statistics
# ---------------------------------------------------------------------------


class _Term:
    __slots__ = ("tf", "tf_upper", "tf_proper", "sentences", "left", "right", "score")

    def __init__(self):
        self.tf = 0
        self.tf_upper = 0
        self.tf_proper = 0
        self.sentences: list[int] = []
        self.left: dict[str, int] = {}
        self.right: dict[str, int] = {}
        self.score = 0.0


class _Document:
    """Tokenized text with term statistics and global word-token indexing."""

    def __init__(self, text: str, config: ExtractionConfig):
        self.config = config
        self.stop = config.stopword_list
        self.terms: dict[str, _Term] = {}
        # chunks: lists of (global_index, original_token) split at punctuation
        self.chunks: list[list[tuple[int, str]]] = []
        self.words: list[str] = []

        sentences = split_sentences(text)
        self.n_sentences = len(sentences)
        gidx = 0
        for s_idx, sentence in enumerate(sentences):
            chunk: list[tuple[int, str]] = []
            sent_word_idx = 0
            for token in tokenize(sentence):
                if not is_word(token):
                    if chunk:
                        self.chunks.append(chunk)
                        chunk = []
                    continue
                low = token.lower()
                term = self.terms.setdefault(low, _Term())
                term.tf += 1
                term.sentences.append(s_idx)
                if len(token) > 1 and token.isupper():
                    term.tf_upper += 1
                elif token[:1].isupper() and sent_word_idx > 0:
                    term.tf_proper += 1
                for back in range(max(0, len(chunk) - config.window), len(chunk)):
                    prev = chunk[back][1].lower()
                    self.terms[prev].right[low] = self.terms[prev].right.get(low, 0) + 1
                    term.left[prev] = term.left.get(prev, 0) + 1
                chunk.append((gidx, token))
                self.words.append(token)
                gidx += 1
                sent_word_idx += 1
            if chunk:
                self.chunks.append(chunk)
        self._score_terms()

    def _score_terms(self):
        if not self.terms:
            return
        nonstop_tf = [t.tf for w, t in self.terms.items() if w not in self.stop]
        mean_tf = statistics.fmean(nonstop_tf) if nonstop_tf else 1.0
        std_tf = statistics.pstdev(nonstop_tf) if nonstop_tf else 0.0
        denom_tf = mean_tf + std_tf
        max_tf = max(t.tf for t in self.terms.values())
        n_sent = max(1, self.n_sentences)
        for term in self.terms.values():
            case = max(term.tf_upper, term.tf_proper) / (1.0 + math.log(term.tf))
            pos = math.log(math.log(3.0 + statistics.median(term.sentences)))
            freq = term.tf / denom_tf if denom_tf > 0 else 0.0
            dl = len(term.left) / sum(term.left.values()) if term.left else 0.0
            dr = len(term.right) / sum(term.right.values()) if term.right else 0.0
            rel = 1.0 + (dl + dr) * term.tf / max_tf
            spread = len(set(term.sentences)) / n_sent
            term.score = rel * pos / (case + freq / rel + spread / rel)

    def edge_prob(self, prev: str, word: str, nxt: str) -> float:
        """P(prev -> word) * P(word -> next) over term frequencies."""
        term = self.terms[word]
        p1 = term.left.get(prev, 0) / self.terms[prev].tf if prev in self.terms else 0.0
        p2 = term.right.get(nxt, 0) / self.terms[nxt].tf if nxt in self.terms else 0.0
        return p1 * p2


def _phrase_counts(doc: _Document, max_n: int) -> dict[tuple[str, ...], int]:
    counts: dict[tuple[str, ...], int] = {}
    for chunk in doc.chunks:
        lows = [tok.lower() for _, tok in chunk]
        for length in range(2, max_n + 1):
            for start in range(len(lows) - length + 1):
                key = tuple(lows[start:start + length])
                counts[key] = counts.get(key, 0) + 1
    return counts


def ranked_candidates(text: str, config: ExtractionConfig) -> list[Keyphrase]:
    """All valid candidate phrases ranked ascending by score.

    One entry per distinct lowercased token sequence; the span and the
    output casing come from its first occurrence.
    """
    doc = _Document(text, config)
    if len(doc.words) < 2:
        return []
    phrase_tf = _phrase_counts(doc, config.max_n)

    seen: set[tuple[str, ...]] = set()
    candidates: list[Keyphrase] = []
    for chunk in doc.chunks:
        for length in range(2, config.max_n + 1):
            for start in range(len(chunk) - length + 1):
                window = chunk[start:start + length]
                lows = tuple(tok.lower() for _, tok in window)
                if lows in seen:
                    continue
                if lows[0] in doc.stop or lows[-1] in doc.stop:
                    continue
                prod = 1.0
                total = 0.0
                for i, low in enumerate(lows):
                    if low in doc.stop:
                        p = doc.edge_prob(lows[i - 1], low, lows[i + 1])
                        prod *= 2.0 - p
                        total -= 1.0 - p
                    else:
                        s = doc.terms[low].score
                        prod *= s
                        total += s
                score = prod / (phrase_tf[lows] * (1.0 + total))
                seen.add(lows)
                candidates.append(
                    Keyphrase(
                        tokens=tuple(tok for _, tok in window),
                        source_span=(window[0][0], window[-1][0] + 1),
                        score=score,
                    )
                )
    candidates.sort(key=lambda k: (k.score, k.source_span))
    return candidates


def _levenshtein(a: str, b: str) -> int:
    if len(a) < len(b):
        a, b = b, a
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        current = [i]
        for j, cb in enumerate(b, start=1):
            current.append(min(previous[j] + 1, current[j - 1] + 1, previous[j - 1] + (ca != cb)))
        previous = current
    return previous[-1]


def _similarity(a: str, b: str) -> float:
    if not a and not b:
        return 1.0
    return 1.0 - _levenshtein(a, b) / max(len(a), len(b))


def _overlaps(a: tuple[int, int], b: tuple[int, int]) -> bool:
    return a[0] < b[1] and b[0] < a[1]


def extract_keyphrases(text: str, config: ExtractionConfig | None = None) -> list[Keyphrase]:
    """Top keyphrases of a sentence: deduplicated, span-disjoint, score-ranked.

    Texts with fewer than two word tokens yield an empty list.  Results
    are invariant to trailing whitespace and terminal punctuation.
    """
    config = config or ExtractionConfig()
    selected: list[Keyphrase] = []
    for cand in ranked_candidates(text, config):
        low = cand.text.lower()
        if any(_similarity(low, kept.text.lower()) >= config.dedup_threshold for kept in selected):
            continue
        if any(_overlaps(cand.source_span, kept.source_span) for kept in selected):
            continue
        selected.append(cand)
    return selected[: config.max_phrases]


def build_recombined_input(
    example: Example,
    source_text: str,
    config: ExtractionConfig | None = None,
    origin: str = "reference",
) -> RecombinedInput:
    """Keyphrases from source_text plus every concept they do not cover.

    Concept coverage uses the evaluation module's normalization (lowercase
    + stemming), so an inflected phrase token covers its concept.  When
    extraction yields nothing the original concepts pass through as
    singleton elements.
    """
    config = config or ExtractionConfig()
    phrases = extract_keyphrases(source_text, config) if source_text.strip() else []
    covered: set[str] = set()
    for phrase in phrases:
        covered.update(normalize_token(tok) for tok in phrase.tokens)
    restored = [c for c in example.concepts if normalize_token(c) not in covered]
    elements = tuple(p.text for p in phrases) + tuple(restored)
    return RecombinedInput(
        source_example_id=example.id,
        elements=elements,
        origin=origin,
        keyphrases=tuple(phrases),
    )


def build_recombined_split(
    examples: Sequence[Example],
    texts: Mapping[str, str],
    config: ExtractionConfig | None = None,
    origin: str = "reference",
) -> list[RecombinedInput]:
    """One RecombinedInput per example, aligned by id, order preserved."""
    missing = [ex.id for ex in examples if ex.id not in texts]
    if missing:
        raise MissingIdError(missing[0])
    return [build_recombined_input(ex, texts[ex.id], config, origin) for ex in examples]
