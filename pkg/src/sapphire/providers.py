"""Pluggable interfaces for every piece of neural-model functionality.

Nothing in the core pipelines depends on a concrete model family; they
see only these interfaces.  Deterministic stub implementations back the
test suite and desk-scale runs.  Production transformer bindings are
configured by name through the same registry.
"""

from __future__ import annotations

import hashlib
import math
from abc import ABC, abstractmethod
from dataclasses import asdict, dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import ProviderError, RegistryError
from .textproc import STOPWORDS, content_words, word_tokens

ATTENTION_ROW_TOL = 1e-4


@dataclass(frozen=True)
class DecodeConfig:
    """Beam-search decoding defaults shared by all generation backends."""

    beam_size: int = 5
    length_penalty: float = 0.6
    max_len: int = 32
    min_len: int = 1
    early_stop: bool = True

    def __post_init__(self):
        if self.beam_size < 1:
            raise ValueError("beam_size must be >= 1")
        if self.min_len > self.max_len:
            raise ValueError("min_len must be <= max_len")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "DecodeConfig":
        return cls(**data)


def cosine(u: Sequence[float], v: Sequence[float]) -> float:
    """Cosine similarity of two equal-dimension vectors, in [-1, 1]."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.shape} vs {v.shape}")
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        raise ValueError("cosine undefined for zero vectors")
    value = float(np.dot(u, v) / (nu * nv))
    return max(-1.0, min(1.0, value))


def stable_hash(text: str, seed: int = 0) -> int:
    """Stable 64-bit hash of a string, independent of PYTHONHASHSEED."""
    digest = hashlib.blake2b(f"{seed}:{text}".encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "big")


# ---------------------------------------------------------------------------
# Interfaces
# ---------------------------------------------------------------------------


class Provider(ABC):
    """Common declaration surface for all providers."""

    kind: str = "abstract"
    concurrent_safe: bool = True
    max_in_flight: int = 8

    def identity(self) -> str:
        return self.kind


class ContextualEmbedder(Provider):
    """Maps a word or text to a fixed-dimension real vector."""

    dimension: int = 16

    @abstractmethod
    def embed(self, text: str) -> np.ndarray: ...

    def embed_batch(self, texts: Sequence[str]) -> list[np.ndarray]:
        return [self.embed(t) for t in texts]


class AttentionProvider(Provider):
    """Returns token-level attention for a sentence.

    attend() yields (tokens, attention[heads, pieces, pieces], alignment)
    where alignment[w] lists the piece indices of word w.  Rows must sum
    to 1 within ATTENTION_ROW_TOL; smaller drift is renormalized here,
    larger drift is a provider-contract failure.
    """

    @abstractmethod
    def attend(self, sentence: str) -> tuple[list[str], np.ndarray, list[list[int]]]: ...

    def attend_checked(self, sentence: str) -> tuple[list[str], np.ndarray, list[list[int]]]:
        tokens, attention, alignment = self.attend(sentence)
        attention = np.asarray(attention, dtype=float)
        sums = attention.sum(axis=-1)
        if np.any(np.abs(sums - 1.0) >= ATTENTION_ROW_TOL):
            worst = float(np.max(np.abs(sums - 1.0)))
            raise ProviderError(f"attention rows deviate from 1 by {worst:.2e} (> {ATTENTION_ROW_TOL})")
        attention = attention / sums[..., None]
        return tokens, attention, alignment

    def attend_batch(self, sentences: Sequence[str]) -> list[tuple[list[str], np.ndarray, list[list[int]]]]:
        return [self.attend(s) for s in sentences]


class PerplexityScorer(Provider):
    """Perplexity of a text; an opaque positive real, lower = more natural."""

    @abstractmethod
    def ppl(self, text: str) -> float: ...

    def ppl_batch(self, texts: Sequence[str]) -> list[float]:
        return [self.ppl(t) for t in texts]


class MaskInfiller(Provider):
    """Fills <mask> slots in a template with text."""

    mask_token: str = "<mask>"

    @abstractmethod
    def infill(self, template: str) -> str: ...

    def infill_batch(self, templates: Sequence[str]) -> list[str]:
        return [self.infill(t) for t in templates]


class SequenceGenerator(Provider):
    """Seq2seq generation under a DecodeConfig."""

    @abstractmethod
    def generate(self, input_text: str, decode: DecodeConfig) -> str: ...

    def generate_batch(self, inputs: Sequence[str], decode: DecodeConfig) -> list[str]:
        return [self.generate(t, decode) for t in inputs]


class KeywordExtractor(Provider):
    """Candidate keyword generator for keyword-based augmentation."""

    @abstractmethod
    def keywords(self, text: str) -> list[str]: ...


class MetricAdapter(Provider):
    """External reference-based metric (meteor / spice / bertscore)."""

    metric: str = "adapter"

    @abstractmethod
    def score(self, example_id: str, candidate: str, references: Sequence[str]) -> float: ...


# ---------------------------------------------------------------------------
# Deterministic stubs
# ---------------------------------------------------------------------------


class StubEmbedder(ContextualEmbedder):
    """Table-backed embedder; unknown words get a hash-derived unit vector."""

    kind = "stub-embedder"

    def __init__(self, table: dict[str, Sequence[float]] | None = None, dimension: int = 16, seed: int = 0):
        self.table = {k: np.asarray(v, dtype=float) for k, v in (table or {}).items()}
        self.dimension = dimension
        self.seed = seed

    def embed(self, text: str) -> np.ndarray:
        key = text.lower()
        if key in self.table:
            return self.table[key]
        rng = np.random.default_rng(stable_hash(key, self.seed))
        vec = rng.normal(size=self.dimension)
        return vec / np.linalg.norm(vec)

    def identity(self) -> str:
        return f"{self.kind}(dim={self.dimension},seed={self.seed})"


class SimilarityEmbedder(ContextualEmbedder):
    """Embedder with a pinned cosine-to-concept-axis per word.

    Words in the table get a vector whose cosine against the shared
    concept axis equals the table value exactly; everything else (the
    concepts themselves included) lies on the axis.
    """

    kind = "similarity-embedder"

    def __init__(self, table: dict[str, float], dimension: int = 8, seed: int = 0):
        if dimension < 3:
            raise ValueError("dimension must be >= 3")
        self.table = {k.lower(): float(v) for k, v in table.items()}
        self.dimension = dimension
        self.seed = seed

    def embed(self, text: str) -> np.ndarray:
        key = text.lower()
        axis = np.zeros(self.dimension)
        axis[0] = 1.0
        if key not in self.table:
            return axis
        sim = self.table[key]
        if abs(sim) > 1.0:
            raise ValueError(f"similarity for {key!r} out of [-1, 1]")
        # orthogonal component on a stable per-word coordinate
        ortho = np.zeros(self.dimension)
        ortho[1 + stable_hash(key, self.seed) % (self.dimension - 1)] = 1.0
        return sim * axis + math.sqrt(max(0.0, 1.0 - sim * sim)) * ortho

    def identity(self) -> str:
        return f"{self.kind}(words={len(self.table)})"


class HashPerplexityScorer(PerplexityScorer):
    """ppl = 1 + ((hash(text) mod 1e6) / 1e6) * 99, a spread in (1, 100]."""

    kind = "hash-ppl"

    def __init__(self, seed: int = 0):
        self.seed = seed

    def ppl(self, text: str) -> float:
        return 1.0 + (stable_hash(text, self.seed) % 10**6) / 10**6 * 99.0

    def identity(self) -> str:
        return f"{self.kind}(seed={self.seed})"


class TablePerplexityScorer(PerplexityScorer):
    """Exact perplexities for pinned texts, constant default elsewhere."""

    kind = "table-ppl"

    def __init__(self, table: dict[str, float], default: float = 50.0):
        self.table = dict(table)
        self.default = float(default)

    def ppl(self, text: str) -> float:
        return float(self.table.get(text, self.default))


class StubAttention(AttentionProvider):
    """Synthesizes attention whose aggregate received mass follows a weight table.

    Every source piece distributes its row proportionally to the target
    words' configured weights (default 1.0), so a word's received
    attention is monotone in its weight.  split_words simulates subword
    tokenization (word -> piece count) to exercise pooling.
    """

    kind = "stub-attention"

    def __init__(self, weights: dict[str, float] | None = None, heads: int = 2,
                 split_words: dict[str, int] | None = None):
        self.weights = {k.lower(): float(v) for k, v in (weights or {}).items()}
        self.heads = heads
        self.split_words = {k.lower(): int(v) for k, v in (split_words or {}).items()}

    def attend(self, sentence: str) -> tuple[list[str], np.ndarray, list[list[int]]]:
        tokens = word_tokens(sentence)
        alignment: list[list[int]] = []
        piece_word: list[int] = []
        for w, tok in enumerate(tokens):
            pieces = self.split_words.get(tok.lower(), 1)
            start = len(piece_word)
            alignment.append(list(range(start, start + pieces)))
            piece_word.extend([w] * pieces)
        n = len(piece_word)
        if n == 0:
            return tokens, np.zeros((self.heads, 0, 0)), alignment
        col = np.array([self.weights.get(tokens[w].lower(), 1.0) for w in piece_word], dtype=float)
        row = col / col.sum()
        attention = np.tile(row, (self.heads, n, 1))
        return tokens, attention, alignment

    def identity(self) -> str:
        return f"{self.kind}(words={len(self.weights)},heads={self.heads})"


class EchoGenerator(SequenceGenerator):
    """Returns the input with separator tokens removed, length-clipped."""

    kind = "echo-generator"

    def __init__(self, separator: str = "<s>"):
        self.separator = separator

    def generate(self, input_text: str, decode: DecodeConfig) -> str:
        words = [w for w in input_text.split() if w != self.separator]
        return " ".join(words[: decode.max_len])


class LookupGenerator(SequenceGenerator):
    """Memorized input -> output pairs; errors on unseen input."""

    kind = "lookup-generator"

    def __init__(self, table: dict[str, str]):
        self.table = dict(table)

    def generate(self, input_text: str, decode: DecodeConfig) -> str:
        if input_text not in self.table:
            raise ProviderError(f"lookup generator has no output for {input_text!r}")
        return self.table[input_text]


class StubInfiller(MaskInfiller):
    """Replaces every mask slot with a fixed filler string."""

    kind = "stub-infiller"

    def __init__(self, filler: str = ""):
        self.filler = filler

    def infill(self, template: str) -> str:
        out = template.replace(self.mask_token, self.filler)
        out = " ".join(out.split())
        return out if out else self.filler.strip() or template

    def identity(self) -> str:
        return f"{self.kind}(filler={self.filler!r})"


class TableInfiller(MaskInfiller):
    """Pinned template -> output mapping with a stub fallback."""

    kind = "table-infiller"

    def __init__(self, table: dict[str, str], filler: str = ""):
        self.table = dict(table)
        self._fallback = StubInfiller(filler)

    def infill(self, template: str) -> str:
        return self.table.get(template) or self._fallback.infill(template)


class ContentKeywordExtractor(KeywordExtractor):
    """Default candidate generator: content words of the text."""

    kind = "content-keywords"

    def __init__(self, stopwords: frozenset[str] | set[str] = STOPWORDS):
        self.stopwords = frozenset(stopwords)

    def keywords(self, text: str) -> list[str]:
        return content_words(text, self.stopwords)


class ConstantAdapter(MetricAdapter):
    """External-metric stub returning one constant score."""

    kind = "constant-adapter"

    def __init__(self, metric: str, value: float):
        self.metric = metric
        self.value = float(value)

    def score(self, example_id: str, candidate: str, references: Sequence[str]) -> float:
        return self.value


class TableAdapter(MetricAdapter):
    """External-metric stub with per-example scores."""

    kind = "table-adapter"

    def __init__(self, metric: str, table: dict[str, float], default: float = 0.0):
        self.metric = metric
        self.table = {str(k): float(v) for k, v in table.items()}
        self.default = float(default)

    def score(self, example_id: str, candidate: str, references: Sequence[str]) -> float:
        return self.table.get(example_id, self.default)


# ---------------------------------------------------------------------------
# Registry
# ---------------------------------------------------------------------------

_REGISTRY: dict[str, Callable[..., Provider]] = {
    "stub-embedder": StubEmbedder,
    "similarity-embedder": SimilarityEmbedder,
    "hash-ppl": HashPerplexityScorer,
    "table-ppl": TablePerplexityScorer,
    "stub-attention": StubAttention,
    "echo-generator": EchoGenerator,
    "lookup-generator": LookupGenerator,
    "stub-infiller": StubInfiller,
    "table-infiller": TableInfiller,
    "content-keywords": ContentKeywordExtractor,
    "constant-adapter": ConstantAdapter,
    "table-adapter": TableAdapter,
}


def register_provider(kind: str, factory: Callable[..., Provider]) -> None:
    """Hook for production backends to join the registry."""
    _REGISTRY[kind] = factory


def known_kinds() -> list[str]:
    return sorted(_REGISTRY)


def load_provider(config: dict) -> Provider:
    """Instantiate a provider from {"kind": ..., **params}."""
    if "kind" not in config:
        raise RegistryError("<missing>", known_kinds())
    kind = config["kind"]
    if kind not in _REGISTRY:
        raise RegistryError(kind, known_kinds())
    params = {k: v for k, v in config.items() if k != "kind"}
    try:
        return _REGISTRY[kind](**params)
    except TypeError as exc:
        raise ProviderError(f"bad parameters for provider {kind!r}: {exc}") from exc
