"""Native reference-based metrics plus the concept coverage metric.

Coverage is the share of input concepts whose normalized form (lowercase
+ Porter stem by default) appears among the output's normalized tokens.
BLEU is corpus-level with brevity penalty, ROUGE the usual per-example
F-measures (max over references, mean over examples), and CIDEr the
tf-idf n-gram consensus, reported on its conventional x10 scale.

Aggregation caveat: coverage and ROUGE aggregate as means of per-example
values while BLEU and CIDEr are corpus-level statistics; per-example BLEU
columns are sentence-level scores and will not average to the corpus
number.  MetricReport.notes carries this.

All metrics share one tokenizer (lowercase, punctuation detached and
dropped), applied to candidates and references alike.
"""

from __future__ import annotations

import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from ..errors import SapphireError
from ..providers import MetricAdapter
from ..textproc import normalize_token, word_tokens

logger = logging.getLogger(__name__)

SCHEMA = "sapphire-report/1"

ADAPTER_METRICS = ("meteor", "spice", "bertscore")


def metric_tokens(text: str) -> list[str]:
    return [t.lower() for t in word_tokens(text)]


@dataclass
class MetricReport:
    """Per-example and aggregate metric values for one generation file."""

    per_example: dict[str, dict[str, float]] = field(default_factory=dict)
    aggregate: dict[str, float] = field(default_factory=dict)
    notes: dict[str, str] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA,
            "aggregate": self.aggregate,
            "per_example": self.per_example,
            "notes": self.notes,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "MetricReport":
        if data.get("schema") != SCHEMA:
            raise SapphireError(f"unsupported report schema {data.get('schema')!r}, expected {SCHEMA}")
        return cls(
            per_example={k: dict(v) for k, v in data.get("per_example", {}).items()},
            aggregate=dict(data.get("aggregate", {})),
            notes=dict(data.get("notes", {})),
        )


# ---------------------------------------------------------------------------
# Coverage
# ---------------------------------------------------------------------------


def coverage(concepts: Sequence[str], text: str, stem: bool = True) -> float:
    """Percentage of concepts covered by the text's tokens, in [0, 100].

    stem=False switches to the strict exact-match mode (lowercase only).
    """
    concepts = list(concepts)
    if not concepts:
        raise ValueError("coverage needs a non-empty concept set")
    tokens = {normalize_token(t, stem=stem) for t in word_tokens(text)}
    hit = sum(1 for c in concepts if normalize_token(c, stem=stem) in tokens)
    return 100.0 * hit / len(concepts)


# ---------------------------------------------------------------------------
# BLEU
# ---------------------------------------------------------------------------


def _ngrams(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def _closest_ref_len(cand_len: int, ref_lens: Sequence[int]) -> int:
    return min(ref_lens, key=lambda r: (abs(r - cand_len), r))


def bleu(candidates: Sequence[str], references: Sequence[Sequence[str]], max_n: int = 4) -> float:
    """Corpus-level BLEU-max_n with brevity penalty, percentage scale."""
    if not candidates or len(candidates) != len(references):
        raise ValueError("need aligned, non-empty candidate and reference lists")
    if not (1 <= max_n <= 4):
        raise ValueError("max_n must be in 1..4")
    matches = [0] * max_n
    totals = [0] * max_n
    cand_len = 0
    ref_len = 0
    for cand, refs in zip(candidates, references):
        cand_toks = metric_tokens(cand)
        ref_toks = [metric_tokens(r) for r in refs]
        cand_len += len(cand_toks)
        ref_len += _closest_ref_len(len(cand_toks), [len(r) for r in ref_toks])
        for n in range(1, max_n + 1):
            cand_counts = _ngrams(cand_toks, n)
            if not cand_counts:
                continue
            max_ref: Counter = Counter()
            for rt in ref_toks:
                for gram, count in _ngrams(rt, n).items():
                    max_ref[gram] = max(max_ref[gram], count)
            matches[n - 1] += sum(min(c, max_ref[g]) for g, c in cand_counts.items())
            totals[n - 1] += sum(cand_counts.values())
    if cand_len == 0 or any(t == 0 for t in totals):
        return 0.0
    if any(m == 0 for m in matches):
        return 0.0
    log_prec = sum(math.log(m / t) for m, t in zip(matches, totals)) / max_n
    bp = 1.0 if cand_len > ref_len else math.exp(1.0 - ref_len / cand_len)
    return 100.0 * bp * math.exp(log_prec)


def sentence_bleu(candidate: str, references: Sequence[str], max_n: int = 4) -> float:
    """BLEU of a single example (the corpus formula on a singleton corpus)."""
    return bleu([candidate], [references], max_n=max_n)


# ---------------------------------------------------------------------------
# ROUGE
# ---------------------------------------------------------------------------


def _f1(matches: float, cand_total: float, ref_total: float) -> float:
    if cand_total == 0 or ref_total == 0:
        return 0.0
    p = matches / cand_total
    r = matches / ref_total
    if p + r == 0:
        return 0.0
    return 2.0 * p * r / (p + r)


def _lcs_len(a: Sequence[str], b: Sequence[str]) -> int:
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        for j, y in enumerate(b, start=1):
            cur.append(prev[j - 1] + 1 if x == y else max(prev[j], cur[j - 1]))
        prev = cur
    return prev[-1]


def rouge_example(candidate: str, references: Sequence[str], variant: str) -> float:
    """ROUGE F1 for one example: max over references, percentage scale."""
    variant = str(variant).lower()
    cand = metric_tokens(candidate)
    best = 0.0
    for ref in references:
        ref_toks = metric_tokens(ref)
        if variant in ("1", "2"):
            n = int(variant)
            cand_counts = _ngrams(cand, n)
            ref_counts = _ngrams(ref_toks, n)
            matched = sum(min(c, ref_counts[g]) for g, c in cand_counts.items())
            score = _f1(matched, sum(cand_counts.values()), sum(ref_counts.values()))
        elif variant == "l":
            score = _f1(_lcs_len(cand, ref_toks), len(cand), len(ref_toks))
        else:
            raise ValueError(f"unknown ROUGE variant {variant!r}")
        best = max(best, score)
    return 100.0 * best


def rouge(candidates: Sequence[str], references: Sequence[Sequence[str]], variant: str) -> float:
    """Mean per-example ROUGE F1 over the corpus."""
    if not candidates or len(candidates) != len(references):
        raise ValueError("need aligned, non-empty candidate and reference lists")
    scores = [rouge_example(c, r, variant) for c, r in zip(candidates, references)]
    return sum(scores) / len(scores)


# ---------------------------------------------------------------------------
# CIDEr
# ---------------------------------------------------------------------------

CIDER_MAX_N = 4
CIDER_SCALE = 10.0


def _cider_vector(tokens: Sequence[str], n: int, idf: Mapping[tuple, float]) -> dict[tuple, float]:
    return {g: c * idf.get(g, idf["__unseen__"]) for g, c in _ngrams(tokens, n).items()}


def _cosine_sparse(u: Mapping[tuple, float], v: Mapping[tuple, float]) -> float:
    nu = math.sqrt(sum(x * x for x in u.values()))
    nv = math.sqrt(sum(x * x for x in v.values()))
    if nu == 0.0 or nv == 0.0:
        return 0.0
    dot = sum(x * v[g] for g, x in u.items() if g in v)
    return dot / (nu * nv)


def cider_per_example(candidates: Sequence[str], references: Sequence[Sequence[str]]) -> list[float]:
    """Per-example CIDEr consensus scores (x10 scale).

    Document frequencies come from the reference sets of this corpus, so
    a corpus of one example has no defined idf and is rejected.
    """
    if len(candidates) != len(references):
        raise ValueError("need aligned candidate and reference lists")
    n_docs = len(candidates)
    if n_docs < 2:
        raise SapphireError(
            "CIDEr needs a corpus of >= 2 examples for idf; see README (metrics) for details"
        )
    ref_tokens = [[metric_tokens(r) for r in refs] for refs in references]
    idf_by_n: list[dict[tuple, float]] = []
    log_n = math.log(n_docs)
    for n in range(1, CIDER_MAX_N + 1):
        df: Counter = Counter()
        for refs in ref_tokens:
            seen: set[tuple] = set()
            for rt in refs:
                seen.update(_ngrams(rt, n).keys())
            df.update(seen)
        idf = {g: log_n - math.log(max(1.0, c)) for g, c in df.items()}
        idf["__unseen__"] = log_n
        idf_by_n.append(idf)

    scores: list[float] = []
    for cand, refs in zip(candidates, ref_tokens):
        cand_toks = metric_tokens(cand)
        total = 0.0
        for n in range(1, CIDER_MAX_N + 1):
            idf = idf_by_n[n - 1]
            cand_vec = _cider_vector(cand_toks, n, idf)
            sims = [_cosine_sparse(cand_vec, _cider_vector(rt, n, idf)) for rt in refs]
            total += sum(sims) / len(sims) if sims else 0.0
        scores.append(CIDER_SCALE * total / CIDER_MAX_N)
    return scores


def cider(candidates: Sequence[str], references: Sequence[Sequence[str]]) -> float:
    """Corpus CIDEr: mean of per-example consensus scores (x10 scale)."""
    scores = cider_per_example(candidates, references)
    return sum(scores) / len(scores)


# ---------------------------------------------------------------------------
# External metric adapters
# ---------------------------------------------------------------------------


def adapter_score(
    adapter: MetricAdapter | None,
    metric: str,
    ids: Sequence[str],
    candidates: Sequence[str],
    references: Sequence[Sequence[str]],
    report: MetricReport,
) -> None:
    """Merge one external metric into a report; absent adapter = absent metric.

    BERTScore is multiplied by 100; other adapters are reported on the
    scale the scorer returns.  Never fabricates values.
    """
    if adapter is None:
        logger.warning("no adapter configured for %s; metric omitted from report", metric)
        report.notes[metric] = "adapter unavailable; metric not computed"
        return
    scale = 100.0 if metric == "bertscore" else 1.0
    values = []
    for ex_id, cand, refs in zip(ids, candidates, references):
        value = scale * adapter.score(ex_id, cand, refs)
        report.per_example.setdefault(ex_id, {})[metric] = value
        values.append(value)
    report.aggregate[metric] = sum(values) / len(values) if values else 0.0
    report.notes[metric] = f"external adapter {adapter.identity()}; aggregate = mean"
    if metric == "bertscore":
        report.notes[metric] += "; scaled x100"


# ---------------------------------------------------------------------------
# Report assembly
# ---------------------------------------------------------------------------

NATIVE_METRICS = (
    "coverage",
    "bleu-1", "bleu-2", "bleu-3", "bleu-4",
    "rouge-1", "rouge-2", "rouge-l",
    "cider",
)


def expand_metric_names(names: Sequence[str]) -> list[str]:
    out: list[str] = []
    for name in names:
        name = name.lower()
        if name == "bleu":
            out.extend(["bleu-1", "bleu-2", "bleu-3", "bleu-4"])
        elif name == "rouge":
            out.extend(["rouge-1", "rouge-2", "rouge-l"])
        else:
            out.append(name)
    return out


def evaluate_generations(
    ids: Sequence[str],
    candidates: Sequence[str],
    references: Sequence[Sequence[str]],
    concepts: Mapping[str, Sequence[str]] | None = None,
    metrics: Sequence[str] = ("coverage", "bleu", "rouge", "cider"),
    adapters: Mapping[str, MetricAdapter] | None = None,
    stem_coverage: bool = True,
) -> MetricReport:
    """Score one generation file against its corpus."""
    names = expand_metric_names(metrics)
    report = MetricReport()
    per = report.per_example
    for ex_id in ids:
        per.setdefault(ex_id, {})

    if "coverage" in names:
        if concepts is None:
            raise ValueError("coverage requested but no concepts provided")
        for ex_id, cand in zip(ids, candidates):
            per[ex_id]["coverage"] = coverage(concepts[ex_id], cand, stem=stem_coverage)
        report.aggregate["coverage"] = sum(p["coverage"] for p in per.values()) / len(ids)
        report.notes["coverage"] = "mean of per-example values; stemmed matching" if stem_coverage \
            else "mean of per-example values; exact matching"

    for n in range(1, 5):
        name = f"bleu-{n}"
        if name not in names:
            continue
        for ex_id, cand, refs in zip(ids, candidates, references):
            per[ex_id][name] = sentence_bleu(cand, refs, max_n=n)
        report.aggregate[name] = bleu(candidates, references, max_n=n)
        report.notes[name] = "corpus-level statistic; per-example column is sentence BLEU"

    for variant in ("1", "2", "l"):
        name = f"rouge-{variant}"
        if name not in names:
            continue
        for ex_id, cand, refs in zip(ids, candidates, references):
            per[ex_id][name] = rouge_example(cand, refs, variant)
        report.aggregate[name] = sum(p[name] for p in per.values()) / len(ids)
        report.notes[name] = "mean of per-example F1 (max over references)"

    if "cider" in names:
        scores = cider_per_example(candidates, references)
        for ex_id, score in zip(ids, scores):
            per[ex_id]["cider"] = score
        report.aggregate["cider"] = sum(scores) / len(scores)
        report.notes["cider"] = "corpus idf; mean of per-example consensus, x10 scale"

    adapters = adapters or {}
    for metric in ADAPTER_METRICS:
        if metric in names:
            adapter_score(adapters.get(metric), metric, ids, candidates, references, report)
    return report
