"""Correlation study and paired permutation significance testing.

Coefficients are computed from the textbook formulas directly (Pearson
on raw values, Spearman as Pearson over average ranks, Kendall tau-b
with tie correction).  P-values use the t approximation for Pearson and
large-sample normal approximations for rho and tau; the significance
flag applies alpha = 0.05 two-sided.

The Pitman test sign-flips paired per-example differences: exhaustive
over all 2^n patterns up to the cutoff, seeded Monte Carlo with add-one
smoothing beyond it.  For corpus-level metrics the resampling unit is
the per-example sentence score, an approximation noted in the report.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
from scipy.special import stdtr

ALPHA = 0.05

PITMAN_EXHAUSTIVE_CUTOFF = 20
PITMAN_MC_SAMPLES = 100_000


def _normal_sf(z: float) -> float:
    return 0.5 * math.erfc(z / math.sqrt(2.0))


@dataclass(frozen=True)
class CorrelationResult:
    pcc: float
    pcc_p: float
    spearman_rho: float
    spearman_p: float
    kendall_tau: float
    kendall_p: float
    n: int

    def significant(self, alpha: float = ALPHA) -> dict[str, bool]:
        return {
            "pcc": self.pcc_p <= alpha,
            "spearman_rho": self.spearman_p <= alpha,
            "kendall_tau": self.kendall_p <= alpha,
        }

    def to_dict(self) -> dict:
        out = {
            "pcc": self.pcc, "pcc_p": self.pcc_p,
            "spearman_rho": self.spearman_rho, "spearman_p": self.spearman_p,
            "kendall_tau": self.kendall_tau, "kendall_p": self.kendall_p,
            "n": self.n,
        }
        out["significant"] = self.significant()
        return out


@dataclass
class CorrelationReport:
    """Per-metric correlation coefficients against concept-set size."""

    per_metric: dict[str, CorrelationResult] = field(default_factory=dict)
    absent: dict[str, str] = field(default_factory=dict)
    alpha: float = ALPHA

    def to_dict(self) -> dict:
        return {
            "schema": "sapphire-correlations/1",
            "alpha": self.alpha,
            "per_metric": {m: r.to_dict() for m, r in self.per_metric.items()},
            "absent": self.absent,
        }


@dataclass(frozen=True)
class SignificanceResult:
    p_value: float
    n: int
    exhaustive: bool

    def to_dict(self) -> dict:
        return {"p_value": self.p_value, "n": self.n, "exhaustive": self.exhaustive}


@dataclass
class SignificanceReport:
    """Paired-test p-values per metric for a method/baseline comparison."""

    per_metric: dict[str, SignificanceResult] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "schema": "sapphire-significance/1",
            "per_metric": {m: r.to_dict() for m, r in self.per_metric.items()},
        }


# ---------------------------------------------------------------------------
# Coefficients
# ---------------------------------------------------------------------------


def pearson(x: Sequence[float], y: Sequence[float]) -> tuple[float, float]:
    """Pearson r with a two-sided t-approximation p-value."""
    n = len(x)
    if n != len(y) or n < 3:
        raise ValueError("need >= 3 paired observations")
    mx = sum(x) / n
    my = sum(y) / n
    dx = [xi - mx for xi in x]
    dy = [yi - my for yi in y]
    sxx = sum(d * d for d in dx)
    syy = sum(d * d for d in dy)
    if sxx == 0.0 or syy == 0.0:
        raise ValueError("correlation undefined for constant input")
    r = sum(a * b for a, b in zip(dx, dy)) / math.sqrt(sxx * syy)
    r = max(-1.0, min(1.0, r))
    if abs(r) == 1.0:
        return r, 0.0
    t = r * math.sqrt((n - 2) / (1.0 - r * r))
    p = 2.0 * float(stdtr(n - 2, -abs(t)))
    return r, p


def average_ranks(values: Sequence[float]) -> list[float]:
    """1-based ranks, ties mapped to the mean rank of the tied block."""
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        mean_rank = (i + j) / 2.0 + 1.0
        for k in range(i, j + 1):
            ranks[order[k]] = mean_rank
        i = j + 1
    return ranks


def spearman(x: Sequence[float], y: Sequence[float]) -> tuple[float, float]:
    """Tie-corrected Spearman rho (Pearson on average ranks).

    p-value from the large-sample normal approximation z = rho*sqrt(n-1).
    """
    rho, _ = pearson(average_ranks(x), average_ranks(y))
    z = rho * math.sqrt(len(x) - 1)
    return rho, 2.0 * _normal_sf(abs(z))


def kendall(x: Sequence[float], y: Sequence[float]) -> tuple[float, float]:
    """Kendall tau-b with tie correction and a normal approximation p-value."""
    n = len(x)
    if n != len(y) or n < 3:
        raise ValueError("need >= 3 paired observations")
    concordant = discordant = 0
    for i in range(n):
        for j in range(i + 1, n):
            sx = (x[i] > x[j]) - (x[i] < x[j])
            sy = (y[i] > y[j]) - (y[i] < y[j])
            prod = sx * sy
            if prod > 0:
                concordant += 1
            elif prod < 0:
                discordant += 1
    n0 = n * (n - 1) // 2

    def tie_groups(vals):
        counts: dict[float, int] = {}
        for v in vals:
            counts[v] = counts.get(v, 0) + 1
        return [c for c in counts.values() if c > 1]

    tx = tie_groups(x)
    ty = tie_groups(y)
    n1 = sum(t * (t - 1) // 2 for t in tx)
    n2 = sum(t * (t - 1) // 2 for t in ty)
    denom = math.sqrt((n0 - n1) * (n0 - n2))
    if denom == 0.0:
        raise ValueError("correlation undefined for constant input")
    s = concordant - discordant
    tau = s / denom
    tau = max(-1.0, min(1.0, tau))

    # tie-corrected variance of S (large-sample z test)
    v0 = n * (n - 1) * (2 * n + 5)
    vt = sum(t * (t - 1) * (2 * t + 5) for t in tx)
    vu = sum(t * (t - 1) * (2 * t + 5) for t in ty)
    v1 = sum(t * (t - 1) for t in tx) * sum(t * (t - 1) for t in ty) / (2.0 * n * (n - 1))
    v2 = (
        sum(t * (t - 1) * (t - 2) for t in tx)
        * sum(t * (t - 1) * (t - 2) for t in ty)
        / (9.0 * n * (n - 1) * (n - 2))
    )
    var_s = (v0 - vt - vu) / 18.0 + v1 + v2
    if var_s <= 0:
        return tau, 1.0
    z = s / math.sqrt(var_s)
    return tau, 2.0 * _normal_sf(abs(z))


def correlate(
    per_example: Mapping[str, Mapping[str, float]],
    sizes: Mapping[str, int],
    alpha: float = ALPHA,
) -> CorrelationReport:
    """Correlate each metric's per-example values with concept-set size.

    Metrics with fewer than 3 shared examples, or constant on either
    axis, are reported as absent rather than guessed.
    """
    metrics: set[str] = set()
    for values in per_example.values():
        metrics.update(values)
    report = CorrelationReport(alpha=alpha)
    for metric in sorted(metrics):
        xs: list[float] = []
        ys: list[float] = []
        for ex_id, values in per_example.items():
            if metric in values and ex_id in sizes:
                xs.append(float(sizes[ex_id]))
                ys.append(float(values[metric]))
        if len(xs) < 3:
            report.absent[metric] = f"only {len(xs)} paired observations"
            continue
        try:
            pcc, pcc_p = pearson(xs, ys)
            rho, rho_p = spearman(xs, ys)
            tau, tau_p = kendall(xs, ys)
        except ValueError as exc:
            report.absent[metric] = str(exc)
            continue
        report.per_metric[metric] = CorrelationResult(pcc, pcc_p, rho, rho_p, tau, tau_p, len(xs))
    return report


# ---------------------------------------------------------------------------
# Pitman permutation test
# ---------------------------------------------------------------------------


def pitman_test(
    diffs: Sequence[float],
    cutoff: int = PITMAN_EXHAUSTIVE_CUTOFF,
    mc_samples: int = PITMAN_MC_SAMPLES,
    seed: int = 13,
) -> SignificanceResult:
    """Two-sided paired sign-flip test on the mean difference.

    Exhaustive over all 2^n sign patterns when n <= cutoff, otherwise
    seeded Monte Carlo with add-one smoothing.  The returned p lies in
    (0, 1].
    """
    diffs = [float(d) for d in diffs]
    n = len(diffs)
    if n == 0:
        raise ValueError("need at least one paired difference")
    observed = abs(sum(diffs))
    tol = 1e-12 * (1.0 + observed)
    if n <= cutoff:
        sums = np.zeros(1)
        for d in diffs:
            sums = np.concatenate([sums + d, sums - d])
        count = int(np.count_nonzero(np.abs(sums) >= observed - tol))
        return SignificanceResult(count / len(sums), n, exhaustive=True)
    rng = random.Random(seed)
    arr = np.asarray(diffs)
    hits = 0
    batch = 4096
    remaining = mc_samples
    while remaining > 0:
        m = min(batch, remaining)
        signs = np.asarray(
            [[1.0 if rng.random() < 0.5 else -1.0 for _ in range(n)] for _ in range(m)]
        )
        sums = signs @ arr
        hits += int(np.count_nonzero(np.abs(sums) >= observed - tol))
        remaining -= m
    return SignificanceResult((1 + hits) / (1 + mc_samples), n, exhaustive=False)
