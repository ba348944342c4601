"""Matplotlib figure rendering for sweep and correlation reports.

Figures land next to the delimited outputs: one curve-per-seed panel per
metric for sweeps (the hyperparameter graphs), and a coefficient chart
for correlation studies.  Uses the Agg backend; nothing here opens a
display.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .evaluation.stats import CorrelationReport  # noqa: E402
from .sweep import SweepReport  # noqa: E402

SWEEP_FIGURE_METRICS = ("bleu-4", "cider", "spice")


def render_sweep_figures(
    report: SweepReport,
    out_dir: str | Path,
    metrics: tuple[str, ...] = SWEEP_FIGURE_METRICS,
) -> list[Path]:
    """One PNG per metric: metric vs grid value, one line per seed plus mean."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    available = {m for cell in report.cells.values() for m in cell}
    paths: list[Path] = []
    for metric in metrics:
        if metric not in available:
            continue
        fig, ax = plt.subplots(figsize=(4.2, 3.2))
        xs = list(report.spec.grid)
        for seed in report.spec.seeds:
            ys = [report.cells[(v, seed)].get(metric) for v in xs]
            ax.plot(xs, ys, marker="o", alpha=0.6, label=f"seed {seed}")
        means = [
            sum(report.cells[(v, s)].get(metric, 0.0) for s in report.spec.seeds) / len(report.spec.seeds)
            for v in xs
        ]
        ax.plot(xs, means, marker="s", color="black", linewidth=2, label="mean")
        ax.set_xlabel(_grid_label(report.spec.method))
        ax.set_ylabel(metric.upper())
        ax.set_title(f"{report.spec.method}: {metric.upper()} vs hyperparameter")
        ax.legend(fontsize=8)
        fig.tight_layout()
        path = out_dir / f"sweep_{report.spec.method}_{metric.replace('-', '')}.png"
        fig.savefig(path, dpi=150)
        plt.close(fig)
        paths.append(path)
    return paths


def _grid_label(method: str) -> str:
    return "words added (k)" if method in ("kw", "att") else "max keyphrase n-gram"


def render_correlation_figure(report: CorrelationReport, path: str | Path) -> Path:
    """Grouped bars of PCC / rho / tau per metric, stars on insignificance."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    metrics = sorted(report.per_metric)
    fig, ax = plt.subplots(figsize=(max(4.0, 0.9 * len(metrics) + 2), 3.4))
    width = 0.27
    for offset, (attr, p_attr, label) in enumerate(
        [("pcc", "pcc_p", "PCC"), ("spearman_rho", "spearman_p", "rho"), ("kendall_tau", "kendall_p", "tau")]
    ):
        xs = [i + (offset - 1) * width for i in range(len(metrics))]
        ys = [getattr(report.per_metric[m], attr) for m in metrics]
        bars = ax.bar(xs, ys, width=width, label=label)
        for bar, m in zip(bars, metrics):
            if getattr(report.per_metric[m], p_attr) > report.alpha:
                ax.annotate("*", (bar.get_x() + bar.get_width() / 2, bar.get_height()),
                            ha="center", fontsize=10)
    ax.axhline(0.0, color="gray", linewidth=0.8)
    ax.set_xticks(range(len(metrics)))
    ax.set_xticklabels(metrics, rotation=45, ha="right", fontsize=8)
    ax.set_ylabel("correlation with set size")
    ax.set_ylim(-1.0, 1.0)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
