"""Evaluation machinery: metrics, correlation study, significance, selection."""

from .metrics import (
    MetricReport,
    adapter_score,
    bleu,
    cider,
    coverage,
    evaluate_generations,
    rouge,
    sentence_bleu,
)
from .select import select_epoch, select_hparam
from .stats import CorrelationReport, SignificanceReport, correlate, pitman_test

__all__ = [
    "MetricReport",
    "CorrelationReport",
    "SignificanceReport",
    "adapter_score",
    "bleu",
    "cider",
    "correlate",
    "coverage",
    "evaluate_generations",
    "pitman_test",
    "rouge",
    "select_epoch",
    "select_hparam",
    "sentence_bleu",
]
