"""Hyperparameter sweeps over augmentation k / keyphrase n-gram length.

A sweep consumes per-(grid value, seed) dev metrics, checks the grid is
complete, selects the winner by the seed-averaged selection metric, and
emits the data table behind the hyperparameter graphs.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

from .errors import SapphireError
from .evaluation.select import SELECTION_METRIC, select_hparam

SWEEP_METHODS = ("kw", "att", "p2t", "mi")

DEFAULT_GRIDS = {"kw": [1, 2, 3, 4, 5], "att": [1, 2, 3, 4, 5], "p2t": [2, 3, 5], "mi": [2, 3, 5]}
DEFAULT_SEEDS = (13, 42)


@dataclass(frozen=True)
class SweepSpec:
    method: str
    grid: tuple = ()
    seeds: tuple[int, ...] = DEFAULT_SEEDS
    selection_metric: str = SELECTION_METRIC

    def __post_init__(self):
        if self.method not in SWEEP_METHODS:
            raise SapphireError(f"unknown sweep method {self.method!r}; known: {', '.join(SWEEP_METHODS)}")
        grid = tuple(self.grid) if self.grid else tuple(DEFAULT_GRIDS[self.method])
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "seeds", tuple(self.seeds))
        if not self.grid:
            raise SapphireError("sweep grid must be non-empty")
        if not self.seeds:
            raise SapphireError("sweep needs at least one seed")

    @classmethod
    def from_dict(cls, data: dict) -> "SweepSpec":
        return cls(
            method=data["method"],
            grid=tuple(data.get("grid", ())),
            seeds=tuple(data.get("seeds", DEFAULT_SEEDS)),
            selection_metric=data.get("selection_metric", SELECTION_METRIC),
        )


@dataclass
class SweepReport:
    spec: SweepSpec
    cells: dict = field(default_factory=dict)  # (value, seed) -> {metric: float}
    winner: object = None
    averages: dict = field(default_factory=dict)  # value -> averaged selection metric

    def to_dict(self) -> dict:
        return {
            "schema": "sapphire-sweep/1",
            "method": self.spec.method,
            "grid": list(self.spec.grid),
            "seeds": list(self.spec.seeds),
            "selection_metric": self.spec.selection_metric,
            "winner": self.winner,
            "averages": {str(k): v for k, v in self.averages.items()},
            "cells": [
                {"value": value, "seed": seed, "metrics": metrics}
                for (value, seed), metrics in sorted(self.cells.items(), key=lambda kv: (str(kv[0][0]), kv[0][1]))
            ],
        }

    def table_rows(self) -> list[dict]:
        """Flat rows behind the hyperparameter graphs."""
        rows = []
        metrics = sorted({m for cell in self.cells.values() for m in cell})
        for (value, seed), cell in sorted(self.cells.items(), key=lambda kv: (str(kv[0][0]), kv[0][1])):
            row = {"method": self.spec.method, "value": value, "seed": seed}
            for m in metrics:
                row[m] = cell.get(m)
            rows.append(row)
        return rows


def run_sweep(spec: SweepSpec, cell_metrics: Mapping[tuple, Mapping[str, float]]) -> SweepReport:
    """Aggregate a complete grid of per-seed dev metrics and pick the winner.

    cell_metrics maps (grid value, seed) to a metric dict.  Any missing
    cell is an error listing every absent (value, seed) pair.
    """
    missing = [
        (value, seed)
        for value in spec.grid
        for seed in spec.seeds
        if (value, seed) not in cell_metrics
    ]
    if missing:
        raise SapphireError(f"incomplete sweep grid; missing cells: {missing}")

    report = SweepReport(spec=spec)
    for key in ((v, s) for v in spec.grid for s in spec.seeds):
        report.cells[key] = dict(cell_metrics[key])

    runs = {value: [report.cells[(value, seed)] for seed in spec.seeds] for value in spec.grid}
    report.winner = select_hparam(runs, metric=spec.selection_metric)
    for value, cells in runs.items():
        vals = []
        for cell in cells:
            match = [v for k, v in cell.items() if k.lower() == spec.selection_metric.lower()]
            if not match:
                raise SapphireError(f"cell for value {value!r} lacks metric {spec.selection_metric!r}")
            vals.append(float(match[0]))
        report.averages[value] = sum(vals) / len(vals)
    return report


def write_sweep_table(report: SweepReport, path: str | Path) -> Path:
    """CSV of per-cell metrics, the delimited companion to the figures."""
    path = Path(path)
    rows = report.table_rows()
    fields = list(rows[0].keys()) if rows else ["method", "value", "seed"]
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields)
        writer.writeheader()
        writer.writerows(rows)
    return path
