"""Model and hyperparameter selection rules.

Epoch selection picks the epoch with the highest dev ROUGE-2 (earliest
on ties); hyperparameter selection averages the selection metric over
seeds per grid point and takes the argmax (smallest value on ties).
"""

from __future__ import annotations

from typing import Mapping, Sequence

from ..errors import SapphireError

SELECTION_METRIC = "rouge-2"


def _metric_value(entry, metric: str) -> float:
    if isinstance(entry, Mapping):
        key = metric.lower()
        for k, v in entry.items():
            if k.lower() == key:
                return float(v)
        raise SapphireError(f"selection metric {metric!r} missing from {sorted(entry)}")
    return float(entry)


def select_epoch(per_epoch: Mapping[int, object], metric: str = SELECTION_METRIC) -> int:
    """Epoch whose dev metric is highest; earliest epoch wins ties."""
    if not per_epoch:
        raise SapphireError("no epochs to select from")
    best_epoch = None
    best_value = None
    for epoch in sorted(per_epoch):
        value = _metric_value(per_epoch[epoch], metric)
        if best_value is None or value > best_value:
            best_epoch, best_value = epoch, value
    return best_epoch


def select_hparam(runs: Mapping[object, Sequence[object]], metric: str = SELECTION_METRIC):
    """Grid value whose seed-averaged dev metric is highest.

    Every grid point must carry the same number of per-seed entries;
    ragged tables are an error, not silently averaged.
    """
    if not runs:
        raise SapphireError("no hyperparameter candidates to select from")
    seed_counts = {len(v) for v in runs.values()}
    if len(seed_counts) != 1:
        raise SapphireError(f"ragged per-seed metric lists: counts {sorted(seed_counts)}")
    if seed_counts == {0}:
        raise SapphireError("empty per-seed metric lists")
    best_key = None
    best_value = None
    for key in sorted(runs, key=lambda k: (str(type(k)), k)):
        values = [_metric_value(e, metric) for e in runs[key]]
        avg = sum(values) / len(values)
        if best_value is None or avg > best_value:
            best_key, best_value = key, avg
    return best_key
