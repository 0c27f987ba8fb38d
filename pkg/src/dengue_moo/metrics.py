"""Hypervolume and run statistics for biobjective fronts."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import nondominated_mask

DEFAULT_REF_POINT = (3.0, 80.0)
STATISTICS_HEADER = ("algorithm", "runs", "median_hv", "q1", "q3", "min", "max", "total_hv")


def hypervolume_2d(front, ref=DEFAULT_REF_POINT) -> float:
    """Exact area dominated by ``front`` and bounded by ``ref`` (minimization).

    Points not strictly better than ``ref`` in both objectives contribute
    nothing, so a point sitting on the reference boundary adds zero area.
    """
    F = np.asarray(front, dtype=np.float64).reshape(-1, 2)
    ref = np.asarray(ref, dtype=np.float64)
    F = F[np.all(F < ref, axis=1)]
    if F.shape[0] == 0:
        return 0.0
    F = F[nondominated_mask(F)]
    F = F[np.argsort(F[:, 0], kind="stable")]
    # f2 strictly decreases along the sorted front; sum vertical slabs
    right = np.append(F[1:, 0], ref[0])
    return float(np.sum((right - F[:, 0]) * (ref[1] - F[:, 1])))


@dataclass(frozen=True)
class RunStatistics:
    values: tuple[float, ...]
    median: float
    q1: float
    q3: float
    min: float
    max: float

    @property
    def runs(self) -> int:
        return len(self.values)


def aggregate_runs(values) -> RunStatistics:
    """Order statistics of per-run hypervolumes with linearly interpolated quartiles."""
    v = np.asarray(values, dtype=np.float64).ravel()
    if v.size == 0:
        raise ValueError("need at least one run")
    q1, med, q3 = np.percentile(v, [25, 50, 75])
    return RunStatistics(
        values=tuple(float(x) for x in v),
        median=float(med),
        q1=float(q1),
        q3=float(q3),
        min=float(v.min()),
        max=float(v.max()),
    )


def total_hypervolume(fronts, ref=DEFAULT_REF_POINT) -> float:
    """Hypervolume of the nondominated union of several runs' fronts."""
    fronts = [np.asarray(f, dtype=np.float64).reshape(-1, 2) for f in fronts]
    if not fronts:
        raise ValueError("need at least one front")
    return hypervolume_2d(np.vstack(fronts), ref)


def write_statistics_csv(rows, path: str | Path) -> None:
    """Write ``(algorithm, RunStatistics, total_hv)`` rows."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(STATISTICS_HEADER)
        for name, stats, total in rows:
            writer.writerow(
                [name, stats.runs, *(repr(x) for x in (stats.median, stats.q1, stats.q3, stats.min, stats.max, float(total)))]
            )
