"""Nondominated sorting, crowding distance and the helpers built on them."""

from __future__ import annotations

import numpy as np

from ..core import EvaluationBudget, nondominated_mask
from ..metrics import hypervolume_2d


def dominance_matrix(F: np.ndarray) -> np.ndarray:
    """``D[i, j]`` is True when row ``i`` dominates row ``j``."""
    le = np.all(F[:, None, :] <= F[None, :, :], axis=2)
    lt = np.any(F[:, None, :] < F[None, :, :], axis=2)
    return le & lt


def fast_nondominated_sort(F) -> np.ndarray:
    """Nondomination rank of every row; rank 0 is the nondominated set."""
    F = np.atleast_2d(np.asarray(F, dtype=np.float64))
    n = F.shape[0]
    ranks = np.full(n, -1, dtype=np.int64)
    if n == 0:
        return ranks
    D = dominance_matrix(F)
    dominated_count = D.sum(axis=0)
    current = np.nonzero(dominated_count == 0)[0]
    rank = 0
    while current.size:
        ranks[current] = rank
        dominated_count = dominated_count - D[current].sum(axis=0)
        dominated_count[ranks >= 0] = -1
        current = np.nonzero(dominated_count == 0)[0]
        rank += 1
    return ranks


def crowding_distance(F) -> np.ndarray:
    """Crowding distance within one front.

    Boundary members of every objective get ``inf``; interior members add the
    gap between their neighbours normalized by the objective's range.
    """
    F = np.atleast_2d(np.asarray(F, dtype=np.float64))
    n, m = F.shape
    if n == 0:
        raise ValueError("front must be nonempty")
    dist = np.zeros(n)
    if n <= 2:
        dist[:] = np.inf
        return dist
    for k in range(m):
        order = np.argsort(F[:, k], kind="stable")
        col = F[order, k]
        dist[order[0]] = np.inf
        dist[order[-1]] = np.inf
        span = col[-1] - col[0]
        if span <= 0:
            continue
        dist[order[1:-1]] += (col[2:] - col[:-2]) / span
    return dist


def rank_and_crowding(F: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    ranks = fast_nondominated_sort(F)
    crowd = np.zeros(F.shape[0])
    for r in np.unique(ranks):
        members = np.nonzero(ranks == r)[0]
        crowd[members] = crowding_distance(F[members])
    return ranks, crowd


def truncate_by_rank_and_crowding(F: np.ndarray, size: int) -> np.ndarray:
    """Indices of the ``size`` survivors: whole fronts first, then the least crowded."""
    ranks, crowd = rank_and_crowding(F)
    # rank ascending, crowding descending, index ascending
    order = np.lexsort((np.arange(F.shape[0]), -crowd, ranks))
    return np.sort(order[:size])


def crowded_tournament(ranks: np.ndarray, crowd: np.ndarray, rng: np.random.Generator) -> int:
    a, b = (int(i) for i in rng.integers(ranks.shape[0], size=2))
    if ranks[a] != ranks[b]:
        return a if ranks[a] < ranks[b] else b
    if crowd[a] != crowd[b]:
        return a if crowd[a] > crowd[b] else b
    return a if rng.random() < 0.5 else b


def log_row(gen: int, budget: EvaluationBudget, F: np.ndarray, ref_point) -> tuple:
    """Per-generation log row; ``n_leaders`` counts the population's nondominated members."""
    return (
        gen,
        budget.fun_eval,
        F.shape[0],
        int(nondominated_mask(F).sum()),
        hypervolume_2d(budget.seen_front, ref_point),
    )
