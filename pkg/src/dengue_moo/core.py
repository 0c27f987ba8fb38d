"""Shared multiobjective machinery.

Dominance, nondominated filtering, normalization and Chebyshev scalarization,
weight vectors, Latin hypercube sampling, the variation operators used by the
baselines (SBX, polynomial mutation, DE/rand/1/bin), evaluation budgets and
front archives.

All objectives are minimized. Decision vectors live in a box ``[lower, upper]``.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Protocol

import numpy as np

# Canonical defaults of the SBX / polynomial mutation operators.
ETA_C = 20.0
ETA_M = 20.0
P_C = 0.9


def make_rng(seed: int | None) -> np.random.Generator:
    """Generator for one algorithm run.

    Each run owns a single PCG64 stream seeded from ``SeedSequence(seed)``.
    Campaigns use ``seed = base_seed + run_index``, so runs never share a stream.
    """
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


class Problem(Protocol):
    name: str
    n_var: int
    lower: np.ndarray
    upper: np.ndarray
    ref_point: np.ndarray

    def evaluate(self, x: np.ndarray) -> np.ndarray: ...

    def evaluate_many(self, X: np.ndarray) -> np.ndarray: ...


class BudgetExhausted(RuntimeError):
    pass


class EvaluationBudget:
    """Counts objective evaluations against a hard cap.

    Every call to :meth:`evaluate` or row of :meth:`evaluate_many` costs one
    evaluation. Requests beyond ``max_eval`` raise :class:`BudgetExhausted`.
    An archive of all nondominated evaluated points is kept so per-generation
    logs can report the hypervolume of everything seen so far.
    """

    def __init__(self, problem: Problem, max_eval: int):
        if max_eval < 1:
            raise ValueError("max_eval must be >= 1")
        self.problem = problem
        self.max_eval = int(max_eval)
        self.fun_eval = 0
        self.seen_front = np.empty((0, 2))

    @property
    def remaining(self) -> int:
        return self.max_eval - self.fun_eval

    @property
    def exhausted(self) -> bool:
        return self.fun_eval >= self.max_eval

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        if self.exhausted:
            raise BudgetExhausted(f"budget of {self.max_eval} evaluations used up")
        self.fun_eval += 1
        f = np.asarray(self.problem.evaluate(x), dtype=np.float64)
        self._track(f[None, :])
        return f

    def evaluate_many(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(X)
        if X.shape[0] > self.remaining:
            raise BudgetExhausted(f"requested {X.shape[0]} evaluations, {self.remaining} left")
        self.fun_eval += X.shape[0]
        F = np.asarray(self.problem.evaluate_many(X), dtype=np.float64)
        self._track(F)
        return F

    def _track(self, F: np.ndarray) -> None:
        if F.shape[0] == 1:
            f = F[0]
            front = self.seen_front
            if np.any(np.all(front <= f, axis=1) & np.any(front < f, axis=1)):
                return
            keep = ~(np.all(f <= front, axis=1) & np.any(f < front, axis=1))
            self.seen_front = np.vstack([front[keep], F])
            return
        merged = np.vstack([self.seen_front, F])
        self.seen_front = merged[nondominated_mask(merged)]


def dominates(a, b) -> bool:
    """True iff ``a`` is no worse everywhere and strictly better somewhere."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return bool(np.all(a <= b) and np.any(a < b))


def weakly_dominates(a, b) -> bool:
    return bool(np.all(np.asarray(a) <= np.asarray(b)))


def nondominated_mask(F: np.ndarray) -> np.ndarray:
    """Boolean mask of rows of ``F`` not dominated by any other row.

    Rows with identical objective vectors do not dominate each other, so
    duplicates survive together.
    """
    F = np.asarray(F, dtype=np.float64)
    n = F.shape[0]
    if n == 0:
        return np.zeros(0, dtype=bool)
    if F.shape[1] == 2:
        return _nondominated_mask_2d(F)
    mask = np.ones(n, dtype=bool)
    for i in range(n):
        le = np.all(F <= F[i], axis=1)
        lt = np.any(F < F[i], axis=1)
        if np.any(le & lt):
            mask[i] = False
    return mask


def _nondominated_mask_2d(F: np.ndarray) -> np.ndarray:
    # Sweep by f1 ascending, f2 ascending within ties. Every earlier point that
    # is not an exact duplicate has f1 <= current f1, so the current point is
    # dominated iff some earlier distinct point has f2 <= current f2.
    order = np.lexsort((F[:, 1], F[:, 0]))
    mask = np.zeros(F.shape[0], dtype=bool)
    best_f2 = np.inf
    i = 0
    n = len(order)
    while i < n:
        j = i
        f1, f2 = F[order[i]]
        while j + 1 < n and F[order[j + 1], 0] == f1 and F[order[j + 1], 1] == f2:
            j += 1
        if f2 < best_f2:
            mask[order[i : j + 1]] = True
            best_f2 = f2
        i = j + 1
    return mask


@dataclass
class Solution:
    x: np.ndarray
    f: np.ndarray
    eval_id: int = -1


@dataclass
class FrontArchive:
    """Mutually nondominated solutions, stored as parallel arrays."""

    X: np.ndarray
    F: np.ndarray
    eval_ids: np.ndarray = field(default=None)

    def __post_init__(self):
        self.X = np.atleast_2d(np.asarray(self.X, dtype=np.float64))
        self.F = np.atleast_2d(np.asarray(self.F, dtype=np.float64))
        if self.eval_ids is None:
            self.eval_ids = np.full(len(self.F), -1, dtype=np.int64)

    def __len__(self) -> int:
        return self.F.shape[0]

    @property
    def solutions(self) -> list[Solution]:
        return [Solution(x, f, int(e)) for x, f, e in zip(self.X, self.F, self.eval_ids)]

    def sorted(self) -> "FrontArchive":
        order = np.lexsort((self.F[:, 1], self.F[:, 0]))
        return FrontArchive(self.X[order], self.F[order], self.eval_ids[order])

    def write_csv(self, front_path: str | Path, x_path: str | Path | None = None) -> None:
        write_front_csv(self, front_path, x_path)


@dataclass
class RunResult:
    """Outcome of one optimizer run: final front, per-generation log, evaluations used."""

    front: FrontArchive
    log: list[tuple]
    fun_eval: int


def nondominated_filter(points) -> FrontArchive:
    """Keep exactly the members not dominated by any other member.

    Accepts a list of :class:`Solution` or an objective matrix.
    """
    if isinstance(points, FrontArchive):
        X, F, ids = points.X, points.F, points.eval_ids
    elif len(points) and isinstance(points[0], Solution):
        X = np.array([p.x for p in points], dtype=np.float64)
        F = np.array([p.f for p in points], dtype=np.float64)
        ids = np.array([p.eval_id for p in points], dtype=np.int64)
    else:
        F = np.atleast_2d(np.asarray(points, dtype=np.float64))
        X = np.zeros((len(F), 0))
        ids = None
    if len(F) == 0:
        return FrontArchive(np.zeros((0, X.shape[1] if X.ndim == 2 else 0)), np.zeros((0, 2)))
    mask = nondominated_mask(F)
    return FrontArchive(X[mask], F[mask], None if ids is None else ids[mask])


def front_from_population(X: np.ndarray, F: np.ndarray) -> FrontArchive:
    mask = nondominated_mask(F)
    return FrontArchive(X[mask].copy(), F[mask].copy())


def normalize_objectives(F) -> np.ndarray:
    """Min-max normalize each objective over the population.

    A constant column maps to zeros rather than dividing by zero.
    """
    F = np.atleast_2d(np.asarray(F, dtype=np.float64))
    if F.shape[0] == 0:
        raise ValueError("population must be nonempty")
    fmin = F.min(axis=0)
    span = F.max(axis=0) - fmin
    out = np.zeros_like(F)
    ok = span > 0
    out[:, ok] = (F[:, ok] - fmin[ok]) / span[ok]
    return out


def chebyshev_fitness(fbar, w) -> float:
    fbar = np.asarray(fbar, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    if fbar.shape != w.shape:
        raise ValueError("weight and objective dimensions differ")
    return float(np.max(w * fbar))


def chebyshev_matrix(fbar: np.ndarray, W: np.ndarray) -> np.ndarray:
    """Chebyshev fitness of every member (rows) on every weight (columns)."""
    return np.max(fbar[:, None, :] * W[None, :, :], axis=2)


def generate_weights(count: int, m: int = 2) -> np.ndarray:
    """Evenly spaced biobjective weights ``((j-1)/(μ-1), 1-(j-1)/(μ-1))``."""
    if count < 2:
        raise ValueError("need at least 2 weight vectors")
    if m != 2:
        raise ValueError("only biobjective weight sets are supported")
    a = np.arange(count, dtype=np.float64) / (count - 1)
    return np.column_stack([a, 1.0 - a])


def latin_hypercube_init(count: int, n: int, lower, upper, rng: np.random.Generator) -> np.ndarray:
    """One sample per equal-width stratum in every dimension.

    Strata are shuffled independently per dimension and each sample is
    uniform inside its stratum.
    """
    if count < 1 or n < 1:
        raise ValueError("count and n must be positive")
    lower = np.broadcast_to(np.asarray(lower, dtype=np.float64), (n,))
    upper = np.broadcast_to(np.asarray(upper, dtype=np.float64), (n,))
    strata = np.argsort(rng.random((count, n)), axis=0)
    u = (strata + rng.random((count, n))) / count
    return lower + u * (upper - lower)


def project(x: np.ndarray, lower, upper) -> np.ndarray:
    return np.minimum(np.maximum(x, lower), upper)


def sbx_crossover(
    p1: np.ndarray,
    p2: np.ndarray,
    rng: np.random.Generator,
    lower=0.0,
    upper=1.0,
    eta_c: float = ETA_C,
    p_c: float = P_C,
) -> tuple[np.ndarray, np.ndarray]:
    """Simulated binary crossover (bounded form, as in Deb's reference code).

    When the pair recombines (probability ``p_c``) each variable is crossed
    with probability 0.5. Children are projected to the box.
    """
    n = p1.shape[0]
    lower = np.broadcast_to(np.asarray(lower, dtype=np.float64), (n,))
    upper = np.broadcast_to(np.asarray(upper, dtype=np.float64), (n,))
    c1 = p1.copy()
    c2 = p2.copy()
    if rng.random() > p_c:
        return c1, c2
    cross = rng.random(n) <= 0.5
    u = rng.random(n)
    swap = rng.random(n) <= 0.5
    cross &= np.abs(p1 - p2) > 1e-14
    if not np.any(cross):
        return c1, c2
    idx = np.nonzero(cross)[0]
    y1 = np.minimum(p1[idx], p2[idx])
    y2 = np.maximum(p1[idx], p2[idx])
    yl = lower[idx]
    yu = upper[idx]
    rand = u[idx]
    span = y2 - y1

    def betaq(beta):
        alpha = 2.0 - np.power(beta, -(eta_c + 1.0))
        lo = rand <= 1.0 / alpha
        out = np.empty_like(alpha)
        out[lo] = np.power(rand[lo] * alpha[lo], 1.0 / (eta_c + 1.0))
        out[~lo] = np.power(1.0 / (2.0 - rand[~lo] * alpha[~lo]), 1.0 / (eta_c + 1.0))
        return out

    beta1 = 1.0 + 2.0 * (y1 - yl) / span
    ch1 = 0.5 * ((y1 + y2) - betaq(beta1) * span)
    beta2 = 1.0 + 2.0 * (yu - y2) / span
    ch2 = 0.5 * ((y1 + y2) + betaq(beta2) * span)
    ch1 = np.clip(ch1, yl, yu)
    ch2 = np.clip(ch2, yl, yu)
    s = swap[idx]
    c1[idx] = np.where(s, ch2, ch1)
    c2[idx] = np.where(s, ch1, ch2)
    return project(c1, lower, upper), project(c2, lower, upper)


def sbx_spread_factor(u, eta_c: float = ETA_C):
    """Unbounded SBX spread factor for a uniform draw ``u``; equals 1 at ``u = 0.5``."""
    u = np.asarray(u, dtype=np.float64)
    return np.where(
        u <= 0.5,
        np.power(2.0 * u, 1.0 / (eta_c + 1.0)),
        np.power(1.0 / (2.0 * (1.0 - u)), 1.0 / (eta_c + 1.0)),
    )


def polynomial_mutation(
    x: np.ndarray,
    rng: np.random.Generator,
    lower=0.0,
    upper=1.0,
    eta_m: float = ETA_M,
    p_m: float | None = None,
) -> np.ndarray:
    """Bounded polynomial mutation; ``p_m`` defaults to ``1/n``."""
    n = x.shape[0]
    if p_m is None:
        p_m = 1.0 / n
    lower = np.broadcast_to(np.asarray(lower, dtype=np.float64), (n,))
    upper = np.broadcast_to(np.asarray(upper, dtype=np.float64), (n,))
    y = x.copy()
    mutate = rng.random(n) < p_m
    if not np.any(mutate):
        return y
    idx = np.nonzero(mutate)[0]
    u = rng.random(idx.size)
    y[idx] = y[idx] + polynomial_perturbation(x[idx], u, lower[idx], upper[idx], eta_m) * (upper[idx] - lower[idx])
    return project(y, lower, upper)


def polynomial_perturbation(x, u, lower, upper, eta_m: float = ETA_M) -> np.ndarray:
    """Normalized perturbation ``δq`` of bounded polynomial mutation; zero at ``u = 0.5``."""
    x = np.asarray(x, dtype=np.float64)
    u = np.asarray(u, dtype=np.float64)
    span = upper - lower
    d1 = (x - lower) / span
    d2 = (upper - x) / span
    mut_pow = 1.0 / (eta_m + 1.0)
    lo = u <= 0.5
    xy1 = 1.0 - d1
    xy2 = 1.0 - d2
    val_lo = 2.0 * u + (1.0 - 2.0 * u) * np.power(xy1, eta_m + 1.0)
    val_hi = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * np.power(xy2, eta_m + 1.0)
    with np.errstate(invalid="ignore"):
        dq_lo = np.power(val_lo, mut_pow) - 1.0
        dq_hi = 1.0 - np.power(val_hi, mut_pow)
    return np.where(lo, dq_lo, dq_hi)


def de_rand_1_bin(
    target: np.ndarray,
    r1: np.ndarray,
    r2: np.ndarray,
    r3: np.ndarray,
    F: float,
    CR: float,
    rng: np.random.Generator,
    lower=0.0,
    upper=1.0,
) -> np.ndarray:
    """DE/rand/1/bin trial: ``r1 + F (r2 - r3)`` crossed binomially with ``target``."""
    n = target.shape[0]
    mutant = r1 + F * (r2 - r3)
    take = rng.random(n) < CR
    take[rng.integers(n)] = True
    trial = np.where(take, mutant, target)
    return project(trial, lower, upper)


def distinct_indices(rng: np.random.Generator, pool_size: int, count: int, exclude: int | None = None) -> list[int]:
    """``count`` distinct indices from ``range(pool_size)``, never ``exclude``."""
    available = pool_size - (exclude is not None and 0 <= exclude < pool_size)
    if available < count:
        raise ValueError("not enough distinct population members")
    chosen: list[int] = []
    while len(chosen) < count:
        i = int(rng.integers(pool_size))
        if i != exclude and i not in chosen:
            chosen.append(i)
    return chosen


def write_front_csv(front: FrontArchive, front_path: str | Path, x_path: str | Path | None = None) -> None:
    """Write ``f1,f2`` rows in ascending ``f1`` order, plus an optional decision sidecar."""
    front = front.sorted()
    with open(front_path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["f1", "f2"])
        for f in front.F:
            writer.writerow([repr(float(v)) for v in f])
    if x_path is not None:
        with open(x_path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow([f"x_{i}" for i in range(front.X.shape[1])])
            for x in front.X:
                writer.writerow([repr(float(v)) for v in x])


def read_front_csv(front_path: str | Path, x_path: str | Path | None = None) -> FrontArchive:
    F = np.loadtxt(front_path, delimiter=",", skiprows=1, ndmin=2)
    if x_path is None:
        X = np.zeros((len(F), 0))
    else:
        X = np.loadtxt(x_path, delimiter=",", skiprows=1, ndmin=2)
        if len(X) != len(F):
            raise ValueError("front and decision files have different row counts")
    return FrontArchive(X, F)
