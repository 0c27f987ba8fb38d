"""SMPSO: speed-constrained multiobjective particle swarm."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..core import ETA_M, EvaluationBudget, Problem, RunResult, dominates, FrontArchive, polynomial_mutation
from .sorting import crowding_distance, log_row


@dataclass
class SmpsoConfig:
    swarm_size: int = 100
    archive_size: int | None = None  # None -> swarm_size
    c1_range: tuple[float, float] = (1.5, 2.5)
    c2_range: tuple[float, float] = (1.5, 2.5)
    inertia: float = 0.1
    mutation_every: int = 6  # polynomial mutation on every 6th particle
    eta_m: float = ETA_M
    p_m: float | None = None
    max_eval: int = 100_000

    def __post_init__(self):
        if self.archive_size is None:
            self.archive_size = self.swarm_size
        if self.swarm_size < 1 or self.archive_size < 1:
            raise ValueError("swarm and archive sizes must be positive")
        if self.max_eval < self.swarm_size:
            raise ValueError("max_eval must cover the initial swarm")


def constriction(c1: float, c2: float) -> float:
    phi = c1 + c2
    if phi <= 4.0:
        return 1.0
    return 2.0 / abs(2.0 - phi - math.sqrt(phi * phi - 4.0 * phi))


def velocity_update(
    x: np.ndarray,
    v: np.ndarray,
    pbest: np.ndarray,
    leader: np.ndarray,
    c1: float,
    c2: float,
    r1: float,
    r2: float,
    inertia: float,
    lower,
    upper,
) -> np.ndarray:
    """Constricted velocity, clamped per component to half the variable range."""
    chi = constriction(c1, c2)
    raw = chi * (inertia * v + c1 * r1 * (pbest - x) + c2 * r2 * (leader - x))
    bound = (np.asarray(upper) - np.asarray(lower)) / 2.0
    return np.clip(raw, -bound, bound)


def move(x: np.ndarray, v: np.ndarray, lower, upper) -> tuple[np.ndarray, np.ndarray]:
    """Apply velocity; components leaving the box stop at the bound and reverse."""
    x = x + v
    v = v.copy()
    out = (x < lower) | (x > upper)
    x = np.clip(x, lower, upper)
    v[out] = -v[out]
    return x, v


class CrowdingArchive:
    """Bounded nondominated archive pruned by crowding distance."""

    def __init__(self, capacity: int):
        self.capacity = capacity
        self.X: list[np.ndarray] = []
        self.F: list[np.ndarray] = []

    def __len__(self) -> int:
        return len(self.F)

    def add(self, x: np.ndarray, f: np.ndarray) -> bool:
        for g in self.F:
            if dominates(g, f) or np.array_equal(g, f):
                return False
        keep = [i for i, g in enumerate(self.F) if not dominates(f, g)]
        self.X = [self.X[i] for i in keep] + [x.copy()]
        self.F = [self.F[i] for i in keep] + [f.copy()]
        if len(self.F) > self.capacity:
            crowd = crowding_distance(np.array(self.F))
            drop = int(np.argmin(crowd))
            del self.X[drop]
            del self.F[drop]
        return True

    def select_leader(self, rng: np.random.Generator, crowd: np.ndarray | None = None) -> np.ndarray:
        """Binary tournament preferring the less crowded member."""
        if len(self.F) == 1:
            return self.X[0]
        if crowd is None:
            crowd = crowding_distance(np.array(self.F))
        a, b = (int(i) for i in rng.integers(len(self.F), size=2))
        if crowd[a] == crowd[b]:
            return self.X[a if rng.random() < 0.5 else b]
        return self.X[a if crowd[a] > crowd[b] else b]

    def front(self) -> FrontArchive:
        return FrontArchive(np.array(self.X), np.array(self.F))


def run(
    problem: Problem,
    config: SmpsoConfig | None = None,
    rng: np.random.Generator | None = None,
    budget: EvaluationBudget | None = None,
    ref_point=None,
) -> RunResult:
    config = config or SmpsoConfig()
    rng = rng if rng is not None else np.random.default_rng()
    budget = budget or EvaluationBudget(problem, config.max_eval)
    ref_point = problem.ref_point if ref_point is None else ref_point
    lower, upper = problem.lower, problem.upper
    N = config.swarm_size

    X = lower + rng.random((N, problem.n_var)) * (upper - lower)
    V = np.zeros_like(X)
    F = budget.evaluate_many(X)
    P, PF = X.copy(), F.copy()
    archive = CrowdingArchive(config.archive_size)
    for x, f in zip(X, F):
        archive.add(x, f)
    log = []
    gen = 0
    while not budget.exhausted:
        count = min(N, budget.remaining)
        crowd = crowding_distance(np.array(archive.F))
        for i in range(count):
            leader = archive.select_leader(rng, crowd)
            r1, r2 = rng.random(2)
            c1 = rng.uniform(*config.c1_range)
            c2 = rng.uniform(*config.c2_range)
            V[i] = velocity_update(X[i], V[i], P[i], leader, c1, c2, r1, r2, config.inertia, lower, upper)
            X[i], V[i] = move(X[i], V[i], lower, upper)
            if i % config.mutation_every == 0:
                X[i] = polynomial_mutation(X[i], rng, lower, upper, config.eta_m, config.p_m)
        F[:count] = budget.evaluate_many(X[:count])
        for i in range(count):
            archive.add(X[i], F[i])
            if not dominates(PF[i], F[i]):
                P[i], PF[i] = X[i].copy(), F[i].copy()
        gen += 1
        log.append(log_row(gen, budget, np.array(archive.F), ref_point))
    return RunResult(front=archive.front(), log=log, fun_eval=budget.fun_eval)
