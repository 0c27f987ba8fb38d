"""IBEA with the additive epsilon indicator."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core import (
    ETA_C,
    ETA_M,
    P_C,
    EvaluationBudget,
    Problem,
    RunResult,
    front_from_population,
    normalize_objectives,
    polynomial_mutation,
    sbx_crossover,
)
from .sorting import log_row


@dataclass
class IbeaConfig:
    pop_size: int = 100
    kappa: float = 0.05
    p_c: float = P_C
    eta_c: float = ETA_C
    p_m: float | None = None
    eta_m: float = ETA_M
    max_eval: int = 100_000

    def __post_init__(self):
        if self.kappa <= 0:
            raise ValueError("kappa must be positive")
        if self.pop_size < 2:
            raise ValueError("pop_size must be >= 2")
        if self.max_eval < self.pop_size:
            raise ValueError("max_eval must cover the initial population")


def epsilon_indicator(a, b) -> float:
    """Smallest shift ``eps`` such that ``a - eps`` weakly dominates ``b``."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError("dimension mismatch")
    return float(np.max(a - b))


def indicator_matrix(fbar: np.ndarray) -> np.ndarray:
    """``I[y, x] = max_i (fbar[y, i] - fbar[x, i])``."""
    return np.max(fbar[:, None, :] - fbar[None, :, :], axis=2)


def indicator_fitness(I: np.ndarray, kappa: float) -> np.ndarray:
    """``F(x) = sum_{y != x} -exp(-I(y, x) / kappa)``; larger is better."""
    contrib = -np.exp(-I / kappa)
    np.fill_diagonal(contrib, 0.0)
    return contrib.sum(axis=0)


def environmental_selection(F: np.ndarray, size: int, kappa: float) -> tuple[np.ndarray, np.ndarray]:
    """Repeatedly drop the worst member until ``size`` remain.

    Returns the kept indices (ascending) and their updated fitness. Ties for
    worst go to the lowest index.
    """
    I = indicator_matrix(normalize_objectives(F))
    fitness = indicator_fitness(I, kappa)
    alive = np.ones(F.shape[0], dtype=bool)
    while alive.sum() > size:
        masked = np.where(alive, fitness, np.inf)
        worst = int(np.argmin(masked))
        alive[worst] = False
        fitness += np.exp(-I[worst] / kappa)
    keep = np.nonzero(alive)[0]
    return keep, fitness[keep]


def run(
    problem: Problem,
    config: IbeaConfig | None = None,
    rng: np.random.Generator | None = None,
    budget: EvaluationBudget | None = None,
    ref_point=None,
) -> RunResult:
    config = config or IbeaConfig()
    rng = rng if rng is not None else np.random.default_rng()
    budget = budget or EvaluationBudget(problem, config.max_eval)
    ref_point = problem.ref_point if ref_point is None else ref_point
    lower, upper = problem.lower, problem.upper
    N = config.pop_size

    X = lower + rng.random((N, problem.n_var)) * (upper - lower)
    F = budget.evaluate_many(X)
    _, fitness = environmental_selection(F, N, config.kappa)
    log = []
    gen = 0
    while not budget.exhausted:
        count = min(N, budget.remaining)
        children = []
        while len(children) < count:
            parents = []
            for _ in range(2):
                a, b = rng.integers(N, size=2)
                parents.append(X[a] if fitness[a] >= fitness[b] else X[b])
            c1, c2 = sbx_crossover(parents[0], parents[1], rng, lower, upper, config.eta_c, config.p_c)
            children.append(polynomial_mutation(c1, rng, lower, upper, config.eta_m, config.p_m))
            children.append(polynomial_mutation(c2, rng, lower, upper, config.eta_m, config.p_m))
        Q = np.array(children[:count])
        FQ = budget.evaluate_many(Q)
        X = np.vstack([X, Q])
        F = np.vstack([F, FQ])
        keep, fitness = environmental_selection(F, N, config.kappa)
        X, F = X[keep], F[keep]
        gen += 1
        log.append(log_row(gen, budget, F, ref_point))
    return RunResult(front=front_from_population(X, F), log=log, fun_eval=budget.fun_eval)
