"""MOEA/D-DE with Chebyshev decomposition."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core import (
    ETA_M,
    EvaluationBudget,
    Problem,
    RunResult,
    de_rand_1_bin,
    front_from_population,
    generate_weights,
    polynomial_mutation,
)
from .sorting import log_row

# Zero weight components are lifted to this value inside the Chebyshev function.
_MIN_WEIGHT = 1e-4


@dataclass
class MoeadConfig:
    pop_size: int = 100
    T: int = 20
    p_nb: float = 0.9
    n_r: int = 2
    F: float = 0.5
    CR: float = 1.0
    eta_m: float = ETA_M
    p_m: float | None = None
    max_eval: int = 100_000

    def __post_init__(self):
        if not 2 <= self.T <= self.pop_size:
            raise ValueError("neighborhood size must satisfy 2 <= T <= pop_size")
        if self.n_r < 1:
            raise ValueError("n_r must be >= 1")
        if self.max_eval < self.pop_size:
            raise ValueError("max_eval must cover the initial population")


def neighborhoods(weights: np.ndarray, T: int) -> np.ndarray:
    """Indices of the ``T`` weight vectors nearest to each one (itself first)."""
    d = np.linalg.norm(weights[:, None, :] - weights[None, :, :], axis=2)
    return np.argsort(d, axis=1, kind="stable")[:, :T]


def chebyshev(f: np.ndarray, w: np.ndarray, z: np.ndarray) -> np.ndarray:
    """``max_i w_i |f_i - z_i|`` for one or many rows."""
    w = np.maximum(w, _MIN_WEIGHT)
    return np.max(w * np.abs(f - z), axis=-1)


def update_subproblems(
    child_x: np.ndarray,
    child_f: np.ndarray,
    X: np.ndarray,
    F: np.ndarray,
    weights: np.ndarray,
    z: np.ndarray,
    pool: np.ndarray,
    n_r: int,
    rng: np.random.Generator,
) -> int:
    """Replace up to ``n_r`` incumbents in ``pool`` that the child improves; returns the count."""
    replaced = 0
    for j in rng.permutation(pool):
        if replaced >= n_r:
            break
        if chebyshev(child_f, weights[j], z) < chebyshev(F[j], weights[j], z):
            X[j] = child_x
            F[j] = child_f
            replaced += 1
    return replaced


def run(
    problem: Problem,
    config: MoeadConfig | None = None,
    rng: np.random.Generator | None = None,
    budget: EvaluationBudget | None = None,
    ref_point=None,
) -> RunResult:
    config = config or MoeadConfig()
    rng = rng if rng is not None else np.random.default_rng()
    budget = budget or EvaluationBudget(problem, config.max_eval)
    ref_point = problem.ref_point if ref_point is None else ref_point
    lower, upper = problem.lower, problem.upper
    N = config.pop_size

    weights = generate_weights(N)
    B = neighborhoods(weights, config.T)
    X = lower + rng.random((N, problem.n_var)) * (upper - lower)
    F = budget.evaluate_many(X)
    z = F.min(axis=0)
    log = []
    gen = 0
    everyone = np.arange(N)
    while not budget.exhausted:
        for i in rng.permutation(N):
            if budget.exhausted:
                break
            pool = B[i] if rng.random() < config.p_nb else everyone
            candidates = pool[pool != i]
            r1, r2 = rng.choice(candidates, size=2, replace=False)
            child = de_rand_1_bin(X[i], X[i], X[r1], X[r2], config.F, config.CR, rng, lower, upper)
            child = polynomial_mutation(child, rng, lower, upper, config.eta_m, config.p_m)
            fc = budget.evaluate(child)
            z = np.minimum(z, fc)
            update_subproblems(child, fc, X, F, weights, z, pool, config.n_r, rng)
        gen += 1
        log.append(log_row(gen, budget, F, ref_point))
    return RunResult(front=front_from_population(X, F), log=log, fun_eval=budget.fun_eval)
