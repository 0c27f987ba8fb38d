"""NSGA-II with SBX and polynomial mutation."""

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
    polynomial_mutation,
    sbx_crossover,
)
from .sorting import crowded_tournament, log_row, rank_and_crowding, truncate_by_rank_and_crowding


@dataclass
class Nsga2Config:
    pop_size: int = 100
    p_c: float = P_C
    eta_c: float = ETA_C
    p_m: float | None = None  # None -> 1/n
    eta_m: float = ETA_M
    max_eval: int = 100_000

    def __post_init__(self):
        if self.pop_size < 2 or self.pop_size % 2:
            raise ValueError("pop_size must be even and >= 2")
        if self.max_eval < self.pop_size:
            raise ValueError("max_eval must cover the initial population")


def make_offspring(X, ranks, crowd, count, rng, config, lower, upper) -> np.ndarray:
    children = []
    while len(children) < count:
        p1 = X[crowded_tournament(ranks, crowd, rng)]
        p2 = X[crowded_tournament(ranks, crowd, rng)]
        c1, c2 = sbx_crossover(p1, p2, rng, lower, upper, config.eta_c, config.p_c)
        children.append(polynomial_mutation(c1, rng, lower, upper, config.eta_m, config.p_m))
        children.append(polynomial_mutation(c2, rng, lower, upper, config.eta_m, config.p_m))
    return np.array(children[:count])


def run(
    problem: Problem,
    config: Nsga2Config | None = None,
    rng: np.random.Generator | None = None,
    budget: EvaluationBudget | None = None,
    ref_point=None,
) -> RunResult:
    config = config or Nsga2Config()
    rng = rng if rng is not None else np.random.default_rng()
    budget = budget or EvaluationBudget(problem, config.max_eval)
    ref_point = problem.ref_point if ref_point is None else ref_point
    lower, upper = problem.lower, problem.upper
    N = config.pop_size

    X = lower + rng.random((N, problem.n_var)) * (upper - lower)
    F = budget.evaluate_many(X)
    log = []
    gen = 0
    while not budget.exhausted:
        ranks, crowd = rank_and_crowding(F)
        count = min(N, budget.remaining)
        Q = make_offspring(X, ranks, crowd, count, rng, config, lower, upper)
        FQ = budget.evaluate_many(Q)
        X = np.vstack([X, Q])
        F = np.vstack([F, FQ])
        keep = truncate_by_rank_and_crowding(F, N)
        X, F = X[keep], F[keep]
        gen += 1
        log.append(log_row(gen, budget, F, ref_point))
    return RunResult(front=front_from_population(X, F), log=log, fun_eval=budget.fun_eval)
