"""GDE3: DE/rand/1/bin with Pareto-based target/trial selection."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core import (
    EvaluationBudget,
    Problem,
    RunResult,
    de_rand_1_bin,
    distinct_indices,
    dominates,
    front_from_population,
    weakly_dominates,
)
from .sorting import log_row, truncate_by_rank_and_crowding


@dataclass
class Gde3Config:
    pop_size: int = 100
    F: float = 0.5
    CR: float = 0.5
    max_eval: int = 100_000

    def __post_init__(self):
        if self.pop_size < 4:
            raise ValueError("DE needs at least 4 members")
        if self.max_eval < self.pop_size:
            raise ValueError("max_eval must cover the initial population")


def select(target_f, trial_f) -> str:
    """``"trial"``, ``"target"`` or ``"both"`` for the next population."""
    if weakly_dominates(trial_f, target_f):
        return "trial"
    if dominates(target_f, trial_f):
        return "target"
    return "both"


def run(
    problem: Problem,
    config: Gde3Config | None = None,
    rng: np.random.Generator | None = None,
    budget: EvaluationBudget | None = None,
    ref_point=None,
) -> RunResult:
    config = config or Gde3Config()
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
        next_X, next_F = [], []
        for i in range(N):
            if budget.exhausted:
                next_X.append(X[i])
                next_F.append(F[i])
                continue
            r1, r2, r3 = distinct_indices(rng, N, 3, exclude=i)
            trial = de_rand_1_bin(X[i], X[r1], X[r2], X[r3], config.F, config.CR, rng, lower, upper)
            ft = budget.evaluate(trial)
            outcome = select(F[i], ft)
            if outcome != "trial":
                next_X.append(X[i])
                next_F.append(F[i])
            if outcome != "target":
                next_X.append(trial)
                next_F.append(ft)
        X = np.array(next_X)
        F = np.array(next_F)
        if X.shape[0] > N:
            keep = truncate_by_rank_and_crowding(F, N)
            X, F = X[keep], F[keep]
        gen += 1
        log.append(log_row(gen, budget, F, ref_point))
    return RunResult(front=front_from_population(X, F), log=log, fun_eval=budget.fun_eval)
