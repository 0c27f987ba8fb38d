"""Descent-directions-guided multiobjective algorithm (DDMOA2).

Each generation runs, in order:

    leader selection -> search-matrix update (coordinate search) ->
    step-size update -> parent selection -> mutation -> environmental selection

Individuals carry their own local-search step ``delta``, an ``n x 2`` search
matrix ``S`` whose columns are descent directions for two objectives, and a
reproduction step ``sigma``. Offspring are ``x + sigma * S @ nu`` with
``nu ~ U(0, 1)^2``, projected back to the box.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import (
    BudgetExhausted,
    EvaluationBudget,
    FrontArchive,
    Problem,
    RunResult,
    chebyshev_matrix,
    front_from_population,
    generate_weights,
    latin_hypercube_init,
    normalize_objectives,
    project,
)
from .metrics import hypervolume_2d

LOG_HEADER = ("gen", "funEval", "pop_size", "n_leaders", "hv")

# Floor for column minima in environmental selection; normalized fitness can be 0.
_DENOMINATOR_FLOOR = 1e-12


@dataclass
class DdmoaConfig:
    mu: int = 100
    delta0: float = 0.4
    sigma0: float = 5.0
    alpha: int = 5
    delta_tol: float = 1e-3
    tau: float | None = None  # None -> 1/sqrt(2n)
    max_eval: int = 100_000
    probe_cap_divisor: int = 8  # per-representative cap: min(2n, remaining // divisor)

    def __post_init__(self):
        if self.mu < 1:
            raise ValueError("mu must be >= 1")
        if self.alpha < 1:
            raise ValueError("alpha must be >= 1")
        if not (self.delta0 > 0 and self.sigma0 > 0 and self.delta_tol > 0):
            raise ValueError("step sizes and tolerance must be positive")
        if self.max_eval < self.mu:
            raise ValueError("max_eval must cover the initial population")

    def learning_rate(self, n: int) -> float:
        return self.tau if self.tau is not None else 1.0 / math.sqrt(2.0 * n)


@dataclass
class DdmoaIndividual:
    x: np.ndarray
    f: np.ndarray
    delta: float
    S: np.ndarray
    sigma: float
    is_leader: bool = False


@dataclass
class CoordinateSearchResult:
    direction: np.ndarray | None
    delta: float
    trials: list[tuple[np.ndarray, np.ndarray]] = field(default_factory=list)
    evaluations: int = 0


@dataclass
class DdmoaResult(RunResult):
    population: list[DdmoaIndividual] = field(default_factory=list)


def _objectives(pop: list[DdmoaIndividual]) -> np.ndarray:
    return np.array([ind.f for ind in pop], dtype=np.float64)


def select_leaders(F: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Mask of members that are best on at least one weight vector.

    Ties go to the lowest population index.
    """
    fitness = chebyshev_matrix(normalize_objectives(F), weights)
    mask = np.zeros(F.shape[0], dtype=bool)
    mask[np.argmin(fitness, axis=0)] = True
    return mask


def nondominated_wrt(f: np.ndarray, F: np.ndarray) -> bool:
    """True if ``f`` beats every row of ``F`` in at least one objective."""
    if F.shape[0] == 0:
        return True
    return not bool(np.any(np.all(F <= f, axis=1)))


def coordinate_search(
    x: np.ndarray,
    f: np.ndarray,
    delta: float,
    objective: int,
    population_F: np.ndarray,
    budget: EvaluationBudget,
    rng: np.random.Generator,
    *,
    delta_tol: float = 1e-3,
    lower=0.0,
    upper=1.0,
    max_probes: int | None = None,
) -> CoordinateSearchResult:
    """Compass search for a descent direction of one objective from ``x``.

    A pass visits the coordinates in random order. For each coordinate the
    move ``+delta`` is probed first, then ``-delta``; the first one lowering
    the objective is accepted and the pass continues from the moved point, so
    one pass can accumulate many coordinate moves. A pass without any
    acceptance halves ``delta`` and repeats, until a pass succeeds or
    ``delta <= delta_tol``.

    Every probe that beats each member of the population (including trials
    inserted earlier in this search) in at least one objective is returned in
    ``trials``. The accumulated direction is returned only when the final
    accepted point was such a trial. Probing stops early when ``max_probes``
    or the evaluation budget runs out.
    """
    n = x.shape[0]
    lower = np.broadcast_to(np.asarray(lower, dtype=np.float64), (n,))
    upper = np.broadcast_to(np.asarray(upper, dtype=np.float64), (n,))
    if max_probes is None:
        max_probes = budget.remaining
    pop_F = np.asarray(population_F, dtype=np.float64).reshape(-1, f.shape[0])
    base_x = x.copy()
    base_f = np.asarray(f, dtype=np.float64).copy()
    trials: list[tuple[np.ndarray, np.ndarray]] = []
    probes = 0
    improved = False
    accepted_nondominated = False
    halted = False

    while delta > delta_tol and not halted:
        for i in rng.permutation(n):
            for sign in (1.0, -1.0):
                if probes >= max_probes or budget.exhausted:
                    halted = True
                    break
                xi = min(max(base_x[i] + sign * delta, lower[i]), upper[i])
                if xi == base_x[i]:
                    continue
                trial = base_x.copy()
                trial[i] = xi
                ft = budget.evaluate(trial)
                probes += 1
                is_nd = nondominated_wrt(ft, pop_F)
                if is_nd:
                    trials.append((trial, ft))
                    pop_F = np.vstack([pop_F, ft])
                if ft[objective] < base_f[objective]:
                    base_x = trial
                    base_f = ft
                    improved = True
                    accepted_nondominated = is_nd
                    break
            if halted:
                break
        if improved or halted:
            break
        delta *= 0.5

    direction = base_x - x if improved and accepted_nondominated else None
    return CoordinateSearchResult(direction=direction, delta=delta, trials=trials, evaluations=probes)


def partition(sorted_indices, alpha: int) -> list[np.ndarray]:
    """Split into ``alpha`` near-equal consecutive parts, dropping empty ones."""
    return [p for p in np.array_split(np.asarray(sorted_indices, dtype=np.int64), alpha) if p.size]


def update_search_matrices(
    pop: list[DdmoaIndividual],
    weights: np.ndarray,
    rng: np.random.Generator,
    budget: EvaluationBudget,
    config: DdmoaConfig,
    lower=0.0,
    upper=1.0,
) -> list[DdmoaIndividual]:
    """Refresh every search matrix; returns the population plus inserted trials.

    Leaders must already be flagged. For each of the two objectives (in random
    order) leaders are sorted on that objective and split into ``alpha``
    parts. Each part's representative is its best member with
    ``delta > delta_tol``; its direction comes from coordinate search and the
    other members get ``x_r - x_i + s_r``. Non-leaders, including trials
    inserted during the search, copy the matrix of a random leader.
    """
    n = pop[0].x.shape[0]
    m = pop[0].f.shape[0]
    leader_idx = [i for i, ind in enumerate(pop) if ind.is_leader]
    if not leader_idx:
        raise ValueError("leaders must be selected first")
    objectives = rng.permutation(m)[:2]
    new_S = {i: np.zeros((n, 2)) for i in leader_idx}
    inserted: list[DdmoaIndividual] = []
    pop_F = _objectives(pop)

    for col, obj in enumerate(objectives):
        values = np.array([pop[i].f[obj] for i in leader_idx])
        order = np.asarray(leader_idx)[np.argsort(values, kind="stable")]
        for part in partition(order, config.alpha):
            rep = next((int(i) for i in part if pop[i].delta > config.delta_tol), None)
            s_r = np.zeros(n)
            if rep is None:
                rep = int(part[0])
            elif not budget.exhausted:
                cap = min(2 * n, budget.remaining // config.probe_cap_divisor)
                if cap > 0:
                    result = coordinate_search(
                        pop[rep].x,
                        pop[rep].f,
                        pop[rep].delta,
                        int(obj),
                        pop_F,
                        budget,
                        rng,
                        delta_tol=config.delta_tol,
                        lower=lower,
                        upper=upper,
                        max_probes=cap,
                    )
                    pop[rep].delta = result.delta
                    if result.direction is not None:
                        s_r = result.direction
                    for tx, tf in result.trials:
                        inserted.append(
                            DdmoaIndividual(tx, tf, config.delta0, np.zeros((n, 2)), config.sigma0)
                        )
                    if result.trials:
                        pop_F = np.vstack([pop_F, np.array([tf for _, tf in result.trials])])
            x_r = pop[rep].x
            for i in part:
                new_S[int(i)][:, col] = x_r - pop[int(i)].x + s_r

    for i in leader_idx:
        pop[i].S = new_S[i]
    pop = pop + inserted
    for ind in pop:
        if not ind.is_leader:
            ind.S = pop[leader_idx[int(rng.integers(len(leader_idx)))]].S
    return pop


def update_step_size(config: DdmoaConfig, fun_eval: int, n: int, normal: float) -> float:
    """``max(exp(tau * normal) * sigma0 ** (1 - 3 funEval / maxEval), delta_tol)``."""
    exponent = 1.0 - 3.0 * fun_eval / config.max_eval
    sigma = math.exp(config.learning_rate(n) * normal) * config.sigma0**exponent
    return max(sigma, config.delta_tol)


def parent_selection(
    F: np.ndarray, leaders: np.ndarray, weights: np.ndarray, rng: np.random.Generator
) -> np.ndarray:
    """Offspring count per member from two rounds of per-weight binary tournaments.

    The first round draws pairs among leaders, the second among the rest.
    The member with the smaller Chebyshev fitness on that round's weight wins
    a slot; ties go to the lower index. A one-member group wins by default and
    an empty group is skipped.
    """
    fitness = chebyshev_matrix(normalize_objectives(F), weights)
    counts = np.zeros(F.shape[0], dtype=np.int64)
    for group in (np.nonzero(leaders)[0], np.nonzero(~leaders)[0]):
        if group.size == 0:
            continue
        for j in range(weights.shape[0]):
            if group.size == 1:
                winner = group[0]
            else:
                a, b = rng.choice(group, size=2, replace=False)
                fa, fb = fitness[a, j], fitness[b, j]
                winner = a if (fa < fb or (fa == fb and a < b)) else b
            counts[winner] += 1
    return counts


def mutate(x: np.ndarray, sigma: float, S: np.ndarray, rng: np.random.Generator, lower=0.0, upper=1.0) -> np.ndarray:
    nu = rng.random(S.shape[1])
    return project(x + sigma * (S @ nu), lower, upper)


def scaled_metric_fitness(M: np.ndarray) -> np.ndarray:
    """Row fitness of a metric matrix ``M`` (members x weights), lower is better.

    Each column is divided by its minimum, except the minimizing member's
    entry, which is divided by the column's second-smallest value. A row's
    fitness is its smallest scaled value. Denominators are floored at 1e-12.
    """
    M = np.asarray(M, dtype=np.float64)
    if M.shape[0] == 1:
        return np.zeros(1)
    order = np.argsort(M, axis=0, kind="stable")
    cols = np.arange(M.shape[1])
    best = order[0]
    lowest = np.maximum(M[best, cols], _DENOMINATOR_FLOOR)
    second = np.maximum(M[order[1], cols], _DENOMINATOR_FLOOR)
    scaled = M / lowest
    scaled[best, cols] = M[best, cols] / second
    return scaled.min(axis=1)


def selection_fitness(F: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Scaled-metric fitness of a population after min-max normalization."""
    return scaled_metric_fitness(chebyshev_matrix(normalize_objectives(F), weights))


def environmental_selection(F: np.ndarray, weights: np.ndarray, mu: int) -> np.ndarray:
    """Indices (ascending) of the ``mu`` members with the smallest selection fitness."""
    if F.shape[0] < mu:
        raise ValueError(f"population of {F.shape[0]} is smaller than mu={mu}")
    if F.shape[0] == mu:
        return np.arange(mu)
    fitness = selection_fitness(F, weights)
    return np.sort(np.argsort(fitness, kind="stable")[:mu])


def run(
    problem: Problem,
    config: DdmoaConfig | None = None,
    rng: np.random.Generator | None = None,
    budget: EvaluationBudget | None = None,
    ref_point=None,
) -> DdmoaResult:
    """Optimize ``problem`` until the evaluation budget is spent.

    Returns the nondominated members of the final population together with
    the per-generation log rows ``(gen, funEval, pop_size, n_leaders, hv)``;
    ``hv`` is measured on every point evaluated so far.
    """
    config = config or DdmoaConfig()
    rng = rng if rng is not None else np.random.default_rng()
    budget = budget or EvaluationBudget(problem, config.max_eval)
    ref_point = problem.ref_point if ref_point is None else np.asarray(ref_point, dtype=np.float64)
    n = problem.n_var
    lower, upper = problem.lower, problem.upper
    weights = generate_weights(config.mu, 2) if config.mu >= 2 else np.array([[0.5, 0.5]])

    X0 = latin_hypercube_init(config.mu, n, lower, upper, rng)
    F0 = budget.evaluate_many(X0)
    pop = [DdmoaIndividual(x, f, config.delta0, np.zeros((n, 2)), config.sigma0) for x, f in zip(X0, F0)]
    log: list[tuple] = []
    gen = 0

    while not budget.exhausted:
        F = _objectives(pop)
        leaders = select_leaders(F, weights)
        for ind, flag in zip(pop, leaders):
            ind.is_leader = bool(flag)

        pop = update_search_matrices(pop, weights, rng, budget, config, lower, upper)

        for ind in pop:
            ind.sigma = update_step_size(config, budget.fun_eval, n, rng.standard_normal())

        F = _objectives(pop)
        leaders = np.array([ind.is_leader for ind in pop])
        counts = parent_selection(F, leaders, weights, rng)

        offspring: list[DdmoaIndividual] = []
        try:
            for i in np.nonzero(counts)[0]:
                parent = pop[i]
                for _ in range(counts[i]):
                    child = mutate(parent.x, parent.sigma, parent.S, rng, lower, upper)
                    fc = budget.evaluate(child)
                    offspring.append(DdmoaIndividual(child, fc, parent.delta, parent.S, parent.sigma))
        except BudgetExhausted:
            pass
        pop = pop + offspring

        keep = environmental_selection(_objectives(pop), weights, config.mu)
        pop = [pop[i] for i in keep]
        gen += 1
        log.append(
            (
                gen,
                budget.fun_eval,
                len(pop),
                int(leaders.sum()),
                hypervolume_2d(budget.seen_front, ref_point),
            )
        )

    F = _objectives(pop)
    X = np.array([ind.x for ind in pop])
    return DdmoaResult(front=front_from_population(X, F), log=log, fun_eval=budget.fun_eval, population=pop)
