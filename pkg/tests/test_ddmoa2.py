import copy

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dengue_moo import ddmoa2
from dengue_moo.core import EvaluationBudget, generate_weights, latin_hypercube_init, make_rng, nondominated_mask
from dengue_moo.ddmoa2 import (
    DdmoaConfig,
    DdmoaIndividual,
    coordinate_search,
    environmental_selection,
    mutate,
    nondominated_wrt,
    parent_selection,
    partition,
    scaled_metric_fitness,
    select_leaders,
    selection_fitness,
    update_search_matrices,
    update_step_size,
)
from dengue_moo.problems import BiSphere, DengueProblem
from oracles import brute_force_nondominated


class Quadratic:
    """f_k(x) = sum_i a_ki (x_i - c_ki)^2 on [-2, 2]^n."""

    def __init__(self, a, c):
        self.a = np.asarray(a, dtype=float)
        self.c = np.asarray(c, dtype=float)
        self.n_var = self.a.shape[1]
        self.lower = np.full(self.n_var, -2.0)
        self.upper = np.full(self.n_var, 2.0)
        self.ref_point = np.array([100.0, 100.0])

    def evaluate(self, x):
        return np.sum(self.a * (x - self.c) ** 2, axis=1)

    def evaluate_many(self, X):
        return np.array([self.evaluate(x) for x in np.atleast_2d(X)])


SPHERES = Quadratic([[1, 1], [1, 1]], [[0, 0], [1, 1]])


def oracle_chebyshev(F, W):
    F = np.asarray(F, dtype=float)
    lo, hi = F.min(axis=0), F.max(axis=0)
    span = np.where(hi > lo, hi - lo, 1.0)
    fbar = np.where(hi > lo, (F - lo) / span, 0.0)
    return np.array([[max(w[k] * f[k] for k in range(len(w))) for w in W] for f in fbar])


# --- leaders -------------------------------------------------------------


def test_leaders_extremes():
    assert select_leaders(np.array([[0.0, 1.0], [1.0, 0.0]]), np.array([[1, 0], [0, 1.0]])).tolist() == [True, True]
    assert select_leaders(np.array([[3.0, 4.0]]), generate_weights(5)).tolist() == [True]


def test_leader_hand_example():
    F = np.array([[0.0, 1.0], [1.0, 0.0], [0.6, 0.6]])
    assert select_leaders(F, np.array([[0.5, 0.5]])).tolist() == [False, False, True]


def test_leader_ties_lowest_index():
    F = np.array([[0.0, 1.0], [0.0, 1.0], [1.0, 0.0]])
    assert select_leaders(F, np.array([[1.0, 0.0]])).tolist() == [True, False, False]


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.01, 100.0), st.integers(0, 1))
def test_leaders_invariant_under_column_rescaling(seed, scale, col):
    F = make_rng(seed).random((30, 2))
    W = generate_weights(10)
    G = F.copy()
    G[:, col] *= scale
    mask = select_leaders(F, W)
    assert mask.sum() >= 1
    assert np.array_equal(mask, select_leaders(G, W))


# --- coordinate search ---------------------------------------------------


def test_coordinate_search_sphere_descent():
    problem = Quadratic([[1, 1], [1, 1]], [[0, 0], [2, 2]])
    budget = EvaluationBudget(problem, 100)
    x = np.array([1.0, 0.0])
    res = coordinate_search(x, problem.evaluate(x), 0.5, 0, np.empty((0, 2)), budget, make_rng(0), lower=-2, upper=2)
    assert res.direction is not None and res.direction[0] < 0
    assert res.direction.tolist() == [-0.5, 0.0]
    assert res.evaluations == budget.fun_eval


def test_coordinate_search_at_minimizer_shrinks_delta():
    problem = Quadratic([[1, 1], [1, 1]], [[0, 0], [2, 2]])
    budget = EvaluationBudget(problem, 1000)
    x = np.zeros(2)
    res = coordinate_search(x, problem.evaluate(x), 0.4, 0, np.empty((0, 2)), budget, make_rng(0), lower=-2, upper=2)
    assert res.direction is None
    assert 1e-3 / 2 <= res.delta <= 1e-3


def test_coordinate_search_exhaustive_probe_oracle():
    problem = Quadratic([[2.0, 0.5], [1.0, 1.0]], [[0.3, -0.4], [1.0, 1.0]])
    x = np.array([1.1, 0.9])
    f = problem.evaluate(x)
    for seed in range(10):
        budget = EvaluationBudget(problem, 100)
        res = coordinate_search(x, f, 0.25, 0, f[None, :], budget, make_rng(seed), lower=-2, upper=2)
        # exhaustive +-delta probing from x confirms a descent probe exists
        probes = [x + s * res.delta * e for e in np.eye(2) for s in (1, -1)]
        assert min(problem.evaluate(p)[0] for p in probes) < f[0]
        if res.direction is not None:
            assert problem.evaluate(x + res.direction)[0] < f[0]
            assert set(np.abs(res.direction).tolist()) <= {0.0, res.delta}


def test_coordinate_search_trials_are_nondominated_when_found():
    problem = SPHERES
    rng = make_rng(3)
    popX = rng.uniform(-1, 2, (8, 2))
    popF = problem.evaluate_many(popX)
    budget = EvaluationBudget(problem, 200)
    res = coordinate_search(popX[0], popF[0], 0.3, 1, popF, budget, rng, lower=-2, upper=2)
    seen = popF.copy()
    for tx, tf in res.trials:
        assert np.array_equal(problem.evaluate(tx), tf)
        assert not np.any(np.all(seen <= tf, axis=1))
        seen = np.vstack([seen, tf])


def test_coordinate_search_respects_probe_cap_and_budget():
    problem = Quadratic([[1, 1, 1], [1, 1, 1]], [[0, 0, 0], [2, 2, 2]])
    x = np.full(3, 1.5)
    budget = EvaluationBudget(problem, 3)
    res = coordinate_search(x, problem.evaluate(x), 0.4, 0, np.empty((0, 2)), budget, make_rng(0), lower=-2, upper=2)
    assert res.evaluations == 3 and budget.exhausted
    budget = EvaluationBudget(problem, 100)
    res = coordinate_search(x, problem.evaluate(x), 0.4, 0, np.empty((0, 2)), budget, make_rng(0), lower=-2, upper=2, max_probes=2)
    assert res.evaluations == 2


def test_nondominated_wrt():
    F = np.array([[1.0, 1.0]])
    assert nondominated_wrt(np.array([0.5, 2.0]), F)
    assert not nondominated_wrt(np.array([1.0, 1.0]), F)
    assert not nondominated_wrt(np.array([2.0, 2.0]), F)


# --- search matrices -----------------------------------------------------


def test_partition_sizes():
    assert [len(p) for p in partition(np.arange(10), 5)] == [2, 2, 2, 2, 2]
    assert [len(p) for p in partition(np.arange(3), 5)] == [1, 1, 1]
    assert [len(p) for p in partition(np.arange(7), 5)] == [2, 2, 1, 1, 1]


def _population(problem, X, delta=0.4, leaders=None):
    F = problem.evaluate_many(X)
    pop = [DdmoaIndividual(x.copy(), f, delta, np.zeros((len(x), 2)), 5.0) for x, f in zip(X, F)]
    for i, ind in enumerate(pop):
        ind.is_leader = True if leaders is None else bool(leaders[i])
    return pop


def test_eq34_independent_recomputation():
    problem = BiSphere(n_var=5)
    rng = make_rng(21)
    t = np.linspace(0.05, 0.95, 10)
    X = problem.center_a + t[:, None] * (problem.center_b - problem.center_a) + rng.normal(0, 0.02, (10, 5))
    extra = rng.random((3, 5))
    pop = _population(problem, np.vstack([X, extra]), leaders=[True] * 10 + [False] * 3)
    snapshot = [(ind.x.copy(), ind.f.copy()) for ind in pop]
    config = DdmoaConfig(mu=13, max_eval=10_000)
    replay = copy.deepcopy(rng)
    out = update_search_matrices(pop, generate_weights(13), rng, EvaluationBudget(problem, 10_000), config)
    objectives = replay.permutation(2)
    for col, obj in enumerate(objectives):
        order = sorted(range(10), key=lambda i: (snapshot[i][1][obj], i))
        parts = [order[k : k + 2] for k in range(0, 10, 2)]
        assert [len(p) for p in parts] == [2, 2, 2, 2, 2]
        for part in parts:
            r = part[0]
            s_r = out[r].S[:, col]
            for i in part:
                expected = snapshot[r][0] - snapshot[i][0] + s_r
                np.testing.assert_allclose(out[i].S[:, col], expected, rtol=0, atol=1e-15)
    leader_S = [out[i].S for i in range(10)]
    for ind in out[10:]:
        assert any(ind.S is S for S in leader_S)
    assert all(np.all((ind.x >= 0) & (ind.x <= 1)) for ind in out)


def test_zero_representative_direction():
    problem = BiSphere(n_var=3)
    X = make_rng(4).random((6, 3))
    pop = _population(problem, X, delta=1e-4)
    budget = EvaluationBudget(problem, 100)
    rng = make_rng(0)
    replay = copy.deepcopy(rng)
    out = update_search_matrices(pop, generate_weights(6), rng, budget, DdmoaConfig(mu=6, max_eval=100, alpha=2))
    assert budget.fun_eval == 0
    F = problem.evaluate_many(X)
    for col, obj in enumerate(replay.permutation(2)):
        order = list(np.argsort(F[:, obj], kind="stable"))
        for part in (order[:3], order[3:]):
            r = part[0]
            for i in part:
                assert np.array_equal(out[i].S[:, col], X[r] - X[i])


def test_single_leader_shares_matrix():
    problem = BiSphere(n_var=3)
    X = make_rng(8).random((3, 3))
    pop = _population(problem, X, leaders=[False, True, False])
    out = update_search_matrices(pop, generate_weights(3), make_rng(1), EvaluationBudget(problem, 500), DdmoaConfig(mu=3, max_eval=500))
    assert all(ind.S is out[1].S for ind in out if not ind.is_leader)
    assert out[1].S.shape == (3, 2)


# --- step size, parents, mutation ----------------------------------------


def test_step_size_stubbed_normal():
    config = DdmoaConfig(max_eval=90_000)
    assert update_step_size(config, 0, 1001, 0.0) == pytest.approx(5.0, rel=1e-15)
    assert update_step_size(config, 30_000, 1001, 0.0) == pytest.approx(1.0, rel=1e-15)
    assert update_step_size(config, 90_000, 1001, 0.0) == pytest.approx(0.04, rel=1e-12)
    assert update_step_size(config, 90_000, 1001, -500.0) == config.delta_tol
    assert config.learning_rate(1001) == pytest.approx(1 / np.sqrt(2002))


def test_parent_selection_all_leaders():
    F = make_rng(0).random((5, 2))
    counts = parent_selection(F, np.ones(5, dtype=bool), generate_weights(7), make_rng(1))
    assert counts.sum() == 7


def test_parent_selection_tournaments_of_one():
    F = np.array([[0.0, 1.0], [0.5, 0.5]])
    counts = parent_selection(F, np.array([True, False]), generate_weights(9), make_rng(0))
    assert counts.tolist() == [9, 9]


def test_parent_selection_transcript_replay():
    rng = make_rng(33)
    F = rng.random((130, 2))
    W = generate_weights(100)
    leaders = select_leaders(F, W)
    replay = copy.deepcopy(rng)
    counts = parent_selection(F, leaders, W, rng)
    assert counts.sum() == 200
    fit = oracle_chebyshev(F, W)
    expected = np.zeros(130, dtype=int)
    for group in ([i for i in range(130) if leaders[i]], [i for i in range(130) if not leaders[i]]):
        for j in range(100):
            a, b = (int(v) for v in replay.choice(np.array(group), size=2, replace=False))
            if fit[a, j] < fit[b, j] or (fit[a, j] == fit[b, j] and a < b):
                expected[a] += 1
            else:
                expected[b] += 1
    assert counts.tolist() == expected.tolist()


def test_mutate_examples():
    rng = make_rng(0)
    x = rng.random(6)
    assert np.array_equal(mutate(x, 3.0, np.zeros((6, 2)), rng), x)
    y = mutate(np.full(4, 0.9), 1.0, np.full((4, 2), 0.3), make_rng(1))
    assert np.all(y == 1.0)
    S = rng.normal(size=(6, 2))
    replay = copy.deepcopy(rng)
    got = mutate(x, 0.7, S, rng, lower=-10, upper=10)
    nu = replay.random(2)
    expected = x + 0.7 * (S[:, 0] * nu[0] + S[:, 1] * nu[1])
    np.testing.assert_allclose(got, expected, rtol=0, atol=1e-15)


# --- environmental selection ---------------------------------------------


def test_scaled_metric_hand_example():
    M = np.array([[0.2, 0.8], [0.9, 0.1]])
    fit = scaled_metric_fitness(M)
    assert fit[0] == pytest.approx(0.2 / 0.9)
    assert fit[1] == pytest.approx(0.125)
    assert np.argmin(fit) == 1


def test_environmental_selection_sizes():
    F = make_rng(0).random((7, 2))
    assert environmental_selection(F, generate_weights(7), 7).tolist() == list(range(7))
    with pytest.raises(ValueError):
        environmental_selection(F, generate_weights(7), 8)
    keep = environmental_selection(F, generate_weights(4), 4)
    assert len(keep) == 4 and len(set(keep.tolist())) == 4


def test_environmental_selection_duplicates_tie():
    F = np.array([[0.1, 0.9], [0.5, 0.5], [0.5, 0.5], [0.9, 0.1]])
    fit = selection_fitness(F, generate_weights(5))
    assert fit[1] == fit[2]


def test_zero_column_minimum_is_finite():
    F = np.array([[0.0, 1.0], [1.0, 0.0], [0.5, 0.5]])
    assert np.all(np.isfinite(selection_fitness(F, generate_weights(3))))


# --- full runs -----------------------------------------------------------


def test_budget_below_one_generation_returns_initial_front():
    problem = BiSphere(n_var=4)
    config = DdmoaConfig(mu=20, max_eval=20)
    result = ddmoa2.run(problem, config, make_rng(5))
    X0 = latin_hypercube_init(20, 4, 0.0, 1.0, make_rng(5))
    F0 = problem.evaluate_many(X0)
    expected = sorted(map(tuple, F0[nondominated_mask(F0)]))
    assert sorted(map(tuple, result.front.F)) == expected
    assert result.fun_eval == 20 and result.log == []


def test_run_invariants_bisphere():
    problem = BiSphere(n_var=6)
    config = DdmoaConfig(mu=20, max_eval=3000)
    result = ddmoa2.run(problem, config, make_rng(2))
    assert result.fun_eval <= 3000
    assert all(row[2] == 20 for row in result.log)
    assert all(row[3] >= 1 for row in result.log)
    hv = [row[4] for row in result.log]
    assert all(b >= a for a, b in zip(hv, hv[1:]))
    evals = [row[1] for row in result.log]
    assert all(b > a for a, b in zip(evals, evals[1:]))
    for ind in result.population:
        assert ind.delta >= config.delta_tol / 2
        assert ind.sigma >= config.delta_tol
        assert np.all((ind.x >= 0) & (ind.x <= 1))
    assert brute_force_nondominated(result.front.F).all()


def test_bisphere_convergence():
    problem = BiSphere()
    result = ddmoa2.run(problem, DdmoaConfig(mu=100, max_eval=5000), make_rng(1))
    assert problem.distance_to_pareto_set(result.front.X).max() <= 0.05


def test_determinism():
    problem = BiSphere(n_var=3)
    a = ddmoa2.run(problem, DdmoaConfig(mu=10, max_eval=600), make_rng(9))
    b = ddmoa2.run(problem, DdmoaConfig(mu=10, max_eval=600), make_rng(9))
    assert np.array_equal(a.front.F, b.front.F) and a.log == b.log


@pytest.mark.slow
def test_dengue_front_spread():
    result = ddmoa2.run(DengueProblem(), DdmoaConfig(max_eval=20_000), make_rng(1))
    f2 = result.front.F[:, 1]
    assert f2.max() - f2.min() > 10.0
