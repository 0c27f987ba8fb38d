import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from dengue_moo.core import (
    BudgetExhausted,
    EvaluationBudget,
    FrontArchive,
    Solution,
    chebyshev_fitness,
    de_rand_1_bin,
    distinct_indices,
    dominates,
    generate_weights,
    latin_hypercube_init,
    make_rng,
    nondominated_filter,
    nondominated_mask,
    normalize_objectives,
    polynomial_mutation,
    polynomial_perturbation,
    read_front_csv,
    sbx_crossover,
    sbx_spread_factor,
    write_front_csv,
)
from dengue_moo.problems import BiSphere
from oracles import brute_force_nondominated

small_ints = st.integers(0, 4)
vec2 = st.tuples(small_ints, small_ints)


def test_dominates_examples():
    assert dominates((1, 2), (2, 3))
    assert not dominates((1, 2), (1, 2))
    assert not dominates((1, 3), (2, 2)) and not dominates((2, 2), (1, 3))


def test_dominates_dimension_mismatch():
    with pytest.raises(ValueError):
        dominates((1, 2), (1, 2, 3))


@given(vec2, vec2, vec2)
def test_dominance_strict_partial_order(a, b, c):
    assert not dominates(a, a)
    assert not (dominates(a, b) and dominates(b, a))
    if dominates(a, b) and dominates(b, c):
        assert dominates(a, c)


def test_filter_examples():
    front = nondominated_filter([(1, 2), (2, 1), (3, 3)])
    assert sorted(map(tuple, front.F)) == [(1, 2), (2, 1)]
    assert nondominated_filter([(5, 5)]).F.tolist() == [[5, 5]]


def test_filter_accepts_solutions():
    sols = [Solution(np.array([i / 3]), np.array(f), i) for i, f in enumerate([(1, 2), (2, 1), (3, 3)])]
    front = nondominated_filter(sols)
    assert sorted(front.eval_ids.tolist()) == [0, 1]


def test_filter_retains_duplicates():
    front = nondominated_filter([(1, 2), (1, 2), (2, 2)])
    assert front.F.tolist() == [[1, 2], [1, 2]]


def test_filter_200_random_points_vs_brute_force():
    F = np.random.default_rng(11).random((200, 2))
    assert np.array_equal(nondominated_mask(F), brute_force_nondominated(F))


@settings(max_examples=60, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(1, 60), st.integers(2, 3)), elements=st.sampled_from([0.0, 0.5, 1.0, 1.5, 2.0])))
def test_filter_vs_brute_force_with_ties(F):
    assert np.array_equal(nondominated_mask(F), brute_force_nondominated(F))


def test_normalize_examples():
    assert normalize_objectives([[2.0], [4.0]]).ravel().tolist() == [0, 1]
    assert normalize_objectives([[7.0, 1.0], [7.0, 2.0]])[:, 0].tolist() == [0, 0]
    assert normalize_objectives([[1.0], [2.0], [5.0]]).ravel().tolist() == [0, 0.25, 1]
    with pytest.raises(ValueError):
        normalize_objectives(np.zeros((0, 2)))


def test_chebyshev_examples():
    assert chebyshev_fitness((0.3, 0.9), (1, 0)) == 0.3
    assert chebyshev_fitness((1, 0.4), (0.5, 0.5)) == 0.5
    assert chebyshev_fitness((0.7, 0), (0, 1)) == 0


def test_generate_weights():
    assert generate_weights(2).tolist() == [[0, 1], [1, 0]]
    assert generate_weights(3).tolist() == [[0, 1], [0.5, 0.5], [1, 0]]
    W = generate_weights(100)
    np.testing.assert_allclose(np.diff(W, axis=0), np.tile([1 / 99, -1 / 99], (99, 1)), rtol=0, atol=1e-15)
    assert np.all(W >= 0) and np.max(np.abs(W.sum(axis=1) - 1)) <= 1e-12
    assert len(np.unique(W, axis=0)) == 100
    with pytest.raises(ValueError):
        generate_weights(1)


def test_lhs_small():
    X = latin_hypercube_init(2, 1, 0.0, 1.0, make_rng(0))
    assert sorted((X.ravel() >= 0.5).tolist()) == [False, True]
    one = latin_hypercube_init(1, 3, 0.0, 1.0, make_rng(0))
    assert one.shape == (1, 3) and np.all((one >= 0) & (one <= 1))


def test_lhs_stratum_occupancy():
    X = latin_hypercube_init(100, 1001, 0.0, 1.0, make_rng(5))
    strata = np.floor(X * 100).astype(int)
    for j in range(1001):
        assert np.array_equal(np.bincount(strata[:, j], minlength=100), np.ones(100, dtype=int))


def test_sbx_spread_factor_at_half():
    assert sbx_spread_factor(0.5) == 1.0
    # beta = 1 maps the parent pair onto itself
    y1, y2 = 0.2, 0.7
    b = float(sbx_spread_factor(0.5))
    assert (0.5 * ((y1 + y2) - b * (y2 - y1)), 0.5 * ((y1 + y2) + b * (y2 - y1))) == pytest.approx((y1, y2))


def test_sbx_without_recombination_copies():
    rng = make_rng(0)
    p1, p2 = rng.random(10), rng.random(10)
    c1, c2 = sbx_crossover(p1, p2, rng, p_c=0.0)
    assert np.array_equal(c1, p1) and np.array_equal(c2, p2)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_variation_stays_in_box(seed):
    rng = make_rng(seed)
    p1, p2, p3, p4 = (rng.random(20) for _ in range(4))
    p1[:3] = (0.0, 1.0, 1.0)
    for c in sbx_crossover(p1, p2, rng):
        assert np.all((c >= 0) & (c <= 1))
    m = polynomial_mutation(p1, rng, p_m=1.0)
    assert np.all((m >= 0) & (m <= 1))
    t = de_rand_1_bin(p1, p2, p3, p4, 0.9, 0.5, rng)
    assert np.all((t >= 0) & (t <= 1))


def test_polynomial_mutation_examples():
    rng = make_rng(0)
    x = rng.random(30)
    assert np.array_equal(polynomial_mutation(x, rng, p_m=0.0), x)
    assert polynomial_perturbation(np.array([0.3]), np.array([0.5]), 0.0, 1.0)[0] == 0.0
    d = polynomial_perturbation(np.array([1.0]), np.array([0.9]), 0.0, 1.0)
    assert np.clip(1.0 + d, 0, 1)[0] == 1.0
    y = polynomial_mutation(np.ones(5), make_rng(1), p_m=1.0)
    assert np.all(y <= 1.0)


def test_de_examples():
    rng = make_rng(2)
    t, r1, r2 = rng.random(8), rng.random(8), rng.random(8)
    trial = de_rand_1_bin(t, r1, r2, r2, 0.5, 1.0, rng)
    assert np.array_equal(trial, r1)
    r3 = rng.random(8)
    trial = de_rand_1_bin(t, r1, r2, r3, 0.5, 1.0, rng)
    np.testing.assert_allclose(trial, np.clip(r1 + 0.5 * (r2 - r3), 0, 1))
    trial = de_rand_1_bin(t, r1, r2, r3, 0.0, 0.0, rng)
    changed = np.nonzero(trial != t)[0]
    assert len(changed) == 1 and trial[changed[0]] == r1[changed[0]]


def test_distinct_indices():
    rng = make_rng(0)
    for _ in range(50):
        idx = distinct_indices(rng, 5, 3, exclude=2)
        assert len(set(idx)) == 3 and 2 not in idx
    with pytest.raises(ValueError):
        distinct_indices(rng, 3, 3, exclude=0)


def test_budget_accounting():
    budget = EvaluationBudget(BiSphere(), 5)
    budget.evaluate(np.zeros(2))
    budget.evaluate_many(np.zeros((3, 2)))
    assert budget.fun_eval == 4 and budget.remaining == 1
    with pytest.raises(BudgetExhausted):
        budget.evaluate_many(np.zeros((2, 2)))
    assert budget.fun_eval == 4
    budget.evaluate(np.ones(2))
    assert budget.exhausted
    with pytest.raises(BudgetExhausted):
        budget.evaluate(np.zeros(2))


def test_budget_seen_front_is_nondominated_union():
    rng = make_rng(4)
    problem = BiSphere()
    budget = EvaluationBudget(problem, 200)
    X = rng.random((200, 2))
    for x in X[:50]:
        budget.evaluate(x)
    budget.evaluate_many(X[50:])
    F = problem.evaluate_many(X)
    expected = F[brute_force_nondominated(F)]
    assert sorted(map(tuple, budget.seen_front)) == sorted(map(tuple, expected))


def test_make_rng_reproducible():
    assert make_rng(7).random() == make_rng(7).random()
    assert make_rng(7).random() != make_rng(8).random()


def test_front_csv_roundtrip(tmp_path):
    rng = make_rng(0)
    F = rng.random((6, 2))
    X = rng.random((6, 4))
    write_front_csv(FrontArchive(X, F), tmp_path / "f.csv", tmp_path / "x.csv")
    lines = (tmp_path / "f.csv").read_text().splitlines()
    assert lines[0] == "f1,f2"
    back = read_front_csv(tmp_path / "f.csv", tmp_path / "x.csv")
    order = np.argsort(F[:, 0])
    assert np.array_equal(back.F, F[order]) and np.array_equal(back.X, X[order])
    assert (tmp_path / "x.csv").read_text().splitlines()[0] == "x_0,x_1,x_2,x_3"
