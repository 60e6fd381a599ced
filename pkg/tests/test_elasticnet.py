import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from enhg.datio import normalize_columns, synth_subspaces
from enhg.elasticnet import (
    SolverError,
    elastic_net_objective,
    elastic_net_solve,
    kkt_residual,
    lars_en_path,
    model_to_solver_weights,
    robust_matrix_elastic_net,
)

from oracles import brute_force_elastic_net


def _unit(v):
    v = np.asarray(v, float)
    return v / np.linalg.norm(v)


# -- closed-form single-atom cases -----------------------------------------

def test_single_atom_soft_threshold():
    b = _unit([1.0, 2.0, 2.0])
    path = lars_en_path(b[:, None], 3 * b, 0.0, l1_weight=1.0)
    # z = b^T x - l1 = 3 - 1
    assert path.coef_at(1.0)[0] == pytest.approx(2.0, abs=1e-12)
    assert path.knots[-1].l1_budget == pytest.approx(2.0, abs=1e-12)


def test_single_atom_l1_budget_stop():
    b = _unit([1.0, 2.0, 2.0])
    path = lars_en_path(b[:, None], 3 * b, 0.0, l1_budget=2.0)
    assert path.knots[-1].coef[0] == pytest.approx(2.0, abs=1e-12)
    assert path.knots[-1].l1_weight == pytest.approx(1.0, abs=1e-12)


def test_single_atom_elastic_net_closed_form():
    x = _unit([0.6, 0.8])
    z = elastic_net_solve(x[:, None], x, 0.1, 0.02)
    assert z[0] == pytest.approx((1 - 0.1) / (1 + 2 * 0.02), abs=1e-12)
    assert z[0] == pytest.approx(0.86538, abs=1e-5)


def test_dead_zone_gives_zero():
    rng = np.random.default_rng(0)
    B = rng.standard_normal((5, 4))
    x = rng.standard_normal(5)
    lam_max = np.abs(B.T @ x).max()
    np.testing.assert_array_equal(elastic_net_solve(B, x, lam_max, 0.3), np.zeros(4))
    np.testing.assert_array_equal(elastic_net_solve(B, x, 2 * lam_max, 0.0), np.zeros(4))


def test_orthogonal_response_has_only_zero_knot():
    B = np.array([[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]])
    path = lars_en_path(B, np.array([0.0, 0.0, 1.0]), 0.1, full_path=True)
    assert len(path.knots) == 1
    assert path.knots[0].active == []
    np.testing.assert_array_equal(path.knots[0].coef, 0.0)


def test_identical_atoms_get_equal_coefficients():
    b = _unit([1.0, -2.0, 0.5, 1.0])
    x = _unit([0.3, -1.0, 1.0, 0.2])
    B = np.column_stack([b, b])
    path = lars_en_path(B, x, 0.1, full_path=True)
    final = path.knots[-1].coef
    assert abs(final[0] - final[1]) <= 1e-10
    assert final[0] != 0


def test_duplicate_atoms_without_ridge_skip_later_one():
    b = _unit([1.0, 2.0, 0.0])
    x = _unit([1.0, 1.0, 1.0])
    B = np.column_stack([b, b, _unit([0.0, 0.0, 1.0])])
    path = lars_en_path(B, x, 0.0, full_path=True)
    # the twin tracks atom 0's correlation exactly and never enters
    assert all(1 not in knot.active for knot in path.knots)
    assert path.knots[-1].coef[1] == 0.0
    assert kkt_residual(B, x, path.knots[-1].coef, path.knots[-1].l1_weight, 0.0) <= 1e-8


def test_rescale_flag():
    x = _unit([0.6, 0.8])
    naive = elastic_net_solve(x[:, None], x, 0.1, 0.25)
    corrected = elastic_net_solve(x[:, None], x, 0.1, 0.25, rescale=True)
    assert corrected[0] == pytest.approx(naive[0] * 1.5)


# -- path structure -------------------------------------------------------

def _random_problem(seed, d=6, m=7):
    rng = np.random.default_rng(seed)
    return rng.standard_normal((d, m)), rng.standard_normal(d)


@pytest.mark.parametrize("l2", [0.0, 0.1, 1.0])
@pytest.mark.parametrize("seed", range(5))
def test_path_invariants(seed, l2):
    B, x = _random_problem(seed)
    path = lars_en_path(B, x, l2, full_path=True)
    first = path.knots[0]
    assert first.active == [] and not first.coef.any()
    budgets = path.l1_budgets
    assert np.all(np.diff(budgets) >= -1e-12)
    fractions = path.path_fraction
    assert fractions[0] == 0 and fractions[-1] == pytest.approx(1.0)
    assert np.all((fractions >= 0) & (fractions <= 1 + 1e-12))
    objectives = []
    for knot in path.knots:
        outside = np.setdiff1d(np.arange(B.shape[1]), knot.active)
        assert np.all(knot.coef[outside] == 0)
        assert kkt_residual(B, x, knot.coef, knot.l1_weight, l2) <= 1e-8
        objectives.append(elastic_net_objective(B, x, knot.coef, knot.l1_weight, l2))
    # the optimal value decreases as the l1 weight decreases
    assert np.all(np.diff(objectives) <= 1e-10)


@pytest.mark.parametrize("seed", range(4))
def test_path_is_piecewise_linear_between_knots(seed):
    B, x = _random_problem(seed)
    l2 = 0.1
    path = lars_en_path(B, x, l2, full_path=True)
    for left, right in zip(path.knots, path.knots[1:]):
        if left.l1_weight - right.l1_weight < 1e-9:
            continue
        mid = 0.5 * (left.l1_weight + right.l1_weight)
        exact = brute_force_elastic_net(B, x, mid, l2)
        np.testing.assert_allclose(path.coef_at(mid), exact, atol=1e-8)
        np.testing.assert_allclose(exact, 0.5 * (left.coef + right.coef), atol=1e-8)


def test_max_active_stop():
    B, x = _random_problem(3, d=8, m=8)
    path = lars_en_path(B, x, 0.1, max_active=3)
    assert len(path.knots[-1].active) == 3
    default = lars_en_path(B, x, 0.1)
    assert len(default.knots[-1].active) == 8


def test_coef_at_beyond_path_end_raises():
    B, x = _random_problem(1)
    path = lars_en_path(B, x, 0.1, l1_weight=0.5)
    with pytest.raises(SolverError, match="path ends"):
        path.coef_at(0.1)


def test_invalid_inputs():
    with pytest.raises(SolverError, match="non-finite"):
        lars_en_path(np.array([[np.inf]]), np.array([1.0]), 0.0)
    with pytest.raises(SolverError, match=r"zero-norm dictionary column\(s\): \[1\]"):
        lars_en_path(np.array([[1.0, 0.0], [0.0, 0.0]]), np.array([1.0, 0.0]), 0.0)
    with pytest.raises(SolverError, match="shape mismatch"):
        lars_en_path(np.ones((3, 2)), np.ones(2), 0.0)
    with pytest.raises(SolverError):
        elastic_net_solve(np.ones((2, 1)), np.ones(2), 0.0, 0.1)
    with pytest.raises(SolverError):
        lars_en_path(np.ones((2, 1)), np.ones(2), -1.0)


# -- oracle equivalence ---------------------------------------------------

@settings(max_examples=80, deadline=None)
@given(
    seed=st.integers(0, 2**32 - 1),
    d=st.integers(1, 8),
    m=st.integers(1, 8),
    l1=st.sampled_from([0.05, 0.2, 0.5, 1.3]),
    l2=st.sampled_from([0.0, 0.01, 0.1, 1.0]),
)
def test_matches_brute_force_oracle(seed, d, m, l1, l2):
    rng = np.random.default_rng(seed)
    B = rng.standard_normal((d, m))
    x = rng.standard_normal(d)
    z = elastic_net_solve(B, x, l1, l2)
    np.testing.assert_allclose(z, brute_force_elastic_net(B, x, l1, l2), atol=1e-6)
    assert kkt_residual(B, x, z, l1, l2) <= 1e-8


# -- grouping effect ------------------------------------------------------

def _correlated_pair(rho):
    b1 = np.array([1.0, 0.0, 0.0, 0.0])
    b2 = np.array([rho, np.sqrt(max(0.0, 1 - rho * rho)), 0.0, 0.0])
    return np.column_stack([b1, b2, _unit([0.0, 0.3, 1.0, 0.2])])


def test_grouping_effect_bound_and_monotone():
    x = np.array([1.0, 0.4, 0.3, -0.2])
    l2 = 0.1
    gaps = []
    for rho in (0.999, 0.9999, 1.0):
        B = _correlated_pair(rho)
        z = lars_en_path(B, x, l2, full_path=True).knots[-1].coef
        gap = abs(z[0] - z[1])
        assert gap <= np.abs(x).sum() / l2 * np.sqrt(2 * (1 - rho)) + 1e-12
        gaps.append(gap)
    assert gaps[-1] <= 1e-10
    assert gaps[0] >= gaps[1] >= gaps[2]


# -- robust matrix elastic net --------------------------------------------

def test_model_weight_mapping():
    l1, l2 = model_to_solver_weights(0.01, 0.18)
    assert l1 == pytest.approx(1 / 0.18)
    assert l2 == pytest.approx(0.01 / 0.18)
    with pytest.raises(SolverError):
        model_to_solver_weights(0.01, 0.0)


def test_default_model_parameters_accepted():
    X, _ = synth_subspaces(2, 6, 2, 4, 0.05, seed=0)
    dec = robust_matrix_elastic_net(normalize_columns(X), 0.01, 0.18)
    assert np.all(np.diag(dec.Z) == 0)
    np.testing.assert_allclose(dec.S, dec.X - dec.X @ dec.Z, atol=1e-10)


def test_duplicated_pair_closed_form():
    x = _unit([1.0, -1.0, 2.0, -2.0])
    y = _unit([2.0, 2.0, 1.0, 1.0])
    assert x @ y == pytest.approx(0.0, abs=1e-15)
    for l2 in (0.01, 0.001):
        # lambda, gamma giving l1 = 0.1 and the requested l2
        dec = robust_matrix_elastic_net(np.column_stack([x, x, y]), l2 / 0.1, 10.0)
        assert dec.l1_weight == pytest.approx(0.1)
        expected = 0.9 / (1 + 2 * l2)
        np.testing.assert_allclose(dec.Z[:2, :2], [[0, expected], [expected, 0]], atol=1e-12)
        np.testing.assert_array_equal(dec.Z[:, 2], 0.0)


@pytest.mark.parametrize("seed", range(3))
def test_decomposition_identity_and_kkt(seed):
    X, _ = synth_subspaces(3, 8, 2, 6, 0.05, seed=seed)
    X = normalize_columns(X)
    dec = robust_matrix_elastic_net(X, l1_weight=0.05, l2_weight=0.1)
    assert np.all(np.diag(dec.Z) == 0)
    assert np.all(np.isfinite(dec.Z))
    np.testing.assert_allclose(dec.S, X - X @ dec.Z, atol=1e-10)
    np.testing.assert_allclose(dec.clean + dec.S, X, atol=1e-10)
    n = X.shape[1]
    for i in range(n):
        keep = np.r_[0:i, i + 1:n]
        assert kkt_residual(X[:, keep], X[:, i], dec.Z[keep, i], 0.05, 0.1) <= 1e-8


def test_column_independence_across_threads(monkeypatch):
    X, _ = synth_subspaces(3, 8, 2, 6, 0.05, seed=7)
    X = normalize_columns(X)
    serial = robust_matrix_elastic_net(X, l1_weight=0.05, l2_weight=0.1, threads=1)
    pooled = robust_matrix_elastic_net(X, l1_weight=0.05, l2_weight=0.1, threads=4)
    monkeypatch.setenv("ENHG_THREADS", "3")
    env = robust_matrix_elastic_net(X, l1_weight=0.05, l2_weight=0.1)
    assert serial.Z.tobytes() == pooled.Z.tobytes() == env.Z.tobytes()


def test_robust_errors():
    with pytest.raises(SolverError, match="at least 3"):
        robust_matrix_elastic_net(np.eye(2))
    X = np.column_stack([np.ones(3), np.zeros(3), np.arange(3.0)])
    with pytest.raises(SolverError, match=r"zero-norm sample column\(s\): \[1\]"):
        robust_matrix_elastic_net(X, l1_weight=0.1, l2_weight=0.1)
    with pytest.raises(SolverError):
        robust_matrix_elastic_net(np.eye(3), l1_weight=0.1)
