import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from granular_tsvm.errors import (IndefiniteDiagonalError, NotPositiveDefiniteError,
                                  SolverConvergenceError)
from granular_tsvm.numerics import (BoxQP, SolverConfig, active_set_oracle, kkt_residual,
                                    largest_eigenvalue, solve_box_qp, solve_spd)

from oracles import adjugate_inverse, brute_box_qp, charpoly_largest_root


def _random_psd(rng, k, rank=None):
    A = rng.standard_normal((rank or k, k))
    return A.T @ A + 1e-3 * np.eye(k)


def _random_qp(seed, k=6, free=0):
    rng = np.random.default_rng(seed)
    Q = _random_psd(rng, k)
    c = rng.standard_normal(k) * 3
    lo = np.zeros(k)
    hi = rng.uniform(0.5, 3.0, k)
    lo[:free], hi[:free] = -np.inf, np.inf
    return BoxQP(Q, c, lo, hi)


def test_solve_spd_examples():
    b = np.array([[1.0], [2.0], [3.0]])
    np.testing.assert_allclose(solve_spd(np.eye(3), b), b)
    np.testing.assert_allclose(solve_spd(2 * np.eye(3), b), b / 2)


@pytest.mark.parametrize("seed", range(10))
def test_solve_spd_matches_adjugate(seed):
    rng = np.random.default_rng(seed)
    A = _random_psd(rng, 5) + np.eye(5)
    B = rng.standard_normal((5, 2))
    X = solve_spd(A, B)
    np.testing.assert_allclose(X, adjugate_inverse(A) @ B, atol=1e-8)
    assert np.linalg.norm(A @ X - B) / max(1.0, np.linalg.norm(B)) <= 1e-8


def test_solve_spd_rejects_indefinite():
    with pytest.raises(NotPositiveDefiniteError):
        solve_spd(np.diag([1.0, -1.0]), np.ones(2))


def test_one_dimensional_examples():
    interior = BoxQP([[1.0]], [-1.0], [0.0], [10.0])
    s = solve_box_qp(interior)
    assert s.x[0] == pytest.approx(1.0)
    clipped = BoxQP([[1.0]], [-1.0], [0.0], [0.5])
    s = solve_box_qp(clipped)
    assert s.x[0] == 0.5 and s.kkt_residual == 0.0
    for p in (interior, clipped):
        assert active_set_oracle(p).x[0] == pytest.approx(solve_box_qp(p).x[0])


def test_gradient_positive_at_origin():
    s = solve_box_qp(BoxQP(np.eye(2), [1.0, 1.0], [0, 0], [1, 1]))
    np.testing.assert_array_equal(s.x, [0.0, 0.0])


def test_unconstrained_pd():
    rng = np.random.default_rng(1)
    Q = _random_psd(rng, 4) + np.eye(4)
    c = rng.standard_normal(4)
    p = BoxQP(Q, c, -np.inf, np.inf)
    expected = -np.linalg.solve(Q, c)
    np.testing.assert_allclose(active_set_oracle(p).x, expected, atol=1e-9)
    np.testing.assert_allclose(solve_box_qp(p, SolverConfig(1e-12, 100_000)).x, expected, atol=1e-6)


def test_boxqp_validation():
    with pytest.raises(ValueError):
        BoxQP([[1.0, 1.0], [0.0, 1.0]], [0, 0], 0, 1)
    with pytest.raises(ValueError):
        BoxQP(np.eye(1), [0.0], [1.0], [0.0])
    with pytest.raises(ValueError):
        SolverConfig(omega=2.0)


def test_indefinite_diagonal():
    with pytest.raises(IndefiniteDiagonalError):
        solve_box_qp(BoxQP(np.diag([1.0, 0.0]), [1.0, 1.0], 0, 1))


def test_convergence_error_carries_best_iterate():
    p = _random_qp(0, 8)
    with pytest.raises(SolverConvergenceError) as info:
        solve_box_qp(p, SolverConfig(1e-14, 1))
    assert info.value.partial.x.shape == (8,)


def test_jitter():
    p = BoxQP(np.ones((3, 3)), np.zeros(3), 0, 1)
    q, eps = p.with_jitter()
    assert eps == pytest.approx(1e-10)
    np.testing.assert_allclose(np.diag(q.Q), 1 + 1e-10)


def test_oracle_refuses_large():
    with pytest.raises(ValueError):
        active_set_oracle(_random_qp(0, 13))


@pytest.mark.parametrize("seed", range(100))
def test_sor_matches_oracle(seed):
    p = _random_qp(seed, 6, free=seed % 3)
    s = solve_box_qp(p, SolverConfig(1e-10, 200_000))
    o = active_set_oracle(p)
    assert s.objective <= o.objective + 1e-6
    assert s.kkt_residual <= 1e-9
    assert np.all(s.x >= p.lower) and np.all(s.x <= p.upper)


@pytest.mark.parametrize("seed", range(10))
def test_oracle_matches_independent_brute_force(seed):
    p = _random_qp(seed, 5, free=seed % 2)
    assert active_set_oracle(p).objective == pytest.approx(
        brute_box_qp(p.Q, p.c, p.lower, p.upper), abs=1e-9)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 8), st.floats(0.2, 1.8),
       st.sampled_from(["cyclic", "random"]))
def test_monotone_descent(seed, k, omega, order):
    rng = np.random.default_rng(seed)
    Q = _random_psd(rng, k, rank=max(1, k // 2))
    p = BoxQP(Q, rng.standard_normal(k), -rng.random(k), rng.random(k) + 0.1)
    try:
        s = solve_box_qp(p, SolverConfig(1e-9, 2000, omega), order=order, seed=seed,
                         record_history=True)
        hist = s.history
    except SolverConvergenceError as exc:
        hist = exc.partial.history
    assert all(b <= a + 1e-12 for a, b in zip(hist, hist[1:]))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 10))
def test_kkt_certificate(seed, k):
    p = _random_qp(seed, k, free=seed % (k + 1))
    cfg = SolverConfig(1e-8, 200_000)
    s = solve_box_qp(p, cfg)
    assert s.kkt_residual <= 10 * cfg.tolerance
    assert kkt_residual(p, s.x) <= 10 * cfg.tolerance


def test_largest_eigenvalue_examples():
    assert largest_eigenvalue(np.diag([1.0, 3.0])) == pytest.approx(3.0)
    assert largest_eigenvalue(np.eye(4)) == pytest.approx(1.0)
    # dominant magnitude is negative: the shift path must find the top eigenvalue
    assert largest_eigenvalue(np.diag([-5.0, 1.0])) == pytest.approx(1.0)
    assert largest_eigenvalue(np.diag([-2.0, 2.0])) == pytest.approx(2.0)


@pytest.mark.parametrize("seed", range(20))
def test_largest_eigenvalue_matches_charpoly(seed):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((4, 4))
    A = A + A.T
    assert largest_eigenvalue(A) == pytest.approx(charpoly_largest_root(A), abs=1e-8)
