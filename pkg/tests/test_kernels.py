import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from granular_tsvm.kernels import KernelSpec, gram, kernel_eval
from granular_tsvm.numerics import largest_eigenvalue

G = KernelSpec("gaussian", 0.7)


def test_kernel_eval_examples():
    assert kernel_eval(G, [1.0, 2.0], [1.0, 2.0]) == 1.0
    sigma = 0.7
    y = np.array([np.sqrt(2) * sigma, 0.0])
    assert kernel_eval(G, [0.0, 0.0], y) == pytest.approx(np.exp(-1), rel=1e-12)
    assert kernel_eval(KernelSpec(), [1, 2], [3, 4]) == 11


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        kernel_eval(G, [1.0], [1.0, 2.0])
    with pytest.raises(ValueError):
        gram(G, np.zeros((2, 2)), np.zeros((2, 3)))


def test_spec_validation():
    with pytest.raises(ValueError):
        KernelSpec("gaussian", 0.0)
    with pytest.raises(ValueError):
        KernelSpec("poly")
    assert KernelSpec.from_dict(G.to_dict()) == G


def test_gram_matches_pointwise():
    rng = np.random.default_rng(0)
    X, Y = rng.standard_normal((5, 3)), rng.standard_normal((4, 3))
    for spec in (G, KernelSpec()):
        K = gram(spec, X, Y)
        ref = np.array([[kernel_eval(spec, x, y) for y in Y] for x in X])
        np.testing.assert_allclose(K, ref, atol=1e-14)
        np.testing.assert_allclose(gram(spec, Y, X), K.T, atol=1e-14)
    np.testing.assert_allclose(np.diag(gram(G, X, X)), 1.0)


def test_gram_row_blocks(monkeypatch):
    import granular_tsvm.kernels as kernels
    rng = np.random.default_rng(1)
    X = rng.standard_normal((37, 4))
    full = gram(G, X, X)
    monkeypatch.setattr(kernels, "_ROW_BLOCK", 5)
    np.testing.assert_array_equal(gram(G, X, X), full)


def test_three_point_gram_psd():
    X = np.array([[0.0, 0.0], [0.1, 0.0], [0.0, 0.1]])
    assert -largest_eigenvalue(-gram(G, X, X)) >= -1e-10


def test_wide_sigma_flattens():
    X = np.random.default_rng(2).random((20, 3))
    assert np.all(gram(KernelSpec("gaussian", 1e6), X, X) >= 1 - 1e-6)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 30), st.floats(0.05, 10.0))
def test_gram_psd(seed, p, sigma):
    X = np.random.default_rng(seed).standard_normal((p, 3))
    K = gram(KernelSpec("gaussian", sigma), X, X)
    assert np.min(np.linalg.eigvalsh(K)) >= -1e-8 * p
