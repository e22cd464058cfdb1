import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lrnn.errors import ConfigError, DimensionMismatch, NonFiniteInput
from lrnn.linsolve import SolverConfig, lstsq

METHODS = ["svd", "qr", "normal"]


@pytest.mark.parametrize("method", METHODS)
def test_identity(method):
    X, _ = lstsq(np.eye(3), np.array([1.0, 2.0, 3.0]), SolverConfig(method))
    assert np.allclose(X, [1, 2, 3])


@pytest.mark.parametrize("method", METHODS)
def test_single_column(method):
    X, _ = lstsq(np.ones((2, 1)), np.array([1.0, 3.0]), SolverConfig(method))
    assert X[0] == pytest.approx(2.0)


def _system(seed, m=50, n=20):
    rng = np.random.default_rng(seed)
    return rng.normal(size=(m, n)), rng.normal(size=m)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.booleans())
def test_methods_agree_with_normal_equations(seed, scale):
    M, R = _system(seed)
    oracle = np.linalg.solve(M.T @ M, M.T @ R)
    xs, _ = lstsq(M, R, SolverConfig("svd", scale_columns=scale))
    xq, _ = lstsq(M, R, SolverConfig("qr", scale_columns=scale))
    assert np.allclose(xs, xq, rtol=1e-10, atol=1e-10 * np.abs(xs).max())
    assert np.allclose(xs, oracle, rtol=1e-8, atol=1e-8 * np.abs(oracle).max())


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_residual_is_optimal(seed):
    M, R = _system(seed)
    X, diag = lstsq(M, R)
    base = np.linalg.norm(M @ X - R)
    assert diag.residual_norm == pytest.approx(base)
    rng = np.random.default_rng(seed)
    for _ in range(100):
        d = rng.normal(size=X.shape) * 10.0 ** rng.uniform(-6, 0)
        assert np.linalg.norm(M @ (X + d) - R) >= base - 1e-12


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_duplicate_column_minimum_norm(seed):
    M, R = _system(seed)
    X, _ = lstsq(M, R)
    X2, diag = lstsq(np.hstack([M, M[:, :1]]), R)
    assert diag.rank == 20
    assert np.linalg.norm(X2) <= np.linalg.norm(X) + 1e-10
    assert np.allclose(M @ X, np.hstack([M, M[:, :1]]) @ X2)


@pytest.mark.parametrize("c", [1e-6, 1.0, 1e6])
@pytest.mark.parametrize("method", ["svd", "qr"])
def test_scale_equivariance(c, method):
    M, R = _system(7)
    X, _ = lstsq(M, R, SolverConfig(method))
    Xc, _ = lstsq(c * M, c * R, SolverConfig(method))
    assert np.allclose(Xc, X, rtol=1e-12, atol=1e-12 * np.abs(X).max())


def test_truncation_drops_tiny_directions():
    rng = np.random.default_rng(1)
    U, _ = np.linalg.qr(rng.normal(size=(30, 5)))
    V, _ = np.linalg.qr(rng.normal(size=(5, 5)))
    M = U @ np.diag([1, 1e-2, 1e-5, 1e-14, 1e-15]) @ V.T
    _, diag = lstsq(M, rng.normal(size=30), SolverConfig(scale_columns=False))
    assert diag.rank == 3
    assert diag.sigma_min_kept == pytest.approx(1e-5)


def test_diagnostics_dict():
    M, R = _system(3)
    _, diag = lstsq(M, R)
    assert set(diag.as_dict()) == {"method", "rank", "sigma_max", "sigma_min_kept", "residual_norm"}


def test_zero_column_is_harmless():
    M, R = _system(4)
    M[:, 3] = 0.0
    X, _ = lstsq(M, R)
    assert abs(X[3]) <= 1e-12 and np.all(np.isfinite(X))


def test_errors():
    with pytest.raises(NonFiniteInput):
        lstsq(np.array([[np.nan]]), np.ones(1))
    with pytest.raises(DimensionMismatch):
        lstsq(np.ones((3, 2)), np.ones(2))
    with pytest.raises(ConfigError):
        SolverConfig("lu")
    with pytest.raises(ConfigError):
        SolverConfig(rcond=0.0)


def test_normal_chunking_matches_unchunked():
    M, R = _system(5, 300, 20)
    a, _ = lstsq(M, R, SolverConfig("normal", chunk_rows=7))
    b, _ = lstsq(M, R, SolverConfig("normal", chunk_rows=10_000))
    assert np.allclose(a, b, rtol=1e-10)
