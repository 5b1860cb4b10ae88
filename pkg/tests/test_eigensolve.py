import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import bisection_eigenvalues, charpoly_roots, circle_spectrum
from schrolab import (InvalidArgument, NumericalFailure, assemble, eigh, laplace_eigenbasis,
                      make_circle, make_torus, poisson_solve, square)
from schrolab import eigensolve
from schrolab._kernels import tql_values
from schrolab.eigensolve import _back_transform, jacobi_eigh, residual, tridiagonalize
from schrolab.operator import rayleigh_quotient
from schrolab.potentials import constant_potential, random_band_limited


def _sym(rng, n):
    a = rng.normal(size=(n, n))
    return a + a.T


def test_laplacian_spectrum():
    g = make_circle(1, 64)
    op = assemble(g, constant_potential(g, 1.0), square(1.0), 0.0)
    r = eigh(op, 9)
    assert np.allclose(r.values, circle_spectrum(1.0, 9), atol=1e-9, rtol=0)
    assert np.all(r.residuals < 1e-9)


def test_diagonal_matrix():
    d = np.array([5.0, -1.0, 3.0, 3.0, 0.5])
    r = eigh(np.diag(d))
    assert np.allclose(r.values, np.sort(d))


@pytest.mark.parametrize("seed", range(5))
def test_random_6x6_against_oracles(seed):
    a = _sym(np.random.default_rng(seed), 6)
    for method in ("ql", "jacobi"):
        got = eigh(a, method=method).values
        assert np.allclose(got, bisection_eigenvalues(a), atol=1e-8)
        assert np.allclose(got, charpoly_roots(a), atol=1e-8)


@given(st.integers(0, 10**6), st.integers(1, 8))
def test_eigenpairs_small(seed, n):
    a = _sym(np.random.default_rng(seed), n)
    r = eigh(a)
    assert np.allclose(r.values, bisection_eigenvalues(a), atol=1e-8)
    Z = r.vectors
    assert np.allclose(Z.T @ Z, np.eye(n), atol=1e-9)
    assert np.all(r.residuals <= 1e-9 * (1 + np.abs(r.values)))
    idx = np.argmax(np.abs(Z), axis=0)
    assert np.all(Z[idx, np.arange(n)] > 0)


@given(st.integers(0, 10**6), st.sampled_from([3, 10, 40, 70]), st.sampled_from([4, 32]))
def test_tridiagonalization_is_a_similarity(seed, n, block):
    a = _sym(np.random.default_rng(seed), n)
    d, e, refl = tridiagonalize(a, block)
    T = np.diag(d) + np.diag(e, 1) + np.diag(e, -1)
    Q = _back_transform(refl, np.eye(n))
    assert np.allclose(Q.T @ Q, np.eye(n), atol=1e-12)
    assert np.allclose(Q @ T @ Q.T, a, atol=1e-10 * np.abs(a).max())


def test_clustered_spectrum_vectors():
    # a tight multiplet exercises the reorthogonalization in inverse iteration
    rng = np.random.default_rng(7)
    Q, _ = np.linalg.qr(rng.normal(size=(30, 30)))
    lam = np.concatenate([[1.0, 1.0, 1.0 + 1e-13, 1.0 + 1e-9], np.linspace(2, 5, 26)])
    a = Q @ np.diag(lam) @ Q.T
    r = eigh(0.5 * (a + a.T), 6)
    assert np.allclose(r.vectors.T @ r.vectors, np.eye(6), atol=1e-10)
    assert np.all(r.residuals < 1e-12)


def test_torus_multiplets():
    g = make_torus(1, 1, 12, 12)
    r = eigh(assemble(g, constant_potential(g, 1.0), square(1.0), 0.0), 6)
    assert r.multiplets() == [[0], [1, 2, 3, 4], [5]]


def test_count_validation():
    with pytest.raises(InvalidArgument):
        eigh(np.eye(3), 4)
    with pytest.raises(InvalidArgument):
        eigh(np.ones((2, 3)))
    with pytest.raises(InvalidArgument):
        eigh(np.eye(3), method="lanczos")


def test_iteration_cap_reports_failure(monkeypatch):
    a = _sym(np.random.default_rng(1), 12)
    d, e, _ = tridiagonalize(a)
    _, _, failed = tql_values(d, e, 0)
    assert failed >= 0
    monkeypatch.setattr(eigensolve, "MAX_ITER", 0)
    with pytest.raises(NumericalFailure) as info:
        eigh(a)
    assert "row" in info.value.diagnostics


def test_jacobi_sweep_cap():
    with pytest.raises(NumericalFailure):
        jacobi_eigh(_sym(np.random.default_rng(2), 8), max_sweeps=1)


def test_weighted_normalization():
    g = make_circle(3.0, 32)
    r = eigh(assemble(g, constant_potential(g, 2.0), square(2.0), 0.7), 3)
    for j in range(3):
        assert g.inner(r.vectors[:, j], r.vectors[:, j]) == pytest.approx(1.0)


def test_poisson_examples():
    g = make_circle(1, 64)
    v1 = laplace_eigenbasis(g, 2)[1].samples
    assert np.allclose(poisson_solve(g, v1), v1 / (4 * np.pi**2))
    assert np.array_equal(poisson_solve(g, np.zeros(64)), np.zeros(64))
    s = g.axes[0]
    u = poisson_solve(g, np.cos(2 * np.pi * s) + np.cos(4 * np.pi * s))
    want = np.cos(2 * np.pi * s) / (4 * np.pi**2) + np.cos(4 * np.pi * s) / (16 * np.pi**2)
    assert np.allclose(u, want, atol=1e-14)
    with pytest.raises(InvalidArgument):
        poisson_solve(g, np.ones(64))


@given(st.integers(0, 10**6))
def test_poisson_inverts_laplacian(seed):
    g = make_torus(1, 2, 16, 8)
    f = random_band_limited(g, np.random.default_rng(seed), 3)
    u = poisson_solve(g, f)
    assert abs(g.mean(u)) < 1e-13
    from schrolab.operator import laplacian
    assert np.allclose(-laplacian(g, u), f, atol=1e-10)


def test_residual_examples():
    g = make_circle(1, 32)
    op = assemble(g, constant_potential(g, 1.0), square(1.0), 0.5)
    r = eigh(op, 2)
    u = r.vectors[:, 1]
    assert residual(op, r.values[1], u) <= 1e-9
    assert residual(op, r.values[1] + 1, u) == pytest.approx(1.0, rel=1e-9)
    with pytest.raises(InvalidArgument):
        residual(op, 0.0, np.zeros(32))


@given(st.integers(0, 10**6))
def test_residual_bound_at_rayleigh_quotient(seed):
    g = make_circle(1, 16)
    op = assemble(g, constant_potential(g, 1.0), square(1.0), 2.0)
    u = np.random.default_rng(seed).normal(size=16)
    Hu = op.matrix @ u
    bound = np.sqrt(g.inner(Hu, Hu) / g.inner(u, u))
    assert residual(op, rayleigh_quotient(op, u), u) <= bound * (1 + 1e-12)
