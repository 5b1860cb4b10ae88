import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import fd_symbol
from schrolab import (InvalidArgument, assemble, eigh, laplace_eigenbasis, make_circle,
                      make_torus, rayleigh_quotient, spike_potential_1d, square)
from schrolab.experiments import spike
from schrolab.operator import apply, gradient, laplacian, laplacian_matrix
from schrolab.potentials import constant_potential, random_band_limited

TWO_PI = 2 * np.pi


def _const_op(g, alpha, disc="fourier", k0=TWO_PI):
    return assemble(g, constant_potential(g, k0), square(k0), alpha, disc)


def test_alpha_zero_is_laplacian():
    g = make_circle(1, 16)
    vals = np.linalg.eigvalsh(_const_op(g, 0.0).matrix)
    mu = sorted(p.eigenvalue for p in laplace_eigenbasis(g, 16))
    assert np.allclose(vals, mu, atol=1e-9)


def test_constant_shift_fourier():
    r = eigh(_const_op(make_circle(1, 32), 0.1), 1)
    assert r.values[0] == pytest.approx(0.1 * 4 * np.pi**2, abs=1e-10)


def test_constant_shift_fd2_symbol():
    N = 64
    r = eigh(_const_op(make_circle(1, N), 0.1, "fd2"), 3)
    shift = 0.1 * 4 * np.pi**2
    assert r.values[0] == pytest.approx(shift, abs=1e-6)
    assert r.values[1] == pytest.approx(fd_symbol(1, N, 1.0) + shift, rel=1e-12)
    assert r.values[2] == pytest.approx(r.values[1], rel=1e-12)


def test_assemble_rejects_foreign_grid():
    g = make_circle(1, 16)
    with pytest.raises(InvalidArgument):
        assemble(make_circle(1, 32), constant_potential(g, 1.0), square(1.0), 1.0)
    with pytest.raises(InvalidArgument):
        assemble(g, constant_potential(g, 1.0), square(1.0), 1.0, "spectral")


def test_apply_examples():
    g = make_circle(1, 32)
    op = _const_op(g, 0.3)
    one = np.ones(32)
    assert np.allclose(apply(op, one), 0.3 * TWO_PI**2 * one)
    v1 = laplace_eigenbasis(g, 2)[1].samples
    assert np.allclose(apply(_const_op(g, 0.0), v1), 4 * np.pi**2 * v1, atol=1e-10)
    with pytest.raises(InvalidArgument):
        apply(op, np.ones(31))


@given(st.integers(0, 10**6), st.sampled_from(["fourier", "fd2"]))
def test_symmetric_form(seed, disc):
    g = make_torus(1, 1.5, 8, 10)
    rng = np.random.default_rng(seed)
    k = constant_potential(g, 1.0)
    op = assemble(g, k, square(1.0), rng.uniform(-2, 2), disc)
    u, w = rng.normal(size=(2, g.n_nodes))
    assert u @ apply(op, w) == pytest.approx(w @ apply(op, u), rel=1e-10, abs=1e-10)
    assert op.asymmetry < 1e-8


@given(st.integers(0, 10**6))
def test_laplacian_psd_and_kills_constants(seed):
    g = make_torus(1, 1, 8, 8)
    for disc in ("fourier", "fd2"):
        D = laplacian_matrix(g, disc)
        assert np.allclose(D @ np.ones(64), 0, atol=1e-9)
        u = np.random.default_rng(seed).normal(size=64)
        assert u @ D @ u >= -1e-9


def test_rayleigh_examples():
    g = make_circle(1, 64)
    op = _const_op(g, 0.2)
    assert rayleigh_quotient(op, np.ones(64)) == pytest.approx(0.2 * TWO_PI**2)
    r = eigh(op, 1)
    assert rayleigh_quotient(op, r.vectors[:, 0]) == pytest.approx(r.values[0], rel=1e-12)
    with pytest.raises(InvalidArgument):
        rayleigh_quotient(op, np.zeros(64))


@pytest.mark.parametrize("delta", [0.2, 0.1, 0.05])
def test_rayleigh_half_sine_on_hard_spike(delta):
    g = make_circle(1, 4000)
    k = spike_potential_1d(g, TWO_PI, delta, smooth=False)
    op = assemble(g, k, square(TWO_PI), 1.0)
    got = rayleigh_quotient(op, spike.half_sine(g))
    want = spike.test_function_energy(square(TWO_PI), 1.0, delta, 1.0)
    assert got == pytest.approx(want, rel=2e-3)


@given(st.integers(0, 10**6))
def test_spectral_derivatives(seed):
    g = make_torus(1, 2, 16, 12)
    u = random_band_limited(g, np.random.default_rng(seed), 3)
    # integration by parts: -int u Lap u = int |grad u|^2
    lhs = -g.inner(u, laplacian(g, u))
    rhs = sum(g.inner(c, c) for c in gradient(g, u))
    assert lhs == pytest.approx(rhs, rel=1e-10)
    assert np.allclose(-laplacian(g, u), laplacian_matrix(g) @ u, atol=1e-8)


def test_gradient_of_cosine():
    g = make_circle(2.0, 32)
    x = g.axes[0]
    (du,) = gradient(g, np.cos(np.pi * x))
    assert np.allclose(du, -np.pi * np.sin(np.pi * x), atol=1e-12)
