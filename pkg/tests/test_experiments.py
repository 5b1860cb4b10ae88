import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from schrolab import (DegeneracyStop, InvalidArgument, LineSearchFailure, NumericalFailure,
                      critical_alpha, exponential, identity, laplace_eigenbasis, make_circle,
                      make_torus, project_to_constraint, spike_potential_1d, square)
from schrolab.experiments import hill, optimize, spike, torus, transition
from schrolab.experiments.common import SweepResult, richardson_limit
from schrolab.potentials import constant_potential, random_band_limited

TWO_PI = 2 * np.pi
PI2 = np.pi**2


# -- common -----------------------------------------------------------------

@given(st.floats(-5, 5), st.floats(0.1, 5), st.floats(0.3, 4))
def test_richardson_recovers_power_law(limit, C, p):
    h = np.array([0.4, 0.2, 0.1, 0.05])
    est, order = richardson_limit(h, limit + C * h**p)
    assert est == pytest.approx(limit, abs=1e-8 * (1 + C))
    assert order == pytest.approx(p, rel=1e-6)


def test_richardson_rejects():
    with pytest.raises(NumericalFailure):
        richardson_limit([0.3, 0.2, 0.1], [1.0, 2.0, 1.5])
    with pytest.raises(InvalidArgument):
        richardson_limit([0.2, 0.1], [1.0, 2.0])


def test_sweep_result_guards():
    with pytest.raises(InvalidArgument):
        SweepResult("x", [1, 2, 2], np.zeros((3, 1)), np.zeros((3, 1)), {}, {}, (), [])
    with pytest.raises(NumericalFailure):
        SweepResult("x", [1, 2], np.zeros((2, 1)), np.full((2, 1), 1e-3), {}, {}, (), [])


# -- transition --------------------------------------------------------------

def test_transition_signs_below_and_negative_alpha():
    g = make_circle(1, 32)
    F = square(TWO_PI)
    below = transition.transition_sweep(g, F, [0.05, 0.1], [0.04, 0.02])
    assert all(row[6] == 1 for row in below.rows)
    neg = transition.transition_sweep(g, F, [-0.5, -0.1], [0.02])
    assert all(row[6] == -1 for row in neg.rows)


@pytest.mark.parametrize("F", [square(TWO_PI), square(3.0), exponential(0.0), exponential(1.0)],
                         ids=lambda F: f"{F.name}@{F.kappa0:.3g}")
def test_transition_estimate_within_two_percent(F):
    g = make_circle(1, 64)
    a_star = critical_alpha(F, 4 * PI2)
    alphas = a_star * np.array([0.8, 0.95, 1.05, 1.2])
    r = transition.transition_sweep(g, F, alphas, [0.01 * max(1, abs(F.kappa0))])
    assert r.derived["alpha_c_estimate"] == pytest.approx(a_star, rel=0.02)


def test_transition_fd2_keeps_branches():
    g = make_circle(1, 64)
    F = square(TWO_PI)
    a = transition.transition_sweep(g, F, [0.1, 0.5], [0.02])
    b = transition.transition_sweep(g, F, [0.1, 0.5], [0.02], discretization="fd2")
    assert [r[6] for r in a.rows] == [r[6] for r in b.rows] == [1, -1]


# -- spike ------------------------------------------------------------------

def test_spike_values_above_quarter_mu1():
    g = make_circle(1, 256)
    r = spike.spike_sweep(g, square(TWO_PI), 1.0, [0.2, 0.1, 0.05])
    assert np.all(r.derived["lambda0"] > PI2)
    assert np.all(np.diff(r.derived["lambda0"]) < 0)


def test_half_sine_energy_decays_like_delta():
    F = square(TWO_PI)
    for d in (0.02, 0.01, 0.005):
        excess = spike.test_function_energy(F, 1.0, d, 1.0) - PI2
        leading = 2 * TWO_PI**2 * PI2 * d / 3
        assert excess == pytest.approx(leading, rel=d)


def test_half_sine_quadrature_matches_closed_form():
    g = make_circle(1, 512)
    r = spike.spike_sweep(g, square(TWO_PI), 1.0, [0.2, 0.1], smooth=False)
    for row in r.rows:
        # the hard edge costs one cell of mass, which the rescale spreads over the plateau
        assert row[4] == pytest.approx(row[5], rel=2 * g.spacing[0] / row[0])


def test_spike_limit_guards():
    g = make_circle(1, 128)
    with pytest.raises(InvalidArgument):
        spike.spike_limit(g, square(TWO_PI), 0.2, [0.2, 0.1, 0.05])
    with pytest.raises(InvalidArgument):
        spike.spike_limit(g, square(TWO_PI), 1.0, [0.1, 0.2, 0.05])
    with pytest.raises(InvalidArgument):
        spike.spike_sweep(g, square(TWO_PI), 1.0, [0.01])


def test_negative_alpha_unbounded_below():
    g = make_circle(1, 256)
    lam = spike.spike_sweep(g, square(TWO_PI), -0.1, [0.2, 0.1, 0.05]).derived["lambda0"]
    assert np.all(np.diff(lam) < 0) and lam[-1] < -50


def test_circle_contrast_below_critical():
    g = make_circle(1, 256)
    F = square(TWO_PI)
    lam = spike.spike_sweep(g, F, 0.2, [0.2, 0.1, 0.05]).derived["lambda0"]
    assert np.all(lam >= 0.2 * F.f0 * (1 - 1e-9))


# -- hill -------------------------------------------------------------------

def test_hill_constant_equality():
    out = hill.hill_check(hill.HillBoundInput(1.0, np.full(64, 2.5)))
    assert out["branch"] == hill.SUBCRITICAL
    assert out["bound"] == 2.5 and abs(out["lambda0"] - 2.5) <= 1e-10


def test_hill_sine_squared():
    x = np.arange(256) / 256
    data = hill.HillBoundInput(1.0, np.sin(2 * np.pi * x) ** 2)
    assert data.integral == pytest.approx(2 / np.pi, rel=1e-4)
    bound, branch = hill.hill_lower_bound(data)
    assert branch == hill.SUBCRITICAL and bound == pytest.approx(data.integral**2, rel=1e-15)
    assert bound == pytest.approx(4 / PI2, rel=2e-4)
    assert hill.direct_lambda0(data) >= bound


def test_hill_supercritical_branch():
    g = make_circle(2.0, 256)
    V = 500.0 * spike_potential_1d(g, 1.0, 0.2).samples
    data = hill.HillBoundInput(2.0, V)
    bound, branch = hill.hill_lower_bound(data)
    assert branch == hill.SUPERCRITICAL
    assert bound == pytest.approx(data.v_min + PI2 / 4)
    assert hill.direct_lambda0(data) >= bound


def test_hill_rejects():
    with pytest.raises(InvalidArgument):
        hill.HillBoundInput(1.0, np.array([]))
    with pytest.raises(InvalidArgument):
        hill.HillBoundInput(0.0, np.ones(8))


@given(st.integers(0, 10**6), st.floats(-3, 2), st.floats(0.5, 3.0))
def test_hill_bound_property(seed, log_amp, L):
    g = make_circle(L, 64)
    V = random_band_limited(g, np.random.default_rng(seed), 4, scale=10.0**log_amp)
    h = hill.hill_check(hill.HillBoundInput(L, V))
    assert h["bound"] <= h["lambda0"] + 1e-9 * (1 + abs(h["lambda0"]))


# -- torus ------------------------------------------------------------------

def test_torus_small_collapse():
    g = make_torus(1, 1, 24, 24)
    r = torus.torus_collapse(g, square(1.0), 1.0, [0.3, 0.25], count=2)
    assert np.all(r.eigenvalues <= r.derived["excision_bounds"] * (1 + 1e-12))
    assert r.reference["limits"] == pytest.approx([0.0, 4 * PI2])


def test_torus_guards():
    with pytest.raises(InvalidArgument):
        torus.torus_collapse(make_circle(1, 32), square(1.0), 1.0, [0.2])
    with pytest.raises(InvalidArgument):
        torus.torus_collapse(make_torus(1, 1, 16, 16), exponential(1.0), 1.0, [0.3])
    with pytest.raises(InvalidArgument):
        torus.torus_collapse(make_torus(1, 1, 16, 16), square(1.0), 1.0, [0.02])


def test_excision_cutoff_shape():
    g = make_torus(1, 1, 32, 32)
    eta = torus.excision_cutoff(g, 0.1)
    assert eta.min() == 0 and eta.max() == 1
    assert np.all(eta[g.periodic_distance([0, 0]) <= 0.1] == 0)


# -- optimizer ---------------------------------------------------------------

def test_optimizer_constant_is_stationary_below_critical():
    g = make_circle(1, 32)
    F = square(TWO_PI)
    traj = optimize.minimize_potential(g, F, 0.1, constant_potential(g, TWO_PI), steps=5)
    assert traj.status == "converged"
    assert len(traj.iterates) == 1


@pytest.mark.parametrize("seed", range(3))
def test_optimizer_kicks_return_below_critical(seed):
    g = make_circle(1, 32)
    F = square(TWO_PI)
    kick = 0.05 * random_band_limited(g, np.random.default_rng(seed), 3)
    start = project_to_constraint(g, TWO_PI + kick, TWO_PI)
    traj = optimize.minimize_potential(g, F, 0.1, start, steps=15)
    assert np.all(traj.lambdas >= 0.1 * F.f0 - 1e-8)
    assert np.all(np.diff(traj.lambdas) <= 1e-12)


def test_optimizer_descends_above_critical():
    g = make_circle(1, 64)
    F = square(TWO_PI)
    v1 = laplace_eigenbasis(g, 2)[1].samples
    start = project_to_constraint(g, TWO_PI + 0.3 * v1, TWO_PI)
    traj = optimize.minimize_potential(g, F, 1.0, start, steps=25)
    assert traj.lambdas[-1] < F.f0 and traj.lambdas[-1] > PI2
    assert np.all(np.diff(traj.lambdas) <= 1e-12)
    means = [g.mean(x) for x in traj.iterates]
    assert np.max(np.abs(np.array(means) - TWO_PI)) <= 1e-12 * TWO_PI


def test_optimizer_torus_descends():
    g = make_torus(1, 1, 16, 16)
    F = square(1.0)
    kick = 0.1 * random_band_limited(g, np.random.default_rng(0), 2)
    start = project_to_constraint(g, 1.0 + kick, 1.0)
    traj = optimize.minimize_potential(g, F, 20.0, start, steps=10)
    assert traj.lambdas[-1] < 20.0 * F.f0


def test_degeneracy_stop():
    g = make_circle(1, 32)
    with pytest.raises(DegeneracyStop):
        optimize.minimize_potential(g, square(1.0), 0.5, constant_potential(g, 1.0), j=1)


def test_fixed_step_failure():
    g = make_circle(1, 32)
    F = square(TWO_PI)
    v1 = laplace_eigenbasis(g, 2)[1].samples
    start = project_to_constraint(g, TWO_PI + 0.3 * v1, TWO_PI)
    with pytest.raises(LineSearchFailure):
        optimize.minimize_potential(g, F, 1.0, start, steps=3, step_size=1e3, rule="fixed")


def test_optimizer_rejects_foreign_start():
    g = make_circle(1, 32)
    with pytest.raises(InvalidArgument):
        optimize.minimize_potential(g, square(1.0), 1.0, constant_potential(g, 2.0))
    with pytest.raises(InvalidArgument):
        optimize.minimize_potential(g, square(1.0), 1.0, constant_potential(g, 1.0),
                                    rule="newton")


@settings(max_examples=20)
@given(st.integers(0, 10**6), st.sampled_from([square(1.5), exponential(0.2), identity(1.0)]))
def test_hellmann_feynman_matches_differences(seed, F):
    g = make_circle(1, 32)
    rng = np.random.default_rng(seed)
    samples = project_to_constraint(g, F.kappa0 + random_band_limited(g, rng, 3), F.kappa0).samples
    _, grad, _ = optimize.eigenvalue_gradient(g, samples, F, 2.0)
    d = random_band_limited(g, rng, 5)
    d /= np.sqrt(g.inner(d, d))
    fd = optimize.finite_difference_derivative(g, samples, d, F, 2.0)
    assert abs(fd - g.inner(grad, d)) <= 1e-5 * max(abs(fd), 1e-8)
