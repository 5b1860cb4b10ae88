"""Concentrating the mean on a shrinking interval of the circle."""

from __future__ import annotations

import numpy as np

from ..eigensolve import eigh
from ..errors import InvalidArgument, UndefinedCriticalCoupling
from ..geometry import ManifoldGrid
from ..operator import assemble, rayleigh_quotient
from ..perturbation import critical_alpha, first_nonzero_eigenvalue
from ..potentials import CouplingFunction, spike_potential_1d
from .common import SweepResult, richardson_limit

COLUMNS = ("delta", "lambda0", "residual", "excess_over_quarter_mu1",
           "test_function_discrete", "test_function_exact")


def half_sine(grid: ManifoldGrid, start: float = 0.0) -> np.ndarray:
    """sqrt(2/L) sin(pi s / L), measured from ``start``: unit norm, zero at ``start``."""
    (L,) = grid.lengths
    s = (grid.axes[0] - start) % L
    return np.sqrt(2.0 / L) * np.sin(np.pi * s / L)


def test_function_energy(F: CouplingFunction, alpha: float, delta: float, L: float) -> float:
    """Closed form of the quadratic form at the half sine for the hard spike on (0, delta).

    pi^2/L^2 + alpha F(kappa0 L/delta) S + alpha F(0) (1 - S),
    S = (2/L) int_0^delta sin^2(pi s/L) ds.
    """
    S = (2.0 / L) * (delta / 2.0 - L / (4.0 * np.pi) * np.sin(2.0 * np.pi * delta / L))
    plateau = F.kappa0 * L / delta
    return (np.pi / L) ** 2 + alpha * float(F(plateau)) * S + alpha * float(F(0.0)) * (1.0 - S)


test_function_energy.__test__ = False  # not a pytest test despite the name


def spike_sweep(grid: ManifoldGrid, F: CouplingFunction, alpha: float, deltas,
                smooth: bool = True, discretization: str = "fourier",
                count: int = 1) -> SweepResult:
    """lambda0 of the spike potentials for each delta; no restriction on alpha."""
    if grid.dim != 1:
        raise InvalidArgument("spike sweeps run on a circle")
    deltas = np.asarray(deltas, dtype=float)
    if deltas.size == 0:
        raise InvalidArgument("empty delta list")
    (L,) = grid.lengths
    mu1 = first_nonzero_eigenvalue(grid)
    u = half_sine(grid)
    lam, res, rows = [], [], []
    for d in deltas:
        op = assemble(grid, spike_potential_1d(grid, F.kappa0, d, smooth), F, alpha,
                      discretization)
        r = eigh(op, count)
        lam.append(r.values)
        res.append(r.residuals)
        rows.append((d, r.values[0], r.residuals[0], r.values[0] - mu1 / 4,
                     rayleigh_quotient(op, u), test_function_energy(F, alpha, d, L)))
    lam = np.array(lam)
    return SweepResult(
        "delta", deltas, lam, np.array(res),
        {"lambda0": lam[:, 0]},
        {"mu1": mu1, "mu1_quarter": mu1 / 4, "constant_lambda0": alpha * F.f0},
        COLUMNS, rows,
        {"N": grid.shape[0], "L": L, "alpha": alpha, "kappa0": F.kappa0,
         "smooth": smooth, "discretization": discretization, "coupling": F.name})


def spike_limit(grid: ManifoldGrid, F: CouplingFunction, alpha: float, deltas,
                smooth: bool = True, discretization: str = "fourier") -> SweepResult:
    """Spike sweep above the critical coupling, extrapolated to delta -> 0."""
    deltas = np.asarray(deltas, dtype=float)
    if deltas.size < 3 or np.any(np.diff(deltas) >= 0):
        raise InvalidArgument("delta list must be strictly decreasing with >= 3 entries")
    mu1 = first_nonzero_eigenvalue(grid)
    try:
        a_c = critical_alpha(F, mu1)
    except UndefinedCriticalCoupling:
        a_c = None
    if a_c is None or not alpha > a_c:
        raise InvalidArgument(f"alpha={alpha!r} must exceed the critical coupling {a_c!r}")
    sweep = spike_sweep(grid, F, alpha, deltas, smooth, discretization)
    limit, order = richardson_limit(deltas, sweep.derived["lambda0"])
    derived = dict(sweep.derived)
    derived.update({
        "extrapolated_lambda0": limit,
        "fitted_order": order,
        "relative_error": abs(limit - mu1 / 4) / (mu1 / 4),
        "all_above_quarter_mu1": bool(np.all(sweep.derived["lambda0"] > mu1 / 4)),
    })
    reference = dict(sweep.reference, alpha_c=a_c)
    return SweepResult(sweep.parameter, sweep.values, sweep.eigenvalues, sweep.residuals,
                       derived, reference, sweep.columns, sweep.rows, sweep.metadata)
