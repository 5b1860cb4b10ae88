"""Ball-concentrated potentials on the flat torus and the eigenvalue collapse."""

from __future__ import annotations

import numpy as np

from ..eigensolve import eigh
from ..errors import InvalidArgument, NumericalFailure
from ..geometry import ManifoldGrid, geodesic_ball_indicator, laplace_eigenbasis
from ..operator import assemble
from ..perturbation import first_nonzero_eigenvalue
from ..potentials import CouplingFunction, ball_potential
from .common import SweepResult, richardson_limit

COLUMNS = ("delta", "j", "lambda", "residual", "limit", "excision_bound")


def assert_minimum_at_zero(F: CouplingFunction, span: float) -> None:
    """Check numerically that F(0) <= F(x) on [-span, span]."""
    x = np.linspace(-span, span, 4001)
    if np.any(F(x) < float(F(0.0)) - 1e-12 * max(1.0, abs(float(F(0.0))))):
        raise InvalidArgument(f"F(0) is not the minimum of {F.name} on [-{span}, {span}]")


def excision_cutoff(grid: ManifoldGrid, delta: float, center=None) -> np.ndarray:
    """Zero on the ball, log ramp out to radius sqrt(delta), one beyond.

    The logarithmic profile keeps the Dirichlet energy of the cutoff of order
    1/log(1/delta) in two dimensions.
    """
    if center is None:
        center = np.zeros(grid.dim)
    mask, _ = geodesic_ball_indicator(grid, center, delta)
    rho = grid.periodic_distance(center)
    R = min(np.sqrt(delta), 0.45 * min(grid.lengths))
    R = max(R, 2.0 * delta)
    eta = np.clip(np.log(np.maximum(rho, delta) / delta) / np.log(R / delta), 0.0, 1.0)
    eta[mask] = 0.0
    return eta


def excision_bounds(op, grid: ManifoldGrid, delta: float, count: int, center=None):
    """Rayleigh-Ritz values of H on the span of cut-off Laplace eigenfunctions.

    By min-max these bound lambda_0 .. lambda_{count-1} from above.
    """
    eta = excision_cutoff(grid, delta, center)
    Psi = np.stack([eta * p.samples for p in laplace_eigenbasis(grid, count)], axis=1)
    G = grid.weight * Psi.T @ Psi
    K = grid.weight * Psi.T @ (op.matrix @ Psi)
    C = np.linalg.cholesky(G)
    Ci = np.linalg.inv(C)
    A = Ci @ K @ Ci.T
    return eigh(0.5 * (A + A.T)).values


def torus_collapse(grid: ManifoldGrid, F: CouplingFunction, alpha: float, deltas,
                   count: int = 2, smooth: bool = True, center=None,
                   discretization: str = "fourier") -> SweepResult:
    if grid.dim != 2:
        raise InvalidArgument("torus_collapse runs on a torus")
    if not alpha > 0:
        raise InvalidArgument("alpha must be positive")
    deltas = np.asarray(deltas, dtype=float)
    if deltas.size == 0:
        raise InvalidArgument("empty delta list")
    assert_minimum_at_zero(F, 10.0 * (1.0 + abs(F.kappa0)))
    F0 = float(F(0.0))
    mus = np.array([p.eigenvalue for p in laplace_eigenbasis(grid, count)])
    limits = mus + alpha * F0

    lam, res, rows, bounds = [], [], [], []
    for d in deltas:
        op = assemble(grid, ball_potential(grid, F.kappa0, d, center, smooth), F, alpha,
                      discretization)
        r = eigh(op, count)
        b = excision_bounds(op, grid, d, count, center)
        lam.append(r.values)
        res.append(r.residuals)
        bounds.append(b)
        for j in range(count):
            rows.append((d, j, r.values[j], r.residuals[j], limits[j], b[j]))
    lam = np.array(lam)
    lam0 = lam[:, 0]
    order = np.argsort(deltas)[::-1]
    derived = {
        "lambda0": lam0,
        "excision_bounds": np.array(bounds),
        "lambda0_monotone_decreasing": bool(np.all(np.diff(lam0[order]) < 0)),
        "finest_lambda0_over_mu1": float(lam0[order[-1]] / first_nonzero_eigenvalue(grid)),
    }
    if deltas.size >= 3:
        try:
            derived["extrapolated"], derived["fitted_order"] = richardson_limit(deltas, lam0)
        except NumericalFailure:  # a non-monotone sequence has no fitted rate
            derived["extrapolated"] = derived["fitted_order"] = None
    return SweepResult(
        "delta", deltas, lam, np.array(res), derived,
        {"mu": mus.tolist(), "limits": limits.tolist(), "F0": F0,
         "constant_lambda0": alpha * F.f0},
        COLUMNS, rows,
        {"shape": list(grid.shape), "lengths": list(grid.lengths), "alpha": alpha,
         "kappa0": F.kappa0, "smooth": smooth, "discretization": discretization,
         "coupling": F.name})
