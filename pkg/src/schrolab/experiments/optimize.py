"""Projected gradient descent of an eigenvalue over the fixed-mean potentials."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..eigensolve import DEGENERACY_TOL, eigh
from ..errors import DegeneracyStop, InvalidArgument, LineSearchFailure
from ..geometry import ManifoldGrid
from ..operator import assemble
from ..potentials import CouplingFunction, PotentialField, project_to_constraint

COLUMNS = ("iteration", "lambda", "gradient_norm", "step", "mean_kappa", "fd_relative_error")


def _solve(grid, samples, F, alpha, j, disc):
    kappa = PotentialField(grid, samples, F.kappa0)
    return eigh(assemble(grid, kappa, F, alpha, disc), min(j + 2, grid.n_nodes))


def eigenvalue_gradient(grid: ManifoldGrid, samples, F: CouplingFunction, alpha: float,
                        j: int = 0, discretization: str = "fourier", result=None):
    """Hellmann-Feynman derivative alpha F'(kappa) u_j^2 (u_j quadrature-normalized).

    Returns ``(lambda_j, gradient, eigen_result)``; the gradient is the L2
    functional derivative, so a perturbation h changes lambda_j by
    ``grid.inner(gradient, h)`` to first order.
    """
    r = result if result is not None else _solve(grid, samples, F, alpha, j, discretization)
    for group in r.multiplets():
        if j in group and len(group) > 1:
            raise DegeneracyStop(f"eigenvalue {j} is degenerate", {"group": group,
                                                                    "values": r.values.tolist()})
    # a neighbour beyond the computed range cannot be checked; count = j + 2 covers j + 1
    u = r.vectors[:, j]
    return r.values[j], alpha * F.dF(np.asarray(samples)) * u * u, r


def finite_difference_derivative(grid, samples, direction, F, alpha, j=0,
                                 discretization="fourier", step=None) -> float:
    """Central difference of lambda_j along ``direction``."""
    samples = np.asarray(samples, dtype=float)
    if step is None:
        step = 1e-4 * max(1.0, float(np.max(np.abs(samples)))) / max(
            1e-300, float(np.max(np.abs(direction))))
    plus = _solve(grid, samples + step * direction, F, alpha, j, discretization).values[j]
    minus = _solve(grid, samples - step * direction, F, alpha, j, discretization).values[j]
    return (plus - minus) / (2.0 * step)


def _directional_check(grid, samples, g, F, alpha, j, disc):
    d = g / np.sqrt(grid.inner(g, g))
    d = d - grid.mean(d)
    hf = grid.inner(g, d)
    fd = finite_difference_derivative(grid, samples, d, F, alpha, j, disc)
    return abs(fd - hf) / max(abs(hf), 1e-300)


@dataclass(frozen=True, eq=False)
class Trajectory:
    iterates: list
    lambdas: np.ndarray
    gradient_norms: np.ndarray
    steps: np.ndarray
    fd_errors: np.ndarray
    status: str
    metadata: dict = field(default_factory=dict)

    @property
    def rows(self):
        return [(i, self.lambdas[i], self.gradient_norms[i], self.steps[i],
                 float(np.mean(self.iterates[i])), self.fd_errors[i])
                for i in range(self.lambdas.size)]


def minimize_potential(grid: ManifoldGrid, F: CouplingFunction, alpha: float,
                       start: PotentialField, j: int = 0, steps: int = 50,
                       step_size: float = 1e-3, rule: str = "armijo", gtol: float = 1e-10,
                       check_gradient: bool = True,
                       discretization: str = "fourier") -> Trajectory:
    """Descend lambda_j along the mean-free Hellmann-Feynman gradient.

    ``rule="armijo"`` backtracks (halving) until the sufficient-decrease
    condition holds and doubles the trial step after each success;
    ``rule="fixed"`` takes ``step_size`` and fails if that would increase lambda_j.
    Every iterate is projected back onto the mean constraint.
    """
    if start.grid != grid or abs(start.kappa0 - F.kappa0) > 1e-12 * max(1, abs(F.kappa0)):
        raise InvalidArgument("start must lie in the constraint set of this grid and kappa0")
    if rule not in ("armijo", "fixed"):
        raise InvalidArgument(f"unknown step rule {rule!r}")
    kappa0 = F.kappa0
    x = start.samples.copy()
    lam, g, r = eigenvalue_gradient(grid, x, F, alpha, j, discretization)
    iterates, lams, gnorms, taken, fd_errs = [x.copy()], [lam], [], [0.0], []
    s = step_size
    status = "max-steps"
    partial = lambda: {"iterates": iterates, "lambdas": lams}  # noqa: E731

    for _ in range(steps):
        g = g - grid.mean(g)
        gn = np.sqrt(grid.inner(g, g))
        gnorms.append(gn)
        fd_errs.append(_directional_check(grid, x, g, F, alpha, j, discretization)
                       if check_gradient and gn > gtol else float("nan"))
        if gn <= gtol:
            status = "converged"
            break
        trial = s
        for _ in range(60):
            y = project_to_constraint(grid, x - trial * g, kappa0).samples
            try:
                lam_y, g_y, r_y = eigenvalue_gradient(grid, y, F, alpha, j, discretization)
            except DegeneracyStop as exc:
                exc.diagnostics.update(partial())
                raise
            if lam_y <= lam - 1e-4 * trial * gn * gn:
                break
            if rule == "fixed":
                raise LineSearchFailure("fixed step does not decrease the eigenvalue",
                                        dict(partial(), step=trial))
            trial *= 0.5
        else:
            if lam_y <= lam + 1e-12:
                status = "stalled"
                break
            raise LineSearchFailure("backtracking exhausted", dict(partial(), step=trial))
        x, lam, g = y, lam_y, g_y
        iterates.append(x.copy())
        lams.append(lam)
        taken.append(trial)
        if rule == "armijo":
            s = 2.0 * trial
    else:
        g = g - grid.mean(g)
        gnorms.append(np.sqrt(grid.inner(g, g)))
        fd_errs.append(float("nan"))

    n = len(lams)
    gnorms = (gnorms + [float("nan")] * n)[:n]
    fd_errs = (fd_errs + [float("nan")] * n)[:n]
    return Trajectory(iterates, np.array(lams), np.array(gnorms), np.array(taken),
                      np.array(fd_errs), status,
                      {"alpha": alpha, "j": j, "rule": rule, "discretization": discretization,
                       "constant_lambda": alpha * F.f0 if j == 0 else None})
