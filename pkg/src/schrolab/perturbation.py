"""Second-order perturbation of the principal eigenvalue about a constant potential.

For kappa = kappa0 + eps*q with q of zero mean,

    lambda0(eps) = l0 + l1*eps + l2*eps**2 + O(eps**3),

with l0 = alpha*f0, l1 = 0, and l2 computed from the corrector phi1 solving
-Lap(phi1) = -alpha*f1*q.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .eigensolve import eigh, poisson_solve
from .errors import InvalidArgument, UndefinedCriticalCoupling
from .geometry import ManifoldGrid
from .operator import assemble, gradient, laplacian, laplacian_matrix
from .potentials import CouplingFunction, project_to_constraint

F1_TOL = 1e-12


def first_nonzero_eigenvalue(grid: ManifoldGrid) -> float:
    mu = grid.mode_eigenvalues.ravel()
    return float(np.min(mu[mu > 0]))


def critical_alpha(F: CouplingFunction, mu1: float) -> float:
    """alpha* = mu1 F''(kappa0) / (2 F'(kappa0)^2).

    Raises UndefinedCriticalCoupling when F'(kappa0) vanishes: at an extremum
    of F the constant potential is a local extremizer for every alpha > 0.
    """
    f1 = F.f1
    if abs(f1) <= F1_TOL:
        raise UndefinedCriticalCoupling(f"F'({F.kappa0}) = {f1!r} vanishes")
    return mu1 * 2.0 * F.f2 / (2.0 * f1 * f1)


def _zero_mean(grid, q, name="q"):
    q = np.asarray(q, dtype=float)
    if q.shape != (grid.n_nodes,):
        raise InvalidArgument(f"{name} does not match the grid")
    scale = max(1.0, float(np.max(np.abs(q))))
    if abs(grid.mean(q)) > 1e-10 * scale:
        raise InvalidArgument(f"{name} must have zero mean")
    return q


def solve_phi1(grid: ManifoldGrid, q, F: CouplingFunction, alpha: float) -> np.ndarray:
    """Zero-mean corrector: -Lap(phi1) = -alpha f1 q."""
    q = _zero_mean(grid, q)
    return poisson_solve(grid, -alpha * F.f1 * q)


class Ell2(NamedTuple):
    value: float
    gradient_form: float
    spectral_form: float


def ell2(grid: ManifoldGrid, q, F: CouplingFunction, alpha: float) -> Ell2:
    """Second-order coefficient, in three algebraically equivalent forms.

    ``value``          (alpha f2/|M|) int q^2 + (alpha f1/|M|) int q phi1
    ``gradient_form``  (f2/(alpha f1^2 |M|)) int (Lap phi1)^2 - (1/|M|) int |grad phi1|^2
                       (nan when alpha f1 = 0)
    ``spectral_form``  (alpha/|M|) sum_j c_j^2 (f2 - alpha f1^2/mu_j),  q = sum c_j v_j
    """
    q = _zero_mean(grid, q)
    if not np.any(q):
        raise InvalidArgument("q must not vanish identically")
    M = grid.measure
    f1, f2 = F.f1, F.f2
    phi1 = solve_phi1(grid, q, F, alpha)
    value = alpha * f2 / M * grid.integrate(q * q) + alpha * f1 / M * grid.integrate(q * phi1)

    if alpha * f1 != 0.0:
        lap = laplacian(grid, phi1)
        grad_sq = np.sum(gradient(grid, phi1) ** 2, axis=0)
        grad_form = (f2 / (alpha * f1 * f1 * M) * grid.integrate(lap * lap)
                     - grid.integrate(grad_sq) / M)
    else:
        grad_form = float("nan")

    c = grid.to_modes(q).ravel()
    mu = grid.mode_eigenvalues.ravel()
    nz = mu > 0
    spectral = alpha / M * float(np.sum(c[nz] ** 2 * (f2 - alpha * f1 * f1 / mu[nz])))
    return Ell2(float(value), float(grad_form), spectral)


@dataclass(frozen=True, eq=False)
class PerturbationReport:
    ell0: float
    ell1: float
    ell2: float
    alpha_star: float | None
    phi1: np.ndarray
    q: np.ndarray
    diagnostics: dict = field(default_factory=dict)


def perturbation_report(grid: ManifoldGrid, q, F: CouplingFunction,
                        alpha: float) -> PerturbationReport:
    q = _zero_mean(grid, q)
    M = grid.measure
    forms = ell2(grid, q, F, alpha)
    phi1 = solve_phi1(grid, q, F, alpha)
    mu1 = first_nonzero_eigenvalue(grid)
    try:
        a_star = critical_alpha(F, mu1)
    except UndefinedCriticalCoupling:
        a_star = None
    diagnostics = {
        "ell2_gradient_form": forms.gradient_form,
        "ell2_spectral_form": forms.spectral_form,
        "phi1_mean": grid.mean(phi1),
        "q_mean": grid.mean(q),
        "mu1": mu1,
        "f0": F.f0, "f1": F.f1, "f2": F.f2,
    }
    return PerturbationReport(
        ell0=alpha * F.f0,
        ell1=alpha * F.f1 / M * grid.integrate(q),
        ell2=forms.value,
        alpha_star=a_star,
        phi1=phi1,
        q=q,
        diagnostics=diagnostics,
    )


@dataclass(frozen=True, eq=False)
class ExpansionCheck:
    eps: np.ndarray
    lambda0: np.ndarray
    predicted: np.ndarray
    remainder: np.ndarray
    order: float
    ell0: float
    ell2: float


def fitted_order(x, y) -> float:
    """Least-squares slope of log|y| against log x."""
    y = np.abs(np.asarray(y, dtype=float))
    if np.any(y == 0):
        return float("inf")
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


def verify_expansion(grid: ManifoldGrid, q, F: CouplingFunction, alpha: float, eps_list,
                     discretization: str = "fourier") -> ExpansionCheck:
    """Compare full eigensolves against l0 + l2 eps^2 and fit the remainder order."""
    q = _zero_mean(grid, q)
    eps = np.asarray(eps_list, dtype=float)
    if eps.size < 2 or np.any(eps <= 0) or np.any(np.diff(eps) >= 0):
        raise InvalidArgument("eps list must be positive and strictly decreasing")
    if eps[0] * np.max(np.abs(q)) > 0.1 * abs(F.kappa0):
        raise InvalidArgument("eps * max|q| exceeds 0.1 |kappa0|; outside the perturbative range")
    l0 = alpha * F.f0
    l2 = ell2(grid, q, F, alpha).value
    lam = np.empty(eps.size)
    for i, e in enumerate(eps):
        kappa = project_to_constraint(grid, F.kappa0 + e * q, F.kappa0)
        lam[i] = eigh(assemble(grid, kappa, F, alpha, discretization), 1).values[0]
    pred = l0 + l2 * eps**2
    rem = lam - pred
    return ExpansionCheck(eps, lam, pred, rem, fitted_order(eps, rem), l0, l2)


def lemma_gamma(alpha: float, mus) -> np.ndarray:
    """Eigenvalues (alpha mu - 1) mu of  alpha Lap^2 u + Lap u = gamma u."""
    if not alpha > 0:
        raise InvalidArgument("alpha must be positive")
    mus = np.asarray(mus, dtype=float)
    return (alpha * mus - 1.0) * mus


def auxiliary_spectrum(grid: ManifoldGrid, alpha: float) -> np.ndarray:
    """Sorted eigenvalues of the assembled matrix alpha D^2 - D, D = -Lap (fourier)."""
    D = laplacian_matrix(grid, "fourier")
    A = alpha * D @ D - D
    return eigh(0.5 * (A + A.T)).values


def functional_I(grid: ManifoldGrid, u, alpha: float) -> float:
    """int alpha (Lap u)^2 - |grad u|^2 with spectral derivatives."""
    u = np.asarray(u, dtype=float)
    lap = laplacian(grid, u)
    grad_sq = np.sum(gradient(grid, u) ** 2, axis=0)
    return grid.integrate(alpha * lap * lap - grad_sq)

