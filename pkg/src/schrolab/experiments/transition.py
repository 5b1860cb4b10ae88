"""Sign of lambda0(kappa0 + eps q) - lambda0(kappa0) across the coupling alpha.

The fitted second-order coefficient

    l2_fit(alpha) = [lambda0(+eps) + lambda0(-eps) - 2 lambda0(0)] / (2 eps^2)

changes sign at the critical coupling; its root is located by bisection.
"""

from __future__ import annotations

import numpy as np

from ..eigensolve import eigh
from ..errors import InvalidArgument, UndefinedCriticalCoupling
from ..geometry import ManifoldGrid, laplace_eigenbasis
from ..operator import assemble
from ..perturbation import critical_alpha, ell2, first_nonzero_eigenvalue
from ..potentials import CouplingFunction, constant_potential, project_to_constraint
from .common import SweepResult

COLUMNS = ("alpha", "epsilon", "lambda0_constant", "lambda0_plus", "lambda0_minus",
           "difference", "sign", "ell2_fit", "ell2_theory")


def _lambda0(grid, kappa, F, alpha, disc):
    r = eigh(assemble(grid, kappa, F, alpha, disc), 1)
    return r.values[0], r.residuals[0]


def ell2_fit(grid, F, alpha, q, eps, discretization="fourier"):
    kappa0 = F.kappa0
    lc, _ = _lambda0(grid, constant_potential(grid, kappa0), F, alpha, discretization)
    lp, _ = _lambda0(grid, project_to_constraint(grid, kappa0 + eps * q, kappa0), F, alpha,
                     discretization)
    lm, _ = _lambda0(grid, project_to_constraint(grid, kappa0 - eps * q, kappa0), F, alpha,
                     discretization)
    return (lp + lm - 2.0 * lc) / (2.0 * eps * eps)


def transition_sweep(grid: ManifoldGrid, F: CouplingFunction, alphas, eps_list, q=None,
                     estimate_eps: float | None = None, discretization: str = "fourier",
                     bisect_tol: float = 1e-7) -> SweepResult:
    if grid.dim != 1:
        raise InvalidArgument("transition_sweep runs on a circle")
    alphas = np.asarray(alphas, dtype=float)
    eps_list = np.asarray(eps_list, dtype=float)
    if alphas.size == 0 or eps_list.size == 0 or np.any(eps_list <= 0):
        raise InvalidArgument("need a nonempty alpha list and positive eps values")
    if q is None:
        q = laplace_eigenbasis(grid, 2)[1].samples
    q = np.asarray(q, dtype=float)
    if abs(grid.mean(q)) > 1e-10 * max(1.0, np.max(np.abs(q))):
        raise InvalidArgument("q must have zero mean")
    kappa0 = F.kappa0

    rows, lam_rows, res_rows, fits = [], [], [], []
    for a in alphas:
        lc, rc = _lambda0(grid, constant_potential(grid, kappa0), F, a, discretization)
        lam_row, res_row, fit_row = [lc], [rc], []
        theory = ell2(grid, q, F, a).value if a != 0 else 0.0
        for e in eps_list:
            lp, rp = _lambda0(grid, project_to_constraint(grid, kappa0 + e * q, kappa0),
                              F, a, discretization)
            lm, rm = _lambda0(grid, project_to_constraint(grid, kappa0 - e * q, kappa0),
                              F, a, discretization)
            fit = (lp + lm - 2.0 * lc) / (2.0 * e * e)
            diff = lp - lc
            rows.append((a, e, lc, lp, lm, diff, int(np.sign(diff)), fit, theory))
            lam_row += [lp, lm]
            res_row += [rp, rm]
            fit_row.append(fit)
        lam_rows.append(lam_row)
        res_rows.append(res_row)
        fits.append(fit_row)
    fits = np.array(fits)

    mu1 = first_nonzero_eigenvalue(grid)
    try:
        a_star = critical_alpha(F, mu1)
    except UndefinedCriticalCoupling:
        a_star = None

    e_est = float(np.min(eps_list) if estimate_eps is None else estimate_eps)
    col = int(np.argmin(np.abs(eps_list - e_est)))
    estimate = None
    if np.isclose(eps_list[col], e_est):
        fit_col = fits[:, col]
    else:
        fit_col = np.array([ell2_fit(grid, F, a, q, e_est, discretization) for a in alphas])
    order = np.argsort(alphas)
    for i, k in zip(order[:-1], order[1:]):
        if fit_col[i] == 0.0:
            estimate = float(alphas[i])
            break
        if fit_col[i] * fit_col[k] < 0:
            lo, hi, flo = alphas[i], alphas[k], fit_col[i]
            while hi - lo > bisect_tol:
                mid = 0.5 * (lo + hi)
                fmid = ell2_fit(grid, F, mid, q, e_est, discretization)
                if fmid * flo > 0:
                    lo, flo = mid, fmid
                else:
                    hi = mid
            estimate = 0.5 * (lo + hi)
            break

    reference = {"alpha_star": a_star, "mu1": mu1, "mu1_quarter": mu1 / 4}
    derived = {
        "alpha_c_estimate": estimate,
        "estimate_eps": e_est,
        "relative_error": (abs(estimate - a_star) / abs(a_star)
                           if estimate is not None and a_star else None),
        "ell2_fit": fits,
    }
    return SweepResult("alpha", alphas, np.array(lam_rows), np.array(res_rows), derived,
                       reference, COLUMNS, rows,
                       {"N": grid.shape[0], "L": grid.lengths[0],
                        "discretization": discretization, "coupling": F.name,
                        "kappa0": kappa0})
