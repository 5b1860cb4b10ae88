"""Dense symmetric eigensolver and the eigenbasis Poisson inverse.

The default path is Householder reduction to tridiagonal form, implicit-shift
QL for the eigenvalues, inverse iteration on the tridiagonal matrix for the
requested eigenvectors, and back-transformation.  A cyclic Jacobi solver is
kept as an independent second route.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import InvalidArgument, NumericalFailure
from .geometry import ManifoldGrid
from .operator import SpectralOperator, apply

MAX_ITER = 50
DEGENERACY_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class EigenResult:
    """Lowest eigenpairs, ascending.

    ``vectors[:, j]`` is normalized in the quadrature inner product
    (``sum w u^2 = 1``) and signed so its largest-magnitude entry is positive.
    """

    values: np.ndarray
    vectors: np.ndarray
    residuals: np.ndarray
    diagnostics: dict = field(default_factory=dict)

    def __len__(self):
        return self.values.size

    def multiplets(self, tol: float = DEGENERACY_TOL) -> list:
        """Index groups of eigenvalues within ``tol * (1 + |lambda|)`` of a neighbour."""
        groups = [[0]] if self.values.size else []
        for j in range(1, self.values.size):
            prev = self.values[j - 1]
            if self.values[j] - prev <= tol * (1 + abs(prev)):
                groups[-1].append(j)
            else:
                groups.append([j])
        return groups


def tridiagonalize(a: np.ndarray, block: int = 32):
    """Householder reduction ``a = Q T Q^T``.

    Returns the diagonal and sub-diagonal of T plus the unit reflector vectors
    (reflector k acts on rows k+1: and is stored in ``refl[k, k+1:]``).
    Reflectors are generated a panel of ``block`` columns at a time; the
    trailing matrix receives the panel's accumulated rank-2 update at once.
    """
    A = np.array(a, dtype=float)
    n = A.shape[0]
    refl = np.zeros((max(n - 2, 0), n))
    diag = np.zeros(n)
    sub = np.zeros(max(n - 1, 0))
    k0 = 0
    while k0 < n - 2:
        nb = min(block, n - 2 - k0)
        V = np.zeros((n, nb))
        W = np.zeros((n, nb))
        for i in range(nb):
            k = k0 + i
            col = A[k:, k] - V[k:, :i] @ W[k, :i] - W[k:, :i] @ V[k, :i]
            diag[k] = col[0]
            x = col[1:]
            sigma = np.linalg.norm(x)
            if sigma == 0.0:
                continue
            alpha = -sigma if x[0] >= 0 else sigma
            v = x.copy()
            v[0] -= alpha
            v /= np.linalg.norm(v)
            Vt, Wt = V[k + 1 :, :i], W[k + 1 :, :i]
            # p = 2 A_eff v, with A_eff the matrix after this panel's earlier reflectors
            p = 2.0 * (A[k + 1 :, k + 1 :] @ v - Vt @ (Wt.T @ v) - Wt @ (Vt.T @ v))
            q = p - (v @ p) * v
            V[k + 1 :, i] = v
            W[k + 1 :, i] = q
            refl[k, k + 1 :] = v
            sub[k] = alpha
        t = k0 + nb
        A[t:, t:] -= V[t:] @ W[t:].T + W[t:] @ V[t:].T
        k0 = t
    diag[n - 2 :] = np.diag(A)[n - 2 :]
    if n >= 2:
        sub[n - 2] = A[n - 1, n - 2]
    return diag, sub, refl


def _back_transform(refl: np.ndarray, Y: np.ndarray) -> np.ndarray:
    Z = np.array(Y, dtype=float)
    for k in range(refl.shape[0] - 1, -1, -1):
        v = refl[k, k + 1 :]
        if not v.any():
            continue
        Z[k + 1 :] -= 2.0 * np.outer(v, v @ Z[k + 1 :])
    return Z


def jacobi_eigh(a: np.ndarray, max_sweeps: int = MAX_ITER):
    """Cyclic Jacobi rotations; returns all eigenpairs, ascending."""
    A = np.array(a, dtype=float)
    n = A.shape[0]
    V = np.eye(n)
    scale = max(np.linalg.norm(A), 1e-300)
    for sweep in range(max_sweeps):
        off = np.sqrt(np.sum(np.tril(A, -1) ** 2))
        if off <= 1e-15 * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if abs(apq) <= 1e-18 * (abs(A[p, p]) + abs(A[q, q])) or apq == 0.0:
                    A[p, q] = A[q, p] = 0.0
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                elif theta:
                    t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                else:
                    t = 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                rp, rq = A[p].copy(), A[q].copy()
                A[p], A[q] = c * rp - s * rq, s * rp + c * rq
                cp, cq = A[:, p].copy(), A[:, q].copy()
                A[:, p], A[:, q] = c * cp - s * cq, s * cp + c * cq
                vp, vq = V[:, p].copy(), V[:, q].copy()
                V[:, p], V[:, q] = c * vp - s * vq, s * vp + c * vq
    else:
        raise NumericalFailure("Jacobi iteration did not converge",
                               {"sweeps": max_sweeps, "off_norm": float(off)})
    w = np.diag(A).copy()
    order = np.argsort(w, kind="stable")
    return w[order], V[:, order], sweep


def _fix_signs(Z: np.ndarray) -> np.ndarray:
    idx = np.argmax(np.abs(Z), axis=0)
    signs = np.sign(Z[idx, np.arange(Z.shape[1])])
    signs[signs == 0] = 1.0
    return Z * signs


def eigh(op, count: int | None = None, method: str = "ql") -> EigenResult:
    """Lowest ``count`` eigenpairs of a SpectralOperator (or a bare symmetric array).

    ``method`` is ``"ql"`` (Householder + implicit QL + inverse iteration) or
    ``"jacobi"``.
    """
    if isinstance(op, SpectralOperator):
        H, weight = op.matrix, op.grid.weight
    else:
        H, weight = np.asarray(op, dtype=float), 1.0
        if H.ndim != 2 or H.shape[0] != H.shape[1]:
            raise InvalidArgument("matrix must be square")
    n = H.shape[0]
    if count is None:
        count = n
    if int(count) != count or not 1 <= count <= n:
        raise InvalidArgument(f"count must lie in [1, {n}], got {count!r}")
    count = int(count)

    if method == "jacobi":
        values, Z, sweeps = jacobi_eigh(H)
        values, Z = values[:count], Z[:, :count]
        diag = {"method": "jacobi", "sweeps": int(sweeps)}
    elif method == "ql":
        if n == 1:
            values, Z = H[0, :1].copy(), np.ones((1, 1))
            diag = {"method": "ql", "ql_iterations": 0}
        else:
            d, e, refl = tridiagonalize(H)
            all_values, its, failed = _kernels.tql_values(d, e, MAX_ITER)
            if failed >= 0:
                raise NumericalFailure("QL iteration did not converge",
                                       {"row": int(failed), "iterations": int(its)})
            all_values = np.sort(all_values)
            values = all_values[:count]
            rng = np.random.default_rng(12345)
            start = rng.uniform(-1.0, 1.0, size=(n, count))
            Y, inv_its = _kernels.inverse_iteration(d, e, values, start, 5)
            Z = _back_transform(refl, Y)
            diag = {"method": "ql", "ql_iterations": int(its),
                    "inverse_iterations": int(inv_its.sum())}
    else:
        raise InvalidArgument(f"unknown eigensolver method {method!r}")

    Z = _fix_signs(Z / np.linalg.norm(Z, axis=0))
    HZ = H @ Z
    # Rayleigh quotients of the computed vectors are accurate to second order
    raw = values
    values = np.einsum("ij,ij->j", Z, HZ)
    order = np.argsort(values, kind="stable")
    values, Z, HZ = values[order], Z[:, order], HZ[:, order]
    diag["raw_values"] = raw.tolist()
    R = HZ - Z * values
    Z = Z / np.sqrt(weight)
    residuals = np.linalg.norm(R, axis=0)
    return EigenResult(values.copy(), Z, residuals, diag)


def residual(op: SpectralOperator, lam: float, u) -> float:
    """||Hu - lam u|| / ||u|| in the quadrature norm."""
    u = np.asarray(u, dtype=float)
    nu = np.sqrt(op.grid.inner(u, u))
    if nu == 0.0:
        raise InvalidArgument("residual of the zero vector")
    r = apply(op, u) - lam * u
    return float(np.sqrt(op.grid.inner(r, r)) / nu)


def poisson_solve(grid: ManifoldGrid, rhs) -> np.ndarray:
    """Zero-mean u with -Laplacian u = rhs, by division in the Laplace eigenbasis."""
    rhs = np.asarray(rhs, dtype=float)
    if rhs.shape != (grid.n_nodes,):
        raise InvalidArgument("rhs does not match the grid")
    scale = max(1.0, float(np.max(np.abs(rhs), initial=0.0)))
    if abs(grid.mean(rhs)) > 1e-10 * scale:
        raise InvalidArgument("rhs must have zero mean on a closed manifold")
    a = grid.to_modes(rhs)
    mu = grid.mode_eigenvalues
    out = np.zeros_like(a)
    nz = mu > 0
    out[nz] = a[nz] / mu[nz]
    return grid.from_modes(out)
