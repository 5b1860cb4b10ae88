"""Scalar loops of the tridiagonal eigensolver, compiled with numba."""

import numpy as np
from numba import njit

EPS = np.finfo(np.float64).eps


@njit(cache=True)
def tql_values(diag, sub, max_iter):
    """Eigenvalues of a symmetric tridiagonal matrix by implicit-shift QL.

    ``sub[i]`` couples rows i and i+1.  Returns ``(values, iterations, failed)``
    where ``failed`` is the row index that exhausted ``max_iter`` (or -1).
    """
    n = diag.size
    d = diag.copy()
    e = np.zeros(n)
    e[: n - 1] = sub
    total = 0
    for l in range(n):
        it = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= EPS * dd:
                    break
                m += 1
            if m == l:
                break
            if it == max_iter:
                return d, total, l
            it += 1
            total += 1
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = np.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + (r if g >= 0 else -r))
            s = 1.0
            c = 1.0
            p = 0.0
            i = m - 1
            deflated = False
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = np.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    deflated = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                i -= 1
            if deflated:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return d, total, -1


@njit(cache=True)
def _factor_shifted(diag, sub, lam, tiny):
    """LU with partial pivoting of T - lam*I (tridiagonal, LAPACK gttrf layout)."""
    n = diag.size
    d = diag - lam
    dl = sub.copy()
    du = sub.copy()
    du2 = np.zeros(max(n - 2, 0))
    piv = np.zeros(max(n - 1, 0), dtype=np.bool_)
    for i in range(n - 1):
        if abs(d[i]) >= abs(dl[i]):
            if d[i] == 0.0:
                d[i] = tiny
            fact = dl[i] / d[i]
            dl[i] = fact
            d[i + 1] -= fact * du[i]
        else:
            fact = d[i] / dl[i]
            d[i] = dl[i]
            dl[i] = fact
            temp = du[i]
            du[i] = d[i + 1]
            d[i + 1] = temp - fact * d[i + 1]
            if i < n - 2:
                du2[i] = du[i + 1]
                du[i + 1] = -fact * du[i + 1]
            piv[i] = True
    for i in range(n):
        if abs(d[i]) < tiny:
            d[i] = tiny if d[i] >= 0 else -tiny
    return d, dl, du, du2, piv


@njit(cache=True)
def _solve_factored(d, dl, du, du2, piv, b):
    n = d.size
    for i in range(n - 1):
        if not piv[i]:
            b[i + 1] -= dl[i] * b[i]
        else:
            t = b[i]
            b[i] = b[i + 1]
            b[i + 1] = t - dl[i] * b[i]
    b[n - 1] /= d[n - 1]
    if n > 1:
        b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2]
    for i in range(n - 3, -1, -1):
        b[i] = (b[i] - du[i] * b[i + 1] - du2[i] * b[i + 2]) / d[i]


@njit(cache=True)
def inverse_iteration(diag, sub, lams, start, max_iter):
    """Eigenvectors of a symmetric tridiagonal matrix for sorted ``lams``.

    Vectors whose eigenvalues sit within 1e-3 * ||T||_1 of each other are
    re-orthogonalized against one another; coincident shifts are separated
    by 10 * eps * ||T||_1 so a multiple eigenvalue yields a full basis of its
    eigenspace.  ``start`` holds one start vector per column.
    """
    n = diag.size
    k = lams.size
    norm = 0.0
    for i in range(n):
        row = abs(diag[i])
        if i > 0:
            row += abs(sub[i - 1])
        if i < n - 1:
            row += abs(sub[i])
        norm = max(norm, row)
    norm = max(norm, 1e-300)
    ortol = 1e-3 * norm
    pertol = 10.0 * EPS * norm
    tiny = EPS * norm
    Z = np.zeros((n, k))
    iters = np.zeros(k, dtype=np.int64)
    shifts = lams.copy()
    cluster_start = 0
    for j in range(k):
        if j > 0:
            if lams[j] - lams[j - 1] > ortol:
                cluster_start = j
            if shifts[j] - shifts[j - 1] < pertol:
                shifts[j] = shifts[j - 1] + pertol
        d, dl, du, du2, piv = _factor_shifted(diag, sub, shifts[j], tiny)
        x = start[:, j].copy()
        x /= np.sqrt(np.dot(x, x))
        for it in range(max_iter):
            _solve_factored(d, dl, du, du2, piv, x)
            for p in range(cluster_start, j):
                x -= np.dot(Z[:, p], x) * Z[:, p]
            nrm = np.sqrt(np.dot(x, x))
            x /= nrm
            iters[j] = it + 1
            # growth of 1/(sqrt(n) eps ||T||) means the shift is an eigenvalue
            if it >= 1 and nrm * tiny * np.sqrt(n) >= 1e-1:
                break
        Z[:, j] = x
    return Z, iters
