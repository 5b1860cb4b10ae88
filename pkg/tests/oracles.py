"""Independent reference computations used by the test-suite.

Nothing here calls into schrolab's solvers, so agreement is a genuine check.
"""

import numpy as np
from scipy.linalg import ldl


def negative_count(a, shift):
    """Number of eigenvalues of symmetric ``a`` below ``shift`` (Sylvester inertia)."""
    _, d, _ = ldl(a - shift * np.eye(a.shape[0]), hermitian=True)
    count, i, n = 0, 0, d.shape[0]
    while i < n:
        if i + 1 < n and d[i + 1, i] != 0.0:
            count += int(np.sum(np.linalg.eigvalsh(d[i:i + 2, i:i + 2]) < 0))
            i += 2
        else:
            count += int(d[i, i] < 0)
            i += 1
    return count


def bisection_eigenvalues(a, tol=1e-13):
    """All eigenvalues of a small symmetric matrix by inertia bisection."""
    a = np.asarray(a, dtype=float)
    n = a.shape[0]
    r = float(np.max(np.sum(np.abs(a), axis=1))) + 1.0   # Gershgorin radius
    out = []
    for k in range(n):
        lo, hi = -r, r
        while hi - lo > tol * max(1.0, r):
            mid = 0.5 * (lo + hi)
            if negative_count(a, mid) > k:
                hi = mid
            else:
                lo = mid
        out.append(0.5 * (lo + hi))
    return np.array(out)


def charpoly_roots(a):
    """Roots of det(x I - a) with Faddeev-LeVerrier coefficients.

    Only well conditioned for simple, well separated eigenvalues.
    """
    a = np.asarray(a, dtype=float)
    n = a.shape[0]
    coeffs = [1.0]
    m = np.zeros_like(a)
    for k in range(1, n + 1):
        m = a @ m + coeffs[-1] * np.eye(n)
        coeffs.append(-np.trace(a @ m) / k)
    return np.sort(np.roots(coeffs).real)


def fd_symbol(k, N, L):
    """Eigenvalue of the periodic 3-point second difference on mode k."""
    h = L / N
    return 2.0 * (1.0 - np.cos(2.0 * np.pi * k / N)) / h**2


def circle_spectrum(L, count):
    """Sorted continuum Laplace eigenvalues (2 pi k / L)^2 with multiplicity."""
    vals = [0.0]
    k = 1
    while len(vals) < count:
        vals += [(2 * np.pi * k / L) ** 2] * 2
        k += 1
    return np.array(vals[:count])


def torus_spectrum(L1, L2, count, kmax=8):
    vals = sorted((2 * np.pi * a / L1) ** 2 + (2 * np.pi * b / L2) ** 2
                  for a in range(-kmax, kmax + 1) for b in range(-kmax, kmax + 1))
    return np.array(vals[:count])
