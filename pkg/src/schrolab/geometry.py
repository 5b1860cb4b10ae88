"""Flat model manifolds: the circle of circumference L and the rectangular torus.

Every grid is uniform and periodic, so the trapezoid rule with weight
``|M| / n_nodes`` is the quadrature, and the Laplace eigenfunctions are
sampled sines and cosines (products of them on the torus).  Those sampled
eigenfunctions are exactly orthonormal in the discrete inner product, which
is what lets them act as oracles for everything downstream.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import InvalidArgument

COS, SIN = 0, 1


@dataclass(frozen=True)
class ManifoldGrid:
    """Uniform periodic grid on a circle (dim 1) or a flat torus (dim 2).

    Nodes are ordered row-major, axis 0 slowest, so a torus field of shape
    ``(N1, N2)`` flattens with ``ravel()``.
    """

    kind: str
    lengths: tuple
    shape: tuple

    @property
    def dim(self) -> int:
        return len(self.shape)

    @property
    def n_nodes(self) -> int:
        return int(np.prod(self.shape))

    @property
    def measure(self) -> float:
        return float(np.prod(self.lengths))

    @property
    def weight(self) -> float:
        return self.measure / self.n_nodes

    @property
    def spacing(self) -> tuple:
        return tuple(L / n for L, n in zip(self.lengths, self.shape))

    @cached_property
    def weights(self) -> np.ndarray:
        return np.full(self.n_nodes, self.weight)

    @cached_property
    def axes(self) -> tuple:
        return tuple(np.arange(n) * (L / n) for L, n in zip(self.lengths, self.shape))

    @cached_property
    def nodes(self) -> np.ndarray:
        """Node coordinates, shape ``(n_nodes, dim)``."""
        mesh = np.meshgrid(*self.axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    def integrate(self, values) -> float:
        return float(self.weight * np.sum(values))

    def mean(self, values) -> float:
        return float(np.sum(values) / self.n_nodes)

    def inner(self, u, v) -> float:
        return float(self.weight * np.dot(u, v))

    def periodic_distance(self, center) -> np.ndarray:
        """Flat quotient-metric distance from ``center`` to every node."""
        c = np.atleast_1d(np.asarray(center, dtype=float))
        if c.size != self.dim:
            raise InvalidArgument(f"center must have {self.dim} coordinate(s)")
        sq = np.zeros(self.n_nodes)
        for axis, L in enumerate(self.lengths):
            d = np.abs(self.nodes[:, axis] - c[axis]) % L
            d = np.minimum(d, L - d)
            sq += d * d
        return np.sqrt(sq)

    # modal (1D tensor-factor) machinery -----------------------------------

    @cached_property
    def _factors(self) -> tuple:
        return tuple(_circle_basis(L, n) for L, n in zip(self.lengths, self.shape))

    @cached_property
    def mode_eigenvalues(self) -> np.ndarray:
        """Laplace eigenvalue of each tensor mode, shaped like the grid."""
        mus = [f[1] for f in self._factors]
        if self.dim == 1:
            return mus[0].copy()
        return mus[0][:, None] + mus[1][None, :]

    def to_modes(self, u) -> np.ndarray:
        """Coefficients of ``u`` in the orthonormal eigenbasis (tensor layout)."""
        u = np.asarray(u, dtype=float)
        if u.shape != (self.n_nodes,):
            raise InvalidArgument("node vector has the wrong length")
        if self.dim == 1:
            B = self._factors[0][0]
            return self.weight * (B.T @ u)
        B1, B2 = self._factors[0][0], self._factors[1][0]
        return self.weight * (B1.T @ u.reshape(self.shape) @ B2)

    def from_modes(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=float)
        if self.dim == 1:
            return self._factors[0][0] @ a
        B1, B2 = self._factors[0][0], self._factors[1][0]
        return (B1 @ a @ B2.T).ravel()

    def mode_derivative(self, a, axis: int) -> np.ndarray:
        """Differentiate a coefficient array along ``axis`` (spectral, exact)."""
        G = self._factors[axis][3]
        if self.dim == 1:
            return G @ a
        return G @ a if axis == 0 else a @ G.T


def _circle_basis(L: float, n: int):
    """Orthonormal sampled eigenbasis of the circle of length L on n nodes.

    Returns ``(B, mu, labels, G)``: columns of ``B`` are the eigenfunctions
    in natural order (constant, cos 1, sin 1, cos 2, ..., Nyquist cosine),
    ``mu`` their eigenvalues, ``labels`` (wavenumber, COS|SIN) pairs and
    ``G`` the derivative acting on coefficient vectors.
    """
    s = np.arange(n) * (L / n)
    B = np.empty((n, n))
    mu = np.empty(n)
    labels = []
    G = np.zeros((n, n))
    B[:, 0] = 1.0 / np.sqrt(L)
    mu[0] = 0.0
    labels.append((0, COS))
    amp = np.sqrt(2.0 / L)
    col = 1
    for k in range(1, n // 2):
        omega = 2.0 * np.pi * k / L
        B[:, col] = amp * np.cos(omega * s)
        B[:, col + 1] = amp * np.sin(omega * s)
        mu[col] = mu[col + 1] = omega**2
        labels += [(k, COS), (k, SIN)]
        # d/ds cos = -omega sin, d/ds sin = omega cos
        G[col + 1, col] = -omega
        G[col, col + 1] = omega
        col += 2
    k = n // 2
    B[:, col] = np.cos(np.pi * np.arange(n)) / np.sqrt(L)
    mu[col] = (2.0 * np.pi * k / L) ** 2
    labels.append((k, COS))
    return B, mu, labels, G


def _check_count(N, name="N"):
    if isinstance(N, bool) or int(N) != N or N < 8 or N % 2:
        raise InvalidArgument(f"{name} must be an even integer >= 8, got {N!r}")


def _check_length(L, name="L"):
    if not np.isfinite(L) or L <= 0:
        raise InvalidArgument(f"{name} must be a positive length, got {L!r}")


def make_circle(L: float, N: int) -> ManifoldGrid:
    _check_length(L)
    _check_count(N)
    return ManifoldGrid("circle", (float(L),), (int(N),))


def make_torus(L1: float, L2: float, N1: int, N2: int) -> ManifoldGrid:
    _check_length(L1, "L1")
    _check_length(L2, "L2")
    _check_count(N1, "N1")
    _check_count(N2, "N2")
    return ManifoldGrid("torus", (float(L1), float(L2)), (int(N1), int(N2)))


@dataclass(frozen=True, eq=False)
class LaplaceEigenpair:
    index: int
    eigenvalue: float
    samples: np.ndarray
    multiplicity: int
    label: tuple


def _sorted_modes(grid: ManifoldGrid):
    """Tensor mode indices sorted by eigenvalue with the deterministic tie-break."""
    factors = grid._factors
    if grid.dim == 1:
        _, mu, labels, _ = factors[0]
        keys = [(mu[m], labels[m][0], labels[m][1], m) for m in range(len(mu))]
        return [(k[3],) for k in sorted(keys)]
    (_, mu1, lab1, _), (_, mu2, lab2, _) = factors
    keys = []
    for m1 in range(len(mu1)):
        for m2 in range(len(mu2)):
            k1, t1 = lab1[m1]
            k2, t2 = lab2[m2]
            keys.append((mu1[m1] + mu2[m2], k1, k2, t1, t2, m1, m2))
    keys.sort()
    return [(k[5], k[6]) for k in keys]


def laplace_eigenbasis(grid: ManifoldGrid, count: int) -> list:
    """First ``count`` eigenpairs of the Laplacian, ascending, multiplicities repeated."""
    if int(count) != count or count < 1 or count > grid.n_nodes:
        raise InvalidArgument(f"count must lie in [1, {grid.n_nodes}], got {count!r}")
    modes = _sorted_modes(grid)
    all_mu = np.sort(grid.mode_eigenvalues.ravel())
    out = []
    for j, m in enumerate(modes[: int(count)]):
        if grid.dim == 1:
            B, mu, labels, _ = grid._factors[0]
            samples = B[:, m[0]].copy()
            value = float(mu[m[0]])
            label = labels[m[0]]
        else:
            (B1, mu1, lab1, _), (B2, mu2, lab2, _) = grid._factors
            samples = np.outer(B1[:, m[0]], B2[:, m[1]]).ravel()
            value = float(mu1[m[0]] + mu2[m[1]])
            label = (lab1[m[0]], lab2[m[1]])
        tol = 1e-12 * max(1.0, value)
        mult = int(np.count_nonzero(np.abs(all_mu - value) <= tol))
        samples.flags.writeable = False
        out.append(LaplaceEigenpair(j, value, samples, mult, label))
    return out


def geodesic_ball_indicator(grid: ManifoldGrid, center=None, radius: float = 0.0):
    """Mask of nodes within periodic distance ``radius`` of ``center``.

    Returns ``(mask, measure)`` with ``measure = mask.sum() * weight``.
    Nodes at exactly distance ``radius`` are included.
    """
    limit = min(grid.lengths) / 2
    if not np.isfinite(radius) or radius <= 0 or radius >= limit:
        raise InvalidArgument(f"radius must lie in (0, {limit}), got {radius!r}")
    if center is None:
        center = np.zeros(grid.dim)
    dist = grid.periodic_distance(center)
    mask = dist <= radius * (1 + 1e-12)
    return mask, float(np.count_nonzero(mask) * grid.weight)
