"""Dense discrete Schrodinger operators H = -Laplacian + alpha * F(kappa)."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import InvalidArgument
from .geometry import ManifoldGrid
from .potentials import CouplingFunction, PotentialField

DISCRETIZATIONS = ("fourier", "fd2")


def _fourier_1d(L: float, n: int) -> np.ndarray:
    from .geometry import _circle_basis

    B, mu, _, _ = _circle_basis(L, n)
    return (L / n) * (B * mu) @ B.T


def _fd2_1d(L: float, n: int) -> np.ndarray:
    h = L / n
    D = 2.0 * np.eye(n) - np.eye(n, k=1) - np.eye(n, k=-1)
    D[0, -1] = D[-1, 0] = -1.0
    return D / (h * h)


@lru_cache(maxsize=16)
def _laplacian(grid: ManifoldGrid, discretization: str) -> tuple:
    build = _fourier_1d if discretization == "fourier" else _fd2_1d
    mats = [build(L, n) for L, n in zip(grid.lengths, grid.shape)]
    if grid.dim == 1:
        D = mats[0]
    else:
        D = np.kron(mats[0], np.eye(grid.shape[1])) + np.kron(np.eye(grid.shape[0]), mats[1])
    defect = float(np.max(np.abs(D - D.T)))
    D = 0.5 * (D + D.T)
    D.flags.writeable = False
    return D, defect


def laplacian_matrix(grid: ManifoldGrid, discretization: str = "fourier") -> np.ndarray:
    """Symmetric matrix of -Laplacian (positive semidefinite)."""
    if discretization not in DISCRETIZATIONS:
        raise InvalidArgument(f"unknown discretization {discretization!r}")
    return _laplacian(grid, discretization)[0]


@dataclass(frozen=True, eq=False)
class SpectralOperator:
    grid: ManifoldGrid
    alpha: float
    potential: PotentialField
    coupling: CouplingFunction
    discretization: str
    matrix: np.ndarray
    asymmetry: float

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    @property
    def diagonal_potential(self) -> np.ndarray:
        return self.alpha * self.coupling(self.potential.samples)


def assemble(grid: ManifoldGrid, potential: PotentialField, F: CouplingFunction,
             alpha: float, discretization: str = "fourier") -> SpectralOperator:
    if potential.grid != grid:
        raise InvalidArgument("potential lives on a different grid")
    if discretization not in DISCRETIZATIONS:
        raise InvalidArgument(f"unknown discretization {discretization!r}")
    if not np.isfinite(alpha):
        raise InvalidArgument("alpha must be finite")
    D, defect = _laplacian(grid, discretization)
    V = float(alpha) * np.asarray(F(potential.samples), dtype=float)
    if not np.all(np.isfinite(V)):
        raise InvalidArgument("F(kappa) is not finite on the grid")
    H = D.copy()
    H[np.diag_indices_from(H)] += V
    H.flags.writeable = False
    return SpectralOperator(grid, float(alpha), potential, F, discretization, H, defect)


def apply(op: SpectralOperator, u) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    if u.shape != (op.size,):
        raise InvalidArgument(f"vector of length {u.shape} does not match operator size {op.size}")
    return op.matrix @ u


def rayleigh_quotient(op: SpectralOperator, u) -> float:
    """Quadrature-weighted quotient  sum w u Hu / sum w u^2."""
    u = np.asarray(u, dtype=float)
    denom = op.grid.inner(u, u)
    if denom == 0.0:
        raise InvalidArgument("Rayleigh quotient of the zero vector")
    return op.grid.inner(u, apply(op, u)) / denom


def gradient(grid: ManifoldGrid, u) -> np.ndarray:
    """Spectral gradient, shape ``(dim, n_nodes)``.  Exact below Nyquist."""
    a = grid.to_modes(u)
    return np.stack([grid.from_modes(grid.mode_derivative(a, ax)) for ax in range(grid.dim)])


def laplacian(grid: ManifoldGrid, u) -> np.ndarray:
    """Spectral Laplacian of ``u`` (note the sign: this is +Laplacian)."""
    a = grid.to_modes(u)
    return -grid.from_modes(grid.mode_eigenvalues * a)
