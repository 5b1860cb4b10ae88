"""Potentials with a prescribed mean and the coupling functions F."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import InvalidArgument
from .geometry import ManifoldGrid, LaplaceEigenpair, geodesic_ball_indicator

MEAN_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class PotentialField:
    """Samples of kappa on a grid together with the mean they must carry.

    Construction fails unless the discrete mean equals ``kappa0`` to
    ``MEAN_TOL`` (relative to ``max(1, |kappa0|)``).
    """

    grid: ManifoldGrid
    samples: np.ndarray
    kappa0: float

    def __post_init__(self):
        s = np.array(self.samples, dtype=float)
        if s.shape != (self.grid.n_nodes,):
            raise InvalidArgument("samples do not match the grid")
        s.flags.writeable = False
        object.__setattr__(self, "samples", s)
        err = abs(self.grid.mean(s) - self.kappa0)
        if err > MEAN_TOL * max(1.0, abs(self.kappa0)):
            raise InvalidArgument(f"mean differs from kappa0 by {err:.3e}")

    @property
    def mean(self) -> float:
        return self.grid.mean(self.samples)

    def rolled(self, shift) -> "PotentialField":
        """Cyclic translation by whole grid cells (a per-axis shift on the torus)."""
        s = self.samples.reshape(self.grid.shape)
        s = np.roll(s, shift, axis=tuple(range(self.grid.dim)) if np.ndim(shift) else 0)
        return PotentialField(self.grid, s.ravel(), self.kappa0)


@dataclass(frozen=True, eq=False)
class CouplingFunction:
    """F together with analytic F' and F'', expanded about ``kappa0``."""

    name: str
    F: Callable
    dF: Callable
    d2F: Callable
    kappa0: float
    params: dict = field(default_factory=dict)

    def __call__(self, kappa):
        return self.F(np.asarray(kappa, dtype=float))

    @property
    def f0(self) -> float:
        return float(self.F(np.float64(self.kappa0)))

    @property
    def f1(self) -> float:
        return float(self.dF(np.float64(self.kappa0)))

    @property
    def f2(self) -> float:
        return 0.5 * float(self.d2F(np.float64(self.kappa0)))

    def at(self, kappa0: float) -> "CouplingFunction":
        return CouplingFunction(self.name, self.F, self.dF, self.d2F, float(kappa0), self.params)

    def shifted(self, c: float) -> "CouplingFunction":
        """F + c; derivatives unchanged."""
        F = self.F
        return CouplingFunction(f"{self.name}+{c}", lambda k: F(k) + c, self.dF, self.d2F,
                                self.kappa0, self.params)


def square(kappa0: float = 0.0) -> CouplingFunction:
    return CouplingFunction("square", lambda k: k * k, lambda k: 2.0 * k,
                            lambda k: 2.0 + 0.0 * k, float(kappa0))


def identity(kappa0: float = 0.0) -> CouplingFunction:
    return CouplingFunction("identity", lambda k: 1.0 * k, lambda k: 1.0 + 0.0 * k,
                            lambda k: 0.0 * k, float(kappa0))


def exponential(kappa0: float = 0.0) -> CouplingFunction:
    return CouplingFunction("exp", np.exp, np.exp, np.exp, float(kappa0))


def tabulated(x, y, kappa0: float = 0.0, name: str = "table") -> CouplingFunction:
    """Piecewise-linear F through the table rows, held constant past the ends.

    F' is the slope of the active segment and F'' is zero, i.e. the exact
    derivatives of the interpolant.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.ndim != 1 or x.shape != y.shape or x.size < 2 or np.any(np.diff(x) <= 0):
        raise InvalidArgument("F table needs >= 2 rows with increasing abscissae")
    slopes = np.diff(y) / np.diff(x)

    def F(k):
        return np.interp(k, x, y)

    def dF(k):
        k = np.asarray(k, dtype=float)
        idx = np.clip(np.searchsorted(x, k, side="right") - 1, 0, slopes.size - 1)
        inside = (k >= x[0]) & (k <= x[-1])
        return np.where(inside, slopes[idx], 0.0)

    def d2F(k):
        return 0.0 * np.asarray(k, dtype=float)

    return CouplingFunction(name, F, dF, d2F, float(kappa0))


BUILTIN_COUPLINGS = {"square": square, "identity": identity, "exp": exponential}


def project_to_constraint(grid: ManifoldGrid, samples, kappa0: float) -> PotentialField:
    """Shift by a constant so the discrete mean is exactly ``kappa0``."""
    s = np.asarray(samples, dtype=float)
    s = s + (kappa0 - grid.mean(s))
    # one more pass mops up the rounding of the first shift
    s = s + (kappa0 - grid.mean(s))
    return PotentialField(grid, s, float(kappa0))


def constant_potential(grid: ManifoldGrid, kappa0: float) -> PotentialField:
    return PotentialField(grid, np.full(grid.n_nodes, float(kappa0)), float(kappa0))


def mode_perturbation(grid: ManifoldGrid, kappa0: float, eps: float,
                      mode) -> PotentialField:
    """kappa0 + eps * q for a zero-mean mode ``q`` (an eigenpair or a node vector)."""
    if isinstance(mode, LaplaceEigenpair):
        if mode.index == 0:
            raise InvalidArgument("the constant mode does not have zero mean")
        q = mode.samples
    else:
        q = np.asarray(mode, dtype=float)
    if q.shape != (grid.n_nodes,):
        raise InvalidArgument("mode does not live on this grid")
    return project_to_constraint(grid, kappa0 + eps * q, kappa0)


def _ramp(t):
    """Raised-cosine rise on [0, 1]."""
    return 0.5 * (1.0 - np.cos(np.pi * np.clip(t, 0.0, 1.0)))


def spike_potential_1d(grid: ManifoldGrid, kappa0: float, delta: float,
                       smooth: bool = True, start: float = 0.0) -> PotentialField:
    """kappa0 * L / delta on (start, start + delta), zero elsewhere.

    ``smooth`` replaces the jumps by raised-cosine ramps of width delta / 10
    inside the support.  The plateau is rescaled so the discrete mean is kappa0.
    """
    if grid.dim != 1:
        raise InvalidArgument("spike_potential_1d needs a circle grid")
    (L,), (h,) = grid.lengths, grid.spacing
    if not delta >= 4 * h or delta >= L:
        raise InvalidArgument(f"delta={delta!r} is not resolvable (need 4h <= delta < L)")
    s = (grid.axes[0] - start) % L
    if smooth:
        r = delta / 10
        profile = np.where(s < delta, _ramp(s / r) * _ramp((delta - s) / r), 0.0)
    else:
        profile = ((s > 0) & (s < delta)).astype(float)
    plateau = kappa0 * L / delta
    samples = plateau * profile
    samples *= kappa0 / grid.mean(samples)
    return project_to_constraint(grid, samples, kappa0)


def ball_potential(grid: ManifoldGrid, kappa0: float, delta: float, center=None,
                   smooth: bool = True) -> PotentialField:
    """kappa0 * |M| / |B_delta| on the geodesic ball, zero outside.

    The smoothed variant ramps down over the outer delta / 10 of the radius.
    """
    mask, area = geodesic_ball_indicator(grid, center, delta)
    if np.count_nonzero(mask) < 12:
        raise InvalidArgument(f"ball of radius {delta!r} covers fewer than 12 nodes")
    if center is None:
        center = np.zeros(grid.dim)
    if smooth:
        rho = grid.periodic_distance(center)
        r = delta / 10
        profile = np.where(mask, _ramp((delta - rho) / r), 0.0)
    else:
        profile = mask.astype(float)
    samples = kappa0 * grid.measure / area * profile
    samples *= kappa0 / grid.mean(samples)
    return project_to_constraint(grid, samples, kappa0)


def random_band_limited(grid: ManifoldGrid, rng: np.random.Generator, kmax: int = 4,
                        scale: float = 1.0, decay: float = 1.0) -> np.ndarray:
    """Zero-mean random field built from Laplace modes with wavenumber <= kmax.

    Mode amplitudes are Gaussian with standard deviation ``scale * (1+k)**-decay``.
    """
    a = np.zeros(grid.shape)
    for axis_modes in np.ndindex(*grid.shape):
        ks = [grid._factors[ax][2][m][0] for ax, m in enumerate(axis_modes)]
        if max(ks) == 0 or max(ks) > kmax:
            continue
        if any(2 * k == n for k, n in zip(ks, grid.shape)):
            continue
        a[axis_modes] = rng.normal() * scale * (1.0 + max(ks)) ** (-decay)
    return grid.from_modes(a)
