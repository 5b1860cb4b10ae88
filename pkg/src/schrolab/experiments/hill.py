"""Lower bound for the principal periodic eigenvalue of -u'' + V u."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..eigensolve import eigh
from ..errors import InvalidArgument
from ..geometry import make_circle
from ..operator import assemble
from ..potentials import identity, project_to_constraint

SUBCRITICAL = "subcritical"
SUPERCRITICAL = "supercritical"


@dataclass(frozen=True, eq=False)
class HillBoundInput:
    """A potential V sampled on a uniform grid over one period L."""

    L: float
    V: np.ndarray

    def __post_init__(self):
        V = np.asarray(self.V, dtype=float)
        if V.ndim != 1 or V.size == 0:
            raise InvalidArgument("V must be a nonempty 1-D sample")
        if not np.all(np.isfinite(V)):
            raise InvalidArgument("V must be finite")
        if not self.L > 0:
            raise InvalidArgument("period must be positive")
        object.__setattr__(self, "V", V)

    @property
    def v_min(self) -> float:
        return float(self.V.min())

    @property
    def integral(self) -> float:
        """I = (1/L) int_0^L sqrt(V - V_min), trapezoid rule on the periodic grid."""
        return float(np.mean(np.sqrt(self.V - self.v_min)))


def hill_lower_bound(data: HillBoundInput):
    """Return ``(bound, branch)``.

    V_min + I^2 while I <= pi/L; past that the bound saturates at V_min + pi^2/L^2.
    """
    I, L = data.integral, data.L
    if I <= np.pi / L:
        return data.v_min + I * I, SUBCRITICAL
    return data.v_min + (np.pi / L) ** 2, SUPERCRITICAL


def direct_lambda0(data: HillBoundInput, discretization: str = "fourier") -> float:
    """Principal eigenvalue of -d^2/dx^2 + V on the sample grid."""
    grid = make_circle(data.L, data.V.size)
    kappa = project_to_constraint(grid, data.V, grid.mean(data.V))
    op = assemble(grid, kappa, identity(kappa.kappa0), 1.0, discretization)
    return float(eigh(op, 1).values[0])


def hill_check(data: HillBoundInput, discretization: str = "fourier") -> dict:
    bound, branch = hill_lower_bound(data)
    lam = direct_lambda0(data, discretization)
    return {"v_min": data.v_min, "integral": data.integral, "bound": bound,
            "branch": branch, "lambda0": lam, "slack": lam - bound}
