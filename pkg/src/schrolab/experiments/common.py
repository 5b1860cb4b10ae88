from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from ..errors import InvalidArgument, NumericalFailure

RESIDUAL_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class SweepResult:
    """One experiment's sweep: a monotone parameter, eigenvalues per point, a CSV table.

    ``columns``/``rows`` are the fixed CSV layout the CLI writes out.
    """

    parameter: str
    values: np.ndarray
    eigenvalues: np.ndarray
    residuals: np.ndarray
    derived: dict
    reference: dict
    columns: tuple
    rows: list
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        steps = np.diff(v)
        if v.size > 1 and not (np.all(steps > 0) or np.all(steps < 0)):
            raise InvalidArgument(f"{self.parameter} values must be strictly monotone")
        lam = np.asarray(self.eigenvalues, dtype=float)
        res = np.asarray(self.residuals, dtype=float)
        bad = res > RESIDUAL_TOL * (1.0 + np.abs(lam))
        if np.any(bad):
            raise NumericalFailure("eigenpair residual above tolerance",
                                   {"max_residual": float(res.max())})


def richardson_limit(h, values):
    """Extrapolate ``values(h) = limit + C h^p`` to h -> 0 from the three smallest h.

    The order p is fitted from the data rather than assumed.  Returns
    ``(limit, p)``.
    """
    h = np.asarray(h, dtype=float)
    y = np.asarray(values, dtype=float)
    if h.size < 3:
        raise InvalidArgument("Richardson extrapolation needs three points")
    order = np.argsort(h)[:3][::-1]
    (h1, h2, h3), (y1, y2, y3) = h[order], y[order]
    d12, d23 = y1 - y2, y2 - y3
    if d23 == 0 or d12 / d23 <= 0:
        raise NumericalFailure("sequence is not monotone; cannot fit an order",
                               {"values": [y1, y2, y3]})
    ratio = d12 / d23

    def mismatch(p):
        return (h1**p - h2**p) / (h2**p - h3**p) - ratio

    lo, hi = 0.05, 12.0
    if mismatch(lo) * mismatch(hi) > 0:
        raise NumericalFailure("no convergence order in [0.05, 12] fits the data",
                               {"ratio": ratio})
    p = brentq(mismatch, lo, hi, xtol=1e-14)
    C = d23 / (h2**p - h3**p)
    return float(y3 - C * h3**p), float(p)
