"""Spectral experiments for Schrodinger operators -Laplace + alpha F(kappa) on flat circles and tori."""

__version__ = "0.1.0"

from .errors import (DegeneracyStop, InvalidArgument, LineSearchFailure, NumericalFailure,
                     UndefinedCriticalCoupling)
from .geometry import (ManifoldGrid, geodesic_ball_indicator, laplace_eigenbasis, make_circle,
                       make_torus)
from .potentials import (CouplingFunction, PotentialField, ball_potential, exponential,
                         identity, project_to_constraint, spike_potential_1d, square, tabulated)
from .operator import SpectralOperator, assemble, rayleigh_quotient
from .eigensolve import EigenResult, eigh, poisson_solve
from .perturbation import (critical_alpha, ell2, first_nonzero_eigenvalue, functional_I,
                           lemma_gamma, perturbation_report, verify_expansion)

__all__ = [
    "__version__", "DegeneracyStop", "InvalidArgument", "LineSearchFailure", "NumericalFailure",
    "UndefinedCriticalCoupling", "ManifoldGrid", "geodesic_ball_indicator", "laplace_eigenbasis",
    "make_circle", "make_torus", "CouplingFunction", "PotentialField", "ball_potential",
    "exponential", "identity", "project_to_constraint", "spike_potential_1d", "square",
    "tabulated", "SpectralOperator", "assemble", "rayleigh_quotient", "EigenResult", "eigh",
    "poisson_solve", "critical_alpha", "ell2", "first_nonzero_eigenvalue", "functional_I",
    "lemma_gamma", "perturbation_report", "verify_expansion",
]
