"""Numerical laboratory for wave dynamics of macro variables on a
risk-coordinate space: agent aggregation, coupled-fluid integration,
dispersion analysis, and macro time-series extraction."""

from .espace import ScalarField, SpaceGrid, VectorField, curl, divergence, gradient, laplacian
from .hydro import ConjugateParams, FluidState, OperatorTerm, RhsSpec
from .kinetic import AgentEnsemble, EParticle
from .linear import BiWaveCoeffs, DispersionResult, biwave_coeffs, dispersion

__version__ = "0.1.0"

__all__ = [
    "SpaceGrid", "ScalarField", "VectorField",
    "gradient", "divergence", "laplacian", "curl",
    "AgentEnsemble", "EParticle",
    "FluidState", "ConjugateParams", "OperatorTerm", "RhsSpec",
    "BiWaveCoeffs", "DispersionResult", "biwave_coeffs", "dispersion",
    "__version__",
]
