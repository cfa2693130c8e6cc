"""Sampling from unnormalized densities on [0, 1]^d through polynomial surrogates.

A surrogate ``g`` of ``sqrt(density)`` in an orthonormal Legendre basis defines
an explicit Knothe-Rosenblatt transport; uniform draws pushed through its
inverse are samples of ``g^2 / int g^2``.
"""
from .interp import InterpolationPlan, fit_interpolation, sparse_interpolate, tensor_interpolate
from .legendre import legendre_values, product_antiderivative, product_antiderivative_table
from .metrics import QuadratureGrid, convergence_study, hellinger, hellinger_estimate, surrogate_mass
from .multiindex import MultiIndexSet, construct_anisotropic, full_box, total_degree
from .oracle import DensityOracle, ExternalDensity
from .surrogate import PolynomialSurrogate
from .transport import TriangularTransport, pushforward_sample
from .wls import fit, sample_optimal

__version__ = "0.1.0"
