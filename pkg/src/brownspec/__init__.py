"""Dyadic Brownian motion from Gaussian measures and eigenvalue perturbation checks."""

from brownspec.gaussian import GaussianMeasure, NormSpec, empirical_q_moment, sample, scale_measure
from brownspec.brownian import (
    DyadicPath,
    build_path,
    coarsen,
    deviation_experiment,
    increment_statistics,
    sup_deviation,
    support_check,
    tail_certificate,
)
from brownspec.jacobi import oracle_spectrum
from brownspec.spectral import (
    SignedSpectrum,
    SymmetricOperator,
    decomposition_residual,
    deflated_extremal,
    minmax_value,
    operator_norm,
    quadratic_form,
    signed_spectrum,
)
from brownspec.streams import stream

__version__ = "0.1.0"
