"""Entanglement witnesses from minors of moment matrices, measured by
phase-scanned photon-number-resolving interferometry."""

__version__ = "0.1.0"

from .errors import AliasingError, ConfigError, CutoffError, SpecError, UnsupportedError
from .fock import ModeMonomial, TruncatedState, expectation, photon_pmf, quadrature_covariance
from .fourier import CorrelatorGrid, extract_top_coefficients, plan_grid, sample_correlator_grid
from .interferometer import DetectorPmf, PhasePair, apply_loss, correlator, interfere
from .sampling import (ComplexityQuery, MinorExperiment, ShotRecord, estimate_minor, m0_chebyshev,
                       m0_hoeffding, simulate_shots)
from .states import NOON, TMSV, Cat, CoherentProduct, HermiteGaussian, PMTransform, build
from .witness import (MinorSpec, Moments, WitnessResult, analytic_minor, mgvt, minor_d, minor_d_lossy,
                      minor_dprime, optimal_reference, second_moment_criterion)

__all__ = [
    "AliasingError", "ConfigError", "CutoffError", "SpecError", "UnsupportedError",
    "ModeMonomial", "TruncatedState", "expectation", "photon_pmf", "quadrature_covariance",
    "CorrelatorGrid", "extract_top_coefficients", "plan_grid", "sample_correlator_grid",
    "DetectorPmf", "PhasePair", "apply_loss", "correlator", "interfere",
    "ComplexityQuery", "MinorExperiment", "ShotRecord", "estimate_minor", "m0_chebyshev", "m0_hoeffding",
    "simulate_shots",
    "NOON", "TMSV", "Cat", "CoherentProduct", "HermiteGaussian", "PMTransform", "build",
    "MinorSpec", "Moments", "WitnessResult", "analytic_minor", "mgvt", "minor_d", "minor_d_lossy",
    "minor_dprime", "optimal_reference", "second_moment_criterion",
]
