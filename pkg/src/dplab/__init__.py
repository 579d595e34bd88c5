"""Negative spectrum of Laplacians with a jump interaction on a non-closed curve."""

__version__ = "0.1.0"

from .geometry import (ConstantPhi, CurveDomainError, LinearPhi, MonotoneCurve, PolylineCurve,
                       TabulatedPhi, interval_curve, spiral_curve)
from .loop1d import LoopSpec, loop_fe_spectrum, loop_negative_eigenvalues, theta
from .moebius import Moebius, PoleError, pullback_strength
from .sparse_eig import EigensolverError, LinearSolverError, smallest_eigenpairs
from .thresholds import Verdict, VerdictTag, classify, lft_threshold, omega_star, threshold_report

__all__ = [
    "__version__", "ConstantPhi", "LinearPhi", "TabulatedPhi", "MonotoneCurve", "PolylineCurve",
    "CurveDomainError", "interval_curve", "spiral_curve", "Moebius", "PoleError", "pullback_strength",
    "LoopSpec", "theta", "loop_negative_eigenvalues", "loop_fe_spectrum", "EigensolverError",
    "LinearSolverError", "smallest_eigenpairs", "omega_star", "lft_threshold", "threshold_report",
    "classify", "Verdict", "VerdictTag",
]
