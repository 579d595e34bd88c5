"""Finite-element solver for the crack form on a truncated box."""

from .assembly import FormAssembly, assemble, crack_jump_weights, omega_at_crack
from .critical import CriticalBracket, MonotonicityError, estimate_critical_strength
from .disc_form import (JumpField, evaluate_disc_form, field_scale, gradient_energy,
                        interface_energy, pointwise_threshold_profile)
from .mesh import CrackMesh, build_crack_mesh
from .transport import arc_polyline, lft_pullback_spectrum, segment_of
from .spectrum import (DIRECT_LABEL, LFT_LABEL, NEGATIVE, NO_NEGATIVE, SpectralReport,
                       lowest_eigenvalues, numeric_verdict)

__all__ = [
    "CrackMesh", "build_crack_mesh", "FormAssembly", "assemble", "crack_jump_weights",
    "omega_at_crack", "SpectralReport", "lowest_eigenvalues", "numeric_verdict",
    "NO_NEGATIVE", "NEGATIVE", "DIRECT_LABEL", "LFT_LABEL", "JumpField", "evaluate_disc_form",
    "gradient_energy", "interface_energy", "field_scale", "pointwise_threshold_profile",
    "lft_pullback_spectrum", "arc_polyline", "segment_of", "CriticalBracket", "MonotonicityError", "estimate_critical_strength",
]
