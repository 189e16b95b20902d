"""Metaplectic time-frequency analysis.

Symplectic bookkeeping, a closed-form Gaussian reference, sampled
metaplectic operators and the distributions, frames and norms built on
them.
"""

from .distributions import (
    covariance_check,
    cohen_multiplier_check,
    named_distribution,
    projection_of,
    stft_grid,
    tf_shift,
    wigner_A_grid,
)
from .frames import Lattice, atom, dual_window, inversion_integral, reconstruct
from .gaussian import GeneralizedGaussian, standard_gaussian, wigner_A_gaussian
from .kernels import BACKEND
from .metaplectic import (
    SampledSignal,
    TimeFrequencyGrid,
    apply_discrete,
    factorize,
    phase_blind_compare,
)
from .modspaces import MixedNormSpec, equivalence_ratio, mixed_norm, mod_norm, rihaczek_identity_check
from .symplectic import (
    BlockSymplectic,
    classify,
    derived_blocks,
    is_covariant,
    is_shift_invertible,
    make_composite,
    make_named,
    random_symplectic,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BlockSymplectic",
    "GeneralizedGaussian",
    "Lattice",
    "MixedNormSpec",
    "SampledSignal",
    "TimeFrequencyGrid",
    "apply_discrete",
    "atom",
    "classify",
    "cohen_multiplier_check",
    "covariance_check",
    "derived_blocks",
    "dual_window",
    "equivalence_ratio",
    "factorize",
    "inversion_integral",
    "is_covariant",
    "is_shift_invertible",
    "make_composite",
    "make_named",
    "mixed_norm",
    "mod_norm",
    "named_distribution",
    "phase_blind_compare",
    "projection_of",
    "random_symplectic",
    "reconstruct",
    "rihaczek_identity_check",
    "standard_gaussian",
    "stft_grid",
    "tf_shift",
    "wigner_A_gaussian",
    "wigner_A_grid",
]
