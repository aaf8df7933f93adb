"""Norms, decay fits and inequality checks."""

from __future__ import annotations

from .estimates import (
    KatoResult,
    SmoothingPair,
    StrichartzPair,
    dispersive_rate,
    dispersive_ratio,
    kato_smoothing_ratio,
    smoothing_ratio,
    strichartz_ratio,
)
from .fitting import DecayFit, decay_fit
from .inequalities import (
    FORMS,
    InequalityEntry,
    InequalityReport,
    calibrated_corpus,
    commutator_check,
    commutator_corpus,
    lorentz_embedding_corpus,
    lorentz_holder_corpus,
    random_smooth_field,
)
from .norms import (
    AnisotropicYX,
    Lebesgue,
    Lorentz,
    MixedXT,
    NormSpec,
    Sobolev,
    conjugate,
    lorentz_norm,
    mixed_norm,
    norm,
    trapezoid_weights,
)

__all__ = [
    "AnisotropicYX",
    "DecayFit",
    "FORMS",
    "InequalityEntry",
    "InequalityReport",
    "KatoResult",
    "Lebesgue",
    "Lorentz",
    "MixedXT",
    "NormSpec",
    "SmoothingPair",
    "Sobolev",
    "StrichartzPair",
    "calibrated_corpus",
    "commutator_check",
    "commutator_corpus",
    "conjugate",
    "decay_fit",
    "dispersive_rate",
    "dispersive_ratio",
    "kato_smoothing_ratio",
    "lorentz_embedding_corpus",
    "lorentz_holder_corpus",
    "lorentz_norm",
    "mixed_norm",
    "norm",
    "random_smooth_field",
    "smoothing_ratio",
    "strichartz_ratio",
    "trapezoid_weights",
]
