"""Reference integration, derivative statistics, the sharpness witness and the corpus."""

from .corpus import corpus_entry, density_entry, horner, make_corpus, make_density_corpus
from .integrands import (
    ExpressionIntegrand,
    ExtremalWitness,
    Integrand,
    NativeIntegrand,
    as_integrand,
    derivative_mismatch,
    extremal_eval,
)
from .integrate import RTOL_ENV_VAR, default_rel_tol, integrate
from .sharpness import SharpnessRow, predicted_ratio, sharpness_ratio, sharpness_row
from .stats import estimate_stats, extremes, sign_change_roots

__all__ = [
    "Integrand",
    "ExpressionIntegrand",
    "NativeIntegrand",
    "ExtremalWitness",
    "as_integrand",
    "extremal_eval",
    "derivative_mismatch",
    "integrate",
    "default_rel_tol",
    "RTOL_ENV_VAR",
    "estimate_stats",
    "extremes",
    "sign_change_roots",
    "SharpnessRow",
    "sharpness_row",
    "sharpness_ratio",
    "predicted_ratio",
    "make_corpus",
    "corpus_entry",
    "density_entry",
    "make_density_corpus",
    "horner",
]
