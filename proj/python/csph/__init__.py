"""Bivariate common-shock phase-type distributions.

Thin wrapper around the C++ core; see the project README for the model and
the CLI. All heavy lifting lives in the compiled ``_csph`` module.
"""

from ._csph import (
    CSPHModel,
    MPHModel,
    MomentSet,
    ReducedModel,
    FitResult,
    ModelValidationError,
    EvaluationDomainError,
    marginal_pdf,
    marginal_cdf,
    joint_pdf,
    joint_cdf,
    joint_mgf,
    trivariate_density,
    shock_density,
    master_moment,
    moment_set,
    pearson,
    value_at_risk,
    entropic_risk,
    cvar_cs,
    mtce_cs,
    mtcov_cs,
    regular_variation_index,
    entry_weights,
    cond_mean,
    cond_var,
    cond_pearson,
    cond_kendall,
    cond_spearman,
    csph_from_mph,
    mph_joint_cdf,
    sample,
    fit,
    load_model,
    save_model,
)

__all__ = [
    "CSPHModel",
    "MPHModel",
    "MomentSet",
    "ReducedModel",
    "FitResult",
    "ModelValidationError",
    "EvaluationDomainError",
    "marginal_pdf",
    "marginal_cdf",
    "joint_pdf",
    "joint_cdf",
    "joint_mgf",
    "trivariate_density",
    "shock_density",
    "master_moment",
    "moment_set",
    "pearson",
    "value_at_risk",
    "entropic_risk",
    "cvar_cs",
    "mtce_cs",
    "mtcov_cs",
    "regular_variation_index",
    "entry_weights",
    "cond_mean",
    "cond_var",
    "cond_pearson",
    "cond_kendall",
    "cond_spearman",
    "csph_from_mph",
    "mph_joint_cdf",
    "sample",
    "fit",
    "load_model",
    "save_model",
]
