"""Finite (super)martingale models, exact enumeration, Monte Carlo and checks."""
from .enumeration import EnumerationResult, enumerate_exact
from .models import (
    Branch,
    MartingaleModel,
    Step,
    TwoPointIncrement,
    adapted_sign_model,
    center_model,
    drifted_model,
    model_from_spec,
    rademacher_model,
    skewed_variance_model,
    two_point_increment,
    two_point_model,
)
from .simulation import MCResult, simulate_mc
from .verification import (
    VerificationReport,
    verify_centering,
    verify_lemma_LR,
    verify_maximal_moment,
    verify_moment_domination,
    verify_tail_domination,
)

__all__ = [
    "Branch",
    "EnumerationResult",
    "MCResult",
    "MartingaleModel",
    "Step",
    "TwoPointIncrement",
    "VerificationReport",
    "adapted_sign_model",
    "center_model",
    "drifted_model",
    "enumerate_exact",
    "model_from_spec",
    "rademacher_model",
    "simulate_mc",
    "skewed_variance_model",
    "two_point_increment",
    "two_point_model",
    "verify_centering",
    "verify_lemma_LR",
    "verify_maximal_moment",
    "verify_moment_domination",
    "verify_tail_domination",
]
