"""Normal-domination tail and moment bounds for supermartingales."""
from ._accel import backend
from .constants import c_const, k1_const, k2_const, k3_const, k_const
from .errors import BudgetError, DomainError, NormboundError, SchemaError, ValidationError
from .normal_kernel import closed_form_R, mills_ratio, truncated_moment, upper_tail
from .tail_bounds import combined_bound, hoeffding_bound, optimal_bound, pinelis_bound

__version__ = "0.1.0"

__all__ = [
    "BudgetError",
    "DomainError",
    "NormboundError",
    "SchemaError",
    "ValidationError",
    "backend",
    "c_const",
    "closed_form_R",
    "combined_bound",
    "hoeffding_bound",
    "k1_const",
    "k2_const",
    "k3_const",
    "k_const",
    "mills_ratio",
    "optimal_bound",
    "pinelis_bound",
    "truncated_moment",
    "upper_tail",
]
