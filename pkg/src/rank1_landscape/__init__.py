"""Exact landscape analysis of the rank-one l1 factorization objective
``f(x, y) = ||x y^T - M||_1``."""

from .classify import (
    Classification,
    ClassCondition,
    DescentPlan,
    Kind,
    classify_point,
    descent_direction,
    spurious_probe,
    spurious_witness,
    theorem1_predicate,
    verify_descent,
)
from .core import (
    DimensionError,
    Instance,
    InternalError,
    Point,
    PreconditionViolated,
    RankTooHigh,
    eval_f,
    factor_rank_one,
    load_instance,
    load_point,
)
from .criticality import (
    CriticalityVerdict,
    Method,
    is_critical_closed_form,
    is_critical_directional,
    is_critical_lp,
    witness_lambda,
)
from .subdiff import (
    directional_derivative,
    partial_subdiff_x,
    partial_subdiff_y,
    roots,
    step_alpha,
    step_beta,
    zero_in_partials,
)

__version__ = "0.1.0"
