"""Load-shedding optimisers over a :class:`ProblemInstance`."""

from .approx import idls_2d_knapsack, idls_tricriteria, imls_bicriteria, imls_knapsack_greedy
from .exact import brute_force_integral, fcls_greedy, icls_dp, icls_fptas, imls_multitenant_dp
from .fractional import (
    CurvatureWitness,
    NormalizedInstance,
    fmls_grid_search,
    fmls_normalize,
    grid_bound_factor,
    grid_size,
    nonconcavity_witness,
)
from .model import (
    Coupling,
    FractionalPlan,
    Guarantee,
    GuaranteeKind,
    IntegralPlan,
    PlanEvaluation,
    ProblemInstance,
    Variant,
    evaluate_fractional,
    evaluate_integral,
    full_keep_plan,
    plan_from_events,
    plan_from_queries,
)
from .random_instances import random_fitting_instance, random_instance

__all__ = [
    "Coupling",
    "CurvatureWitness",
    "FractionalPlan",
    "Guarantee",
    "GuaranteeKind",
    "IntegralPlan",
    "NormalizedInstance",
    "PlanEvaluation",
    "ProblemInstance",
    "Variant",
    "brute_force_integral",
    "evaluate_fractional",
    "evaluate_integral",
    "fcls_greedy",
    "fmls_grid_search",
    "fmls_normalize",
    "full_keep_plan",
    "grid_bound_factor",
    "grid_size",
    "icls_dp",
    "icls_fptas",
    "idls_2d_knapsack",
    "idls_tricriteria",
    "imls_bicriteria",
    "imls_knapsack_greedy",
    "imls_multitenant_dp",
    "nonconcavity_witness",
    "plan_from_events",
    "plan_from_queries",
    "random_fitting_instance",
    "random_instance",
]
