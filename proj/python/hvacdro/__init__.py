"""Day-ahead HVAC on/off scheduling under ambient temperature uncertainty."""

from ._hvacdro import (
    BuildingModel,
    DiscreteDistribution,
    DomainError,
    HorizonConfig,
    InfeasibleModel,
    InputError,
    ProblemInstance,
    check_min_updown,
    evaluate,
    inner_worst_expectation,
    intuitive_instance,
    load_instance,
    parse_instance,
    sample,
    simulate,
    solve_method,
    synthetic_practical_instance,
    table1,
    wasserstein,
    worst_two_point,
)

__all__ = [
    "BuildingModel",
    "DiscreteDistribution",
    "DomainError",
    "HorizonConfig",
    "InfeasibleModel",
    "InputError",
    "ProblemInstance",
    "check_min_updown",
    "evaluate",
    "inner_worst_expectation",
    "intuitive_instance",
    "load_instance",
    "parse_instance",
    "sample",
    "simulate",
    "solve_method",
    "synthetic_practical_instance",
    "table1",
    "wasserstein",
    "worst_two_point",
]
