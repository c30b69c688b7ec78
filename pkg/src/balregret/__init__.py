"""Robust combinatorial optimization under balanced regret.

Solvers for min-max-min regret with budgeted uncertainty on selection,
knapsack, and shortest-path feasible sets, plus instance generators and
criteria evaluation.
"""

from .core import (
    AdversaryCertificate,
    BinarySolution,
    Budgets,
    InfeasibleError,
    InputError,
    Instance,
    ItemCosts,
    Knapsack,
    MultiRepSelection,
    ScaleError,
    Scenario,
    ShortestPath,
    enumerate_solutions,
    is_feasible,
    nominal_solve,
    solution_count,
)

__version__ = "0.1.0"

__all__ = [
    "AdversaryCertificate",
    "BinarySolution",
    "Budgets",
    "InfeasibleError",
    "InputError",
    "Instance",
    "ItemCosts",
    "Knapsack",
    "MultiRepSelection",
    "ScaleError",
    "Scenario",
    "ShortestPath",
    "enumerate_solutions",
    "is_feasible",
    "nominal_solve",
    "solution_count",
    "__version__",
]
