"""Multi-objective conflict-based search for multi-agent path finding."""
from .pareto import ContractError, comax, dominates, nd_filter, weakly_dominates
from .instance import Agent, Graph, Instance, load_instance_json, fig1_instance
from .constraints import Constraint, ConstraintSet
from .lowlevel import LowLevel, Path, pareto_paths
from .highlevel import Result, Solution, solve

__all__ = ["ContractError", "comax", "dominates", "nd_filter", "weakly_dominates", "Agent",
           "Graph", "Instance", "load_instance_json", "fig1_instance", "Constraint",
           "ConstraintSet", "LowLevel", "Path", "pareto_paths", "Result", "Solution", "solve"]
__version__ = "0.1.0"
