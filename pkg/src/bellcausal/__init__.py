"""Causal discovery on exact discrete distributions and quantum Bell correlations."""

from .distributions import CausalModel, Cpt, DistributionError, JointDistribution, joint_from_model
from .graphs import Dag, GraphError, LatentStructure, Pattern, d_separated, to_dot
from .independence import CISet, CIStatement, parse_statement, semigraphoid_closure

__all__ = [
    "CISet",
    "CIStatement",
    "CausalModel",
    "Cpt",
    "Dag",
    "DistributionError",
    "GraphError",
    "JointDistribution",
    "LatentStructure",
    "Pattern",
    "d_separated",
    "joint_from_model",
    "parse_statement",
    "semigraphoid_closure",
    "to_dot",
]
