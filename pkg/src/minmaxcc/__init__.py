"""Min-max correlation clustering and min-max multicut."""

from .complete import CcReport, solve_cc_complete
from .graph import (
    Clustering,
    Measure,
    MulticutInstance,
    Partition,
    SignedGraph,
    boundary,
    max_disagreement,
    set_cost,
    vio,
)
from .multicut import solve_constrained_multicut, solve_multicut
from .oracle import exact_cc, exact_multicut
from .reduction import cc_to_multicut

__all__ = [
    "CcReport",
    "Clustering",
    "Measure",
    "MulticutInstance",
    "Partition",
    "SignedGraph",
    "boundary",
    "cc_to_multicut",
    "exact_cc",
    "exact_multicut",
    "max_disagreement",
    "set_cost",
    "solve_cc_complete",
    "solve_constrained_multicut",
    "solve_multicut",
    "vio",
]
