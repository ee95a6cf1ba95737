"""
Exact maximum-weight independent set for small instances.
"""
from typing import Optional, Tuple

from utils.config import ORACLE_CONFIG
from src.conflict_graph import ConflictGraph
from src.exceptions import TooLarge
from src.lp import FractionalSolution
from src.models import Instance, SelectionResult
from src.oracle import exact_mwis
from solvers.base_solver import BaseSolver


class ExactSolver(BaseSolver):
    name = "exact"

    def check_compatible(self, instance: Instance) -> None:
        if instance.n > ORACLE_CONFIG["max_mwis_n"]:
            raise TooLarge(f"exact accepts n <= {ORACLE_CONFIG['max_mwis_n']}, got {instance.n}")

    def select(self, instance: Instance, graph: ConflictGraph) -> Tuple[SelectionResult, Optional[FractionalSolution]]:
        ids, value = exact_mwis(graph, instance.weights)
        return SelectionResult.from_ids(ids, instance.weights, {"algorithm": "exact", "value": value}), None
