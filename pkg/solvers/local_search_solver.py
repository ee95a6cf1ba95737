"""
Unweighted b-exchange local search.
"""
import logging
from typing import Optional, Tuple

from src.conflict_graph import ConflictGraph
from src.exceptions import IncompatibleAlgorithm
from src.local_search import LocalSearchConfig, local_search
from src.lp import FractionalSolution
from src.models import Instance, SelectionResult
from solvers.base_solver import BaseSolver

logger = logging.getLogger(__name__)


class LocalSearchSolver(BaseSolver):
    name = "local-search"

    def check_compatible(self, instance: Instance) -> None:
        if not instance.is_unit_weight:
            raise IncompatibleAlgorithm("local-search is unweighted; the instance has distinct weights")

    def config_for(self, instance: Instance) -> LocalSearchConfig:
        if self.params.b is not None:
            return LocalSearchConfig(b=self.params.b, max_exchanges=self.params.max_exchanges, seed=self.params.seed)
        return LocalSearchConfig.for_family(instance.family, max_exchanges=self.params.max_exchanges,
                                            seed=self.params.seed)

    def select(self, instance: Instance, graph: ConflictGraph) -> Tuple[SelectionResult, Optional[FractionalSolution]]:
        cfg = self.config_for(instance)
        logger.debug(f"Local search with b={cfg.b}")
        return local_search(graph, cfg), None
