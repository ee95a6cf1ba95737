"""
LP relaxation followed by contention-resolution rounding, in geometric
and discrete modes.
"""
import logging
from typing import Optional, Tuple

from src.conflict_graph import ConflictGraph, GraphMode, build_discrete
from src.exceptions import IncompatibleAlgorithm
from src.lp import FractionalSolution, build_independent_set_lp, solve_packing_lp
from src.models import Instance, SelectionResult
from src.rounding import RoundingConfig, derandomized_round, randomized_round
from solvers.base_solver import BaseSolver

logger = logging.getLogger(__name__)


class LPRoundSolver(BaseSolver):
    name = "lp-round"
    mode = GraphMode.GEOMETRIC

    @property
    def derandomize(self) -> bool:
        return self.params.derandomize

    def rounding_config(self) -> RoundingConfig:
        return RoundingConfig(tau=self.params.tau, seed=self.params.seed,
                              derandomize=self.derandomize, c_tau=self.params.c_tau)

    def select(self, instance: Instance, graph: ConflictGraph) -> Tuple[SelectionResult, Optional[FractionalSolution]]:
        lp = build_independent_set_lp(instance, self.mode)
        solution = solve_packing_lp(lp, eps=self.params.eps, method=self.params.method)
        logger.info(f"{self.name}: LP value {solution.value:.4f} over {len(lp.rows)} rows")

        cfg = self.rounding_config()
        rounder = derandomized_round if cfg.derandomize else randomized_round
        result = rounder(graph, solution, cfg, instance.weights, family=instance.family)
        result.trace["lp_value"] = solution.value
        result.trace["lp_warnings"] = list(lp.warnings)
        result.trace["mode"] = self.mode.value
        return result, solution


class DerandomizedLPRoundSolver(LPRoundSolver):
    name = "lp-round-derand"

    @property
    def derandomize(self) -> bool:
        return True


class DiscreteLPRoundSolver(LPRoundSolver):
    name = "discrete-lp-round"
    mode = GraphMode.DISCRETE

    def check_compatible(self, instance: Instance) -> None:
        if instance.points is None:
            raise IncompatibleAlgorithm("discrete-lp-round needs an instance with a point set")

    def build_graph(self, instance: Instance) -> ConflictGraph:
        return build_discrete(instance)
