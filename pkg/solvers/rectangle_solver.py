"""
Weighted axis-aligned rectangles: G1 rounding plus chain coloring.
"""
from typing import Optional, Tuple

from src.conflict_graph import ConflictGraph
from src.exceptions import IncompatibleAlgorithm
from src.lp import FractionalSolution, build_independent_set_lp, solve_packing_lp
from src.models import FamilyKind, Instance, SelectionResult
from src.rectangles import rectangle_mwis
from src.rounding import RoundingConfig
from solvers.base_solver import BaseSolver


class RectangleSolver(BaseSolver):
    name = "rectangles"

    def check_compatible(self, instance: Instance) -> None:
        if instance.family.kind != FamilyKind.RECTANGLES:
            raise IncompatibleAlgorithm(
                f"rectangles needs the rectangles family, got '{instance.family.kind.value}'"
            )

    def select(self, instance: Instance, graph: ConflictGraph) -> Tuple[SelectionResult, Optional[FractionalSolution]]:
        solution = solve_packing_lp(build_independent_set_lp(instance), eps=self.params.eps, method=self.params.method)
        cfg = RoundingConfig(tau=self.params.tau, seed=self.params.seed,
                             derandomize=self.params.derandomize, c_tau=self.params.c_tau)
        return rectangle_mwis(instance, cfg, lp_solution=solution), solution
