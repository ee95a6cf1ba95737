# Solvers package
from typing import Optional

from solvers.base_solver import BaseSolver, SolveParams, SolveReport
from solvers.exact_solver import ExactSolver
from solvers.local_search_solver import LocalSearchSolver
from solvers.lp_round_solver import DerandomizedLPRoundSolver, DiscreteLPRoundSolver, LPRoundSolver
from solvers.rectangle_solver import RectangleSolver

SOLVERS = {
    'local-search': LocalSearchSolver,
    'lp-round': LPRoundSolver,
    'lp-round-derand': DerandomizedLPRoundSolver,
    'rectangles': RectangleSolver,
    'discrete-lp-round': DiscreteLPRoundSolver,
    'exact': ExactSolver,
}


def get_solver(algorithm: str, params: Optional[SolveParams] = None) -> BaseSolver:
    """Get solver instance by algorithm name."""
    solver_class = SOLVERS.get(algorithm.lower())
    if not solver_class:
        raise ValueError(f"Unknown algorithm: {algorithm}. Available: {list(SOLVERS.keys())}")
    return solver_class(params)


__all__ = [
    'BaseSolver',
    'SolveParams',
    'SolveReport',
    'get_solver',
    'SOLVERS',
]
