"""
Base solver class with the shared run/verify/report flow for every algorithm.
"""
import logging
import time
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, Dict, Optional, Tuple

from utils.config import LP_CONFIG, ORACLE_CONFIG, ROUNDING_CONFIG
from utils.helpers import elapsed_ms, safe_ratio
from src.conflict_graph import ConflictGraph, build_geometric, is_independent
from src.exceptions import NotIndependent
from src.lp import FractionalSolution
from src.models import Instance, SelectionResult
from src.oracle import exact_mwis

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SolveParams:
    """Knobs shared by the CLI and the bench harness; None means 'derive it'."""
    b: Optional[int] = None
    tau: Optional[float] = None
    c_tau: float = ROUNDING_CONFIG["c_tau"]
    eps: float = LP_CONFIG["eps"]
    seed: int = ROUNDING_CONFIG["seed"]
    derandomize: bool = False
    oracle: bool = False
    method: str = LP_CONFIG["method"]
    max_exchanges: Optional[int] = None


@dataclass
class SolveReport:
    algorithm: str
    result: SelectionResult
    lp_value: Optional[float] = None
    oracle_value: Optional[float] = None
    time_ms: float = 0.0
    truncated: bool = False

    @property
    def weight(self) -> float:
        return self.result.total_weight

    @property
    def ratio_to_lp(self) -> Optional[float]:
        return safe_ratio(self.weight, self.lp_value)

    @property
    def ratio_to_oracle(self) -> Optional[float]:
        return safe_ratio(self.weight, self.oracle_value)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "algorithm": self.algorithm,
            "chosen": list(self.result.chosen),
            "weight": self.weight,
            "lp_value": self.lp_value,
            "oracle_value": self.oracle_value,
            "ratio_to_lp": self.ratio_to_lp,
            "ratio_to_oracle": self.ratio_to_oracle,
            "time_ms": self.time_ms,
            "truncated": self.truncated,
            "trace": self.result.trace,
        }


class BaseSolver(ABC):
    """Abstract base class for independent-set algorithms."""

    name = "base"  # Override in subclasses

    def __init__(self, params: Optional[SolveParams] = None):
        self.params = params or SolveParams()

    def check_compatible(self, instance: Instance) -> None:
        """Raise IncompatibleAlgorithm when the instance does not fit. Override in subclasses."""

    def build_graph(self, instance: Instance) -> ConflictGraph:
        """Conflict graph the output must be independent in."""
        return build_geometric(instance)

    @abstractmethod
    def select(self, instance: Instance, graph: ConflictGraph) -> Tuple[SelectionResult, Optional[FractionalSolution]]:
        """Run the algorithm; return the selection and the LP solution it used, if any."""
        pass

    def solve(self, instance: Instance) -> SolveReport:
        """
        Main solving method.

        Args:
            instance: Validated instance with ids 0..n-1

        Returns:
            SolveReport with the selection re-verified against the conflict graph
        """
        self.check_compatible(instance)

        start = time.perf_counter()
        graph = self.build_graph(instance)
        result, lp = self.select(instance, graph)
        took = elapsed_ms(start)

        if not is_independent(graph, result.chosen):
            raise NotIndependent(f"{self.name} returned a conflicting set {list(result.chosen)}")
        result = SelectionResult.from_ids(result.chosen, instance.weights, result.trace)

        oracle_value = None
        if self.params.oracle:
            if instance.n <= ORACLE_CONFIG["max_mwis_n"]:
                oracle_value = exact_mwis(graph, instance.weights)[1]
            else:
                logger.warning(f"Oracle skipped: n={instance.n} exceeds {ORACLE_CONFIG['max_mwis_n']}")

        truncated = bool(result.trace.get("truncated")) or bool(lp is not None and lp.truncated)
        report = SolveReport(
            algorithm=self.name,
            result=result,
            lp_value=lp.value if lp is not None else None,
            oracle_value=oracle_value,
            time_ms=took,
            truncated=truncated,
        )
        logger.info(f"{self.name}: weight={report.weight:.4f}, |S|={len(result.chosen)}, {took:.1f} ms")
        return report
