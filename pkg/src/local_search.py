"""
Unweighted b-exchange local search.

Starting from the empty set, repeatedly look for an independent X outside L
with |X| <= b + 1 whose neighbors Y in L number at most |X| - 1, and replace
Y by X. Candidates are scanned by size, then lexicographically; the first
improving exchange is applied.
"""
import logging
import math
from dataclasses import dataclass
from typing import Iterator, List, Optional, Sequence, Set, Tuple

from utils.config import LOCAL_SEARCH_CONFIG
from utils.helpers import make_rng
from src.conflict_graph import ConflictGraph, is_independent
from src.exceptions import InvalidParameters, NotIndependent
from src.models import Family, FamilyKind, SelectionResult

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LocalSearchConfig:
    b: int = 1
    max_exchanges: Optional[int] = LOCAL_SEARCH_CONFIG["max_exchanges"]
    deterministic: bool = True
    seed: int = 0

    def __post_init__(self):
        if self.b < 1:
            raise InvalidParameters(f"exchange radius b must be >= 1, got {self.b}")

    @classmethod
    def for_family(cls, family: Family, eps: Optional[float] = None, **kwargs) -> "LocalSearchConfig":
        """
        b = ceil(1/eps^2) when a PTAS accuracy eps is requested, otherwise
        ceil(rho/2) from the family's union-complexity constant.
        """
        if eps is not None:
            b = math.ceil(1.0 / (eps * eps))
        elif family.kind in (FamilyKind.PSEUDO_DISKS, FamilyKind.ADMISSIBLE):
            b = math.ceil(family.union_constant / 2.0)
        else:
            b = LOCAL_SEARCH_CONFIG["default_b"]
        return cls(b=b, **kwargs)


def _improving_exchanges(graph: ConflictGraph, current: Set[int], in_count: List[int],
                         b: int, order: Sequence[int]) -> Iterator[Tuple[Tuple[int, ...], Tuple[int, ...]]]:
    """
    Yield (X, Y) exchanges that grow the set, sizes ascending, X in the given order.
    in_count[v] is |N(v) & current|.
    """
    for size in range(1, b + 2):
        budget = size - 1
        pool = [v for v in order if v not in current and in_count[v] <= budget]
        if len(pool) < size:
            continue

        def extend(start: int, chosen: List[int], blocked: Set[int], removed: Set[int]):
            if len(chosen) == size:
                yield tuple(chosen), tuple(sorted(removed))
                return
            for pos in range(start, len(pool) - (size - len(chosen)) + 1):
                v = pool[pos]
                if v in blocked:
                    continue
                lost = removed.union(u for u in graph.neighbors(v) if u in current)
                if len(lost) > budget:
                    continue
                chosen.append(v)
                yield from extend(pos + 1, chosen, blocked.union(graph.neighbors(v)), lost)
                chosen.pop()

        yield from extend(0, [], set(), set())


def _enumeration_order(n: int, cfg: LocalSearchConfig) -> List[int]:
    if cfg.deterministic:
        return list(range(n))
    return [int(v) for v in make_rng(cfg.seed).permutation(n)]


def local_search(graph: ConflictGraph, cfg: LocalSearchConfig) -> SelectionResult:
    """
    Run b-exchange local search from the empty set. Weights are ignored;
    total_weight is the cardinality of the returned set.
    """
    order = _enumeration_order(graph.n, cfg)
    current: Set[int] = set()
    in_count = [0] * graph.n
    exchanges = 0
    truncated = False
    history = []

    while True:
        if cfg.max_exchanges is not None and exchanges >= cfg.max_exchanges:
            truncated = True
            logger.warning(f"Local search stopped after {exchanges} exchanges (cap reached)")
            break
        step = next(_improving_exchanges(graph, current, in_count, cfg.b, order), None)
        if step is None:
            break
        inserted, deleted = step
        for v in deleted:
            current.discard(v)
            for u in graph.neighbors(v):
                in_count[u] -= 1
        for v in inserted:
            current.add(v)
            for u in graph.neighbors(v):
                in_count[u] += 1
        exchanges += 1
        history.append({"insert": list(inserted), "delete": list(deleted), "size": len(current)})
        logger.debug(f"Exchange {exchanges}: +{list(inserted)} -{list(deleted)} -> |L|={len(current)}")

    trace = {
        "algorithm": "local-search",
        "b": cfg.b,
        "exchanges": exchanges,
        "truncated": truncated,
        "history": history,
    }
    return SelectionResult.from_ids(current, [1.0] * graph.n, trace)


def verify_locally_optimal(graph: ConflictGraph, ids: Sequence[int],
                           b: int) -> Optional[Tuple[Tuple[int, ...], Tuple[int, ...]]]:
    """None iff ids is b-locally optimal; otherwise the first improving exchange (X, Y)."""
    current = set(ids)
    if not is_independent(graph, current):
        raise NotIndependent(f"id set {sorted(current)} contains a conflicting pair")
    in_count = [sum(1 for u in graph.neighbors(v) if u in current) for v in range(graph.n)]
    return next(_improving_exchanges(graph, current, in_count, b, list(range(graph.n))), None)
