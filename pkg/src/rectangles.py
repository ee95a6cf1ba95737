"""
Weighted axis-aligned rectangles.

Conflicts split into G1 (boundaries cross 0 or 2 times: corner overlap or
nesting) and G2 (4 crossings: the rectangles form a plus sign). LP rounding
runs against G1 only; the survivors' G2 graph is a comparability graph, so
coloring by longest chain in the crossing order uses exactly depth-many
colors, and the heaviest color class is returned.
"""
import logging
import math
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from utils.config import GEOMETRY_CONFIG, LP_CONFIG
from src.conflict_graph import ConflictGraph, build_geometric
from src.exceptions import CycleDetected, IncompatibleAlgorithm
from src.geometry import boundary_intersection_count, enumerate_arrangement
from src.lp import FractionalSolution, build_independent_set_lp, solve_packing_lp
from src.models import AxisRect, FamilyKind, Instance, SelectionResult
from src.rounding import (
    ContentionEstimator,
    RoundingConfig,
    coin_probabilities,
    randomized_round,
    resistance_permutation,
    resolve_tau,
)

logger = logging.getLogger(__name__)

Edge = Tuple[int, int]


@dataclass(frozen=True)
class EdgeSplit:
    g1_edges: Tuple[Edge, ...]
    g2_edges: Tuple[Edge, ...]

    @property
    def all_edges(self) -> Tuple[Edge, ...]:
        return tuple(sorted(self.g1_edges + self.g2_edges))


@dataclass(frozen=True)
class ChainColoring:
    color: Dict[int, int]
    num_colors: int

    def classes(self) -> Dict[int, Tuple[int, ...]]:
        grouped: Dict[int, List[int]] = {}
        for i, c in sorted(self.color.items()):
            grouped.setdefault(c, []).append(i)
        return {c: tuple(ids) for c, ids in sorted(grouped.items())}


def _rects(instance: Instance) -> List[AxisRect]:
    if instance.family.kind != FamilyKind.RECTANGLES:
        raise IncompatibleAlgorithm(f"rectangle pipeline needs the rectangles family, got '{instance.family.kind.value}'")
    shapes = instance.shapes
    for i, s in enumerate(shapes):
        if not isinstance(s, AxisRect):
            raise IncompatibleAlgorithm(f"object {i} is not an axis-aligned rectangle")
    return shapes


# ============================================================
# EDGE SPLIT AND CHAIN COLORING
# ============================================================

def crossing_order(a: AxisRect, b: AxisRect) -> bool:
    """a precedes b iff a's x-interval lies inside b's and b's y-interval inside a's."""
    return b.x0 < a.x0 and a.x1 < b.x1 and a.y0 < b.y0 and b.y1 < a.y1


def crosses(a: AxisRect, b: AxisRect) -> bool:
    return crossing_order(a, b) or crossing_order(b, a)


def split_edges(instance: Instance, graph: Optional[ConflictGraph] = None,
                eps: float = GEOMETRY_CONFIG["eps_geom"]) -> EdgeSplit:
    """Partition the geometric conflicts into G1 and G2 by boundary crossing count."""
    rects = _rects(instance)
    graph = graph or build_geometric(instance, eps)
    g1: List[Edge] = []
    g2: List[Edge] = []
    for i, j in graph.edges():
        if boundary_intersection_count(rects[i], rects[j], eps) == 4:
            g2.append((i, j))
        else:
            g1.append((i, j))
    logger.debug(f"Edge split: |G1|={len(g1)}, |G2|={len(g2)}")
    return EdgeSplit(g1_edges=tuple(g1), g2_edges=tuple(g2))


def chain_color(instance: Instance, ids: Iterable[int], g2_edges: Iterable[Edge]) -> ChainColoring:
    """
    Color each rectangle by the length of the longest crossing-order chain
    ending at it. Only G2 edges inside ids are used.
    """
    rects = instance.shapes
    chosen = sorted(set(ids))
    members = set(chosen)
    order = nx.DiGraph()
    order.add_nodes_from(chosen)
    for i, j in g2_edges:
        if i not in members or j not in members:
            continue
        if crossing_order(rects[i], rects[j]):
            order.add_edge(i, j)
        elif crossing_order(rects[j], rects[i]):
            order.add_edge(j, i)
        else:
            raise CycleDetected(f"G2 pair ({i}, {j}) is not comparable in the crossing order")

    color: Dict[int, int] = {}
    try:
        for v in nx.topological_sort(order):
            color[v] = 1 + max((color[u] for u in order.predecessors(v)), default=0)
    except nx.NetworkXUnfeasible as e:
        raise CycleDetected(f"crossing order over {len(chosen)} rectangles has a cycle") from e
    return ChainColoring(color=color, num_colors=max(color.values(), default=0))


def heaviest_class(coloring: ChainColoring, weights: Sequence[float]) -> Tuple[int, Tuple[int, ...], Dict[int, float]]:
    """(color, members, weight per color) of the heaviest class; ties go to the smaller color."""
    classes = coloring.classes()
    class_weights = {c: float(sum(weights[i] for i in members)) for c, members in classes.items()}
    if not classes:
        return 0, (), {}
    best = max(classes, key=lambda c: (class_weights[c], -c))
    return best, classes[best], class_weights


# ============================================================
# DEPTH
# ============================================================

def max_depth(instance: Instance, ids: Iterable[int]) -> int:
    """
    Largest number of the given rectangles sharing a point. The deepest
    region's lower-left corner is (x0 of some a, y0 of some b), so those
    points are the only candidates.
    """
    rects = [instance.shapes[i] for i in sorted(set(ids))]
    if not rects:
        return 0
    x0 = np.array([r.x0 for r in rects])
    y0 = np.array([r.y0 for r in rects])
    x1 = np.array([r.x1 for r in rects])
    y1 = np.array([r.y1 for r in rects])
    in_y = (y0[None, :] <= y0[:, None]) & (y0[:, None] <= y1[None, :])  # [b, c]: y0_b within c
    best = 0
    for a in range(len(rects)):
        in_x = (x0 <= x0[a]) & (x0[a] <= x1)
        best = max(best, int((in_y & in_x[None, :]).sum(axis=1).max()))
    return best


def depth_bound(n: int) -> float:
    """Empirical cap 2 ln n / ln ln n + 3 on the sample depth."""
    if n <= 3:
        return float(n)
    return 2.0 * math.log(n) / math.log(math.log(n)) + 3.0


def choose_t(n: int, vertex_count: int) -> int:
    """Smallest integer t >= 1 with (e/t)^t * |V| <= 1/n."""
    target = -math.log(max(n, 1)) - math.log(max(vertex_count, 1))
    t = 1
    while t * (1.0 - math.log(t)) > target:
        t += 1
    return t


# ============================================================
# PIPELINE
# ============================================================

def _solve_lp(instance: Instance, lp_solution: Optional[FractionalSolution], eps: float, method: str) -> FractionalSolution:
    if lp_solution is not None:
        return lp_solution
    return solve_packing_lp(build_independent_set_lp(instance), eps=eps, method=method)


def rectangle_mwis(instance: Instance, cfg: RoundingConfig,
                   lp_solution: Optional[FractionalSolution] = None,
                   eps: float = LP_CONFIG["eps"], method: str = LP_CONFIG["method"]) -> SelectionResult:
    """Round against G1, color the survivors by crossing chains, keep the heaviest class."""
    if cfg.derandomize:
        return derandomized_rectangle_mwis(instance, cfg, lp_solution, eps, method)

    _rects(instance)
    graph = build_geometric(instance)
    split = split_edges(instance, graph)
    g1 = ConflictGraph.from_edges(instance.n, split.g1_edges)
    solution = _solve_lp(instance, lp_solution, eps, method)

    sample = randomized_round(g1, solution, cfg, instance.weights, family=instance.family)
    return _finish(instance, split, solution, sample.chosen, sample.trace)


def _finish(instance: Instance, split: EdgeSplit, solution: FractionalSolution,
            sample: Sequence[int], rounding_trace: dict, extra: Optional[dict] = None) -> SelectionResult:
    coloring = chain_color(instance, sample, split.g2_edges)
    color, members, class_weights = heaviest_class(coloring, instance.weights)
    logger.info(f"Rectangle pipeline: |R|={len(sample)}, depth={coloring.num_colors}, kept color {color} ({len(members)} objects)")
    trace = {
        "algorithm": "rectangles",
        "g1_edges": len(split.g1_edges),
        "g2_edges": len(split.g2_edges),
        "lp_value": solution.value,
        "tau": rounding_trace.get("tau"),
        "sample": list(sample),
        "delta": coloring.num_colors,
        "class_weights": {str(c): w for c, w in class_weights.items()},
        "chosen_color": color,
        "rounding": rounding_trace,
    }
    trace.update(extra or {})
    return SelectionResult.from_ids(members, instance.weights, trace)


# ============================================================
# DERANDOMIZATION
# ============================================================

class DepthPenalty:
    """
    Opt * sum_p E[(1 + d_p)^(depth(p, C) - t) | decisions] over arrangement
    points p with positive LP mass, where d_p = t / mu_p - 1 and
    mu_p = sum of x over objects containing p. Each factor is a product of
    independent per-object terms, so the expectation is exact.
    """

    def __init__(self, coverings: Sequence[Tuple[int, ...]], x: np.ndarray, probs: np.ndarray,
                 t: int, opt: float, n: int):
        self.opt = opt
        self.probs = probs
        self.delta: List[float] = []
        self.factor: List[float] = []
        self.points_of: List[List[int]] = [[] for _ in range(n)]
        for cover in coverings:
            mu = float(sum(x[i] for i in cover))
            if mu <= 0:
                continue
            d = t / mu - 1.0
            k = len(self.delta)
            self.delta.append(d)
            self.factor.append((1.0 + d) ** (-t) * math.prod(1.0 + d * probs[i] for i in cover))
            for i in cover:
                self.points_of[i].append(k)

    @property
    def value(self) -> float:
        return self.opt * math.fsum(self.factor)

    def change(self, j: int, in_candidates: bool) -> float:
        total = 0.0
        for k in self.points_of[j]:
            d = self.delta[k]
            new = (1.0 + d) if in_candidates else 1.0
            total += self.factor[k] * (new / (1.0 + d * self.probs[j]) - 1.0)
        return self.opt * total

    def commit(self, j: int, in_candidates: bool) -> None:
        for k in self.points_of[j]:
            d = self.delta[k]
            new = (1.0 + d) if in_candidates else 1.0
            self.factor[k] *= new / (1.0 + d * self.probs[j])


def _distinct_coverings(instance: Instance) -> List[Tuple[int, ...]]:
    seen = {}
    for v in enumerate_arrangement(instance).vertices:
        key = (round(v.p[0], 12), round(v.p[1], 12))
        seen.setdefault(key, v.covering)
    return list(seen.values())


def derandomized_rectangle_mwis(instance: Instance, cfg: RoundingConfig,
                                lp_solution: Optional[FractionalSolution] = None,
                                eps: float = LP_CONFIG["eps"],
                                method: str = LP_CONFIG["method"]) -> SelectionResult:
    """
    Fix the G1 coins one by one, maximizing
        Phi' = Phi_G1 / t - Opt * sum_p E[(1 + d_p)^(depth(p, C) - t)].
    The final Phi' is the Z value, a lower bound on the returned weight.
    """
    _rects(instance)
    graph = build_geometric(instance)
    split = split_edges(instance, graph)
    g1 = ConflictGraph.from_edges(instance.n, split.g1_edges)
    solution = _solve_lp(instance, lp_solution, eps, method)
    x = np.asarray(solution.x, dtype=float)

    tau = resolve_tau(cfg, instance.family)
    probs, clamped = coin_probabilities(x, tau)
    perm = resistance_permutation(g1, x)
    coverings = _distinct_coverings(instance)
    t = choose_t(instance.n, len(coverings))

    estimator = ContentionEstimator(g1, probs, instance.weights, perm.scan_order)
    penalty = DepthPenalty(coverings, x, probs, t, solution.value, instance.n)

    phi = [estimator.value / t - penalty.value]
    candidates = []
    for j in perm.scan_order:
        if probs[j] <= 0.0 or probs[j] >= 1.0:
            heads = bool(probs[j] >= 1.0)
        else:
            heads_value = estimator.branch(j, True)[0] / t - penalty.change(j, True)
            tails_value = estimator.branch(j, False)[0] / t - penalty.change(j, False)
            heads = bool(heads_value > tails_value)
        estimator.commit(j, heads)
        penalty.commit(j, heads)
        if heads:
            candidates.append(j)
        phi.append(estimator.value / t - penalty.value)

    z = phi[-1]
    rounding_trace = {
        "algorithm": "lp-round-derand",
        "tau": tau,
        "permutation": list(perm.order),
        "etas": list(perm.etas),
        "clamped": clamped,
        "candidates": sorted(candidates),
    }
    result = _finish(instance, split, solution, sorted(estimator.in_set), rounding_trace,
                     {"t": t, "phi": phi, "z": z})
    logger.info(f"Derandomized rectangles: t={t}, Z={z:.4f}, weight={result.total_weight:.4f}")
    return result
