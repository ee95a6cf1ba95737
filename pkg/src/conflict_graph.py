"""
Conflict (intersection) graph over object ids, in geometric mode (regions
overlap) or discrete mode (regions share a point of the instance's P).
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

import networkx as nx

from utils.config import GEOMETRY_CONFIG
from src.exceptions import MissingPoints
from src.geometry import BoxIndex, intersects
from src.models import Instance, Point

logger = logging.getLogger(__name__)


class GraphMode(str, Enum):
    GEOMETRIC = "geometric"
    DISCRETE = "discrete"


@dataclass(frozen=True)
class ConflictGraph:
    n: int
    adjacency: Tuple[Tuple[int, ...], ...]
    mode: GraphMode = GraphMode.GEOMETRIC
    witness: Dict[Tuple[int, int], Point] = field(default_factory=dict)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Tuple[int, int]],
                   mode: GraphMode = GraphMode.GEOMETRIC,
                   witness: Optional[Dict[Tuple[int, int], Point]] = None) -> "ConflictGraph":
        neighbors: List[set] = [set() for _ in range(n)]
        for i, j in edges:
            if i == j:
                continue
            neighbors[i].add(j)
            neighbors[j].add(i)
        adjacency = tuple(tuple(sorted(s)) for s in neighbors)
        return cls(n=n, adjacency=adjacency, mode=mode, witness=dict(witness or {}))

    def neighbors(self, i: int) -> Tuple[int, ...]:
        return self.adjacency[i]

    def has_edge(self, i: int, j: int) -> bool:
        return j in self._neighbor_sets[i]

    @property
    def _neighbor_sets(self) -> List[frozenset]:
        cached = self.__dict__.get("_sets")
        if cached is None:
            cached = [frozenset(adj) for adj in self.adjacency]
            object.__setattr__(self, "_sets", cached)
        return cached

    def edges(self) -> Iterator[Tuple[int, int]]:
        for i, adj in enumerate(self.adjacency):
            for j in adj:
                if i < j:
                    yield (i, j)

    @property
    def edge_count(self) -> int:
        return sum(len(adj) for adj in self.adjacency) // 2

    def degree(self, i: int) -> int:
        return len(self.adjacency[i])

    def to_networkx(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(range(self.n))
        graph.add_edges_from(self.edges())
        return graph

    def to_dimacs(self) -> str:
        lines = [f"p edge {self.n} {self.edge_count}"]
        lines.extend(f"e {i} {j}" for i, j in self.edges())
        return "\n".join(lines) + "\n"


def build_geometric(instance: Instance, eps: float = GEOMETRY_CONFIG["eps_geom"]) -> ConflictGraph:
    """Edge (i, j) iff the closed regions of i and j intersect."""
    shapes = instance.shapes
    index = BoxIndex(shapes, eps)
    edges = [(i, j) for i, j in index.candidate_pairs() if intersects(shapes[i], shapes[j], eps)]
    logger.debug(f"Geometric conflict graph: n={instance.n}, m={len(edges)}")
    return ConflictGraph.from_edges(instance.n, edges, GraphMode.GEOMETRIC)


def covered_points(instance: Instance, eps: float = GEOMETRY_CONFIG["eps_geom"]) -> List[Tuple[int, ...]]:
    """For every point of P, the sorted ids of objects containing it."""
    if instance.points is None:
        raise MissingPoints("instance has no discrete point set")
    index = BoxIndex(instance.shapes, eps)
    return [index.covering(p) for p in instance.points]


def build_discrete(instance: Instance, eps: float = GEOMETRY_CONFIG["eps_geom"]) -> ConflictGraph:
    """Edge (i, j) iff some point of P lies in both closed regions; the first such point is the witness."""
    covers = covered_points(instance, eps)
    witness: Dict[Tuple[int, int], Point] = {}
    for p, ids in zip(instance.points, covers):
        for a in range(len(ids)):
            for b in range(a + 1, len(ids)):
                witness.setdefault((ids[a], ids[b]), p)
    logger.debug(f"Discrete conflict graph: n={instance.n}, m={len(witness)}, |P|={len(instance.points)}")
    return ConflictGraph.from_edges(instance.n, witness.keys(), GraphMode.DISCRETE, witness)


def is_independent(graph: ConflictGraph, ids: Iterable[int]) -> bool:
    chosen = set(ids)
    return not any(j in chosen for i in chosen for j in graph.neighbors(i))


def subgraph_edges(graph: ConflictGraph, ids: Sequence[int]) -> List[Tuple[int, int]]:
    """Edges of graph with both endpoints in ids."""
    chosen = set(ids)
    return [(i, j) for i, j in graph.edges() if i in chosen and j in chosen]
