"""
Seeded random instances: disks, axis-aligned rectangles or squares with
centers uniform in the unit square and log-uniform sizes, scaled so the
expected number of overlapping partners per object is about `density`.
"""
import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from utils.config import GENERATOR_CONFIG
from utils.helpers import derive_seed, make_rng
from src.exceptions import InvalidParameters
from src.models import AxisRect, Disk, Family, Instance, make_instance

logger = logging.getLogger(__name__)

KINDS = ("disks", "rects", "squares")


def _log_uniform_moments(low: float, high: float) -> Tuple[float, float]:
    """E[u] and E[u^2] for u log-uniform on [low, high]."""
    span = math.log(high / low)
    return (high - low) / span, (high * high - low * low) / (2.0 * span)


def _scale(kind: str, n: int, density: float) -> float:
    """
    Common size scale s solving (n - 1) * P[overlap] = density, where
    P[overlap] ignores the unit-square border:
      disks   (radius s*u):        pi * s^2 * E[(u_i + u_j)^2]
      squares (side s*u):          s^2 * E[(u_i + u_j)^2]
      rects   (sides s*a, s*b):    s^2 * E[a_i + a_j] * E[b_i + b_j]
    """
    cfg = GENERATOR_CONFIG[kind]
    mean, second = _log_uniform_moments(cfg["low"], cfg["high"])
    pair = 2.0 * second + 2.0 * mean * mean
    if kind == "disks":
        per_pair = math.pi * pair
    elif kind == "squares":
        per_pair = pair
    else:
        per_pair = 4.0 * mean * mean
    return math.sqrt(density / (max(n - 1, 1) * per_pair))


def generate(kind: str, n: int, density: float, seed: int, unit: bool = False,
             points: int = 0) -> Instance:
    """Build a seeded instance; the same arguments always give the same instance."""
    if kind not in KINDS:
        raise InvalidParameters(f"Unknown kind: {kind}. Available: {list(KINDS)}")
    if n < 1:
        raise InvalidParameters(f"n must be >= 1, got {n}")
    if not density > 0:
        raise InvalidParameters(f"density must be positive, got {density}")
    if points < 0:
        raise InvalidParameters(f"points must be >= 0, got {points}")

    rng = make_rng(seed)
    cfg = GENERATOR_CONFIG[kind]
    s = _scale(kind, n, density)
    centers = rng.random((n, 2))
    log_low, log_high = math.log(cfg["low"]), math.log(cfg["high"])
    sizes = np.exp(rng.uniform(log_low, log_high, size=(n, 2)))
    if unit:
        weights = [1.0] * n
    else:
        weights = rng.uniform(GENERATOR_CONFIG["weight_min"], GENERATOR_CONFIG["weight_max"], size=n).tolist()

    shapes = []
    for (cx, cy), (a, b) in zip(centers.tolist(), sizes.tolist()):
        if kind == "disks":
            shapes.append(Disk(cx, cy, s * a))
        elif kind == "squares":
            half = s * a / 2.0
            shapes.append(AxisRect(cx - half, cy - half, cx + half, cy + half))
        else:
            hw, hh = s * a / 2.0, s * b / 2.0
            shapes.append(AxisRect(cx - hw, cy - hh, cx + hw, cy + hh))

    family = Family.pseudo_disks() if kind == "disks" else Family.rectangles()
    pts = rng.random((points, 2)).tolist() if points else None
    logger.debug(f"Generated {kind} instance: n={n}, density={density}, seed={seed}, scale={s:.4f}")
    return make_instance(shapes, weights, family, pts)


@dataclass(frozen=True)
class CorpusSpec:
    kind: str
    n: int
    density: float
    count: int = 1
    seed: int = 0
    unit: bool = False
    points: int = 0

    def instance_id(self, k: int) -> str:
        return f"{self.kind}-n{self.n}-d{self.density:g}-s{self.seed}-{k:03d}"


def generate_corpus(spec: CorpusSpec) -> List[Tuple[str, Instance]]:
    """count instances, the k-th seeded from (seed, k)."""
    if spec.count < 0:
        raise InvalidParameters(f"count must be >= 0, got {spec.count}")
    corpus = []
    for k in range(spec.count):
        instance = generate(spec.kind, spec.n, spec.density, derive_seed(spec.seed, k), spec.unit, spec.points)
        corpus.append((spec.instance_id(k), instance))
    logger.info(f"Generated corpus of {len(corpus)} {spec.kind} instances (n={spec.n})")
    return corpus


def mean_degree(instance: Instance, graph: Optional[object] = None) -> float:
    from src.conflict_graph import build_geometric

    graph = graph or build_geometric(instance)
    return 2.0 * graph.edge_count / max(instance.n, 1)
