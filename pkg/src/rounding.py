"""
LP rounding by contention resolution.

Objects are ordered by repeated extract-min of resistance (the LP mass of
still-unordered conflicting objects), then scanned in reverse: each object
flips a coin with probability min(1, x_i / tau) and is kept if it came up
heads and conflicts with nothing kept so far. The derandomized variant
replaces each coin by the branch that maximizes a pessimistic estimator of
the final weight.
"""
import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from utils.config import ROUNDING_CONFIG
from utils.helpers import dump_json, make_rng
from src.conflict_graph import ConflictGraph
from src.exceptions import InvalidParameters, NoUnionBound
from src.lp import FractionalSolution
from src.models import Family, Instance, SelectionResult

logger = logging.getLogger(__name__)

Values = Union[FractionalSolution, Sequence[float], np.ndarray]


def as_values(x: Values) -> np.ndarray:
    if isinstance(x, FractionalSolution):
        x = x.x
    return np.asarray(x, dtype=float)


@dataclass(frozen=True)
class ResistancePermutation:
    order: Tuple[int, ...]
    etas: Tuple[float, ...]

    @property
    def scan_order(self) -> Tuple[int, ...]:
        """Objects in the order the rounding visits them (last extracted first)."""
        return tuple(reversed(self.order))


@dataclass(frozen=True)
class RoundingConfig:
    tau: Optional[float] = None  # None: derived from the family
    seed: int = ROUNDING_CONFIG["seed"]
    derandomize: bool = False
    c_tau: float = ROUNDING_CONFIG["c_tau"]

    def __post_init__(self):
        if self.tau is not None and not self.tau > 0:
            raise InvalidParameters(f"tau must be positive, got {self.tau}")
        if not self.c_tau > 0:
            raise InvalidParameters(f"c_tau must be positive, got {self.c_tau}")


# ============================================================
# RESISTANCE AND TAU
# ============================================================

def resistance(i: int, active, x: Values, graph: ConflictGraph) -> float:
    """Sum of x_j over active neighbors j of i."""
    values = as_values(x)
    active = set(active)
    return math.fsum(values[j] for j in graph.neighbors(i) if j in active and j != i)


def resistance_permutation(graph: ConflictGraph, x: Values) -> ResistancePermutation:
    """Repeated extract-min of resistance over the unordered objects; ties go to the smaller id."""
    values = as_values(x)
    remaining = np.ones(graph.n, dtype=bool)
    eta = np.array([math.fsum(values[j] for j in graph.neighbors(i)) for i in range(graph.n)])
    order: List[int] = []
    etas: List[float] = []

    for _ in range(graph.n):
        masked = np.where(remaining, eta, np.inf)
        i = int(np.argmin(masked))
        order.append(i)
        etas.append(float(eta[i]))
        remaining[i] = False
        for k in graph.neighbors(i):
            if remaining[k]:
                eta[k] = math.fsum(values[j] for j in graph.neighbors(k) if remaining[j])

    return ResistancePermutation(order=tuple(order), etas=tuple(etas))


def auto_tau(target: Union[Instance, Family], x: Optional[Values] = None,
             c_tau: float = ROUNDING_CONFIG["c_tau"]) -> float:
    """
    tau = c * U(E) / E. Union complexity is linear for every supported family,
    so E cancels and x is not needed.
    """
    family = target.family if isinstance(target, Instance) else target
    rho = family.union_constant
    if rho is None:
        raise NoUnionBound(f"family '{family.kind.value}' has no known union-complexity bound; pass an explicit tau")
    return c_tau * rho


def resolve_tau(cfg: RoundingConfig, family: Optional[Family] = None) -> float:
    if cfg.tau is not None:
        return float(cfg.tau)
    return auto_tau(family or Family.generic(), c_tau=cfg.c_tau)


def coin_probabilities(x: Values, tau: float) -> Tuple[np.ndarray, List[int]]:
    """min(1, x_i / tau) per object, plus the ids whose probability was clamped."""
    values = as_values(x)
    raw = values / tau
    clamped = [int(i) for i in np.flatnonzero(raw > 1.0)]
    return np.clip(raw, 0.0, 1.0), clamped


# ============================================================
# RANDOMIZED ROUNDING
# ============================================================

def randomized_round(graph: ConflictGraph, x: Values, cfg: RoundingConfig,
                     weights: Optional[Sequence[float]] = None,
                     permutation: Optional[ResistancePermutation] = None,
                     family: Optional[Family] = None) -> SelectionResult:
    """
    One contention-resolution pass. Object i uses the i-th entry of a single
    uniform draw of length n, so runs are reproducible from the seed alone.
    """
    weights = list(weights) if weights is not None else [1.0] * graph.n
    tau = resolve_tau(cfg, family)
    perm = permutation or resistance_permutation(graph, x)
    probs, clamped = coin_probabilities(x, tau)
    if clamped:
        logger.warning(f"Clamped coin probability to 1 for {len(clamped)} objects (tau={tau})")
    u = make_rng(cfg.seed).random(graph.n)

    chosen = set()
    decisions = []
    for i in perm.scan_order:
        heads = bool(u[i] < probs[i])
        kept = heads and not any(j in chosen for j in graph.neighbors(i))
        if kept:
            chosen.add(i)
        decisions.append({"id": i, "p": float(probs[i]), "in_C": heads, "in_I": kept})

    trace = {
        "algorithm": "lp-round",
        "tau": tau,
        "seed": cfg.seed,
        "permutation": list(perm.order),
        "etas": list(perm.etas),
        "clamped": clamped,
        "decisions": decisions,
    }
    return SelectionResult.from_ids(chosen, weights, trace)


# ============================================================
# DERANDOMIZATION
# ============================================================

class ContentionEstimator:
    """
    Pessimistic estimator of the final weight of the scan:

        Phi = sum_{decided j} w_j [j in I]
            + sum_{undecided j} w_j p_j max(0, 1 - sum_{k in B_j} s_k)

    where B_j are the neighbors scanned before j and s_k is p_k while k is
    undecided, 1 once k is in I and 0 once k is decided outside I.
    """

    def __init__(self, graph: ConflictGraph, probs: np.ndarray, weights: Sequence[float],
                 scan_order: Sequence[int]):
        self.graph = graph
        self.p = probs
        self.w = np.asarray(weights, dtype=float)
        position = {v: pos for pos, v in enumerate(scan_order)}
        self.earlier = [[k for k in graph.neighbors(j) if position[k] < position[j]] for j in range(graph.n)]
        self.later = [[k for k in graph.neighbors(j) if position[k] > position[j]] for j in range(graph.n)]
        self.s = probs.copy()
        self.load = np.array([sum(self.s[k] for k in self.earlier[j]) for j in range(graph.n)])
        self.in_set = set()
        self.value = float(sum(self._term(j) for j in range(graph.n)))

    def _term(self, j: int, shift: float = 0.0) -> float:
        return self.w[j] * self.p[j] * max(0.0, 1.0 - self.load[j] - shift)

    def blocked(self, j: int) -> bool:
        return any(k in self.in_set for k in self.earlier[j])

    def branch(self, j: int, heads: bool) -> Tuple[float, bool]:
        """Estimator value if j's coin is fixed, and whether j would join I."""
        joins = bool(heads) and not self.blocked(j)
        s_new = 1.0 if joins else 0.0
        delta = (self.w[j] if joins else 0.0) - self._term(j)
        for k in self.later[j]:
            delta += self._term(k, s_new - self.s[j]) - self._term(k)
        return self.value + delta, joins

    def commit(self, j: int, heads: bool) -> bool:
        self.value, joins = self.branch(j, heads)
        s_new = 1.0 if joins else 0.0
        for k in self.later[j]:
            self.load[k] += s_new - self.s[j]
        self.s[j] = s_new
        if joins:
            self.in_set.add(j)
        return joins


def derandomized_round(graph: ConflictGraph, x: Values, cfg: RoundingConfig,
                       weights: Optional[Sequence[float]] = None,
                       permutation: Optional[ResistancePermutation] = None,
                       family: Optional[Family] = None) -> SelectionResult:
    """
    Same scan as randomized_round, with every coin set to the branch of larger
    estimator value (ties leave the object out of C).
    """
    weights = list(weights) if weights is not None else [1.0] * graph.n
    tau = resolve_tau(cfg, family)
    perm = permutation or resistance_permutation(graph, x)
    probs, clamped = coin_probabilities(x, tau)
    estimator = ContentionEstimator(graph, probs, weights, perm.scan_order)

    phi = [estimator.value]
    steps = []
    for j in perm.scan_order:
        before = estimator.value
        phi_heads, _ = estimator.branch(j, True)
        phi_tails, _ = estimator.branch(j, False)
        if probs[j] <= 0.0 or probs[j] >= 1.0:
            # the coin is not random; follow it
            heads = bool(probs[j] >= 1.0)
        else:
            heads = bool(phi_heads > phi_tails)
        joined = estimator.commit(j, heads)
        phi.append(estimator.value)
        steps.append({"id": j, "phi_before": before, "phi_heads": phi_heads, "phi_tails": phi_tails,
                      "in_C": heads, "in_I": joined})

    logger.debug(f"Derandomized rounding: Phi {phi[0]:.4f} -> {phi[-1]:.4f}")
    trace = {
        "algorithm": "lp-round-derand",
        "tau": tau,
        "permutation": list(perm.order),
        "etas": list(perm.etas),
        "clamped": clamped,
        "phi": phi,
        "steps": steps,
    }
    return SelectionResult.from_ids(estimator.in_set, weights, trace)


# ============================================================
# MONTE-CARLO
# ============================================================

@dataclass(frozen=True)
class RoundingSimulation:
    candidates: np.ndarray  # (trials, n) bool: coin came up heads
    selected: np.ndarray  # (trials, n) bool: object kept

    def weights(self, weights: Sequence[float]) -> np.ndarray:
        return self.selected.astype(float) @ np.asarray(weights, dtype=float)


@dataclass(frozen=True)
class SurvivalEstimate:
    rate: np.ndarray
    stderr: np.ndarray
    count: np.ndarray


def simulate_rounding(graph: ConflictGraph, x: Values, tau: float, trials: int,
                      seed: int = ROUNDING_CONFIG["seed"],
                      permutation: Optional[ResistancePermutation] = None) -> RoundingSimulation:
    """Vectorized repeat of the coin scan; trial 0 matches randomized_round with the same seed."""
    if trials < 1:
        raise InvalidParameters(f"trials must be >= 1, got {trials}")
    perm = permutation or resistance_permutation(graph, x)
    probs, _ = coin_probabilities(x, tau)
    u = make_rng(seed).random((trials, graph.n))
    heads = u < probs
    selected = np.zeros_like(heads)
    for i in perm.scan_order:
        nbrs = list(graph.neighbors(i))
        if nbrs:
            selected[:, i] = heads[:, i] & ~selected[:, nbrs].any(axis=1)
        else:
            selected[:, i] = heads[:, i]
    return RoundingSimulation(candidates=heads, selected=selected)


def survival_rates(sim: RoundingSimulation) -> SurvivalEstimate:
    """Empirical P[f in I | f in C] per object with its binomial standard error (NaN when never sampled)."""
    count = sim.candidates.sum(axis=0)
    kept = sim.selected.sum(axis=0)
    with np.errstate(invalid="ignore", divide="ignore"):
        rate = np.where(count > 0, kept / np.maximum(count, 1), np.nan)
        stderr = np.where(count > 0, np.sqrt(rate * (1.0 - rate) / np.maximum(count, 1)), np.nan)
    return SurvivalEstimate(rate=rate, stderr=stderr, count=count)


def export_trace(result: SelectionResult) -> str:
    return dump_json({"chosen": list(result.chosen), "total_weight": result.total_weight, **result.trace})
