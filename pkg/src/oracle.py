"""
Exact references for small inputs: maximum-weight independent set by
branch and bound, packing LP optimum by rational simplex, and the exact
expectation of the rounding scan by enumerating coin outcomes.
"""
import logging
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np

from utils.config import ORACLE_CONFIG
from src.conflict_graph import ConflictGraph
from src.exceptions import TooLarge
from src.lp import PackingLP
from src.rounding import ResistancePermutation, Values, coin_probabilities, resistance_permutation

logger = logging.getLogger(__name__)

_TOL = 1e-12


# ============================================================
# MAXIMUM-WEIGHT INDEPENDENT SET
# ============================================================

def _clique_cover_bound(avail: int, adj: List[int], weights: Sequence[float], by_weight: List[int]) -> float:
    """Greedy clique cover of the available vertices; sum of each clique's heaviest weight."""
    cliques: List[int] = []
    bound = 0.0
    for v in by_weight:
        if not avail >> v & 1:
            continue
        for k, members in enumerate(cliques):
            if members & ~adj[v] == 0:
                cliques[k] = members | (1 << v)
                break
        else:
            cliques.append(1 << v)
            bound += weights[v]  # vertices arrive heaviest first
    return bound


def exact_mwis(graph: ConflictGraph, weights: Optional[Sequence[float]] = None,
               max_n: int = ORACLE_CONFIG["max_mwis_n"]) -> Tuple[Tuple[int, ...], float]:
    """
    Optimal weighted independent set; among optima the lexicographically
    smallest sorted id tuple is returned.
    """
    n = graph.n
    if n > max_n:
        raise TooLarge(f"exact_mwis accepts n <= {max_n}, got {n}")
    weights = [float(w) for w in weights] if weights is not None else [1.0] * n
    adj = [sum(1 << j for j in graph.neighbors(i)) for i in range(n)]
    by_weight = sorted(range(n), key=lambda v: (-weights[v], v))

    best_value = -1.0
    best_set: Tuple[int, ...] = ()

    def search(avail: int, chosen: List[int], value: float) -> None:
        nonlocal best_value, best_set
        if avail == 0:
            if value > best_value + _TOL:
                best_value, best_set = value, tuple(chosen)
            return
        if value + _clique_cover_bound(avail, adj, weights, by_weight) <= best_value + _TOL:
            return
        v = (avail & -avail).bit_length() - 1
        chosen.append(v)
        search(avail & ~adj[v] & ~(1 << v), chosen, value + weights[v])
        chosen.pop()
        search(avail & ~(1 << v), chosen, value)

    search((1 << n) - 1, [], 0.0)
    logger.debug(f"exact_mwis: n={n}, value={best_value}")
    return best_set, max(best_value, 0.0)


# ============================================================
# EXACT PACKING LP
# ============================================================

def exact_lp_solution(lp: PackingLP, max_size: int = ORACLE_CONFIG["max_lp_size"]) -> Tuple[Fraction, Tuple[Fraction, ...]]:
    """
    Rational simplex with Bland's rule on max w.x, A x <= 1, 0 <= x <= 1.
    The origin is a basic feasible solution, so no phase one is needed.
    """
    n, m = lp.n, len(lp.rows)
    if n + m > max_size:
        raise TooLarge(f"exact_lp accepts n + rows <= {max_size}, got {n + m}")

    constraints = [set(row) for row in lp.rows] + [{i} for i in range(n)]
    k = len(constraints)
    width = n + k
    tableau = []
    for r, support in enumerate(constraints):
        row = [Fraction(1) if j in support else Fraction(0) for j in range(n)]
        row += [Fraction(1) if s == r else Fraction(0) for s in range(k)]
        row.append(Fraction(1))
        tableau.append(row)
    reduced = [Fraction(w) for w in lp.weights] + [Fraction(0)] * k + [Fraction(0)]
    basis = [n + r for r in range(k)]

    while True:
        entering = next((j for j in range(width) if reduced[j] > 0), None)
        if entering is None:
            break
        leaving = None
        for r in range(k):
            coeff = tableau[r][entering]
            if coeff > 0:
                ratio = tableau[r][-1] / coeff
                if leaving is None or ratio < best_ratio or (ratio == best_ratio and basis[r] < basis[leaving]):
                    leaving, best_ratio = r, ratio
        pivot_row = tableau[leaving]
        pivot = pivot_row[entering]
        tableau[leaving] = pivot_row = [v / pivot for v in pivot_row]
        for r in range(k):
            if r != leaving and tableau[r][entering] != 0:
                factor = tableau[r][entering]
                tableau[r] = [a - factor * b for a, b in zip(tableau[r], pivot_row)]
        factor = reduced[entering]
        reduced = [a - factor * b for a, b in zip(reduced, pivot_row)]
        basis[leaving] = entering

    x = [Fraction(0)] * n
    for r, var in enumerate(basis):
        if var < n:
            x[var] = tableau[r][-1]
    return -reduced[-1], tuple(x)


def exact_lp(lp: PackingLP, max_size: int = ORACLE_CONFIG["max_lp_size"]) -> Fraction:
    return exact_lp_solution(lp, max_size)[0]


# ============================================================
# ROUNDING EXPECTATION
# ============================================================

def exhaustive_survival_probabilities(graph: ConflictGraph, x: Values, tau: float,
                                      permutation: Optional[ResistancePermutation] = None,
                                      max_n: int = ORACLE_CONFIG["max_exhaustive_n"]) -> Tuple[np.ndarray, np.ndarray]:
    """
    Exact P[f_j in C] and P[f_j in I] for every object by enumerating coin
    outcomes along the scan. A blocked object's coin cannot change the
    outcome, so it is not branched on.
    """
    if graph.n > max_n:
        raise TooLarge(f"exhaustive rounding accepts n <= {max_n}, got {graph.n}")
    perm = permutation or resistance_permutation(graph, x)
    probs, _ = coin_probabilities(x, tau)
    scan = perm.scan_order
    selected = np.zeros(graph.n)

    def walk(pos: int, chosen: frozenset, mass: float) -> None:
        if pos == len(scan):
            for i in chosen:
                selected[i] += mass
            return
        i = scan[pos]
        if any(j in chosen for j in graph.neighbors(i)):
            walk(pos + 1, chosen, mass)
            return
        if probs[i] > 0:
            walk(pos + 1, chosen | {i}, mass * probs[i])
        if probs[i] < 1:
            walk(pos + 1, chosen, mass * (1.0 - probs[i]))

    walk(0, frozenset(), 1.0)
    return probs.copy(), selected


def exhaustive_rounding_expectation(graph: ConflictGraph, x: Values, tau: float,
                                    permutation: Optional[ResistancePermutation] = None,
                                    weights: Optional[Sequence[float]] = None,
                                    max_n: int = ORACLE_CONFIG["max_exhaustive_n"]) -> float:
    """Exact E[w(I)] of one randomized_round pass."""
    _, selected = exhaustive_survival_probabilities(graph, x, tau, permutation, max_n)
    w = np.asarray(weights, dtype=float) if weights is not None else np.ones(graph.n)
    return float(selected @ w)
