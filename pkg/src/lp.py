"""
Packing LP for independent set (one row per arrangement vertex, plus
containment rows, or one row per discrete point) and the covering LP for
piercing, its dual.

Two engines solve either LP:
- "highs": scipy's HiGHS solver.
- "mwu":   a width-independent multiplicative-weights (Garg-Koenemann)
           packing solver; its dual iterate doubles as the covering solution.
Both finish with a uniform rescale so the returned point is feasible.
"""
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import linprog
from scipy.sparse import csr_matrix

from utils.config import GEOMETRY_CONFIG, LP_CONFIG
from src.conflict_graph import GraphMode, covered_points
from src.exceptions import InvalidParameters, MissingPoints
from src.geometry import CORNER, ArrangementVertex, BoxIndex, contains_shape, enumerate_arrangement
from src.models import Instance, Point

logger = logging.getLogger(__name__)


class RowKind(str, Enum):
    VERTEX = "vertex"
    CONTAINMENT = "containment"
    DISCRETE_POINT = "discrete_point"
    CANDIDATE = "candidate"


@dataclass(frozen=True)
class RowProvenance:
    kind: RowKind
    point: Optional[Point] = None
    object_id: Optional[int] = None


@dataclass(frozen=True)
class PackingLP:
    n: int
    rows: Tuple[Tuple[int, ...], ...]
    provenance: Tuple[RowProvenance, ...]
    weights: Tuple[float, ...]
    warnings: Tuple[str, ...] = ()

    def matrix(self) -> csr_matrix:
        """Row-by-object 0/1 incidence matrix."""
        indptr = [0]
        indices: List[int] = []
        for row in self.rows:
            indices.extend(row)
            indptr.append(len(indices))
        data = np.ones(len(indices))
        return csr_matrix((data, np.asarray(indices, dtype=int), np.asarray(indptr)), shape=(len(self.rows), self.n))

    def row_loads(self, x: Sequence[float]) -> np.ndarray:
        if not self.rows:
            return np.zeros(0)
        return self.matrix() @ np.asarray(x, dtype=float)

    def export_text(self) -> str:
        lines = ["max: " + " ".join(repr(w) for w in self.weights)]
        lines.extend("≤ 1 : " + " ".join(str(i) for i in row) for row in self.rows)
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class FractionalSolution:
    x: Tuple[float, ...]
    value: float
    max_row_violation: float
    method: str = "highs"
    iterations: int = 0
    truncated: bool = False

    @property
    def energy(self) -> float:
        """E(F) = sum of x."""
        return float(sum(self.x))


@dataclass(frozen=True)
class PiercingLP:
    n_objects: int
    candidates: Tuple[Point, ...]
    synthetic: Tuple[bool, ...]
    covering: Tuple[Tuple[int, ...], ...]
    object_rows: Tuple[Tuple[int, ...], ...]

    def packing_dual(self) -> PackingLP:
        """The unit-weight packing LP with one row per candidate point."""
        rows: Dict[Tuple[int, ...], RowProvenance] = {}
        for p, cover in zip(self.candidates, self.covering):
            if cover:
                rows.setdefault(cover, RowProvenance(RowKind.CANDIDATE, point=p))
        return _packing_from_rows(self.n_objects, rows, [1.0] * self.n_objects)


@dataclass(frozen=True)
class CoveringSolution:
    y: Tuple[float, ...]
    value: float
    max_row_violation: float
    method: str = "highs"
    iterations: int = 0
    truncated: bool = False


# ============================================================
# BUILDERS
# ============================================================

def _packing_from_rows(n: int, rows: Dict[Tuple[int, ...], RowProvenance], weights: Sequence[float],
                       warnings: Iterable[str] = ()) -> PackingLP:
    ordered = sorted(rows.items())
    return PackingLP(
        n=n,
        rows=tuple(r for r, _ in ordered),
        provenance=tuple(p for _, p in ordered),
        weights=tuple(float(w) for w in weights),
        warnings=tuple(warnings),
    )


def containment_rows(instance: Instance, eps: float = GEOMETRY_CONFIG["eps_geom"]) -> Dict[Tuple[int, ...], RowProvenance]:
    """For each object i with containers: {j : f_i within f_j} plus i itself."""
    shapes = instance.shapes
    containers: List[set] = [set() for _ in shapes]
    for i, j in BoxIndex(shapes, eps).candidate_pairs():
        if contains_shape(shapes[j], shapes[i], eps):
            containers[i].add(j)
        if contains_shape(shapes[i], shapes[j], eps):
            containers[j].add(i)
    rows = {}
    for i, outer in enumerate(containers):
        if outer:
            rows.setdefault(tuple(sorted(outer | {i})), RowProvenance(RowKind.CONTAINMENT, object_id=i))
    return rows


def build_independent_set_lp(instance: Instance, mode: GraphMode = GraphMode.GEOMETRIC,
                             eps: float = GEOMETRY_CONFIG["eps_geom"]) -> PackingLP:
    """
    Geometric mode: one row per arrangement-vertex covering set of size >= 2,
    plus containment rows. Discrete mode: one row per point of P covered at
    least twice. Duplicate rows are merged, keeping the first provenance.
    """
    rows: Dict[Tuple[int, ...], RowProvenance] = {}
    warnings: List[str] = []

    if mode == GraphMode.DISCRETE:
        if instance.points is None:
            raise MissingPoints("discrete LP requires the instance point set")
        for p, cover in zip(instance.points, covered_points(instance, eps)):
            if len(cover) >= 2:
                rows.setdefault(cover, RowProvenance(RowKind.DISCRETE_POINT, point=p))
    else:
        arrangement = enumerate_arrangement(instance, eps)
        warnings.extend(arrangement.warnings)
        warnings.extend(f"degenerate pair {i} {j} skipped" for i, j in arrangement.degenerate_pairs)
        for v in arrangement.vertices:
            if len(v.covering) >= 2:
                rows.setdefault(v.covering, RowProvenance(RowKind.VERTEX, point=v.p))
        for row, prov in containment_rows(instance, eps).items():
            rows.setdefault(row, prov)

    lp = _packing_from_rows(instance.n, rows, instance.weights, warnings)
    logger.info(f"Built {mode.value} packing LP: {lp.n} variables, {len(lp.rows)} rows")
    return lp


def build_piercing_lp(instance: Instance, eps: float = GEOMETRY_CONFIG["eps_geom"]) -> PiercingLP:
    """
    Covering LP over candidate points: the distinct arrangement vertices plus
    the centroid of every object containing none of them.
    """
    index = BoxIndex(instance.shapes, eps)
    candidates: List[Point] = []
    for v in enumerate_arrangement(instance, eps).vertices:
        if not any(abs(v.p[0] - q[0]) <= eps and abs(v.p[1] - q[1]) <= eps for q in candidates):
            candidates.append(v.p)
    pierced = set()
    for p in candidates:
        pierced.update(index.covering(p))
    synthetic = [False] * len(candidates)
    for i, obj in enumerate(instance.objects):
        if i not in pierced:
            c = obj.shape.centroid
            candidates.append(c)
            synthetic.append(True)
            pierced.update(index.covering(c))

    covering = tuple(index.covering(p) for p in candidates)
    object_rows: List[List[int]] = [[] for _ in range(instance.n)]
    for k, cover in enumerate(covering):
        for i in cover:
            object_rows[i].append(k)
    logger.info(f"Built piercing LP: {len(candidates)} candidates ({sum(synthetic)} synthetic), {instance.n} objects")
    return PiercingLP(
        n_objects=instance.n,
        candidates=tuple(candidates),
        synthetic=tuple(synthetic),
        covering=covering,
        object_rows=tuple(tuple(r) for r in object_rows),
    )


# ============================================================
# MULTIPLICATIVE-WEIGHTS ENGINE
# ============================================================

@dataclass
class _MWUResult:
    x: np.ndarray
    y: np.ndarray
    primal: float
    dual: float
    iterations: int
    truncated: bool


def iteration_bound(m: int, step: float) -> int:
    """Iterations a plain Garg-Koenemann run with this step takes on m rows, at most."""
    # log(1/delta) for delta = (1 + step) ((1 + step) m)^(-1/step), without forming delta
    log_inv_delta = math.log((1.0 + step) * m) / step - math.log1p(step)
    return int(math.ceil(m * (log_inv_delta / math.log1p(step) + 1.0)))


def _garg_koenemann(matrix: csr_matrix, weights: np.ndarray, eps: float, max_iterations: int,
                    initial_step: float = LP_CONFIG["mwu_initial_step"],
                    phase_factor: float = LP_CONFIG["mwu_phase_factor"]) -> _MWUResult:
    """
    Packing max w.x s.t. A x <= 1, x >= 0 with a 0/1 matrix A.

    Row weights are kept as logarithms. The step starts at initial_step and
    halves at the end of every phase until it reaches eps/3; the weights carry
    over between phases. Any pick count divided by its largest row load is a
    feasible primal point, and any weight vector divided by its shortest
    column length is a feasible dual point. The run stops once the best primal
    value reaches (1 - eps) times the best dual value, or when the iteration
    budget min(max_iterations, iteration_bound(m, eps/3)) runs out; the latter
    sets truncated and still returns the best feasible point seen.
    """
    m, n = matrix.shape
    csc = matrix.tocsc()
    if n and (np.diff(csc.indptr) == 0).any():
        raise InvalidParameters("every column of a packing matrix needs at least one row")

    final_step = eps / 3.0
    budget = min(max_iterations, iteration_bound(m, final_step))
    step = max(initial_step, final_step)

    def phase_length(s: float) -> int:
        return int(math.ceil(phase_factor * math.log(2 * m) / s))

    log_y = np.zeros(m)
    # picks over the whole run and over the current phase
    counters = [(np.zeros(n), np.zeros(m)), (np.zeros(n), np.zeros(m))]
    best = _MWUResult(x=np.zeros(n), y=np.zeros(m), primal=0.0, dual=math.inf, iterations=0, truncated=True)
    phase_left = phase_length(step)

    while best.iterations < budget:
        y = np.exp(log_y - log_y.max())
        lengths = (csc.T @ y) / weights
        j = int(np.argmin(lengths))
        alpha = float(lengths[j])
        dual = float(y.sum()) / alpha
        if dual < best.dual:
            best.dual, best.y = dual, y / alpha

        rows = csc.indices[csc.indptr[j]:csc.indptr[j + 1]]
        for x, load in counters:
            x[j] += 1.0
            load[rows] += 1.0
            top = float(load.max())
            primal = float(weights @ x) / top
            if primal > best.primal:
                best.primal, best.x = primal, x / top

        log_y[rows] += math.log1p(step)
        best.iterations += 1
        if best.primal >= (1.0 - eps) * best.dual:
            best.truncated = False
            break

        phase_left -= 1
        if phase_left <= 0 and step > final_step:
            step = max(step / 2.0, final_step)
            phase_left = phase_length(step)
            counters[1] = (np.zeros(n), np.zeros(m))

    if best.truncated:
        logger.warning(f"MWU stopped after {best.iterations} iterations with primal {best.primal:.6f} "
                       f"against dual bound {best.dual:.6f}")
    return best


def _scale_to_feasible(lp: PackingLP, x: np.ndarray) -> np.ndarray:
    x = np.clip(x, 0.0, 1.0)
    if lp.rows:
        load = float(lp.row_loads(x).max())
        if load > 1.0:
            x = x / load
    return x


# ============================================================
# SOLVERS
# ============================================================

def _check_eps(eps: float) -> None:
    if not 0.0 < eps < 0.5:
        raise InvalidParameters(f"eps must lie in (0, 1/2), got {eps}")


def solve_packing_lp(lp: PackingLP, eps: float = LP_CONFIG["eps"], method: str = LP_CONFIG["method"],
                     max_iterations: int = LP_CONFIG["mwu_max_iterations"]) -> FractionalSolution:
    """
    Solve max w.x over the packing polytope; the result is feasible after a
    final uniform scale-down and within (1 - eps) of optimal (mwu) or
    solver precision (highs).
    """
    _check_eps(eps)
    weights = np.asarray(lp.weights, dtype=float)
    iterations = 0
    truncated = False

    if not lp.rows:
        x = np.ones(lp.n)
    elif method == "highs":
        res = linprog(-weights, A_ub=lp.matrix(), b_ub=np.ones(len(lp.rows)),
                      bounds=[(0.0, 1.0)] * lp.n, method="highs")
        if res.status == 1:
            truncated = True
            logger.warning("HiGHS hit its iteration limit; returning the last iterate")
        elif res.status != 0:
            raise RuntimeError(f"HiGHS failed on packing LP: {res.message}")
        # HiGHS may stop at its iteration limit without a point; zero is feasible
        x = np.zeros(lp.n) if res.x is None else np.asarray(res.x, dtype=float)
        iterations = int(getattr(res, "nit", 0))
    elif method == "mwu":
        # box constraints become singleton rows
        box_rows = {(i,): RowProvenance(RowKind.VERTEX) for i in range(lp.n)}
        boxed = _packing_from_rows(lp.n, {**box_rows, **dict(zip(lp.rows, lp.provenance))}, lp.weights)
        run = _garg_koenemann(boxed.matrix(), weights, eps, max_iterations)
        x, iterations, truncated = run.x, run.iterations, run.truncated
    else:
        raise ValueError(f"Unknown LP method: {method}. Available: ['highs', 'mwu']")

    x = _scale_to_feasible(lp, x)
    violation = max(0.0, float(lp.row_loads(x).max()) - 1.0) if lp.rows else 0.0
    value = float(weights @ x)
    logger.debug(f"Packing LP ({method}): value={value:.6f}, iterations={iterations}")
    return FractionalSolution(x=tuple(float(v) for v in x), value=value, max_row_violation=violation,
                              method=method, iterations=iterations, truncated=truncated)


def solve_covering_lp(lp: PiercingLP, eps: float = LP_CONFIG["eps"], method: str = LP_CONFIG["method"],
                      max_iterations: int = LP_CONFIG["mwu_max_iterations"]) -> CoveringSolution:
    """Solve min sum(y) s.t. every object holds candidate mass >= 1, 0 <= y <= 1."""
    _check_eps(eps)
    m = len(lp.candidates)
    # candidate-by-object incidence
    incidence = csr_matrix(
        (np.ones(sum(len(c) for c in lp.covering)),
         np.asarray([i for c in lp.covering for i in c], dtype=int),
         np.cumsum([0] + [len(c) for c in lp.covering])),
        shape=(m, lp.n_objects),
    )
    iterations = 0
    truncated = False

    if lp.n_objects == 0:
        y = np.zeros(m)
    elif method == "highs":
        res = linprog(np.ones(m), A_ub=-incidence.T.tocsr(), b_ub=-np.ones(lp.n_objects),
                      bounds=[(0.0, 1.0)] * m, method="highs")
        if res.status == 1:
            truncated = True
            logger.warning("HiGHS hit its iteration limit on the covering LP")
        elif res.status != 0:
            raise RuntimeError(f"HiGHS failed on covering LP: {res.message}")
        # all-ones covers every object
        y = np.ones(m) if res.x is None else np.asarray(res.x, dtype=float)
        iterations = int(getattr(res, "nit", 0))
    elif method == "mwu":
        # the dual iterate of the packing side over the candidate rows
        run = _garg_koenemann(incidence, np.ones(lp.n_objects), eps, max_iterations)
        y, iterations, truncated = run.y, run.iterations, run.truncated
    else:
        raise ValueError(f"Unknown LP method: {method}. Available: ['highs', 'mwu']")

    y = np.clip(y, 0.0, None)
    mass = incidence.T @ y
    low = float(mass.min()) if lp.n_objects else 1.0
    if 0.0 < low < 1.0:
        y = y / low
    y = np.minimum(y, 1.0)
    mass = incidence.T @ y
    violation = max(0.0, 1.0 - float(mass.min())) if lp.n_objects else 0.0
    value = float(y.sum())
    logger.debug(f"Covering LP ({method}): value={value:.6f}, candidates={m}")
    return CoveringSolution(y=tuple(float(v) for v in y), value=value, max_row_violation=violation,
                            method=method, iterations=iterations, truncated=truncated)


# ============================================================
# INTERSECTION ENERGY
# ============================================================

def pair_energy(vertices: Sequence[ArrangementVertex], x: Sequence[float]) -> float:
    """Sum of x_i x_j over arrangement vertices (p, i, j); corners excluded."""
    return float(sum(x[v.i] * x[v.j] for v in vertices if v.j != CORNER))


def g1_pair_energy(edges: Iterable[Tuple[int, int]], x: Sequence[float]) -> float:
    return float(sum(x[i] * x[j] for i, j in edges))
