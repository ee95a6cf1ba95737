"""
Domain types shared by every module: shapes, weighted objects, instances,
selection results, plus instance validation and the JSON instance format.
"""
import json
import logging
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from utils.config import FAMILY_CONFIG, GEOMETRY_CONFIG
from src.exceptions import WeightedInstanceError

logger = logging.getLogger(__name__)

Point = Tuple[float, float]


# ============================================================
# SHAPES
# ============================================================

@dataclass(frozen=True)
class Disk:
    cx: float
    cy: float
    r: float

    @property
    def bounds(self) -> Tuple[float, float, float, float]:
        return (self.cx - self.r, self.cy - self.r, self.cx + self.r, self.cy + self.r)

    @property
    def centroid(self) -> Point:
        return (self.cx, self.cy)


@dataclass(frozen=True)
class AxisRect:
    x0: float
    y0: float
    x1: float
    y1: float

    @property
    def bounds(self) -> Tuple[float, float, float, float]:
        return (self.x0, self.y0, self.x1, self.y1)

    @property
    def centroid(self) -> Point:
        return ((self.x0 + self.x1) / 2.0, (self.y0 + self.y1) / 2.0)

    @property
    def corners(self) -> Tuple[Point, Point, Point, Point]:
        """Corners in counter-clockwise order starting at (x0, y0)."""
        return ((self.x0, self.y0), (self.x1, self.y0), (self.x1, self.y1), (self.x0, self.y1))


@dataclass(frozen=True)
class ConvexPolygon:
    vertices: Tuple[Point, ...]

    @property
    def bounds(self) -> Tuple[float, float, float, float]:
        xs = [p[0] for p in self.vertices]
        ys = [p[1] for p in self.vertices]
        return (min(xs), min(ys), max(xs), max(ys))

    @property
    def centroid(self) -> Point:
        # Area centroid via the shoelace formula
        area2 = 0.0
        cx = cy = 0.0
        pts = self.vertices
        for k in range(len(pts)):
            (x0, y0), (x1, y1) = pts[k], pts[(k + 1) % len(pts)]
            cross = x0 * y1 - x1 * y0
            area2 += cross
            cx += (x0 + x1) * cross
            cy += (y0 + y1) * cross
        if area2 == 0:
            return (sum(p[0] for p in pts) / len(pts), sum(p[1] for p in pts) / len(pts))
        return (cx / (3.0 * area2), cy / (3.0 * area2))


Shape = Union[Disk, AxisRect, ConvexPolygon]


# ============================================================
# INSTANCE
# ============================================================

class FamilyKind(str, Enum):
    PSEUDO_DISKS = "pseudo_disks"
    ADMISSIBLE = "admissible"
    RECTANGLES = "rectangles"
    GENERIC = "generic"


@dataclass(frozen=True)
class Family:
    kind: FamilyKind
    rho: Optional[float] = None
    k: Optional[int] = None

    @classmethod
    def pseudo_disks(cls, rho: float = FAMILY_CONFIG["pseudo_disk_rho"]) -> "Family":
        return cls(FamilyKind.PSEUDO_DISKS, rho=rho)

    @classmethod
    def admissible(cls, k: int) -> "Family":
        return cls(FamilyKind.ADMISSIBLE, k=k)

    @classmethod
    def rectangles(cls) -> "Family":
        return cls(FamilyKind.RECTANGLES)

    @classmethod
    def generic(cls) -> "Family":
        return cls(FamilyKind.GENERIC)

    @property
    def union_constant(self) -> Optional[float]:
        """rho in U(m) = rho * m, or None when no linear bound is known."""
        if self.kind == FamilyKind.PSEUDO_DISKS:
            return float(self.rho)
        if self.kind == FamilyKind.ADMISSIBLE:
            return float(FAMILY_CONFIG["admissible_factor"] * self.k)
        if self.kind == FamilyKind.RECTANGLES:
            return float(FAMILY_CONFIG["rectangle_g1_constant"])
        return None


@dataclass(frozen=True)
class WeightedObject:
    id: int
    shape: Shape
    weight: float


@dataclass(frozen=True)
class Instance:
    objects: Tuple[WeightedObject, ...]
    family: Family = field(default_factory=Family.generic)
    points: Optional[Tuple[Point, ...]] = None

    @property
    def n(self) -> int:
        return len(self.objects)

    @property
    def shapes(self) -> List[Shape]:
        return [obj.shape for obj in self.objects]

    @property
    def weights(self) -> List[float]:
        return [obj.weight for obj in self.objects]

    @property
    def is_unit_weight(self) -> bool:
        return all(obj.weight == self.objects[0].weight for obj in self.objects)

    def weight_of(self, ids: Sequence[int]) -> float:
        return sum(self.objects[i].weight for i in ids)


def make_instance(shapes: Sequence[Shape], weights: Optional[Sequence[float]] = None,
                  family: Optional[Family] = None,
                  points: Optional[Sequence[Point]] = None) -> Instance:
    """Build an instance with ids 0..n-1 (unit weights by default)."""
    if weights is None:
        weights = [1.0] * len(shapes)
    objects = tuple(
        WeightedObject(id=i, shape=shape, weight=float(w))
        for i, (shape, w) in enumerate(zip(shapes, weights))
    )
    pts = tuple((float(x), float(y)) for x, y in points) if points is not None else None
    return Instance(objects=objects, family=family or Family.generic(), points=pts)


# ============================================================
# SELECTION RESULT
# ============================================================

@dataclass(frozen=True)
class SelectionResult:
    chosen: Tuple[int, ...]
    total_weight: float
    trace: Dict[str, Any] = field(default_factory=dict)

    @classmethod
    def from_ids(cls, ids, weights: Sequence[float], trace: Optional[Dict[str, Any]] = None) -> "SelectionResult":
        chosen = tuple(sorted(set(int(i) for i in ids)))
        return cls(chosen=chosen, total_weight=float(sum(weights[i] for i in chosen)), trace=trace or {})

    def to_dict(self) -> Dict[str, Any]:
        return {"chosen": list(self.chosen), "total_weight": self.total_weight, "trace": self.trace}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "SelectionResult":
        return cls(chosen=tuple(int(i) for i in data["chosen"]),
                   total_weight=float(data["total_weight"]),
                   trace=dict(data.get("trace", {})))


# ============================================================
# VALIDATION
# ============================================================

@dataclass(frozen=True)
class Violation:
    kind: str
    object_id: Optional[int] = None
    detail: str = ""
    severity: str = "error"

    def __str__(self) -> str:
        where = f"({self.object_id})" if self.object_id is not None else ""
        return f"{self.kind}{where}: {self.detail}" if self.detail else f"{self.kind}{where}"


def _finite(*values: float) -> bool:
    return all(isinstance(v, (int, float)) and math.isfinite(v) for v in values)


def shape_problem(shape: Shape, eps: float = GEOMETRY_CONFIG["eps_geom"]) -> Optional[str]:
    """Describe why a shape is degenerate, or None if it is well-formed."""
    if isinstance(shape, Disk):
        if not _finite(shape.cx, shape.cy, shape.r):
            return "non-finite disk parameter"
        if shape.r <= 0:
            return f"disk radius {shape.r} is not positive"
        return None
    if isinstance(shape, AxisRect):
        if not _finite(shape.x0, shape.y0, shape.x1, shape.y1):
            return "non-finite rectangle coordinate"
        if not (shape.x0 < shape.x1 and shape.y0 < shape.y1):
            return "rectangle has non-positive width or height"
        return None
    if isinstance(shape, ConvexPolygon):
        pts = shape.vertices
        if len(pts) < 3:
            return "polygon needs at least 3 vertices"
        if not all(_finite(x, y) for x, y in pts):
            return "non-finite polygon vertex"
        turning = 0.0
        for k in range(len(pts)):
            a, b, c = pts[k], pts[(k + 1) % len(pts)], pts[(k + 2) % len(pts)]
            e1 = (b[0] - a[0], b[1] - a[1])
            e2 = (c[0] - b[0], c[1] - b[1])
            cross = e1[0] * e2[1] - e1[1] * e2[0]
            if cross <= eps:
                return "polygon is not strictly convex in counter-clockwise order"
            turning += math.atan2(cross, e1[0] * e2[0] + e1[1] * e2[1])
        if abs(turning - 2.0 * math.pi) > 1e-6:
            return "polygon winds more than once"
        return None
    return f"unknown shape type {type(shape).__name__}"


def validate(instance: Instance, check_family: bool = False,
             eps: float = GEOMETRY_CONFIG["eps_geom"]) -> List[Violation]:
    """
    Return every violated invariant; an empty list means the instance is well-formed.

    Family-contract checks (boundary crossing counts) are quadratic and only
    run when check_family is set; they are reported with warning severity.
    """
    violations: List[Violation] = []

    seen = set()
    for obj in instance.objects:
        if obj.id in seen:
            violations.append(Violation("DuplicateId", obj.id, "id used by more than one object"))
        seen.add(obj.id)

        if not _finite(obj.weight) or obj.weight <= 0:
            violations.append(Violation("NonPositiveWeight", obj.id, f"weight {obj.weight}"))

        problem = shape_problem(obj.shape, eps)
        if problem:
            violations.append(Violation("DegenerateShape", obj.id, problem))

    ids = [obj.id for obj in instance.objects]
    if len(seen) == len(ids) and ids != list(range(len(ids))):
        violations.append(Violation("NonContiguousIds", None, "ids are not 0..n-1 in order", severity="warning"))

    family = instance.family
    if family.kind == FamilyKind.RECTANGLES:
        for obj in instance.objects:
            if not isinstance(obj.shape, AxisRect):
                violations.append(Violation("FamilyMismatch", obj.id, "rectangles family requires axis-aligned rectangles"))
    if family.kind == FamilyKind.ADMISSIBLE and (family.k is None or family.k <= 0 or family.k % 2):
        violations.append(Violation("FamilyMismatch", None, f"admissible k must be a positive even integer, got {family.k}"))
    if family.kind == FamilyKind.PSEUDO_DISKS and (family.rho is None or family.rho <= 0):
        violations.append(Violation("FamilyMismatch", None, f"rho must be positive, got {family.rho}"))

    if instance.points is not None:
        for idx, p in enumerate(instance.points):
            if len(p) != 2 or not _finite(*p):
                violations.append(Violation("InvalidPoint", None, f"point #{idx} is not a finite 2-D point"))

    hard_errors = any(v.severity == "error" for v in violations)
    if check_family and not hard_errors:
        violations.extend(_family_contract_violations(instance, eps))

    return violations


def _family_contract_violations(instance: Instance, eps: float) -> List[Violation]:
    from src.geometry import boundary_intersections
    from src.exceptions import OverlappingBoundaries

    if instance.family.kind == FamilyKind.PSEUDO_DISKS:
        limit = 2
    elif instance.family.kind == FamilyKind.ADMISSIBLE:
        limit = instance.family.k
    else:
        return []

    found = []
    objs = instance.objects
    for a in range(len(objs)):
        for b in range(a + 1, len(objs)):
            try:
                count = len(boundary_intersections(objs[a].shape, objs[b].shape, eps))
            except OverlappingBoundaries:
                continue
            if count > limit:
                found.append(Violation(
                    "FamilyViolation", objs[a].id,
                    f"boundaries of {objs[a].id} and {objs[b].id} cross {count} times (limit {limit})",
                    severity="warning",
                ))
    return found


def errors_only(violations: Sequence[Violation]) -> List[Violation]:
    return [v for v in violations if v.severity == "error"]


# ============================================================
# NORMALIZATION
# ============================================================

def normalize_weights(instance: Instance, mode: str = "as-given") -> Instance:
    """mode='unit' sets every weight to 1; 'as-given' is the identity."""
    if mode == "as-given":
        return instance
    if mode != "unit":
        raise ValueError(f"Unknown weight mode: {mode}. Available: ['unit', 'as-given']")
    objects = tuple(replace(obj, weight=1.0) for obj in instance.objects)
    return replace(instance, objects=objects)


def normalize_ids(instance: Instance) -> Instance:
    """Relabel objects 0..n-1 keeping their order."""
    objects = tuple(replace(obj, id=i) for i, obj in enumerate(instance.objects))
    return replace(instance, objects=objects)


def strip_contained(instance: Instance,
                    eps: float = GEOMETRY_CONFIG["eps_geom"]) -> Tuple[Instance, frozenset]:
    """
    Drop every object that contains another one (the outer object of each
    nested pair); among coincident shapes only the smallest id survives.

    Returns the reduced instance, relabeled 0..m-1 in the original order,
    and the removed ids in the input's labeling.
    """
    from src.geometry import contains_shape

    if not instance.is_unit_weight:
        raise WeightedInstanceError(
            "strip_contained needs equal weights; weighted containment is handled by LP containment rows"
        )

    objs = instance.objects
    removed = set()
    for j, outer in enumerate(objs):
        for i, inner in enumerate(objs):
            if i == j or not contains_shape(outer.shape, inner.shape, eps):
                continue
            coincident = contains_shape(inner.shape, outer.shape, eps)
            if not coincident or i < j:
                removed.add(outer.id)
                break

    kept = tuple(obj for obj in objs if obj.id not in removed)
    if removed:
        logger.info(f"strip_contained removed {len(removed)} of {len(objs)} objects")
    reduced = normalize_ids(replace(instance, objects=kept))
    return reduced, frozenset(removed)


# ============================================================
# SERIALIZATION
# ============================================================

def shape_to_dict(shape: Shape) -> Dict[str, Any]:
    if isinstance(shape, Disk):
        return {"type": "disk", "cx": shape.cx, "cy": shape.cy, "r": shape.r}
    if isinstance(shape, AxisRect):
        return {"type": "rect", "x0": shape.x0, "y0": shape.y0, "x1": shape.x1, "y1": shape.y1}
    if isinstance(shape, ConvexPolygon):
        return {"type": "polygon", "pts": [[x, y] for x, y in shape.vertices]}
    raise ValueError(f"Unknown shape type: {type(shape).__name__}")


def shape_from_dict(data: Dict[str, Any]) -> Shape:
    kind = data.get("type")
    if kind == "disk":
        return Disk(float(data["cx"]), float(data["cy"]), float(data["r"]))
    if kind == "rect":
        return AxisRect(float(data["x0"]), float(data["y0"]), float(data["x1"]), float(data["y1"]))
    if kind == "polygon":
        return ConvexPolygon(tuple((float(x), float(y)) for x, y in data["pts"]))
    raise ValueError(f"Unknown shape type: {kind}. Available: ['disk', 'rect', 'polygon']")


def instance_to_dict(instance: Instance) -> Dict[str, Any]:
    data: Dict[str, Any] = {"family": instance.family.kind.value}
    if instance.family.kind == FamilyKind.ADMISSIBLE:
        data["k"] = instance.family.k
    if instance.family.kind == FamilyKind.PSEUDO_DISKS and instance.family.rho != FAMILY_CONFIG["pseudo_disk_rho"]:
        data["rho"] = instance.family.rho
    data["objects"] = [
        {"id": obj.id, "weight": obj.weight, "shape": shape_to_dict(obj.shape)}
        for obj in instance.objects
    ]
    if instance.points is not None:
        data["points"] = [[x, y] for x, y in instance.points]
    return data


def instance_from_dict(data: Dict[str, Any]) -> Instance:
    kind = FamilyKind(data.get("family", "generic"))
    if kind == FamilyKind.PSEUDO_DISKS:
        family = Family.pseudo_disks(float(data.get("rho", FAMILY_CONFIG["pseudo_disk_rho"])))
    elif kind == FamilyKind.ADMISSIBLE:
        family = Family.admissible(int(data["k"]))
    else:
        family = Family(kind)
    objects = tuple(
        WeightedObject(id=int(o["id"]), shape=shape_from_dict(o["shape"]), weight=float(o["weight"]))
        for o in data["objects"]
    )
    points = data.get("points")
    pts = tuple((float(x), float(y)) for x, y in points) if points is not None else None
    return Instance(objects=objects, family=family, points=pts)


def serialize_instance(instance: Instance) -> str:
    return json.dumps(instance_to_dict(instance), indent=2)


def deserialize_instance(text: str) -> Instance:
    return instance_from_dict(json.loads(text))


def save_instance(instance: Instance, path: Union[str, Path]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(serialize_instance(instance))


def load_instance(path: Union[str, Path]) -> Instance:
    return deserialize_instance(Path(path).read_text())
