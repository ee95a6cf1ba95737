"""
Geometric predicates and constructions over disks, axis-aligned rectangles
and convex polygons: intersection and containment tests, boundary
intersection points, and arrangement-vertex enumeration for the LP.

All predicates use closed-region semantics with an absolute tolerance eps;
boundaries touching within eps count as intersecting.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, List, Sequence, Tuple

import shapely
from shapely.geometry import Polygon, box

from utils.config import GEOMETRY_CONFIG
from src.exceptions import DegenerateConfiguration, OverlappingBoundaries
from src.models import AxisRect, ConvexPolygon, Disk, FamilyKind, Instance, Point, Shape

logger = logging.getLogger(__name__)

EPS = GEOMETRY_CONFIG["eps_geom"]

# j-slot of a rectangle-corner vertex
CORNER = -1


@dataclass(frozen=True)
class ArrangementVertex:
    p: Point
    i: int
    j: int
    covering: Tuple[int, ...]


@dataclass
class Arrangement:
    vertices: List[ArrangementVertex]
    degenerate_pairs: List[Tuple[int, int]] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)


# ============================================================
# SMALL VECTOR HELPERS
# ============================================================

def _cross(ax: float, ay: float, bx: float, by: float) -> float:
    return ax * by - ay * bx


def _edges(shape: Shape) -> List[Tuple[Point, Point]]:
    if isinstance(shape, AxisRect):
        pts = shape.corners
    else:
        pts = shape.vertices
    return [(pts[k], pts[(k + 1) % len(pts)]) for k in range(len(pts))]


def _vertices(shape: Shape) -> Sequence[Point]:
    return shape.corners if isinstance(shape, AxisRect) else shape.vertices


def _segment_distance(p: Point, a: Point, b: Point) -> float:
    ex, ey = b[0] - a[0], b[1] - a[1]
    length2 = ex * ex + ey * ey
    t = 0.0 if length2 == 0 else max(0.0, min(1.0, ((p[0] - a[0]) * ex + (p[1] - a[1]) * ey) / length2))
    return math.hypot(p[0] - (a[0] + t * ex), p[1] - (a[1] + t * ey))


def _edge_signed_distances(poly: ConvexPolygon, p: Point) -> List[float]:
    """Signed distance of p to every edge line; positive inside (CCW order)."""
    dists = []
    for a, b in _edges(poly):
        ex, ey = b[0] - a[0], b[1] - a[1]
        dists.append(_cross(ex, ey, p[0] - a[0], p[1] - a[1]) / math.hypot(ex, ey))
    return dists


def _dedupe(points: Iterable[Point], eps: float) -> List[Point]:
    unique: List[Point] = []
    for p in points:
        if not any(abs(p[0] - q[0]) <= eps and abs(p[1] - q[1]) <= eps for q in unique):
            unique.append(p)
    return sorted(unique)


def _to_polygon(shape: Shape) -> Polygon:
    if isinstance(shape, AxisRect):
        return box(shape.x0, shape.y0, shape.x1, shape.y1)
    return Polygon(shape.vertices)


# ============================================================
# POINT AND REGION PREDICATES
# ============================================================

def contains_point(shape: Shape, p: Point, eps: float = EPS) -> bool:
    """True iff the closed region of shape contains p (eps slack)."""
    x, y = p
    if isinstance(shape, Disk):
        return math.hypot(x - shape.cx, y - shape.cy) <= shape.r + eps
    if isinstance(shape, AxisRect):
        return shape.x0 - eps <= x <= shape.x1 + eps and shape.y0 - eps <= y <= shape.y1 + eps
    return all(d >= -eps for d in _edge_signed_distances(shape, p))


def intersects(a: Shape, b: Shape, eps: float = EPS) -> bool:
    """True iff the closed regions share a point; tangency counts."""
    if isinstance(a, Disk) and isinstance(b, Disk):
        return math.hypot(a.cx - b.cx, a.cy - b.cy) <= a.r + b.r + eps
    if isinstance(a, AxisRect) and isinstance(b, AxisRect):
        return (a.x0 <= b.x1 + eps and b.x0 <= a.x1 + eps
                and a.y0 <= b.y1 + eps and b.y0 <= a.y1 + eps)
    if isinstance(b, Disk):
        a, b = b, a
    if isinstance(a, Disk):
        center = (a.cx, a.cy)
        if isinstance(b, AxisRect):
            qx = min(max(a.cx, b.x0), b.x1)
            qy = min(max(a.cy, b.y0), b.y1)
            return math.hypot(a.cx - qx, a.cy - qy) <= a.r + eps
        if contains_point(b, center, eps):
            return True
        return min(_segment_distance(center, s, t) for s, t in _edges(b)) <= a.r + eps
    return _to_polygon(a).distance(_to_polygon(b)) <= eps


def contains_shape(a: Shape, b: Shape, eps: float = EPS) -> bool:
    """True iff b is a subset of a (closed containment with eps slack)."""
    if isinstance(b, Disk):
        if isinstance(a, Disk):
            return math.hypot(a.cx - b.cx, a.cy - b.cy) + b.r <= a.r + eps
        if isinstance(a, AxisRect):
            return (b.cx - b.r >= a.x0 - eps and b.cx + b.r <= a.x1 + eps
                    and b.cy - b.r >= a.y0 - eps and b.cy + b.r <= a.y1 + eps)
        return all(d >= b.r - eps for d in _edge_signed_distances(a, (b.cx, b.cy)))
    # b is polygonal; for a convex container its vertices suffice
    return all(contains_point(a, v, eps) for v in _vertices(b))


# ============================================================
# BOUNDARY INTERSECTIONS
# ============================================================

def _circle_circle(a: Disk, b: Disk, eps: float) -> List[Point]:
    dx, dy = b.cx - a.cx, b.cy - a.cy
    d = math.hypot(dx, dy)
    if d <= eps:
        if abs(a.r - b.r) <= eps:
            raise OverlappingBoundaries("coincident circles")
        return []
    if d > a.r + b.r + eps or d < abs(a.r - b.r) - eps:
        return []
    along = (a.r * a.r - b.r * b.r + d * d) / (2.0 * d)
    base = (a.cx + along * dx / d, a.cy + along * dy / d)
    tangent = abs(d - (a.r + b.r)) <= eps or abs(d - abs(a.r - b.r)) <= eps
    h2 = a.r * a.r - along * along
    if tangent or h2 <= 0:
        return [base]
    h = math.sqrt(h2)
    ox, oy = -dy * h / d, dx * h / d
    return sorted([(base[0] + ox, base[1] + oy), (base[0] - ox, base[1] - oy)])


def _segment_segment(p1: Point, p2: Point, q1: Point, q2: Point, eps: float) -> List[Point]:
    rx, ry = p2[0] - p1[0], p2[1] - p1[1]
    sx, sy = q2[0] - q1[0], q2[1] - q1[1]
    r_len, s_len = math.hypot(rx, ry), math.hypot(sx, sy)
    wx, wy = q1[0] - p1[0], q1[1] - p1[1]
    denom = _cross(rx, ry, sx, sy)

    if abs(denom) <= eps * r_len * s_len:
        # parallel; only collinear segments can meet
        if abs(_cross(wx, wy, rx, ry)) > eps * r_len:
            return []
        r2 = r_len * r_len
        t0 = (wx * rx + wy * ry) / r2
        t1 = ((q2[0] - p1[0]) * rx + (q2[1] - p1[1]) * ry) / r2
        lo, hi = max(0.0, min(t0, t1)), min(1.0, max(t0, t1))
        if (hi - lo) * r_len > eps:
            raise OverlappingBoundaries("collinear boundary edges overlap")
        if hi - lo < -eps / r_len:
            return []
        t = min(max(lo, 0.0), 1.0)
        return [(p1[0] + t * rx, p1[1] + t * ry)]

    t = _cross(wx, wy, sx, sy) / denom
    u = _cross(wx, wy, rx, ry) / denom
    t_tol, u_tol = eps / r_len, eps / s_len
    if -t_tol <= t <= 1 + t_tol and -u_tol <= u <= 1 + u_tol:
        t = min(max(t, 0.0), 1.0)
        return [(p1[0] + t * rx, p1[1] + t * ry)]
    return []


def _segment_circle(p: Point, q: Point, disk: Disk, eps: float) -> List[Point]:
    rx, ry = q[0] - p[0], q[1] - p[1]
    length = math.hypot(rx, ry)
    fx, fy = p[0] - disk.cx, p[1] - disk.cy
    dist_line = abs(_cross(rx, ry, -fx, -fy)) / length
    if dist_line > disk.r + eps:
        return []
    a = length * length
    b = 2.0 * (rx * fx + ry * fy)
    tol = eps / length
    if abs(dist_line - disk.r) <= eps:
        roots = [-b / (2.0 * a)]
    else:
        c = fx * fx + fy * fy - disk.r * disk.r
        disc = math.sqrt(max(b * b - 4.0 * a * c, 0.0))
        roots = [(-b - disc) / (2.0 * a), (-b + disc) / (2.0 * a)]
    found = []
    for t in roots:
        if -tol <= t <= 1 + tol:
            t = min(max(t, 0.0), 1.0)
            found.append((p[0] + t * rx, p[1] + t * ry))
    return found


def boundary_intersections(a: Shape, b: Shape, eps: float = EPS) -> List[Point]:
    """
    All points where the boundaries of a and b meet, sorted by (x, y).

    Raises OverlappingBoundaries when the boundaries share a 1-D piece.
    """
    if isinstance(a, Disk) and isinstance(b, Disk):
        return _circle_circle(a, b, eps)
    if isinstance(b, Disk):
        a, b = b, a
    if isinstance(a, Disk):
        pts = [pt for s, t in _edges(b) for pt in _segment_circle(s, t, a, eps)]
        return _dedupe(pts, eps)
    pts = []
    for p1, p2 in _edges(a):
        for q1, q2 in _edges(b):
            pts.extend(_segment_segment(p1, p2, q1, q2, eps))
    return _dedupe(pts, eps)


def boundary_intersection_count(a: AxisRect, b: AxisRect, eps: float = EPS) -> int:
    """
    Number of boundary crossings of two rectangles in general position: 0, 2 or 4.
    Zero covers both disjoint and nested pairs.
    """
    for u in (a.x0, a.x1):
        for v in (b.x0, b.x1):
            if abs(u - v) <= eps:
                raise DegenerateConfiguration(f"rectangles share the vertical line x={u}")
    for u in (a.y0, a.y1):
        for v in (b.y0, b.y1):
            if abs(u - v) <= eps:
                raise DegenerateConfiguration(f"rectangles share the horizontal line y={u}")
    count = len(boundary_intersections(a, b, eps))
    # tangency folds into the next even count
    return count + (count % 2)


# ============================================================
# SPATIAL INDEX AND ARRANGEMENT
# ============================================================

class BoxIndex:
    """STRtree over eps-expanded bounding boxes of a shape list."""

    def __init__(self, shapes: Sequence[Shape], eps: float = EPS):
        self.shapes = list(shapes)
        self.eps = eps
        self._boxes = [box(x0 - eps, y0 - eps, x1 + eps, y1 + eps)
                       for x0, y0, x1, y1 in (s.bounds for s in self.shapes)]
        self._tree = shapely.STRtree(self._boxes)

    def candidate_pairs(self) -> List[Tuple[int, int]]:
        """Sorted index pairs (i < j) whose boxes overlap."""
        if not self._boxes:
            return []
        left, right = self._tree.query(self._boxes)
        pairs = {(int(i), int(j)) for i, j in zip(left, right) if i < j}
        return sorted(pairs)

    def candidates_at(self, p: Point) -> List[int]:
        if not self._boxes:
            return []
        return sorted(int(k) for k in self._tree.query(shapely.Point(p[0], p[1])))

    def covering(self, p: Point) -> Tuple[int, ...]:
        return tuple(k for k in self.candidates_at(p) if contains_point(self.shapes[k], p, self.eps))


def enumerate_arrangement(instance: Instance, eps: float = EPS) -> Arrangement:
    """
    Arrangement vertices of the instance with their covering sets, plus the
    pairs skipped as degenerate and family-contract warnings.
    """
    shapes = instance.shapes
    index = BoxIndex(shapes, eps)
    result = Arrangement(vertices=[])
    family = instance.family
    limit = None
    if family.kind == FamilyKind.PSEUDO_DISKS:
        limit = 2
    elif family.kind == FamilyKind.ADMISSIBLE:
        limit = family.k

    for i, j in index.candidate_pairs():
        try:
            pts = boundary_intersections(shapes[i], shapes[j], eps)
        except OverlappingBoundaries:
            logger.warning(f"Skipping degenerate pair ({i}, {j}): boundaries overlap")
            result.degenerate_pairs.append((i, j))
            continue
        if limit is not None and len(pts) > limit:
            message = f"objects {i} and {j} cross {len(pts)} times, above the family limit {limit}"
            logger.warning(message)
            result.warnings.append(message)
        for p in pts:
            result.vertices.append(ArrangementVertex(p=p, i=i, j=j, covering=index.covering(p)))

    if family.kind == FamilyKind.RECTANGLES:
        for i, shape in enumerate(shapes):
            for p in shape.corners:
                result.vertices.append(ArrangementVertex(p=p, i=i, j=CORNER, covering=index.covering(p)))

    result.vertices.sort(key=lambda v: (v.i, v.j, v.p[0], v.p[1]))
    logger.debug(f"Arrangement: {len(result.vertices)} vertices, {len(result.degenerate_pairs)} degenerate pairs")
    return result


def arrangement_vertices(instance: Instance, eps: float = EPS) -> List[ArrangementVertex]:
    return enumerate_arrangement(instance, eps).vertices


def depth_at(instance: Instance, ids: Iterable[int], p: Point, eps: float = EPS) -> int:
    """Number of objects among ids whose closed region contains p."""
    return sum(1 for i in ids if contains_point(instance.objects[i].shape, p, eps))
