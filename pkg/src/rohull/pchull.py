"""Polyconvex hulls of determinant-nonnegative sets and rank-one plane pairs.

Under the pairwise det >= 0 hypothesis the hull is the order-2 lamination
iterate: the support of any admissible measure sits inside a plane of
rank-one directions, so the hull decomposes into within-plane convex
polygons plus singletons.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

import numpy as np

from .core import GeometryError, Mat2
from .scalar import DEFAULT_TOL, EXACT, Scalar, mode_of

Matrix = tuple[tuple[Scalar, ...], ...]


def to_rows(m) -> Matrix:
    if isinstance(m, Mat2):
        return m.rows()
    return tuple(tuple(e for e in row) for row in m)


def rows_to_mat2(rows: Matrix) -> Mat2:
    return Mat2.from_rows(rows)


def _mat_sub(a: Matrix, b: Matrix) -> Matrix:
    return tuple(tuple(x - y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def _is_exact_matrix(m: Matrix) -> bool:
    return all(mode_of(e) == EXACT for row in m for e in row)


def _normalize_exact(v):
    """Scale a rational vector to primitive integers with positive lead."""
    fracs = [Fraction(x) for x in v]
    denom = 1
    for f in fracs:
        denom = denom * f.denominator // gcd(denom, f.denominator)
    ints = [int(f * denom) for f in fracs]
    g = 0
    for x in ints:
        g = gcd(g, abs(x))
    if g:
        ints = [x // g for x in ints]
    lead = next((x for x in ints if x != 0), 1)
    if lead < 0:
        ints = [-x for x in ints]
    return tuple(Fraction(x) for x in ints)


def _normalize_float(v):
    arr = np.array([float(x) for x in v])
    n = np.linalg.norm(arr)
    if n == 0:
        return tuple(arr)
    arr = arr / n
    lead = next((x for x in arr if abs(x) > 1e-12), 1.0)
    if lead < 0:
        arr = -arr
    return tuple(float(x) for x in arr)


@dataclass(frozen=True)
class RankOnePlane:
    """Affine plane of matrices in which every difference has rank <= 1.

    kind "left": basepoint + x . generator^T over row coefficients x (the
    generator is the shared row direction); kind "right": basepoint +
    generator . y^T (the generator is the shared column direction).
    """

    basepoint: Matrix
    kind: str  # "left" or "right"
    generator: tuple[Scalar, ...]

    def shape(self) -> tuple[int, int]:
        return len(self.basepoint), len(self.basepoint[0])

    def dimension(self) -> int:
        m, n = self.shape()
        return m if self.kind == "left" else n

    def contains(self, mat, tol: Scalar = 0) -> bool:
        d = _mat_sub(to_rows(mat), self.basepoint)
        if self.kind == "left":
            vectors = d
        else:
            vectors = tuple(zip(*d))
        g = self.generator
        scale = max([abs(float(e)) for row in d for e in row] + [1.0])
        for vec in vectors:
            for i in range(len(g)):
                for j in range(i + 1, len(g)):
                    minor = vec[i] * g[j] - vec[j] * g[i]
                    if abs(float(minor)) > float(tol) * scale:
                        if minor != 0:
                            return False
        return True

    def coords(self, mat):
        """Coefficient vector of a member matrix (length m or n)."""
        d = _mat_sub(to_rows(mat), self.basepoint)
        g = self.generator
        gg = sum(x * x for x in g)
        if self.kind == "left":
            vectors = d
        else:
            vectors = tuple(zip(*d))
        return tuple(sum(a * b for a, b in zip(vec, g)) / gg for vec in vectors)

    def matrix_at(self, coeffs) -> Matrix:
        g = self.generator
        if self.kind == "left":
            delta = tuple(tuple(c * gj for gj in g) for c in coeffs)
        else:
            delta = tuple(tuple(c * gi for c in coeffs) for gi in g)
        return tuple(tuple(b + d for b, d in zip(rb, rd))
                     for rb, rd in zip(self.basepoint, delta))


@dataclass(frozen=True)
class PlanePair:
    p1: RankOnePlane  # left plane, m-dimensional
    p2: RankOnePlane  # right plane, n-dimensional
    intersection_direction: Matrix  # rank-one product of the two generators


def plane_pair(x0, y0, tol: Scalar = DEFAULT_TOL) -> PlanePair:
    """The two rank-one planes through a rank-one connected pair.

    Factorizes the difference as an outer product; every matrix within
    rank <= 1 of both inputs lies in one of the two returned planes.
    """
    a = to_rows(x0)
    b = to_rows(y0)
    d = _mat_sub(a, b)
    m, n = len(d), len(d[0])
    exact = _is_exact_matrix(d)
    if exact:
        piv = None
        for i in range(m):
            for j in range(n):
                if d[i][j] != 0:
                    piv = (i, j)
                    break
            if piv:
                break
        if piv is None:
            raise GeometryError("difference not rank-one")
        i0, j0 = piv
        w0 = d[i0]
        v0 = tuple(d[i][j0] / d[i0][j0] for i in range(m))
        # verify the outer product reproduces the difference exactly
        for i in range(m):
            for j in range(n):
                if v0[i] * w0[j] != d[i][j]:
                    raise GeometryError("difference not rank-one")
        w0 = _normalize_exact(w0)
        v0 = _normalize_exact(v0)
    else:
        arr = np.array([[float(e) for e in row] for row in d])
        u, s, vt = np.linalg.svd(arr)
        if s[0] == 0 or (len(s) > 1 and s[1] > float(tol) * max(1.0, s[0])):
            raise GeometryError("difference not rank-one")
        v0 = _normalize_float(u[:, 0])
        w0 = _normalize_float(vt[0])
    inter = tuple(tuple(vi * wj for wj in w0) for vi in v0)
    return PlanePair(RankOnePlane(b, "left", w0),
                     RankOnePlane(b, "right", v0), inter)


# --- pairwise det report --------------------------------------------------


@dataclass(frozen=True)
class DetCheckReport:
    passed: bool
    violating_pair: tuple[int, int] | None
    rank_one_pairs: tuple[tuple[int, int], ...]
    dets: tuple[tuple[int, int, Scalar], ...]


def pairwise_det_check(k) -> DetCheckReport:
    pts = list(k)
    dets = []
    rank_one = []
    violating = None
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            d = (pts[i] - pts[j]).det()
            dets.append((i, j, d))
            if d == 0 and pts[i] != pts[j]:
                rank_one.append((i, j))
            if d < 0 and violating is None:
                violating = (i, j)
    return DetCheckReport(violating is None, violating,
                          tuple(rank_one), tuple(dets))


# --- 2D exact convex hull -------------------------------------------------


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull_2d(points):
    """Monotone-chain hull with exact orientation predicates; returns the
    hull vertices counterclockwise (collinear interior points removed)."""
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts
    lower = []
    for p in pts:
        while len(lower) > 1 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper = []
    for p in reversed(pts):
        while len(upper) > 1 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def _on_segment_2d(a, b, q) -> bool:
    if _cross(a, b, q) != 0:
        return False
    return (min(a[0], b[0]) <= q[0] <= max(a[0], b[0])
            and min(a[1], b[1]) <= q[1] <= max(a[1], b[1]))


def polygon_contains(vertices, q) -> bool:
    """Point-in-convex-polygon with exact arithmetic; boundary counts."""
    if not vertices:
        return False
    if len(vertices) == 1:
        return tuple(q) == tuple(vertices[0])
    if len(vertices) == 2:
        return _on_segment_2d(vertices[0], vertices[1], q)
    n = len(vertices)
    for i in range(n):
        if _cross(vertices[i], vertices[(i + 1) % n], q) < 0:
            return False
    return True


# --- hull computation -----------------------------------------------------


@dataclass(frozen=True)
class PlaneHull:
    plane: RankOnePlane
    indices: tuple[int, ...]
    vertices: tuple  # 2D hull vertices in plane coordinates, ccw


@dataclass(frozen=True)
class HullDescription:
    points: tuple[Mat2, ...]
    planes: tuple[PlaneHull, ...]
    singleton_indices: tuple[int, ...]

    def membership(self, m: Mat2, tol: Scalar = 0) -> bool:
        if any(m == p for p in self.points):
            return True
        for ph in self.planes:
            if ph.plane.contains(m, tol):
                q = ph.plane.coords(m)
                if polygon_contains(ph.vertices, q):
                    return True
        return False


def pc_hull(k, tol: Scalar = DEFAULT_TOL) -> HullDescription:
    """Polyconvex hull of a finite det-nonnegative set of 2x2 matrices.

    Maximal groups of points sharing a rank-one plane become within-plane
    convex polygons; everything else stays a singleton.  Equals the order-2
    lamination iterate under the det >= 0 hypothesis.
    """
    pts = list(k)
    report = pairwise_det_check(pts)
    if not report.passed:
        raise GeometryError("det sign condition violated")
    exact = all(p.mode == EXACT for p in pts)
    plane_tol = 0 if exact else tol
    candidates = []
    for (i, j) in report.rank_one_pairs:
        pair = plane_pair(pts[i], pts[j], tol)
        for plane in (pair.p1, pair.p2):
            members = tuple(idx for idx, p in enumerate(pts)
                            if plane.contains(p, plane_tol))
            if len(members) >= 2:
                candidates.append((members, plane))
    # dedupe by member set; drop sets dominated by a strict superset
    by_members = {}
    for members, plane in candidates:
        by_members.setdefault(frozenset(members), (members, plane))
    kept = []
    for key, (members, plane) in sorted(by_members.items(),
                                        key=lambda kv: kv[1][0]):
        if any(key < other for other in by_members if other != key):
            continue
        kept.append((members, plane))
    plane_hulls = []
    covered = set()
    for members, plane in kept:
        coords = [plane.coords(pts[i]) for i in members]
        verts = convex_hull_2d(coords)
        plane_hulls.append(PlaneHull(plane, members, tuple(verts)))
        covered.update(members)
    singles = tuple(i for i in range(len(pts)) if i not in covered)
    return HullDescription(tuple(pts), tuple(plane_hulls), singles)


# --- Caratheodory ---------------------------------------------------------


class OutsideHullError(GeometryError):
    def __init__(self, direction):
        super().__init__(f"target outside hull; separating direction {direction}")
        self.direction = direction


@dataclass(frozen=True)
class CaratheodoryResult:
    points: tuple
    weights: tuple
    intermediate: Matrix  # first two-point combination
    intermediate_weight: Scalar

    def reconstruct(self) -> Matrix:
        rows = None
        for pt, w in zip(self.points, self.weights):
            scaled = tuple(tuple(w * e for e in row) for row in to_rows(pt))
            if rows is None:
                rows = scaled
            else:
                rows = tuple(tuple(a + b for a, b in zip(ra, rb))
                             for ra, rb in zip(rows, scaled))
        return rows


def _barycentric(a, b, c, q):
    d = (b[1] - c[1]) * (a[0] - c[0]) + (c[0] - b[0]) * (a[1] - c[1])
    if d == 0:
        return None
    u = ((b[1] - c[1]) * (q[0] - c[0]) + (c[0] - b[0]) * (q[1] - c[1])) / d
    v = ((c[1] - a[1]) * (q[0] - c[0]) + (a[0] - c[0]) * (q[1] - c[1])) / d
    w = 1 - u - v
    return u, v, w


def caratheodory_decompose(plane: RankOnePlane, points, target) -> CaratheodoryResult:
    """Express a hull member as a convex combination of <= 3 set points,
    together with the two-step lamination realization inside the plane."""
    coords = [tuple(plane.coords(p)) for p in points]
    q = tuple(plane.coords(target))
    if len(q) != 2:
        raise GeometryError("Caratheodory decomposition implemented for "
                            "2-dimensional planes")
    one = Fraction(1) if all(mode_of(c) == EXACT for c in q) else 1.0
    zero = 0 * one
    # vertex hit
    for p, c in zip(points, coords):
        if c == q:
            return _finish(plane, [p], [one])
    # edge hit
    for i in range(len(points)):
        for j in range(i + 1, len(points)):
            a, b = coords[i], coords[j]
            if not _on_segment_2d(a, b, q):
                continue
            dx, dy = b[0] - a[0], b[1] - a[1]
            t = ((q[0] - a[0]) / dx) if dx != 0 else \
                ((q[1] - a[1]) / dy) if dy != 0 else zero
            return _finish(plane, [points[i], points[j]], [one - t, t])
    # triangle hit
    for i in range(len(points)):
        for j in range(i + 1, len(points)):
            for l in range(j + 1, len(points)):
                bar = _barycentric(coords[i], coords[j], coords[l], q)
                if bar is None:
                    continue
                u, v, w = bar
                if u >= 0 and v >= 0 and w >= 0:
                    return _finish(plane, [points[i], points[j], points[l]],
                                   [u, v, w])
    hull = convex_hull_2d(coords)
    direction = _separating_direction(hull, q)
    raise OutsideHullError(direction)


def _separating_direction(hull, q):
    if len(hull) >= 3:
        n = len(hull)
        for i in range(n):
            a, b = hull[i], hull[(i + 1) % n]
            if _cross(a, b, q) < 0:
                return (a[1] - b[1], b[0] - a[0])
    if len(hull) == 2:
        a, b = hull
        cr = _cross(a, b, q)
        if cr != 0:
            s = 1 if cr < 0 else -1
            return (s * (a[1] - b[1]), s * (b[0] - a[0]))
    a = hull[0] if hull else (0, 0)
    return (q[0] - a[0], q[1] - a[1])


def _finish(plane, pts, weights):
    # reorder so the first weight is nonzero, then realize in two steps
    order = sorted(range(len(pts)), key=lambda i: weights[i] == 0)
    pts = [pts[i] for i in order]
    weights = [weights[i] for i in order]
    if len(pts) == 1:
        inter = to_rows(pts[0])
        head = weights[0]
    else:
        head = weights[0] + weights[1]
        a = to_rows(pts[0])
        b = to_rows(pts[1])
        if head == 0:
            inter = a
        else:
            s = weights[1] / head
            inter = tuple(tuple((1 - s) * x + s * y for x, y in zip(ra, rb))
                          for ra, rb in zip(a, b))
    return CaratheodoryResult(tuple(pts), tuple(weights), inter, head)
