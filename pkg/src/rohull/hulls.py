"""Lamination hull iterates, Hausdorff distances, and separator certificates.

A hull iterate is represented as a finite union of points and rank-one
segments.  Point-point and point-segment offspring are exact; segment-segment
offspring are sampled and flagged approximate.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .core import (
    GeometryError,
    Mat2,
    TriPt,
    SymPt,
    combine,
    det_cross,
    inner,
    rank_one_connected,
)
from .scalar import (
    DEFAULT_TOL,
    EXACT,
    FLOAT,
    Scalar,
    mode_of,
    rational_sqrt,
    scalar_sqrt,
)


@dataclass(frozen=True)
class RankOneSegment:
    """Closed segment [a, b] whose endpoints differ by a rank-<=1 matrix."""

    a: Mat2
    b: Mat2
    generation: int
    approx: bool = False

    def midpoint(self) -> Mat2:
        half = Fraction(1, 2) if self.a.mode == EXACT else 0.5
        return combine(self.a, self.b, half)


@dataclass(frozen=True)
class LaminateSet:
    points: tuple[Mat2, ...]
    segments: tuple[RankOneSegment, ...] = ()
    order: int = 0

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))
        object.__setattr__(self, "segments", tuple(self.segments))
        if self.order < 0:
            raise GeometryError("order must be nonnegative")
        if self.order == 0 and self.segments:
            raise GeometryError("order-0 sets have no segments")

    def validate(self, tol: Scalar = DEFAULT_TOL) -> None:
        for seg in self.segments:
            if not rank_one_connected(seg.a, seg.b, tol):
                raise GeometryError("segment endpoints are not rank-one connected")

    def is_empty(self) -> bool:
        return not self.points and not self.segments


def _quadratic_unit_roots(c2: Scalar, c1: Scalar, c0: Scalar,
                          exact: bool, tol: Scalar):
    """Roots in [0, 1] of c2 t^2 + c1 t + c0.

    Returns ("all", None) when the polynomial vanishes identically, else
    ("roots", [t...]).  In exact mode irrational roots are dropped (the
    rational discriminant test); callers that need them run in float mode.
    """
    if c2 == 0 and c1 == 0 and c0 == 0:
        return "all", None
    roots = []
    if c2 == 0:
        if c1 != 0:
            t = -c0 / c1
            if 0 <= t <= 1:
                roots.append(t)
        return "roots", roots
    disc = c1 * c1 - 4 * c2 * c0
    if disc < 0:
        return "roots", roots
    if exact:
        sq = rational_sqrt(disc)
        if sq is None:
            return "roots", roots
    else:
        sq = scalar_sqrt(disc)
    for num in (-c1 - sq, -c1 + sq):
        t = num / (2 * c2)
        if 0 <= t <= 1 and t not in roots:
            roots.append(t)
    return "roots", roots


def _point_segment_offspring(p: Mat2, seg: RankOneSegment, generation: int,
                             exact: bool, tol: Scalar):
    """Segments from p to the rank-one crossing points on seg."""
    m = seg.a - p
    n = seg.b - seg.a
    c0 = m.det()
    c1 = det_cross(m, n)
    c2 = n.det()
    kind, roots = _quadratic_unit_roots(c2, c1, c0, exact, tol)
    out = []
    if kind == "all":
        # the whole segment is rank-one visible from p; keep the extreme rungs
        for q in (seg.a, seg.b):
            if q != p:
                out.append(RankOneSegment(p, q, generation, seg.approx))
        return out
    for t in roots:
        if not exact and mode_of(t) == EXACT:
            t = float(t)
        q = combine(seg.a, seg.b, t)
        if q != p:
            out.append(RankOneSegment(p, q, generation, seg.approx))
    return out


def _parallel4(u: Mat2, v: Mat2) -> bool:
    e = u.entries()
    f = v.entries()
    for i in range(4):
        for j in range(i + 1, 4):
            if e[i] * f[j] != e[j] * f[i]:
                return False
    return True


def _segment_contains(big: RankOneSegment, small: RankOneSegment) -> bool:
    """Exact containment test for collinear segments on a common line."""
    d = big.b - big.a
    dd = d.frob_sq()
    if dd == 0:
        return False
    if not _parallel4(d, small.b - small.a):
        return False
    if not (_parallel4(d, small.a - big.a) or small.a == big.a):
        return False
    ta = inner(small.a - big.a, d) / dd
    tb = inner(small.b - big.a, d) / dd
    if not (0 <= ta <= 1 and 0 <= tb <= 1):
        return False
    return (combine(big.a, big.b, ta) == small.a
            and combine(big.a, big.b, tb) == small.b)


def _dedup_segments(segments):
    # drop zero-length, exact duplicates, and exact segments contained in a
    # longer collinear exact segment
    kept = []
    seen = set()
    for seg in segments:
        if seg.a == seg.b:
            continue
        key = frozenset([seg.a.entries(), seg.b.entries()]), seg.approx
        if key in seen:
            continue
        seen.add(key)
        kept.append(seg)
    if any(s.a.mode == FLOAT for s in kept):
        return kept
    out = []
    for i, seg in enumerate(kept):
        absorbed = False
        for j, other in enumerate(kept):
            if i == j:
                continue
            if _segment_contains(other, seg):
                # ties (identical spans) keep the earlier one
                if not (_segment_contains(seg, other) and i < j):
                    absorbed = True
                    break
        if not absorbed:
            out.append(seg)
    return out


def lamination_step(s: LaminateSet, tol: Scalar = DEFAULT_TOL,
                    samples_per_segment: int = 64,
                    segment_segment: bool = True) -> LaminateSet:
    """One application of the segment-adding step.

    Point-point rank-one pairs and point-segment crossings contribute exact
    segments; segment-segment offspring are sampled per axis and flagged
    approximate.
    """
    if segment_segment and samples_per_segment < 2:
        raise GeometryError("samples_per_segment must be >= 2")
    exact = all(p.mode == EXACT for p in s.points) and \
        all(seg.a.mode == EXACT for seg in s.segments)
    gen = s.order + 1
    new = []
    pts = list(s.points)
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            if pts[i] == pts[j]:
                continue
            if rank_one_connected(pts[i], pts[j], tol):
                new.append(RankOneSegment(pts[i], pts[j], gen))
    for p in pts:
        for seg in s.segments:
            new.extend(_point_segment_offspring(p, seg, gen, exact, tol))
    if segment_segment:
        segs = list(s.segments)
        for i in range(len(segs)):
            for j in range(len(segs)):
                if i == j:
                    continue
                s1, s2 = segs[i], segs[j]
                for k in range(samples_per_segment):
                    t = Fraction(k, samples_per_segment - 1) if exact \
                        else k / (samples_per_segment - 1)
                    p = combine(s1.a, s1.b, t)
                    for child in _point_segment_offspring(p, s2, gen, exact, tol):
                        new.append(RankOneSegment(child.a, child.b, gen, True))
    segments = _dedup_segments(list(s.segments) + new)
    return LaminateSet(points=s.points, segments=tuple(segments), order=gen)


def l2_hull(k, tol: Scalar = DEFAULT_TOL) -> LaminateSet:
    """Order-2 lamination iterate of a finite set, exact point/segment steps."""
    s = LaminateSet(points=tuple(k), order=0)
    s = lamination_step(s, tol, segment_segment=False)
    return lamination_step(s, tol, segment_segment=False)


# --- distances -----------------------------------------------------------


def point_point_dist_sq(p: Mat2, q: Mat2) -> Scalar:
    return (p - q).frob_sq()


def point_segment_dist_sq(p: Mat2, a: Mat2, b: Mat2) -> Scalar:
    d = b - a
    dd = d.frob_sq()
    if dd == 0:
        return (p - a).frob_sq()
    t = inner(p - a, d) / dd
    zero = Fraction(0) if mode_of(t) == EXACT else 0.0
    one = Fraction(1) if mode_of(t) == EXACT else 1.0
    t = min(max(t, zero), one)
    return (p - combine(a, b, t)).frob_sq()


def point_to_set_dist_sq(p: Mat2, s: LaminateSet) -> Scalar:
    if s.is_empty():
        raise GeometryError("Hausdorff undefined for empty set")
    best = None
    for q in s.points:
        d = point_point_dist_sq(p, q)
        best = d if best is None else min(best, d)
    for seg in s.segments:
        d = point_segment_dist_sq(p, seg.a, seg.b)
        best = d if best is None else min(best, d)
    return best


def point_to_set_distance(p: Mat2, s: LaminateSet) -> Scalar:
    return scalar_sqrt(point_to_set_dist_sq(p, s))


def _segment_sup_dist_sq(seg: RankOneSegment, target: LaminateSet,
                         samples: int = 33) -> Scalar:
    """sup over the segment of the distance to the target set.

    Exact when the target is a pure point set: the squared distance to each
    point is quadratic in t with a common leading coefficient, so envelope
    breakpoints are rational crossings; with target segments present, uniform
    samples are added and the result is a lower approximation.
    """
    a, b = seg.a, seg.b
    exact = a.mode == EXACT and not target.segments
    candidates = []
    zero = Fraction(0) if a.mode == EXACT else 0.0
    one = Fraction(1) if a.mode == EXACT else 1.0
    candidates.extend([zero, one])
    pts = target.points
    d = b - a
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            # |P(t)-pi|^2 - |P(t)-pj|^2 is linear in t
            u = pts[j] - pts[i]
            c1 = 2 * inner(d, u)
            c0 = 2 * inner(a, u) - (pts[j].frob_sq() - pts[i].frob_sq())
            if c1 != 0:
                t = -c0 / c1
                if zero < t < one:
                    candidates.append(t)
    if target.segments or not exact:
        for k in range(1, samples):
            candidates.append(Fraction(k, samples) if a.mode == EXACT
                              else k / samples)
    best = None
    for t in candidates:
        p = combine(a, b, t)
        dsq = point_to_set_dist_sq(p, target)
        best = dsq if best is None else max(best, dsq)
    return best


def directed_dist_sq(src: LaminateSet, target: LaminateSet) -> Scalar:
    """Squared directed Hausdorff distance sup_{x in src} dist(x, target)."""
    if src.is_empty() or target.is_empty():
        raise GeometryError("Hausdorff undefined for empty set")
    best = None
    for p in src.points:
        d = point_to_set_dist_sq(p, target)
        best = d if best is None else max(best, d)
    for seg in src.segments:
        d = _segment_sup_dist_sq(seg, target)
        best = d if best is None else max(best, d)
    return best


def hausdorff_sq(s1: LaminateSet, s2: LaminateSet) -> Scalar:
    return max(directed_dist_sq(s1, s2), directed_dist_sq(s2, s1))


def hausdorff(s1: LaminateSet, s2: LaminateSet) -> Scalar:
    """Hausdorff distance; exact when the squared value is a rational square."""
    return scalar_sqrt(hausdorff_sq(s1, s2))


def directed_distance(s1: LaminateSet, s2: LaminateSet) -> Scalar:
    return scalar_sqrt(directed_dist_sq(s1, s2))


# --- separator certificates ----------------------------------------------


@dataclass(frozen=True)
class SeparatorWitness:
    boundary_points: tuple
    subspace: str
    pairwise_dets: tuple[Scalar, ...]


def separator_check(boundary, subspace: str) -> SeparatorWitness:
    """Certify that {z > 0} union the boundary points is lamination convex.

    Segments joining a boundary point to the open half-space stay inside it
    except at the endpoint, so only boundary-boundary rank-one connections can
    break lamination convexity; those are excluded by nonzero pairwise dets.
    """
    if subspace not in ("tri", "sym"):
        raise GeometryError(f"unknown subspace {subspace!r}")
    cls = TriPt if subspace == "tri" else SymPt
    pts = []
    for p in boundary:
        if not isinstance(p, cls):
            raise GeometryError(f"boundary point {p!r} not in {subspace} subspace")
        if p.z != 0:
            raise GeometryError("boundary points must have z = 0")
        pts.append(p)
    dets = []
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            d = (pts[i].embed() - pts[j].embed()).det()
            if d == 0:
                raise GeometryError(
                    "separator fails: rank-one connection in boundary set "
                    f"between points {i} and {j}")
            dets.append(d)
    return SeparatorWitness(tuple(pts), subspace, tuple(dets))
