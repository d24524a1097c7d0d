"""2x2 matrix algebra, subspace embeddings, and rank-one predicates.

All matrix entries live in a single scalar mode (exact rational or float);
values are immutable and safe to share.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .scalar import (
    DEFAULT_TOL,
    EXACT,
    Scalar,
    common_mode,
    mode_of,
    scalar_sqrt,
    sign,
)


class GeometryError(ValueError):
    """A geometric precondition was violated."""


def _coerce(x: Scalar) -> Scalar:
    # plain ints become Fractions so exact values have a uniform type
    if isinstance(x, int) and not isinstance(x, bool):
        return Fraction(x)
    return x


@dataclass(frozen=True)
class Mat2:
    """A real 2x2 matrix [[a11, a12], [a21, a22]]."""

    a11: Scalar
    a12: Scalar
    a21: Scalar
    a22: Scalar

    def __post_init__(self):
        object.__setattr__(self, "a11", _coerce(self.a11))
        object.__setattr__(self, "a12", _coerce(self.a12))
        object.__setattr__(self, "a21", _coerce(self.a21))
        object.__setattr__(self, "a22", _coerce(self.a22))
        common_mode(self.a11, self.a12, self.a21, self.a22)

    @property
    def mode(self) -> str:
        return mode_of(self.a11)

    @staticmethod
    def from_rows(rows) -> "Mat2":
        (a, b), (c, d) = rows
        return Mat2(a, b, c, d)

    @staticmethod
    def zero(mode: str = EXACT) -> "Mat2":
        if mode == EXACT:
            return Mat2(0, 0, 0, 0)
        return Mat2(0.0, 0.0, 0.0, 0.0)

    @staticmethod
    def diag(x: Scalar, y: Scalar) -> "Mat2":
        z = 0 if mode_of(x) == EXACT else 0.0
        return Mat2(x, z, z, y)

    def rows(self):
        return ((self.a11, self.a12), (self.a21, self.a22))

    def entries(self):
        return (self.a11, self.a12, self.a21, self.a22)

    def __add__(self, other: "Mat2") -> "Mat2":
        common_mode(self.a11, other.a11)
        return Mat2(self.a11 + other.a11, self.a12 + other.a12,
                    self.a21 + other.a21, self.a22 + other.a22)

    def __sub__(self, other: "Mat2") -> "Mat2":
        common_mode(self.a11, other.a11)
        return Mat2(self.a11 - other.a11, self.a12 - other.a12,
                    self.a21 - other.a21, self.a22 - other.a22)

    def __neg__(self) -> "Mat2":
        return Mat2(-self.a11, -self.a12, -self.a21, -self.a22)

    def scale(self, s: Scalar) -> "Mat2":
        common_mode(self.a11, s)
        return Mat2(s * self.a11, s * self.a12, s * self.a21, s * self.a22)

    def det(self) -> Scalar:
        return self.a11 * self.a22 - self.a12 * self.a21

    def frob_sq(self) -> Scalar:
        return (self.a11 * self.a11 + self.a12 * self.a12
                + self.a21 * self.a21 + self.a22 * self.a22)

    def frob(self) -> Scalar:
        return scalar_sqrt(self.frob_sq())

    def is_zero(self) -> bool:
        return self.frob_sq() == 0


def det(m: Mat2) -> Scalar:
    return m.det()


def inner(x: Mat2, y: Mat2) -> Scalar:
    """Frobenius inner product."""
    return (x.a11 * y.a11 + x.a12 * y.a12 + x.a21 * y.a21 + x.a22 * y.a22)


def det_cross(m: Mat2, n: Mat2) -> Scalar:
    """Bilinear polarization of det: det(M + tN) = det M + t*det_cross + t^2 det N."""
    return (m.a11 * n.a22 + n.a11 * m.a22 - m.a12 * n.a21 - n.a12 * m.a21)


def combine(a: Mat2, b: Mat2, t: Scalar) -> Mat2:
    """Convex combination (1-t)*a + t*b."""
    one = Fraction(1) if mode_of(t) == EXACT else 1.0
    return a.scale(one - t) + b.scale(t)


def rank_one_connected(x: Mat2, y: Mat2, tol: Scalar = DEFAULT_TOL) -> bool:
    """True iff rank(x - y) == 1 (det of the difference vanishes, x != y)."""
    if x == y:
        raise GeometryError("identical matrices have rank-0 difference")
    d = x - y
    if d.mode == EXACT:
        return d.det() == 0
    return abs(d.det()) <= tol * d.frob_sq()


def rank2x2(m: Mat2, tol: Scalar = DEFAULT_TOL) -> int:
    """Rank of a 2x2 matrix via the determinant; valid only in this dimension."""
    if m.is_zero():
        return 0
    if m.mode == EXACT:
        return 1 if m.det() == 0 else 2
    return 1 if abs(m.det()) <= tol * m.frob_sq() else 2


def crossing_parameter(a: Mat2, a_next: Mat2, b: Mat2) -> Scalar:
    """Parameter t in (0,1) at which det((1-t)a + t*b - a_next) crosses zero.

    Requires a sign change between det(a - a_next) and det(b - a_next).  The
    returned t is the exact root when a and b are rank-one connected (det is
    then linear along the segment), which is the only use made of it here.
    """
    d_a = (a - a_next).det()
    d_b = (b - a_next).det()
    if d_a == 0:
        raise GeometryError("degenerate pivot pair")
    if d_b == 0 or sign(d_a) == sign(d_b):
        raise GeometryError("no sign change")
    t = d_a / (d_a - d_b)
    if mode_of(t) == EXACT:
        residual = combine(a, b, t) - a_next
        if residual.det() != 0:
            raise GeometryError(
                "crossing parameter is not an exact root; "
                "segment endpoints are not rank-one connected")
    return t


# --- subspace embeddings -------------------------------------------------
#
# diagonal  (x, y)    <-> [[x, 0], [0, y]]        det = x*y
# triangular (x,y,z)  <-> [[x, z], [0, y]]        det = x*y
# symmetric (x,y,z)   <-> [[x, z], [z, y]]        det = x*y - z^2


@dataclass(frozen=True)
class DiagPt:
    x: Scalar
    y: Scalar

    def __post_init__(self):
        object.__setattr__(self, "x", _coerce(self.x))
        object.__setattr__(self, "y", _coerce(self.y))
        common_mode(self.x, self.y)

    def embed(self) -> Mat2:
        z = 0 if mode_of(self.x) == EXACT else 0.0
        return Mat2(self.x, z, z, self.y)


@dataclass(frozen=True)
class TriPt:
    x: Scalar
    y: Scalar
    z: Scalar

    def __post_init__(self):
        object.__setattr__(self, "x", _coerce(self.x))
        object.__setattr__(self, "y", _coerce(self.y))
        object.__setattr__(self, "z", _coerce(self.z))
        common_mode(self.x, self.y, self.z)

    def embed(self) -> Mat2:
        zero = 0 if mode_of(self.x) == EXACT else 0.0
        return Mat2(self.x, self.z, zero, self.y)


@dataclass(frozen=True)
class SymPt:
    x: Scalar
    y: Scalar
    z: Scalar

    def __post_init__(self):
        object.__setattr__(self, "x", _coerce(self.x))
        object.__setattr__(self, "y", _coerce(self.y))
        object.__setattr__(self, "z", _coerce(self.z))
        common_mode(self.x, self.y, self.z)

    def embed(self) -> Mat2:
        return Mat2(self.x, self.z, self.z, self.y)


class SubspaceError(GeometryError):
    """Matrix does not lie in the requested subspace."""


def project_diag(m: Mat2) -> DiagPt:
    if m.a12 != 0 or m.a21 != 0:
        raise SubspaceError("matrix is not diagonal")
    return DiagPt(m.a11, m.a22)


def project_tri(m: Mat2) -> TriPt:
    if m.a21 != 0:
        raise SubspaceError("matrix is not upper triangular")
    return TriPt(m.a11, m.a22, m.a12)


def project_sym(m: Mat2) -> SymPt:
    if m.a12 != m.a21:
        raise SubspaceError("matrix is not symmetric")
    return SymPt(m.a11, m.a22, m.a12)
