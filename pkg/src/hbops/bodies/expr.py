"""Symmetric convex bodies as a small expression algebra.

Leaves are polytopes (vertex or facet data) and p-balls; internal nodes
are l_inf / l_1 direct sums, positive scaling and intersections of
polytopal bodies.  Facet normals always use offset 1, i.e. a polytope in
H-form is {x : a.x <= 1 for every normal a}.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from ..exactnum import ONE, Rational, Vector, rank, rat, vec

INF = float("inf")


class BodyValidationError(ValueError):
    """A body violates symmetry, full dimension or a structural rule."""


def parse_p(p) -> Rational | float:
    if isinstance(p, str) and p.strip().lower() in ("inf", "infinity", "oo"):
        return INF
    if p == INF:
        return INF
    q = rat(p)
    if q < 1:
        raise BodyValidationError(f"p must be >= 1, got {p}")
    return q


def conjugate_p(p):
    if p == INF:
        return ONE
    if p == 1:
        return INF
    return p / (p - 1)


def _points(pts) -> tuple[Vector, ...]:
    return tuple(vec(v) for v in pts)


@dataclass(frozen=True)
class PolytopeV:
    vertices: tuple

    def __post_init__(self):
        object.__setattr__(self, "vertices", _points(self.vertices))

    @property
    def dim(self) -> int:
        return len(self.vertices[0]) if self.vertices else 0


@dataclass(frozen=True)
class PolytopeH:
    normals: tuple

    def __post_init__(self):
        object.__setattr__(self, "normals", _points(self.normals))

    @property
    def dim(self) -> int:
        return len(self.normals[0]) if self.normals else 0


@dataclass(frozen=True)
class PBall:
    n: int
    p: object

    def __post_init__(self):
        object.__setattr__(self, "p", parse_p(self.p))

    @property
    def dim(self) -> int:
        return self.n

    @property
    def smooth(self) -> bool:
        return self.p != 1 and self.p != INF


@dataclass(frozen=True)
class SumInf:
    parts: tuple

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))

    @property
    def dim(self) -> int:
        return sum(p.dim for p in self.parts)


@dataclass(frozen=True)
class SumOne:
    parts: tuple

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))

    @property
    def dim(self) -> int:
        return sum(p.dim for p in self.parts)


@dataclass(frozen=True)
class Scale:
    factor: Rational
    inner: object

    def __post_init__(self):
        object.__setattr__(self, "factor", rat(self.factor))

    @property
    def dim(self) -> int:
        return self.inner.dim


@dataclass(frozen=True)
class IntersectPoly:
    parts: tuple

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))

    @property
    def dim(self) -> int:
        return self.parts[0].dim if self.parts else 0


BodyExpr = Union[PolytopeV, PolytopeH, PBall, SumInf, SumOne, Scale, IntersectPoly]


def is_polytopal(b) -> bool:
    if isinstance(b, (PolytopeV, PolytopeH, IntersectPoly)):
        return True
    if isinstance(b, PBall):
        return not b.smooth
    if isinstance(b, Scale):
        return is_polytopal(b.inner)
    return all(is_polytopal(p) for p in b.parts)


def offsets(parts) -> list[int]:
    """Starting coordinate of each part inside a direct sum."""
    out, k = [], 0
    for p in parts:
        out.append(k)
        k += p.dim
    return out


def split(parts, v) -> list[Vector]:
    return [tuple(v[o:o + p.dim]) for p, o in zip(parts, offsets(parts))]


def _check_symmetric_full(points, what: str, n: int):
    if not points:
        raise BodyValidationError(f"{what}: empty point list")
    if any(len(v) != n for v in points):
        raise BodyValidationError(f"{what}: points of mixed dimension")
    s = set(points)
    if any(tuple(-a for a in v) not in s for v in points):
        raise BodyValidationError(f"{what}: not symmetric")
    if rank(list(points)) < n:
        raise BodyValidationError(f"{what}: not full-dimensional")


def validate(b) -> None:
    """Raise BodyValidationError describing the first violated invariant."""
    if isinstance(b, PolytopeV):
        _check_symmetric_full(b.vertices, "polytopeV", b.dim)
    elif isinstance(b, PolytopeH):
        # symmetric normals spanning R^n give a bounded body with 0 inside
        _check_symmetric_full(b.normals, "polytopeH", b.dim)
    elif isinstance(b, PBall):
        if b.n < 1:
            raise BodyValidationError("pball: dim must be positive")
    elif isinstance(b, Scale):
        if b.factor <= 0:
            raise BodyValidationError("scale: factor must be positive")
        validate(b.inner)
    elif isinstance(b, (SumInf, SumOne)):
        if not b.parts:
            raise BodyValidationError("sum: no parts")
        for p in b.parts:
            validate(p)
    elif isinstance(b, IntersectPoly):
        if not b.parts:
            raise BodyValidationError("intersect: no parts")
        for p in b.parts:
            if not is_polytopal(p):
                raise BodyValidationError("intersect: parts must be polytopal")
            validate(p)
        if len({p.dim for p in b.parts}) != 1:
            raise BodyValidationError("intersect: parts of different dimension")
    else:
        raise BodyValidationError(f"unknown body type {type(b).__name__}")


def polar_expr(b):
    """Expression for the unit ball of the dual norm."""
    if isinstance(b, PolytopeV):
        return PolytopeH(b.vertices)
    if isinstance(b, PolytopeH):
        return PolytopeV(b.normals)
    if isinstance(b, PBall):
        return PBall(b.n, conjugate_p(b.p))
    if isinstance(b, SumInf):
        return SumOne(tuple(polar_expr(p) for p in b.parts))
    if isinstance(b, SumOne):
        return SumInf(tuple(polar_expr(p) for p in b.parts))
    if isinstance(b, Scale):
        return Scale(ONE / b.factor, polar_expr(b.inner))
    if isinstance(b, IntersectPoly):
        # polar of an intersection is the hull of the polars' union
        from .dd import materialize_expr

        normals = []
        for p in b.parts:
            normals.extend(materialize_expr(p)[1])
        return PolytopeV(tuple(sorted(set(normals))))
    raise TypeError(type(b).__name__)
