"""Validated space handles and the gauge (norm) of a body."""

from __future__ import annotations

import math
from functools import cached_property
from typing import Sequence

from ..exactnum import Rational, sqrt_exact, vec
from .dd import NotPolytopalError, materialize_expr
from .expr import (
    INF,
    IntersectPoly,
    PBall,
    PolytopeH,
    PolytopeV,
    Scale,
    SumInf,
    SumOne,
    is_polytopal,
    polar_expr,
    split,
    validate,
)

# tolerance for norm values that are only known as floats
FLOAT_TOL = 1e-12


def is_exact(x) -> bool:
    return isinstance(x, Rational)


def real_sum(values):
    values = list(values)
    if all(is_exact(v) for v in values):
        return sum(values, Rational(0))
    return math.fsum(float(v) for v in values)


def real_max(values):
    best = None
    for v in values:
        if best is None or v > best:
            best = v
    return best


def real_div(a, c):
    if is_exact(a) and is_exact(c):
        return a / c
    return float(a) / float(c)


def close(a, b, tol: float = FLOAT_TOL) -> bool:
    """Exact equality for rationals, absolute tolerance otherwise."""
    if is_exact(a) and is_exact(b):
        return a == b
    return abs(float(a) - float(b)) <= tol


def _pnorm(p, v):
    nz = [abs(a) for a in v if a]
    if not nz:
        return Rational(0)
    if len(nz) == 1:
        return nz[0]
    if p == 1:
        return sum(nz, Rational(0))
    if p == INF:
        return max(nz)
    if p == 2:
        sq = sum((a * a for a in nz), Rational(0))
        r = sqrt_exact(sq)
        return r if r is not None else math.sqrt(float(sq))
    pf = float(p)
    m = float(max(nz))
    return m * math.fsum((float(a) / m) ** pf for a in nz) ** (1.0 / pf)


def norm_expr(b, v):
    """Gauge of v for the body b: exact rational when possible, else float."""
    if isinstance(b, PBall):
        return _pnorm(b.p, v)
    if isinstance(b, PolytopeH):
        return max(sum((x * y for x, y in zip(a, v) if x and y), Rational(0)) for a in b.normals)
    if isinstance(b, (PolytopeV, IntersectPoly)):
        return norm_expr(PolytopeH(materialize_expr(b)[1]), v)
    if isinstance(b, Scale):
        return real_div(norm_expr(b.inner, v), b.factor)
    if isinstance(b, SumInf):
        return real_max(norm_expr(p, x) for p, x in zip(b.parts, split(b.parts, v)))
    if isinstance(b, SumOne):
        return real_sum(norm_expr(p, x) for p, x in zip(b.parts, split(b.parts, v)))
    raise TypeError(type(b).__name__)


class SpaceHandle:
    """A finite-dimensional normed space given by its unit ball.

    Construction validates the body; the polar and the materialized
    polytope are computed lazily and cached.
    """

    def __init__(self, body, *, _validated: bool = False):
        if not _validated:
            validate(body)
        self.body = body

    def __repr__(self):
        return f"SpaceHandle({self.body!r})"

    def __eq__(self, other):
        return isinstance(other, SpaceHandle) and self.body == other.body

    def __hash__(self):
        return hash(self.body)

    @property
    def dim(self) -> int:
        return self.body.dim

    @cached_property
    def is_polytopal(self) -> bool:
        return is_polytopal(self.body)

    @cached_property
    def polar(self) -> "SpaceHandle":
        p = SpaceHandle(polar_expr(self.body), _validated=True)
        p.__dict__["polar"] = self
        return p

    @cached_property
    def materialized(self):
        if not self.is_polytopal:
            raise NotPolytopalError("space has a smooth leaf; no finite V/H representation")
        return materialize_expr(self.body)

    @property
    def vertices(self):
        return self.materialized[0]

    @property
    def normals(self):
        return self.materialized[1]

    def norm(self, v: Sequence):
        return norm(self, v)


def norm(S: SpaceHandle, v: Sequence):
    v = vec(v)
    if len(v) != S.dim:
        raise ValueError(f"dimension mismatch: vector of length {len(v)} in a {S.dim}-dim space")
    if S.is_polytopal:
        return max(sum((x * y for x, y in zip(a, v) if x and y), Rational(0)) for a in S.normals)
    return norm_expr(S.body, v)


def polar(S: SpaceHandle) -> SpaceHandle:
    return S.polar


def materialize(S: SpaceHandle):
    """Canonical (vertices, facet normals) of a polytopal space."""
    return S.materialized


def is_unit(S: SpaceHandle, v, tol: float = FLOAT_TOL) -> bool:
    return close(norm(S, v), 1, tol)
