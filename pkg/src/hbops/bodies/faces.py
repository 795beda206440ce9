"""Exposed faces, support-set dimensions and witnessed cube configurations.

For a space S:

* ``compute_f`` gives the largest dimension of a support set of B(S),
  together with a witness: a point of that support set and directions d_i
  such that every point  theta*center + sum a_i d_i  (theta = +-1,
  |a_i| <= 1) lies on the unit sphere.
* ``compute_d`` gives the dimension of the set of norming functionals of a
  unit vector, i.e. of the face of the polar ball it exposes.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

from gmpy2 import mpq

from ..exactnum import (
    ONE,
    ZERO,
    Vector,
    centroid,
    dot,
    independent_subset,
    is_zero,
    rank,
    smul,
    sub,
    unit,
    vec,
)
from ..lp import affine_dim, max_cube_scale
from .dd import materialize_expr
from .expr import (
    PBall,
    Scale,
    SumInf,
    SumOne,
    is_polytopal,
    polar_expr,
    split,
)
from .space import FLOAT_TOL, SpaceHandle, close, is_exact, norm, norm_expr, real_div

MAX_CUBE_DIRS = 10


class WitnessError(RuntimeError):
    """A constructed witness failed its own verification (a bug)."""


@dataclass(frozen=True)
class FaceDescriptor:
    functional: Vector
    dimension: int
    affine_basis: tuple = ()
    vertices: tuple = ()
    # facet normals of the carrier body (polytopal case only)
    normals: tuple | None = field(default=None, repr=False)


@dataclass(frozen=True)
class WitnessedSupportSet:
    face: FaceDescriptor
    center: Vector
    directions: tuple

    @property
    def dimension(self) -> int:
        return len(self.directions)

    def corners(self):
        m = len(self.directions)
        for signs in itertools.product((1, -1), repeat=m + 1):
            p = list(smul(signs[0], self.center))
            for s, d in zip(signs[1:], self.directions):
                for i, a in enumerate(d):
                    if a:
                        p[i] += s * a
            yield tuple(p)

    def check(self, S: SpaceHandle) -> list[str]:
        """Return the list of violated invariants (empty when valid)."""
        problems = []
        h = self.face.functional
        if len(self.directions) > MAX_CUBE_DIRS:
            problems.append("too many cube directions")
            return problems
        if not close(norm(S.polar, h), 1):
            problems.append("exposing functional does not have dual norm 1")
        if rank([self.center] + list(self.directions)) != len(self.directions) + 1:
            problems.append("center and directions are linearly dependent")
        for d in self.directions:
            for p in (tuple(c + a for c, a in zip(self.center, d)), tuple(c - a for c, a in zip(self.center, d))):
                if dot(h, p) != 1 or not close(norm(S, p), 1):
                    problems.append("center +- direction leaves the face")
        for p in self.corners():
            if not close(norm(S, p), 1):
                problems.append(f"cube corner {[str(a) for a in p]} not on the unit sphere")
                break
        return problems


def _dotr(a, y):
    if all(is_exact(t) for t in y):
        return dot(a, y)
    return sum(float(s) * float(t) for s, t in zip(a, y))


def _support(b, h):
    """max of h over B(b), i.e. the dual norm of h."""
    return norm_expr(polar_expr(b), h)


def _face_dim(b, h) -> int:
    if is_polytopal(b):
        verts = materialize_expr(b)[0]
        vals = [_dotr(h, v) for v in verts]
        top = max(vals)
        return affine_dim([v for v, x in zip(verts, vals) if close(x, top)])
    if isinstance(b, PBall):
        return 0
    if isinstance(b, Scale):
        return _face_dim(b.inner, h)
    hs = split(b.parts, h)
    if isinstance(b, SumInf):
        return sum(p.dim if is_zero(x) else _face_dim(p, x) for p, x in zip(b.parts, hs))
    if isinstance(b, SumOne):
        sup = [_support(p, x) for p, x in zip(b.parts, hs)]
        top = max(sup)
        active = [i for i, s in enumerate(sup) if close(s, top)]
        return sum(_face_dim(b.parts[i], hs[i]) + 1 for i in active) - 1
    raise TypeError(type(b).__name__)


def exposed_face(S: SpaceHandle, h: Sequence) -> FaceDescriptor:
    """The support set {x in B(S) : h(x) = max_B h}."""
    h = vec(h)
    if len(h) != S.dim:
        raise ValueError("functional has wrong dimension")
    if is_zero(h):
        raise ValueError("exposing functional must be nonzero")
    if S.is_polytopal:
        verts, normals = S.materialized
        vals = [dot(h, v) for v in verts]
        top = max(vals)
        face = [v for v, x in zip(verts, vals) if x == top]
        diffs = [sub(v, face[0]) for v in face[1:]]
        basis = tuple(diffs[i] for i in independent_subset(diffs))
        return FaceDescriptor(
            functional=smul(ONE / top, h),
            dimension=len(basis),
            affine_basis=basis,
            vertices=tuple(face),
            normals=normals,
        )
    sup = norm(S.polar, h)
    fn = smul(ONE / sup, h) if is_exact(sup) else h
    return FaceDescriptor(functional=fn, dimension=_face_dim(S.body, h))


def compute_d(S: SpaceHandle, x: Sequence, tol: float = FLOAT_TOL) -> int:
    """Dimension of {x* in S(X*) : x*(x) = 1} for a unit vector x."""
    x = vec(x)
    if not close(norm(S, x), 1, tol):
        raise ValueError("point is not on the unit sphere")
    return exposed_face(S.polar, x).dimension


def _embed(v, offset: int, total: int) -> Vector:
    out = [ZERO] * total
    out[offset:offset + len(v)] = v
    return tuple(out)


def _upper(x):
    if is_exact(x):
        return x
    return mpq(float(x)) * mpq(1 + 2**-30)


@lru_cache(maxsize=None)
def _witness(b):
    """(exposing functional, center, directions) of a largest support set."""
    if isinstance(b, PBall) and b.smooth:
        e = unit(b.n, 0)
        return e, e, ()
    if isinstance(b, Scale):
        h, c, ds = _witness(b.inner)
        k = b.factor
        return smul(ONE / k, h), smul(k, c), tuple(smul(k, d) for d in ds)
    if isinstance(b, (SumOne, SumInf)):
        acc_body, acc = b.parts[0], _witness(b.parts[0])
        for part in b.parts[1:]:
            nxt = _witness(part)
            if isinstance(b, SumOne):
                acc = _join_one(acc_body.dim, acc, part.dim, nxt)
                acc_body = SumOne((acc_body, part))
            else:
                acc = _join_inf(acc_body, acc, part, nxt)
                acc_body = SumInf((acc_body, part))
        return acc
    # polytopal leaf: first facet, centroid, scaled affine basis
    verts, normals = materialize_expr(b)
    a = normals[0]
    face = [v for v in verts if dot(a, v) == 1]
    c = centroid(face)
    diffs = [sub(v, face[0]) for v in face[1:]]
    dirs = [diffs[i] for i in independent_subset(diffs)][:MAX_CUBE_DIRS]
    fd = FaceDescriptor(functional=a, dimension=len(dirs), vertices=tuple(face), normals=normals)
    s = max_cube_scale(fd, c, dirs) if dirs else ONE
    return a, c, tuple(smul(s, d) for d in dirs)


def _join_one(na, wa, nb, wb):
    """Witness for A (+)_1 B: the join of the two faces, with one extra direction."""
    (ha, ca, da), (hb, cb, db) = wa, wb
    n = na + nb
    q, h = mpq(1, 4), ha + hb
    center = smul(mpq(1, 2), ca + cb)
    dirs = [smul(q, ca + tuple(-x for x in cb))]
    dirs += [smul(q, _embed(d, 0, n)) for d in da]
    dirs += [smul(q, _embed(d, na, n)) for d in db]
    return h, center, tuple(dirs)


def _box_scale(body):
    """Rational s with s*[-1,1]^n inside B(body), via the triangle inequality."""
    total = sum((_upper(norm_expr(body, unit(body.dim, i))) for i in range(body.dim)), ZERO)
    return ONE / total


def _join_inf(a, wa, b, wb):
    """Witness for A (+)_inf B: a whole ball times a largest face of the other."""
    (ha, ca, da), (hb, cb, db) = wa, wb
    na, nb = a.dim, b.dim
    n = na + nb
    if na + len(db) >= nb + len(da):
        s = _box_scale(a)
        h = _embed(hb, na, n)
        center = _embed(cb, na, n)
        dirs = [smul(s, unit(n, i)) for i in range(na)] + [_embed(d, na, n) for d in db]
    else:
        s = _box_scale(b)
        h = _embed(ha, 0, n)
        center = _embed(ca, 0, n)
        dirs = [_embed(d, 0, n) for d in da] + [smul(s, unit(n, na + i)) for i in range(nb)]
    return h, center, tuple(dirs)


def compute_f(S: SpaceHandle) -> tuple[int, WitnessedSupportSet]:
    """Maximal support-set dimension of B(S) with a verified cube witness."""
    h, c, dirs = _witness(S.body)
    face = exposed_face(S, h)
    if face.dimension != len(dirs):
        raise WitnessError(f"witness face has dimension {face.dimension}, expected {len(dirs)}")
    w = WitnessedSupportSet(face=face, center=c, directions=dirs)
    problems = w.check(S) if len(dirs) <= MAX_CUBE_DIRS else []
    if problems:
        raise WitnessError("; ".join(problems))
    return len(dirs), w


def f_value(S: SpaceHandle) -> int:
    return len(_witness(S.body)[2])


def _msd(b, y) -> int:
    if is_polytopal(b):
        normals = materialize_expr(b)[1]
        if not any(close(_dotr(a, y), 1) for a in normals):
            raise ValueError("point is not on the unit sphere")
        return b.dim - 1
    if isinstance(b, PBall):
        return 0
    if isinstance(b, Scale):
        return _msd(b.inner, tuple(real_div(t, b.factor) for t in y))
    ys = split(b.parts, y)
    if isinstance(b, SumInf):
        norms = [norm_expr(p, x) for p, x in zip(b.parts, ys)]
        best = None
        for i, (p, x, r) in enumerate(zip(b.parts, ys, norms)):
            if close(r, 1):
                val = _msd(p, x) + b.dim - p.dim
                best = val if best is None else max(best, val)
        if best is None:
            raise ValueError("point is not on the unit sphere")
        return best
    total = -1
    for p, x in zip(b.parts, ys):
        if all(t == 0 for t in x):
            total += len(_witness(p)[2]) + 1
        else:
            r = norm_expr(p, x)
            total += _msd(p, tuple(real_div(t, r) for t in x)) + 1
    return total


def max_support_dim(S: SpaceHandle, y: Sequence) -> int:
    """Largest dimension of a support set of B(S) that contains the unit vector y."""
    y = vec(y)
    if not close(norm(S, y), 1):
        raise ValueError("point is not on the unit sphere")
    return _msd(S.body, y)
