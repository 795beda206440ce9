"""Vertex/facet conversion by the double description method.

``materialize_expr`` returns canonical (vertices, normals) for any
polytopal expression: sorted, deduplicated and irredundant, with every
facet written as a.x <= 1.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

import gmpy2
from gmpy2 import mpq, mpz

from ..exactnum import ONE, ZERO, dot, inverse, rank, smul, unit
from ..lp import affine_dim
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
)


class NotPolytopalError(ValueError):
    pass


def _primitive(v):
    """Positive multiple of v with coprime integer entries (as rationals)."""
    den = mpz(1)
    for a in v:
        den = gmpy2.lcm(den, a.denominator)
    ints = [mpz(a * den) for a in v]
    g = mpz(0)
    for a in ints:
        g = gmpy2.gcd(g, a)
    return tuple(mpq(a // g) for a in ints)


def extreme_rays(g_rows):
    """Extreme rays of the pointed cone {y : g.y >= 0 for all rows g}."""
    g_rows = [tuple(r) for r in g_rows]
    d = len(g_rows[0])
    order, basis = [], []
    for i, g in enumerate(g_rows):
        if rank(basis + [g]) > len(basis):
            basis.append(g)
            order.append(i)
        if len(basis) == d:
            break
    if len(basis) < d:
        raise ValueError("cone is not pointed")
    inv = inverse(tuple(basis))
    rays = [_primitive(tuple(inv[r][c] for r in range(d))) for c in range(d)]
    # zero sets as bitmasks over processed rows
    zeros = []
    for ray in rays:
        z = 0
        for bit, i in enumerate(order):
            if dot(g_rows[i], ray) == 0:
                z |= 1 << i
        zeros.append(z)
    rest = [i for i in range(len(g_rows)) if i not in set(order)]
    for i in rest:
        g = g_rows[i]
        vals = [dot(g, r) for r in rays]
        pos = [k for k, v in enumerate(vals) if v > 0]
        neg = [k for k, v in enumerate(vals) if v < 0]
        zer = [k for k, v in enumerate(vals) if v == 0]
        new_rays = [rays[k] for k in pos + zer]
        new_zeros = [zeros[k] for k in pos] + [zeros[k] | (1 << i) for k in zer]
        for a in pos:
            for b in neg:
                common = zeros[a] & zeros[b]
                if bin(common).count("1") < d - 2:
                    continue
                # combinatorial adjacency: no third ray's zero set contains common
                if any(
                    k != a and k != b and (zeros[k] & common) == common
                    for k in range(len(rays))
                ):
                    continue
                ray = tuple(vals[a] * y - vals[b] * x for x, y in zip(rays[a], rays[b]))
                new_rays.append(_primitive(ray))
                new_zeros.append(common | (1 << i))
        rays, zeros = new_rays, new_zeros
    return rays


def vertices_from_normals(normals):
    """Vertices of the bounded polytope {x : a.x <= 1 for a in normals}."""
    n = len(normals[0])
    # homogenize with t >= 0:  t - a.x >= 0
    rows = [tuple([ZERO] * n + [ONE])]
    rows += [tuple([-a for a in nv] + [ONE]) for nv in normals]
    verts = set()
    for ray in extreme_rays(rows):
        t = ray[-1]
        if t <= 0:
            raise ValueError("polytope is unbounded")
        verts.add(tuple(a / t for a in ray[:-1]))
    return sorted(verts)


def _prune_vertices(verts, normals):
    n = len(verts[0])
    keep = []
    for v in verts:
        tight = [a for a in normals if dot(a, v) == 1]
        if len(tight) >= n and rank(tight) == n:
            keep.append(v)
    return keep


def _prune_normals(verts, normals):
    n = len(verts[0])
    keep = []
    for a in normals:
        tight = [v for v in verts if dot(a, v) == 1]
        if len(tight) >= n and affine_dim(tight) == n - 1:
            keep.append(a)
    return keep


def _canon(pts):
    return tuple(sorted(set(pts)))


def _embed(v, offset, total):
    out = [ZERO] * total
    out[offset:offset + len(v)] = v
    return tuple(out)


@lru_cache(maxsize=None)
def materialize_expr(b):
    """Canonical (vertices, normals) pair of a polytopal body."""
    if not is_polytopal(b):
        raise NotPolytopalError("body has a smooth leaf")
    if isinstance(b, PolytopeH):
        normals = _canon(b.normals)
        verts = vertices_from_normals(normals)
        return _canon(verts), _canon(_prune_normals(verts, normals))
    if isinstance(b, PolytopeV):
        pts = _canon(b.vertices)
        normals = vertices_from_normals(pts)
        return _canon(_prune_vertices(pts, normals)), _canon(normals)
    if isinstance(b, PBall):
        n = b.n
        cross = [smul(s, unit(n, i)) for i in range(n) for s in (1, -1)]
        cube = [tuple(mpq(s) for s in signs) for signs in itertools.product((1, -1), repeat=n)]
        if b.p == 1:
            return _canon(cross), _canon(cube)
        assert b.p == INF
        return _canon(cube), _canon(cross)
    if isinstance(b, Scale):
        v, h = materialize_expr(b.inner)
        c = b.factor
        return _canon(smul(c, x) for x in v), _canon(smul(ONE / c, a) for a in h)
    if isinstance(b, (SumInf, SumOne)):
        mats = [materialize_expr(p) for p in b.parts]
        total = b.dim
        offs, k = [], 0
        for p in b.parts:
            offs.append(k)
            k += p.dim
        # one side is a union of embedded sets, the other a product
        unions = []
        for (v, h), o in zip(mats, offs):
            src = v if isinstance(b, SumOne) else h
            unions.extend(_embed(x, o, total) for x in src)
        prods = [
            tuple(itertools.chain.from_iterable(combo))
            for combo in itertools.product(*[(m[1] if isinstance(b, SumOne) else m[0]) for m in mats])
        ]
        if isinstance(b, SumOne):
            return _canon(unions), _canon(prods)
        return _canon(prods), _canon(unions)
    if isinstance(b, IntersectPoly):
        normals = []
        for p in b.parts:
            normals.extend(materialize_expr(p)[1])
        normals = _canon(normals)
        verts = vertices_from_normals(normals)
        return _canon(verts), _canon(_prune_normals(verts, normals))
    raise TypeError(type(b).__name__)
