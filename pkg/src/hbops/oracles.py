"""Brute-force oracles for the test suite.

Nothing here is called from the library.  The code deliberately shares no
arithmetic with the fast paths: it works with ``fractions.Fraction``, has
its own Gaussian elimination, finds facets and vertices by exhaustive
subset search, and evaluates norms with numpy.
"""

from __future__ import annotations

import itertools
import json
import math
import os
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .bodies.expr import INF, IntersectPoly, PBall, PolytopeH, PolytopeV, Scale, SumInf, SumOne

MAX_ORACLE_VARS = 12
MAX_SUBSETS = 300_000
MAX_CERT_ATOMS = 16


def _fr(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(str(x))


def _fvec(v) -> tuple:
    return tuple(_fr(a) for a in v)


def _dot(a, b):
    return sum((x * y for x, y in zip(a, b)), Fraction(0))


def _eliminate(rows, rhs=None):
    """Row-reduce [rows | rhs] in place over Fraction; returns (rank, rows, rhs)."""
    rows = [list(r) for r in rows]
    rhs = list(rhs) if rhs is not None else [Fraction(0)] * len(rows)
    ncols = len(rows[0]) if rows else 0
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        rhs[r], rhs[piv] = rhs[piv], rhs[r]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        rhs[r] *= inv
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
                rhs[i] -= f * rhs[r]
        r += 1
    return r, rows, rhs


def brute_rank(rows) -> int:
    rows = [_fvec(r) for r in rows]
    return _eliminate(rows)[0] if rows else 0


def _unique_solution(rows, rhs):
    n = len(rows[0])
    rk, red, b = _eliminate(rows, rhs)
    if rk < n or any(x != 0 for x in b[rk:]):
        return None
    return tuple(b[:n])


def brute_affine_dim(points) -> int:
    pts = [_fvec(p) for p in points]
    if not pts:
        return -1
    return brute_rank([tuple(a - b for a, b in zip(p, pts[0])) for p in pts[1:]]) if len(pts) > 1 else 0


def _hyperplanes(points, keep):
    """Normals a with a.p = 1 through n of the points, filtered by ``keep``."""
    n = len(points[0])
    out = set()
    for sub in itertools.combinations(points, n):
        a = _unique_solution(sub, [Fraction(1)] * n)
        if a is not None and a not in out and keep(a):
            out.add(a)
    return sorted(out)


def facets_of(vertices) -> list:
    V = [_fvec(v) for v in vertices]
    return _hyperplanes(V, lambda a: all(_dot(a, v) <= 1 for v in V))


def vertices_of(normals) -> list:
    H = [_fvec(a) for a in normals]
    return _hyperplanes(H, lambda x: all(_dot(a, x) <= 1 for a in H))


def _embed(v, off, n):
    out = [Fraction(0)] * n
    out[off:off + len(v)] = v
    return tuple(out)


@lru_cache(maxsize=None)
def brute_vh(b) -> tuple:
    """(vertices, facet normals) of a polytopal body, Fraction coordinates."""
    if isinstance(b, PBall):
        n = b.n
        signs = [tuple(Fraction(s) for s in t) for t in itertools.product((1, -1), repeat=n)]
        cross = [tuple(Fraction(s) if j == i else Fraction(0) for j in range(n))
                 for i in range(n) for s in (1, -1)]
        if b.p == 1:
            return sorted(cross), sorted(signs)
        if b.p == INF:
            return sorted(signs), sorted(cross)
        raise ValueError("smooth p-ball has no vertex representation")
    if isinstance(b, PolytopeV):
        H = facets_of(b.vertices)
        return vertices_of(H), H
    if isinstance(b, PolytopeH):
        V = vertices_of(b.normals)
        return V, facets_of(V)
    if isinstance(b, IntersectPoly):
        H = [a for p in b.parts for a in brute_vh(p)[1]]
        V = vertices_of(H)
        return V, facets_of(V)
    if isinstance(b, Scale):
        c = _fr(b.factor)
        V, H = brute_vh(b.inner)
        return sorted(tuple(c * x for x in v) for v in V), sorted(tuple(x / c for x in a) for a in H)
    if isinstance(b, (SumInf, SumOne)):
        n = b.dim
        offs = list(itertools.accumulate([0] + [p.dim for p in b.parts]))[:-1]
        parts = [brute_vh(p) for p in b.parts]
        prod_idx, union_idx = (0, 1) if isinstance(b, SumInf) else (1, 0)
        prod = [sum(t, ()) for t in itertools.product(*[vh[prod_idx] for vh in parts])]
        union = [_embed(x, o, n) for vh, o in zip(parts, offs) for x in vh[union_idx]]
        out = [None, None]
        out[prod_idx], out[union_idx] = sorted(prod), sorted(union)
        return tuple(out)
    raise TypeError(type(b).__name__)


def brute_f(S) -> int:
    """Largest affine dimension of a facet of a polytopal ball."""
    V, H = brute_vh(S.body)
    return max(brute_affine_dim([v for v in V if _dot(a, v) == 1]) for a in H)


# -- norms -------------------------------------------------------------------

def gauge_np(b, X: np.ndarray) -> np.ndarray:
    """Gauge of each row of X (float)."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if isinstance(b, PBall):
        if b.p == INF:
            return np.abs(X).max(axis=1)
        p = float(b.p)
        return np.linalg.norm(X, ord=p, axis=1) if p in (1.0, 2.0) else (np.abs(X) ** p).sum(axis=1) ** (1 / p)
    if isinstance(b, Scale):
        return gauge_np(b.inner, X) / float(b.factor)
    if isinstance(b, (SumInf, SumOne)):
        offs = list(itertools.accumulate([0] + [p.dim for p in b.parts]))
        vals = np.stack([gauge_np(p, X[:, offs[i]:offs[i + 1]]) for i, p in enumerate(b.parts)])
        return vals.max(axis=0) if isinstance(b, SumInf) else vals.sum(axis=0)
    H = np.array([[float(x) for x in a] for a in brute_vh(b)[1]])
    return (X @ H.T).max(axis=1)


def _isqrt_fraction(q: Fraction):
    if q < 0:
        return None
    rn, rd = math.isqrt(q.numerator), math.isqrt(q.denominator)
    if rn * rn == q.numerator and rd * rd == q.denominator:
        return Fraction(rn, rd)
    return None


def gauge_exact(b, v):
    """Gauge as a Fraction when rational, float otherwise."""
    v = _fvec(v)
    if isinstance(b, PBall):
        if b.p == 1:
            return sum((abs(x) for x in v), Fraction(0))
        if b.p == INF:
            return max(abs(x) for x in v)
        nz = [x for x in v if x]
        if len(nz) <= 1:
            return abs(nz[0]) if nz else Fraction(0)
        if b.p == 2:
            r = _isqrt_fraction(sum((x * x for x in nz), Fraction(0)))
            if r is not None:
                return r
        return float(gauge_np(b, np.array([[float(x) for x in v]]))[0])
    if isinstance(b, Scale):
        g = gauge_exact(b.inner, v)
        return g / _fr(b.factor) if isinstance(g, Fraction) else g / float(b.factor)
    if isinstance(b, (SumInf, SumOne)):
        offs = list(itertools.accumulate([0] + [p.dim for p in b.parts]))
        vals = [gauge_exact(p, v[offs[i]:offs[i + 1]]) for i, p in enumerate(b.parts)]
        if all(isinstance(x, Fraction) for x in vals):
            return max(vals) if isinstance(b, SumInf) else sum(vals, Fraction(0))
        fl = [float(x) for x in vals]
        return max(fl) if isinstance(b, SumInf) else math.fsum(fl)
    return max(_dot(a, v) for a in brute_vh(b)[1])


def _seed(seed):
    return int(os.environ.get("HBOPS_SEED", 0)) if seed is None else seed


def brute_op_norm(T, samples: int = 100_000, seed: int | None = None, polish: int = 16) -> float:
    """Largest ratio ||Tx|| / ||x|| found by random sampling plus hill climbing.

    Every reported value is an attained ratio, so the result never exceeds
    the true norm.
    """
    rng = np.random.default_rng(_seed(seed))
    M = np.array([[float(x) for x in row] for row in T.matrix])
    X_body, Y_body = T.domain.body, T.codomain.body
    n = T.domain.dim

    def ratios(P):
        den = gauge_np(X_body, P)
        return gauge_np(Y_body, P @ M.T) / den

    best_pts, best_vals = [], []
    for start in range(0, samples, 20_000):
        P = rng.standard_normal((min(20_000, samples - start), n))
        r = ratios(P)
        idx = np.argsort(-r)[:polish]
        best_pts.extend(P[idx])
        best_vals.extend(r[idx])
    order = np.argsort(-np.array(best_vals))[:polish]
    best = float(max(best_vals))
    for i in order:
        x, v = best_pts[i] / np.linalg.norm(best_pts[i]), best_vals[i]
        step = 0.05
        while step > 1e-10:
            cand = x + step * rng.standard_normal((64, n))
            r = ratios(cand)
            j = int(np.argmax(r))
            if r[j] > v:
                x, v = cand[j] / np.linalg.norm(cand[j]), float(r[j])
            else:
                step *= 0.6
        best = max(best, v)
    return float(best)


def brute_certificate_norm(c):
    """max over all sign patterns of the Y-norm of sum sigma_a vector_a."""
    atoms = c.atoms
    if len(atoms) > MAX_CERT_ATOMS:
        raise ValueError(f"{len(atoms)} atoms exceed the oracle limit of {MAX_CERT_ATOMS}")
    Yb = c.operator.codomain.body
    vecs = [_fvec(v) for _, v in atoms]
    best = None
    for sigma in itertools.product((1, -1), repeat=len(vecs)):
        s = [sum((sg * v[i] for sg, v in zip(sigma, vecs)), Fraction(0)) for i in range(len(vecs[0]))]
        g = gauge_exact(Yb, s)
        if best is None or g > best:
            best = g
    return best


def enumerate_basic_points(P) -> list:
    """All basic feasible points of an LP by trying every active set."""
    n = P.nvars
    if n > MAX_ORACLE_VARS:
        raise ValueError(f"{n} variables exceed the oracle limit of {MAX_ORACLE_VARS}")
    ineq = [(_fvec(a), _fr(b)) for a, b in zip(P.A_ub, P.b_ub)]
    for i in sorted(P.nonneg):
        ineq.append((tuple(Fraction(-1) if j == i else Fraction(0) for j in range(n)), Fraction(0)))
    eq = [(_fvec(a), _fr(b)) for a, b in zip(P.A_eq, P.b_eq)]
    r_eq = brute_rank([a for a, _ in eq]) if eq else 0
    need = n - r_eq
    if math.comb(len(ineq), need) > MAX_SUBSETS:
        raise ValueError("too many active sets to enumerate")
    points = set()
    for sub in itertools.combinations(ineq, need):
        rows = [a for a, _ in eq] + [a for a, _ in sub]
        rhs = [b for _, b in eq] + [b for _, b in sub]
        if not rows:
            continue
        x = _unique_solution(rows, rhs)
        if x is None:
            continue
        if all(_dot(a, x) <= b for a, b in ineq) and all(_dot(a, x) == b for a, b in eq):
            points.add(x)
    return sorted(points)


@dataclass(frozen=True)
class OracleReport:
    quantity: str
    fast: object
    oracle: object
    agree: bool
    instance: str

    def to_json_line(self) -> str:
        return json.dumps({
            "quantity": self.quantity,
            "fast": str(self.fast),
            "oracle": str(self.oracle),
            "agree": self.agree,
            "instance": self.instance,
        })


def compare(quantity: str, fast, oracle, instance: str, tol: float | None = None) -> OracleReport:
    """Exact comparison, or absolute tolerance when either side is a float."""
    exact_types = (int, Fraction)
    fast_exact = isinstance(fast, exact_types) or type(fast).__name__ == "mpq"
    if tol is None and fast_exact and isinstance(oracle, exact_types):
        agree = _fr(fast) == _fr(oracle)
    else:
        agree = abs(float(fast) - float(oracle)) <= (tol if tol is not None else 0.0)
    return OracleReport(quantity, fast, oracle, bool(agree), instance)
