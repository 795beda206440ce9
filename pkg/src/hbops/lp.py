"""Exact dense simplex over the rationals, plus small geometric helpers.

Problems are ``minimize c.x  s.t.  A_ub x <= b_ub,  A_eq x = b_eq`` with
free variables unless listed in ``nonneg``.  Pivoting follows Bland's rule,
so the solver terminates on degenerate problems.  Every optimal result
carries dual multipliers that are checked exactly before returning.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

from .exactnum import ONE, ZERO, Rational, Vector, dot, rank, sub, vec

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


class LPError(RuntimeError):
    pass


@dataclass(frozen=True)
class LPProblem:
    c: Vector
    A_ub: tuple = ()
    b_ub: Vector = ()
    A_eq: tuple = ()
    b_eq: Vector = ()
    nonneg: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "c", vec(self.c))
        object.__setattr__(self, "A_ub", tuple(vec(r) for r in self.A_ub))
        object.__setattr__(self, "b_ub", vec(self.b_ub))
        object.__setattr__(self, "A_eq", tuple(vec(r) for r in self.A_eq))
        object.__setattr__(self, "b_eq", vec(self.b_eq))
        object.__setattr__(self, "nonneg", frozenset(self.nonneg))
        n = len(self.c)
        if len(self.A_ub) != len(self.b_ub) or len(self.A_eq) != len(self.b_eq):
            raise ValueError("row count and right-hand side length differ")
        if any(len(r) != n for r in self.A_ub + self.A_eq):
            raise ValueError("constraint row length differs from variable count")
        if any(not 0 <= j < n for j in self.nonneg):
            raise ValueError("nonneg index out of range")

    @property
    def nvars(self) -> int:
        return len(self.c)

    def is_feasible(self, x: Sequence) -> bool:
        return (
            all(dot(a, x) <= b for a, b in zip(self.A_ub, self.b_ub))
            and all(dot(a, x) == b for a, b in zip(self.A_eq, self.b_eq))
            and all(x[j] >= 0 for j in self.nonneg)
        )


@dataclass(frozen=True)
class LPResult:
    status: str
    value: Rational | None = None
    point: Vector | None = None
    # multipliers y_ub <= 0 and free y_eq with  A_ub^T y_ub + A_eq^T y_eq  = c
    # on free columns and <= c on nonneg columns; b.y equals the optimum
    dual_ub: Vector | None = field(default=None, repr=False)
    dual_eq: Vector | None = field(default=None, repr=False)

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


def check_dual(p: LPProblem, value, y_ub: Sequence, y_eq: Sequence) -> bool:
    """Exact verification of a dual certificate for ``value``."""
    if any(y > 0 for y in y_ub):
        return False
    lhs = [ZERO] * p.nvars
    for row, y in itertools.chain(zip(p.A_ub, y_ub), zip(p.A_eq, y_eq)):
        if y:
            for j, a in enumerate(row):
                if a:
                    lhs[j] += a * y
    for j in range(p.nvars):
        if j in p.nonneg:
            if lhs[j] > p.c[j]:
                return False
        elif lhs[j] != p.c[j]:
            return False
    return dot(p.b_ub, y_ub) + dot(p.b_eq, y_eq) == value


class _Tableau:
    def __init__(self, rows, rhs, basis):
        self.rows = rows
        self.rhs = rhs
        self.basis = basis

    def pivot(self, r: int, j: int, cost_rows: list[list]):
        prow = self.rows[r]
        p = prow[j]
        if p != 1:
            inv = ONE / p
            prow[:] = [a * inv for a in prow]
            self.rhs[r] *= inv
        nz = [k for k, a in enumerate(prow) if a]
        pr = self.rhs[r]
        for i, row in enumerate(self.rows):
            if i == r:
                continue
            f = row[j]
            if f:
                for k in nz:
                    row[k] -= f * prow[k]
                self.rhs[i] -= f * pr
        for d in cost_rows:
            # d = [reduced costs..., -objective]
            f = d[j]
            if f:
                for k in nz:
                    d[k] -= f * prow[k]
                d[-1] -= f * pr
        self.basis[r] = j

    def run(self, d: list, allowed: list[bool], extra: list[list]) -> bool:
        """Bland-rule simplex on reduced-cost row ``d``; False if unbounded."""
        ncols = len(allowed)
        while True:
            j = next((k for k in range(ncols) if allowed[k] and d[k] < 0), None)
            if j is None:
                return True
            best = None
            for i, row in enumerate(self.rows):
                a = row[j]
                if a > 0:
                    ratio = self.rhs[i] / a
                    key = (ratio, self.basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                return False
            self.pivot(best[1], j, [d] + extra)


def solve(p: LPProblem) -> LPResult:
    """Two-phase simplex; returns an exact optimum or the failure status."""
    n = p.nvars
    # standard-form columns: positive and negative parts of free variables
    cols: list[tuple[int, int]] = []
    for j in range(n):
        cols.append((j, 1))
        if j not in p.nonneg:
            cols.append((j, -1))
    nstruct = len(cols)
    m_ub, m_eq = len(p.A_ub), len(p.A_eq)
    m = m_ub + m_eq
    nslack = m_ub
    rows, rhs, signs = [], [], []
    for i, (arow, b) in enumerate(itertools.chain(zip(p.A_ub, p.b_ub), zip(p.A_eq, p.b_eq))):
        row = [arow[j] * s for j, s in cols] + [ZERO] * nslack
        if i < m_ub:
            row[nstruct + i] = ONE
        s = -1 if b < 0 else 1
        if s < 0:
            row = [-a for a in row]
            b = -b
        rows.append(row)
        rhs.append(b)
        signs.append(s)
    # artificial column per row that lacks a +1 slack
    art_of_row = {}
    for i in range(m):
        if i >= m_ub or signs[i] < 0:
            art_of_row[i] = nstruct + nslack + len(art_of_row)
    nart = len(art_of_row)
    ncols = nstruct + nslack + nart
    for i, row in enumerate(rows):
        row.extend([ZERO] * nart)
        if i in art_of_row:
            row[art_of_row[i]] = ONE
    basis = [art_of_row.get(i, nstruct + i) for i in range(m)]
    tab = _Tableau(rows, rhs, basis)

    cost = [p.c[j] * s for j, s in cols] + [ZERO] * (nslack + nart)
    d2 = cost + [ZERO]
    for i in range(m):
        cb = cost[basis[i]]
        if cb:
            for k in range(ncols):
                d2[k] -= cb * rows[i][k]
            d2[-1] -= cb * rhs[i]

    if nart:
        is_art = [False] * (nstruct + nslack) + [True] * nart
        d1 = [ZERO] * (ncols + 1)
        for i in art_of_row:
            for k in range(ncols):
                if not is_art[k]:
                    d1[k] -= rows[i][k]
            d1[-1] -= rhs[i]
        tab.run(d1, [True] * ncols, [d2])
        if -d1[-1] != 0:
            return LPResult(INFEASIBLE)
        # drive zero-level artificials out where a structural pivot exists
        for i in range(m):
            if is_art[basis[i]]:
                j = next((k for k in range(ncols) if not is_art[k] and rows[i][k] != 0), None)
                if j is not None:
                    tab.pivot(i, j, [d2])
        allowed = [not a for a in is_art]
    else:
        allowed = [True] * ncols

    if not tab.run(d2, allowed, []):
        return LPResult(UNBOUNDED)

    xs = [ZERO] * ncols
    for i, b in enumerate(basis):
        xs[b] = rhs[i]
    point = [ZERO] * n
    for k, (j, s) in enumerate(cols):
        if xs[k]:
            point[j] += s * xs[k]
    point = tuple(point)
    value = dot(p.c, point)

    # duals: y_i = c_id - d_id over each row's initial identity column
    y = []
    for i in range(m):
        idc = art_of_row.get(i, nstruct + i)
        y.append((cost[idc] - d2[idc]) * signs[i])
    y_ub, y_eq = tuple(y[:m_ub]), tuple(y[m_ub:])
    if not p.is_feasible(point):
        raise LPError("simplex returned an infeasible point")
    if not check_dual(p, value, y_ub, y_eq):
        raise LPError("dual certificate failed verification")
    return LPResult(OPTIMAL, value, point, y_ub, y_eq)


def affine_dim(points: Sequence[Sequence]) -> int:
    """Dimension of the affine hull of a nonempty point list."""
    points = list(points)
    if not points:
        raise ValueError("affine_dim of an empty point set")
    base = points[0]
    return rank([sub(q, base) for q in points[1:]])


def max_cube_scale(face, center: Sequence, dirs: Sequence[Sequence]) -> Rational:
    """Largest s with center + s * sum(theta_i d_i) in the face for all signs.

    ``face`` must carry ``normals``, the facet normals (offset 1) of the body
    the face lives in; the face is the part of that body on the hyperplane
    ``face.functional = 1``.
    """
    if len(dirs) > 10:
        raise ValueError("at most 10 cube directions are supported")
    center = vec(center)
    h = face.functional
    if dot(h, center) != 1 or any(dot(h, d) != 0 for d in dirs):
        raise ValueError("center and directions must lie in the face's hyperplane")
    # over all sign patterns the worst case of a.(sum theta_i d_i) is sum |a.d_i|
    a_rows, b = [], []
    for a in face.normals:
        spread = sum((abs(dot(a, d)) for d in dirs), ZERO)
        slack = ONE - dot(a, center)
        if slack < 0:
            raise ValueError("center not in the body")
        if spread:
            a_rows.append((spread,))
            b.append(slack)
    if not a_rows:
        raise ValueError("cube directions leave the body unbounded")
    res = solve(LPProblem(c=(-ONE,), A_ub=a_rows, b_ub=b, nonneg={0}))
    if not res.optimal:
        raise LPError(f"cube scale LP ended {res.status}")
    s = res.point[0]
    if s == 0:
        raise ValueError("center not relative-interior")
    return s
