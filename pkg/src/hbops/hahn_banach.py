"""Hahn-Banach operators: exact decision, necessary condition, construction.

An operator T: X -> Y is Hahn-Banach when it extends with the same norm to
every space containing X.  For a polytopal X the question reduces to one
exact LP: X embeds isometrically into a finite sup-norm space (one
coordinate per antipodal pair of vertices of the dual ball) and that space
is injective, so T is Hahn-Banach iff some T~ on the sup-norm space with
T~ J = T has ||T~|| = ||T||.

``construct_rank_k`` builds a rank-k Hahn-Banach operator whenever the
support-set dimensions allow it, together with a finite atomic extension
Q : C(S(X*)) -> Y that can be checked independently.
"""

from __future__ import annotations

import itertools
import os
import random
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.sparse as sp
from gmpy2 import mpq
from scipy.optimize import linprog

from . import exactnum as xn
from .bodies import (
    SpaceHandle,
    close,
    compute_d,
    compute_f,
    f_value,
    is_exact,
    max_support_dim,
    norm,
)
from .bodies.space import norm_expr
from .lp import LPProblem
from .lp import solve as lp_solve
from .operators import LinOperator, _net_directions, op_norm

CERT_TOL = 1e-9
NOT_HB_MARGIN = 1e-6
MAX_ENUM_ATOMS = 20


class RankOutOfRange(ValueError):
    pass


class ConstructionError(RuntimeError):
    pass


def seed_from_env(default: int = 0) -> int:
    return int(os.environ.get("HBOPS_SEED", default))


def _canonical_sign(v):
    first = next(a for a in v if a != 0)
    return v if first > 0 else xn.neg(v)


def antipodal_representatives(points) -> tuple:
    return tuple(sorted({_canonical_sign(p) for p in points}))


@dataclass(frozen=True)
class LinfEmbedding:
    coordinates: tuple

    @property
    def N(self) -> int:
        return len(self.coordinates)

    @property
    def matrix(self):
        return self.coordinates

    def __call__(self, x: Sequence):
        return xn.matvec(self.coordinates, xn.vec(x))


def embed_linf(X: SpaceHandle, checks: int = 100) -> LinfEmbedding:
    """Isometric embedding of a polytopal X into a finite sup-norm space."""
    if not X.is_polytopal:
        raise ValueError("embed_linf needs a polytopal space")
    emb = LinfEmbedding(antipodal_representatives(X.polar.vertices))
    rng = random.Random(seed_from_env())
    samples = [xn.unit(X.dim, i) for i in range(X.dim)]
    samples += [
        xn.vec(mpq(rng.randint(-20, 20), rng.randint(1, 9)) for _ in range(X.dim))
        for _ in range(checks)
    ]
    for x in samples:
        if max(abs(a) for a in emb(x)) != norm(X, x):
            raise ConstructionError("embedding is not isometric")
    return emb


# -- exact minimum extension norm ------------------------------------------

def _extension_lp(T: LinOperator, emb: LinfEmbedding):
    Y = T.codomain
    ny, nx, N = Y.dim, T.domain.dim, emb.N
    duals = antipodal_representatives(Y.normals)
    nt = ny * N
    nu = len(duals) * N
    nvar = nt + nu + 1
    tcol = nvar - 1

    def tv(r, j):
        return r * N + j

    A, b = [], []
    for v, a in enumerate(duals):
        for j in range(N):
            row = [xn.ZERO] * nvar
            for r in range(ny):
                row[tv(r, j)] = a[r]
            row[nt + v * N + j] = -xn.ONE
            A.append(row)
            A.append([-x if k < nt else x for k, x in enumerate(row)])
            b += [xn.ZERO, xn.ZERO]
        row = [xn.ZERO] * nvar
        for j in range(N):
            row[nt + v * N + j] = xn.ONE
        row[tcol] = -xn.ONE
        A.append(row)
        b.append(xn.ZERO)
    E, e = [], []
    J = emb.coordinates
    for r in range(ny):
        for c in range(nx):
            row = [xn.ZERO] * nvar
            for j in range(N):
                row[tv(r, j)] = J[j][c]
            E.append(row)
            e.append(T.matrix[r][c])
    c = [xn.ZERO] * nvar
    c[tcol] = xn.ONE
    nonneg = frozenset(range(nt, nvar))
    return LPProblem(c=c, A_ub=A, b_ub=b, A_eq=E, b_eq=e, nonneg=nonneg), nt


def _require_polytopal(T: LinOperator):
    if not (T.domain.is_polytopal and T.codomain.is_polytopal):
        raise ValueError("exact extension norm needs polytopal domain and codomain")


def min_extension(T: LinOperator) -> tuple:
    """(minimal extension norm, optimal extension matrix, embedding)."""
    _require_polytopal(T)
    emb = embed_linf(T.domain)
    prob, nt = _extension_lp(T, emb)
    res = lp_solve(prob)
    if not res.optimal:
        raise ConstructionError(f"extension LP ended {res.status}")
    N = emb.N
    ext = tuple(tuple(res.point[r * N:(r + 1) * N]) for r in range(T.codomain.dim))
    return res.value, ext, emb


def min_extension_norm(T: LinOperator):
    return min_extension(T)[0]


def extension_norm(ext, Y: SpaceHandle):
    """Norm of a matrix from the sup-norm space into Y."""
    if Y.is_polytopal:
        return max(sum((abs(x) for x in xn.vecmat(a, ext)), xn.ZERO) for a in Y.normals)
    cols = xn.transpose(ext)
    if len(cols) > MAX_ENUM_ATOMS:
        raise ValueError(f"too many coordinates ({len(cols)}) for sign enumeration")
    return max(
        (norm(Y, xn.lincomb((1,) + s, cols)) for s in itertools.product((1, -1), repeat=len(cols) - 1)),
        key=float,
    )


# -- verdicts ----------------------------------------------------------------

@dataclass(frozen=True)
class IsHB:
    extension: tuple
    embedding: LinfEmbedding
    norm: object
    tag = "IsHB"


@dataclass(frozen=True)
class NotHB:
    min_extension_norm: object
    norm: object
    tag = "NotHB"

    @property
    def gap(self):
        return self.min_extension_norm - self.norm


@dataclass(frozen=True)
class LowerBoundOnly:
    bound: float
    net_size: int
    norm: float
    tag = "LowerBoundOnly"


def extension_from_certificate(c: "ExtensionCertificate", emb: LinfEmbedding):
    """Move the atoms of a certificate onto the sup-norm coordinates.

    Each atom point p lies in conv(vertices of B(X*)); writing p as a convex
    combination sum l_v v gives an extension with the same restriction and
    no larger norm.
    """
    X, Y = c.operator.domain, c.operator.codomain
    reps = {r: j for j, r in enumerate(emb.coordinates)}
    verts = X.polar.vertices
    cols = [[xn.ZERO] * Y.dim for _ in range(emb.N)]
    for p, v in c.atoms:
        prob = LPProblem(
            c=[xn.ONE] * len(verts),
            A_eq=xn.transpose(verts),
            b_eq=p,
            nonneg=frozenset(range(len(verts))),
        )
        res = lp_solve(prob)
        if not res.optimal or res.value != 1:
            raise ConstructionError("atom point is not on the dual unit sphere")
        for lam, vert in zip(res.point, verts):
            if lam:
                rep = _canonical_sign(vert)
                sgn = 1 if rep == vert else -1
                col = cols[reps[rep]]
                for r in range(Y.dim):
                    col[r] += sgn * lam * v[r]
    return xn.transpose(cols)


def is_hahn_banach(T: LinOperator, net_size: int = 32, certificate=None):
    """Exact verdict on polytopal spaces, a lower bound otherwise.

    With a polytopal domain and a non-polytopal codomain the extension
    problem is no longer an LP; a verified certificate for T then yields
    IsHB, and without one only the net lower bound is reported.
    """
    X, Y = T.domain, T.codomain
    if X.is_polytopal and not Y.is_polytopal and certificate is not None:
        if certificate.operator.matrix != T.matrix or not verify_certificate(certificate).ok:
            raise ValueError("certificate does not certify this operator")
        emb = embed_linf(X)
        ext = extension_from_certificate(certificate, emb)
        nv = op_norm(T).value
        if xn.matmul(ext, emb.coordinates) != T.matrix or not close(extension_norm(ext, Y), nv, CERT_TOL):
            raise ConstructionError("certificate extension check failed")
        return IsHB(extension=ext, embedding=emb, norm=nv)
    if not (X.is_polytopal and Y.is_polytopal):
        bound = hb_lower_bound(T, net_size)
        return LowerBoundOnly(bound=bound, net_size=net_size, norm=float(op_norm(T).value))
    value, ext, emb = min_extension(T)
    nv = op_norm(T).value
    if value == nv:
        return IsHB(extension=ext, embedding=emb, norm=nv)
    return NotHB(min_extension_norm=value, norm=nv)


# -- numeric lower bound -----------------------------------------------------

def _sphere_net(S: SpaceHandle, count: int) -> np.ndarray:
    """Points of the unit sphere of S (as floats); exact vertices if polytopal."""
    if S.is_polytopal:
        return np.array([[float(a) for a in v] for v in antipodal_representatives(S.vertices)])
    pts = []
    for u in _net_directions(S.dim, count):
        q = xn.vec(mpq(float(t)) for t in u)
        r = float(norm_expr(S.body, q))
        pts.append(u / r)
    return np.array(pts)


def _gauge_in_hull(points: np.ndarray, g: np.ndarray) -> float:
    """Gauge of g w.r.t. conv(+-points): min sum |l| with sum l_i p_i = g."""
    k = len(points)
    c = np.ones(2 * k)
    A_eq = np.hstack([points.T, -points.T])
    res = linprog(c, A_eq=A_eq, b_eq=g, bounds=(0, None), method="highs")
    if res.status != 0:
        raise ConstructionError("net does not span the dual space")
    return float(res.fun)


def hb_lower_bound(T: LinOperator, net_size: int) -> float:
    """Extension constant of T with both norms replaced by finite nets.

    The dual spheres of X and Y are sampled (vertices are used for
    polytopal sides); X is embedded into a sup-norm space through its net,
    and the minimal extension norm is rescaled by the ratio ||T|| / ||T||_net.
    Only a lower-bound style estimate: callers never turn it into NotHB.
    """
    X, Y = T.domain, T.codomain
    if net_size < X.dim:
        raise ValueError("net too small to span the dual space")
    P = _sphere_net(X.polar, net_size)
    U = _sphere_net(Y.polar, net_size)
    if np.linalg.matrix_rank(P) < X.dim:
        raise ValueError("net too small to span the dual space")
    M = np.array([[float(a) for a in row] for row in T.matrix])
    ny, N = Y.dim, len(P)
    nu = len(U)
    nt = ny * N
    nvar = nt + nu * N + 1
    ub, r = ([], [], []), 0

    def put(m, row, col, val):
        m[0].append(row)
        m[1].append(col)
        m[2].append(val)

    for v in range(nu):
        for j in range(N):
            for sign in (1.0, -1.0):
                for k in np.flatnonzero(U[v]):
                    put(ub, r, k * N + j, sign * U[v, k])
                put(ub, r, nt + v * N + j, -1.0)
                r += 1
        for j in range(N):
            put(ub, r, nt + v * N + j, 1.0)
        put(ub, r, nvar - 1, -1.0)
        r += 1
    A_ub = sp.csr_matrix((ub[2], (ub[0], ub[1])), shape=(r, nvar))
    b_ub = np.zeros(r)
    eq, b_eq = ([], [], []), []
    for k in range(ny):
        for c in range(X.dim):
            for j in np.flatnonzero(P[:, c]):
                put(eq, len(b_eq), k * N + j, P[j, c])
            b_eq.append(M[k, c])
    A_eq = sp.csr_matrix((eq[2], (eq[0], eq[1])), shape=(len(b_eq), nvar))
    cost = np.zeros(nvar)
    cost[-1] = 1.0
    bounds = [(None, None)] * nt + [(0, None)] * (nvar - nt)
    res = linprog(cost, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=np.array(b_eq), bounds=bounds,
                  method="highs-ipm",
                  options={"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10})
    if res.status != 0:
        raise ConstructionError(f"net LP failed: {res.message}")
    lam = float(res.fun)
    net_norm = max(_gauge_in_hull(P, M.T @ U[v]) for v in range(nu))
    if net_norm == 0:
        return 0.0
    true_norm = float(op_norm(T).value)
    return true_norm * lam / net_norm


# -- necessary condition at norming points--------------------------------------

@dataclass(frozen=True)
class NormingPointCheck:
    point: tuple
    d: int
    support_dim: int
    required: int

    @property
    def passed(self) -> bool:
        return self.support_dim >= self.required


@dataclass(frozen=True)
class Theorem1Report:
    rank: int
    checks: tuple
    note: str = "checked at attaining vertices and centroids of maximal attaining faces only"

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def theorem1_verify(T: LinOperator) -> Theorem1Report:
    """Check that each norming point x0 maps into a support set of B(Y) of
    dimension >= rank - 1 - d(x0).  Requires ||T|| = 1 and a polytopal domain."""
    if not T.domain.is_polytopal:
        raise ValueError("the necessary-condition check needs a polytopal domain")
    rep = op_norm(T)
    if not close(rep.value, 1):
        raise ValueError(f"operator norm is {rep.value}, rescale to 1 first")
    k = T.rank
    checks = []
    for x0 in rep.points:
        d = compute_d(T.domain, x0)
        s = max_support_dim(T.codomain, T(x0))
        checks.append(NormingPointCheck(point=x0, d=d, support_dim=s, required=k - 1 - d))
    return Theorem1Report(rank=k, checks=tuple(checks))


def corollary_max_rank(X: SpaceHandle, Y: SpaceHandle) -> int:
    """Largest k admitting a rank-k Hahn-Banach operator X -> Y."""
    return min(X.dim, Y.dim, f_value(X.polar) + f_value(Y) + 1)


# -- certificates and the rank-k construction --------------------------------

@dataclass(frozen=True)
class ExtensionCertificate:
    """Q(f) = sum_a f(point_a) vector_a on C(S(X*)), restricting to ``operator``."""

    atoms: tuple
    operator: LinOperator
    rank: int


@dataclass
class CertificateCheck:
    ok: bool
    norm_value: object = None
    problems: list = field(default_factory=list)

    def __bool__(self):
        return self.ok


def merge_atoms(atoms) -> tuple:
    acc: dict = {}
    for p, v in atoms:
        p = xn.vec(p)
        acc[p] = xn.add(acc[p], v) if p in acc else xn.vec(v)
    return tuple((p, v) for p, v in acc.items() if not xn.is_zero(v))


def atomic_restriction(atoms, nx: int, ny: int):
    m = [[xn.ZERO] * nx for _ in range(ny)]
    for p, v in atoms:
        for r in range(ny):
            if v[r]:
                for c in range(nx):
                    if p[c]:
                        m[r][c] += v[r] * p[c]
    return tuple(tuple(row) for row in m)


def certificate_norm(atoms, Y: SpaceHandle):
    """sup over the unit ball of C(S(X*)) of ||sum f(p_a) v_a||."""
    atoms = merge_atoms(atoms)
    if not atoms:
        return xn.ZERO
    if Y.is_polytopal:
        return max(
            sum((abs(xn.dot(a, v)) for _, v in atoms), xn.ZERO) for a in Y.normals
        )
    if len(atoms) > MAX_ENUM_ATOMS:
        raise ValueError(f"too many atoms ({len(atoms)}) for sign enumeration")
    vecs = [v for _, v in atoms]
    best = None
    # the norm is even, so the first sign can be fixed
    for signs in itertools.product((1, -1), repeat=len(vecs) - 1):
        s = xn.lincomb((1,) + signs, vecs)
        r = norm(Y, s)
        if best is None or r > best:
            best = r
    return best


def verify_certificate(c: ExtensionCertificate) -> CertificateCheck:
    T = c.operator
    X, Y = T.domain, T.codomain
    problems = []
    for p, _ in c.atoms:
        if not close(norm(X.polar, p), 1, CERT_TOL):
            problems.append(f"atom point {[str(a) for a in p]} is not on the dual unit sphere")
    if atomic_restriction(c.atoms, X.dim, Y.dim) != T.matrix:
        problems.append("restriction of the atomic operator differs from the operator")
    try:
        value = certificate_norm(c.atoms, Y)
    except ValueError as exc:
        problems.append(str(exc))
        value = None
    if value is not None and not close(value, 1, CERT_TOL):
        problems.append(f"extension norm is {value}, expected 1")
    if T.rank != c.rank:
        problems.append(f"operator rank is {T.rank}, claimed {c.rank}")
    if not problems:
        nv = op_norm(T).value
        if not close(nv, 1, CERT_TOL):
            problems.append(f"restricted operator has norm {nv}, extension is not norm-preserving")
    return CertificateCheck(ok=not problems, norm_value=value, problems=problems)


def _split_dims(fx: int, k: int) -> tuple[int, int]:
    m = min(fx, k - 1)
    return m, k - 1 - m


def _functional_atoms(X: SpaceHandle, g):
    """Atoms (point, weight) of a measure on S(X*) restricting to g.

    A single atom at g/||g|| when the dual norm is rational; otherwise one
    atom per coordinate functional, which always have rational norm.
    Returns (atoms, total variation).
    """
    r = norm(X.polar, g)
    if is_exact(r):
        return [(xn.smul(xn.ONE / r, g), r)], r
    atoms, total = [], xn.ZERO
    for j, gj in enumerate(g):
        if gj:
            e = xn.unit(X.dim, j)
            ne = norm(X.polar, e)
            if not is_exact(ne):
                raise ConstructionError("coordinate functional with irrational norm")
            atoms.append((xn.smul(xn.ONE / ne, e), gj * ne))
            total += abs(gj * ne)
    return atoms, total


def construct_rank_k(X: SpaceHandle, Y: SpaceHandle, k: int):
    """Norm-one Hahn-Banach operator X -> Y of rank k and its certificate."""
    bound = corollary_max_rank(X, Y)
    if not 1 <= k <= bound:
        raise RankOutOfRange(
            f"no Hahn-Banach operator of rank {k}: need 1 <= k <= "
            f"min(dim X, dim Y, f(X*) + f(Y) + 1) = {bound}"
        )
    fx, wx = compute_f(X.polar)
    fy, wy = compute_f(Y)
    m, n = _split_dims(fx, k)
    assert n <= fy

    x0s = wx.center
    xis = list(wx.directions[:m])
    x0 = wx.face.functional
    if xn.dot(x0s, x0) != 1 or any(xn.dot(d, x0) != 0 for d in xis):
        raise ConstructionError("dual witness is not biorthogonal to its exposing vector")
    basis = xn.complete_basis_annihilating(x0, [x0s] + xis)
    completion = basis[m + 1:]
    xs = xn.biorthogonal_vectors(basis)
    if xn.pairing_matrix(basis, xs) != xn.identity(X.dim):
        raise ConstructionError("biorthogonal system check failed")

    y0 = wy.center
    ys = list(wy.directions[:n])
    spare = list(wy.directions[n:])
    used = [y0] + ys
    targets, n_cube = [], 0
    for i in range(m):
        if i < len(spare):
            targets.append(spare[i])
            n_cube += 1
        else:
            e = next(
                xn.unit(Y.dim, j) for j in range(Y.dim)
                if xn.rank(used + targets + [xn.unit(Y.dim, j)]) > len(used + targets)
            )
            targets.append(xn.smul(xn.ONE / norm(Y, e), e))
    n_extra = len(targets) - n_cube
    alpha = xn.ONE if n_extra == 0 else mpq(1, n_extra + (1 if n_cube else 0))

    half = mpq(1, 2)
    atoms = [(x0s, xn.smul(half, y0))]
    for g, yi in zip(completion[:n], ys):
        parts, total = _functional_atoms(X, g)
        for p, w in parts:
            atoms.append((p, xn.smul(half * w / total, yi)))
    weight = half * mpq(1, 2 ** m)
    for thetas in itertools.product((1, -1), repeat=m):
        point = xn.lincomb((1,) + thetas, [x0s] + xis) if m else x0s
        vec = y0
        for t, w in zip(thetas, targets):
            vec = xn.add(vec, xn.smul(t * alpha, w))
        atoms.append((point, xn.smul(weight, vec)))
    atoms = merge_atoms(atoms)

    matrix = atomic_restriction(atoms, X.dim, Y.dim)
    T = LinOperator(matrix, X, Y)
    cert = ExtensionCertificate(atoms=atoms, operator=T, rank=k)
    if T.rank != k:
        raise ConstructionError(f"constructed operator has rank {T.rank}, expected {k}")
    if T(x0) != y0:
        raise ConstructionError("constructed operator does not map x0 to y0")
    check = verify_certificate(cert)
    if not check.ok:
        raise ConstructionError("; ".join(check.problems))
    return T, cert
