"""Linear operators between spaces, operator norms and norm attainment."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from gmpy2 import mpq
from scipy.optimize import minimize_scalar

from . import exactnum as xn
from .bodies import FaceDescriptor, SpaceHandle, close, exposed_face, is_exact, norm
from .bodies.space import norm_expr

NUMERIC_TOL = 1e-9


@dataclass(frozen=True)
class LinOperator:
    matrix: tuple
    domain: SpaceHandle
    codomain: SpaceHandle

    def __post_init__(self):
        m = xn.mat(self.matrix)
        object.__setattr__(self, "matrix", m)
        rows, cols = xn.shape(m)
        if rows != self.codomain.dim or cols != self.domain.dim:
            raise ValueError(
                f"matrix is {rows}x{cols}, expected {self.codomain.dim}x{self.domain.dim}"
            )

    def __call__(self, x: Sequence) -> xn.Vector:
        return xn.matvec(self.matrix, xn.vec(x))

    @property
    def rank(self) -> int:
        return xn.rank(self.matrix)


@dataclass(frozen=True)
class NormReport:
    value: object
    points: tuple = ()
    faces: tuple = field(default=(), repr=False)
    exact: bool = True


def _exact_norm(T: LinOperator) -> NormReport:
    X, Y = T.domain, T.codomain
    verts = X.vertices
    vals = [norm(Y, T(v)) for v in verts]
    value = max(vals)
    points = [v for v, r in zip(verts, vals) if close(r, value)]
    faces: list[FaceDescriptor] = []
    if Y.is_polytopal and value > 0:
        seen = set()
        for a in Y.normals:
            g = xn.vecmat(a, T.matrix)
            if xn.is_zero(g):
                continue
            face = exposed_face(X, g)
            if face.dimension == 0 or face.vertices in seen:
                continue
            if xn.dot(g, face.vertices[0]) == value:
                seen.add(face.vertices)
                faces.append(face)
        # keep maximal faces only
        faces = [
            f for f in faces
            if not any(o is not f and set(f.vertices) < set(o.vertices) for o in faces)
        ]
        for f in faces:
            c = xn.centroid(f.vertices)
            if c not in points:
                points.append(c)
    return NormReport(value=value, points=tuple(points), faces=tuple(faces),
                      exact=is_exact(value))


def _net_directions(n: int, count: int, seed: int = 0) -> np.ndarray:
    if n == 1:
        return np.ones((1, 1))
    if n == 2:
        t = np.pi * np.arange(count) / count
        return np.stack([np.cos(t), np.sin(t)], axis=1)
    rng = np.random.default_rng(seed)
    u = rng.standard_normal((count, n))
    return u / np.linalg.norm(u, axis=1, keepdims=True)


def _sphere_point(angles: np.ndarray) -> np.ndarray:
    # hyperspherical chart
    n = len(angles) + 1
    x = np.empty(n)
    s = 1.0
    for i, a in enumerate(angles):
        x[i] = s * math.cos(a)
        s *= math.sin(a)
    x[-1] = s
    return x


def _sphere_angles(x: np.ndarray) -> np.ndarray:
    n = len(x)
    angles = np.empty(n - 1)
    for i in range(n - 1):
        r = np.linalg.norm(x[i:])
        angles[i] = math.acos(max(-1.0, min(1.0, x[i] / r))) if r > 0 else 0.0
    if n >= 2 and x[-1] < 0:
        angles[-1] = 2 * math.pi - angles[-1]
    return angles


def _ratio(T: LinOperator, x) -> float:
    q = xn.vec(mpq(float(t)) for t in x)
    den = float(norm_expr(T.domain.body, q))
    if den == 0:
        return 0.0
    return float(norm_expr(T.codomain.body, xn.matvec(T.matrix, q))) / den


def _polish(T: LinOperator, start: np.ndarray, net: int) -> tuple[np.ndarray, float]:
    ang = _sphere_angles(start)
    best_val = _ratio(T, start)
    width = math.pi / net ** (1 / max(1, len(start) - 1)) * 4
    for _ in range(60):
        before = best_val
        for i in range(len(ang)):
            def f(t, i=i):
                a = ang.copy()
                a[i] = t
                return -_ratio(T, _sphere_point(a))

            res = minimize_scalar(f, bounds=(ang[i] - width, ang[i] + width),
                                  method="bounded", options={"xatol": 1e-13})
            if -res.fun > best_val:
                best_val = -res.fun
                ang[i] = res.x
        if best_val - before < NUMERIC_TOL * 1e-3:
            width /= 2
            if width < 1e-10:
                break
    return _sphere_point(ang), best_val


def _numeric_norm(T: LinOperator, net: int = 2000, starts: int = 8) -> NormReport:
    X = T.domain
    n = X.dim
    dirs = _net_directions(n, net)
    vals = np.array([_ratio(T, u) for u in dirs])
    best = dirs[int(np.argmax(vals))]
    best_val = float(vals.max())
    if n >= 2:
        for i in np.argsort(-vals)[:starts]:
            p, v = _polish(T, dirs[i], net)
            if v > best_val:
                best, best_val = p, v
    x = xn.vec(mpq(float(t)) for t in best)
    r = norm_expr(X.body, x)
    x = tuple(xn.rat(float(t) / float(r)) for t in x)
    value = best_val
    Y = T.codomain
    if Y.is_polytopal:
        # dual formula ||T|| = max over dual vertices a of ||T^t a||_{X*}
        value = max(
            (norm(X.polar, xn.vecmat(a, T.matrix)) for a in Y.normals),
            key=float,
        )
    return NormReport(value=value, points=(x,), exact=is_exact(value))


def op_norm(T: LinOperator) -> NormReport:
    """Operator norm with norm-attaining unit vectors.

    Polytopal domains are handled exactly by maximizing over vertices; the
    attainment set lists vertices plus the centroids of maximal attaining
    faces.  Other domains use a net on the sphere refined by bounded scalar
    searches, to about 1e-9.
    """
    if T.domain.is_polytopal:
        return _exact_norm(T)
    return _numeric_norm(T)


def adjoint(T: LinOperator) -> LinOperator:
    return LinOperator(xn.transpose(T.matrix), T.codomain.polar, T.domain.polar)


def scale(T: LinOperator, alpha) -> LinOperator:
    alpha = xn.rat(alpha)
    if alpha == 0:
        raise ValueError("scaling factor must be nonzero")
    return LinOperator(xn.mscale(alpha, T.matrix), T.domain, T.codomain)


def identity(X: SpaceHandle, Y: SpaceHandle) -> LinOperator:
    if X.dim != Y.dim:
        raise ValueError("identity needs equal dimensions")
    return LinOperator(xn.identity(X.dim), X, Y)
