"""Fixed test corpus of space pairs and seeded random instance generators."""

from __future__ import annotations

import random
from dataclasses import dataclass

from gmpy2 import mpq

from .bodies import PBall, PolytopeH, PolytopeV, Scale, SpaceHandle, SumInf, SumOne
from .bodies.expr import BodyValidationError, validate
from .exactnum import rank
from .lp import LPProblem


@dataclass(frozen=True)
class CorpusPair:
    name: str
    X: SpaceHandle
    Y: SpaceHandle


def l1(n):
    return PBall(n, 1)


def linf(n):
    return PBall(n, "inf")


def l2(n):
    return PBall(n, 2)


def random_polytope(rng: random.Random, n: int, points: int | None = None, hform: bool = False):
    """Symmetric rational polytope: hull of +-p for a few small integer points."""
    k = points or n + 1
    while True:
        pts = [tuple(mpq(rng.randint(-3, 3), rng.randint(1, 2)) for _ in range(n)) for _ in range(k)]
        if rank(pts) < n:
            continue
        sym = pts + [tuple(-a for a in p) for p in pts]
        body = PolytopeH(sym) if hform else PolytopeV(sym)
        try:
            validate(body)
        except BodyValidationError:
            continue
        return body


def _named_bodies(rng: random.Random) -> dict:
    b = {
        "l1_2": l1(2), "l1_3": l1(3), "l1_4": l1(4),
        "linf_2": linf(2), "linf_3": linf(3), "linf_4": linf(4),
        "l2_2": l2(2), "l2_3": l2(3), "l2_4": l2(4),
        "l3_2": PBall(2, 3),
        "hex_2": random_polytope(rng, 2),
        "hexH_2": random_polytope(rng, 2, hform=True),
        "poly_3": random_polytope(rng, 3),
        "polyH_3": random_polytope(rng, 3, hform=True),
        "poly_4": random_polytope(rng, 4),
        "l1_2+inf_l1_2": SumInf((l1(2), l1(2))),
        "l1_2+1_linf_2": SumOne((l1(2), linf(2))),
        "l2_2+1_l2_2": SumOne((l2(2), l2(2))),
        "l2_2+inf_l2_2": SumInf((l2(2), l2(2))),
        "l2_2+inf_l1_1": SumInf((l2(2), l1(1))),
        "l2_2+1_l1_1": SumOne((l2(2), l1(1))),
        "hex_2+1_l1_1": SumOne((random_polytope(rng, 2), l1(1))),
        "3/2*linf_3": Scale(mpq(3, 2), linf(3)),
    }
    return b


PAIR_NAMES = [
    ("l1_2", "l1_2"), ("l1_2", "linf_2"), ("linf_2", "l1_2"), ("linf_2", "linf_2"),
    ("l2_2", "l2_2"), ("l2_2", "l1_2"), ("l1_2", "l2_2"), ("l3_2", "linf_2"),
    ("hex_2", "hexH_2"), ("hexH_2", "l2_2"), ("linf_2", "hex_2"),
    ("l1_3", "linf_3"), ("linf_3", "l1_3"), ("l1_3", "l2_3"), ("l2_3", "l1_3"),
    ("l2_3", "l2_3"), ("poly_3", "polyH_3"), ("polyH_3", "l2_3"), ("l1_3", "3/2*linf_3"),
    ("l2_2+inf_l1_1", "l1_3"), ("l2_2+1_l1_1", "l2_3"), ("hex_2+1_l1_1", "poly_3"),
    ("l1_4", "linf_4"), ("linf_4", "l1_4"), ("l1_4", "l2_4"), ("l2_4", "l2_4"),
    ("l2_2+1_l2_2", "l2_4"), ("l2_4", "l2_2+inf_l2_2"), ("l2_2+1_l2_2", "l2_2+inf_l2_2"),
    ("l1_2+inf_l1_2", "l1_2+1_linf_2"), ("l1_2+1_linf_2", "l2_4"), ("poly_4", "l1_4"),
    ("linf_4", "l2_2+1_l2_2"), ("l2_2+inf_l2_2", "linf_4"),
]


def structured_corpus(seed: int = 7) -> list[CorpusPair]:
    rng = random.Random(seed)
    bodies = _named_bodies(rng)
    handles = {k: SpaceHandle(v) for k, v in bodies.items()}
    return [CorpusPair(f"{x} -> {y}", handles[x], handles[y]) for x, y in PAIR_NAMES]


def random_polytopal_space(rng: random.Random, max_dim: int = 4) -> SpaceHandle:
    n = rng.randint(2, max_dim)
    kind = rng.choice(["l1", "linf", "V", "H"])
    if kind == "l1":
        return SpaceHandle(l1(n))
    if kind == "linf":
        return SpaceHandle(linf(n))
    extra = rng.randint(0, 1) if n <= 3 else 0
    return SpaceHandle(random_polytope(rng, n, n + 1 + extra, hform=(kind == "H")))


def random_rank1(rng: random.Random, X: SpaceHandle, Y: SpaceHandle):
    from .operators import LinOperator

    def nonzero_vec(n):
        while True:
            v = [mpq(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(n)]
            if any(v):
                return v

    y, g = nonzero_vec(Y.dim), nonzero_vec(X.dim)
    return LinOperator([[a * b for b in g] for a in y], X, Y)


def random_leaf(rng: random.Random, max_dim: int = 3):
    n = rng.randint(1, max_dim)
    if n == 1:
        return l1(1)
    kind = rng.choice(["l1", "linf", "V", "H"])
    if kind == "l1":
        return l1(n)
    if kind == "linf":
        return linf(n)
    return random_polytope(rng, n, n + 1, hform=(kind == "H"))


def random_composite(rng: random.Random, max_total: int = 7):
    """A random polytopal (+)_1 / (+)_inf tree with leaf dimension <= 3."""
    while True:
        parts = [random_leaf(rng) for _ in range(rng.randint(2, 3))]
        if sum(p.dim for p in parts) > max_total:
            continue
        if len(parts) == 3 and rng.random() < 0.5:
            inner = rng.choice([SumOne, SumInf])((parts[0], parts[1]))
            parts = [inner, parts[2]]
        return rng.choice([SumOne, SumInf])(tuple(parts))


def random_bounded_lp(rng: random.Random, max_vars: int = 6) -> LPProblem:
    """Random LP over a box with a few extra cuts and an optional equality."""
    n = rng.randint(1, max_vars)

    def r():
        return mpq(rng.randint(-5, 5), rng.randint(1, 3))

    A, b = [], []
    for i in range(n):
        hi, lo = rng.randint(1, 4), rng.randint(0, 4)
        A.append([1 if j == i else 0 for j in range(n)])
        b.append(hi)
        A.append([-1 if j == i else 0 for j in range(n)])
        b.append(lo)
    for _ in range(rng.randint(0, 3)):
        A.append([r() for _ in range(n)])
        b.append(mpq(rng.randint(1, 6)))
    A_eq, b_eq = [], []
    if n >= 2 and rng.random() < 0.3:
        A_eq.append([r() for _ in range(n)])
        b_eq.append(0)
    nonneg = frozenset(i for i in range(n) if rng.random() < 0.3)
    return LPProblem(c=[r() for _ in range(n)], A_ub=A, b_ub=b, A_eq=A_eq, b_eq=b_eq, nonneg=nonneg)
