import random

import pytest
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from hbops.bodies import IntersectPoly, PBall, Scale, SpaceHandle, SumOne, norm
from hbops.corpus import random_polytopal_space
from hbops.exactnum import dot, matvec, transpose, unit
from hbops.operators import LinOperator, adjoint, identity, op_norm, scale
from hbops.oracles import brute_op_norm

L1_2, LINF_2 = SpaceHandle(PBall(2, 1)), SpaceHandle(PBall(2, "inf"))
REMARK_Y = SpaceHandle(IntersectPoly((Scale(mpq(11, 10), PBall(3, 1)), PBall(3, "inf"))))

entries = st.fractions(min_value=-3, max_value=3, max_denominator=3)


def mat(n, m):
    return st.lists(st.lists(entries, min_size=m, max_size=m), min_size=n, max_size=n)


def test_shape_check():
    with pytest.raises(ValueError, match="expected 2x2"):
        LinOperator([[1, 0, 0]], L1_2, LINF_2)


def test_norm_examples():
    r = op_norm(identity(L1_2, LINF_2))
    assert r.value == 1
    assert set(r.points) == {(1, 0), (-1, 0), (0, 1), (0, -1)}
    r = op_norm(identity(LINF_2, L1_2))
    assert r.value == 2
    assert set(r.points) == {(1, 1), (1, -1), (-1, 1), (-1, -1)}


def test_remark_attainment():
    r = op_norm(identity(SpaceHandle(PBall(3, 1)), REMARK_Y))
    assert r.value == 1
    expected = {unit(3, i) for i in range(3)} | {tuple(-a for a in unit(3, i)) for i in range(3)}
    assert set(r.points) == expected
    assert r.faces == ()


def test_attainment_faces_only_where_norm_is_attained():
    # all four corners attain, but edge midpoints do not
    T = identity(LINF_2, L1_2)
    r = op_norm(T)
    assert r.faces == ()
    # identity l1 -> l1 attains on every facet
    r = op_norm(identity(L1_2, L1_2))
    assert len(r.faces) == 4
    for p in r.points:
        assert norm(L1_2, p) == 1 and norm(L1_2, p) == r.value


@settings(max_examples=30, deadline=None)
@given(mat(2, 2))
def test_attainment_points_attain(m):
    T = LinOperator(m, L1_2, LINF_2)
    r = op_norm(T)
    for p in r.points:
        assert norm(T.domain, p) == 1
        assert norm(T.codomain, T(p)) == r.value


@settings(max_examples=30, deadline=None)
@given(mat(2, 2))
def test_adjoint_norm_equality(m):
    T = LinOperator(m, L1_2, LINF_2)
    assert op_norm(T).value == op_norm(adjoint(T)).value


@pytest.mark.parametrize("seed", range(6))
def test_adjoint_norm_random_polytopes(seed):
    rng = random.Random(seed)
    X, Y = random_polytopal_space(rng, 3), random_polytopal_space(rng, 3)
    m = [[mpq(rng.randint(-3, 3), rng.randint(1, 3)) for _ in range(X.dim)] for _ in range(Y.dim)]
    T = LinOperator(m, X, Y)
    assert op_norm(T).value == op_norm(adjoint(T)).value


def test_adjoint_basics():
    X3 = SpaceHandle(PBall(3, 1))
    T = identity(X3, REMARK_Y)
    A = adjoint(T)
    assert A.matrix == T.matrix
    assert A.domain == REMARK_Y.polar and A.codomain == X3.polar
    assert adjoint(A).matrix == T.matrix
    assert adjoint(A).domain == X3


@settings(max_examples=30, deadline=None)
@given(mat(2, 3), st.lists(entries, min_size=3, max_size=3), st.lists(entries, min_size=2, max_size=2))
def test_adjoint_pairing(m, x, y):
    T = LinOperator(m, SpaceHandle(PBall(3, 1)), L1_2)
    assert dot(T(x), y) == dot(x, matvec(transpose(T.matrix), y))


def test_scale():
    T = identity(L1_2, LINF_2)
    assert scale(T, 1).matrix == T.matrix
    assert op_norm(scale(T, -1)).value == 1
    assert set(op_norm(scale(T, -1)).points) == set(op_norm(T).points)
    assert op_norm(scale(T, mpq(3, 2))).value == mpq(3, 2)
    with pytest.raises(ValueError):
        scale(T, 0)


def test_numeric_norm_smooth_domain():
    l2 = SpaceHandle(PBall(2, 2))
    T = LinOperator([[1, 2], [0, 1]], l2, l2)
    assert abs(op_norm(T).value - (1 + 2 ** 0.5)) < 1e-9
    l2_3 = SpaceHandle(PBall(3, 2))
    T = LinOperator([[1, 0, 0], [0, 1, 0], [0, 0, 1]], l2_3, SpaceHandle(PBall(3, 1)))
    assert abs(float(op_norm(T).value) - 3 ** 0.5) < 1e-9


def test_numeric_norm_composite_domain():
    X = SpaceHandle(SumOne((PBall(2, 2), PBall(2, 2))))
    T = LinOperator([[1, 0, 1, 0], [0, 1, 0, -1]], X, SpaceHandle(PBall(2, 2)))
    # the norm of an operator on an l1-sum is the max over the parts
    assert abs(float(op_norm(T).value) - 1) < 1e-9


@pytest.mark.parametrize("seed", range(4))
def test_exact_norm_against_sampling(seed):
    rng = random.Random(seed)
    X, Y = random_polytopal_space(rng, 3), random_polytopal_space(rng, 3)
    m = [[mpq(rng.randint(-3, 3), rng.randint(1, 3)) for _ in range(X.dim)] for _ in range(Y.dim)]
    T = LinOperator(m, X, Y)
    exact = float(op_norm(T).value)
    brute = brute_op_norm(T, samples=20_000, seed=seed)
    assert brute <= exact + 1e-12
    assert exact - brute < 1e-3
