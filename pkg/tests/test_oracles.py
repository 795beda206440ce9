import itertools
import json

import pytest
from gmpy2 import mpq

from hbops.bodies import IntersectPoly, PBall, Scale, SpaceHandle, SumInf, SumOne
from hbops.hahn_banach import ExtensionCertificate
from hbops.lp import LPProblem
from hbops.operators import LinOperator, identity
from hbops.oracles import (
    brute_certificate_norm,
    brute_f,
    brute_op_norm,
    compare,
    enumerate_basic_points,
)

S = SpaceHandle


def test_brute_f_examples():
    assert brute_f(S(PBall(3, "inf"))) == 2
    assert brute_f(S(SumOne((PBall(2, 1), PBall(2, 1))))) == 3
    assert brute_f(S(SumInf((PBall(2, 1), PBall(1, 1))))) == 2


def test_brute_op_norm_examples():
    assert abs(brute_op_norm(identity(S(PBall(2, "inf")), S(PBall(2, 1)))) - 2) < 1e-3
    remark = identity(S(PBall(3, 1)), S(IntersectPoly((Scale(mpq(11, 10), PBall(3, 1)), PBall(3, "inf")))))
    v = brute_op_norm(remark)
    assert v <= 1 and 1 - v < 1e-3


def test_brute_op_norm_is_reproducible():
    T = LinOperator([[1, 2], [3, -1]], S(PBall(2, 2)), S(PBall(2, 3)))
    assert brute_op_norm(T, samples=5000, seed=3) == brute_op_norm(T, samples=5000, seed=3)


def test_brute_certificate_norm_examples():
    l1 = S(PBall(2, 1))
    T = LinOperator([[1, 1], [0, 0]], l1, l1)
    single = ExtensionCertificate(atoms=(((1, 1), (1, 0)),), operator=T, rank=1)
    assert brute_certificate_norm(single) == 1
    v = (mpq(1, 2), mpq(1, 4))
    T2 = LinOperator([[1, 0], [mpq(1, 2), 0]], l1, l1)
    twin = ExtensionCertificate(atoms=(((1, 1), v), ((1, -1), v)), operator=T2, rank=1)
    assert brute_certificate_norm(twin) == 2 * (mpq(1, 2) + mpq(1, 4))
    many = ExtensionCertificate(atoms=(((1, 1), (1, 0)),) * 17, operator=T, rank=1)
    with pytest.raises(ValueError):
        brute_certificate_norm(many)


def test_enumerate_basic_points_examples():
    square = LPProblem(c=[1, 1], A_ub=[[1, 0], [-1, 0], [0, 1], [0, -1]], b_ub=[1, 1, 1, 1])
    assert len(enumerate_basic_points(square)) == 4
    octa = LPProblem(c=[0, 0, 0], A_ub=[list(s) for s in itertools.product((1, -1), repeat=3)], b_ub=[1] * 8)
    assert len(enumerate_basic_points(octa)) == 6
    with pytest.raises(ValueError):
        enumerate_basic_points(LPProblem(c=[0] * 13))


def test_report_json_lines():
    r = compare("f", 2, 2, "cube")
    assert r.agree
    line = json.loads(r.to_json_line())
    assert line == {"quantity": "f", "fast": "2", "oracle": "2", "agree": True, "instance": "cube"}
    assert not compare("norm", mpq(1, 3), mpq(1, 2), "x").agree
    assert compare("norm", 1.0, 1.0 + 1e-13, "x", tol=1e-12).agree
