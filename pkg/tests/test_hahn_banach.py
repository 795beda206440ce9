import random

import pytest
from gmpy2 import mpq

from hbops import exactnum as xn
from hbops.bodies import IntersectPoly, PBall, Scale, SpaceHandle, SumInf, SumOne, norm
from hbops.corpus import random_polytopal_space, random_rank1
from hbops.hahn_banach import (
    ExtensionCertificate,
    IsHB,
    LowerBoundOnly,
    NotHB,
    RankOutOfRange,
    construct_rank_k,
    corollary_max_rank,
    embed_linf,
    extension_norm,
    hb_lower_bound,
    is_hahn_banach,
    min_extension_norm,
    theorem1_verify,
    verify_certificate,
)
from hbops.operators import LinOperator, identity, op_norm, scale

S = SpaceHandle
L1_2, L2_2, LINF_3 = S(PBall(2, 1)), S(PBall(2, 2)), S(PBall(3, "inf"))
REMARK_Y = S(IntersectPoly((Scale(mpq(11, 10), PBall(3, 1)), PBall(3, "inf"))))
REMARK_T = identity(S(PBall(3, 1)), REMARK_Y)


def test_embed_linf_examples():
    e = embed_linf(LINF_3)
    assert e.N == 3 and set(e.coordinates) == {xn.unit(3, i) for i in range(3)}
    e = embed_linf(L1_2)
    assert e.N == 2 and set(e.coordinates) == {(1, 1), (1, -1)}
    with pytest.raises(ValueError):
        embed_linf(L2_2)


@pytest.mark.parametrize("seed", range(5))
def test_embed_linf_is_isometric(seed):
    rng = random.Random(seed)
    X = random_polytopal_space(rng, 4)
    e = embed_linf(X)
    for _ in range(100):
        x = [mpq(rng.randint(-9, 9), rng.randint(1, 7)) for _ in range(X.dim)]
        assert max(abs(a) for a in e(x)) == norm(X, x)


def test_min_extension_examples():
    assert min_extension_norm(identity(LINF_3, LINF_3)) == 1
    value = min_extension_norm(REMARK_T)
    assert value > 1
    assert value == mpq(15, 11)


def test_remark_value_against_float_lp():
    # the HiGHS path uses exact vertex sets for polytopal sides
    assert abs(hb_lower_bound(REMARK_T, 8) - 15 / 11) < 1e-9


@pytest.mark.parametrize("seed", range(5))
def test_rank1_is_hb(seed):
    rng = random.Random(seed)
    X, Y = random_polytopal_space(rng, 3), random_polytopal_space(rng, 3)
    T = random_rank1(rng, X, Y)
    v = is_hahn_banach(T)
    assert isinstance(v, IsHB)
    assert v.norm == op_norm(T).value


def test_is_hb_extension_invariants():
    T, _ = construct_rank_k(L1_2, L1_2, 2)
    v = is_hahn_banach(T)
    assert isinstance(v, IsHB)
    assert xn.matmul(v.extension, v.embedding.coordinates) == T.matrix
    N = v.embedding.N
    ext_op = LinOperator(v.extension, S(PBall(N, "inf")), T.codomain)
    assert op_norm(ext_op).value == op_norm(T).value == extension_norm(v.extension, T.codomain)


def test_remark_verdict_and_scaling():
    v = is_hahn_banach(REMARK_T)
    assert isinstance(v, NotHB)
    assert v.gap == mpq(4, 11)
    for alpha in (mpq(3), mpq(-1, 2)):
        w = is_hahn_banach(scale(REMARK_T, alpha))
        assert isinstance(w, NotHB)
        assert w.min_extension_norm == abs(alpha) * v.min_extension_norm


def test_smooth_domain_gives_lower_bound():
    v = is_hahn_banach(identity(L2_2, L2_2), net_size=8)
    assert isinstance(v, LowerBoundOnly)
    assert v.bound > 1.2


def test_hb_lower_bound_examples():
    T = identity(L2_2, L2_2)
    vals = [hb_lower_bound(T, n) for n in (8, 32)]
    assert vals[0] <= vals[1]
    assert hb_lower_bound(identity(S(PBall(1, 2)), S(PBall(1, 2))), 1) == 1
    R = LinOperator([[1, 2], [2, 4]], L2_2, L2_2)
    assert hb_lower_bound(R, 32) <= float(op_norm(R).value) + 1e-9
    with pytest.raises(ValueError):
        hb_lower_bound(T, 1)


def test_lower_bound_matches_exact_on_polytopes():
    T, _ = construct_rank_k(L1_2, S(PBall(2, "inf")), 2)
    assert abs(hb_lower_bound(T, 8) - float(min_extension_norm(T))) < 1e-9


def test_theorem1_remark():
    rep = theorem1_verify(REMARK_T)
    assert rep.passed and rep.rank == 3
    assert len(rep.checks) == 6
    assert all(c.support_dim == 2 and c.d == 2 for c in rep.checks)
    assert "only" in rep.note


def test_theorem1_requires_norm_one():
    with pytest.raises(ValueError, match="rescale"):
        theorem1_verify(scale(REMARK_T, 2))


def test_theorem1_rank1():
    T = LinOperator([[1, 0], [0, 0]], L1_2, L1_2)
    assert theorem1_verify(T).passed


def test_corollary_examples():
    assert corollary_max_rank(L2_2, L2_2) == 1
    assert corollary_max_rank(L1_2, L1_2) == 2
    assert corollary_max_rank(S(PBall(4, 2)), S(SumInf((PBall(2, 2), PBall(2, 2))))) == 3


def test_construct_examples():
    T, c = construct_rank_k(L2_2, L2_2, 1)
    assert T.rank == 1 and len(c.atoms) == 1
    T, c = construct_rank_k(L1_2, L1_2, 2)
    assert T.rank == 2 and verify_certificate(c).ok
    assert isinstance(is_hahn_banach(T), IsHB)
    X = S(SumOne((PBall(2, 2), PBall(2, 2))))
    T, c = construct_rank_k(X, S(PBall(4, 2)), 3)
    check = verify_certificate(c)
    assert T.rank == 3 and check.ok
    assert float(check.norm_value) <= 1 + 1e-9


def test_construct_refuses_beyond_corollary():
    with pytest.raises(RankOutOfRange, match="min\\(dim X, dim Y, f\\(X\\*\\) \\+ f\\(Y\\) \\+ 1\\) = 1"):
        construct_rank_k(L2_2, L2_2, 2)
    with pytest.raises(RankOutOfRange):
        construct_rank_k(L1_2, L1_2, 0)


def test_construct_non_cube_targets():
    # Q_2 targets outside the Y cube need alpha < 1 here
    T, c = construct_rank_k(S(PBall(4, 1)), S(PBall(4, mpq(5, 4))), 4)
    assert verify_certificate(c).ok and T.rank == 4


def test_construct_small_k_branch():
    # k <= m + 1: only nu_0 ... nu_{k-1} are used, Q_1 is a single atom
    T, c = construct_rank_k(S(PBall(4, 1)), S(PBall(4, "inf")), 2)
    assert T.rank == 2 and verify_certificate(c).ok
    assert len(c.atoms) == 1 + 2


def test_smooth_codomain_verdict_needs_certificate():
    T, c = construct_rank_k(S(PBall(3, 1)), S(PBall(3, 2)), 3)
    assert isinstance(is_hahn_banach(T, net_size=8), LowerBoundOnly)
    v = is_hahn_banach(T, certificate=c)
    assert isinstance(v, IsHB)
    assert xn.matmul(v.extension, v.embedding.coordinates) == T.matrix


def test_certificate_examples():
    p = (1, 1)  # on the unit sphere of linf^2, the dual of l1^2
    y = (1, 0)
    T = LinOperator([[1, 1], [0, 0]], L1_2, L1_2)
    good = ExtensionCertificate(atoms=((p, y),), operator=T, rank=1)
    res = verify_certificate(good)
    assert res.ok and res.norm_value == 1
    T2 = LinOperator([[2, 2], [0, 0]], L1_2, L1_2)
    bad = ExtensionCertificate(atoms=((p, (2, 0)),), operator=T2, rank=1)
    res = verify_certificate(bad)
    assert not res.ok and res.norm_value == 2
    assert any("expected 1" in msg for msg in res.problems)


def test_certificate_detects_wrong_restriction_and_rank():
    T = LinOperator([[1, 1], [0, 0]], L1_2, L1_2)
    c = ExtensionCertificate(atoms=(((1, 1), (1, 0)),), operator=LinOperator([[1, 0], [0, 0]], L1_2, L1_2), rank=1)
    assert not verify_certificate(c).ok
    c = ExtensionCertificate(atoms=(((1, 1), (1, 0)),), operator=T, rank=2)
    assert any("rank" in m for m in verify_certificate(c).problems)
    c = ExtensionCertificate(atoms=(((2, 0), (mpq(1, 2), 0)),), operator=T, rank=1)
    assert any("dual unit sphere" in m for m in verify_certificate(c).problems)
