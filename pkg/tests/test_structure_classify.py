import dataclasses
import functools

import numpy as np
import pytest

from conftest import group
from latsieve import group_core as gc
from latsieve.catalog_io import data_file, model_from_file
from latsieve.certify import recheck_certificate, recheck_class_witness
from latsieve.errors import HypothesisUnmet, NotCoprime, NotInvariant
from latsieve.structure_classify import (
    AvoidanceCertificate,
    Block,
    CoprimeActionSystem,
    FL4Holds,
    FL4Inconclusive,
    ModelViolation,
    NotABatten,
    NotABattenGroup,
    action_avoidance,
    batten_factorization,
    batten_kind,
    class_l_membership,
    decomposition_report,
    fl4_check,
    fl4_model,
    is_batten_group,
)


@functools.lru_cache(maxsize=None)
def scalar_c7sq_c6():
    """C7 x C7 with C6 acting by the scalar 3 (a primitive root mod 7)."""
    n = gc.direct_product(gc.cyclic(7), gc.cyclic(7))
    img = tuple((3 * (x // 7) % 7) * 7 + 3 * (x % 7) % 7 for x in range(49))
    return gc.semidirect_product(gc.ActionSpec(gc.cyclic(6), n, {1: img}), name="C7sq_C6")


def _find(g, order, pred=lambda s: True):
    return [s for s in gc.subgroups_of(g) if s.order == order and pred(s)]


def test_non_nilpotent_batten():
    g = group("C19xC27_batten")
    info = batten_kind(g)
    assert info.kind == "non_nilpotent" and (info.q, info.r) == (19, 3)
    assert info.heart.order == 19 and info.top.order == 27
    z = gc.center(g)
    assert z.order == 9
    assert z.members == gc.centralizer(g, info.heart, within=info.top).members
    assert z.members == gc.frattini(g, info.top).members == gc.o_p(g, 3).members
    assert info.describe() == "C19:C27"


@pytest.mark.parametrize("gid,kind", [("C8", "cyclic"), ("Q8", "q8"), ("C7_C3", None), ("S3", None),
                                      ("C2xC2", None), ("C6", None), ("C1", None)])
def test_batten_kind(gid, kind):
    info = batten_kind(group(gid))
    if kind is None:
        assert isinstance(info, NotABatten) and not info
    else:
        assert info.kind == kind


def test_c9_on_c7_with_phi_centralising_is_batten():
    # C7 : C9 with kernel of order 3 equal to the Frattini subgroup of C9
    g = gc.semidirect_product(gc.ActionSpec(gc.cyclic(9), gc.cyclic(7), {1: tuple(2 * x % 7 for x in range(7))}))
    info = batten_kind(g)
    assert info.kind == "non_nilpotent" and info.top.order == 9


def test_batten_factorizations():
    assert isinstance(batten_factorization(group("C2xC2")), NotABattenGroup)
    assert not is_batten_group(group("C2xC2_batten_check"))
    assert [b.describe() for b in batten_factorization(group("C6"))] == ["C2", "C3"]
    assert batten_factorization(group("C1")) == []
    f = batten_factorization(group("C19xC27_batten_x_C2"))
    assert sorted(b.describe() for b in f) == ["C19:C27", "C2"]
    assert [b.describe() for b in batten_factorization(group("Q8xC9"))] == ["Q8", "C9"]


@pytest.mark.parametrize("gid", ["C19xC27_batten", "C19xC27_batten_x_C2", "Q8", "Q8xC9", "C24"])
def test_subgroups_of_battens_are_cyclic_batten_groups(gid):
    g = group(gid)
    for s in gc.subgroups_of(g):
        if s.order == g.order:
            continue
        fac = batten_factorization(g, s)
        assert not isinstance(fac, NotABattenGroup)
        if gid in ("C19xC27_batten", "C24"):
            assert all(b.kind == "cyclic" for b in fac)


def test_a4_std():
    g = group("A4")
    v4 = gc.o_p(g, 2)
    c3 = _find(g, 3)[0]
    cert = action_avoidance(g, batten_kind(g, c3), v4)
    assert cert.type == "std" and not recheck_certificate(g, cert)


def test_q8_type():
    g = group("Q8_on_C3sq")
    p = gc.o_p(g, 3)
    q8 = gc.sylow(g, 2)[0]
    cert = action_avoidance(g, batten_kind(g, q8), p)
    assert cert.type == "q8" and cert.data["faithful"]
    assert not recheck_certificate(g, cert)


def test_hamil_type():
    g = group("SL2_3")
    q8 = gc.o_p(g, 2)
    c3 = gc.sylow(g, 3)[0]
    cert = action_avoidance(g, batten_kind(g, c3), q8)
    assert cert.type == "hamil" and not recheck_certificate(g, cert)


def test_centralizing_and_errors():
    g = group("C6")
    c2, c3 = _find(g, 2)[0], _find(g, 3)[0]
    assert action_avoidance(g, batten_kind(g, c2), c3).type == "centralizes"
    with pytest.raises(NotCoprime):
        action_avoidance(g, batten_kind(g, c2), c2)
    s4 = group("S4")
    c3s = _find(s4, 3)[0]
    c2s = [s for s in _find(s4, 2) if not gc.normalizes(s4, c3s, s)][0]
    with pytest.raises(NotInvariant):
        action_avoidance(s4, batten_kind(s4, c3s), c2s)


def test_non_avoiding_action():
    # C2 inverting one factor of C3 x C3 and fixing the other
    n = gc.direct_product(gc.cyclic(3), gc.cyclic(3))
    img = tuple(((-(x // 3)) % 3) * 3 + x % 3 for x in range(9))
    g = gc.semidirect_product(gc.ActionSpec(gc.cyclic(2), n, {1: img}))
    p = gc.o_p(g, 3)
    c2 = gc.sylow(g, 2)[0]
    res = action_avoidance(g, batten_kind(g, c2), p)
    assert not res and "std" in res.reason
    assert class_l_membership(g).verdict == "NOT_IN_CLASS"


def test_tampered_certificate_is_caught():
    g = group("A4")
    c3 = _find(g, 3)[0]
    cert = action_avoidance(g, batten_kind(g, c3), gc.o_p(g, 2))
    fake = dataclasses.replace(cert, type="cent")
    assert recheck_certificate(g, fake)
    fake = dataclasses.replace(cert, type="centralizes")
    assert recheck_certificate(g, fake)


@pytest.mark.parametrize("gid,n,k", [("A4", 4, 3), ("C19xC27_batten", 19, 27), ("SL2_3", 8, 3),
                                     ("Q8_on_C3sq", 9, 8), ("C7_C3", 7, 3), ("C5_C4", 5, 4)])
def test_in_class(gid, n, k):
    g = group(gid)
    w = class_l_membership(g)
    assert w.verdict == "IN_CLASS"
    assert (w.type.N.order, w.type.K.order) == (n, k)
    assert not recheck_class_witness(g, w)


@pytest.mark.parametrize("gid", ["D12", "D8", "S4", "A5", "L9example_7_3", "He3", "D8xC3"])
def test_not_in_class(gid):
    w = class_l_membership(group(gid))
    assert w.verdict == "NOT_IN_CLASS" and not w.in_class
    assert recheck_class_witness(group(gid), w) == ["not an IN_CLASS witness"]


def test_d12_reasons():
    w = class_l_membership(group("D12"))
    reasons = w.reasons()
    assert len(reasons) == 2 and all("FL1" in r for r in reasons)
    rep = decomposition_report(group("D12"))
    assert rep["verdict"] == "NOT_IN_CLASS" and [c["N"] for c in rep["candidates"]] == [3, 1]


def test_l9example_fails_avoidance():
    # C3 moves one factor of C7 x C7 and fixes the other, and p = 7 is odd
    w = class_l_membership(group("L9example_7_3"), exhaustive=True)
    assert not w.in_class
    assert any("FL2" in r for r in w.reasons())


def test_fl4_enumerates_and_caps():
    g = scalar_c7sq_c6()
    n = gc.o_p(g, 7)
    k = gc.hall(g, [2, 3])[0]
    res = fl4_check(g, n, k)
    assert isinstance(res, FL4Holds) and res.triples > 0
    assert isinstance(fl4_check(g, n, k, triple_cap=1), FL4Inconclusive)
    assert class_l_membership(g).verdict == "IN_CLASS"
    assert class_l_membership(g, triple_cap=1).verdict == "INCONCLUSIVE"


def _schmidt_checks(g, w):
    K = w.type.K
    for p in sorted(w.type.N.primes):
        P = gc.o_p(g, p)
        pk = gc.commutator(g, P, K)
        cpk = gc.centralizer(g, K, within=P)
        assert pk.is_elementary_abelian() or (pk.order == 8 and not pk.is_abelian()) or pk.order == 1
        if pk.order > 1 and cpk.order > 1:
            assert p == 2
        if pk.order > 1 and cpk.order == 1:
            assert pk.members == P.members and P.is_elementary_abelian()
        for L in gc.subgroups_of(g, within=K):
            if gc.is_normal(g, L, within=K):
                assert gc.commutator(g, P, L).members in ((0,), pk.members)


@pytest.mark.parametrize("gid", ["A4", "SL2_3", "Q8_on_C3sq", "C19xC27_batten_x_C2", "C5_C4", "A4xC5", "SL2_3xC5",
                                 "C7_C3xC2", "Dic3", "D10xC3"])
def test_avoiding_actions_shape(gid):
    g = group(gid)
    _schmidt_checks(g, class_l_membership(g))


def test_fl4_model_example():
    sys_ = model_from_file(data_file("fl4_example.grp"))
    assert sys_.generator_orders == (8, 9) and sys_.order == 72
    res = fl4_model(sys_)
    assert isinstance(res, ModelViolation) and res.pi == frozenset({3})
    assert res.detail["order_C_L(J)"] == 3
    assert res.detail["C_H(C_L(J))"] == 1
    assert res.detail["fixed_dims"] == {"pi": 0, "pi'": 0}


def _model(h_y, j=True):
    blocks = [Block("H", 19, 2, (np.array([[18, 0], [0, 18]]), np.array(h_y)))]
    if j:
        blocks.append(Block("J", 5, 2, (np.array([[0, 3], [1, 0]]), np.array([[2, 3], [1, 2]]))))
    return CoprimeActionSystem(("x", "y"), tuple(blocks))


def test_fl4_model_hypotheses():
    with pytest.raises(HypothesisUnmet, match="π"):
        fl4_model(_model([[1, 0], [0, 1]]))
    with pytest.raises(HypothesisUnmet, match="J is trivial"):
        fl4_model(_model([[4, 0], [0, 4]], j=False))
    with pytest.raises(HypothesisUnmet, match="power"):
        fl4_model(_model([[4, 0], [0, 16]]))


def test_model_validation():
    with pytest.raises(ValueError):
        CoprimeActionSystem(("x",), (Block("H", 19, 2, (np.array([[1, 1], [1, 1]]),)),))
    with pytest.raises(ValueError):
        CoprimeActionSystem(("x",), (Block("Q", 19, 1, (np.array([[2]]),)),))
