import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import group
from latsieve import group_core as gc
from latsieve.errors import ClosureTooLarge, ForeignSubgroup, NotAHomomorphism, NotAnAutomorphism, NotPrime


def test_cycle_notation_roundtrip():
    p = gc.parse_cycles("(1 2 3)(5 6)", 6)
    assert p == (1, 2, 0, 3, 5, 4)
    assert gc.format_cycles(p) == "(1 2 3)(5 6)"
    assert gc.format_cycles(tuple(range(4))) == "()"
    with pytest.raises(ValueError):
        gc.parse_cycles("(1 7)", 6)
    with pytest.raises(ValueError):
        gc.parse_cycles("(1 2 1)", 6)


def test_number_theory():
    assert gc.factorize(1026) == {2: 1, 3: 3, 19: 1}
    assert gc.pi_part(1026, [3]) == 27
    assert gc.primes_of(60) == {2, 3, 5}
    assert not gc.is_prime(1) and gc.is_prime(19)


def test_trivial_table():
    t = gc.table_group([[0]])
    assert t.order == 1 and gc.subgroups_of(t) == [t.whole]


def test_bad_tables_rejected():
    with pytest.raises(ValueError):
        gc.table_group([[0, 1], [1, 1]])
    with pytest.raises(ValueError):
        gc.table_group([[1, 0], [0, 1]])


def test_d12_from_generators():
    g = gc.from_generators(6, ["(1 2 3 4 5 6)", "(2 6)(3 5)"], name="D12")
    assert g.order == 12
    assert sorted(np.bincount(g.element_orders).tolist()) == sorted(np.bincount(group("D12").element_orders).tolist())


@pytest.mark.parametrize("gid,count", [("D8", 10), ("Q8", 6), ("D12", 16), ("S4", 30), ("A5", 59), ("C2xC2xC2", 16)])
def test_subgroup_counts(gid, count):
    assert len(gc.subgroups_of(group(gid))) == count


@pytest.mark.parametrize("gid,p,count", [("S4", 2, 3), ("S4", 3, 4), ("A5", 2, 5), ("A5", 3, 10), ("A5", 5, 6),
                                         ("C7_C3", 3, 7), ("A4", 2, 1)])
def test_sylow_counts(gid, p, count):
    syl = gc.sylow(group(gid), p)
    assert len(syl) == count
    assert all(gc.is_hall(group(gid), s) for s in syl)


def test_sylow_needs_prime():
    with pytest.raises(NotPrime):
        gc.sylow(group("S4"), 4)


def test_d8_series():
    g = group("D8")
    z = gc.center(g)
    assert z.order == 2
    assert gc.frattini(g).members == z.members
    assert gc.commutator(g, g.whole, g.whole).members == z.members
    assert gc.o_p(g, 2).order == 8


def test_quotient_s4_by_klein():
    g = group("S4")
    v4 = [s for s in gc.subgroups_of(g) if s.order == 4 and gc.is_normal(g, s)]
    assert len(v4) == 1
    q = gc.quotient(g, v4[0])
    assert q.order == 6 and not gc.center(q).order > 1


def test_normaliser_and_conjugates():
    g = group("S4")
    s3 = [s for s in gc.subgroups_of(g) if s.order == 6]
    assert len(s3) == 4
    assert gc.normalizer(g, s3[0]).members == s3[0].members
    assert len(gc.conjugacy_orbit(g, s3[0])) == 4


def test_semidirect_batten():
    g = group("C19xC27_batten")
    assert g.order == 513 and not gc.is_nilpotent(g)
    assert len(gc.sylow(g, 19)) == 1


def test_bad_action_rejected():
    c3, c7 = gc.cyclic(3), gc.cyclic(7)
    with pytest.raises(NotAnAutomorphism):
        gc.ActionSpec(c3, c7, {1: (0, 2, 1, 3, 4, 5, 6)})
    # x -> x^3 has order 6, which is not compatible with C3
    with pytest.raises(NotAHomomorphism):
        gc.semidirect_product(gc.ActionSpec(c3, c7, {1: tuple(3 * x % 7 for x in range(7))}))


def test_foreign_subgroup():
    with pytest.raises(ForeignSubgroup):
        gc.join(group("D8"), group("Q8").whole)


def test_closure_cap():
    g = gc.direct_product(group("C19xC27_batten"), gc.cyclic(2))
    assert g.order == 1026
    with pytest.raises(ClosureTooLarge):
        gc.direct_product(group("C19xC27_batten"), gc.cyclic(2), max_order=1000)
    big = gc.direct_product(group("Q8"), gc.cyclic(625))
    with pytest.raises(ClosureTooLarge):
        gc.direct_product(big, group("C19xC27_batten"))


def test_subgroup_calculus_dispatch():
    g = group("D8")
    assert gc.subgroup_calculus(g, "center").order == 2
    assert gc.characteristic_series(g, "frattini").order == 2
    with pytest.raises(ValueError):
        gc.subgroup_calculus(g, "nonsense")


CORPUS_SMALL = ["D8", "Q8", "A4", "S4", "D12", "SL2_3", "C7_C3", "C5_C4", "Q8_on_C3sq", "He3", "M16", "Dic3"]


@pytest.mark.parametrize("gid", CORPUS_SMALL)
def test_table_invariants(gid):
    g = group(gid)
    n = g.order
    assert (g.mul[0] == np.arange(n)).all() and (g.mul[:, 0] == np.arange(n)).all()
    assert (g.mul[np.arange(n), g.inv] == 0).all()
    for row in g.mul:
        assert len(set(row.tolist())) == n
    rng = np.random.default_rng(1)
    a, b, c = rng.integers(0, n, size=(3, 500))
    assert (g.mul[g.mul[a, b], c] == g.mul[a, g.mul[b, c]]).all()


@pytest.mark.parametrize("gid", CORPUS_SMALL)
def test_lagrange_everywhere(gid):
    g = group(gid)
    assert all(g.order % s.order == 0 for s in gc.subgroups_of(g))


@pytest.mark.parametrize("gid", ["A4", "SL2_3", "C7_C3", "Q8_on_C3sq", "C19xC27_batten", "S4", "C5_C4", "A4xC5"])
def test_coprime_action_identity(gid):
    g = group(gid)
    for p in gc.primes_of(g.order):
        P = gc.o_p(g, p)
        if P.order == 1:
            continue
        for K in gc.hall(g, gc.primes_of(g.order) - {p}):
            if not gc.normalizes(g, K, P):
                continue
            pk = gc.commutator(g, P, K)
            cp = gc.centralizer(g, K, within=P)
            assert gc.join(g, pk, cp).members == P.members


@settings(max_examples=60, deadline=None)
@given(gid=st.sampled_from(["S4", "D12", "SL2_3", "C2xD8", "Q8_on_C3sq"]), data=st.data())
def test_dedekind_law(gid, data):
    g = group(gid)
    subs = gc.subgroups_of(g)
    z = data.draw(st.sampled_from(subs))
    below = [s for s in subs if s <= z]
    x = data.draw(st.sampled_from(below))
    y = data.draw(st.sampled_from(subs))
    left = gc.product_set(g, x, y) & z.contains
    right = gc.product_set(g, x, gc.meet(g, y, z))
    assert (left == right).all()


@settings(max_examples=40, deadline=None)
@given(a=st.integers(1, 12), b=st.integers(1, 12))
def test_direct_product_of_cyclics(a, b):
    g = gc.direct_product(gc.cyclic(a), gc.cyclic(b))
    assert g.order == a * b
    assert g.whole.is_abelian()
    assert g.whole.is_cyclic() == (np.gcd(a, b) == 1)


@settings(max_examples=40, deadline=None)
@given(gid=st.sampled_from(CORPUS_SMALL), data=st.data())
def test_join_meet_properties(gid, data):
    g = group(gid)
    subs = gc.subgroups_of(g)
    x = data.draw(st.sampled_from(subs))
    y = data.draw(st.sampled_from(subs))
    j, m = gc.join(g, x, y), gc.meet(g, x, y)
    assert x <= j and y <= j and m <= x and m <= y
    assert j.order * m.order >= x.order * y.order
    assert (j.order * m.order == x.order * y.order) == (int(gc.product_set(g, x, y).sum()) == j.order)
