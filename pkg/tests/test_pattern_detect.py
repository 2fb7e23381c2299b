import time

import pytest
from hypothesis import given, settings, strategies as st

from conftest import group, lattice
from latsieve.catalog_io import builtin_corpus
from latsieve.certify import recheck_embedding
from latsieve.group_core import subgroup_table, subgroups_of
from latsieve.lattice_core import PATTERN_CONTAINS, PATTERN_NAMES, build_lattice, named_pattern
from latsieve.pattern_detect import (
    ABSENT,
    TIMEOUT,
    Embedding,
    detect_l9_direct,
    find_sublattice_embedding,
    freeness_profile,
    is_l9_free,
)

D12_ORDERS = (1, 2, 2, 3, 2, 6, 6, 6, 12)


def test_d12_direct_witness():
    t0 = time.perf_counter()
    emb = detect_l9_direct(lattice("D12"))
    assert time.perf_counter() - t0 < 1.0
    assert emb.pattern.element_names == ("E", "S", "T", "D", "U", "A", "B", "C", "F")
    assert emb.orders() == D12_ORDERS
    assert emb.is_valid() and not recheck_embedding(emb)


def test_d12_generic_witness_matches_orders():
    emb = find_sublattice_embedding(named_pattern("L9"), lattice("D12"))
    assert isinstance(emb, Embedding)
    assert emb.orders() == D12_ORDERS
    assert emb.node_set == detect_l9_direct(lattice("D12")).node_set


def test_d8_uses_all_nodes_for_l10():
    emb = find_sublattice_embedding(named_pattern("L10"), lattice("D8"))
    assert emb.node_set == frozenset(range(10))


@pytest.mark.parametrize("gid", ["Q8", "C6", "C1", "C2xQ8", "M27"])
def test_modular_groups_are_free(gid):
    prof = freeness_profile(group(gid))
    assert all(prof.is_free(p) for p in PATTERN_NAMES)
    assert prof.modular


@pytest.mark.parametrize("gid", ["D8", "S4", "A5"])
def test_all_patterns_witnessed(gid):
    prof = freeness_profile(lattice(gid))
    assert prof.witnessed() == list(PATTERN_NAMES)
    for p in PATTERN_NAMES:
        assert not recheck_embedding(prof.results[p])


def test_timeout_is_not_absent():
    lat = lattice("Q8xC2xC2")
    assert find_sublattice_embedding(named_pattern("L9"), lat, budget_secs=0.0) is TIMEOUT
    assert find_sublattice_embedding(named_pattern("L9"), lat, budget_secs=None) is ABSENT
    with pytest.raises(TimeoutError):
        is_l9_free(lat, budget_secs=0.0)


def test_embedding_repr():
    emb = detect_l9_direct(lattice("D12"))
    assert "L9" in repr(emb) and emb.as_dict()["E"] == 0
    assert repr(ABSENT) == "ABSENT" and repr(TIMEOUT) == "TIMEOUT"


def test_small_lattice_short_circuit():
    assert detect_l9_direct(lattice("C6")) is ABSENT
    assert find_sublattice_embedding(named_pattern("L5"), lattice("C2xC2")) is ABSENT


IDS = builtin_corpus().ids()


@settings(max_examples=25, deadline=None)
@given(gid=st.sampled_from(IDS))
def test_oracles_agree(gid):
    lat = lattice(gid)
    generic = find_sublattice_embedding(named_pattern("L9"), lat, None)
    direct = detect_l9_direct(lat)
    assert (generic is ABSENT) == (direct is ABSENT)
    for e in (generic, direct):
        if e is not ABSENT:
            assert e.is_valid() and not recheck_embedding(e)


@pytest.mark.parametrize("gid", IDS)
def test_pattern_monotonicity(gid):
    prof = freeness_profile(lattice(gid))
    for small, bigger in PATTERN_CONTAINS.items():
        for big in bigger:
            if not prof.is_free(big):
                assert not prof.is_free(small), (small, big)


@pytest.mark.parametrize("gid", ["D12", "S4", "L9example_7_3", "D8xC3", "He3", "D16", "A5"])
def test_subgroup_witnesses_lift(gid):
    # a witness inside a subgroup U is also a witness inside G
    g = group(gid)
    lat = lattice(gid)
    lifted = 0
    for s in subgroups_of(g):
        if s.order == g.order:
            continue
        sub_lat = build_lattice(subgroup_table(g, s))
        emb = detect_l9_direct(sub_lat)
        if emb is ABSENT:
            continue
        nodes = []
        for k in emb.map:
            members = tuple(sorted(s.members[i] for i in sub_lat.nodes[k].members))
            nodes.append(lat.index[members])
        assert Embedding(emb.pattern, lat, tuple(nodes)).is_valid()
        lifted += 1
    assert not is_l9_free(g)
    if gid in ("S4", "D16", "D8xC3"):
        assert lifted > 0
