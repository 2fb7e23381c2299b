import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import group
from latsieve import catalog_io as cio
from latsieve.errors import CacheCorrupt, ParseError
from latsieve.group_core import GroupTable, from_generators
from latsieve.lattice_core import build_lattice
from latsieve.structure_classify import CoprimeActionSystem

DATA_FILES = sorted(cio.DATA_DIR.glob("*.grp"))


def test_trivial_group_text():
    gf = cio.parse_group_file("group T\ntable 1\n0")
    assert gf.build().order == 1


def test_d12_file():
    gf = cio.load_group_file(cio.data_file("D12.grp"))
    g = gf.build()
    assert g.order == 12 and gf.degree == 6 and len(gf.perms) == 2


def test_model_file():
    sys_ = cio.model_from_file(cio.data_file("fl4_example.grp"))
    assert isinstance(sys_, CoprimeActionSystem)
    assert [(b.role, b.p, b.d) for b in sys_.blocks] == [("H", 19, 2), ("J", 5, 2)]


def test_action_file_matches_corpus_batten():
    g = cio.load_group_file(cio.data_file("C19xC27_batten.grp")).build()
    h = group("C19xC27_batten")
    assert g.order == 513
    assert np.array_equal(np.bincount(g.element_orders), np.bincount(h.element_orders))


@pytest.mark.parametrize("path", DATA_FILES, ids=lambda p: p.name)
def test_writer_parser_identity(path):
    text = path.read_text()
    assert cio.write_group_file(cio.parse_group_file(text)) == text


def test_comments_and_blank_lines():
    text = "# header\ngroup C3  # name\n\ndegree 3\nperm (1 2 3)   # rotation\n"
    gf = cio.parse_group_file(text)
    assert gf.build().order == 3
    assert cio.write_group_file(gf) == "group C3\ndegree 3\nperm (1 2 3)\n"


@pytest.mark.parametrize("text,line", [
    ("", 1),
    ("degree 3\n", 1),
    ("group X\ndegree 3\nperm (1 4)\n", 3),
    ("group X\ntable 2\n0 1\n1\n", 4),
    ("group X\ntable 2\n0 1\n", 2),
    ("group X\ntable 1\n0\nfrobnicate\n", 4),
    ("group X\nperm (1 2)\n", 2),
    ("group X\ntable 1\n0\nimage 1 : 0\n", 4),
    ("group X\ntable 1\nzero\n", 3),
    ("group X\nmodel\nblock H 5 1\n", 3),
    ("group X\nmodel\ngens x\nblock K 5 1\n1\n", 4),
])
def test_parse_errors_carry_line_numbers(text, line):
    with pytest.raises(ParseError) as exc:
        cio.parse_group_file(text)
    assert exc.value.line == line


perm_strategy = st.permutations(list(range(6))).map(tuple)


@settings(max_examples=50, deadline=None)
@given(perms=st.lists(perm_strategy, min_size=1, max_size=3))
def test_roundtrip_random_perm_files(perms):
    gf = cio.GroupFile("R", degree=6, perms=list(perms))
    text = cio.write_group_file(gf)
    back = cio.parse_group_file(text)
    assert back == gf and cio.write_group_file(back) == text
    assert back.build().order == from_generators(6, perms).order


@settings(max_examples=30, deadline=None)
@given(n=st.integers(1, 12))
def test_roundtrip_table_files(n):
    rows = [tuple((i + j) % n for j in range(n)) for i in range(n)]
    gf = cio.GroupFile(f"C{n}", table=rows)
    text = cio.write_group_file(gf)
    assert cio.write_group_file(cio.parse_group_file(text)) == text
    assert cio.parse_group_file(text).build().order == n


def test_corpus_manifest(corpus):
    ids = corpus.ids()
    assert len(ids) >= 30 and len(set(ids)) == len(ids)
    assert corpus.version == cio.CORPUS_VERSION
    for gid, order in [("D12", 12), ("Q8_on_C3sq", 72), ("L9example_7_3", 147), ("SL2_3", 24),
                       ("C19xC27_batten_x_C2", 1026), ("A5", 60)]:
        assert corpus[gid].expected_order == order
    for n in range(1, 25):
        assert f"C{n}" in corpus
    assert all("theorem" in e.tags for e in corpus.entries)
    assert max(e.expected_order for e in corpus.entries) <= 1200


def test_corpus_constructs(corpus):
    for e in corpus.entries:
        assert group(e.id).order == e.expected_order


def test_coprime_pairs(corpus):
    pairs = cio.coprime_pairs_in(corpus)
    assert len(pairs) >= 5
    for pid, a, b in pairs:
        assert math.gcd(corpus[a].expected_order, corpus[b].expected_order) == 1
        assert corpus[pid].expected_order == corpus[a].expected_order * corpus[b].expected_order


def test_read_input(tmp_path):
    assert cio.read_input("builtin:S3").order == 6
    with pytest.raises(KeyError):
        cio.read_input("builtin:nope")
    p = tmp_path / "x.grp"
    p.write_text("group X\ndegree 4\nperm (1 2 3 4)\n")
    assert cio.read_input(str(p)).order == 4


# --------------------------------------------------------------------------
# cache


def _same(a, b):
    assert [n.members for n in a.nodes] == [n.members for n in b.nodes]
    assert np.array_equal(a.meet_table, b.meet_table) and np.array_equal(a.join_table, b.join_table)


def test_cache_cold_then_warm(tmp_path):
    g = group("D12")
    cold = cio.lattice_cache(tmp_path, g)
    path = cio.cache_path(tmp_path, g)
    text = path.read_text()
    assert text.startswith(f"latcache v1 {g.digest} 12 16\n")
    warm = cio.lattice_cache(tmp_path, g)
    _same(cold, warm)
    assert path.read_text() == text
    assert cio.serialize_lattice(warm) == text


@pytest.mark.parametrize("gid", ["S4", "SL2_3", "A5", "C19xC27_batten"])
def test_cache_roundtrip_equals_fresh(gid, tmp_path):
    g = group(gid)
    fresh = build_lattice(g)
    cio.lattice_cache(tmp_path, g)
    _same(cio.lattice_cache(tmp_path, g), fresh)


@pytest.mark.parametrize("damage", ["truncate", "header", "member", "table"])
def test_corrupt_cache_rebuilds(damage, tmp_path):
    g = group("D12")
    cio.lattice_cache(tmp_path, g)
    path = cio.cache_path(tmp_path, g)
    good = path.read_text()
    lines = good.split("\n")
    if damage == "truncate":
        bad = "\n".join(lines[:5])
    elif damage == "header":
        bad = good.replace("latcache v1", "latcache v9", 1)
    elif damage == "member":
        lines[3] = lines[3].rsplit(" ", 1)[0] + " 7"
        bad = "\n".join(lines)
    else:
        lines[-3] = lines[-3].replace("0,", "1,", 1)
        bad = "\n".join(lines)
    with pytest.raises(CacheCorrupt):
        cio.deserialize_lattice(bad, g)
    path.write_text(bad)
    lat = cio.lattice_cache(tmp_path, g)
    assert lat.size == 16
    assert path.read_text() == good


def test_cache_key_follows_table_not_name(tmp_path):
    g = group("S3")
    renamed = GroupTable(g.mul, g.inv, g.labels, "another name")
    assert renamed.digest == g.digest
    # relabel two elements: a different table of the same group
    perm = np.arange(6)
    perm[[1, 2]] = perm[[2, 1]]
    inv_perm = np.argsort(perm)
    mul = perm[g.mul[np.ix_(inv_perm, inv_perm)]]
    other = GroupTable(mul, perm[g.inv[inv_perm]], g.labels, "S3")
    assert other.digest != g.digest
    cio.lattice_cache(tmp_path, g)
    cio.lattice_cache(tmp_path, other)
    assert len(list(tmp_path.glob("*.latcache"))) == 2


def test_cache_dir_from_environment(monkeypatch, tmp_path):
    monkeypatch.setenv("LATSIEVE_CACHE", str(tmp_path / "c"))
    assert cio.default_cache_dir() == tmp_path / "c"
    monkeypatch.delenv("LATSIEVE_CACHE")
    assert str(cio.default_cache_dir()) == ".latsieve-cache"
