"""Group definition files, the built-in corpus and the on-disk lattice cache.

File grammar (``#`` starts a comment, blank lines are ignored)::

    group <name>
    degree <n>                  # permutation body ...
    perm (1 2 3)(4 5)           # ... one line per generator, 1-based points
    table <n>                   # ... or an explicit 0-based Cayley table
    <n rows of n indices>
    action cyclic <m>           # optional: body ⋊ acting group
    action table <m>            #   acting group as a Cayley table
    <m rows>
    image <k> : <images...>     #   body element images under generator k
    model                       # optional coprime linear action model
    gens x y
    block H|J <p> <d>
    <d rows per generator>
"""

from __future__ import annotations

import math
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from .errors import CacheCorrupt, ParseError
from .group_core import (
    DEFAULT_ORDER_CAP,
    DEFAULT_SUBGROUP_CAP,
    ActionSpec,
    GroupTable,
    SubgroupSet,
    automorphism_from_images,
    cyclic,
    direct_product,
    format_cycles,
    from_generators,
    parse_cycles,
    semidirect_product,
    table_group,
)
from .lattice_core import SubgroupLattice, build_lattice
from .structure_classify import Block, CoprimeActionSystem

CORPUS_VERSION = "latsieve-corpus/1"
DATA_DIR = Path(__file__).parent / "data"


# --------------------------------------------------------------------------
# group files


@dataclass
class ActionSection:
    acting_kind: str  # "cyclic" or "table"
    acting_order: int
    acting_rows: list[tuple[int, ...]] = field(default_factory=list)
    images: dict[int, tuple[int, ...]] = field(default_factory=dict)


@dataclass
class ModelSection:
    gens: tuple[str, ...]
    blocks: list[tuple[str, int, int, list[list[list[int]]]]] = field(default_factory=list)


@dataclass
class GroupFile:
    name: str
    degree: int | None = None
    perms: list[tuple[int, ...]] = field(default_factory=list)
    table: list[tuple[int, ...]] | None = None
    action: ActionSection | None = None
    model: ModelSection | None = None

    @property
    def has_body(self) -> bool:
        return self.degree is not None or self.table is not None

    def body_group(self, max_order: int = DEFAULT_ORDER_CAP) -> GroupTable:
        if self.degree is not None:
            return from_generators(self.degree, self.perms, name=self.name, max_order=max_order)
        if self.table is not None:
            return table_group(self.table, name=self.name)
        raise ValueError(f"{self.name} has no group body")

    def build(self, max_order: int = DEFAULT_ORDER_CAP) -> GroupTable:
        """The group described: the body, or body ⋊ acting group if there is an action section."""
        body = self.body_group(max_order)
        if self.action is None:
            return body
        a = self.action
        if a.acting_kind == "cyclic":
            acting = cyclic(a.acting_order)
        else:
            acting = table_group(a.acting_rows, name="K")
        return semidirect_product(ActionSpec(acting, body, dict(a.images)), name=self.name, max_order=max_order)

    def model_system(self) -> CoprimeActionSystem:
        if self.model is None:
            raise ValueError(f"{self.name} has no model section")
        blocks = tuple(
            Block(role, p, d, tuple(np.array(m, dtype=np.int64) for m in mats))
            for role, p, d, mats in self.model.blocks
        )
        return CoprimeActionSystem(self.model.gens, blocks)


def _ints(tokens, lineno) -> list[int]:
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise ParseError(f"expected integers, got {' '.join(tokens)!r}", lineno) from None


def parse_group_file(text: str) -> GroupFile:
    lines = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append((lineno, line))
    pos = 0

    def take_rows(count, width, what, start_line):
        nonlocal pos
        rows = []
        for _ in range(count):
            if pos >= len(lines):
                raise ParseError(f"{what}: expected {count} rows, file ended", start_line)
            ln, line = lines[pos]
            row = _ints(line.split(), ln)
            if len(row) != width:
                raise ParseError(f"{what}: expected {width} entries, got {len(row)}", ln)
            rows.append(tuple(row))
            pos += 1
        return rows

    if not lines:
        raise ParseError("empty file", 1)
    ln, line = lines[0]
    head = line.split()
    if head[0] != "group" or len(head) != 2:
        raise ParseError("file must start with 'group <name>'", ln)
    gf = GroupFile(name=head[1])
    pos = 1
    while pos < len(lines):
        ln, line = lines[pos]
        tok = line.split()
        word = tok[0]
        pos += 1
        if word == "degree":
            if gf.has_body or len(tok) != 2:
                raise ParseError("unexpected 'degree'", ln)
            gf.degree = _ints(tok[1:], ln)[0]
            if gf.degree < 1:
                raise ParseError("degree must be positive", ln)
        elif word == "perm":
            if gf.degree is None:
                raise ParseError("'perm' before 'degree'", ln)
            try:
                gf.perms.append(parse_cycles(line[4:].strip(), gf.degree))
            except ValueError as exc:
                raise ParseError(str(exc), ln) from None
        elif word == "table":
            if gf.has_body or len(tok) != 2:
                raise ParseError("unexpected 'table'", ln)
            n = _ints(tok[1:], ln)[0]
            gf.table = take_rows(n, n, "table", ln)
        elif word == "action":
            if gf.action is not None or len(tok) != 3 or tok[1] not in ("cyclic", "table"):
                raise ParseError("expected 'action cyclic <m>' or 'action table <m>'", ln)
            m = _ints(tok[2:], ln)[0]
            gf.action = ActionSection(tok[1], m)
            if tok[1] == "table":
                gf.action.acting_rows = take_rows(m, m, "acting table", ln)
        elif word == "image":
            if gf.action is None:
                raise ParseError("'image' outside an action section", ln)
            if len(tok) < 3 or tok[2] != ":":
                raise ParseError("expected 'image <k> : <images...>'", ln)
            k = _ints(tok[1:2], ln)[0]
            gf.action.images[k] = tuple(_ints(tok[3:], ln))
        elif word == "model":
            if gf.model is not None or len(tok) != 1:
                raise ParseError("unexpected 'model'", ln)
            gf.model = ModelSection(())
        elif word == "gens":
            if gf.model is None:
                raise ParseError("'gens' outside a model section", ln)
            gf.model.gens = tuple(tok[1:])
        elif word == "block":
            if gf.model is None or not gf.model.gens:
                raise ParseError("'block' needs a model section with 'gens'", ln)
            if len(tok) != 4 or tok[1] not in ("H", "J"):
                raise ParseError("expected 'block H|J <p> <d>'", ln)
            p, d = _ints(tok[2:], ln)
            rows = take_rows(d * len(gf.model.gens), d, "block", ln)
            mats = [[list(r) for r in rows[i * d:(i + 1) * d]] for i in range(len(gf.model.gens))]
            gf.model.blocks.append((tok[1], p, d, mats))
        else:
            raise ParseError(f"unknown directive {word!r}", ln)
    if not gf.has_body and gf.model is None:
        raise ParseError("no group body and no model section", lines[0][0])
    return gf


def write_group_file(gf: GroupFile) -> str:
    out = [f"group {gf.name}"]
    if gf.degree is not None:
        out.append(f"degree {gf.degree}")
        out.extend(f"perm {format_cycles(p)}" for p in gf.perms)
    if gf.table is not None:
        out.append(f"table {len(gf.table)}")
        out.extend(" ".join(map(str, row)) for row in gf.table)
    if gf.action is not None:
        a = gf.action
        out.append(f"action {a.acting_kind} {a.acting_order}")
        if a.acting_kind == "table":
            out.extend(" ".join(map(str, row)) for row in a.acting_rows)
        for k in sorted(a.images):
            out.append(f"image {k} : " + " ".join(map(str, a.images[k])))
    if gf.model is not None:
        out.append("model")
        out.append("gens " + " ".join(gf.model.gens))
        for role, p, d, mats in gf.model.blocks:
            out.append(f"block {role} {p} {d}")
            for m in mats:
                out.extend(" ".join(map(str, row)) for row in m)
    return "\n".join(out) + "\n"


def load_group_file(path) -> GroupFile:
    return parse_group_file(Path(path).read_text(encoding="utf-8"))


def data_file(name: str) -> Path:
    return DATA_DIR / name


# --------------------------------------------------------------------------
# constructors used by the corpus


def dihedral(m: int, name: str | None = None) -> GroupTable:
    """Symmetries of an ``m``-gon, order ``2m``."""
    rot = "(" + " ".join(str(i) for i in range(1, m + 1)) + ")"
    refl = "".join(f"({i} {m + 2 - i})" for i in range(2, m + 1) if i < m + 2 - i)
    return from_generators(m, [rot, refl or "()"], name=name or f"D{2 * m}")


def dicyclic(n: int, name: str | None = None) -> GroupTable:
    """``<a, x | a^(2n) = 1, x^2 = a^n, a^x = a^-1>``; element ``a^k x^j`` has index ``j*2n + k``."""
    m = 2 * n
    size = 2 * m
    rows = np.empty((size, size), dtype=np.int64)
    for j1 in range(2):
        for k1 in range(m):
            for j2 in range(2):
                for k2 in range(m):
                    if j1 == 0:
                        k, j = (k1 + k2) % m, j2
                    elif j2 == 0:
                        k, j = (k1 - k2) % m, 1
                    else:
                        k, j = (k1 - k2 + n) % m, 0
                    rows[j1 * m + k1, j2 * m + k2] = j * m + k
    labels = [("a^%d" % k if k > 1 else ("a" if k == 1 else "")) + ("x" if j else "") or "1"
              for j in range(2) for k in range(m)]
    return table_group(rows, name=name or (f"Q{size}" if n & (n - 1) == 0 else f"Dic{n}"), labels=labels)


def power_map_action(k: GroupTable, n_order: int, exponent: int) -> dict[int, tuple[int, ...]]:
    """Generator images for a cyclic ``k`` acting on ``C_n`` by ``x -> x^exponent``."""
    return {1: tuple(exponent * x % n_order for x in range(n_order))}


def _sd_cyclic(n: int, m: int, e: int, name: str) -> GroupTable:
    return semidirect_product(ActionSpec(cyclic(m), cyclic(n), power_map_action(cyclic(m), n, e)), name=name)


def _l9_example() -> GroupTable:
    n = direct_product(cyclic(7), cyclic(7), name="C7xC7")
    img = tuple((2 * (x // 7) % 7) * 7 + x % 7 for x in range(49))
    return semidirect_product(ActionSpec(cyclic(3), n, {1: img}), name="L9example_7_3")


def _q8_on_c3sq() -> GroupTable:
    n = direct_product(cyclic(3), cyclic(3), name="C3xC3")
    k = dicyclic(2)
    i_mat = np.array([[0, 2], [1, 0]])
    j_mat = np.array([[1, 1], [1, 2]])

    def perm(mat):
        out = []
        for x in range(9):
            v = np.array([x // 3, x % 3])
            w = mat @ v % 3
            out.append(int(w[0] * 3 + w[1]))
        return tuple(out)

    return semidirect_product(ActionSpec(k, n, {1: perm(i_mat), 4: perm(j_mat)}), name="Q8_on_C3sq")


def _sl2_3() -> GroupTable:
    q8 = dicyclic(2)
    a, x = 1, 4
    sigma = automorphism_from_images(q8, [a, x], [x, int(q8.mul[a, x])])
    return semidirect_product(ActionSpec(cyclic(3), q8, {1: sigma}), name="SL2_3")


def _he3() -> GroupTable:
    n = direct_product(cyclic(3), cyclic(3))
    img = tuple(((x // 3 + x % 3) % 3) * 3 + x % 3 for x in range(9))
    return semidirect_product(ActionSpec(cyclic(3), n, {1: img}), name="He3")


def _c19_c27() -> GroupTable:
    return _sd_cyclic(19, 27, 7, "C19xC27_batten")


def _dp(*parts: Callable[[], GroupTable], name: str) -> Callable[[], GroupTable]:
    def build():
        g = parts[0]()
        for p in parts[1:]:
            g = direct_product(g, p())
        return GroupTable(g.mul, g.inv, g.labels, name)

    return build


def _perm(degree: int, gens: list[str], name: str) -> Callable[[], GroupTable]:
    return lambda: from_generators(degree, gens, name=name)


def _cyc(n):
    return lambda: cyclic(n)


# --------------------------------------------------------------------------
# corpus


@dataclass(frozen=True)
class CorpusEntry:
    id: str
    recipe: str
    expected_order: int
    tags: tuple[str, ...]
    build: Callable[[], GroupTable] = field(repr=False, compare=False)


@dataclass(frozen=True)
class CorpusManifest:
    version: str
    entries: tuple[CorpusEntry, ...]

    def ids(self) -> list[str]:
        return [e.id for e in self.entries]

    def __getitem__(self, gid: str) -> CorpusEntry:
        for e in self.entries:
            if e.id == gid:
                return e
        raise KeyError(gid)

    def __contains__(self, gid: str) -> bool:
        return any(e.id == gid for e in self.entries)

    def tagged(self, tag: str) -> list[CorpusEntry]:
        return [e for e in self.entries if tag in e.tags]


# coprime direct products: (product id, left id, right id)
COPRIME_PAIRS = (
    ("S3xC5", "S3", "C5"),
    ("D8xC3", "D8", "C3"),
    ("A4xC5", "A4", "C5"),
    ("C7_C3xC2", "C7_C3", "C2"),
    ("D10xC3", "D10", "C3"),
    ("Q8xC9", "Q8", "C9"),
    ("SL2_3xC5", "SL2_3", "C5"),
    ("C19xC27_batten_x_C2", "C19xC27_batten", "C2"),
)


def builtin_corpus() -> CorpusManifest:
    e: list[CorpusEntry] = []

    def add(gid, recipe, order, build, *tags):
        e.append(CorpusEntry(gid, recipe, order, ("theorem",) + tags, build))

    two_groups = {1, 2, 4, 8, 16}
    for n in range(1, 25):
        tags = ["pgroup"] if n in two_groups or n in (3, 9, 27) else []
        add(f"C{n}", f"cyclic {n}", n, _cyc(n), *tags)
    add("C27", "cyclic 27", 27, _cyc(27), "pgroup")
    add("C2xC2", "C2 x C2", 4, _dp(_cyc(2), _cyc(2), name="C2xC2"), "pgroup")
    add("C2xC2xC2", "C2 x C2 x C2", 8, _dp(_cyc(2), _cyc(2), _cyc(2), name="C2xC2xC2"), "pgroup")
    add("C3xC3", "C3 x C3", 9, _dp(_cyc(3), _cyc(3), name="C3xC3"), "pgroup")
    add("C5xC5", "C5 x C5", 25, _dp(_cyc(5), _cyc(5), name="C5xC5"))
    add("C4xC2", "C4 x C2", 8, _dp(_cyc(4), _cyc(2), name="C4xC2"), "pgroup")
    add("C3xC9", "C3 x C9", 27, _dp(_cyc(3), _cyc(9), name="C3xC9"), "pgroup")
    add("D8", "symmetries of a square", 8, lambda: dihedral(4, "D8"), "pgroup")
    add("Q8", "dicyclic n=2", 8, lambda: dicyclic(2, "Q8"), "pgroup", "batten")
    add("D16", "symmetries of an octagon", 16, lambda: dihedral(8, "D16"), "pgroup")
    add("Q16", "dicyclic n=4", 16, lambda: dicyclic(4, "Q16"), "pgroup")
    add("M16", "C8 : C2, x -> x^5", 16, lambda: _sd_cyclic(8, 2, 5, "M16"), "pgroup")
    add("C2xQ8", "C2 x Q8", 16, _dp(_cyc(2), lambda: dicyclic(2), name="C2xQ8"), "pgroup")
    add("C2xD8", "C2 x D8", 16, _dp(_cyc(2), lambda: dihedral(4), name="C2xD8"), "pgroup")
    add("Q8xC2xC2", "Q8 x C2 x C2", 32, _dp(lambda: dicyclic(2), _cyc(2), _cyc(2), name="Q8xC2xC2"), "pgroup")
    add("He3", "C3^2 : C3 (Heisenberg)", 27, _he3, "pgroup")
    add("M27", "C9 : C3, x -> x^4", 27, lambda: _sd_cyclic(9, 3, 4, "M27"), "pgroup")
    add("S3", "symmetries of a triangle", 6, lambda: dihedral(3, "S3"))
    add("D10", "symmetries of a pentagon", 10, lambda: dihedral(5, "D10"))
    add("D12", "symmetries of a hexagon", 12, _perm(6, ["(1 2 3 4 5 6)", "(2 6)(3 5)"], "D12"))
    add("Dic3", "dicyclic n=3", 12, lambda: dicyclic(3, "Dic3"))
    add("A4", "even permutations of 4 points", 12, _perm(4, ["(1 2 3)", "(1 2)(3 4)"], "A4"))
    add("S4", "all permutations of 4 points", 24, _perm(4, ["(1 2 3 4)", "(1 2)"], "S4"))
    add("A5", "even permutations of 5 points", 60, _perm(5, ["(1 2 3 4 5)", "(1 2 3)"], "A5"))
    add("C7_C3", "C7 : C3, x -> x^2", 21, lambda: _sd_cyclic(7, 3, 2, "C7_C3"))
    add("C5_C4", "C5 : C4, x -> x^2", 20, lambda: _sd_cyclic(5, 4, 2, "C5_C4"))
    add("L9example_7_3", "(C7 x C7) : C3 moving one factor", 147, _l9_example, "l9example")
    add("Q8_on_C3sq", "(C3 x C3) : Q8, faithful", 72, _q8_on_c3sq)
    add("SL2_3", "Q8 : C3 cycling i, j, k", 24, _sl2_3)
    add("C19xC27_batten", "C19 : C27, x -> x^7", 513, _c19_c27, "batten")
    add("C19xC27_batten_x_C2", "(C19 : C27) x C2", 1026,
        _dp(_c19_c27, _cyc(2), name="C19xC27_batten_x_C2"), "coprime_product", "batten")
    add("C2xC2_batten_check", "C2 x C2 (not a batten group)", 4,
        _dp(_cyc(2), _cyc(2), name="C2xC2_batten_check"), "batten")
    simple = {"S3": lambda: dihedral(3), "D8": lambda: dihedral(4), "A4": _perm(4, ["(1 2 3)", "(1 2)(3 4)"], "A4"),
              "C7_C3": lambda: _sd_cyclic(7, 3, 2, "C7_C3"), "D10": lambda: dihedral(5),
              "Q8": lambda: dicyclic(2), "SL2_3": _sl2_3}
    for pid, left, right in COPRIME_PAIRS:
        if pid in [x.id for x in e]:
            continue
        rn = int(right[1:])
        order = next(x.expected_order for x in e if x.id == left) * rn
        add(pid, f"{left} x {right}", order, _dp(simple[left], _cyc(rn), name=pid), "coprime_product")
    return CorpusManifest(CORPUS_VERSION, tuple(e))


def build_group(gid: str, max_order: int = DEFAULT_ORDER_CAP) -> GroupTable:
    """Construct a corpus group by id."""
    entry = builtin_corpus()[gid]
    if entry.expected_order > max_order:
        from .errors import ClosureTooLarge

        raise ClosureTooLarge(f"{gid} has order {entry.expected_order} > cap {max_order}")
    g = entry.build()
    if g.order != entry.expected_order:
        raise AssertionError(f"{gid}: built order {g.order}, expected {entry.expected_order}")
    return GroupTable(g.mul, g.inv, g.labels, gid, perms=g.perms)


# --------------------------------------------------------------------------
# lattice cache


def default_cache_dir() -> Path:
    return Path(os.environ.get("LATSIEVE_CACHE", ".latsieve-cache"))


def cache_path(store_dir, g: GroupTable) -> Path:
    return Path(store_dir) / f"{g.digest}.latcache"


def serialize_lattice(lat: SubgroupLattice) -> str:
    g = lat.group
    out = [f"latcache v1 {g.digest} {g.order} {lat.size}"]
    for s in lat.nodes:
        out.append(" ".join(map(str, (s.order,) + s.members)))
    for i in range(lat.size):
        out.append(" ".join(f"{lat.meet(i, j)},{lat.join(i, j)}" for j in range(lat.size)))
    return "\n".join(out) + "\n"


def deserialize_lattice(text: str, g: GroupTable) -> SubgroupLattice:
    """Rebuild a lattice from cache text, re-checking every node and table entry."""
    lines = text.split("\n")
    try:
        head = lines[0].split()
        if head[:2] != ["latcache", "v1"] or len(head) != 5:
            raise CacheCorrupt("bad header")
        if head[2] != g.digest or int(head[3]) != g.order:
            raise CacheCorrupt("cache belongs to a different table")
        count = int(head[4])
        if len(lines) != 1 + 2 * count + 1 or lines[-1] != "":
            raise CacheCorrupt("wrong number of lines")
        nodes = []
        for line in lines[1:1 + count]:
            vals = [int(v) for v in line.split()]
            if vals[0] != len(vals) - 1:
                raise CacheCorrupt("node order does not match member count")
            nodes.append(SubgroupSet.from_members(g, vals[1:]))
        meet = np.empty((count, count), dtype=np.int32)
        join = np.empty((count, count), dtype=np.int32)
        for i, line in enumerate(lines[1 + count:1 + 2 * count]):
            pairs = line.split()
            if len(pairs) != count:
                raise CacheCorrupt("table row has the wrong length")
            for j, pair in enumerate(pairs):
                a, b = pair.split(",")
                meet[i, j], join[i, j] = int(a), int(b)
    except (ValueError, IndexError) as exc:
        raise CacheCorrupt(str(exc)) from None
    try:
        lat = SubgroupLattice(g, nodes)
    except ValueError as exc:
        raise CacheCorrupt(str(exc)) from None
    if lat.meet_table is not None and not (
        np.array_equal(lat.meet_table, meet) and np.array_equal(lat.join_table, join)
    ):
        raise CacheCorrupt("stored meet/join tables disagree with the nodes")
    return lat


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def lattice_cache(store_dir, g: GroupTable, max_subgroups: int = DEFAULT_SUBGROUP_CAP) -> SubgroupLattice:
    """Load ``L(g)`` from ``store_dir`` if cached and valid, else build and store it."""
    path = cache_path(store_dir, g)
    if path.exists():
        try:
            return deserialize_lattice(path.read_text(encoding="utf-8"), g)
        except CacheCorrupt:
            pass
    lat = build_lattice(g, max_subgroups=max_subgroups)
    _atomic_write(path, serialize_lattice(lat))
    return lat


def read_input(source: str, max_order: int = DEFAULT_ORDER_CAP) -> GroupTable:
    """``builtin:<id>`` or a path to a group file."""
    if source.startswith("builtin:"):
        return build_group(source[len("builtin:"):], max_order)
    return load_group_file(source).build(max_order)


def model_from_file(path) -> CoprimeActionSystem:
    return load_group_file(path).model_system()


def coprime_pairs_in(manifest: CorpusManifest) -> list[tuple[str, str, str]]:
    return [t for t in COPRIME_PAIRS if all(x in manifest for x in t)
            and math.gcd(manifest[t[1]].expected_order, manifest[t[2]].expected_order) == 1]
