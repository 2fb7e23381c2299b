"""Subgroup lattices, the named pattern lattices, modularity and congruences."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import Sequence

import numpy as np

from .errors import PatternTooLarge, UnknownPattern
from .group_core import (
    DEFAULT_SUBGROUP_CAP,
    GroupTable,
    SubgroupSet,
    _closure_mask,
    from_generators,
    subgroups_of,
)

TABLE_LIMIT = 3000
FULL_VERIFY_LIMIT = 300
CONGRUENCE_LIMIT = 12


def _bitmask(indices) -> int:
    out = 0
    for i in indices:
        out |= 1 << int(i)
    return out


def _bits(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


class SubgroupLattice:
    """All subgroups of a group, sorted by (order, members).

    Nodes are referred to by their index in ``nodes``.  ``down[i]`` and
    ``up[i]`` are Python-int bitmasks over node indices (including ``i``).
    Because nodes are sorted by order, the meet of ``i`` and ``j`` is the
    highest index in ``down[i] & down[j]`` and the join is the lowest index
    in ``up[i] & up[j]``.
    """

    def __init__(self, group: GroupTable, nodes: Sequence[SubgroupSet],
                 meet_table: np.ndarray | None = None, join_table: np.ndarray | None = None):
        self.group = group
        self.nodes = list(nodes)
        keys = [(s.order, s.members) for s in self.nodes]
        if keys != sorted(keys) or len(set(keys)) != len(keys):
            raise ValueError("nodes must be distinct and sorted by (order, members)")
        if self.nodes[0].order != 1 or self.nodes[-1].order != group.order:
            raise ValueError("first node must be trivial and last the whole group")
        self.index = {s.members: i for i, s in enumerate(self.nodes)}
        self.orders = np.array([s.order for s in self.nodes], dtype=np.int64)
        n = len(self.nodes)
        member = np.zeros((n, group.order), dtype=np.float32)
        for i, s in enumerate(self.nodes):
            member[i, s.array] = 1.0
        # contained[j, i] <=> node j is a subgroup of node i
        outside = member @ (1.0 - member).T
        self.leq = outside == 0
        self.down = [_bitmask(np.flatnonzero(self.leq[:, i])) for i in range(n)]
        self.up = [_bitmask(np.flatnonzero(self.leq[i, :])) for i in range(n)]
        if meet_table is None and n <= TABLE_LIMIT:
            meet_table, join_table = self._tables()
        self.meet_table = meet_table
        self.join_table = join_table

    def _tables(self) -> tuple[np.ndarray, np.ndarray]:
        n = self.size
        leq = self.leq
        meet = np.empty((n, n), dtype=np.int32)
        join = np.empty((n, n), dtype=np.int32)
        for i in range(n):
            below = np.flatnonzero(leq[:, i])
            common = leq[below, :]  # rows k <= i, columns j: k <= j
            # highest k with k <= j
            meet[i] = below[len(below) - 1 - np.argmax(common[::-1], axis=0)]
            above = np.flatnonzero(leq[i, :])
            common = leq[:, above].T  # rows k >= i, columns j: j <= k
            join[i] = above[np.argmax(common, axis=0)]
        meet.setflags(write=False)
        join.setflags(write=False)
        return meet, join

    def __repr__(self):
        return f"SubgroupLattice({self.group.name or '?'}, {self.size} nodes)"

    @property
    def size(self) -> int:
        return len(self.nodes)

    def __len__(self):
        return self.size

    @property
    def bottom(self) -> int:
        return 0

    @property
    def top(self) -> int:
        return self.size - 1

    def node_of(self, sub: SubgroupSet) -> int:
        return self.index[sub.members]

    def is_leq(self, i: int, j: int) -> bool:
        return bool(self.leq[i, j])

    def meet(self, i: int, j: int) -> int:
        if self.meet_table is not None:
            return int(self.meet_table[i, j])
        return (self.down[i] & self.down[j]).bit_length() - 1

    def join(self, i: int, j: int) -> int:
        if self.join_table is not None:
            return int(self.join_table[i, j])
        common = self.up[i] & self.up[j]
        return (common & -common).bit_length() - 1

    @cached_property
    def covers(self) -> list[tuple[int, int]]:
        """Hasse edges ``(lower, upper)``."""
        edges = []
        for i in range(self.size):
            strict = self.up[i] & ~(1 << i)
            for k in _bits(strict):
                if self.down[k] & strict == 1 << k:
                    edges.append((i, k))
        return edges

    def verify(self, samples: int = 500, seed: int = 0) -> None:
        """Check meets against intersections and joins against generation.

        Every pair is checked when the lattice has at most 300 nodes, a
        random sample otherwise.  Raises AssertionError on mismatch.
        """
        n = self.size
        if n <= FULL_VERIFY_LIMIT:
            pairs = combinations(range(n), 2)
        else:
            rng = np.random.default_rng(seed)
            pairs = rng.integers(0, n, size=(samples, 2)).tolist()
        g = self.group
        for i, j in pairs:
            a, b = self.nodes[i], self.nodes[j]
            m = self.nodes[self.meet(i, j)]
            if not np.array_equal(m.contains, a.contains & b.contains):
                raise AssertionError(f"meet of nodes {i}, {j} is not their intersection")
            jm = _closure_mask(g, list(a.gens) + list(b.gens))
            if not np.array_equal(self.nodes[self.join(i, j)].contains, jm):
                raise AssertionError(f"join of nodes {i}, {j} is not the generated subgroup")
            if self.join(i, self.meet(i, j)) != i or self.meet(i, self.join(i, j)) != i:
                raise AssertionError(f"absorption fails for nodes {i}, {j}")


def build_lattice(g: GroupTable, max_subgroups: int = DEFAULT_SUBGROUP_CAP) -> SubgroupLattice:
    return SubgroupLattice(g, subgroups_of(g, max_subgroups=max_subgroups))


# --------------------------------------------------------------------------
# abstract lattices


@dataclass(frozen=True, eq=False)
class AbstractLattice:
    """A small lattice given by explicit tables over ``0 .. size-1``."""

    name: str
    element_names: tuple[str, ...]
    leq: np.ndarray
    meet: np.ndarray
    join: np.ndarray

    def __post_init__(self):
        n = len(self.element_names)
        for arr in (self.leq, self.meet, self.join):
            if arr.shape != (n, n):
                raise ValueError("table shape does not match element count")
        m, j = self.meet, self.join
        ar = np.arange(n)
        checks = [
            np.array_equal(m[ar, ar], ar) and np.array_equal(j[ar, ar], ar),
            np.array_equal(m, m.T) and np.array_equal(j, j.T),
            np.array_equal(m[m[:, :, None], ar[None, None, :]],
                           m[ar[:, None, None], m[ar[None, :, None], ar[None, None, :]]]),
            np.array_equal(j[j[:, :, None], ar[None, None, :]],
                           j[ar[:, None, None], j[ar[None, :, None], ar[None, None, :]]]),
            np.array_equal(j[ar[:, None], m], np.broadcast_to(ar[:, None], (n, n))),
            np.array_equal(m[ar[:, None], j], np.broadcast_to(ar[:, None], (n, n))),
            np.array_equal(self.leq, m == ar[:, None]),
        ]
        if not all(checks):
            raise ValueError(f"tables of {self.name} do not form a lattice")

    def __repr__(self):
        return f"AbstractLattice({self.name}, size={self.size})"

    @property
    def size(self) -> int:
        return len(self.element_names)

    def __len__(self):
        return self.size

    @cached_property
    def bottom(self) -> int:
        return int(np.flatnonzero(self.leq.all(axis=1))[0])

    @cached_property
    def top(self) -> int:
        return int(np.flatnonzero(self.leq.all(axis=0))[0])

    def element(self, name: str) -> int:
        return self.element_names.index(name)

    @classmethod
    def from_leq(cls, leq, names: Sequence[str] | None = None, name: str = "anonymous") -> AbstractLattice:
        """Build meet/join tables from an order relation (raises if not a lattice)."""
        leq = np.asarray(leq, dtype=bool)
        n = leq.shape[0]
        names = tuple(names) if names is not None else tuple(str(i) for i in range(n))
        meet = np.empty((n, n), dtype=np.int64)
        join = np.empty((n, n), dtype=np.int64)
        for a in range(n):
            for b in range(n):
                lower = np.flatnonzero(leq[:, a] & leq[:, b])
                glb = [x for x in lower if leq[lower, x].all()]
                upper = np.flatnonzero(leq[a, :] & leq[b, :])
                lub = [x for x in upper if leq[x, upper].all()]
                if len(glb) != 1 or len(lub) != 1:
                    raise ValueError("order relation is not a lattice")
                meet[a, b], join[a, b] = glb[0], lub[0]
        return cls(name, names, leq, meet, join)


def chain(n: int) -> AbstractLattice:
    ar = np.arange(n)
    return AbstractLattice.from_leq(ar[:, None] <= ar[None, :], name=f"chain{n}")


PATTERN_NAMES = ("L5", "L6", "L7", "L8", "M8", "M9", "L9", "L10")
LABEL_ORDER = ("E", "S", "T", "D", "U", "V", "A", "B", "C", "F")

_PATTERN_MEMBERS = {
    "L10": set(LABEL_ORDER),
    "L9": set(LABEL_ORDER) - {"V"},
    "M9": set(LABEL_ORDER) - {"B"},
    "L8": set(LABEL_ORDER) - {"B", "V"},
    "M8": set(LABEL_ORDER) - {"T", "V"},
    "L7": {"E", "S", "U", "A", "F", "D", "C"},
    "L6": {"E", "S", "U", "A", "F", "T"},
    "L5": {"E", "S", "U", "A", "F"},
}

# pattern containments used for monotonicity: smaller -> larger
PATTERN_CONTAINS = {
    a: tuple(b for b in PATTERN_NAMES if _PATTERN_MEMBERS[a] <= _PATTERN_MEMBERS[b] and a != b)
    for a in PATTERN_NAMES
}


def canonical_d8() -> tuple[GroupTable, dict[str, SubgroupSet]]:
    """D8 on four points with ``r = (1 2 3 4)``, ``s = (2 4)`` and the
    labelled subgroups E, S, T, D, U, V, A, B, C, F of its lattice."""
    from .group_core import generated_subgroup

    g = from_generators(4, ["(1 2 3 4)", "(2 4)"], name="D8")
    r = g.element("(1 2 3 4)")
    s = g.element("(2 4)")
    r2 = g.power(r, 2)
    r3 = g.power(r, 3)
    m = g.mul
    gen = lambda *xs: generated_subgroup(g, [int(x) for x in xs])  # noqa: E731
    labelled = {
        "E": g.trivial,
        "S": gen(s),
        "T": gen(m[r2, s]),
        "U": gen(m[r, s]),
        "V": gen(m[r3, s]),
        "D": gen(r2),
        "A": gen(s, r2),
        "B": gen(r),
        "C": gen(m[r, s], r2),
        "F": g.whole,
    }
    return g, labelled


def _lattice_from_subgroups(name: str, labels: Sequence[str], subs: Sequence[SubgroupSet]) -> AbstractLattice:
    g = subs[0].parent
    masks = [s.contains for s in subs]
    n = len(subs)
    pos = {s.members: i for i, s in enumerate(subs)}
    leq = np.array([[not (masks[a] & ~masks[b]).any() for b in range(n)] for a in range(n)])
    meet = np.empty((n, n), dtype=np.int64)
    join = np.empty((n, n), dtype=np.int64)
    for a in range(n):
        for b in range(n):
            mm = tuple(np.flatnonzero(masks[a] & masks[b]).tolist())
            jm = tuple(np.flatnonzero(_closure_mask(g, list(subs[a].gens) + list(subs[b].gens))).tolist())
            if mm not in pos or jm not in pos:
                raise ValueError(f"{name} is not closed under meet and join")
            meet[a, b], join[a, b] = pos[mm], pos[jm]
    return AbstractLattice(name, tuple(labels), leq, meet, join)


_PATTERN_CACHE: dict[str, AbstractLattice] = {}


def named_pattern(name: str) -> AbstractLattice:
    """One of L5, L6, L7, L8, M8, M9, L9, L10 as a sublattice of L(D8)."""
    if name not in _PATTERN_MEMBERS:
        raise UnknownPattern(f"unknown pattern {name!r}; expected one of {', '.join(PATTERN_NAMES)}")
    if name not in _PATTERN_CACHE:
        _, labelled = canonical_d8()
        labels = [x for x in LABEL_ORDER if x in _PATTERN_MEMBERS[name]]
        _PATTERN_CACHE[name] = _lattice_from_subgroups(name, labels, [labelled[x] for x in labels])
    return _PATTERN_CACHE[name]


# --------------------------------------------------------------------------
# modularity


def is_modular(lat: SubgroupLattice | AbstractLattice) -> bool:
    """Modular law ``x ∨ (y ∧ z) = (x ∨ y) ∧ z`` for all ``x ≤ z``."""
    if isinstance(lat, AbstractLattice):
        meet, join, leq = lat.meet, lat.join, lat.leq
    else:
        if lat.meet_table is None:
            return _is_modular_slow(lat)
        meet, join, leq = lat.meet_table, lat.join_table, lat.leq
    n = meet.shape[0]
    for x in range(n):
        zs = np.flatnonzero(leq[x])
        lhs = join[x][meet[:, zs]]  # rows y, columns z
        rhs = meet[join[x][:, None], zs[None, :]]
        if not np.array_equal(lhs, rhs):
            return False
    return True


def _is_modular_slow(lat: SubgroupLattice) -> bool:
    n = lat.size
    for x in range(n):
        for z in _bits(lat.up[x]):
            for y in range(n):
                if lat.join(x, lat.meet(y, z)) != lat.meet(lat.join(x, y), z):
                    return False
    return True


# --------------------------------------------------------------------------
# congruences


@dataclass(frozen=True)
class Congruence:
    """A partition of a lattice's elements compatible with meet and join."""

    lattice: AbstractLattice
    classes: tuple[tuple[int, ...], ...]

    @cached_property
    def _block(self) -> dict[int, int]:
        return {x: k for k, cls in enumerate(self.classes) for x in cls}

    def same(self, a, b) -> bool:
        if isinstance(a, str):
            a = self.lattice.element(a)
        if isinstance(b, str):
            b = self.lattice.element(b)
        return self._block[a] == self._block[b]

    def is_equality(self) -> bool:
        return all(len(c) == 1 for c in self.classes)

    def named_classes(self) -> list[list[str]]:
        names = self.lattice.element_names
        return [[names[x] for x in cls] for cls in self.classes]


def _canonical(parent: list[int]) -> tuple[int, ...]:
    def find(x):
        while parent[x] != x:
            x = parent[x]
        return x

    roots = [find(x) for x in range(len(parent))]
    least: dict[int, int] = {}
    for x, r in enumerate(roots):
        least.setdefault(r, x)
    return tuple(least[r] for r in roots)


def _close(lat: AbstractLattice, labels: tuple[int, ...]) -> tuple[int, ...]:
    """Smallest congruence containing the partition ``labels``."""
    n = lat.size
    parent = list(labels)
    meet, join = lat.meet, lat.join

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    changed = True
    while changed:
        changed = False
        for a in range(n):
            for b in range(a + 1, n):
                if find(a) != find(b):
                    continue
                for z in range(n):
                    for u, v in ((join[a, z], join[b, z]), (meet[a, z], meet[b, z])):
                        ru, rv = find(int(u)), find(int(v))
                        if ru != rv:
                            parent[max(ru, rv)] = min(ru, rv)
                            changed = True
    return _canonical(parent)


def enumerate_congruences(lat: AbstractLattice) -> list[Congruence]:
    """All congruences: joins of the principal congruences ``θ(a, b)``."""
    n = lat.size
    if n > CONGRUENCE_LIMIT:
        raise PatternTooLarge(f"congruence enumeration limited to {CONGRUENCE_LIMIT} elements")
    identity = tuple(range(n))
    principal = set()
    for a, b in combinations(range(n), 2):
        labels = list(identity)
        labels[b] = a
        principal.add(_close(lat, tuple(labels)))
    found = {identity}
    frontier = [identity]
    while frontier:
        nxt = []
        for theta in frontier:
            for p in principal:
                merged = _join_partitions(theta, p)
                if merged not in found:
                    found.add(merged)
                    nxt.append(merged)
        frontier = nxt
    out = []
    for labels in sorted(found, key=lambda t: (-len(set(t)), t)):
        blocks: dict[int, list[int]] = {}
        for x, r in enumerate(labels):
            blocks.setdefault(r, []).append(x)
        out.append(Congruence(lat, tuple(tuple(b) for b in blocks.values())))
    return out


def _join_partitions(p: tuple[int, ...], q: tuple[int, ...]) -> tuple[int, ...]:
    parent = list(range(len(p)))

    def find(x):
        while parent[x] != x:
            x = parent[x]
        return x

    for x in range(len(p)):
        for other in (p[x], q[x]):
            rx, ro = find(x), find(other)
            if rx != ro:
                parent[max(rx, ro)] = min(rx, ro)
    return _canonical(parent)
