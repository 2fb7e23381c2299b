"""Sublattice embedding search for the named patterns, and a direct L9 detector.

The generic search and :func:`detect_l9_direct` share no search code, so
they serve as oracles for one another.
"""

from __future__ import annotations

import enum
import time
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .errors import OracleDisagreement
from .group_core import GroupTable
from .lattice_core import (
    PATTERN_NAMES,
    AbstractLattice,
    SubgroupLattice,
    build_lattice,
    is_modular,
    named_pattern,
)

DEFAULT_BUDGET_SECS = 60.0


class Outcome(enum.Enum):
    ABSENT = "absent"
    TIMEOUT = "timeout"

    def __repr__(self):
        return self.value.upper()


ABSENT = Outcome.ABSENT
TIMEOUT = Outcome.TIMEOUT


@dataclass(frozen=True, eq=False)
class Embedding:
    """``map[i]`` is the lattice node assigned to pattern element ``i``."""

    pattern: AbstractLattice
    lattice: SubgroupLattice
    map: tuple[int, ...]

    def __repr__(self):
        pairs = ", ".join(f"{k}={v}" for k, v in self.as_dict().items())
        return f"Embedding({self.pattern.name} in {self.lattice.group.name or '?'}: {pairs})"

    def as_dict(self) -> dict[str, int]:
        return dict(zip(self.pattern.element_names, self.map))

    def orders(self) -> tuple[int, ...]:
        return tuple(int(self.lattice.orders[i]) for i in self.map)

    @property
    def node_set(self) -> frozenset[int]:
        return frozenset(self.map)

    def is_valid(self) -> bool:
        """Injective and preserves every meet and join."""
        p, lat, m = self.pattern, self.lattice, self.map
        if len(m) != p.size or len(set(m)) != len(m):
            return False
        for a in range(p.size):
            for b in range(a, p.size):
                if lat.meet(m[a], m[b]) != m[p.meet[a, b]]:
                    return False
                if lat.join(m[a], m[b]) != m[p.join[a, b]]:
                    return False
        return True


def _search_order(p: AbstractLattice) -> list[int]:
    comparable = (p.leq | p.leq.T).sum(axis=1) - 1
    rest = [i for i in range(p.size) if i not in (p.bottom, p.top)]
    rest.sort(key=lambda i: (-int(comparable[i]), i))
    return [p.bottom, p.top] + rest


class _Budget:
    def __init__(self, secs: float | None):
        self.deadline = None if secs is None else time.monotonic() + secs
        self.ticks = 0
        self.expired = False

    def tick(self) -> bool:
        self.ticks += 1
        if self.deadline is not None and self.ticks % 256 == 0 and time.monotonic() > self.deadline:
            self.expired = True
        return self.expired


def find_sublattice_embedding(p: AbstractLattice, lat: SubgroupLattice,
                              budget_secs: float | None = DEFAULT_BUDGET_SECS):
    """First embedding of ``p`` into ``lat`` in canonical search order.

    Returns an :class:`Embedding`, ``ABSENT`` after an exhaustive search, or
    ``TIMEOUT`` if the time budget ran out first.
    """
    k = p.size
    if lat.size < k:
        return ABSENT
    order = _search_order(p)
    pos = {e: t for t, e in enumerate(order)}
    # For the element placed at step t: pairs (x, y) placed no later than t
    # whose meet or join involves it, to be checked once all three are placed.
    checks: list[list[tuple[int, int, int, int]]] = [[] for _ in range(k)]
    for x in range(k):
        for y in range(x + 1, k):
            for table, kind in ((p.meet, 0), (p.join, 1)):
                z = int(table[x, y])
                t = max(pos[x], pos[y], pos[z])
                checks[t].append((x, y, z, kind))
    # forced values: an element that is the meet/join of two earlier ones
    forced: list[tuple[int, int, int] | None] = [None] * k
    for t, e in enumerate(order):
        for x in range(k):
            for y in range(x + 1, k):
                if pos[x] < t and pos[y] < t:
                    if p.meet[x, y] == e:
                        forced[t] = (x, y, 0)
                        break
                    if p.join[x, y] == e:
                        forced[t] = (x, y, 1)
                        break
            if forced[t] is not None:
                break

    n = lat.size
    everything = (1 << n) - 1
    up, down = lat.up, lat.down
    leq = p.leq
    assign = [-1] * k
    used = 0
    budget = _Budget(budget_secs)

    def candidates(t: int) -> list[int]:
        e = order[t]
        f = forced[t]
        if f is not None:
            x, y, kind = f
            node = lat.meet(assign[x], assign[y]) if kind == 0 else lat.join(assign[x], assign[y])
            cand = (1 << node) & ~used
        else:
            cand = everything & ~used
        for s in range(t):
            b = order[s]
            nb = assign[b]
            if leq[e, b]:
                cand &= down[nb]
            elif leq[b, e]:
                cand &= up[nb]
            else:
                cand &= ~(up[nb] | down[nb])
            if not cand:
                return []
        if t == 1 and lat.size:
            # the interval [E, F] must hold enough nodes
            e0 = assign[order[0]]
            out = []
            for node in _iter_bits(cand):
                if bin(up[e0] & down[node]).count("1") >= k:
                    out.append(node)
            return out
        return list(_iter_bits(cand))

    def consistent(t: int) -> bool:
        for x, y, z, kind in checks[t]:
            got = lat.meet(assign[x], assign[y]) if kind == 0 else lat.join(assign[x], assign[y])
            if got != assign[z]:
                return False
        return True

    def extend(t: int) -> bool:
        nonlocal used
        if t == k:
            return True
        e = order[t]
        for node in candidates(t):
            if budget.tick():
                return False
            assign[e] = node
            used |= 1 << node
            if consistent(t) and extend(t + 1):
                return True
            used &= ~(1 << node)
            assign[e] = -1
            if budget.expired:
                return False
        return False

    if extend(0):
        return Embedding(p, lat, tuple(assign))
    return TIMEOUT if budget.expired else ABSENT


def _iter_bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


# --------------------------------------------------------------------------
# direct L9 detection from the relation system


def detect_l9_direct(lat: SubgroupLattice):
    """Search nine nodes satisfying the defining relations of L9.

    With ``E ≠ D``: ``S∨T = S∨D = T∨D = A`` and ``S∧T = S∧D = T∧D = E``;
    ``D∨U = C`` and ``D∧U = E``; ``S∨U = T∨U = F``; ``A∨B = B∨C = F`` and
    ``A∧B = A∧C = B∧C = D``.  These relations determine L9 completely, so
    the nodes found are returned as an embedding without further checks.
    """
    n = lat.size
    if n < 9:
        return ABSENT
    meet_row, join_row = _row_access(lat)
    nodes = np.arange(n)
    for E in range(n):
        above_e = np.flatnonzero(lat.leq[E])
        for D in above_e:
            if D == E:
                continue
            mD, jD = meet_row(D), join_row(D)
            # S, T, U all meet D in E
            meets_d_in_e = nodes[(mD == E) & (nodes != E)]
            if len(meets_d_in_e) < 3:
                continue
            for S in meets_d_in_e:
                A = jD[S]
                mS, jS = meet_row(S), join_row(S)
                T_cands = meets_d_in_e[(mS[meets_d_in_e] == E) & (jS[meets_d_in_e] == A) & (jD[meets_d_in_e] == A)]
                T_cands = T_cands[T_cands != S]
                if not len(T_cands):
                    continue
                for T in T_cands:
                    jT = join_row(T)
                    for U in meets_d_in_e:
                        C = jD[U]
                        if C == A:
                            continue
                        F = jS[U]
                        if jT[U] != F:
                            continue
                        mA, mC = meet_row(A), meet_row(C)
                        if mA[C] != D:
                            continue
                        jA, jC = join_row(A), join_row(C)
                        B_cands = nodes[(mA == D) & (mC == D) & (jA == F) & (jC == F)]
                        if len(B_cands):
                            B = int(B_cands[0])
                            image = (E, S, T, D, U, A, B, C, F)
                            return Embedding(named_pattern("L9"), lat, tuple(int(x) for x in image))
    return ABSENT


def _row_access(lat: SubgroupLattice):
    if lat.meet_table is not None:
        return (lambda i: lat.meet_table[i]), (lambda i: lat.join_table[i])
    cache_m: dict[int, np.ndarray] = {}
    cache_j: dict[int, np.ndarray] = {}

    def meet_row(i):
        if i not in cache_m:
            cache_m[i] = np.array([lat.meet(i, j) for j in range(lat.size)])
        return cache_m[i]

    def join_row(i):
        if i not in cache_j:
            cache_j[i] = np.array([lat.join(i, j) for j in range(lat.size)])
        return cache_j[i]

    return meet_row, join_row


# --------------------------------------------------------------------------
# profiles


@dataclass
class FreenessProfile:
    """Per pattern either an :class:`Embedding` or ``ABSENT``/``TIMEOUT``."""

    group: str
    lattice: SubgroupLattice = field(repr=False)
    results: dict[str, object]
    modular: bool
    direct_l9: object = None
    timings: dict[str, float] = field(default_factory=dict)

    def is_free(self, pattern: str) -> bool:
        return self.results[pattern] is ABSENT

    @property
    def l9_free(self) -> bool:
        return self.is_free("L9")

    @property
    def timeouts(self) -> list[str]:
        return [k for k, v in self.results.items() if v is TIMEOUT]

    def witnessed(self) -> list[str]:
        return [k for k, v in self.results.items() if isinstance(v, Embedding)]


def freeness_profile(g: GroupTable | SubgroupLattice, patterns=PATTERN_NAMES,
                     budget_secs: float | None = DEFAULT_BUDGET_SECS) -> FreenessProfile:
    """Run the embedding search for each pattern and the modularity test.

    When L9 is among the patterns the direct detector is run as well and
    must agree on presence, otherwise OracleDisagreement is raised.
    """
    lat = g if isinstance(g, SubgroupLattice) else build_lattice(g)
    results: dict[str, object] = {}
    timings: dict[str, float] = {}
    for name in patterns:
        t0 = time.perf_counter()
        results[name] = find_sublattice_embedding(named_pattern(name), lat, budget_secs)
        timings[name] = time.perf_counter() - t0
    direct = None
    if "L9" in results and results["L9"] is not TIMEOUT:
        t0 = time.perf_counter()
        direct = detect_l9_direct(lat)
        timings["L9_direct"] = time.perf_counter() - t0
        if (direct is ABSENT) != (results["L9"] is ABSENT):
            raise OracleDisagreement(
                f"{lat.group.name}: generic search says {'absent' if results['L9'] is ABSENT else 'present'}, "
                f"direct detector says {'absent' if direct is ABSENT else 'present'}"
            )
    return FreenessProfile(lat.group.name, lat, results, is_modular(lat), direct, timings)


def is_l9_free(g: GroupTable | SubgroupLattice, budget_secs: float | None = DEFAULT_BUDGET_SECS) -> bool:
    lat = g if isinstance(g, SubgroupLattice) else build_lattice(g)
    res = find_sublattice_embedding(named_pattern("L9"), lat, budget_secs)
    if res is TIMEOUT:
        raise TimeoutError(f"L9 search on {lat.group.name} exceeded {budget_secs} s")
    return res is ABSENT
