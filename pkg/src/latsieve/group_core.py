"""Finite groups as dense Cayley tables, plus the subgroup calculus.

Elements are the integers ``0 .. n-1`` with ``0`` the identity.  Subgroups
are :class:`SubgroupSet` objects holding a sorted tuple of element indices of
their parent table.  Everything here is immutable; derived data is cached on
first use.
"""

from __future__ import annotations

import hashlib
import math
import re
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property, reduce
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    ClosureTooLarge,
    ForeignSubgroup,
    LatticeTooLarge,
    NotAHomomorphism,
    NotAnAutomorphism,
    NotPrime,
)

DEFAULT_ORDER_CAP = 5000
DEFAULT_SUBGROUP_CAP = 50000
FULL_ASSOC_LIMIT = 512
SPOT_CHECKS = 100_000

Perm = tuple  # 0-based image tuple: point i goes to perm[i]


# --------------------------------------------------------------------------
# small number theory


def factorize(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def primes_of(n: int) -> frozenset[int]:
    return frozenset(factorize(n))


def is_prime(n: int) -> bool:
    return n >= 2 and factorize(n) == {n: 1}


def pi_part(n: int, primes: Iterable[int]) -> int:
    """Largest divisor of ``n`` whose prime divisors all lie in ``primes``."""
    primes = set(primes)
    out = 1
    for p, e in factorize(n).items():
        if p in primes:
            out *= p**e
    return out


def _require_prime(p: int) -> None:
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")


# --------------------------------------------------------------------------
# permutations


_CYCLE_RE = re.compile(r"\(([^()]*)\)")


def parse_cycles(text: str, degree: int) -> Perm:
    """Parse 1-based disjoint cycle notation such as ``"(1 2 3)(4 5)"``.

    Fixed points may be omitted; ``"()"`` or an empty string is the identity.
    """
    img = list(range(degree))
    seen: set[int] = set()
    stripped = _CYCLE_RE.sub("", text).strip()
    if stripped:
        raise ValueError(f"unexpected text outside cycles: {stripped!r}")
    for body in _CYCLE_RE.findall(text):
        pts = [int(tok) for tok in body.replace(",", " ").split()]
        for pt in pts:
            if not 1 <= pt <= degree:
                raise ValueError(f"point {pt} outside 1..{degree}")
            if pt in seen:
                raise ValueError(f"point {pt} occurs twice")
            seen.add(pt)
        for a, b in zip(pts, pts[1:] + pts[:1]):
            img[a - 1] = b - 1
    return tuple(img)


def format_cycles(perm: Sequence[int]) -> str:
    seen = set()
    parts = []
    for start in range(len(perm)):
        if start in seen or perm[start] == start:
            continue
        cyc = [start]
        seen.add(start)
        x = perm[start]
        while x != start:
            cyc.append(x)
            seen.add(x)
            x = perm[x]
        parts.append("(" + " ".join(str(c + 1) for c in cyc) + ")")
    return "".join(parts) or "()"


# --------------------------------------------------------------------------
# groups


@dataclass(frozen=True, eq=False)
class GroupTable:
    """A finite group given by its multiplication table.

    ``mul[a, b]`` is the index of ``a*b``; ``inv[a]`` is the index of ``a^-1``.
    The identity is always index 0.  ``perms`` holds the 0-based point images
    of each element when the group was built from permutations.
    """

    mul: np.ndarray
    inv: np.ndarray
    labels: tuple[str, ...]
    name: str = ""
    perms: tuple[Perm, ...] | None = field(default=None, repr=False)

    def __post_init__(self):
        mul = np.ascontiguousarray(self.mul)
        n = mul.shape[0]
        if mul.ndim != 2 or mul.shape != (n, n) or n == 0:
            raise ValueError("multiplication table must be a non-empty square array")
        dtype = np.uint16 if n <= 65535 else np.uint32
        mul = mul.astype(dtype, copy=False)
        inv = np.asarray(self.inv).astype(dtype, copy=False)
        mul.setflags(write=False)
        inv.setflags(write=False)
        object.__setattr__(self, "mul", mul)
        object.__setattr__(self, "inv", inv)
        if len(self.labels) != n:
            raise ValueError("need one label per element")
        _validate_table(mul, inv)

    def __repr__(self):
        return f"GroupTable({self.name or '?'}, order={self.order})"

    @property
    def order(self) -> int:
        return int(self.mul.shape[0])

    @property
    def identity(self) -> int:
        return 0

    def __len__(self):
        return self.order

    @cached_property
    def element_orders(self) -> np.ndarray:
        n = self.order
        out = np.ones(n, dtype=np.int64)
        cur = np.arange(n)
        k = 1
        pending = cur != 0
        while pending.any():
            k += 1
            cur = self.mul[cur, np.arange(n)]
            hit = pending & (cur == 0)
            out[hit] = k
            pending &= ~hit
        out[0] = 1
        return out

    def element_order(self, x: int) -> int:
        return int(self.element_orders[x])

    @cached_property
    def whole(self) -> SubgroupSet:
        return SubgroupSet._trusted(self, np.ones(self.order, dtype=bool))

    @cached_property
    def trivial(self) -> SubgroupSet:
        mask = np.zeros(self.order, dtype=bool)
        mask[0] = True
        return SubgroupSet._trusted(self, mask)

    @cached_property
    def generators(self) -> tuple[int, ...]:
        return self.whole.gens

    @cached_property
    def digest(self) -> str:
        """Content hash of the canonical table bytes (little-endian uint16/32)."""
        h = hashlib.sha256()
        h.update(str(self.order).encode())
        h.update(self.mul.astype(self.mul.dtype.newbyteorder("<")).tobytes())
        return h.hexdigest()

    def power(self, x: int, k: int) -> int:
        k %= self.element_order(x)
        out = 0
        base = x
        while k:
            if k & 1:
                out = int(self.mul[out, base])
            base = int(self.mul[base, base])
            k >>= 1
        return out

    def conj(self, x, g: int):
        """``g^-1 x g`` (vectorised over ``x``)."""
        return self.mul[self.mul[self.inv[g], x], g]

    def comm(self, x: int, y: int) -> int:
        """``[x, y] = x^-1 y^-1 x y``."""
        m = self.mul
        return int(m[m[self.inv[x], self.inv[y]], m[x, y]])

    def index_of_perm(self, perm: Sequence[int]) -> int:
        if self.perms is None:
            raise ValueError(f"{self.name} was not built from permutations")
        return self._perm_index[tuple(perm)]

    @cached_property
    def _perm_index(self) -> dict:
        return {p: i for i, p in enumerate(self.perms)}

    def element(self, cycles: str) -> int:
        """Index of the element given in 1-based cycle notation."""
        return self.index_of_perm(parse_cycles(cycles, len(self.perms[0])))


def _validate_table(mul: np.ndarray, inv: np.ndarray) -> None:
    n = mul.shape[0]
    ar = np.arange(n)
    if not (np.array_equal(mul[0], ar) and np.array_equal(mul[:, 0], ar)):
        raise ValueError("index 0 is not a two-sided identity")
    if not np.array_equal(mul[ar, inv], np.zeros(n)):
        raise ValueError("inverse table is wrong")
    srt = np.sort(mul, axis=1)
    if not (srt == ar).all() or not (np.sort(mul, axis=0) == ar[:, None]).all():
        raise ValueError("table is not a Latin square")
    if n <= FULL_ASSOC_LIMIT:
        for a in range(n):
            left = mul[mul[a]]  # row b -> (a*b)*c
            right = mul[a][mul]  # row b -> a*(b*c)
            if not np.array_equal(left, right):
                raise ValueError("table is not associative")
    else:
        rng = np.random.default_rng(0)
        a, b, c = rng.integers(0, n, size=(3, SPOT_CHECKS))
        if not np.array_equal(mul[mul[a, b], c], mul[a, mul[b, c]]):
            raise ValueError("table is not associative")


def _check_cap(n: int, max_order: int) -> None:
    if n > max_order:
        raise ClosureTooLarge(f"group order {n} exceeds cap {max_order}")


def table_group(rows, name: str = "", labels=None) -> GroupTable:
    """Build a group from an explicit 0-based multiplication table."""
    mul = np.asarray(rows, dtype=np.int64)
    n = mul.shape[0]
    if mul.min() < 0 or mul.max() >= n:
        raise ValueError("table entries out of range")
    inv = np.argmax(mul == 0, axis=1)
    labels = tuple(labels) if labels is not None else tuple(str(i) for i in range(n))
    return GroupTable(mul, inv, labels, name)


def _table_from_right_action(parent: np.ndarray, via: np.ndarray, right: np.ndarray) -> np.ndarray:
    """Fill ``mul`` from a BFS spanning tree.

    Element ``b`` (b > 0) equals ``parent[b] * gens[via[b]]`` and ``right[k]``
    is right multiplication by generator ``k``; then
    ``mul[:, b] = right[via[b]][mul[:, parent[b]]]``.
    """
    n = len(parent)
    mul = np.empty((n, n), dtype=np.int64)
    mul[:, 0] = np.arange(n)
    for b in range(1, n):
        mul[:, b] = right[via[b]][mul[:, parent[b]]]
    return mul


def from_generators(degree: int, gens: Iterable, *, name: str = "",
                    max_order: int = DEFAULT_ORDER_CAP) -> GroupTable:
    """Close a set of permutations of ``1..degree`` under composition.

    Generators may be cycle strings (1-based) or 0-based image tuples.  The
    resulting indices follow a BFS from the identity over the generators in
    lexicographic order of their image tuples, so the table does not depend
    on the order in which generators are listed.  Products compose left to
    right: ``x*y`` applies ``x`` first.
    """
    perms = set()
    for g in gens:
        p = parse_cycles(g, degree) if isinstance(g, str) else tuple(int(v) for v in g)
        if sorted(p) != list(range(degree)):
            raise ValueError(f"not a permutation of {degree} points: {g!r}")
        perms.add(p)
    ident = tuple(range(degree))
    perms.discard(ident)
    gen_list = sorted(perms)
    gen_arr = [np.array(p) for p in gen_list]

    elements = [ident]
    index = {ident: 0}
    parent = [0]
    via = [0]
    right_cols: list[list[int]] = [[] for _ in gen_list]
    i = 0
    while i < len(elements):
        x = np.array(elements[i])
        for k, g in enumerate(gen_arr):
            y = tuple(g[x].tolist())
            j = index.get(y)
            if j is None:
                j = len(elements)
                if j >= max_order:
                    raise ClosureTooLarge(f"closure exceeds order cap {max_order}")
                index[y] = j
                elements.append(y)
                parent.append(i)
                via.append(k)
            right_cols[k].append(j)
        i += 1
    n = len(elements)
    right = np.array(right_cols, dtype=np.int64).reshape(len(gen_list), n)
    mul = _table_from_right_action(np.array(parent), np.array(via), right)
    inv = np.empty(n, dtype=np.int64)
    inv[np.nonzero(mul == 0)[0]] = np.nonzero(mul == 0)[1]
    labels = tuple(format_cycles(p) for p in elements)
    return GroupTable(mul, inv, labels, name, perms=tuple(elements))


def cyclic(n: int, name: str | None = None) -> GroupTable:
    ar = np.arange(n)
    mul = (ar[:, None] + ar[None, :]) % n
    labels = tuple("1" if i == 0 else ("a" if i == 1 else f"a^{i}") for i in range(n))
    return GroupTable(mul, (-ar) % n, labels, name or f"C{n}")


def direct_product(a: GroupTable, b: GroupTable, *, name: str | None = None,
                   max_order: int = DEFAULT_ORDER_CAP) -> GroupTable:
    """Componentwise product; element ``(i, j)`` has index ``i*|b| + j``."""
    na, nb = a.order, b.order
    _check_cap(na * nb, max_order)
    am = a.mul.astype(np.int64)
    bm = b.mul.astype(np.int64)
    mul = (am[:, None, :, None] * nb + bm[None, :, None, :]).reshape(na * nb, na * nb)
    inv = (a.inv.astype(np.int64)[:, None] * nb + b.inv.astype(np.int64)[None, :]).reshape(-1)
    labels = tuple(f"({x},{y})" for x in a.labels for y in b.labels)
    return GroupTable(mul, inv, labels, name or f"{a.name}x{b.name}")


@dataclass(frozen=True)
class ActionSpec:
    """Data for ``target ⋊ acting``.

    ``images`` maps generator indices of ``acting`` to permutations of the
    element indices of ``target``: ``images[k][x]`` is ``x^k``, the conjugate
    of ``x`` by ``k`` in the product.
    """

    acting: GroupTable
    target: GroupTable
    images: Mapping[int, Perm]

    def __post_init__(self):
        n = self.target.order
        for k, img in self.images.items():
            img = np.asarray(img)
            if sorted(img.tolist()) != list(range(n)):
                raise NotAnAutomorphism(f"image of generator {k} is not a permutation")
            m = self.target.mul
            if not np.array_equal(img[m], m[img][:, img]):
                raise NotAnAutomorphism(f"image of generator {k} does not preserve multiplication")

    def action_table(self) -> np.ndarray:
        """``act[k]`` = permutation induced by every element ``k`` of ``acting``.

        Raises NotAHomomorphism if the generator images do not extend.
        """
        K = self.acting
        nN = self.target.order
        gens = sorted(self.images)
        seen = np.zeros(K.order, dtype=bool)
        act = np.empty((K.order, nN), dtype=np.int64)
        act[0] = np.arange(nN)
        seen[0] = True
        frontier = [0]
        while frontier:
            nxt = []
            for k in frontier:
                for s in gens:
                    ks = int(K.mul[k, s])
                    # x^(k s) = (x^k)^s
                    cand = np.asarray(self.images[s])[act[k]]
                    if seen[ks]:
                        if not np.array_equal(act[ks], cand):
                            raise NotAHomomorphism("generator images violate a relation of the acting group")
                    else:
                        seen[ks] = True
                        act[ks] = cand
                        nxt.append(ks)
            frontier = nxt
        if not seen.all():
            raise NotAHomomorphism("listed generators do not generate the acting group")
        # full check: act[k1 k2] = act[k2] o act[k1]
        for k1 in range(K.order):
            if not np.array_equal(act[K.mul[k1]], act[:, act[k1]]):
                raise NotAHomomorphism("generator images do not define a homomorphism")
        return act


def semidirect_product(spec: ActionSpec, *, name: str | None = None,
                       max_order: int = DEFAULT_ORDER_CAP) -> GroupTable:
    """``N ⋊ K`` with element ``n*k`` stored at index ``n*|K| + k``."""
    N, K = spec.target, spec.acting
    nN, nK = N.order, K.order
    _check_cap(nN * nK, max_order)
    act = spec.action_table()
    Nm = N.mul.astype(np.int64)
    Km = K.mul.astype(np.int64)
    kinv = K.inv.astype(np.int64)
    # (n1 k1)(n2 k2) = n1 * n2^(k1^-1) * k1 k2
    n1 = np.repeat(np.arange(nN), nK)
    k1 = np.tile(np.arange(nK), nN)
    moved = act[kinv[k1]]  # rows: conjugation by k1^-1 applied to every n2
    nn = Nm[n1[:, None], moved[:, np.repeat(np.arange(nN), nK)]]
    kk = Km[k1[:, None], np.tile(np.arange(nK), nN)[None, :]]
    mul = nn * nK + kk
    inv = np.empty(nN * nK, dtype=np.int64)
    inv[np.nonzero(mul == 0)[0]] = np.nonzero(mul == 0)[1]
    labels = tuple(
        (N.labels[n] if n else "") + ("" if not k else ("*" if n else "") + K.labels[k]) or "1"
        for n in range(nN) for k in range(nK)
    )
    return GroupTable(mul, inv, labels, name or f"{N.name}:{K.name}")


def automorphism_from_images(g: GroupTable, gens: Sequence[int], images: Sequence[int]) -> Perm:
    """Extend ``gens[i] -> images[i]`` to an automorphism of ``g``.

    Raises NotAnAutomorphism if the assignment is not a bijective homomorphism.
    """
    n = g.order
    img = np.full(n, -1, dtype=np.int64)
    img[0] = 0
    frontier = [0]
    while frontier:
        nxt = []
        for x in frontier:
            for s, t in zip(gens, images):
                y = int(g.mul[x, s])
                v = int(g.mul[img[x], t])
                if img[y] < 0:
                    img[y] = v
                    nxt.append(y)
                elif img[y] != v:
                    raise NotAnAutomorphism("assignment violates a relation")
        frontier = nxt
    if (img < 0).any():
        raise NotAnAutomorphism("generators do not generate the group")
    if sorted(img.tolist()) != list(range(n)) or not np.array_equal(img[g.mul], g.mul[img][:, img]):
        raise NotAnAutomorphism("assignment is not a bijective homomorphism")
    return tuple(int(v) for v in img)


# --------------------------------------------------------------------------
# subgroups


def _mask_to_int(mask: np.ndarray) -> int:
    return int.from_bytes(np.packbits(mask, bitorder="little").tobytes(), "little")


@dataclass(frozen=True, eq=False)
class SubgroupSet:
    """A subgroup of ``parent`` given by its sorted element indices."""

    parent: GroupTable
    members: tuple[int, ...]

    def __post_init__(self):
        m = self.members
        if not m or m[0] != 0:
            raise ValueError("a subgroup must contain the identity")
        if any(a >= b for a, b in zip(m, m[1:])):
            raise ValueError("members must be strictly increasing")
        if self.parent.order % len(m):
            raise ValueError(f"subgroup order {len(m)} does not divide {self.parent.order}")

    @classmethod
    def from_members(cls, parent: GroupTable, members: Iterable[int]) -> SubgroupSet:
        """Validating constructor: checks closure under products and inverses."""
        mem = sorted(set(int(x) for x in members))
        if not mem or mem[0] != 0 or mem[-1] >= parent.order:
            raise ValueError("not a subset of the group containing the identity")
        mask = np.zeros(parent.order, dtype=bool)
        mask[mem] = True
        idx = np.array(mem)
        if not mask[parent.mul[np.ix_(idx, idx)]].all() or not mask[parent.inv[idx]].all():
            raise ValueError("set is not closed under multiplication and inverses")
        return cls._trusted(parent, mask)

    @classmethod
    def _trusted(cls, parent: GroupTable, mask: np.ndarray) -> SubgroupSet:
        obj = cls(parent, tuple(int(x) for x in np.flatnonzero(mask)))
        mask = mask.copy()
        mask.setflags(write=False)
        obj.__dict__["contains"] = mask
        return obj

    @property
    def order(self) -> int:
        return len(self.members)

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __contains__(self, x) -> bool:
        return bool(self.contains[x])

    def __eq__(self, other):
        if not isinstance(other, SubgroupSet):
            return NotImplemented
        return self.members == other.members and (
            self.parent is other.parent or self.parent.order == other.parent.order
        )

    def __hash__(self):
        return hash(self.members)

    def __le__(self, other: SubgroupSet) -> bool:
        return self.mask & ~other.mask == 0

    def __lt__(self, other: SubgroupSet) -> bool:
        return self.order < other.order and self <= other

    def __repr__(self):
        return f"SubgroupSet(order={self.order} in {self.parent.name or '?'})"

    @cached_property
    def contains(self) -> np.ndarray:
        mask = np.zeros(self.parent.order, dtype=bool)
        mask[list(self.members)] = True
        mask.setflags(write=False)
        return mask

    @cached_property
    def mask(self) -> int:
        return _mask_to_int(self.contains)

    @cached_property
    def array(self) -> np.ndarray:
        return np.array(self.members, dtype=np.int64)

    @cached_property
    def gens(self) -> tuple[int, ...]:
        """A small generating set, chosen greedily from high-order elements."""
        g = self.parent
        orders = g.element_orders[self.array]
        ranked = self.array[np.lexsort((self.array, -orders))]
        cur = np.zeros(g.order, dtype=bool)
        cur[0] = True
        gens: list[int] = []
        for x in ranked:
            if cur[x]:
                continue
            gens.append(int(x))
            cur = _closure_mask(g, gens, start=cur)
            if cur.sum() == self.order:
                break
        return tuple(gens)

    def is_abelian(self) -> bool:
        m = self.parent.mul
        gs = list(self.gens)
        return all(m[a, b] == m[b, a] for a in gs for b in gs)

    def is_cyclic(self) -> bool:
        return bool((self.parent.element_orders[self.array] == self.order).any())

    @cached_property
    def primes(self) -> frozenset[int]:
        return primes_of(self.order)

    def is_p_group(self) -> bool:
        return len(self.primes) <= 1

    def is_elementary_abelian(self) -> bool:
        if self.order == 1:
            return True
        if len(self.primes) != 1 or not self.is_abelian():
            return False
        (p,) = self.primes
        return bool((self.parent.element_orders[self.array[1:]] == p).all())


def _closure_mask(g: GroupTable, gens: Sequence[int], start: np.ndarray | None = None) -> np.ndarray:
    """Boolean mask of the subgroup generated by ``gens`` (and ``start``).

    ``start`` must already be a subset of the result.
    """
    n = g.order
    inside = np.zeros(n, dtype=bool) if start is None else start.copy()
    inside[0] = True
    gens_arr = np.array(sorted(set(int(x) for x in gens) - {0}), dtype=np.int64)
    if len(gens_arr) == 0:
        return inside
    frontier = np.flatnonzero(inside)
    mul = g.mul
    while len(frontier):
        cand = mul[frontier][:, gens_arr].ravel()
        cand = np.unique(cand[~inside[cand]])
        inside[cand] = True
        frontier = cand
    return inside


def _check_parent(g: GroupTable, *subs: SubgroupSet) -> None:
    for s in subs:
        if s.parent is not g and s.parent.order != g.order:
            raise ForeignSubgroup(f"subgroup of {s.parent.name} used with {g.name}")
        if s.parent is not g and not np.array_equal(s.parent.mul, g.mul):
            raise ForeignSubgroup(f"subgroup of {s.parent.name} used with {g.name}")


def subgroup_from_mask(g: GroupTable, mask: np.ndarray) -> SubgroupSet:
    return SubgroupSet._trusted(g, mask)


def generated_subgroup(g: GroupTable, seed: Iterable[int]) -> SubgroupSet:
    seed = [int(x) for x in seed]
    if any(not 0 <= x < g.order for x in seed):
        raise IndexError("element index out of range")
    return SubgroupSet._trusted(g, _closure_mask(g, seed))


def join(g: GroupTable, *subs: SubgroupSet) -> SubgroupSet:
    _check_parent(g, *subs)
    gens = [x for s in subs for x in s.gens]
    return generated_subgroup(g, gens)


def meet(g: GroupTable, *subs: SubgroupSet) -> SubgroupSet:
    _check_parent(g, *subs)
    mask = reduce(np.logical_and, [s.contains for s in subs])
    return SubgroupSet._trusted(g, mask)


def cyclic_subgroup(g: GroupTable, x: int) -> SubgroupSet:
    return generated_subgroup(g, [x])


def centralizer_mask(g: GroupTable, elements: Iterable[int]) -> np.ndarray:
    out = np.ones(g.order, dtype=bool)
    for x in elements:
        out &= g.mul[:, x] == g.mul[x, :]
    return out


def centralizer(g: GroupTable, x: SubgroupSet, within: SubgroupSet | None = None) -> SubgroupSet:
    """``C_G(X)``, or ``C_W(X)`` when ``within`` is given."""
    _check_parent(g, x)
    mask = centralizer_mask(g, x.gens)
    if within is not None:
        mask &= within.contains
    return SubgroupSet._trusted(g, mask)


def center(g: GroupTable) -> SubgroupSet:
    return centralizer(g, g.whole)


def normalizer(g: GroupTable, x: SubgroupSet, within: SubgroupSet | None = None) -> SubgroupSet:
    _check_parent(g, x)
    everything = np.arange(g.order)
    mask = np.ones(g.order, dtype=bool)
    for h in x.gens:
        mask &= x.contains[g.mul[g.mul[g.inv, h], everything]]
    if within is not None:
        mask &= within.contains
    return SubgroupSet._trusted(g, mask)


def conjugate(g: GroupTable, x: SubgroupSet, by: int) -> SubgroupSet:
    """``X^by = by^-1 X by``."""
    _check_parent(g, x)
    mask = np.zeros(g.order, dtype=bool)
    mask[g.conj(x.array, by)] = True
    return SubgroupSet._trusted(g, mask)


def commutator(g: GroupTable, x: SubgroupSet, y: SubgroupSet) -> SubgroupSet:
    """``[X, Y]``: generated by all ``x^-1 y^-1 x y``."""
    _check_parent(g, x, y)
    m = g.mul
    xa, ya = x.array, y.array
    comms = m[m[g.inv[xa][:, None], g.inv[ya][None, :]], m[xa[:, None], ya[None, :]]]
    return generated_subgroup(g, np.unique(comms).tolist())


def normalizes(g: GroupTable, acting: SubgroupSet, target: SubgroupSet) -> bool:
    for k in acting.gens:
        if not target.contains[g.conj(target.array, k)].all():
            return False
    return True


def is_normal(g: GroupTable, x: SubgroupSet, within: SubgroupSet | None = None) -> bool:
    return normalizes(g, within if within is not None else g.whole, x)


def conjugacy_orbit(g: GroupTable, x: SubgroupSet, under: SubgroupSet | None = None) -> list[SubgroupSet]:
    """All conjugates of ``x`` under ``under`` (default: the whole group), sorted."""
    under = under if under is not None else g.whole
    found = {x.members: x}
    frontier = [x]
    while frontier:
        nxt = []
        for s in frontier:
            for k in under.gens:
                c = conjugate(g, s, k)
                if c.members not in found:
                    found[c.members] = c
                    nxt.append(c)
        frontier = nxt
    return [found[k] for k in sorted(found)]


def product_set(g: GroupTable, x: SubgroupSet, y: SubgroupSet) -> np.ndarray:
    """Boolean mask of the element set ``XY``."""
    mask = np.zeros(g.order, dtype=bool)
    mask[g.mul[np.ix_(x.array, y.array)].ravel()] = True
    return mask


# --------------------------------------------------------------------------
# subgroup enumeration


def subgroups_of(g: GroupTable, within: SubgroupSet | None = None,
                 max_subgroups: int = DEFAULT_SUBGROUP_CAP) -> list[SubgroupSet]:
    """Every subgroup of ``within`` (default ``g``), sorted by (order, members).

    Seeds with all cyclic subgroups, then joins each known subgroup with each
    cyclic subgroup of prime-power order until nothing new appears.  Every
    subgroup is generated by its prime-power elements, so this reaches the
    same fixpoint as closing under all pairwise joins.
    """
    h = within if within is not None else g.whole
    found: dict[int, tuple[np.ndarray, tuple[int, ...]]] = {}
    cyc_pp: list[tuple[int, int, np.ndarray]] = []
    covered = np.zeros(g.order, dtype=bool)
    orders = g.element_orders
    triv = np.zeros(g.order, dtype=bool)
    triv[0] = True
    found[_mask_to_int(triv)] = (triv, ())
    # cyclic subgroups, one per generator class
    for x in h.members:
        if covered[x]:
            continue
        cm = _closure_mask(g, [x])
        # elements generating the same cyclic subgroup
        key = _mask_to_int(cm)
        if key not in found:
            found[key] = (cm, (x,))
            if len(primes_of(int(orders[x]))) == 1:
                cyc_pp.append((x, key, cm))
        idx = np.flatnonzero(cm)
        covered[idx[orders[idx] == orders[x]]] = True
    if len(found) > max_subgroups:
        raise LatticeTooLarge(f"more than {max_subgroups} subgroups")
    queue = list(found)
    qi = 0
    while qi < len(queue):
        key = queue[qi]
        qi += 1
        smask, sgens = found[key]
        for c, ckey, cmask in cyc_pp:
            if smask[c]:
                continue
            jm = _closure_mask(g, list(sgens) + [c], start=smask | cmask)
            jkey = _mask_to_int(jm)
            if jkey not in found:
                found[jkey] = (jm, sgens + (c,))
                queue.append(jkey)
                if len(found) > max_subgroups:
                    raise LatticeTooLarge(f"more than {max_subgroups} subgroups")
    subs = [SubgroupSet._trusted(g, m) for m, _ in found.values()]
    subs.sort(key=lambda s: (s.order, s.members))
    return subs


# --------------------------------------------------------------------------
# characteristic subgroups


def prime_set(g: GroupTable, x: SubgroupSet | None = None) -> frozenset[int]:
    return primes_of(g.order if x is None else x.order)


def sylow(g: GroupTable, p: int, within: SubgroupSet | None = None) -> list[SubgroupSet]:
    """All Sylow ``p``-subgroups of ``within`` (default ``g``)."""
    _require_prime(p)
    h = within if within is not None else g.whole
    target = pi_part(h.order, [p])
    orders = g.element_orders
    p_elems = h.array[np.isin(orders[h.array], [p**k for k in range(1, 64) if p**k <= target])]
    cur = g.trivial
    while cur.order < target:
        nrm = normalizer(g, cur, within=h)
        cands = p_elems[nrm.contains[p_elems] & ~cur.contains[p_elems]]
        cur = SubgroupSet._trusted(g, _closure_mask(g, list(cur.gens) + [int(cands[0])], start=cur.contains))
    return conjugacy_orbit(g, cur, under=h)


def o_p(g: GroupTable, p: int, within: SubgroupSet | None = None) -> SubgroupSet:
    """Largest normal ``p``-subgroup: the intersection of all Sylow ``p``-subgroups."""
    return meet(g, *sylow(g, p, within))


def o_pi(g: GroupTable, primes: Iterable[int], within: SubgroupSet | None = None) -> SubgroupSet:
    """Product of the ``O_p`` for nilpotent inputs; for cyclic groups this is the Hall subgroup."""
    primes = [p for p in primes if (within or g.whole).order % p == 0]
    parts = [o_p(g, p, within) for p in primes]
    return join(g, *parts) if parts else g.trivial


def hall(g: GroupTable, primes: Iterable[int], within: SubgroupSet | None = None) -> list[SubgroupSet]:
    h = within if within is not None else g.whole
    target = pi_part(h.order, primes)
    return [s for s in subgroups_of(g, h) if s.order == target]


def is_hall(g: GroupTable, x: SubgroupSet, within: SubgroupSet | None = None) -> bool:
    h_order = (within or g.whole).order
    return math.gcd(x.order, h_order // x.order) == 1


def is_nilpotent(g: GroupTable, x: SubgroupSet | None = None) -> bool:
    h = x if x is not None else g.whole
    for p in h.primes:
        if len(sylow(g, p, h)) != 1:
            return False
    return True


def omega1(g: GroupTable, p: int, within: SubgroupSet | None = None) -> SubgroupSet:
    _require_prime(p)
    h = within if within is not None else g.whole
    return generated_subgroup(g, h.array[g.element_orders[h.array] == p].tolist())


def frattini(g: GroupTable, within: SubgroupSet | None = None) -> SubgroupSet:
    """Intersection of the maximal subgroups of ``within`` (default ``g``)."""
    h = within if within is not None else g.whole
    if h.order == 1:
        return h
    if h.is_cyclic():
        (x,) = [int(v) for v in h.array[g.element_orders[h.array] == h.order][:1]]
        rad = math.prod(h.primes)
        return cyclic_subgroup(g, g.power(x, rad))
    subs = [s for s in subgroups_of(g, h) if s.order < h.order]
    maximal = [s for s in subs if not any(s < t for t in subs)]
    return meet(g, *maximal)


def power_automorphism_inducers(g: GroupTable, n: SubgroupSet, within: SubgroupSet | None = None) -> SubgroupSet:
    """``Pot(N)``: elements normalising every subgroup of ``n``.

    Normalising every cyclic subgroup of ``n`` already forces normalising
    every subgroup, so only cyclic subgroups are intersected.
    """
    _check_parent(g, n)
    mask = np.ones(g.order, dtype=bool) if within is None else within.contains.copy()
    done = np.zeros(g.order, dtype=bool)
    everything = np.arange(g.order)
    for x in n.members:
        if done[x]:
            continue
        c = cyclic_subgroup(g, x)
        done[c.array[g.element_orders[c.array] == g.element_orders[x]]] = True
        mask &= c.contains[g.mul[g.mul[g.inv, x], everything]]
    return SubgroupSet._trusted(g, mask)


# --------------------------------------------------------------------------
# derived groups


def subgroup_table(g: GroupTable, h: SubgroupSet, name: str | None = None) -> GroupTable:
    """``h`` as a stand-alone group, elements renumbered in member order."""
    _check_parent(g, h)
    idx = np.full(g.order, -1, dtype=np.int64)
    idx[h.array] = np.arange(h.order)
    mul = idx[g.mul[np.ix_(h.array, h.array)]]
    inv = idx[g.inv[h.array]]
    perms = tuple(g.perms[i] for i in h.members) if g.perms is not None else None
    return GroupTable(mul, inv, tuple(g.labels[i] for i in h.members),
                      name or f"{g.name}[{h.order}]", perms=perms)


def quotient(g: GroupTable, m: SubgroupSet, name: str | None = None) -> GroupTable:
    """``G/M`` for normal ``m``; cosets are numbered by their least element."""
    _check_parent(g, m)
    if not is_normal(g, m):
        raise ValueError("quotient by a non-normal subgroup")
    rep = g.mul[:, m.array].min(axis=1).astype(np.int64)
    reps = np.unique(rep)
    pos = np.full(g.order, -1, dtype=np.int64)
    pos[reps] = np.arange(len(reps))
    coset = pos[rep]
    mul = coset[g.mul[np.ix_(reps, reps)]]
    inv = coset[g.inv[reps]]
    labels = tuple(f"{g.labels[r]}M" if r else "M" for r in reps)
    return GroupTable(mul, inv, labels, name or f"{g.name}/{m.order}")


def fingerprint(g: GroupTable) -> tuple:
    """Cheap isomorphism invariant: element-order and subgroup-order multisets."""
    eo = tuple(sorted(Counter(g.element_orders.tolist()).items()))
    so = tuple(sorted(Counter(s.order for s in subgroups_of(g)).items()))
    return (g.order, eo, so)


# --------------------------------------------------------------------------
# query-style entry points


def subgroup_calculus(g: GroupTable, query: str, *args):
    """Dispatch ``centralizer``, ``normalizer``, ``commutator``, ``center`` or ``conjugate``."""
    table = {
        "centralizer": centralizer,
        "normalizer": normalizer,
        "commutator": commutator,
        "center": center,
        "conjugate": conjugate,
    }
    if query not in table:
        raise ValueError(f"unknown subgroup query {query!r}")
    return table[query](g, *args)


def characteristic_series(g: GroupTable, query: str, *args):
    """Dispatch ``frattini``, ``omega1``, ``o_p``, ``sylow``, ``hall``,
    ``is_nilpotent``, ``is_hall`` or ``prime_set``."""
    table = {
        "frattini": frattini,
        "omega1": omega1,
        "o_p": o_p,
        "sylow": sylow,
        "hall": hall,
        "is_nilpotent": is_nilpotent,
        "is_hall": is_hall,
        "prime_set": prime_set,
    }
    if query not in table:
        raise ValueError(f"unknown series query {query!r}")
    return table[query](g, *args)
