"""Battens, L9-avoiding actions and membership in the class 𝔏.

A group is in 𝔏 with type ``(N, K)`` when

* FL1: ``G = N ⋊ K`` with ``N`` a normal nilpotent Hall subgroup whose
  Sylow subgroups have modular lattices and ``K`` a batten group;
* FL2: every batten of ``K`` centralises or avoids L9 on each ``O_p(N)``;
* FL3: distinct Sylows of ``N`` moved by a Sylow ``Q`` of ``K`` have
  distinct centralisers in ``Q``;
* FL4: the (H, L, J) condition checked by :func:`fl4_check`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product
from typing import Sequence

import numpy as np

from .errors import HypothesisUnmet, NotCoprime, NotInvariant
from .group_core import (
    GroupTable,
    SubgroupSet,
    center,
    centralizer,
    commutator,
    conjugacy_orbit,
    cyclic_subgroup,
    factorize,
    frattini,
    generated_subgroup,
    is_normal,
    join,
    normalizes,
    power_automorphism_inducers,
    primes_of,
    quotient,
    subgroup_from_mask,
    subgroup_table,
    subgroups_of,
    sylow,
)
from .lattice_core import build_lattice, is_modular

DEFAULT_TRIPLE_CAP = 10**6


# --------------------------------------------------------------------------
# small helpers


def _whole(g: GroupTable, x: SubgroupSet | None) -> SubgroupSet:
    return g.whole if x is None else x


def _pi_elements(g: GroupTable, x: SubgroupSet, primes) -> np.ndarray:
    """Mask of elements of ``x`` whose order only involves ``primes``."""
    primes = set(primes)
    orders = g.element_orders
    ok = np.array([primes_of(int(o)) <= primes for o in range(orders.max() + 1)])
    mask = np.zeros(g.order, dtype=bool)
    mask[x.array] = ok[orders[x.array]]
    return mask


def sylow_of_nilpotent(g: GroupTable, n: SubgroupSet, p: int) -> SubgroupSet:
    """``O_p(N)`` for nilpotent ``N``: its ``p``-elements."""
    return subgroup_from_mask(g, _pi_elements(g, n, [p]))


def _cyclic_generator(g: GroupTable, x: SubgroupSet) -> int:
    hits = x.array[g.element_orders[x.array] == x.order]
    return int(hits[0])


def _cyclic_chain(g: GroupTable, x: SubgroupSet) -> list[SubgroupSet]:
    """All subgroups of a cyclic group, smallest first."""
    gen = _cyclic_generator(g, x)
    divisors = sorted(d for d in range(1, x.order + 1) if x.order % d == 0)
    return [cyclic_subgroup(g, g.power(gen, x.order // d)) for d in divisors]


def is_q8(g: GroupTable, x: SubgroupSet) -> bool:
    if x.order != 8 or x.is_abelian():
        return False
    return int((g.element_orders[x.array] == 2).sum()) == 1


def is_alt4(t: GroupTable) -> bool:
    """Alt4 is the only group of order 12 with three involutions and eight elements of order 3."""
    if t.order != 12:
        return False
    counts = np.bincount(t.element_orders, minlength=7)
    return counts[1] == 1 and counts[2] == 3 and counts[3] == 8


def irreducible(g: GroupTable, acting: SubgroupSet, v: SubgroupSet) -> bool:
    """``acting`` leaves no proper non-trivial subgroup of ``v`` invariant.

    ``v`` is assumed elementary abelian and normalised by ``acting``; the
    check asks whether every non-identity element generates ``v`` as an
    ``acting``-invariant subgroup.
    """
    if v.order == 1:
        return False
    done = np.zeros(g.order, dtype=bool)
    acts = acting.array
    for x in v.members[1:]:
        if done[x]:
            continue
        orbit = np.unique(g.conj(x, acts))
        if generated_subgroup(g, orbit.tolist()).order != v.order:
            return False
        done[cyclic_subgroup(g, x).array] = True
    return True


def induces_power_automorphisms(g: GroupTable, acting: SubgroupSet, v: SubgroupSet) -> bool:
    pot = power_automorphism_inducers(g, v)
    return bool(pot.contains[acting.array].all())


def acts_trivially(g: GroupTable, acting: SubgroupSet, v: SubgroupSet) -> bool:
    return commutator(g, v, acting).order == 1


# --------------------------------------------------------------------------
# battens


@dataclass(frozen=True, eq=False)
class BattenInfo:
    """A batten: ``kind`` is ``"cyclic"``, ``"q8"`` or ``"non_nilpotent"``.

    For non-nilpotent battens ``heart`` is the normal subgroup of prime
    order ``q`` and ``top`` a cyclic Sylow ``r``-subgroup.
    """

    kind: str
    subgroup: SubgroupSet
    p: int = 0
    exponent: int = 0
    q: int = 0
    r: int = 0
    heart: SubgroupSet | None = None
    top: SubgroupSet | None = None

    @property
    def order(self) -> int:
        return self.subgroup.order

    def describe(self) -> str:
        if self.kind == "cyclic":
            return f"C{self.order}"
        if self.kind == "q8":
            return "Q8"
        return f"C{self.q}:C{self.top.order}"


@dataclass(frozen=True)
class NotABatten:
    reason: str

    def __bool__(self):
        return False


@dataclass(frozen=True)
class NotABattenGroup:
    reason: str

    def __bool__(self):
        return False


def batten_kind(g: GroupTable, x: SubgroupSet | None = None):
    """Classify ``x`` (default: all of ``g``) as a batten or return NotABatten."""
    x = _whole(g, x)
    n = x.order
    fac = factorize(n)
    if n == 1:
        return NotABatten("trivial group")
    if len(fac) == 1:
        ((p, e),) = fac.items()
        if x.is_cyclic():
            return BattenInfo("cyclic", x, p=p, exponent=e)
        if is_q8(g, x):
            return BattenInfo("q8", x, p=2, exponent=3)
        return NotABatten(f"{p}-group of order {n} is neither cyclic nor Q8")
    if len(fac) != 2:
        return NotABatten(f"order {n} involves {len(fac)} primes")
    for q, r in (tuple(fac), tuple(fac)[::-1]):
        if fac[q] != 1:
            continue
        heart = sylow(g, q, x)
        if len(heart) != 1:
            continue
        heart = heart[0]
        top = sylow(g, r, x)[0]
        if not top.is_cyclic():
            return NotABatten(f"Sylow {r}-subgroup is not cyclic")
        c = centralizer(g, heart, within=top)
        phi = frattini(g, top)
        if c.members != phi.members:
            return NotABatten(f"C_R(Q) has order {c.order}, Φ(R) has order {phi.order}")
        if phi.order == 1:
            return NotABatten("Φ(R) is trivial")
        return BattenInfo("non_nilpotent", x, q=q, r=r, heart=heart, top=top)
    return NotABatten("no normal Sylow subgroup of prime order")


def batten_factorization(g: GroupTable, x: SubgroupSet | None = None):
    """Split ``x`` into battens of pairwise coprime order, or NotABattenGroup.

    Primes are linked when some ``p``-element and some ``q``-element fail
    to commute; each linked class ``π`` must give a normal Hall factor (the
    ``π``-elements), the factors must multiply to ``x`` and commute, and
    each factor must be a batten.
    """
    x = _whole(g, x)
    if x.order == 1:
        return []
    primes = sorted(x.primes)
    pel = {p: x.array[_pi_elements(g, x, [p])[x.array]] for p in primes}
    parent = {p: p for p in primes}

    def find(p):
        while parent[p] != p:
            p = parent[p]
        return p

    for a in range(len(primes)):
        for b in range(a + 1, len(primes)):
            p, q = primes[a], primes[b]
            P, Q = pel[p], pel[q]
            if not np.array_equal(g.mul[np.ix_(P, Q)], g.mul[np.ix_(Q, P)].T):
                parent[find(q)] = find(p)
    classes: dict[int, list[int]] = {}
    for p in primes:
        classes.setdefault(find(p), []).append(p)
    factors = []
    for pi in sorted(classes.values()):
        mask = _pi_elements(g, x, pi)
        size = int(mask.sum())
        target = math.prod(p ** factorize(x.order)[p] for p in pi)
        if size != target:
            return NotABattenGroup(f"{'/'.join(map(str, pi))}-elements do not form a Hall subgroup")
        idx = np.flatnonzero(mask)
        if not mask[g.mul[np.ix_(idx, idx)]].all():
            return NotABattenGroup(f"{'/'.join(map(str, pi))}-elements are not closed")
        factors.append(subgroup_from_mask(g, mask))
    # factors of coprime order commuting elementwise give a direct product
    for a in range(len(factors)):
        for b in range(a + 1, len(factors)):
            A, B = factors[a].array, factors[b].array
            if not np.array_equal(g.mul[np.ix_(A, B)], g.mul[np.ix_(B, A)].T):
                return NotABattenGroup("Hall factors do not commute")
    out = []
    for f in factors:
        info = batten_kind(g, f)
        if not info:
            return NotABattenGroup(f"factor of order {f.order} is not a batten: {info.reason}")
        out.append(info)
    assert math.prod(b.order for b in out) == x.order
    return out


def is_batten_group(g: GroupTable, x: SubgroupSet | None = None) -> bool:
    return not isinstance(batten_factorization(g, x), NotABattenGroup)


# --------------------------------------------------------------------------
# avoidance


@dataclass(frozen=True, eq=False)
class AvoidanceCertificate:
    """Why ``batten`` centralises or avoids L9 on the ``p``-group ``target``.

    ``type`` is one of ``centralizes``, ``std``, ``cent``, ``hamil``, ``q8``,
    ``Cy``, ``NN``.
    """

    batten: BattenInfo
    p: int
    target: SubgroupSet
    type: str
    data: dict = field(default_factory=dict)

    def __bool__(self):
        return True


@dataclass(frozen=True, eq=False)
class NotAvoiding:
    batten: BattenInfo
    p: int
    target: SubgroupSet
    reason: str

    def __bool__(self):
        return False


def _cyclic_type(g: GroupTable, Q: SubgroupSet, P: SubgroupSet) -> tuple[str | None, dict, str]:
    """Type of the action of the cyclic ``q``-group ``Q`` on ``P``.

    Returns ``(type, data, reason)`` with ``type`` None when no clause holds.
    """
    pq = commutator(g, P, Q)
    cpq = centralizer(g, Q, within=P)
    data = {"[P,Q]": pq.order, "C_P(Q)": cpq.order}
    chain = _cyclic_chain(g, Q)
    reasons = []
    # std
    if pq.order == P.order and P.is_elementary_abelian():
        verdicts = []
        ok = True
        for U in chain:
            if irreducible(g, U, P):
                verdicts.append((U.order, "irreducible"))
            elif induces_power_automorphisms(g, U, P):
                verdicts.append((U.order, "power"))
            else:
                verdicts.append((U.order, "neither"))
                ok = False
        if ok:
            return "std", {**data, "subgroups": verdicts}, ""
        reasons.append("std: a subgroup of Q is neither irreducible nor power on P")
    else:
        reasons.append("std: [P,Q] is not all of an elementary abelian P")
    # cent
    if pq.is_elementary_abelian() and P.is_abelian():
        if cpq.order > 1 and cpq.is_cyclic() and cpq.primes == {2}:
            verdicts = []
            ok = True
            for U in chain:
                if acts_trivially(g, U, pq):
                    verdicts.append((U.order, "trivial"))
                elif irreducible(g, U, pq):
                    verdicts.append((U.order, "irreducible"))
                else:
                    verdicts.append((U.order, "neither"))
                    ok = False
            if ok:
                return "cent", {**data, "subgroups": verdicts}, ""
            reasons.append("cent: a subgroup of Q is neither irreducible nor trivial on [P,Q]")
        else:
            reasons.append("cent: C_P(Q) is not a non-trivial cyclic 2-group")
    else:
        reasons.append("cent: [P,Q] not elementary abelian or P not abelian")
    # hamil
    if is_q8(g, pq) and Q.primes == {3}:
        ok_split = P.order == 8
        if P.order == 16:
            outside = [int(i) for i in P.array if g.element_orders[i] == 2 and not pq.contains[i]]
            ok_split = any(
                all(g.mul[i, y] == g.mul[y, i] for y in pq.members) for i in outside
            )
        if ok_split:
            x = join(g, pq, Q)
            zx = centralizer(g, x, within=x)
            if is_alt4(quotient(subgroup_table(g, x), _relabel(g, x, zx))):
                return "hamil", {**data, "P/[P,Q]": P.order // 8}, ""
            reasons.append("hamil: [P,Q]Q/Z([P,Q]Q) is not Alt4")
        else:
            reasons.append("hamil: P is not [P,Q] x I with |I| <= 2")
    else:
        reasons.append("hamil: [P,Q] is not Q8 or Q is not a 3-group")
    return None, data, "; ".join(reasons)


def _relabel(g: GroupTable, x: SubgroupSet, sub: SubgroupSet) -> SubgroupSet:
    """``sub`` (inside ``x``) as a subgroup of ``subgroup_table(g, x)``."""
    t = subgroup_table(g, x)
    pos = {m: i for i, m in enumerate(x.members)}
    return SubgroupSet(t, tuple(sorted(pos[m] for m in sub.members)))


def action_avoidance(g: GroupTable, batten: BattenInfo, target: SubgroupSet):
    """Decide whether ``batten`` centralises or avoids L9 on the ``p``-group ``target``.

    Returns an AvoidanceCertificate or NotAvoiding.
    """
    B, P = batten.subgroup, target
    if math.gcd(B.order, P.order) != 1:
        raise NotCoprime(f"batten of order {B.order} and target of order {P.order}")
    if not normalizes(g, B, P):
        raise NotInvariant("the batten does not normalise the target")
    if P.order > 1 and len(P.primes) != 1:
        raise ValueError("target must be a p-group")
    p = next(iter(P.primes)) if P.order > 1 else 0
    if acts_trivially(g, B, P):
        return AvoidanceCertificate(batten, p, P, "centralizes")
    if batten.kind == "cyclic":
        kind, data, reason = _cyclic_type(g, B, P)
        if kind is None:
            return NotAvoiding(batten, p, P, reason)
        return AvoidanceCertificate(batten, p, P, kind, data)
    if batten.kind == "q8":
        faithful = centralizer(g, P, within=B).order == 1
        data = {"p mod 4": p % 4, "|P|": P.order, "faithful": faithful}
        if p % 4 == 3 and P.order == p * p and faithful:
            return AvoidanceCertificate(batten, p, P, "q8", data)
        return NotAvoiding(batten, p, P, f"Q8 action needs p = 3 mod 4, |P| = p^2, faithful; got {data}")
    # non-nilpotent batten
    zb = centralizer(g, B, within=B)
    if acts_trivially(g, zb, P):
        return NotAvoiding(batten, p, P, "[P, Z(B)] = 1")
    heart = batten.heart
    tops = sylow(g, batten.r, B)
    reasons = []
    if acts_trivially(g, heart, P):
        sub = {}
        ok = True
        for R in tops:
            kind, data, reason = _cyclic_type(g, R, P)
            if kind is None:
                ok = False
                reasons.append(f"Cy: Sylow {batten.r}-subgroup fails ({reason})")
                break
            sub[R.members] = kind
        if ok:
            return AvoidanceCertificate(batten, p, P, "Cy", {"sylow_types": sorted(set(sub.values()))})
    else:
        reasons.append("Cy: heart does not centralise P")
    idx = B.order // join(g, heart, zb).order
    if P.is_elementary_abelian() and P.order == p**idx:
        sylows = [heart] + tops
        if all(irreducible(g, S, P) for S in sylows):
            if induces_power_automorphisms(g, zb, P):
                return AvoidanceCertificate(batten, p, P, "NN", {"|B:B(B)Z(B)|": idx, "|P|": P.order})
            reasons.append("NN: Z(B) does not induce power automorphisms")
        else:
            reasons.append("NN: some Sylow subgroup of B is reducible on P")
    else:
        reasons.append(f"NN: P is not elementary abelian of order p^{idx}")
    return NotAvoiding(batten, p, P, "; ".join(reasons))


# --------------------------------------------------------------------------
# FL4


@dataclass(frozen=True, eq=False)
class FL4Holds:
    triples: int

    def __bool__(self):
        return True


@dataclass(frozen=True, eq=False)
class FL4Violation:
    H: SubgroupSet
    L: SubgroupSet
    J: SubgroupSet
    pi: frozenset[int]

    def __bool__(self):
        return False


@dataclass(frozen=True, eq=False)
class FL4Inconclusive:
    triples: int

    def __bool__(self):
        return False


def _o_q_cyclic(g: GroupTable, L: SubgroupSet, primes) -> SubgroupSet:
    """``O_π(L)`` of a cyclic group ``L``."""
    return subgroup_from_mask(g, _pi_elements(g, L, primes))


def fl4_check(g: GroupTable, n: SubgroupSet, k: SubgroupSet,
              subgroups: Sequence[SubgroupSet] | None = None,
              triple_cap: int = DEFAULT_TRIPLE_CAP):
    """Search for (H, L, J) violating FL4.

    Only cyclic ``L`` with at least two prime divisors can violate: with a
    single prime one of ``O_π(L)``, ``O_π'(L)`` is trivial and is
    centralised by every element of ``HJ``.  ``H = 1`` is skipped for the
    same reason.
    """
    subs = subgroups if subgroups is not None else subgroups_of(g)
    in_n = [s for s in subs if s <= n]
    in_k = [s for s in subs if s <= k]
    abelian_n = [s for s in in_n if s.order > 1 and s.is_abelian()]
    cyclic_k = [s for s in in_k if s.is_cyclic() and len(s.primes) >= 2]
    if not cyclic_k:
        return FL4Holds(0)

    def noncyclic_sylows(h: SubgroupSet) -> bool:
        for p in h.primes:
            if sylow_of_nilpotent(g, h, p).is_cyclic():
                return False
        return True

    triples = 0
    for H in abelian_n:
        if not noncyclic_sylows(H):
            continue
        pot = power_automorphism_inducers(g, H, within=k)
        for L in cyclic_k:
            if not L <= pot:
                continue
            cl_h = centralizer(g, H, within=L)
            if primes_of(L.order // cl_h.order) != L.primes:
                continue
            for J in abelian_n:
                triples += 1
                if triples > triple_cap:
                    return FL4Inconclusive(triples)
                if math.gcd(H.order, J.order) != 1 or not normalizes(g, L, J):
                    continue
                if commutator(g, H, J).order != 1:
                    continue
                cl_j = centralizer(g, J, within=L)
                if centralizer(g, cl_j, within=H).order != 1:
                    continue
                pi = set()
                for q in L.primes:
                    oq = _o_q_cyclic(g, L, [q])
                    ch = centralizer(g, H, within=oq)
                    cj = centralizer(g, J, within=oq)
                    if ch.order < cj.order and ch <= cj:
                        pi.add(q)
                o_pi = _o_q_cyclic(g, L, pi)
                o_rest = _o_q_cyclic(g, L, L.primes - pi)
                hj = np.unique(g.mul[np.ix_(H.array, J.array)])
                hj = hj[hj != 0]
                fixed = False
                for O in (o_pi, o_rest):
                    cmask = np.ones(g.order, dtype=bool)
                    for x in O.gens:
                        cmask &= g.mul[:, x] == g.mul[x, :]
                    if cmask[hj].any():
                        fixed = True
                        break
                if not fixed:
                    return FL4Violation(H, L, J, frozenset(pi))
    return FL4Holds(triples)


# --------------------------------------------------------------------------
# class membership


@dataclass(eq=False)
class Candidate:
    """One (N, K) decomposition and how far it got through FL1-FL4."""

    N: SubgroupSet
    K: SubgroupSet | None
    passed: list[str] = field(default_factory=list)
    failure: str | None = None
    battens: list[BattenInfo] = field(default_factory=list)
    certificates: list[AvoidanceCertificate] = field(default_factory=list)
    fl3_table: list[tuple] = field(default_factory=list)
    fl4: object = None

    @property
    def ok(self) -> bool:
        return self.failure is None and self.passed == ["FL1", "FL2", "FL3", "FL4"]


@dataclass(eq=False)
class ClassLWitness:
    """Verdict of :func:`class_l_membership`.

    ``verdict`` is ``IN_CLASS``, ``NOT_IN_CLASS`` or ``INCONCLUSIVE``;
    ``type`` is the successful candidate when in the class.
    """

    group: str
    verdict: str
    type: Candidate | None
    candidates: list[Candidate]

    @property
    def in_class(self) -> bool:
        return self.verdict == "IN_CLASS"

    def reasons(self) -> list[str]:
        return [f"N order {c.N.order}, K order {c.K.order if c.K else '-'}: {c.failure}"
                for c in self.candidates if c.failure]


def normal_nilpotent_hall_candidates(g: GroupTable, subs: Sequence[SubgroupSet]) -> list[SubgroupSet]:
    """Normal nilpotent Hall subgroups whose Sylow subgroups are modular, largest first."""
    out = []
    for s in subs:
        if math.gcd(s.order, g.order // s.order) != 1:
            continue
        if not is_normal(g, s):
            continue
        if not _is_nilpotent(g, s):
            continue
        if all(_modular_p_group(g, sylow_of_nilpotent(g, s, p)) for p in s.primes):
            out.append(s)
    out.sort(key=lambda s: (-s.order, s.members))
    return out


def _is_nilpotent(g: GroupTable, s: SubgroupSet) -> bool:
    """Nilpotent iff the ``p``-elements form a subgroup of full ``p``-power order for each ``p``."""
    fac = factorize(s.order)
    total = 1
    for p, e in fac.items():
        mask = _pi_elements(g, s, [p])
        if int(mask.sum()) != p**e:
            return False
        total *= p**e
    return True


_MODULAR_CACHE: dict[tuple[str, tuple], bool] = {}


def _modular_p_group(g: GroupTable, p: SubgroupSet) -> bool:
    if p.order <= 2 or p.is_cyclic():
        return True
    key = (g.digest, p.members)
    if key not in _MODULAR_CACHE:
        _MODULAR_CACHE[key] = is_modular(build_lattice(subgroup_table(g, p)))
    return _MODULAR_CACHE[key]


def complements(g: GroupTable, n: SubgroupSet, subs: Sequence[SubgroupSet]) -> list[SubgroupSet]:
    """Complements of ``n``, one per conjugacy class (conjugate complements give the same verdict)."""
    target = g.order // n.order
    out = []
    seen: set[tuple] = set()
    for s in subs:
        if s.order != target or s.members in seen:
            continue
        if (s.contains & n.contains).sum() != 1:
            continue
        out.append(s)
        for c in conjugacy_orbit(g, s):
            seen.add(c.members)
    return out


def _evaluate(g: GroupTable, n: SubgroupSet, k: SubgroupSet, subs, triple_cap: int) -> Candidate:
    cand = Candidate(n, k)
    fac = batten_factorization(g, k)
    if isinstance(fac, NotABattenGroup):
        cand.failure = f"FL1: K is not a batten group ({fac.reason})"
        return cand
    cand.battens = fac
    cand.passed.append("FL1")
    sylows_n = {p: sylow_of_nilpotent(g, n, p) for p in sorted(n.primes)}
    for b in fac:
        for p, P in sylows_n.items():
            cert = action_avoidance(g, b, P)
            if not cert:
                cand.failure = f"FL2: batten {b.describe()} on O_{p}(N): {cert.reason}"
                return cand
            cand.certificates.append(cert)
    cand.passed.append("FL2")
    for q in sorted(k.primes):
        for Q in sylow(g, q, k):
            moved = [(p, P) for p, P in sylows_n.items() if not acts_trivially(g, Q, P)]
            cents = {p: centralizer(g, P, within=Q) for p, P in moved}
            cand.fl3_table.append((q, Q.members, {p: c.order for p, c in cents.items()}))
            for (p1, _), (p2, _) in ((a, b) for i, a in enumerate(moved) for b in moved[i + 1:]):
                if cents[p1].members == cents[p2].members:
                    cand.failure = (f"FL3: a Sylow {q}-subgroup of K has equal centralisers "
                                    f"in O_{p1}(N) and O_{p2}(N)")
                    return cand
    cand.passed.append("FL3")
    res = fl4_check(g, n, k, subs, triple_cap)
    cand.fl4 = res
    if isinstance(res, FL4Violation):
        cand.failure = (f"FL4: violated by |H|={res.H.order}, |L|={res.L.order}, "
                        f"|J|={res.J.order}, pi={sorted(res.pi)}")
        return cand
    if isinstance(res, FL4Inconclusive):
        cand.failure = f"FL4: inconclusive after {res.triples} triples"
        return cand
    cand.passed.append("FL4")
    return cand


def class_l_membership(g: GroupTable, subgroups: Sequence[SubgroupSet] | None = None,
                       triple_cap: int = DEFAULT_TRIPLE_CAP, exhaustive: bool = False) -> ClassLWitness:
    """Decide membership in 𝔏 by trying every candidate type ``(N, K)``.

    Candidates run with ``|N|`` descending; the first success wins unless
    ``exhaustive`` is set, in which case every candidate is evaluated.
    """
    subs = list(subgroups) if subgroups is not None else subgroups_of(g)
    cands: list[Candidate] = []
    winner = None
    inconclusive = False
    for n in normal_nilpotent_hall_candidates(g, subs):
        ks = complements(g, n, subs)
        if not ks:
            cands.append(Candidate(n, None, failure="FL1: N has no complement"))
            continue
        for k in ks:
            c = _evaluate(g, n, k, subs, triple_cap)
            cands.append(c)
            if isinstance(c.fl4, FL4Inconclusive):
                inconclusive = True
            if c.ok and winner is None:
                winner = c
                if not exhaustive:
                    break
        if winner is not None and not exhaustive:
            break
    if winner is not None:
        verdict = "IN_CLASS"
    elif inconclusive:
        verdict = "INCONCLUSIVE"
    else:
        verdict = "NOT_IN_CLASS"
    return ClassLWitness(g.name, verdict, winner, cands)


def decomposition_report(g: GroupTable, subgroups: Sequence[SubgroupSet] | None = None) -> dict:
    """Every candidate (N, K) with its per-condition outcome."""
    w = class_l_membership(g, subgroups, exhaustive=True)
    rows = []
    for c in w.candidates:
        rows.append({
            "N": c.N.order,
            "K": c.K.order if c.K is not None else None,
            "passed": list(c.passed),
            "failure": c.failure,
            "battens": [b.describe() for b in c.battens],
            "avoidance": [(b.batten.describe(), b.p, b.type) for b in c.certificates],
        })
    return {"group": g.name, "verdict": w.verdict, "candidates": rows}


# --------------------------------------------------------------------------
# FL4 on a coprime linear action model


@dataclass(frozen=True, eq=False)
class Block:
    """An elementary abelian ``p``-group ``F_p^d`` belonging to ``H`` or ``J``.

    ``matrices[i]`` is the action of acting generator ``i`` (column vectors).
    """

    role: str
    p: int
    d: int
    matrices: tuple[np.ndarray, ...]


@dataclass(frozen=True, eq=False)
class CoprimeActionSystem:
    """A cyclic group ``L``, given by commuting generators of coprime orders,
    acting linearly on ``H = ⊕ H-blocks`` and ``J = ⊕ J-blocks``."""

    generators: tuple[str, ...]
    blocks: tuple[Block, ...]

    def __post_init__(self):
        for b in self.blocks:
            if b.role not in ("H", "J"):
                raise ValueError(f"block role must be H or J, not {b.role!r}")
            if len(b.matrices) != len(self.generators):
                raise ValueError("each block needs one matrix per generator")
            for m in b.matrices:
                if m.shape != (b.d, b.d):
                    raise ValueError("matrix shape does not match block dimension")
                if _det_mod(m, b.p) == 0:
                    raise ValueError(f"matrix not invertible mod {b.p}")
        for b in self.blocks:
            for i in range(len(self.generators)):
                for j in range(i + 1, len(self.generators)):
                    a, c = b.matrices[i], b.matrices[j]
                    if not np.array_equal(a @ c % b.p, c @ a % b.p):
                        raise ValueError("generators do not commute")
        orders = self.generator_orders
        for i in range(len(orders)):
            for j in range(i + 1, len(orders)):
                if math.gcd(orders[i], orders[j]) != 1:
                    raise ValueError("generator orders are not coprime, L would not be cyclic")
        for b in self.blocks:
            if self.order % b.p == 0:
                raise ValueError(f"|L| = {self.order} is not coprime to {b.p}")

    @property
    def generator_orders(self) -> tuple[int, ...]:
        return tuple(
            math.lcm(*[_mat_order(b.matrices[i], b.p) for b in self.blocks])
            for i in range(len(self.generators))
        )

    @property
    def order(self) -> int:
        return math.prod(self.generator_orders)

    def element(self, exponents: Sequence[int]) -> list[np.ndarray]:
        """Per-block matrices of ``∏ gen_i^{e_i}``."""
        out = []
        for b in self.blocks:
            m = np.eye(b.d, dtype=np.int64)
            for mat, e in zip(b.matrices, exponents):
                m = m @ _mat_pow(mat, e, b.p) % b.p
            out.append(m)
        return out

    def pi_part_exponents(self, primes) -> list[int]:
        """Exponents of a generator of ``O_π(L)``."""
        out = []
        for o in self.generator_orders:
            keep = math.prod(p**e for p, e in factorize(o).items() if p in primes)
            out.append(o // keep)
        return out


def _det_mod(m: np.ndarray, p: int) -> int:
    return _rank_mod(m, p) == m.shape[0]


def _rank_mod(m: np.ndarray, p: int) -> int:
    a = np.array(m, dtype=np.int64) % p
    rows, cols = a.shape
    rank = 0
    for c in range(cols):
        piv = next((r for r in range(rank, rows) if a[r, c]), None)
        if piv is None:
            continue
        a[[rank, piv]] = a[[piv, rank]]
        a[rank] = a[rank] * pow(int(a[rank, c]), -1, p) % p
        for r in range(rows):
            if r != rank and a[r, c]:
                a[r] = (a[r] - a[r, c] * a[rank]) % p
        rank += 1
    return rank


def _mat_pow(m: np.ndarray, e: int, p: int) -> np.ndarray:
    out = np.eye(m.shape[0], dtype=np.int64)
    base = np.array(m, dtype=np.int64) % p
    while e:
        if e & 1:
            out = out @ base % p
        base = base @ base % p
        e >>= 1
    return out


def _mat_order(m: np.ndarray, p: int) -> int:
    ident = np.eye(m.shape[0], dtype=np.int64)
    cur = np.array(m, dtype=np.int64) % p
    k = 1
    while not np.array_equal(cur, ident):
        cur = cur @ m % p
        k += 1
    return k


def _fixed_dim(mats: Sequence[np.ndarray], p: int) -> int:
    """Dimension of the common fixed space of ``mats`` over ``F_p``."""
    d = mats[0].shape[0]
    stacked = np.vstack([(m - np.eye(d, dtype=np.int64)) % p for m in mats])
    return d - _rank_mod(stacked, p)


def _is_scalar(m: np.ndarray, p: int) -> bool:
    m = m % p
    return np.array_equal(m, m[0, 0] * np.eye(m.shape[0], dtype=np.int64) % p)


def _span_dim(vectors: Sequence[np.ndarray], p: int) -> int:
    return _rank_mod(np.array(vectors), p)


def _linear_irreducible(m: np.ndarray, p: int) -> bool:
    """No proper non-zero subspace of ``F_p^d`` is invariant under ``m``."""
    d = m.shape[0]
    for coords in product(range(p), repeat=d):
        v = np.array(coords, dtype=np.int64)
        if not v.any():
            continue
        orbit = [v]
        cur = v
        for _ in range(d - 1):
            cur = m @ cur % p
            orbit.append(cur)
        if _span_dim(orbit, p) < d:
            return False
    return True


@dataclass(frozen=True)
class ModelHolds:
    pi: frozenset[int]
    detail: dict

    def __bool__(self):
        return True


@dataclass(frozen=True)
class ModelViolation:
    pi: frozenset[int]
    detail: dict

    def __bool__(self):
        return False


def fl4_model(sys: CoprimeActionSystem):
    """Evaluate FL4 on ``(H ⊕ J) ⋊ L`` by linear algebra alone.

    Raises HypothesisUnmet naming the first hypothesis that fails.  Returns
    ModelViolation when no non-zero vector of ``H ⊕ J`` is fixed by
    ``O_π(L)`` or by ``O_π'(L)``, ModelHolds otherwise.
    """
    hb = [b for b in sys.blocks if b.role == "H"]
    jb = [b for b in sys.blocks if b.role == "J"]
    if not hb:
        raise HypothesisUnmet("H is trivial")
    for p in {b.p for b in hb}:
        if sum(b.d for b in hb if b.p == p) < 2:
            raise HypothesisUnmet(f"Sylow {p}-subgroup of H is cyclic")
    for b in hb:
        if not all(_is_scalar(m, b.p) for m in b.matrices):
            raise HypothesisUnmet("L does not induce power automorphisms on H")
    orders = sys.generator_orders
    m_order = sys.order
    l_primes = primes_of(m_order)
    ngen = len(orders)

    def action_order(exps, blocks) -> int:
        mats = sys.element(exps)
        sel = [(mat, b.p) for mat, b in zip(mats, sys.blocks) if b in blocks]
        return math.lcm(1, *[_mat_order(mat, p) for mat, p in sel])

    def gen_of(primes) -> list[int]:
        return sys.pi_part_exponents(primes)

    moved = {q for q in l_primes if action_order(gen_of({q}), hb) > 1}
    if moved != set(l_primes):
        raise HypothesisUnmet(f"π(L) = {sorted(l_primes)} but π(L/C_L(H)) = {sorted(moved)}")
    if not jb:
        raise HypothesisUnmet("J is trivial")
    if {b.p for b in hb} & {b.p for b in jb}:
        raise HypothesisUnmet("|H| and |J| are not coprime")
    # the action on each O_p(J) must avoid L9; supported: centralise or (std)
    for b in jb:
        for q in l_primes:
            w = gen_of({q})
            idx = sys.blocks.index(b)
            mat = sys.element(w)[idx]
            if np.array_equal(mat % b.p, np.eye(b.d, dtype=np.int64)):
                continue
            if _rank_mod((mat - np.eye(b.d, dtype=np.int64)) % b.p, b.p) != b.d:
                raise HypothesisUnmet(f"O_{q}(L) does not act with [J_{b.p}, O_{q}(L)] = J_{b.p}")
            o = _mat_order(mat, b.p)
            for d in sorted(x for x in range(1, o + 1) if o % x == 0):
                sub = _mat_pow(mat, d, b.p)
                if not (_is_scalar(sub, b.p) or _linear_irreducible(sub, b.p)):
                    raise HypothesisUnmet(f"a subgroup of O_{q}(L) is neither irreducible nor scalar on J_{b.p}")
    # C_L(J) is generated by z^(action order of z on J) for a generator z of L
    z = [1] * ngen
    ord_j = action_order(z, jb)
    clj = [ord_j] * ngen
    clj_mats = [m for m, b in zip(sys.element(clj), sys.blocks) if b.role == "H"]
    h_fixed = sum(_fixed_dim([m], b.p) for m, b in zip(clj_mats, hb))
    clj_order = m_order // ord_j
    if h_fixed:
        raise HypothesisUnmet("C_H(C_L(J)) is not trivial")
    pi = set()
    cent_orders = {}
    for q in sorted(l_primes):
        w = gen_of({q})
        oq = math.prod(p**e for p, e in factorize(m_order).items() if p == q)
        ch = oq // action_order(w, hb)
        cj = oq // action_order(w, jb)
        cent_orders[q] = (ch, cj)
        if ch < cj:
            pi.add(q)
    rest = set(l_primes) - pi
    fixed = {}
    for label, primes in (("pi", pi), ("pi'", rest)):
        w = gen_of(primes)
        mats = sys.element(w)
        fixed[label] = sum(_fixed_dim([m], b.p) for m, b in zip(mats, sys.blocks))
    detail = {
        "order_L": m_order,
        "order_C_L(J)": clj_order,
        "C_H(C_L(J))": 1,
        "centraliser_orders": cent_orders,
        "fixed_dims": fixed,
    }
    if fixed["pi"] == 0 and fixed["pi'"] == 0:
        return ModelViolation(frozenset(pi), detail)
    return ModelHolds(frozenset(pi), detail)
