"""Independent re-checks of search results.

Everything here works on plain Python sets built from the raw
multiplication table and deliberately avoids the subgroup calculus, the
lattice code and the classifier, so a bug there cannot hide itself.
Each ``recheck_*`` function returns a list of problems; empty means the
result was confirmed.
"""

from __future__ import annotations

from math import gcd


class _G:
    """Minimal group view: products, inverses, closures."""

    def __init__(self, g):
        self.mul = g.mul.tolist()
        self.inv = g.inv.tolist()
        self.n = len(self.mul)

    def closure(self, gens) -> frozenset:
        seen = {0}
        frontier = [0]
        gens = [x for x in set(gens) if x != 0]
        while frontier:
            nxt = []
            for a in frontier:
                row = self.mul[a]
                for s in gens:
                    b = row[s]
                    if b not in seen:
                        seen.add(b)
                        nxt.append(b)
            frontier = nxt
        return frozenset(seen)

    def is_subgroup(self, s) -> bool:
        s = set(s)
        return 0 in s and all(self.mul[a][b] in s for a in s for b in s)

    def order_of(self, x: int) -> int:
        k, y = 1, x
        while y != 0:
            y = self.mul[y][x]
            k += 1
        return k

    def power(self, x: int, e: int) -> int:
        y = 0
        for _ in range(e):
            y = self.mul[y][x]
        return y

    def commute(self, a: int, b: int) -> bool:
        return self.mul[a][b] == self.mul[b][a]

    def conj(self, x: int, by: int) -> int:
        return self.mul[self.mul[self.inv[by]][x]][by]

    def centralizer(self, acting, within) -> frozenset:
        return frozenset(x for x in within if all(self.commute(x, a) for a in acting))

    def commutator(self, a_set, b_set) -> frozenset:
        gens = {self.mul[self.mul[self.inv[a]][self.inv[b]]][self.mul[a][b]] for a in a_set for b in b_set}
        return self.closure(gens)

    def normalizes(self, acting, target) -> bool:
        t = set(target)
        return all(self.conj(x, a) in t for a in acting for x in target)

    def is_abelian(self, s) -> bool:
        s = list(s)
        return all(self.commute(a, b) for i, a in enumerate(s) for b in s[i + 1:])

    def is_cyclic(self, s) -> bool:
        return any(self.order_of(x) == len(s) for x in s)

    def exponent_prime(self, s) -> bool:
        return all(_is_prime(self.order_of(x)) for x in s if x != 0)

    def is_elem_abelian(self, s) -> bool:
        return self.is_abelian(s) and self.exponent_prime(s) and len({self.order_of(x) for x in s if x}) <= 1

    def p_elements(self, s, primes) -> frozenset:
        return frozenset(x for x in s if _primes(self.order_of(x)) <= set(primes))


def _is_prime(n: int) -> bool:
    return n > 1 and all(n % d for d in range(2, int(n**0.5) + 1))


def _primes(n: int) -> set[int]:
    out, d = set(), 2
    while d * d <= n:
        while n % d == 0:
            out.add(d)
            n //= d
        d += 1
    if n > 1:
        out.add(n)
    return out


def _subgroups_naive(G: _G, s) -> list[frozenset]:
    """All subgroups of ``s`` by closing cyclic subgroups under pairwise joins."""
    cyc = {G.closure([x]) for x in s}
    found = set(cyc)
    layer = set(cyc)
    while layer:
        new = set()
        for a in layer:
            for c in cyc:
                if not c <= a:
                    j = G.closure(a | c)
                    if j not in found:
                        new.add(j)
        found |= new
        layer = new
    return sorted(found, key=lambda x: (len(x), sorted(x)))


def _irreducible(G: _G, acting, v) -> bool:
    v = frozenset(v)
    for x in v:
        if x == 0:
            continue
        orbit = {G.conj(x, a) for a in acting} | {x}
        if G.closure(orbit) != v:
            return False
    return True


def _power(G: _G, acting, v) -> bool:
    return all(G.conj(x, a) in G.closure([x]) for x in v for a in acting)


def _trivial(G: _G, acting, v) -> bool:
    return all(G.commute(x, a) for x in v for a in acting)


def _cyclic_chain(G: _G, q_set) -> list[frozenset]:
    """Subgroups of the cyclic prime-power group ``q_set``."""
    gen = next(x for x in q_set if G.order_of(x) == len(q_set))
    if len(q_set) == 1:
        return [frozenset({0})]
    p = min(_primes(len(q_set)))
    out, e = [], 1
    while e <= len(q_set):
        out.append(G.closure([G.power(gen, e)]))
        e *= p
    return sorted(out, key=len)


def _is_q8(G: _G, s) -> bool:
    return len(s) == 8 and not G.is_abelian(s) and sum(1 for x in s if G.order_of(x) == 2) == 1


def _cyclic_type_ok(G: _G, kind: str, Q, P) -> str | None:
    """``None`` when the cyclic group ``Q`` acts on ``P`` with type ``kind``."""
    PQ = G.commutator(P, Q)
    CPQ = G.centralizer(Q, P)
    chain = _cyclic_chain(G, Q)
    if kind == "std":
        if PQ != frozenset(P) or not G.is_elem_abelian(P):
            return "std needs P = [P,Q] elementary abelian"
        for U in chain:
            if not (_irreducible(G, U, P) or _power(G, U, P)):
                return f"std: subgroup of order {len(U)} neither irreducible nor power"
        return None
    if kind == "cent":
        if not (G.is_abelian(P) and G.is_elem_abelian(PQ)):
            return "cent needs P abelian and [P,Q] elementary abelian"
        if len(CPQ) == 1 or not G.is_cyclic(CPQ) or _primes(len(CPQ)) != {2}:
            return "cent needs C_P(Q) a non-trivial cyclic 2-group"
        for U in chain:
            if not (_trivial(G, U, PQ) or _irreducible(G, U, PQ)):
                return f"cent: subgroup of order {len(U)} neither trivial nor irreducible on [P,Q]"
        return None
    if kind == "hamil":
        if not _is_q8(G, PQ) or _primes(len(Q)) != {3}:
            return "hamil needs [P,Q] = Q8 and Q a 3-group"
        if len(P) == 16:
            if not any(G.order_of(i) == 2 and i not in PQ and all(G.commute(i, y) for y in PQ) for i in P):
                return "hamil: no central involution complement"
        elif len(P) != 8:
            return "hamil: |P| must be 8 or 16"
        X = G.closure(PQ | frozenset(Q))
        Z = G.centralizer(X, X)
        if len(X) != 12 * len(Z):
            return "hamil: [P,Q]Q/Z has order different from 12"
        order3 = 0
        for x in X:
            k, y = 1, x
            while y not in Z:
                y = G.mul[y][x]
                k += 1
            order3 += k == 3
        if order3 != 8 * len(Z):
            return "hamil: quotient is not Alt4"
        return None
    return f"unknown cyclic type {kind}"


def recheck_certificate(g, cert) -> list[str]:
    """Re-verify an AvoidanceCertificate from scratch."""
    G = _G(g)
    B = frozenset(cert.batten.subgroup.members)
    P = frozenset(cert.target.members)
    probs = []
    if not G.is_subgroup(B) or not G.is_subgroup(P):
        return ["batten or target is not a subgroup"]
    if gcd(len(B), len(P)) != 1:
        probs.append("orders are not coprime")
    if not G.normalizes(B, P):
        probs.append("batten does not normalise target")
    t = cert.type
    if t == "centralizes":
        if not _trivial(G, B, P):
            probs.append("claimed centralising but some element moves P")
        return probs
    if t in ("std", "cent", "hamil"):
        r = _cyclic_type_ok(G, t, B, P)
        return probs + ([r] if r else [])
    if t == "q8":
        p = cert.p
        if not _is_q8(G, B):
            probs.append("batten is not Q8")
        if p % 4 != 3 or len(P) != p * p:
            probs.append("q8 needs p = 3 mod 4 and |P| = p^2")
        if len(G.centralizer(P, B)) != 1:
            probs.append("Q8 action is not faithful")
        return probs
    heart = frozenset(cert.batten.heart.members)
    top = frozenset(cert.batten.top.members)
    ZB = G.centralizer(B, B)
    if _trivial(G, ZB, P):
        probs.append("[P, Z(B)] = 1")
    tops = {frozenset(G.conj(x, h) for x in top) for h in heart}
    if t == "Cy":
        if not _trivial(G, heart, P):
            probs.append("Cy: heart moves P")
        for R in tops:
            if _trivial(G, R, P):
                continue
            if all(_cyclic_type_ok(G, k, R, P) for k in ("std", "cent", "hamil")):
                probs.append("Cy: a Sylow subgroup of B has no avoiding type")
        return probs
    if t == "NN":
        idx = len(B) // len(G.closure(heart | ZB))
        if not G.is_elem_abelian(P) or len(P) != cert.p**idx:
            probs.append("NN: P has the wrong shape")
        for S in [heart, *tops]:
            if not _irreducible(G, S, P):
                probs.append("NN: a Sylow subgroup of B is reducible")
                break
        if not _power(G, ZB, P):
            probs.append("NN: Z(B) does not act by power automorphisms")
        return probs
    return probs + [f"unknown type {t}"]


def recheck_batten(g, info) -> list[str]:
    G = _G(g)
    B = frozenset(info.subgroup.members)
    if not G.is_subgroup(B):
        return ["not a subgroup"]
    if info.kind == "cyclic":
        ok = G.is_cyclic(B) and len(_primes(len(B))) == 1
        return [] if ok else ["not a cyclic p-group"]
    if info.kind == "q8":
        return [] if _is_q8(G, B) else ["not Q8"]
    heart = frozenset(info.heart.members)
    top = frozenset(info.top.members)
    probs = []
    if not _is_prime(len(heart)) or not G.normalizes(B, heart):
        probs.append("heart is not a normal subgroup of prime order")
    if not G.is_cyclic(top) or len(_primes(len(top))) != 1 or gcd(len(top), len(heart)) != 1:
        probs.append("top is not a cyclic Sylow subgroup of coprime order")
    if len(heart) * len(top) != len(B):
        probs.append("heart and top do not fill the batten")
    r = next(iter(_primes(len(top))))
    gen = next(x for x in top if G.order_of(x) == len(top))
    phi = G.closure([G.power(gen, r)])
    if G.centralizer(heart, top) != phi or len(phi) == 1:
        probs.append("C_R(Q) differs from Φ(R) or is trivial")
    return probs


def _is_modular_naive(G: _G, s) -> bool:
    subs = _subgroups_naive(G, s)
    for x in subs:
        for z in subs:
            if not x <= z:
                continue
            for y in subs:
                if G.closure(x | (y & z)) != (G.closure(x | y) & z):
                    return False
    return True


def recheck_fl4(G: _G, N, K) -> list[str]:
    """Exhaustive FL4 over subgroups of ``N`` and cyclic subgroups of ``K``."""
    subs_n = [s for s in _subgroups_naive(G, N) if len(s) > 1 and G.is_abelian(s)]
    cyc_k = {G.closure([x]) for x in K}
    cyc_k = [L for L in cyc_k if len(_primes(len(L))) >= 2]

    def sylow_noncyclic(h):
        return all(not G.is_cyclic(G.p_elements(h, [p])) for p in _primes(len(h)))

    for H in subs_n:
        if not sylow_noncyclic(H):
            continue
        for L in sorted(cyc_k, key=lambda s: (len(s), sorted(s))):
            if not _power(G, L, H):
                continue
            CLH = G.centralizer(H, L)
            if _primes(len(L) // len(CLH)) != _primes(len(L)):
                continue
            for J in subs_n:
                if gcd(len(H), len(J)) != 1 or not G.normalizes(L, J):
                    continue
                if not _trivial(G, H, J):
                    continue
                CLJ = G.centralizer(J, L)
                if len(G.centralizer(CLJ, H)) != 1:
                    continue
                pi = set()
                for q in _primes(len(L)):
                    Oq = G.p_elements(L, [q])
                    ch, cj = G.centralizer(H, Oq), G.centralizer(J, Oq)
                    if ch < cj:
                        pi.add(q)
                rest = _primes(len(L)) - pi
                HJ = {G.mul[h][j] for h in H for j in J} - {0}
                fixed = any(
                    any(_trivial(G, O, [x]) for x in HJ)
                    for O in (G.p_elements(L, pi), G.p_elements(L, rest))
                )
                if not fixed:
                    return [f"FL4 fails for |H|={len(H)}, |L|={len(L)}, |J|={len(J)}"]
    return []


def recheck_class_witness(g, witness) -> list[str]:
    """Re-verify an IN_CLASS verdict: type (N, K), FL1-FL4 and all certificates."""
    if not witness.in_class:
        return ["not an IN_CLASS witness"]
    G = _G(g)
    cand = witness.type
    N = frozenset(cand.N.members)
    K = frozenset(cand.K.members)
    probs = []
    if not (G.is_subgroup(N) and G.is_subgroup(K)):
        return ["N or K is not a subgroup"]
    if len(N) * len(K) != G.n or N & K != {0}:
        probs.append("K is not a complement of N")
    if gcd(len(N), len(K)) != 1:
        probs.append("N is not a Hall subgroup")
    if not G.normalizes(range(G.n), N):
        probs.append("N is not normal")
    sylows = {}
    for p in sorted(_primes(len(N))):
        S = G.p_elements(N, [p])
        pk = 1
        while len(N) % (pk * p) == 0:
            pk *= p
        if len(S) != pk or not G.is_subgroup(S):
            probs.append(f"N has no normal Sylow {p}-subgroup, so it is not nilpotent")
            continue
        sylows[p] = S
        if len(S) <= 64 and not _is_modular_naive(G, S):
            probs.append(f"Sylow {p}-subgroup of N is not modular")
    # FL1
    battens = [frozenset(b.subgroup.members) for b in cand.battens]
    prod = 1
    for i, b in enumerate(cand.battens):
        probs += [f"batten {b.describe()}: {m}" for m in recheck_batten(g, b)]
        prod *= len(battens[i])
        for c in battens[i + 1:]:
            if gcd(len(battens[i]), len(c)) != 1 or not _trivial(G, battens[i], c):
                probs.append("battens are not coprime commuting factors")
    if prod != len(K) or any(not b <= K for b in battens):
        probs.append("battens do not multiply to K")
    # FL2
    seen = set()
    for cert in cand.certificates:
        seen.add((cert.batten.subgroup.members, cert.p))
        probs += [f"certificate {cert.batten.describe()} on p={cert.p}: {m}" for m in recheck_certificate(g, cert)]
        if frozenset(cert.target.members) != sylows.get(cert.p):
            probs.append(f"certificate target is not the Sylow {cert.p}-subgroup of N")
    for b in cand.battens:
        for p in sylows:
            if (b.subgroup.members, p) not in seen:
                probs.append(f"no certificate for {b.describe()} on p={p}")
    # FL3
    subs_k = _subgroups_naive(G, K)
    for q in sorted(_primes(len(K))):
        qk = 1
        while len(K) % (qk * q) == 0:
            qk *= q
        sylq = [s for s in subs_k if len(s) == qk]
        for Q in sylq:
            moved = [p for p, S in sylows.items() if not _trivial(G, Q, S)]
            cents = {p: G.centralizer(sylows[p], Q) for p in moved}
            for i, p1 in enumerate(moved):
                for p2 in moved[i + 1:]:
                    if cents[p1] == cents[p2]:
                        probs.append(f"FL3 fails for a Sylow {q}-subgroup on p={p1}, {p2}")
    probs += recheck_fl4(G, N, K)
    return probs


def recheck_embedding(emb) -> list[str]:
    """Check an Embedding using element sets: meets are intersections, joins are closures."""
    lat = emb.lattice
    G = _G(lat.group)
    sets = [frozenset(lat.nodes[i].members) for i in emb.map]
    p = emb.pattern
    probs = []
    if len(set(sets)) != len(sets):
        probs.append("map is not injective")
    for a in range(p.size):
        for b in range(a + 1, p.size):
            if sets[a] & sets[b] != sets[int(p.meet[a, b])]:
                probs.append(f"meet of {p.element_names[a]}, {p.element_names[b]} not preserved")
            if G.closure(sets[a] | sets[b]) != sets[int(p.join[a, b])]:
                probs.append(f"join of {p.element_names[a]}, {p.element_names[b]} not preserved")
    return probs
