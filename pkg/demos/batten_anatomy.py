"""Anatomy of the batten C19 : C27, where the generator of C27 acts as x -> x^7.

Run: python3 demos/batten_anatomy.py
"""

from latsieve import build_group
from latsieve import group_core as gc
from latsieve.structure_classify import batten_factorization, batten_kind, class_l_membership

g = build_group("C19xC27_batten")
info = batten_kind(g)
print(f"order {g.order}: {info.kind} batten, q = {info.q}, r = {info.r}")

# 7 has order 3 modulo 19, so y^3 centralises x and C_R(Q) is the Frattini subgroup of R
print("7^3 mod 19 =", pow(7, 3, 19))
z = gc.center(g)
print("|Z(G)| =", z.order)
print("|C_R(Q)| =", gc.centralizer(g, info.heart, within=info.top).order)
print("|Phi(R)| =", gc.frattini(g, info.top).order)
print("|O_3(G)| =", gc.o_p(g, 3).order)

# proper subgroups break up into cyclic battens of coprime orders
shapes = set()
for s in gc.subgroups_of(g):
    if s.order < g.order:
        shapes.add(" x ".join(b.describe() for b in batten_factorization(g, s)) or "1")
print("proper subgroups factor as:", ", ".join(sorted(shapes, key=len)))

w = class_l_membership(g)
print("\nclass verdict:", w.verdict, f"with N of order {w.type.N.order}, K of order {w.type.K.order}")
for cert in w.type.certificates:
    print(f"  {cert.batten.describe()} on O_{cert.p}(N): type {cert.type}")
