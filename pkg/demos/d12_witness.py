"""Where L9 sits inside the subgroup lattice of D12.

Run: python3 demos/d12_witness.py
"""

from latsieve import build_group, build_lattice, detect_l9_direct, find_sublattice_embedding, named_pattern
from latsieve.group_core import format_cycles

g = build_group("D12")
lat = build_lattice(g)
print(f"D12 has order {g.order} and {lat.size} subgroups")

# The direct detector walks the defining relations of L9 node by node.
emb = detect_l9_direct(lat)
print("\nL9 inside L(D12):")
for name, node in emb.as_dict().items():
    sub = lat.nodes[node]
    gens = ", ".join(format_cycles(g.perms[x]) for x in sub.gens) or "1"
    print(f"  {name}: order {sub.order:2d}  generated by {gens}")

# The generic backtracking search lands on the same nine subgroups.
generic = find_sublattice_embedding(named_pattern("L9"), lat)
print("\nsame node set from the generic search:", generic.node_set == emb.node_set)

# D must be the rotation subgroup of order 3: it is the meet of the three order-6 subgroups.
D = emb.as_dict()["D"]
print("D is the meet of A and B:", lat.meet(emb.as_dict()["A"], emb.as_dict()["B"]) == D)
