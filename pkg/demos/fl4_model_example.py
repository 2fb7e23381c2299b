"""The order-649800 example, checked through its linear model.

H = C19^2 and J = C5^2, with L = <x> x <y> of order 72 acting by matrices.
The whole group is far too large for a Cayley table, so FL4 is decided
by linear algebra over F19 and F5.

Run: python3 demos/fl4_model_example.py
"""

from latsieve.catalog_io import data_file, load_group_file
from latsieve.structure_classify import fl4_model

gf = load_group_file(data_file("fl4_example.grp"))
system = gf.model_system()
print("generators", system.generators, "with orders", system.generator_orders, "-> |L| =", system.order)
print("|G| =", 19**2 * 5**2 * system.order)

res = fl4_model(system)
print("\nresult:", type(res).__name__)
print("pi =", sorted(res.pi))
for key, val in res.detail.items():
    print(f"  {key}: {val}")

# Neither O_pi(L) nor O_pi'(L) fixes a non-zero vector of H + J, so the
# configuration (H, L, J) breaks FL4 and the group is not in the class.
