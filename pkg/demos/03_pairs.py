"""KSB deformations of pairs (S, D).

For cyclic pairs the components match those of S itself but have smaller
dimension.  For dihedral pairs they come from the chain with the first
entry dropped, and the general fibre keeps two A_1 points on the boundary.
"""

from quotsing import (def_components, def_ksb_pair_components_cyclic, def_ksb_pair_components_dihedral,
                      hj_evaluate, plt_rigidity)

chain = (3, 3, 3)
n, q = hj_evaluate(chain)
print(f"cyclic pair over {list(chain)} = {n}/{q}")
pairs = {r.modification.describe().replace("* - ", "").replace(" - *", ""): r.dimension
         for r in def_ksb_pair_components_cyclic(n, q)}
for r in def_components(chain):
    name = r.modification.describe()
    print(f"   {name:24s} Def(S) dim {r.dimension}, pair dim {pairs[name]}")

print()
fork = (3, 4)
print(f"dihedral pair over {list(fork)}")
for r in def_ksb_pair_components_dihedral(*hj_evaluate(fork)):
    fibre = ", ".join(f"{s.label}" for s, _ in r.generic_fiber)
    print(f"   dim {r.dimension}  {r.modification.describe()}  general fibre: {fibre}")

print()
v = plt_rigidity(7, 3)
print(f"(S_7/3, B) is rigid: {v.rigid}; K + B has index {v.cartier_index}")
