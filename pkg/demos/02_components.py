"""Components of the deformation space of a cyclic quotient singularity.

Each component comes from a P-modification: a partial resolution whose
singularities are T or Du Val and whose canonical class is ample over the
base.  The dimension is the sum of the local T-parameters plus ``e - 1`` for
each curve left on the partial resolution.
"""

from quotsing import def_components
from quotsing.hjcf import catalan_bound, multiplicity

for chain in [(4,), (3, 3), (2, 5, 2), (3, 3, 3)]:
    reports = def_components(chain)
    m = multiplicity(chain)
    print(f"{list(chain)}: multiplicity {m}, {len(reports)} components (at most {catalan_bound(m)})")
    for r in reports:
        print(f"   dim {r.dimension:2d}   {r.modification.describe()}")
