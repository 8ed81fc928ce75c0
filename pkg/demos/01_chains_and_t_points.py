"""Continued fractions, T-singularities and the dihedral double cover.

Run with ``python3 demos/01_chains_and_t_points.py``.
"""

from quotsing import cover_chain, double_cover_params, hj_evaluate, hj_expand, t_recognize
from quotsing.tsing import t_chain

# Every coprime n/q has a unique chain with entries >= 2.
for n, q in [(7, 3), (11, 4), (19, 7)]:
    chain = hj_expand(n, q)
    print(f"{n}/{q} = {list(chain)}, back to {hj_evaluate(chain)}")

# T-singularities 1/(r n^2)(1, a r n - 1) come from [4] and [3, 2, ..., 2, 3]
# by repeatedly adding a 2 on one side and raising the other end.
print()
for r, n, a in [(1, 2, 1), (1, 3, 1), (2, 3, 1), (1, 5, 2)]:
    chain = t_chain(r, n, a)
    print(f"T(r={r}, n={n}, a={a}): {list(chain)}  recognised as {t_recognize(chain)}")
print("[3, 4] is a T-chain:", t_recognize([3, 4]) is not None)

# A dihedral quotient with chain [c1, ..., cs] is double covered by a cyclic one.
print()
for n, q in [(3, 1), (11, 4), (17, 5)]:
    p = double_cover_params(n, q)
    print(f"dihedral {list(hj_expand(n, q))}: cover 1/{p.N}(1, {p.Q}) with chain {list(cover_chain(n, q))}")
