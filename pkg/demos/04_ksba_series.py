"""Pairs (S, dB) with a KSBA smoothing, found by solving for d.

On each candidate P-modification, ``K + d(B' + E')`` must be numerically
trivial on the kept curves.  The degrees are affine in d, so there is at most
one solution.
"""

from quotsing import cyclic, ksba_search

print("the [4, c] family: d = (2c - 3)/(2c - 1)")
for c in range(2, 7):
    for r in ksba_search(cyclic((4, c), 1)):
        if r.modification.describe() == f"* - [4/1] - {c}":
            print(f"   c = {c}: d = {r.d_value}")

for head in [(4, 3), (2, 5, 3)]:
    print(f"\nthe series starting {list(head)}")
    for k in range(3):
        chain = head + (2,) * (k + 2 if head == (4, 3) else k + 1)
        sols = [r for r in ksba_search(cyclic(chain, 1)) if not r.modification.is_identity]
        text = "; ".join(f"{r.modification.describe()} at d = {r.d_value}" for r in sols)
        print(f"   {list(chain)}: {text}")
