"""Independent oracles and input generators shared by the tests."""

from __future__ import annotations

from itertools import product
from math import gcd, isqrt

from quotsing.hjcf import hj_evaluate, hj_expand


def chains_of_weight(w: int):
    """Chains with entries >= 2 summing to exactly ``w``."""
    if w == 0:
        yield ()
        return
    for c in range(2, w + 1):
        for rest in chains_of_weight(w - c):
            yield (c,) + rest


def chains_up_to(w: int):
    for k in range(2, w + 1):
        yield from chains_of_weight(k)


def coprime_pairs(nmax: int, nmin: int = 2):
    for n in range(nmin, nmax + 1):
        for q in range(1, n):
            if gcd(n, q) == 1:
                yield n, q


def _is_zero_cf(k) -> bool:
    # [k_1, ..., k_e] represents zero iff repeatedly blowing down 1s ends at [1, 1]
    k = list(k)
    while len(k) > 2:
        i = next((i for i, x in enumerate(k) if x == 1), None)
        if i is None:
            return False
        if i == 0:
            k[1] -= 1
        elif i == len(k) - 1:
            k[-2] -= 1
        else:
            k[i - 1] -= 1
            k[i + 1] -= 1
        del k[i]
    return k == [1, 1]


def zero_cf_count(chain) -> int:
    """Number of deformation components of ``S(chain)`` counted by zero continued fractions.

    They are the ``[k_1..k_e]`` representing zero with ``k_i <= a_i``, where
    ``n/(n-q) = [a_1..a_e]`` is the dual chain.
    """
    n, q = hj_evaluate(chain)
    dual = hj_expand(n, n - q)
    if len(dual) == 1:
        return 1
    return sum(1 for k in product(*[range(1, a + 1) for a in dual]) if _is_zero_cf(k))


def t_params_by_divisors(chain):
    """``(r, n, a)`` by trying every ``n`` with ``n^2 | N`` (slow but transparent)."""
    big_n, big_q = hj_evaluate(chain)
    found = []
    for n in range(2, isqrt(big_n) + 1):
        if big_n % (n * n):
            continue
        r = big_n // (n * n)
        if (big_q + 1) % (r * n):
            continue
        a = (big_q + 1) // (r * n)
        if 1 <= a < n and gcd(a, n) == 1:
            found.append((r, n, a))
    assert len(found) <= 1
    return found[0] if found else None
