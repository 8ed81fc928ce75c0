"""Hirzebruch-Jung continued fractions and a few closed-form counts.

A cyclic quotient singularity ``A^2/(1/n)(1, q)`` is resolved by a chain of
rational curves with self-intersections ``-c_1, ..., -c_s`` where

    n/q = c_1 - 1/(c_2 - 1/(... - 1/c_s))

All arithmetic here is integer arithmetic.
"""
from __future__ import annotations

from math import comb, gcd
from typing import NamedTuple, Sequence


class NQ(NamedTuple):
    """A reduced pair ``(n, q)`` with ``1 <= q < n`` and ``gcd(n, q) = 1``."""

    n: int
    q: int

    def __str__(self) -> str:
        return f"{self.n}/{self.q}"


class SN1Facts(NamedTuple):
    t1_dim: int
    artin_dim: int
    ksb_codim: int
    pair_space_dim: int


def normalize(n: int, q: int) -> NQ:
    """Divide out ``gcd(n, q)``; the quotients by ``(n, q)`` and ``(n/g, q/g)`` agree."""
    if n <= 0 or q <= 0:
        raise ValueError(f"need positive n, q; got {n}, {q}")
    g = gcd(n, q)
    n, q = n // g, q // g
    if not q < n:
        raise ValueError(f"need q < n after reduction; got {n}/{q}")
    return NQ(n, q)


def _check_nq(n: int, q: int) -> None:
    if not (isinstance(n, int) and isinstance(q, int)):
        raise TypeError("n and q must be integers")
    if not 1 <= q < n:
        raise ValueError(f"need 1 <= q < n; got n={n}, q={q}")
    if gcd(n, q) != 1:
        raise ValueError(f"n={n} and q={q} are not coprime")


def check_chain(chain: Sequence[int]) -> tuple[int, ...]:
    chain = tuple(chain)
    if not chain:
        raise ValueError("empty chain")
    for c in chain:
        if not isinstance(c, int) or c < 2:
            raise ValueError(f"chain entries must be integers >= 2; got {list(chain)}")
    return chain


def hj_expand(n: int, q: int) -> tuple[int, ...]:
    """Chain ``[c_1, ..., c_s]`` with ``n/q = [c_1, ..., c_s]``.

    >>> hj_expand(19, 7)
    (3, 4, 2)
    """
    _check_nq(n, q)
    out = []
    while q > 0:
        c = -(-n // q)  # ceil
        out.append(c)
        n, q = q, c * q - n
    return tuple(out)


def hj_evaluate(chain: Sequence[int]) -> NQ:
    """Inverse of :func:`hj_expand`.

    >>> hj_evaluate([4, 3, 2])
    NQ(n=18, q=5)
    """
    chain = check_chain(chain)
    # fold from the right: x = c - 1/x with x = num/den
    num, den = 1, 0
    for c in reversed(chain):
        num, den = c * num - den, num
    g = gcd(num, den)
    return NQ(num // g, den // g)


def mod_inverse(q: int, n: int) -> tuple[int, int]:
    """Return ``(q', n')`` with ``1 <= q' < n`` and ``q q' = n n' + 1``.

    For ``n = 1`` nothing is invertible in a meaningful range, so ``n >= 2`` is
    required.
    """
    if n < 2:
        raise ValueError("modulus must be at least 2")
    if gcd(q, n) != 1:
        raise ValueError(f"{q} is not invertible modulo {n}")
    qp = pow(q, -1, n)
    return qp, (q * qp - 1) // n


def multiplicity(chain: Sequence[int]) -> int:
    chain = check_chain(chain)
    return 2 + sum(c - 2 for c in chain)


def catalan_bound(m: int) -> int:
    """Upper bound ``binom(2(m-2), m-2)/(m-1)`` on the number of components."""
    if m < 2:
        raise ValueError("multiplicity is at least 2")
    k = m - 2
    num = comb(2 * k, k)
    assert num % (k + 1) == 0
    return num // (k + 1)


def sn1_facts(n: int) -> SN1Facts:
    """Closed-form deformation data for ``A^2/(1/n)(1, 1)``."""
    if n < 3:
        raise ValueError("need n >= 3")
    # multiplicity of S_{n,1} is n, the KSB pair codimension is m - 3
    return SN1Facts(t1_dim=2 * n - 4, artin_dim=n - 1, ksb_codim=n - 3, pair_space_dim=2)


def reverse_chain(chain: Sequence[int]) -> tuple[int, ...]:
    return tuple(reversed(check_chain(chain)))
