"""Cyclic double covers of dihedral quotient singularities.

A dihedral quotient with chain ``n/q = [c_1, ..., c_s]`` is a quotient by an
involution of the cyclic quotient ``S_{N,Q}`` with ``N = 2q(n - q)`` and
``Q = 2n'(n - q) + 1``, where ``q q' = n n' + 1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

from .hjcf import hj_expand, mod_inverse

__all__ = ["CoverParams", "double_cover_params", "cover_chain", "inverse_params"]


@dataclass(frozen=True)
class CoverParams:
    n: int
    q: int
    N: int
    Q: int
    n_prime: int
    q_prime: int

    def to_json(self) -> dict:
        return {"n": self.n, "q": self.q, "N": self.N, "Q": self.Q,
                "n_prime": self.n_prime, "q_prime": self.q_prime}


def _check(n: int, q: int) -> None:
    if not (1 <= q < n) or gcd(n, q) != 1:
        raise ValueError(f"need 1 <= q < n with gcd(n, q) = 1, got n={n}, q={q}")


def double_cover_params(n: int, q: int) -> CoverParams:
    _check(n, q)
    qp, np_ = mod_inverse(q, n)
    return CoverParams(n, q, 2 * q * (n - q), 2 * np_ * (n - q) + 1, np_, qp)


def cover_chain(n: int, q: int) -> tuple[int, ...]:
    """Resolution chain of the cover: the tail ``c_2..c_s`` mirrored around ``2(c_1 - 1)``."""
    _check(n, q)
    c = hj_expand(n, q)
    tail = c[1:]
    return tail[::-1] + (2 * (c[0] - 1),) + tail


def inverse_params(N: int, Q: int) -> tuple[int, int]:
    """Recover ``(n, q)`` from the cover: ``g = gcd(N, Q - 1)``, ``q = N/g``, ``n = q + g/2``."""
    if N < 2 or N % 2 or not (0 < Q < N) or (Q * Q - 1) % N:
        raise ValueError(f"({N}, {Q}) is not a dihedral cover: need N even, 0 < Q < N, Q^2 = 1 mod N")
    g = gcd(N, Q - 1)
    q = N // g
    n = q + g // 2
    if g % 2 or not (1 <= q < n) or gcd(n, q) != 1:
        raise ValueError(f"({N}, {Q}) does not come from a dihedral quotient")
    p = double_cover_params(n, q)
    if (p.N, p.Q) != (N, Q):
        raise ValueError(f"({N}, {Q}) does not come from a dihedral quotient")
    return n, q
