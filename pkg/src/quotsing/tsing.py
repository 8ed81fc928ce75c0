"""T-singularities: the quotient singularities with a KSB smoothing.

Besides Du Val points these are ``A^2/(1/(r n^2))(1, a r n - 1)`` with
``n > 1`` and ``gcd(a, n) = 1``.  Their chains are exactly those reachable from
``[4]`` or ``[3, 2, ..., 2, 3]`` (``r - 2`` twos) by the moves

    [c_1, ..., c_s] -> [2, c_1, ..., c_s + 1]   and its mirror image.

Both characterisations are implemented and :func:`t_recognize` insists that
they agree.
"""
from __future__ import annotations

from math import gcd
from typing import Sequence

from .hjcf import check_chain, hj_evaluate, hj_expand
from .lattice import CurveConfig
from .notation import Cyclic, Dihedral, DuValA, DuValD, DuValE, Singularity, Smooth, T


class RecognitionMismatch(AssertionError):
    """The recursive and arithmetic recognisers disagree (a bug, never expected)."""


class NotKSBSmoothable(ValueError):
    """The singularity has no KSB smoothing, so no local KSB dimension is defined."""


def peel(chain: Sequence[int]) -> int | None:
    """Undo the T-moves; return ``r`` if the chain reduces to a base chain, else ``None``."""
    c = list(check_chain(chain))
    while True:
        if c == [4]:
            return 1
        if len(c) >= 2 and c[0] == 3 and c[-1] == 3 and all(x == 2 for x in c[1:-1]):
            return len(c)
        if len(c) < 2:
            return None
        if c[0] == 2 and c[-1] >= 3:
            c = c[1:]
            c[-1] -= 1
        elif c[-1] == 2 and c[0] >= 3:
            c = c[:-1]
            c[0] -= 1
        else:
            return None


def arithmetic_params(chain: Sequence[int]) -> tuple[int, int, int] | None:
    """``(r, n, a)`` with ``n/q = (r n^2, a r n - 1)``, read off from ``gcd(N, Q + 1)``.

    Since ``gcd(a, n) = 1`` the gcd of ``r n^2`` and ``a r n`` is ``r n``, so
    ``n = N / gcd(N, Q + 1)`` and the rest follows.
    """
    big_n, big_q = hj_evaluate(chain)
    g = gcd(big_n, big_q + 1)
    n = big_n // g
    if n < 2 or g % n:
        return None
    r, a = g // n, (big_q + 1) // g
    if 1 <= a < n and gcd(a, n) == 1 and big_n == r * n * n:
        return r, n, a
    return None


def t_recognize(chain: Sequence[int]) -> tuple[int, int, int] | None:
    """``(r, n, a)`` if ``chain`` is a non-Du Val T-chain, else ``None``."""
    chain = check_chain(chain)
    by_peel = peel(chain)
    by_arith = arithmetic_params(chain)
    if (by_peel is None) != (by_arith is None) or (by_peel is not None and by_peel != by_arith[0]):
        raise RecognitionMismatch(f"{list(chain)}: peeling gives {by_peel}, arithmetic gives {by_arith}")
    return by_arith


def t_chain(r: int, n: int, a: int) -> tuple[int, ...]:
    if r < 1 or n < 2 or not 1 <= a < n or gcd(a, n) != 1:
        raise ValueError(f"invalid T parameters r={r}, n={n}, a={a}")
    return hj_expand(r * n * n, a * r * n - 1)


def t_generate(budget: int) -> list[tuple[tuple[int, ...], tuple[int, int, int]]]:
    """Every T-chain with ``sum(c_i) <= budget``, with its parameters, sorted by (weight, chain)."""
    if budget < 4:
        raise ValueError("budget must be at least 4")
    frontier = [(4,)]
    r = 2
    while 2 * r + 2 <= budget:
        frontier.append((3,) + (2,) * (r - 2) + (3,))
        r += 1
    seen = set()
    while frontier:
        nxt = []
        for c in frontier:
            if c in seen or sum(c) > budget:
                continue
            seen.add(c)
            nxt.append((2,) + c[:-1] + (c[-1] + 1,))
            nxt.append((c[0] + 1,) + c[1:] + (2,))
        frontier = nxt
    out = []
    for c in seen:
        params = arithmetic_params(c)
        if params is None or peel(c) != params[0]:
            raise RecognitionMismatch(f"generated chain {list(c)} not recognised")
        out.append((c, params))
    return sorted(out, key=lambda item: (sum(item[0]), item[0]))


def m_chain(r: int, n: int, a: int) -> CurveConfig:
    """``r`` copies of the chain of ``1/n^2 (1, a n - 1)`` joined by ``r - 1`` (-1)-curves."""
    box = t_chain(1, n, a)
    entries: list[int] = []
    for i in range(r):
        if i:
            entries.append(1)
        entries.extend(box)
    return CurveConfig.chain(entries)


def blow_down_chain(entries: Sequence[int]) -> tuple[int, ...]:
    """Contract interior (-1)-curves of a chain until none remain (ends are never contracted)."""
    c = list(entries)
    while True:
        idx = next((i for i in range(1, len(c) - 1) if c[i] == 1), None)
        if idx is None:
            return tuple(c)
        c[idx - 1] -= 1
        c[idx + 1] -= 1
        del c[idx]


def refine(sing: Singularity) -> Singularity:
    """Promote a :class:`Cyclic` point to :class:`T` when it is one."""
    if isinstance(sing, Cyclic):
        params = t_recognize(sing.chain)
        if params is not None:
            return T(*params)
    return sing


def is_t_or_du_val(sing: Singularity) -> bool:
    sing = refine(sing)
    if isinstance(sing, Dihedral):
        cyc = sing.cyclic_equivalent()
        return cyc is not None and isinstance(refine(cyc), T)
    return sing.is_du_val or isinstance(sing, T)


def ksb_local_dim(sing: Singularity) -> int:
    """Dimension ``r`` of the (smooth) KSB deformation space of a T or Du Val point."""
    sing = refine(sing)
    if isinstance(sing, Smooth):
        return 0
    if isinstance(sing, (DuValA, DuValD, DuValE, T)):
        return sing.r
    raise NotKSBSmoothable(f"{sing.label} has no KSB smoothing")
