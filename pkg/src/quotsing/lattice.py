"""Exact intersection theory on trees of smooth rational curves.

Every curve is a smooth rational curve, so adjunction gives
``K.C = -C^2 - 2``.  Boundary branches are not curves of the configuration;
they are recorded as attachments ``(label, curve)`` meaning the branch meets
that curve transversally once.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Iterable, Mapping, Sequence

Matrix = list[list[int]]


@dataclass(frozen=True)
class Origin:
    """Provenance of a curve: an original curve ``C_i`` or the blow-up at step ``k``."""

    index: int | None = None
    step: int | None = None
    node: tuple[int, int] | None = None

    @property
    def is_original(self) -> bool:
        return self.index is not None

    def __str__(self) -> str:
        if self.is_original:
            return f"C{self.index}"
        return f"E{self.step}{self.node}"


@dataclass(frozen=True)
class CurveConfig:
    self_ints: tuple[int, ...]
    edges: frozenset[tuple[int, int]]
    boundary: tuple[tuple[str, int], ...] = ()
    origins: tuple[Origin, ...] = ()
    exceptional: tuple[bool, ...] = ()
    _nbrs: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        n = len(self.self_ints)
        edges = frozenset(tuple(sorted(e)) for e in self.edges)
        object.__setattr__(self, "edges", edges)
        if not self.origins:
            object.__setattr__(self, "origins", tuple(Origin(index=i) for i in range(n)))
        if not self.exceptional:
            object.__setattr__(self, "exceptional", (True,) * n)
        if len(self.origins) != n or len(self.exceptional) != n:
            raise ValueError("per-curve tuples have inconsistent lengths")
        nbrs: list[list[int]] = [[] for _ in range(n)]
        for u, v in edges:
            if u == v or not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"bad edge {(u, v)}")
            nbrs[u].append(v)
            nbrs[v].append(u)
        object.__setattr__(self, "_nbrs", tuple(tuple(sorted(x)) for x in nbrs))
        if n and len(edges) != n - 1 or not _connected(n, self._nbrs):
            raise ValueError("adjacency graph must be a tree")
        for _, c in self.boundary:
            if not 0 <= c < n:
                raise ValueError(f"boundary attached to missing curve {c}")

    @classmethod
    def chain(cls, entries: Sequence[int], boundary: Iterable[tuple[str, int]] = ()) -> "CurveConfig":
        """Chain of curves with self-intersections ``-entries[i]``."""
        n = len(entries)
        return cls(
            self_ints=tuple(-c for c in entries),
            edges=frozenset((i, i + 1) for i in range(n - 1)),
            boundary=tuple(boundary),
        )

    def __len__(self) -> int:
        return len(self.self_ints)

    def neighbors(self, i: int) -> tuple[int, ...]:
        return self._nbrs[i]

    def degree(self, i: int) -> int:
        return len(self._nbrs[i])

    def boundary_count(self, i: int) -> int:
        return sum(1 for _, c in self.boundary if c == i)

    def boundary_attach(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for _, c in self.boundary:
            out[c] = out.get(c, 0) + 1
        return out

    def is_path(self) -> bool:
        return all(len(x) <= 2 for x in self._nbrs)

    def path_order(self, start: int | None = None) -> list[int]:
        """Curves of a path in order, starting from ``start`` (default: the end nearest curve 0)."""
        if not self.is_path():
            raise ValueError("configuration is not a chain")
        n = len(self)
        if n == 1:
            return [0]
        ends = [i for i in range(n) if len(self._nbrs[i]) == 1]
        if start is None:
            start = min(ends, key=lambda e: (self._distance(0, e), e))
        order, prev = [start], None
        while len(order) < n:
            cur = order[-1]
            nxt = [x for x in self._nbrs[cur] if x != prev]
            prev = cur
            order.append(nxt[0])
        return order

    def _distance(self, a: int, b: int) -> int:
        seen, frontier, d = {a}, [a], 0
        while frontier:
            if b in frontier:
                return d
            nxt = []
            for u in frontier:
                for v in self._nbrs[u]:
                    if v not in seen:
                        seen.add(v)
                        nxt.append(v)
            frontier, d = nxt, d + 1
        raise ValueError("disconnected")

    def components(self, subset: Iterable[int]) -> list[tuple[int, ...]]:
        """Connected components of the induced subgraph, each sorted, in order of first curve."""
        subset = set(subset)
        out, seen = [], set()
        for s in sorted(subset):
            if s in seen:
                continue
            comp, stack = [], [s]
            seen.add(s)
            while stack:
                u = stack.pop()
                comp.append(u)
                for v in self._nbrs[u]:
                    if v in subset and v not in seen:
                        seen.add(v)
                        stack.append(v)
            out.append(tuple(sorted(comp)))
        return out


def _connected(n: int, nbrs) -> bool:
    if n == 0:
        return True
    seen, stack = {0}, [0]
    while stack:
        for v in nbrs[stack.pop()]:
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return len(seen) == n


@dataclass(frozen=True)
class RationalDivisor:
    """Exact rational coefficients on curves and on boundary branches."""

    coeffs: Mapping[int, Fraction]
    boundary_coeffs: Mapping[str, Fraction] = field(default_factory=dict)

    def __getitem__(self, curve: int) -> Fraction:
        return self.coeffs.get(curve, Fraction(0))

    def values(self, order: Iterable[int] | None = None) -> list[Fraction]:
        keys = sorted(self.coeffs) if order is None else order
        return [self[k] for k in keys]


def intersection_matrix(cfg: CurveConfig, subset: Sequence[int] | None = None) -> Matrix:
    subset = list(range(len(cfg))) if subset is None else list(subset)
    return [
        [cfg.self_ints[u] if u == v else (1 if (min(u, v), max(u, v)) in cfg.edges else 0) for v in subset]
        for u in subset
    ]


def is_negative_definite(matrix: Sequence[Sequence[int | Fraction]]) -> bool:
    """Leading principal minors alternate in sign starting negative.

    Equivalent test: Gaussian elimination without pivoting has every pivot
    negative (pivot k is the ratio of the k-th and (k-1)-th leading minors).
    """
    a = [[Fraction(x) for x in row] for row in matrix]
    n = len(a)
    for k in range(n):
        if len(a[k]) != n:
            raise ValueError("matrix is not square")
        piv = a[k][k]
        if piv >= 0:
            return False
        for i in range(k + 1, n):
            f = a[i][k] / piv
            if f:
                for j in range(k, n):
                    a[i][j] -= f * a[k][j]
    return True


def solve(matrix: Sequence[Sequence[int | Fraction]], rhs: Sequence[int | Fraction]) -> list[Fraction]:
    """Solve ``matrix @ x = rhs`` exactly (Gauss-Jordan with row pivoting)."""
    n = len(matrix)
    a = [[Fraction(x) for x in row] + [Fraction(b)] for row, b in zip(matrix, rhs)]
    for k in range(n):
        p = next((i for i in range(k, n) if a[i][k] != 0), None)
        if p is None:
            raise ZeroDivisionError("singular intersection matrix")
        a[k], a[p] = a[p], a[k]
        piv = a[k][k]
        row_k = [x / piv for x in a[k]]
        a[k] = row_k
        for i in range(n):
            if i != k and a[i][k] != 0:
                f = a[i][k]
                a[i] = [x - f * y for x, y in zip(a[i], row_k)]
    return [a[i][n] for i in range(n)]


def canonical_degrees(cfg: CurveConfig) -> list[int]:
    """``K.C = -C^2 - 2`` for each curve."""
    return [-s - 2 for s in cfg.self_ints]


def _solve_on(cfg: CurveConfig, subset: Sequence[int], fixed: Mapping[int, Fraction],
              boundary_weights: Mapping[str, Fraction]) -> dict[int, Fraction]:
    # unknown x_j for j in subset with (K + sum_b d_b B_b + sum_fixed w_i C_i + sum x_j C_j).C_j = 0
    subset = list(subset)
    if not subset:
        return {}
    kdeg = canonical_degrees(cfg)
    rhs = []
    for j in subset:
        val = Fraction(kdeg[j])
        for label, c in cfg.boundary:
            if c == j:
                val += Fraction(boundary_weights.get(label, 0))
        for i, w in fixed.items():
            if i == j:
                val += w * cfg.self_ints[j]
            elif (min(i, j), max(i, j)) in cfg.edges:
                val += w
        rhs.append(-val)
    return dict(zip(subset, solve(intersection_matrix(cfg, subset), rhs)))


def discrepancies(cfg: CurveConfig, contracted: Sequence[int]) -> RationalDivisor:
    """``Delta`` supported on ``contracted`` with ``(K + Delta).C_j = 0`` for each contracted ``C_j``.

    On the resolution, ``K = pullback(K) - Delta``; for a quotient singularity
    every coefficient lies in ``[0, 1)`` and a Du Val group gives all zeros.
    """
    contracted = sorted(contracted)
    if not is_negative_definite(intersection_matrix(cfg, contracted)):
        raise ValueError("contracted curves are not negative definite")
    return RationalDivisor(_solve_on(cfg, contracted, {}, {}))


def log_discrepancy_solve(cfg: CurveConfig, boundary_weights: Mapping[str, Fraction | int],
                          contracted: Sequence[int] | None = None,
                          curve_weights: Mapping[int, Fraction | int] | None = None) -> RationalDivisor:
    """``Delta`` on ``contracted`` with ``(K + sum d_b B_b + W + Delta).C_j = 0``.

    ``curve_weights`` fixes coefficients ``W`` on curves that are not contracted
    (kept exceptional curves carrying the boundary weight, say).  By default
    every curve of ``cfg`` is contracted.
    """
    contracted = list(range(len(cfg))) if contracted is None else sorted(contracted)
    fixed = {i: Fraction(w) for i, w in (curve_weights or {}).items()}
    if set(fixed) & set(contracted):
        raise ValueError("a curve cannot be both fixed and contracted")
    bw = {k: Fraction(v) for k, v in boundary_weights.items()}
    return RationalDivisor(_solve_on(cfg, contracted, fixed, bw), bw)


def intersection_with(cfg: CurveConfig, curve: int, coeffs: Mapping[int, Fraction],
                      boundary_weights: Mapping[str, Fraction] | None = None) -> Fraction:
    """``(K + sum_b d_b B_b + sum_i coeffs_i C_i) . curve``."""
    val = Fraction(-cfg.self_ints[curve] - 2)
    for label, c in cfg.boundary:
        if c == curve and boundary_weights:
            val += Fraction(boundary_weights.get(label, 0))
    for i, w in coeffs.items():
        if i == curve:
            val += w * cfg.self_ints[curve]
        elif (min(i, curve), max(i, curve)) in cfg.edges:
            val += w
    return val


def canonical_degree(cfg: CurveConfig, contracted: Sequence[int], kept_curve: int,
                     boundary_weights: Mapping[str, Fraction | int] | None = None) -> Fraction:
    """Degree of ``K`` (plus weighted boundary) on the image of ``kept_curve`` after contracting."""
    if kept_curve in contracted:
        raise ValueError("kept curve is contracted")
    bw = {k: Fraction(v) for k, v in (boundary_weights or {}).items()}
    delta = _solve_on(cfg, sorted(contracted), {}, bw)
    return intersection_with(cfg, kept_curve, delta, bw)


def cartier_index(cfg: CurveConfig, boundary_weights: Mapping[str, Fraction | int]) -> int:
    """Order of ``K + sum d_b B_b`` in the local class group of the contracted point.

    A Weil divisor on a rational surface singularity is Cartier iff its
    numerical pullback to the resolution has integral coefficients.
    """
    delta = log_discrepancy_solve(cfg, boundary_weights)
    m = 1
    for v in delta.coeffs.values():
        m = lcm(m, v.denominator)
    return m
