"""Deformation components assembled from P-modifications.

Components of the deformation space of a cyclic quotient correspond to its
P-modifications.  For the pairs ``(S, D)`` the same enumeration is filtered by
the behaviour of ``K + D' + E'`` and the dimension is read off from the local
pair singularities along ``D' + E'`` (here called junctions).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction as Q
from typing import Callable, Iterable, Sequence

from .hjcf import check_chain, hj_expand, normalize
from .lattice import cartier_index
from .modgen import (Modification, _sort_key, ample_q_modifications, dihedral_p_modifications,
                     p_modifications, resolution_config)
from .notation import (DuValA, DuValD, GraphKind, PairGraph, Singularity, T, cyclic, dihedral,
                       format_rational, render_graph)
from .tsing import ksb_local_dim

__all__ = [
    "JunctionKind", "Junction", "ComponentReport", "PltVerdict", "junctions", "def_components",
    "def_ksb_pair_components_cyclic", "def_ksb_pair_components_dihedral", "plt_rigidity",
    "ksba_search", "verify_theorem_1", "triviality_solutions", "triviality_lemmas_check",
    "components_report_json",
]


class JunctionKind(enum.Enum):
    SMOOTH_NODE = "SmoothNode"
    TYPE_A = "TypeA"
    T_JUNCTION = "TJunction"
    D_BRANCH = "DBranch"
    PLT_T_END = "PltTEnd"
    DU_VAL_OFF = "DuValOffCurve"
    OTHER = "Other"


_WHITELIST = {JunctionKind.SMOOTH_NODE, JunctionKind.TYPE_A, JunctionKind.T_JUNCTION,
              JunctionKind.D_BRANCH, JunctionKind.DU_VAL_OFF}


@dataclass(frozen=True)
class Junction:
    """A point of ``S'`` that is singular on the surface or on ``D' + E'``."""

    kind: JunctionKind
    singularity: Singularity | None = None
    branches: int = 2

    @property
    def r(self) -> int:
        s = self.singularity
        return 0 if s is None else s.r

    def local_dim(self) -> int:
        """Dimension of the local KSB deformation space of the pair at this point."""
        k = self.kind
        if k is JunctionKind.SMOOTH_NODE:
            return 1
        if k is JunctionKind.TYPE_A:
            return self.r + 1 if self.branches == 2 else 0
        if k is JunctionKind.T_JUNCTION or k is JunctionKind.DU_VAL_OFF:
            return self.r
        if k is JunctionKind.D_BRANCH:
            return self.r - 2
        return 0

    def generic_fiber(self) -> list[tuple[Singularity, int]]:
        """Points surviving on a general fiber of the local deformation."""
        k = self.kind
        if k is JunctionKind.TYPE_A and self.branches == 1:
            return [(self.singularity, 1)]
        if k is JunctionKind.D_BRANCH:
            return [(DuValA(1), 1), (DuValA(1), 1)]
        if k in (JunctionKind.PLT_T_END, JunctionKind.OTHER):
            return [(self.singularity, self.branches)]
        return []

    def to_json(self) -> dict:
        out: dict = {"kind": self.kind.value, "branches": self.branches}
        if self.singularity is not None:
            out["singularity"] = self.singularity.to_json()
        return out

    def __str__(self) -> str:
        if self.singularity is None:
            return self.kind.value
        return f"{self.kind.value}({self.singularity.label}, {self.branches})"


def _d_branch_ok(cfg, grp: Sequence[int], hit: int) -> bool:
    """Whether a single branch meets a D_r configuration at the end of its long arm."""
    gset = set(grp)
    deg = {c: sum(1 for nb in cfg.neighbors(c) if nb in gset) for c in grp}
    if deg[hit] != 1:
        return False
    if len(grp) == 4:
        return True
    centre = next(c for c in grp if deg[c] == 3)
    steps, prev, cur = 1, hit, next(nb for nb in cfg.neighbors(hit) if nb in gset)
    while cur != centre:
        prev, cur = cur, next(nb for nb in cfg.neighbors(cur) if nb in gset and nb != prev)
        steps += 1
    return steps == len(grp) - 3


def _group_junction(cfg, grp: Sequence[int], sing: Singularity, hits: list[int]) -> Junction:
    b = len(hits)
    if isinstance(sing, T):
        if b == 2:
            return Junction(JunctionKind.T_JUNCTION, sing, 2)
        if b < 2:
            return Junction(JunctionKind.PLT_T_END, sing, b)
        return Junction(JunctionKind.OTHER, sing, b)
    if sing.is_du_val and b == 0:
        return Junction(JunctionKind.DU_VAL_OFF, sing, 0)
    if isinstance(sing, DuValA):
        gset = set(grp)
        ends = [c for c in grp if sum(1 for nb in cfg.neighbors(c) if nb in gset) <= 1]
        if b <= 2 and all(h in ends for h in hits) and (b < 2 or len(grp) == 1 or hits[0] != hits[1]):
            return Junction(JunctionKind.TYPE_A, sing, b)
        if b == 1 and sing.r == 3:
            # A_3 met in its middle curve is the D_3 case
            return Junction(JunctionKind.D_BRANCH, sing, 1)
        return Junction(JunctionKind.OTHER, sing, b)
    if isinstance(sing, DuValD) and b == 1 and _d_branch_ok(cfg, grp, hits[0]):
        return Junction(JunctionKind.D_BRANCH, sing, 1)
    return Junction(JunctionKind.OTHER, sing, b)


def junctions(m: Modification) -> list[Junction]:
    """Junctions of ``(S', D' + E')``: nodes of the curve and every contracted group."""
    cfg, kept = m.config, m.kept
    out: list[Junction] = []
    for u, v in sorted(cfg.edges):
        if u in kept and v in kept:
            out.append(Junction(JunctionKind.SMOOTH_NODE))
    for _, c in cfg.boundary:
        if c in kept:
            out.append(Junction(JunctionKind.SMOOTH_NODE))
    for grp, sing in m.groups:
        gset = set(grp)
        hits = [c for c in grp for nb in cfg.neighbors(c) if nb in kept]
        hits += [c for _, c in cfg.boundary if c in gset]
        out.append(_group_junction(cfg, grp, sing, hits))
    return out


@dataclass(frozen=True)
class ComponentReport:
    modification: Modification
    dimension: int
    generic_fiber: tuple[tuple[Singularity, int], ...] = ()
    d_value: Q | None = None
    junctions: tuple[Junction, ...] = field(default=(), compare=False)

    def to_json(self) -> dict:
        return {
            "dimension": self.dimension,
            "d": format_rational(self.d_value),
            "singularities": [s.to_json() for s in self.modification.singularities],
            "generic_fiber": [{"type": s.to_json(), "branches": b} for s, b in self.generic_fiber],
            "junctions": [j.to_json() for j in self.junctions],
            "modification": self.modification.to_json(),
        }


def _sorted(reports: Iterable[ComponentReport]) -> list[ComponentReport]:
    return sorted(reports, key=lambda r: (r.dimension, _sort_key(r.modification.key)))


def _fiber(js: Iterable[Junction]) -> tuple[tuple[Singularity, int], ...]:
    return tuple(p for j in js for p in j.generic_fiber())


def _nq(n: int | Q, q: int | None) -> tuple[int, int]:
    if q is None:
        f = Q(n)
        n, q = f.numerator, f.denominator
    nq = normalize(n, q)
    return nq.n, nq.q


def _sum_r(m: Modification) -> int:
    return sum(ksb_local_dim(s) for s in m.singularities)


def def_components(chain: Sequence[int]) -> list[ComponentReport]:
    """Components of the deformation space of ``S(chain)``, with their dimensions."""
    g = cyclic(check_chain(chain))
    out = []
    for m in p_modifications(g):
        dim = _sum_r(m) + sum(m.e(c) - 1 for c in m.kept)
        out.append(ComponentReport(m, dim, (), None, tuple(junctions(m))))
    return _sorted(out)


def _type_a_points(js: Iterable[Junction]) -> int:
    return sum(1 for j in js if j.kind is JunctionKind.SMOOTH_NODE
               or (j.kind is JunctionKind.TYPE_A and j.branches == 2))


def def_ksb_pair_components_cyclic(n: int | Q, q: int | None = None) -> list[ComponentReport]:
    """Components of the KSB deformations of ``(S_{n,q}, D_{n,q})``; accepts ``n, q`` or a fraction."""
    n, q = _nq(n, q)
    g = cyclic(hj_expand(n, q), bullets=2)
    out = []
    for m in p_modifications(g):
        if any(v != 0 for v in m.log_degrees(1).values()):
            continue
        js = tuple(junctions(m))
        out.append(ComponentReport(m, _sum_r(m) + _type_a_points(js), _fiber(js), None, js))
    return _sorted(out)


def def_ksb_pair_components_dihedral(n: int | Q, q: int | None = None) -> list[ComponentReport]:
    """Components of the KSB deformations of the dihedral pair with parameters ``n, q``."""
    n, q = _nq(n, q)
    g = dihedral(hj_expand(n, q))
    out = []
    for m in dihedral_p_modifications(g):
        js = tuple(junctions(m))
        out.append(ComponentReport(m, _sum_r(m) + _type_a_points(js) - 2, _fiber(js), None, js))
    return _sorted(out)


@dataclass(frozen=True)
class PltVerdict:
    rigid: bool
    cartier_index: int
    n: int
    q: int

    def to_json(self) -> dict:
        return {"n": self.n, "q": self.q, "rigid": self.rigid, "cartier_index": self.cartier_index}


def plt_rigidity(n: int | Q, q: int | None = None) -> PltVerdict:
    """``(S_{n,q}, B_{n,q})`` is rigid: ``K + B`` has index ``n``, so the index one cover is the plane."""
    n, q = _nq(n, q)
    g = cyclic(hj_expand(n, q), bullets=1)
    idx = cartier_index(resolution_config(g), {b: 1 for b in g.bullets})
    return PltVerdict(idx == n, idx, n, q)


DFilter = Callable[[Q], bool] | tuple[Q, Q] | None


def _accepts(d_filter: DFilter, d: Q | None) -> bool:
    if d_filter is None or d is None:
        return True
    if callable(d_filter):
        return bool(d_filter(d))
    lo, hi = d_filter
    return Q(lo) <= d <= Q(hi)


def _solve_d(m: Modification) -> tuple[bool, Q | None]:
    """The single ``d`` with ``K + d (D' + E')`` trivial on every kept curve.

    Degrees are affine in ``d``; ``(False, None)`` means no solution and
    ``(True, None)`` means every ``d`` works.
    """
    at0, at1 = m.log_degrees(0), m.log_degrees(1)
    d: Q | None = None
    for c, a in at0.items():
        b = at1[c] - a
        if b == 0:
            if a != 0:
                return False, None
            continue
        root = -a / b
        if d is not None and root != d:
            return False, None
        d = root
    return True, d


def ksba_search(g: PairGraph, d_filter: DFilter = None) -> list[ComponentReport]:
    """P-modifications carrying a KSBA deformation of ``(S, dD)`` with Du Val general fibre.

    Each report carries the unique ``d`` in ``(0, 1]`` for which ``K + d(D' + E')``
    is trivial over ``S``; the identity has ``d = None`` (no condition on ``d``).
    Every junction must be on the whitelist of points with doubly KSB deformations.
    """
    out = []
    for m in p_modifications(g):
        js = tuple(junctions(m))
        if any(j.kind not in _WHITELIST for j in js):
            continue
        if m.is_identity:
            d = None
        else:
            ok, d = _solve_d(m)
            if not ok or d is None or not (0 < d <= 1):
                continue
        if not _accepts(d_filter, d):
            continue
        dim = sum(j.local_dim() for j in js)
        out.append(ComponentReport(m, dim, _fiber(js), d, js))
    return _sorted(out)


def verify_theorem_1(chain: Sequence[int]) -> bool:
    """Pair components of ``(S, D)`` and components of ``Def(S)`` have the same count."""
    from .hjcf import hj_evaluate
    n, q = hj_evaluate(check_chain(chain))
    return len(def_ksb_pair_components_cyclic(n, q)) == len(def_components(chain))


def _interval(g: PairGraph) -> tuple[Q, Q]:
    return (Q(1, 2), Q(1)) if g.kind is GraphKind.DIHEDRAL_D else (Q(0), Q(1))


def triviality_solutions(g: PairGraph, d: Q | None = None) -> list[Modification]:
    """Non-identity K-ample Q-modifications with ``K + d(D' + E')`` numerically trivial.

    With ``d = None`` every ``d`` in the open interval of the relevant statement
    is allowed, ``(1/2, 1)`` for dihedral pairs and ``(0, 1)`` otherwise.
    """
    mods = [m for m in ample_q_modifications(g) if not m.is_identity]
    if d is not None:
        d = Q(d)
        return [m for m in mods if all(v == 0 for v in m.log_degrees(d).values())]
    lo, hi = _interval(g)
    out = []
    for m in mods:
        ok, root = _solve_d(m)
        if ok and (root is None or lo < root < hi):
            out.append(m)
    return out


def triviality_lemmas_check(g: PairGraph, d: Q | None = None) -> bool:
    """Exhaustive check of the rigidity statements for ``(S, dD)`` with ``0 < d < 1``.

    Cyclic pairs with two branches have no nontrivial solution; dihedral pairs
    have none once ``d > 1/2``; one-branch cyclic pairs only have solutions with
    a single exceptional curve.  ``d = None`` checks the whole interval at once.
    """
    kind = g.kind
    if kind not in (GraphKind.CYCLIC_B, GraphKind.CYCLIC_D, GraphKind.DIHEDRAL_D):
        raise ValueError(f"no statement for {kind.value} graphs")
    if d is not None:
        d = Q(d)
        lo, hi = _interval(g)
        if not lo < d < hi:
            raise ValueError(f"d must lie strictly between {lo} and {hi}")
    sols = triviality_solutions(g, d)
    if kind is GraphKind.CYCLIC_B:
        return all(len(m.kept) <= 1 for m in sols)
    return not sols


def components_report_json(g: PairGraph, reports: Sequence[ComponentReport]) -> dict:
    return {"graph": render_graph(g), "components": [r.to_json() for r in reports]}
