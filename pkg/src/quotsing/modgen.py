"""Enumeration of Q-, P- and M-modifications of cyclic and dihedral quotients.

Every Q-modification ``S' -> S`` has a minimal resolution obtained from the
minimal resolution of ``S`` by blowing up nodes of the exceptional curve, and
every curve created on the way has discrepancy ``<= 0`` over ``S``.  The
search therefore walks node blow-ups, pruning any whose new curve would have
positive discrepancy, and then chooses which curves to contract.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction as Q
from functools import cached_property, lru_cache
from itertools import product
from typing import Iterable, Iterator, Sequence

from .hjcf import hj_evaluate
from .lattice import CurveConfig, Origin, discrepancies, intersection_with, log_discrepancy_solve
from .notation import (
    Cyclic, DuValA, GraphKind, NotQuotient, PairGraph, Singularity, T, UnsupportedShape, classify_singularity,
    cyclic, group_chain,
)
from .tsing import is_t_or_du_val, m_chain, refine

DEFAULT_SAFETY_CAP = 10 ** 6


class SearchCapExceeded(RuntimeError):
    """The blow-up search visited more states than allowed; the search is finite, so this is a bug."""


def default_safety_cap() -> int:
    return int(os.environ.get("QUOTSING_SAFETY_CAP", DEFAULT_SAFETY_CAP))


# ---------------------------------------------------------------- configurations

def resolution_config(g: PairGraph) -> CurveConfig:
    """Minimal resolution of ``g`` with its boundary branches.

    Cyclic graphs: curves ``0..s-1`` are ``C_1..C_s``.  Dihedral graphs: curves
    ``0..s-1`` are ``C_1..C_s``, and ``s``, ``s+1`` are the (-2)-curves at ``C_1``.
    """
    s = len(g.chain)
    if not g.kind.is_dihedral:
        bnd = []
        if g.kind is GraphKind.CYCLIC_B:
            bnd = [("left", 0)]
        elif g.kind is GraphKind.CYCLIC_D:
            bnd = [("left", 0), ("right", s - 1)]
        return CurveConfig.chain(g.chain, bnd)
    edges = {(i, i + 1) for i in range(s - 1)} | {(0, s), (0, s + 1)}
    bnd = (("end", s - 1),) if g.kind is GraphKind.DIHEDRAL_D else ()
    return CurveConfig(self_ints=tuple(-c for c in g.chain) + (-2, -2), edges=frozenset(edges), boundary=bnd)


def curve_name(g: PairGraph, origin: Origin) -> str:
    if not origin.is_original:
        return f"E{origin.step}"
    s = len(g.chain)
    if g.kind.is_dihedral and origin.index >= s:
        return "C0'" if origin.index == s else "C0''"
    return f"C{origin.index + 1}"


def blow_up_node(cfg: CurveConfig, node: tuple[int, int]) -> CurveConfig:
    """Blow up the point where the curves ``node = (u, v)`` meet."""
    u, v = sorted(node)
    if (u, v) not in cfg.edges:
        raise ValueError(f"curves {u} and {v} do not meet")
    if not (cfg.exceptional[u] and cfg.exceptional[v]):
        raise ValueError("only nodes of the exceptional curve are blown up")
    new = len(cfg)
    step = sum(1 for o in cfg.origins if not o.is_original) + 1
    self_ints = list(cfg.self_ints)
    self_ints[u] -= 1
    self_ints[v] -= 1
    self_ints.append(-1)
    edges = (cfg.edges - {(u, v)}) | {(u, new), (v, new)}
    return CurveConfig(
        self_ints=tuple(self_ints), edges=frozenset(edges), boundary=cfg.boundary,
        origins=cfg.origins + (Origin(step=step, node=(u, v)),), exceptional=cfg.exceptional + (True,),
    )


def _segments(cfg: CurveConfig) -> list[tuple[int, int, list[int]]]:
    """For each original edge ``(i, j)``, the curves inserted between ``C_i`` and ``C_j`` in order."""
    out = []
    for i, o in enumerate(cfg.origins):
        if not o.is_original:
            continue
        for first in cfg.neighbors(i):
            path, prev, cur = [], i, first
            while not cfg.origins[cur].is_original:
                path.append(cur)
                prev, cur = cur, next(x for x in cfg.neighbors(cur) if x != prev)
            j = cur
            if cfg.origins[i].index < cfg.origins[j].index:
                out.append((cfg.origins[i].index, cfg.origins[j].index, path))
    return sorted(out, key=lambda t: (t[0], t[1]))


def config_key(cfg: CurveConfig, kept: Iterable[int] | None = None) -> tuple:
    """Labelled canonical form: original curves by label, inserted curves along each original edge."""
    kept = frozenset(kept) if kept is not None else None

    def item(c):
        return cfg.self_ints[c] if kept is None else (cfg.self_ints[c], c in kept)

    originals = sorted((o.index, c) for c, o in enumerate(cfg.origins) if o.is_original)
    return (
        tuple(item(c) for _, c in originals),
        tuple((i, j, tuple(item(c) for c in path)) for i, j, path in _segments(cfg)),
    )


@dataclass(frozen=True)
class BlowupState:
    config: CurveConfig
    discrepancy: tuple[Q, ...]
    blowups: tuple[tuple[int, int], ...]

    @cached_property
    def key(self) -> tuple:
        return config_key(self.config)


def base_discrepancies(cfg: CurveConfig) -> tuple[Q, ...]:
    """Discrepancies ``a_i`` of ``K = pullback(K) + sum a_i C_i`` (so ``a_i = -Delta_i``)."""
    delta = discrepancies(cfg, range(len(cfg)))
    return tuple(-delta[i] for i in range(len(cfg)))


def enumerate_blowup_trees(g: PairGraph, safety_cap: int | None = None,
                           reverse_order: bool = False, strict: bool = False) -> list[BlowupState]:
    """All node blow-up sequences of the minimal resolution whose new curves have discrepancy ``<= 0``.

    With ``strict`` the new curves must have discrepancy ``< 0``; this is all a
    modification with relatively ample ``K`` can reach, since by the negativity
    lemma every curve over the base then has negative discrepancy.
    States are deduplicated by :func:`config_key` and returned sorted by it.
    ``reverse_order`` explores nodes in the opposite order (the result must not change).
    """
    cap = default_safety_cap() if safety_cap is None else safety_cap
    cfg = resolution_config(g)
    start = BlowupState(cfg, base_discrepancies(cfg), ())
    seen = {start.key: start}
    frontier = [start]
    while frontier:
        nxt = []
        for st in frontier:
            edges = sorted(st.config.edges, reverse=reverse_order)
            for u, v in edges:
                a_new = st.discrepancy[u] + st.discrepancy[v] + 1
                if a_new > 0 or (strict and a_new == 0):
                    continue
                child = BlowupState(blow_up_node(st.config, (u, v)), st.discrepancy + (a_new,),
                                    st.blowups + ((u, v),))
                if child.key in seen:
                    continue
                seen[child.key] = child
                if len(seen) > cap:
                    raise SearchCapExceeded(f"more than {cap} blow-up states for {g}")
                nxt.append(child)
        frontier = nxt
    return [seen[k] for k in sorted(seen)]


# ---------------------------------------------------------------- modifications

@dataclass(frozen=True, eq=False)
class Modification:
    """A modification ``S' -> S`` given by its minimal resolution and the curves it keeps.

    ``config`` is the minimal resolution of ``S'``; ``kept`` are the exceptional
    curves of ``S' -> S`` (as curves of ``config``); every other curve lies in one
    of ``groups``, each contracted to a point of the given type.
    """

    base: PairGraph
    config: CurveConfig
    blowups: tuple[tuple[int, int], ...]
    kept: frozenset[int]
    groups: tuple[tuple[tuple[int, ...], Singularity], ...]

    @cached_property
    def key(self) -> tuple:
        return (self.base, config_key(self.config, self.kept))

    def __eq__(self, other) -> bool:
        return isinstance(other, Modification) and self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def __repr__(self) -> str:
        return f"Modification({self.base}: {self.describe()})"

    @property
    def contracted(self) -> list[int]:
        return sorted(c for grp, _ in self.groups for c in grp)

    @property
    def singularities(self) -> list[Singularity]:
        return [s for _, s in self.groups]

    @property
    def is_identity(self) -> bool:
        return not self.kept

    def e(self, curve: int) -> int:
        """Negative self-intersection of a kept curve on the minimal resolution of ``S'``."""
        return -self.config.self_ints[curve]

    @cached_property
    def _delta(self) -> dict[int, Q]:
        out: dict[int, Q] = {}
        for grp, _ in self.groups:
            out.update(discrepancies(self.config, grp).coeffs)
        return out

    def k_degree(self, curve: int) -> Q:
        """``K_{S'}`` on the image of a kept curve."""
        return intersection_with(self.config, curve, self._delta)

    def k_degrees(self) -> dict[int, Q]:
        return {c: self.k_degree(c) for c in sorted(self.kept)}

    def is_k_nef(self) -> bool:
        return all(v >= 0 for v in self.k_degrees().values())

    def is_k_ample(self) -> bool:
        return all(v > 0 for v in self.k_degrees().values())

    def is_p(self) -> bool:
        return self.is_k_ample() and all(is_t_or_du_val(s) for s in self.singularities)

    def log_degrees(self, d: Q | int, weights: dict[str, Q] | None = None) -> dict[int, Q]:
        """``(K + d (D' + E'))`` on each kept curve, ``D'`` the boundary and ``E'`` the kept curves."""
        d = Q(d)
        bw = weights if weights is not None else {b: d for b in self.base.bullets}
        kept = {c: d for c in self.kept}
        delta = log_discrepancy_solve(self.config, bw, self.contracted, kept).coeffs
        coeffs = dict(delta)
        coeffs.update(kept)
        return {c: intersection_with(self.config, c, coeffs, bw) for c in sorted(self.kept)}

    def order(self) -> list[int]:
        """Curves of a chain-shaped resolution in order (from the side of ``C_1``)."""
        return self.config.path_order()

    def describe(self) -> str:
        """Target graph: kept curves as ``-E^2`` and contracted groups as boxes."""
        if self.config.is_path():
            return _describe_path(self)
        parts = []
        for c in sorted(self.kept):
            parts.append(f"{curve_name(self.base, self.config.origins[c])}={self.e(c)}")
        for _, s in self.groups:
            parts.append(f"[{s.label}]")
        return " ".join(parts) if parts else "identity"

    def to_json(self) -> dict:
        cfg = self.config
        return {
            "blowups": [[curve_name(self.base, cfg.origins[u]), curve_name(self.base, cfg.origins[v])]
                        for u, v in _named_blowups(self)],
            "kept": [{"curve": curve_name(self.base, cfg.origins[c]), "self_int": cfg.self_ints[c]}
                     for c in sorted(self.kept)],
            "groups": [{"curves": [curve_name(self.base, cfg.origins[c]) for c in grp], "type": s.to_json()}
                       for grp, s in self.groups],
            "target": self.describe(),
        }


def _named_blowups(m: Modification) -> list[tuple[int, int]]:
    return [tuple(node) for node in m.blowups]


def _describe_path(m: Modification) -> str:
    order = m.order()
    items: list[str] = []
    bnd = m.config.boundary_attach()
    left = [lab for lab, c in m.config.boundary if c == order[0]]
    right = [lab for lab, c in m.config.boundary if c == order[-1]]
    if m.base.kind is GraphKind.CYCLIC_D or m.base.kind is GraphKind.CYCLIC_B:
        if left:
            items.append("*")
    group_of = {c: (grp, s) for grp, s in m.groups for c in grp}
    i = 0
    while i < len(order):
        c = order[i]
        if c in m.kept:
            items.append(str(m.e(c)))
            i += 1
            continue
        grp, s = group_of[c]
        entries = group_chain(m.config, grp)
        items.append(f"[{_box_label(entries, s)}]")
        i += len(grp)
    if m.base.kind is GraphKind.CYCLIC_D and right and len(order) >= 1 and bnd:
        items.append("*")
    return " - ".join(items)


def _box_label(entries: Sequence[int], s: Singularity) -> str:
    if isinstance(s, DuValA):
        return f"A_{s.r}"
    n, q = hj_evaluate(entries)
    return f"{n}/{q}"


def make_modification(base: PairGraph, cfg: CurveConfig, blowups, kept: Iterable[int]) -> Modification:
    kept = frozenset(kept)
    rest = [c for c in range(len(cfg)) if c not in kept]
    groups = tuple((grp, refine(classify_singularity(cfg, grp))) for grp in cfg.components(rest))
    return Modification(base, cfg, tuple(blowups), kept, groups)


# ---------------------------------------------------------------- edge walks

# The curves inserted along an edge (L, R) by node blow-ups have weight
# vectors w_1, ..., w_k (valuation of L, valuation of R) with w_0 = (1, 0),
# w_{k+1} = (0, 1), consecutive vectors unimodular and
# w_{i-1} + w_{i+1} = e_i w_i, where -e_i is the self-intersection.  The log
# discrepancy of w = (u, v) is u b_L + v b_R, so admissibility is linear.

@lru_cache(maxsize=None)
def _edge_weights(b_left: Q, b_right: Q) -> tuple[int, int, int]:
    """Log discrepancies of the two ends over a common denominator."""
    den = b_left.denominator * b_right.denominator
    return b_left.numerator * b_right.denominator, b_right.numerator * b_left.denominator, den


def _admissible(w: tuple[int, int], weights: tuple[int, int, int], strict: bool) -> bool:
    pl, pr, den = weights
    b = w[0] * pl + w[1] * pr
    return b < den if strict else b <= den


def _first_steps(weights: tuple[int, int, int], strict: bool) -> Iterator[tuple[int, int] | None]:
    """Choices for the first inserted vector ``(u, 1)``; ``None`` means the edge is not blown up."""
    yield None
    u = 1
    while _admissible((u, 1), weights, strict):
        yield (u, 1)
        u += 1


def _next_steps(prev: tuple[int, int], cur: tuple[int, int], weights: tuple[int, int, int],
                strict: bool) -> Iterator[tuple[int, tuple[int, int]]]:
    """Pairs ``(e, next)`` with ``next = e * cur - prev``, either the end ``(0, 1)`` or admissible."""
    e = max(1, -(-prev[0] // cur[0]))
    while True:
        nxt = (e * cur[0] - prev[0], e * cur[1] - prev[1])
        if nxt == (0, 1):
            yield e, nxt
        elif nxt[0] > 0 and _admissible(nxt, weights, strict):
            yield e, nxt
        elif nxt[0] > 0:
            return
        e += 1


def _walk_blowups(vectors: Sequence[tuple[int, int]]) -> tuple[tuple[object, object], ...]:
    """Blow-up centres, in local labels ``"L"``, ``"R"`` or creation index, producing ``vectors``."""
    seq: list[tuple[object, tuple[int, int]]] = [("L", (1, 0)), ("R", (0, 1))]
    remaining = set(vectors)
    out = []
    while remaining:
        for k in range(len(seq) - 1):
            (lx, wx), (ly, wy) = seq[k], seq[k + 1]
            w = (wx[0] + wy[0], wx[1] + wy[1])
            if w in remaining:
                remaining.remove(w)
                seq.insert(k + 1, (len(out), w))
                out.append((lx, ly))
                break
        else:
            raise AssertionError(f"{list(vectors)} is not a chain of node blow-ups")
    return tuple(out)


def _apply_walks(cfg: CurveConfig, walks: Sequence[tuple[tuple[int, int], Sequence[tuple[int, int]]]]
                 ) -> tuple[CurveConfig, tuple]:
    blowups = []
    for (u, v), vectors in walks:
        local: dict[object, int] = {"L": u, "R": v}
        for step, (x, y) in enumerate(_walk_blowups(vectors)):
            a, b = local[x], local[y]
            cfg = blow_up_node(cfg, (a, b))
            blowups.append((a, b))
            local[step] = len(cfg) - 1
    return cfg, tuple(blowups)


# ---------------------------------------------------------------- contraction choices

@lru_cache(maxsize=None)
def _chain_group(entries: tuple[int, ...]) -> tuple[Singularity, Q, Q]:
    """Type of a contracted chain and the coefficients of ``Delta`` at its two ends.

    For ``n/q = [c_1, ..., c_k]`` these are ``1 - (1 + q)/n`` and ``1 - (1 + q')/n``.
    """
    n, q = hj_evaluate(entries)
    q_rev = hj_evaluate(entries[::-1]).q if len(entries) > 1 else q
    if all(c == 2 for c in entries):
        sing: Singularity = DuValA(len(entries))
    else:
        sing = refine(Cyclic(n, q))
    return sing, 1 - Q(1 + q, n), 1 - Q(1 + q_rev, n)


@lru_cache(maxsize=None)
def _t_or_du_val(sing: Singularity) -> bool:
    return is_t_or_du_val(sing)


def _group_ok(sing: Singularity, mode: str) -> bool:
    return mode != "P" or _t_or_du_val(sing)


@lru_cache(maxsize=None)
def _group_info(desc: tuple, mode: str) -> tuple[Singularity, dict] | None:
    """Type and ``Delta`` (keyed by position) of a contracted group, or ``None`` if unusable.

    ``desc = (arm1, arm2, main)``: ``main`` is a chain whose first curve also
    meets the arms, each listed outward.  Positions are ``("m", i)`` and ``("a", k, j)``.
    """
    arm1, arm2, main = desc
    m = len(main)
    if not arm1 and not arm2:
        # only the two ends of a chain are ever queried
        sing, d0, d1 = _chain_group(main)
        if not _group_ok(sing, mode):
            return None
        return sing, {("m", 0): d0, ("m", m - 1): d1}
    ents = list(main) + list(arm1) + list(arm2)
    edges = {(i, i + 1) for i in range(m - 1)}
    pos = {("m", i): i for i in range(m)}
    base = m
    for k, arm in enumerate((arm1, arm2)):
        prev = 0
        for j in range(len(arm)):
            edges.add((min(prev, base + j), max(prev, base + j)))
            pos[("a", k, j)] = base + j
            prev = base + j
        base += len(arm)
    cfg = CurveConfig(self_ints=tuple(-c for c in ents), edges=frozenset(edges))
    group = tuple(range(len(ents)))
    try:
        sing = refine(classify_singularity(cfg, group))
    except NotQuotient:
        return None
    except UnsupportedShape:
        if mode != "P":
            raise
        return None
    if not _group_ok(sing, mode):
        return None
    delta = discrepancies(cfg, group)
    return sing, {p: delta[i] for p, i in pos.items()}


class _Search:
    """Left-to-right search over a chain, or a fork read as a chain with two short arms at ``C_1``.

    Curves are decided in order together with the blow-ups on each edge.  The
    partial state is either the last kept curve (its value and the contribution
    from its left) or the open contracted group with the kept curves still
    waiting for its ``Delta``.  States from which nothing completes are remembered.
    """

    def __init__(self, g: PairGraph, mode: str, cap: int, keep: Iterable[int] = (), frozen: Iterable[int] = ()):
        self.g, self.mode, self.cap = g, mode, cap
        self.keep, self.frozen = frozenset(keep), frozenset(frozen)
        self.strict = mode in ("A", "P")
        self.cfg0 = resolution_config(g)
        self.s = len(g.chain)
        self.b = tuple(1 + x for x in base_discrepancies(self.cfg0))
        self.dead: set = set()
        self.zero = Q(0)

    # automaton
    def ample(self, e: int, left: Q, right: Q) -> bool:
        deg = e - 2 + left + right
        return deg > 0 if self.strict else deg >= 0

    def close(self, desc, pend):
        info = _group_info(desc, self.mode)
        if info is None:
            return None
        _, delta = info
        if all(self.ample(e, left, delta[p]) for p, e, left in pend):
            return delta[("m", len(desc[2]) - 1)]
        return None

    def initial(self, x: int):
        yield ("kept", x, self.zero), True
        if x >= 2:
            yield ("group", ((), (), (x,)), ()), False

    def step(self, state, x: int):
        if state is None:
            yield from self.initial(x)
            return
        if state[0] == "kept":
            _, e, left = state
            if self.ample(e, left, self.zero):
                yield ("kept", x, self.zero), True
            if x >= 2:
                yield ("group", ((), (), (x,)), ((("m", 0), e, left),)), False
        else:
            _, desc, pend = state
            if x >= 2:
                yield ("group", (desc[0], desc[1], desc[2] + (x,)), pend), False
            d_last = self.close(desc, pend)
            if d_last is not None:
                yield ("kept", x, d_last), True

    def finish(self, state) -> bool:
        if state[0] == "kept":
            return self.ample(state[1], state[2], self.zero)
        return self.close(state[1], state[2]) is not None

    # walking one edge; `done(state, flags, vectors, dec_right)` continues after it
    def walk(self, key, state, prev, cur, bl, br, flags, vectors, done) -> bool:
        memo = (key, prev, cur, state)
        if memo in self.dead:
            return False
        found = False
        for e, nxt in _next_steps(prev, cur, _edge_weights(bl, br), self.strict):
            for st, kept in self.step(state, e):
                if nxt == (0, 1):
                    ok = done(st, flags + (kept,), vectors + (cur,), cur[1])
                else:
                    ok = self.walk(key, st, cur, nxt, bl, br, flags + (kept,), vectors + (cur,), done)
                found = found or ok
        if not found:
            self.dead.add(memo)
        return found

    def edge(self, key, state, entry_base: int, bl, br, flags, done, keep=False, frozen=False) -> bool:
        """Emit the left end curve (value ``entry_base`` plus its decrement) and walk the edge."""
        found = False
        firsts = (None,) if frozen else _first_steps(_edge_weights(bl, br), self.strict)
        for first in firsts:
            dec = first[0] if first else 0
            for st, kept in self.step(state, entry_base + dec):
                if keep and not kept:
                    continue
                if first is None:
                    ok = done(st, flags + (kept,), (), 0)
                else:
                    ok = self.walk(key, st, (1, 0), first, bl, br, flags + (kept,), (), done)
                found = found or ok
        return found

    # main chain
    def main(self, i: int, dec_in: int, state, segs, flags, arms, results) -> bool:
        s = self.s
        memo = ("C", i, dec_in, state)
        if memo in self.dead:
            return False
        if i == s - 1:
            found = False
            for st, kept in self.step(state, self.g.chain[i] + dec_in):
                if i in self.keep and not kept:
                    continue
                if self.finish(st):
                    results.append((segs, flags + (kept,), arms))
                    if len(results) > self.cap:
                        raise SearchCapExceeded(f"more than {self.cap} modifications of {self.g}")
                    found = True
        else:
            def done(st, fl, vecs, dec_right):
                return self.main(i + 1, dec_right, st, segs + (vecs,), fl, arms, results)
            found = self.edge(("m", i), state, self.g.chain[i] + dec_in, self.b[i], self.b[i + 1],
                              flags, done, i in self.keep, i in self.frozen)
        if not found:
            self.dead.add(memo)
        return found

    def arm(self, k: int) -> dict:
        """Boundary states of arm ``k``, walked from its leaf towards ``C_1``."""
        s = self.s
        leaf = s + k
        out: dict = {}

        def done(st, fl, vecs, dec_right):
            if st[0] == "kept":
                key = (dec_right, (), (st[1], st[2]))
            else:
                _, desc, pend = st
                key = (dec_right, tuple(reversed(desc[2])),
                       (pend[0][1], pend[0][2]) if pend else None)
            out.setdefault(key, []).append((vecs, fl))
            return True

        self.edge(("a", k), None, 2, self.b[leaf], self.b[0], (), done)
        return out

    def start_states(self, arm_keys, e1: int):
        """States after ``C_1`` for one choice of arm boundary states."""
        zero = self.zero
        left = zero
        good = True
        for _, attached, pending in arm_keys:
            if attached:
                info = _group_info(((), (), tuple(attached)), self.mode)
                if info is None:
                    good = False
                    break
                d_in, d_out = info[1][("m", 0)], info[1][("m", len(attached) - 1)]
                left += d_in
                if pending is not None and not self.ample(pending[0], pending[1], d_out):
                    good = False
                    break
            elif pending is not None and not self.ample(pending[0], pending[1], zero):
                good = False
                break
        if good:
            yield ("kept", e1, left), True
        if e1 >= 2:
            pend, atts = [], []
            for k, (_, attached, pending) in enumerate(arm_keys):
                atts.append(attached)
                if pending is not None:
                    p = ("a", k, len(attached) - 1) if attached else ("m", 0)
                    pend.append((p, pending[0], pending[1]))
            yield ("group", (atts[0], atts[1], (e1,)), tuple(pend)), False

    def run(self) -> list[Modification]:
        g, s = self.g, self.s
        results: list = []
        if not g.kind.is_dihedral:
            self.main(0, 0, None, (), (), (), results)
            arm_tables: list[dict] = []
        else:
            arm_tables = [self.arm(0), self.arm(1)]
            for arm_keys in product(*(sorted(t, key=repr) for t in arm_tables)):
                extra = arm_keys[0][0] + arm_keys[1][0]

                if s == 1:
                    for st, kept in self.start_states(arm_keys, g.chain[0] + extra):
                        if self.finish(st):
                            results.append(((), (kept,), arm_keys))
                    continue
                for first in _first_steps(_edge_weights(self.b[0], self.b[1]), self.strict):
                    dec = first[0] if first else 0
                    for st, kept in self.start_states(arm_keys, g.chain[0] + extra + dec):
                        def done(stt, fl, vecs, dec_right, arm_keys=arm_keys):
                            return self.main(1, dec_right, stt, (vecs,), fl, arm_keys, results)
                        if first is None:
                            done(st, (kept,), (), 0)
                        else:
                            self.walk(("m", 0), st, (1, 0), first, self.b[0], self.b[1], (kept,), (), done)
        out = []
        main_edges = [(i, i + 1) for i in range(s - 1)]
        for segs, flags, arm_keys in results:
            arm_lists = [arm_tables[k][key] for k, key in enumerate(arm_keys)]
            for arms in product(*arm_lists):
                walks = list(zip(main_edges, segs))
                walks += [((s + k, 0), vecs) for k, (vecs, _) in enumerate(arms)]
                cfg, blowups = _apply_walks(self.cfg0, walks)
                kept = {c for c, f in zip(_path_between(cfg, 0, s - 1), flags) if f}
                for k, (_, fl) in enumerate(arms):
                    path = _path_between(cfg, s + k, 0)[:-1]
                    kept.update(c for c, f in zip(path, fl) if f)
                out.append(make_modification(g, cfg, blowups, kept))
        return out


def _path_between(cfg: CurveConfig, u: int, v: int) -> list[int]:
    prev = {u: None}
    stack = [u]
    while stack:
        x = stack.pop()
        for y in cfg.neighbors(x):
            if y not in prev:
                prev[y] = x
                stack.append(y)
    path = [v]
    while path[-1] != u:
        path.append(prev[path[-1]])
    return path[::-1]


@lru_cache(maxsize=None)
def _tree_group(cfg: CurveConfig, grp: tuple[int, ...]) -> tuple[Singularity, dict[int, Q]] | None:
    try:
        sing = refine(classify_singularity(cfg, grp))
    except NotQuotient:
        return None
    return sing, dict(discrepancies(cfg, grp).coeffs)


def _tree_contractions(cfg: CurveConfig, mode: str) -> Iterator[tuple[frozenset[int], list]]:
    n = len(cfg)
    free = [c for c in range(n) if cfg.self_ints[c] <= -2]
    forced = [c for c in range(n) if cfg.self_ints[c] > -2]
    for bits in product((False, True), repeat=len(free)):
        contracted = [c for c, b in zip(free, bits) if b]
        kept = frozenset(forced + [c for c, b in zip(free, bits) if not b])
        groups = []
        delta: dict[int, Q] = {}
        good = True
        for grp in cfg.components(contracted):
            info = _tree_group(cfg, grp)
            if info is None or not _group_ok(info[0], mode):
                good = False
                break
            groups.append((grp, info[0]))
            delta.update(info[1])
        if not good:
            continue
        degs = [intersection_with(cfg, c, delta) for c in kept]
        if mode in ("A", "P") and any(v <= 0 for v in degs):
            continue
        if mode == "Q" and any(v < 0 for v in degs):
            continue
        yield kept, groups


def _modifications(g: PairGraph, mode: str, safety_cap: int | None = None) -> list[Modification]:
    cap = default_safety_cap() if safety_cap is None else safety_cap
    return _sorted_unique(_Search(g, mode, cap).run())


def restricted_q_modifications(g: PairGraph, keep: Iterable[int] = (), frozen: Iterable[int] = (),
                               safety_cap: int | None = None) -> list[Modification]:
    """Q-modifications of a chain keeping the curves ``keep`` and not blowing up the edges ``frozen``.

    Edge ``i`` joins ``C_{i+1}`` and ``C_{i+2}`` (0-based curves ``i`` and ``i + 1``).
    """
    if g.kind.is_dihedral:
        raise ValueError("restrictions are only supported for chains")
    cap = default_safety_cap() if safety_cap is None else safety_cap
    return _sorted_unique(_Search(g, "Q", cap, keep, frozen).run())


def _sort_key(key: tuple) -> tuple:
    base, ck = key
    return repr(ck)


def modifications_by_blowup_trees(g: PairGraph, mode: str = "Q", reverse_order: bool = False,
                                  safety_cap: int | None = None) -> list[Modification]:
    """Reference route: every state of :func:`enumerate_blowup_trees`, then every contraction choice."""
    found = []
    for st in enumerate_blowup_trees(g, safety_cap, reverse_order, strict=(mode in ("A", "P"))):
        for kept, groups in _tree_contractions(st.config, mode):
            found.append(Modification(g, st.config, st.blowups, kept, tuple(sorted(groups, key=lambda t: t[0]))))
    return _sorted_unique(found)


def enumerate_q_modifications(g: PairGraph, safety_cap: int | None = None) -> list[Modification]:
    """Every Q-modification of the singularity of ``g`` (``K`` nef, quotient points only)."""
    return _modifications(g, "Q", safety_cap)


def filter_p_modifications(qmods: Iterable[Modification]) -> list[Modification]:
    """Q-modifications with ``K`` ample and only Du Val and T points."""
    return [m for m in qmods if m.is_p()]


def ample_q_modifications(g: PairGraph, safety_cap: int | None = None) -> list[Modification]:
    """Q-modifications on which ``K`` is ample, searched with the strict pruning."""
    return _modifications(g, "A", safety_cap)


@lru_cache(maxsize=4096)
def p_modifications(g: PairGraph) -> tuple[Modification, ...]:
    """P-modifications of the singularity of ``g``, enumerated directly with the P constraints."""
    return tuple(_modifications(g, "P"))


# ---------------------------------------------------------------- M-modifications

def _m_blowup_positions(t_entries: Sequence[int], m_entries: Sequence[int]) -> list[int]:
    """Positions ``i`` (node between entries ``i`` and ``i+1``) turning ``t_entries`` into ``m_entries``."""
    c = list(m_entries)
    downs = []
    while True:
        idx = next((i for i in range(1, len(c) - 1) if c[i] == 1), None)
        if idx is None:
            break
        downs.append(idx - 1)
        c[idx - 1] -= 1
        c[idx + 1] -= 1
        del c[idx]
    if tuple(c) != tuple(t_entries):
        raise AssertionError(f"M-chain {list(m_entries)} does not blow down to {list(t_entries)}")
    return list(reversed(downs))


def p_to_m(p: Modification) -> Modification:
    """The M-modification of a P-modification.

    Du Val points are resolved; a ``T(r, n, a)`` point with ``r > 1`` is replaced
    by ``r`` points ``1/n^2 (1, a n - 1)`` joined by ``r - 1`` (-1)-curves.
    """
    if not p.is_p():
        raise ValueError("not a P-modification")
    cfg = p.config
    blowups = list(p.blowups)
    kept = set(p.kept)
    for grp, sing in p.groups:
        if sing.is_du_val:
            kept.update(grp)
            continue
        if not isinstance(sing, T) or sing.r == 1:
            continue
        path = _ordered_group(cfg, grp)
        t_entries = [-cfg.self_ints[c] for c in path]
        target = [-s for s in m_chain(sing.r, sing.n, sing.a).self_ints]
        if t_entries != list(sing.chain):
            target = target[::-1]
        for pos in _m_blowup_positions(t_entries, target):
            u, v = path[pos], path[pos + 1]
            cfg = blow_up_node(cfg, (u, v))
            blowups.append((u, v))
            path.insert(pos + 1, len(cfg) - 1)
        got = [-cfg.self_ints[c] for c in path]
        if got != target:
            raise AssertionError(f"M-chain replay produced {got}, expected {target}")
        kept.update(c for c in path if cfg.self_ints[c] == -1)
    m = make_modification(p.base, cfg, blowups, kept)
    if not m.is_k_nef():
        raise AssertionError("M-modification is not K-nef")
    return m


def _ordered_group(cfg: CurveConfig, grp: Sequence[int]) -> list[int]:
    from .notation import _ordered_path
    return _ordered_path(cfg, grp)


def is_m_modification(m: Modification) -> bool:
    """``K`` nef and every point is ``1/n^2 (1, a n - 1)``."""
    return m.is_k_nef() and all(isinstance(s, T) and s.r == 1 for s in m.singularities)


# ---------------------------------------------------------------- dihedral

def _replay(base: PairGraph, src: Modification, index_map: dict[int, int]) -> tuple[CurveConfig, list, dict]:
    """Replay the blow-ups of ``src`` on the resolution of ``base``; return config, blow-ups, full index map."""
    cfg = resolution_config(base)
    imap = dict(index_map)
    blowups = []
    n_src = len(resolution_config(src.base))
    for step, (u, v) in enumerate(src.blowups):
        a, b = imap[u], imap[v]
        cfg = blow_up_node(cfg, (a, b))
        blowups.append((a, b))
        imap[n_src + step] = len(cfg) - 1
    return cfg, blowups, imap


def dihedral_p_modifications(g: PairGraph) -> list[Modification]:
    """P-modifications of a dihedral quotient that contract both (-2)-curves at ``C_1`` to Du Val points.

    Built from the P-modifications of the chain ``[c_2, ..., c_s]``: when
    ``c_1 > 2``, or ``C_2`` goes to a non-Du Val point, ``C_1`` is kept and the two
    (-2)-curves become ``A_1`` points; when ``C_2, ..., C_i`` go to an ``A_{i-1}``
    point, ``C_1`` and the (-2)-curves join it as ``D_{i+2}``; when ``C_2`` is kept,
    ``C_1`` and the (-2)-curves form ``A_3``.
    """
    if not g.kind.is_dihedral:
        raise ValueError("dihedral graph expected")
    s = len(g.chain)
    c1 = g.chain[0]
    base_cfg = resolution_config(g)
    if s == 1:
        kept = {0} if c1 > 2 else set()
        return [make_modification(g, base_cfg, (), kept)]
    tail = cyclic(g.chain[1:])
    out = []
    for tm in p_modifications(tail):
        cfg, blowups, imap = _replay(g, tm, {j: j + 1 for j in range(s - 1)})
        kept = {imap[c] for c in tm.kept}
        c2 = imap[0]
        c2_group = next((sing for grp, sing in tm.groups if 0 in grp), None)
        if c1 > 2 or (c2_group is not None and not c2_group.is_du_val):
            kept.add(0)
        elif c2_group is not None:
            pass  # C_1 joins C_2..C_i and the (-2)-curves in a D-type point
        else:
            pass  # C_2 kept: C_1 and the (-2)-curves give A_3
        assert c2 in kept or c2_group is not None
        out.append(make_modification(g, cfg, blowups, kept))
    return _sorted_unique(out)


def _sorted_unique(mods: Iterable[Modification]) -> list[Modification]:
    found = {}
    for m in mods:
        found.setdefault(m.key, m)
    return [found[k] for k in sorted(found, key=_sort_key)]


def dihedral_case(m: Modification) -> int:
    """Which of the four dihedral cases a fork P-modification falls in (0 if none).

    1: both (-2)-curves become separate ``A_1`` points; 2: both lie in one Du Val
    point with ``C_1``; 3: both kept; 4: one kept, the other contracted with ``C_1``
    to a non-Du Val point.
    """
    s = len(m.base.chain)
    cfg = m.config
    p1 = next(c for c, o in enumerate(cfg.origins) if o.index == s)
    p2 = next(c for c, o in enumerate(cfg.origins) if o.index == s + 1)
    c1 = next(c for c, o in enumerate(cfg.origins) if o.index == 0)
    group_of = {c: (grp, sing) for grp, sing in m.groups for c in grp}
    k1, k2 = p1 in m.kept, p2 in m.kept
    if k1 and k2:
        return 3
    if not k1 and not k2:
        g1, s1 = group_of[p1]
        g2, s2 = group_of[p2]
        if g1 == (p1,) and g2 == (p2,):
            return 1
        if g1 == g2 and c1 in g1 and s1.is_du_val:
            return 2
        return 0
    other = p2 if k1 else p1
    grp, sing = group_of[other]
    if c1 in grp and not sing.is_du_val:
        return 4
    return 0


def dihedral_from_chain_pmods(g: PairGraph) -> list[Modification]:
    """All P-modifications of the fork, derived from those of the chain ``[2, c_1, ..., c_s]``.

    The first curve of the chain plays ``C_0'``; ``C_0''`` is contracted exactly
    when ``C_0'`` is contracted to a Du Val point or ``C_1`` is kept, and the
    non-Du Val case with ``C_0'`` contracted also yields the mirror image.
    """
    if not g.kind.is_dihedral:
        raise ValueError("dihedral graph expected")
    s = len(g.chain)
    chain_g = cyclic((2,) + g.chain)
    out = []
    for cm in p_modifications(chain_g):
        # chain index 0 is C0', chain index j >= 1 is C_j (fork index j - 1)
        imap = {0: s}
        imap.update({j: j - 1 for j in range(1, s + 1)})
        if any(0 in node for node in cm.blowups):
            raise AssertionError(f"unexpected blow-up on the (-2)-curve in {cm}")
        cfg, blowups, fmap = _replay(g, cm, imap)
        kept = {fmap[c] for c in cm.kept}
        group_of = {c: sing for grp, sing in cm.groups for c in grp}
        if 0 in cm.kept:
            out.append(make_modification(g, cfg, blowups, kept | {s + 1}))
        elif 1 in cm.kept or group_of[0].is_du_val:
            out.append(make_modification(g, cfg, blowups, kept))
        else:
            out.append(make_modification(g, cfg, blowups, kept | {s + 1}))
            out.append(make_modification(g, cfg, blowups, kept | {s}))
    return _sorted_unique(out)


def dihedral_p_modifications_direct(g: PairGraph) -> list[Modification]:
    """Brute force: fork P-modifications with ``K + D' + E'`` numerically trivial."""
    pair = PairGraph(GraphKind.DIHEDRAL_D, g.chain)
    out = []
    for m in p_modifications(pair):
        if all(v == 0 for v in m.log_degrees(1).values()):
            out.append(m)
    return out
