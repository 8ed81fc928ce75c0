"""Data model for singularities and decorated dual graphs, plus a small text DSL.

DSL examples::

    * - 4 - 3 - [A_5]        cyclic quotient with one boundary branch
    * - 3 - *                cyclic quotient with two boundary branches
    [2,2; 3, 4, *]           dihedral quotient (two (-2)-curves at c_1) with a branch
    [18/5] - 2               boxes expand to the chain of n/q

Boxes are expanded as soon as they are parsed.
"""
from __future__ import annotations

import enum
import json
import re
from dataclasses import dataclass
from fractions import Fraction as Q
from typing import Iterable, Sequence

from .hjcf import NQ, check_chain, hj_evaluate, hj_expand, normalize
from .lattice import CurveConfig, intersection_matrix, is_negative_definite


class ParseError(ValueError):
    def __init__(self, msg: str, pos: int | None = None):
        self.pos = pos
        super().__init__(msg if pos is None else f"{msg} (at position {pos})")


class UnsupportedShape(ValueError):
    """A quotient fork that is neither dihedral nor Du Val (tetrahedral, octahedral, icosahedral)."""


class NotQuotient(ValueError):
    """The contracted group is not the resolution graph of a quotient singularity."""


# ---------------------------------------------------------------- singularities

@dataclass(frozen=True)
class Singularity:
    @property
    def is_du_val(self) -> bool:
        return False

    @property
    def is_smooth(self) -> bool:
        return False

    def to_json(self) -> dict:
        d = {"type": type(self).__name__}
        d.update({k: v for k, v in self.__dict__.items()})
        d["label"] = self.label
        return d

    @property
    def label(self) -> str:
        raise NotImplementedError

    def __str__(self) -> str:
        return self.label


@dataclass(frozen=True)
class Smooth(Singularity):
    @property
    def is_smooth(self) -> bool:
        return True

    @property
    def label(self) -> str:
        return "smooth"


@dataclass(frozen=True)
class Cyclic(Singularity):
    n: int
    q: int

    @property
    def chain(self) -> tuple[int, ...]:
        return hj_expand(self.n, self.q)

    @property
    def label(self) -> str:
        return f"{self.n}/{self.q}"


@dataclass(frozen=True)
class DuValA(Singularity):
    r: int

    def __post_init__(self):
        if self.r < 1:
            raise ValueError("A_r needs r >= 1")

    @property
    def is_du_val(self) -> bool:
        return True

    @property
    def label(self) -> str:
        return f"A_{self.r}"


@dataclass(frozen=True)
class DuValD(Singularity):
    r: int

    def __post_init__(self):
        if self.r < 4:
            raise ValueError("D_r needs r >= 4; use du_val_d for r = 3")

    @property
    def is_du_val(self) -> bool:
        return True

    @property
    def label(self) -> str:
        return f"D_{self.r}"


@dataclass(frozen=True)
class DuValE(Singularity):
    r: int

    def __post_init__(self):
        if self.r not in (6, 7, 8):
            raise ValueError("E_r needs r in {6, 7, 8}")

    @property
    def is_du_val(self) -> bool:
        return True

    @property
    def label(self) -> str:
        return f"E_{self.r}"


@dataclass(frozen=True)
class T(Singularity):
    """``A^2/(1/(r n^2))(1, a r n - 1)`` with ``n > 1`` and ``gcd(a, n) = 1``."""

    r: int
    n: int
    a: int

    @property
    def nq(self) -> NQ:
        return NQ(self.r * self.n ** 2, self.a * self.r * self.n - 1)

    @property
    def chain(self) -> tuple[int, ...]:
        return hj_expand(*self.nq)

    @property
    def label(self) -> str:
        return f"T({self.r},{self.n},{self.a})"


@dataclass(frozen=True)
class Dihedral(Singularity):
    """Fork with two (-2)-leaves at ``c_1`` and the chain of ``n/q`` from ``c_1``."""

    n: int
    q: int

    @property
    def chain(self) -> tuple[int, ...]:
        return hj_expand(self.n, self.q)

    def cyclic_equivalent(self) -> Cyclic | None:
        # for q = 1 the fork (2,2; n) is the cyclic quotient [2, n, 2]
        if self.q != 1:
            return None
        return Cyclic(*hj_evaluate((2, self.n, 2)))

    @property
    def label(self) -> str:
        return f"D({self.n}/{self.q})"


def du_val_d(r: int) -> Singularity:
    """``D_r``; the fork ``(2,2; 2)`` is the chain ``A_3`` and is returned as such."""
    return DuValA(3) if r == 3 else DuValD(r)


def singularity_from_json(d: dict) -> Singularity:
    kind = d["type"]
    cls = {c.__name__: c for c in (Smooth, Cyclic, DuValA, DuValD, DuValE, T, Dihedral)}[kind]
    args = {k: v for k, v in d.items() if k not in ("type", "label")}
    return cls(**args)


# ---------------------------------------------------------------- pair graphs

class GraphKind(enum.Enum):
    CYCLIC_PLAIN = "CyclicPlain"
    CYCLIC_B = "CyclicB"
    CYCLIC_D = "CyclicD"
    DIHEDRAL_PLAIN = "DihedralPlain"
    DIHEDRAL_D = "DihedralD"

    @property
    def is_dihedral(self) -> bool:
        return self in (GraphKind.DIHEDRAL_PLAIN, GraphKind.DIHEDRAL_D)


_BULLETS = {
    GraphKind.CYCLIC_PLAIN: (),
    GraphKind.CYCLIC_B: ("left",),
    GraphKind.CYCLIC_D: ("left", "right"),
    GraphKind.DIHEDRAL_PLAIN: (),
    GraphKind.DIHEDRAL_D: ("end",),
}


@dataclass(frozen=True)
class PairGraph:
    """Dual graph of a cyclic or dihedral quotient, with boundary branches.

    For ``CYCLIC_B`` the branch meets ``c_1`` (the chain is stored oriented from
    the branch).  For dihedral kinds the two (-2)-curves at ``c_1`` are implicit
    and the branch, if any, meets ``c_s``.
    """

    kind: GraphKind
    chain: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "kind", GraphKind(self.kind))
        object.__setattr__(self, "chain", check_chain(self.chain))

    @property
    def bullets(self) -> tuple[str, ...]:
        return _BULLETS[self.kind]

    @property
    def nq(self) -> NQ:
        return hj_evaluate(self.chain)

    def plain(self) -> "PairGraph":
        kind = GraphKind.DIHEDRAL_PLAIN if self.kind.is_dihedral else GraphKind.CYCLIC_PLAIN
        return PairGraph(kind, self.chain)

    def to_json(self) -> dict:
        return {"kind": self.kind.value, "chain": list(self.chain), "bullets": list(self.bullets)}

    @classmethod
    def from_json(cls, d: dict | str) -> "PairGraph":
        if isinstance(d, str):
            d = json.loads(d)
        g = cls(GraphKind(d["kind"]), tuple(d["chain"]))
        if "bullets" in d and list(d["bullets"]) != list(g.bullets):
            raise ValueError(f"bullets {d['bullets']} do not match kind {g.kind.value}")
        return g

    def __str__(self) -> str:
        return render_graph(self)


def cyclic(chain: Sequence[int], bullets: int = 0) -> PairGraph:
    kind = (GraphKind.CYCLIC_PLAIN, GraphKind.CYCLIC_B, GraphKind.CYCLIC_D)[bullets]
    return PairGraph(kind, tuple(chain))


def dihedral(chain: Sequence[int], bullet: bool = True) -> PairGraph:
    return PairGraph(GraphKind.DIHEDRAL_D if bullet else GraphKind.DIHEDRAL_PLAIN, tuple(chain))


# ---------------------------------------------------------------- DSL

_TOKEN = re.compile(r"\s*(?:(A_)|(\d+)|(.))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    out = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        start = m.start(1) if m.group(1) else m.start(2) if m.group(2) else m.start(3)
        if m.group(1):
            out.append(("A_", "A_", start))
        elif m.group(2):
            out.append(("INT", m.group(2), start))
        else:
            ch = m.group(3)
            if ch not in "*[]/,;-":
                raise ParseError(f"unexpected character {ch!r}", start)
            out.append((ch, ch, start))
        pos = m.end()
    out.append(("END", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self, k: int = 0) -> tuple[str, str, int]:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def take(self, kind: str) -> tuple[str, str, int]:
        tok = self.peek()
        if tok[0] != kind:
            want = "integer" if kind == "INT" else repr(kind)
            got = "end of input" if tok[0] == "END" else repr(tok[1])
            raise ParseError(f"expected {want}, got {got}", tok[2])
        self.i += 1
        return tok

    def integer(self) -> tuple[int, int]:
        _, v, p = self.take("INT")
        return int(v), p

    def box(self) -> list[int]:
        # after '['
        tok = self.peek()
        if tok[0] == "A_":
            self.i += 1
            r, p = self.integer()
            if r < 1:
                raise ParseError("A_r needs r >= 1", p)
            self.take("]")
            return [2] * r
        n, p = self.integer()
        if self.peek()[0] == "/":
            self.i += 1
            q, pq = self.integer()
            try:
                nq = normalize(n, q)
            except ValueError as exc:
                raise ParseError(str(exc), pq) from None
            self.take("]")
            return list(hj_expand(*nq))
        entries = [(n, p)]
        while self.peek()[0] == ",":
            self.i += 1
            entries.append(self.integer())
        self.take("]")
        return [self._entry(v, q) for v, q in entries]

    @staticmethod
    def _entry(v: int, pos: int) -> int:
        if v < 2:
            raise ParseError(f"chain entry {v} < 2", pos)
        return v

    def node(self) -> tuple[str, list[int], int]:
        tok = self.peek()
        if tok[0] == "*":
            self.i += 1
            return "bullet", [], tok[2]
        if tok[0] == "INT":
            v, p = self.integer()
            return "chain", [self._entry(v, p)], p
        if tok[0] == "[":
            self.i += 1
            return "chain", self.box(), tok[2]
        got = "end of input" if tok[0] == "END" else repr(tok[1])
        raise ParseError(f"expected a curve, box or '*', got {got}", tok[2])

    def is_fork_prefix(self) -> bool:
        kinds = [self.peek(k) for k in range(5)]
        return ([k[0] for k in kinds] == ["[", "INT", ",", "INT", ";"]
                and kinds[1][1] == "2" and kinds[3][1] == "2")

    def parse(self) -> PairGraph:
        if self.is_fork_prefix():
            return self.parse_fork()
        nodes = [self.node()]
        while self.peek()[0] == "-":
            self.i += 1
            nodes.append(self.node())
        self.take("END")
        return self._assemble_cyclic(nodes)

    def _assemble_cyclic(self, nodes) -> PairGraph:
        chain: list[int] = []
        bullets = []
        for idx, (kind, entries, pos) in enumerate(nodes):
            if kind == "bullet":
                if 0 < idx < len(nodes) - 1:
                    raise ParseError("boundary branch '*' must sit at an end of the chain", pos)
                bullets.append(idx)
            else:
                chain.extend(entries)
        if not chain:
            raise ParseError("graph has no exceptional curves", nodes[0][2])
        if len(bullets) == 2 and bullets[0] == bullets[1]:
            raise ParseError("two branches at the same end", nodes[0][2])
        if len(bullets) == 0:
            return PairGraph(GraphKind.CYCLIC_PLAIN, tuple(chain))
        if len(bullets) == 2:
            return PairGraph(GraphKind.CYCLIC_D, tuple(chain))
        if bullets[0] == 0:
            return PairGraph(GraphKind.CYCLIC_B, tuple(chain))
        return PairGraph(GraphKind.CYCLIC_B, tuple(reversed(chain)))

    def parse_fork(self) -> PairGraph:
        for kind in ("[", "INT", ",", "INT", ";"):
            self.take(kind)
        chain: list[int] = []
        bullet = False
        while True:
            kind, entries, pos = self.node()
            if bullet:
                raise ParseError("nothing may follow the boundary branch", pos)
            if kind == "bullet":
                if not chain:
                    raise ParseError("boundary branch must sit at the c_s end", pos)
                bullet = True
            else:
                chain.extend(entries)
            if self.peek()[0] in (",", "-"):
                self.i += 1
                continue
            break
        self.take("]")
        self.take("END")
        if not chain:
            raise ParseError("dihedral graph needs c_1", self.peek()[2])
        return PairGraph(GraphKind.DIHEDRAL_D if bullet else GraphKind.DIHEDRAL_PLAIN, tuple(chain))


def parse_graph(text: str) -> PairGraph:
    """Parse the graph DSL; raises :class:`ParseError` with the offending position."""
    return _Parser(text).parse()


def render_graph(g: PairGraph) -> str:
    body = [str(c) for c in g.chain]
    if g.kind.is_dihedral:
        if g.kind is GraphKind.DIHEDRAL_D:
            body.append("*")
        return "[2,2; " + ", ".join(body) + "]"
    if g.kind is GraphKind.CYCLIC_B:
        body.insert(0, "*")
    elif g.kind is GraphKind.CYCLIC_D:
        body = ["*"] + body + ["*"]
    return " - ".join(body)


def parse_fraction(text: str) -> Q:
    """``"p/q"`` or ``"p"`` to an exact rational."""
    return Q(text.strip())


def format_rational(x: Q | None) -> str | None:
    if x is None:
        return None
    return f"{x.numerator}/{x.denominator}"


# ---------------------------------------------------------------- classification

def _ordered_path(cfg: CurveConfig, group: Sequence[int]) -> list[int]:
    gset = set(group)
    if len(group) == 1:
        return list(group)
    ends = [u for u in group if sum(1 for v in cfg.neighbors(u) if v in gset) == 1]
    start = min(ends, key=lambda e: (cfg._distance(0, e), e))
    order, prev = [start], None
    while len(order) < len(group):
        cur = order[-1]
        nxt = [v for v in cfg.neighbors(cur) if v in gset and v != prev]
        prev = cur
        order.append(nxt[0])
    return order


def group_chain(cfg: CurveConfig, group: Sequence[int]) -> tuple[int, ...]:
    """Entries ``-C^2`` of a path group, oriented from the end nearest curve 0."""
    return tuple(-cfg.self_ints[u] for u in _ordered_path(cfg, group))


def _arm(cfg: CurveConfig, gset: set[int], center: int, first: int) -> list[int]:
    arm, prev, cur = [first], center, first
    while True:
        nxt = [v for v in cfg.neighbors(cur) if v in gset and v != prev]
        if not nxt:
            return arm
        if len(nxt) > 1:
            raise NotQuotient("more than one fork")
        prev, cur = cur, nxt[0]
        arm.append(cur)


def classify_singularity(cfg: CurveConfig, group: Iterable[int]) -> Singularity:
    """Type of the point obtained by contracting the connected ``group``.

    Chains give :class:`Cyclic` (``DuValA`` when all entries are 2).  Forks with
    two (-2)-leaves at the branch curve give :class:`Dihedral` (``D_r`` when
    all entries are 2); all-(-2) E-shaped forks give ``E_6, E_7, E_8``.  Other
    quotient forks raise :class:`UnsupportedShape`.
    """
    group = sorted(set(group))
    if not group:
        return Smooth()
    gset = set(group)
    if len(cfg.components(group)) != 1:
        raise ValueError("group is not connected")
    if any(cfg.self_ints[u] > -2 for u in group):
        raise NotQuotient("contracted curves must have self-intersection <= -2")
    if not is_negative_definite(intersection_matrix(cfg, group)):
        raise NotQuotient("group is not negative definite")
    deg = {u: sum(1 for v in cfg.neighbors(u) if v in gset) for u in group}
    forks = [u for u in group if deg[u] >= 3]
    if not forks:
        entries = group_chain(cfg, group)
        if all(c == 2 for c in entries):
            return DuValA(len(entries))
        return Cyclic(*hj_evaluate(entries))
    if len(forks) > 1 or deg[forks[0]] > 3:
        raise NotQuotient("quotient graphs have at most one fork, of valence 3")
    center = forks[0]
    arms = [_arm(cfg, gset, center, v) for v in cfg.neighbors(center) if v in gset]
    arm_entries = [[-cfg.self_ints[u] for u in arm] for arm in arms]
    c0 = -cfg.self_ints[center]
    if c0 == 2 and all(c == 2 for a in arm_entries for c in a):
        lengths = sorted(len(a) for a in arm_entries)
        if lengths[0] == 1 and lengths[1] == 1:
            return du_val_d(lengths[2] + 3)
        if lengths[0] == 1 and lengths[1] == 2 and lengths[2] in (2, 3, 4):
            return DuValE(lengths[2] + 4)
        raise NotQuotient(f"all-(-2) fork with arms {lengths} is not Du Val")
    leaves = [i for i, a in enumerate(arm_entries) if a == [2]]
    if len(leaves) >= 2:
        rest = [a for i, a in enumerate(arm_entries) if i not in leaves[:2]][0]
        return Dihedral(*hj_evaluate([c0] + rest))
    dets = [hj_evaluate(a).n for a in arm_entries]
    if sum(Q(1, d) for d in dets) > 1:
        raise UnsupportedShape(f"quotient fork with arm determinants {dets} is not dihedral")
    raise NotQuotient(f"fork with arm determinants {dets} is not a quotient singularity")
