"""``quotsing`` command line front end.

Exit codes: 0 success, 1 invalid mathematical input, 2 usage or parse error,
3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction as Q
from math import gcd
from typing import Iterator, Sequence

from . import deform
from .dihedral import cover_chain, double_cover_params, inverse_params
from .hjcf import check_chain, hj_evaluate, hj_expand, multiplicity
from .lattice import cartier_index
from .modgen import (dihedral_p_modifications, dihedral_p_modifications_direct, enumerate_q_modifications,
                     p_modifications, p_to_m, resolution_config)
from .notation import (GraphKind, NotQuotient, PairGraph, ParseError, UnsupportedShape, classify_singularity,
                       cyclic, dihedral, format_rational, parse_graph, render_graph)
from .tsing import refine, t_recognize


class UsageError(ValueError):
    pass


def _emit(obj, as_json: bool, text: str) -> None:
    if as_json:
        print(json.dumps(obj))
    else:
        print(text)


def _parse_chain_or_fraction(arg: str) -> tuple[int, ...]:
    s = arg.strip()
    if s.startswith("["):
        if not s.endswith("]"):
            raise UsageError(f"unterminated chain {arg!r}")
        try:
            entries = [int(x) for x in s[1:-1].split(",") if x.strip()]
        except ValueError:
            raise UsageError(f"bad chain {arg!r}") from None
        if not entries:
            raise UsageError("empty chain")
        return check_chain(entries)
    n, q = _parse_nq(s)
    return hj_expand(n, q)


def _parse_nq(arg: str) -> tuple[int, int]:
    parts = arg.strip().split("/")
    if len(parts) != 2:
        raise UsageError(f"expected n/q, got {arg!r}")
    try:
        n, q = int(parts[0]), int(parts[1])
    except ValueError:
        raise UsageError(f"expected n/q, got {arg!r}") from None
    return n, q


def _parse_d(arg: str | None):
    """``p/q`` for a single value, ``lo..hi`` for a closed range."""
    if arg is None:
        return None
    try:
        if ".." in arg:
            lo, hi = arg.split("..", 1)
            return Q(lo), Q(hi)
        x = Q(arg)
        return x, x
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"bad value for --d: {arg!r}") from None


def _graph(arg: str) -> PairGraph:
    return parse_graph(arg)


# ---------------------------------------------------------------- commands

def cmd_expand(args) -> int:
    chain = _parse_chain_or_fraction(args.value)
    n, q = hj_evaluate(chain)
    sing = refine(classify_singularity(resolution_config(cyclic(chain)), range(len(chain))))
    t = t_recognize(chain)
    idx = {
        "K": cartier_index(resolution_config(cyclic(chain)), {}),
        "K+B": cartier_index(resolution_config(cyclic(chain, 1)), {"left": 1}),
        "K+D": cartier_index(resolution_config(cyclic(chain, 2)), {"left": 1, "right": 1}),
    }
    obj = {"fraction": f"{n}/{q}", "chain": list(chain), "multiplicity": multiplicity(chain),
           "singularity": sing.to_json(), "t_params": list(t) if t else None,
           "du_val": sing.is_du_val, "cartier_index": idx}
    text = "\n".join([
        f"{n}/{q} = [{', '.join(map(str, chain))}]",
        f"multiplicity {multiplicity(chain)}",
        f"type {sing.label}",
        "cartier index " + ", ".join(f"{k}: {v}" for k, v in idx.items()),
    ])
    _emit(obj, args.json, text)
    return 0


def cmd_classify(args) -> int:
    g = _graph(args.graph)
    cfg = resolution_config(g)
    sing = refine(classify_singularity(cfg, range(len(cfg))))
    obj = {"graph": render_graph(g), "kind": g.kind.value, "singularity": sing.to_json()}
    _emit(obj, args.json, f"{render_graph(g)}: {g.kind.value}, {sing.label}")
    return 0


def _reports(g: PairGraph, ksb_pair: bool, d_range) -> list[deform.ComponentReport]:
    kind = g.kind
    n, q = hj_evaluate(g.chain)
    if kind is GraphKind.CYCLIC_B:
        return deform.ksba_search(g, d_range)
    if kind is GraphKind.CYCLIC_D or (ksb_pair and kind is GraphKind.CYCLIC_PLAIN):
        return deform.def_ksb_pair_components_cyclic(n, q)
    if kind is GraphKind.DIHEDRAL_D or (ksb_pair and kind is GraphKind.DIHEDRAL_PLAIN):
        return deform.def_ksb_pair_components_dihedral(n, q)
    if kind is GraphKind.CYCLIC_PLAIN:
        return deform.def_components(g.chain)
    out = []
    for m in p_modifications(g):
        dim = deform._sum_r(m) + sum(m.e(c) - 1 for c in m.kept)
        out.append(deform.ComponentReport(m, dim, (), None, tuple(deform.junctions(m))))
    return deform._sorted(out)


def _render_reports(reports: Sequence[deform.ComponentReport]) -> str:
    lines = []
    for i, r in enumerate(reports):
        d = "" if r.d_value is None else f"  d={format_rational(r.d_value)}"
        fib = ", ".join(f"{s.label}({b})" for s, b in r.generic_fiber) or "smooth"
        lines.append(f"{i}: dim {r.dimension}{d}  {r.modification.describe()}  generic fiber: {fib}")
    return "\n".join(lines) if lines else "no components"


def cmd_components(args) -> int:
    g = _graph(args.graph)
    reports = _reports(g, args.ksb_pair, _parse_d(args.d))
    _emit(deform.components_report_json(g, reports), args.json, _render_reports(reports))
    return 0


def cmd_ksba(args) -> int:
    g = _graph(args.graph)
    if not g.bullets:
        raise UsageError("ksba needs a graph with at least one bullet")
    reports = deform.ksba_search(g, _parse_d(args.d))
    _emit(deform.components_report_json(g, reports), args.json, _render_reports(reports))
    return 0


def cmd_pmods(args) -> int:
    g = _graph(args.graph)
    if args.mode == "Q":
        mods = enumerate_q_modifications(g)
    elif args.mode == "M":
        mods = [p_to_m(m) for m in p_modifications(g)]
    else:
        mods = list(p_modifications(g))
    obj = {"graph": render_graph(g), "mode": args.mode, "modifications": [m.to_json() for m in mods]}
    _emit(obj, args.json, "\n".join(m.describe() if m.kept or m.groups else "smooth" for m in mods))
    return 0


def cmd_cover(args) -> int:
    if args.inverse:
        N, Qv = _parse_nq(args.value)
        n, q = inverse_params(N, Qv)
    else:
        n, q = _parse_nq(args.value)
    p = double_cover_params(n, q)
    chain = cover_chain(n, q)
    obj = dict(p.to_json(), cover_chain=list(chain))
    _emit(obj, args.json, f"{n}/{q} -> N/Q = {p.N}/{p.Q}, cover chain [{', '.join(map(str, chain))}]")
    return 0


# ---------------------------------------------------------------- atlas

ATLAS_MODES = ("def", "ksb-pair-cyclic", "ksb-pair-dihedral", "ksba-b")


def atlas_inputs(nmax: int) -> list[tuple[int, int]]:
    return [(n, q) for n in range(2, nmax + 1) for q in range(1, n) if gcd(n, q) == 1]


def atlas_rows(mode: str, n: int, q: int) -> list[dict]:
    chain = hj_expand(n, q)
    if mode == "def":
        g, reports = cyclic(chain), deform.def_components(chain)
    elif mode == "ksb-pair-cyclic":
        g, reports = cyclic(chain, 2), deform.def_ksb_pair_components_cyclic(n, q)
    elif mode == "ksb-pair-dihedral":
        g, reports = dihedral(chain), deform.def_ksb_pair_components_dihedral(n, q)
    elif mode == "ksba-b":
        g = cyclic(chain, 1)
        reports = deform.ksba_search(g)
    else:
        raise UsageError(f"unknown atlas mode {mode!r}")
    graph = render_graph(g)
    return [{"graph": graph, "mode": mode, "n": n, "q": q, "component_index": i,
             "dimension": r.dimension, "d": format_rational(r.d_value),
             "singularities": [s.to_json() for s in r.modification.singularities],
             "generic_fiber": [{"type": s.to_json(), "branches": b} for s, b in r.generic_fiber],
             "target": r.modification.describe()}
            for i, r in enumerate(reports)]


def _atlas_job(task: tuple[str, int, int]) -> list[str]:
    return [json.dumps(row) for row in atlas_rows(*task)]


def run_atlas(mode: str, nmax: int, out: str, resume: bool = False, checkpoint_every: int = 1000,
              jobs: int = 1, max_graphs: int | None = None) -> int:
    """Write the atlas; returns the number of rows in the file.

    The checkpoint records how many inputs are complete and the byte length of
    the output at that point, so a resumed run truncates and carries on.
    ``max_graphs`` stops early, as an interrupted run would.
    """
    ckpt_path = out + ".ckpt"
    inputs = atlas_inputs(nmax)
    start, offset, rows = 0, 0, 0
    if resume and os.path.exists(ckpt_path):
        with open(ckpt_path) as fh:
            ck = json.load(fh)
        if ck.get("mode") != mode or ck.get("nmax") != nmax:
            raise UsageError("checkpoint belongs to a different atlas run")
        start, offset, rows = ck["next"], ck["offset"], ck["rows"]
    mode_flag = "r+b" if start and os.path.exists(out) else "wb"
    stop = len(inputs) if max_graphs is None else min(len(inputs), start + max_graphs)

    def save(nxt: int, off: int, count: int) -> None:
        tmp = ckpt_path + ".tmp"
        with open(tmp, "w") as fh:
            json.dump({"mode": mode, "nmax": nmax, "next": nxt, "offset": off, "rows": count,
                       "done": nxt == len(inputs)}, fh)
        os.replace(tmp, ckpt_path)

    tasks = [(mode, n, q) for n, q in inputs[start:stop]]
    with open(out, mode_flag) as fh:
        fh.seek(offset)
        fh.truncate()
        since = 0
        if jobs > 1:
            pool = ProcessPoolExecutor(max_workers=jobs)
            results: Iterator[list[str]] = pool.map(_atlas_job, tasks, chunksize=8)
        else:
            pool = None
            results = map(_atlas_job, tasks)
        try:
            for k, lines in enumerate(results, start=start + 1):
                for line in lines:
                    fh.write(line.encode() + b"\n")
                rows += len(lines)
                since += len(lines)
                if since >= checkpoint_every or k == len(inputs):
                    fh.flush()
                    save(k, fh.tell(), rows)
                    since = 0
        finally:
            if pool is not None:
                pool.shutdown()
    return rows


def cmd_atlas(args) -> int:
    if args.mode not in ATLAS_MODES:
        raise UsageError(f"unknown atlas mode {args.mode!r}")
    rows = run_atlas(args.mode, args.nmax, args.out, args.resume, args.checkpoint_every, args.jobs)
    print(f"{rows} rows written to {args.out}", file=sys.stderr)
    return 0


# ---------------------------------------------------------------- verify

def _chains_by_excess(k: int) -> Iterator[tuple[int, ...]]:
    """Chains with ``sum(c - 2) <= k`` and at most ``k + 2`` entries."""
    from itertools import product
    for length in range(1, k + 3):
        for ch in product(range(2, k + 3), repeat=length):
            if sum(c - 2 for c in ch) <= k:
                yield ch


def cmd_verify(args) -> int:
    failures = []
    checked = 0
    for ch in _chains_by_excess(args.excess):
        checked += 1
        if not deform.verify_theorem_1(ch):
            failures.append(("cyclic", ch))
    for c1 in (2, 3):
        for tail in _chains_by_excess(max(args.excess - 1, 0)):
            if len(tail) > 3:
                continue
            g = dihedral((c1,) + tail)
            checked += 1
            if set(dihedral_p_modifications(g)) != set(dihedral_p_modifications_direct(g)):
                failures.append(("dihedral", (c1,) + tail))
    obj = {"checked": checked, "failures": [[kind, list(ch)] for kind, ch in failures]}
    text = f"{checked} graphs checked, {len(failures)} failures"
    for kind, ch in failures:
        text += f"\n  {kind} {list(ch)}"
    _emit(obj, args.json, text)
    return 1 if failures else 0


# ---------------------------------------------------------------- entry point

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="quotsing", description="Deformations of cyclic and dihedral quotient singularities.")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--json", action="store_true", help="machine-readable output")
        sp.set_defaults(func=func)
        return sp

    sp = add("expand", cmd_expand, "continued fraction, type and Cartier indices")
    sp.add_argument("value", help="n/q or [c1,...,cs]")
    sp = add("classify", cmd_classify, "type of the singularity of a graph")
    sp.add_argument("graph")
    sp = add("components", cmd_components, "deformation components")
    sp.add_argument("graph")
    sp.add_argument("--ksb-pair", action="store_true", help="treat an undecorated graph as the pair with D")
    sp.add_argument("--d", help="boundary coefficient p/q or range lo..hi (one-bullet graphs)")
    sp = add("pmods", cmd_pmods, "list modifications")
    sp.add_argument("graph")
    sp.add_argument("--mode", choices=("Q", "P", "M"), default="P")
    sp = add("ksba", cmd_ksba, "KSBA solutions for a decorated graph")
    sp.add_argument("graph")
    sp.add_argument("--d", help="p/q or lo..hi")
    sp = add("cover", cmd_cover, "cyclic double cover of a dihedral quotient")
    sp.add_argument("value", help="n/q, or N/Q with --inverse")
    sp.add_argument("--inverse", action="store_true")
    sp = add("atlas", cmd_atlas, "JSON-lines table over all n/q up to a bound")
    sp.add_argument("--nmax", type=int, required=True)
    sp.add_argument("--mode", choices=ATLAS_MODES, required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--resume", action="store_true")
    sp.add_argument("--checkpoint-every", type=int, default=1000)
    sp.add_argument("--jobs", type=int, default=1)
    sp = add("verify", cmd_verify, "re-run the double enumerations on small inputs")
    sp.add_argument("--excess", type=int, default=3, help="bound on sum(c_i - 2)")
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (ParseError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 3
    except (ValueError, NotQuotient, UnsupportedShape) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
