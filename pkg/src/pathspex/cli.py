"""Command-line front end: ``pathspex <command> ...``.

Exit status is 0 on success, 1 on a domain error (the error class is
printed) and 2 on a usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from importlib import resources

import numpy as np

from . import extremal, patterns, search, spectral, transforms
from .errors import InvalidInput, PathspexError
from .graphcore import (
    NAMED_GRAPHS,
    JoinSpec,
    PathPartition,
    from_graph6,
    h_op,
    h_p,
    h_p3,
    named_graph,
    parse_pattern,
    realize,
    to_dot,
    to_graph6,
)

WORKERS_ENV = "PATHSPEX_WORKERS"
FAMILIES = ("hop", "hp", "hp3", "join", "named")
SCHEMAS = {
    "construct": "construct",
    "rho": "rho",
    "free": "free",
    "transform-scan": "transform_scan",
    "candidate": "candidate",
    "search": "search",
    "oracle": "oracle",
    "conjecture": "conjecture",
}


def load_schema(name: str) -> dict:
    """JSON schema shipped for a command's JSON output (or ``joinspec``)."""
    name = SCHEMAS.get(name, name)
    return json.loads(resources.files("pathspex").joinpath("schemas", f"{name}.json").read_text(encoding="utf-8"))


def clean(obj):
    """Round floats to 12 significant digits, recursively; non-finite floats become null."""
    if isinstance(obj, np.generic):
        obj = obj.item()
    if isinstance(obj, float):
        if not math.isfinite(obj):
            return None
        return float(f"{obj:.12g}")
    if isinstance(obj, dict):
        return {k: clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [clean(v) for v in obj]
    return obj


def _num(x) -> str:
    if isinstance(x, float):
        return f"{x:.12g}"
    if isinstance(x, (list, tuple)):
        return ",".join(map(str, x))
    if x is None:
        return ""
    return str(x)


# -- graph selection ------------------------------------------------------------


def _add_graph_args(p: argparse.ArgumentParser, allow_graph6: bool = True) -> None:
    p.add_argument("--family", choices=FAMILIES, help="structured family")
    p.add_argument("--n", type=int, help="order")
    p.add_argument("--n1", type=int)
    p.add_argument("--n2", type=int)
    p.add_argument("--n3", type=int)
    p.add_argument("--apex", type=int, choices=(1, 2), help="apex count for --family join")
    p.add_argument("--partition", help="path orders, e.g. 3,2,2 (implies --family join)")
    p.add_argument("--no-apex-edge", action="store_true", help="leave the two apexes non-adjacent")
    p.add_argument("--name", choices=NAMED_GRAPHS, help="graph for --family named")
    p.add_argument("--k", type=int, help="apex count for s_nk / s_plus_nk")
    if allow_graph6:
        p.add_argument("--graph6", help="graph6 string, or '-' to read stdin")


def _parse_parts(text: str) -> PathPartition:
    try:
        return PathPartition(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise InvalidInput(f"bad partition {text!r}") from None


def _need(args, *names):
    missing = [f"--{n.replace('_', '-')}" for n in names if getattr(args, n) is None]
    if missing:
        raise _Usage(f"--family {args.family} needs {' '.join(missing)}")


class _Usage(Exception):
    pass


def _select(args):
    """Return ``(JoinSpec or None, Graph)`` from the graph arguments."""
    g6 = getattr(args, "graph6", None)
    if g6 is not None:
        if args.family or args.partition:
            raise _Usage("--graph6 excludes --family/--partition")
        text = sys.stdin.read() if g6 == "-" else g6
        return None, from_graph6(text.strip().splitlines()[0] if text.strip() else "")
    family = args.family or ("join" if args.partition else None)
    if family is None:
        raise _Usage("give --family, --partition or --graph6")
    args.family = family
    edge = not args.no_apex_edge
    if family == "hop":
        _need(args, "n", "n1", "n2")
        spec = JoinSpec(1, h_op(args.n, args.n1, args.n2))
    elif family == "hp":
        _need(args, "n", "n1", "n2")
        spec = JoinSpec(2, h_p(args.n, args.n1, args.n2), edge)
    elif family == "hp3":
        _need(args, "n", "n1", "n2", "n3")
        spec = JoinSpec(2, h_p3(args.n, args.n1, args.n2, args.n3), edge)
    elif family == "join":
        _need(args, "apex", "partition")
        spec = JoinSpec(args.apex, _parse_parts(args.partition), edge)
        if args.n is not None and args.n != spec.n:
            raise InvalidInput(f"--n {args.n} disagrees with apexes + partition = {spec.n}")
    else:
        _need(args, "name", "n")
        return None, named_graph(args.name, args.n, args.k)
    return spec, None


def _graph(spec, g):
    return realize(spec) if g is None else g


# -- commands --------------------------------------------------------------------


def cmd_construct(args):
    spec, g = _select(args)
    g = _graph(spec, g)
    if args.emit == "graph6":
        return to_graph6(g) + "\n"
    if args.emit == "dot":
        return to_dot(g, apexes=range(spec.apex_k) if spec else ())
    out = {"n": g.n, "m": g.m, "graph6": to_graph6(g)}
    if spec is not None:
        out["spec"] = spec.to_json()
    return out


def cmd_rho(args):
    spec, g = _select(args)
    obj = spec if spec is not None else g
    res = spectral.spectral_radius(obj, tol=args.tol, max_iter=args.max_iter)
    out = res.to_json(include_vector=args.vector)
    if args.brackets:
        k = args.brackets
        apexes = range(spec.apex_k) if spec is not None and spec.apex_k == k else None
        rep = spectral.check_eigenvector_bounds(res, k, apexes=apexes)
        out["brackets"] = rep.summary()
    if spec is not None:
        out["spec"] = spec.to_json()
        n = spec.n
        if n >= 3:
            b = spectral.outerplanar_bound(n) if spec.apex_k == 1 else spectral.planar_bound(n)
            out["bound"] = b
            out["bound_ok"] = bool(res.rho <= b + 1e-9)
    return out


def cmd_free(args):
    spec, g = _select(args)
    pat = parse_pattern(args.pattern)
    out = {"pattern": str(pat)}
    if spec is not None:
        try:
            f = extremal.structured_free(spec.apex_k, spec.partition, pat, args.variant, spec.apex_edge)
            out["structured"] = str(f)
            out["structured_variant"] = f.variant
        except PathspexError as e:
            if args.variant != "auto":
                raise
            out["structured"] = None
            out["structured_note"] = f"{type(e).__name__}: {e}"
    graph = _graph(spec, g)
    if args.no_generic:
        return out
    if spec is not None and graph.n > args.generic_max_n:
        graph = realize(extremal.compressed_host(spec, pat.order))
        out["generic_host_n"] = graph.n
    if graph.n > args.generic_max_n:
        out["generic"] = None
        out["generic_note"] = f"host has {graph.n} vertices, above --generic-max-n {args.generic_max_n}"
        return out
    w = patterns.contains(graph, pat, args.engine)
    out["generic"] = "NotFree" if w.found else "Free"
    out["found"] = w.found
    if w.found:
        out["witness"] = w.pieces()
    return out


def cmd_transform_scan(args):
    grid = transforms.parse_grid(args.n_grid)
    rep = transforms.transform_scan(args.apex, args.s1, args.s2, grid, args.filler, args.tol, not args.no_apex_edge)
    rows = [{"n": r.n, "rho_before": r.rho_before, "rho_after": r.rho_after, "delta": r.delta} for r in rep.rows]
    return {"summary": rep.summary(), "rows": rows, "_csv": (["n", "rho_before", "rho_after", "delta"], rows)}


def cmd_candidate(args):
    c = extremal.candidate(args.theorem, args.n, args.t, args.l, args.variant)
    out = c.to_json()
    if args.verify:
        out.update(extremal.verify_candidate(c, generic_max_n=args.generic_max_n, tol=args.tol))
    return out


def _search_one(args, n, cand):
    pat = None if args.pattern == "none" else parse_pattern(args.pattern)
    return search.argmax_partitions(n, args.apex, pat, args.mode, not args.no_apex_edge, cand, args.tol,
                                    workers=args.workers)


def cmd_search(args):
    grid = transforms.parse_grid(args.n_grid) if args.n_grid else [args.n]
    if grid == [None]:
        raise _Usage("search needs --n or --n-grid")
    reports, rows = [], []
    for n in grid:
        cand = None
        if args.theorem:
            if args.t is None or args.l is None:
                raise _Usage("--theorem needs --t and --l")
            cand = extremal.candidate(args.theorem, n, args.t, args.l, args.variant)
            if args.apex != cand.spec.apex_k:
                raise InvalidInput(f"{args.theorem} uses {cand.spec.apex_k} apex(es), not {args.apex}")
        rep = _search_one(args, n, cand)
        data = rep.to_json(timings=args.timings)
        if args.graph6_dump:
            data["graph6"] = [to_graph6(realize(JoinSpec(args.apex, PathPartition(b["partition"]), not args.no_apex_edge)))
                              for b in rep.best]
        reports.append(data)
        agrees = rep.agreement["agrees"] if rep.agreement else None
        rows.append({"n": n, "best_partition": rep.best[0]["partition"], "rho": rep.best[0]["rho"],
                     "agrees_with_candidate": agrees})
    out = reports[0] if len(reports) == 1 else {"reports": reports}
    out["_csv"] = (["n", "best_partition", "rho", "agrees_with_candidate"], rows)
    return out


def cmd_oracle(args):
    pat = None if args.pattern == "none" else parse_pattern(args.pattern)
    rep = search.tiny_oracle(args.n, args.graph_class, pat, args.method, args.workers, args.checkpoint)
    out = rep.to_json(timings=args.timings)
    out["_csv"] = (["graph6", "rho", "edges"], rep.best)
    return out


def cmd_conjecture(args):
    grid = transforms.parse_grid(args.n_grid)
    rep = search.conjecture_scan(args.problem, args.l, grid, args.tol, args.workers)
    out = rep.to_json(timings=args.timings)
    out["_csv"] = (["n", "best_partition", "rho", "candidate_partition", "candidate_rho", "candidate_free",
                    "agrees_with_candidate"], rep.rows)
    return out


# -- parser ----------------------------------------------------------------------


def _default_workers() -> int:
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv", "text"), default=None,
                        help="output format (default: json, csv for table commands)")
    common.add_argument("--out", help="write output to this path instead of stdout")
    common.add_argument("--workers", type=int, default=_default_workers(),
                        help=f"worker processes (default from ${WORKERS_ENV}, else 1)")
    common.add_argument("--tol", type=float, default=spectral.DEFAULT_TOL, help="power-iteration residual tolerance")
    common.add_argument("--timings", action="store_true", help="include wall-clock runtimes (breaks byte-identity)")

    ap = argparse.ArgumentParser(prog="pathspex", description="Spectral-extremal join graphs avoiding path patterns.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("construct", parents=[common], help="build a graph and print it")
    _add_graph_args(p, allow_graph6=False)
    p.add_argument("--emit", choices=("json", "graph6", "dot"), default="json")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("rho", parents=[common], help="spectral radius and Perron vector")
    _add_graph_args(p)
    p.add_argument("--max-iter", type=int, default=spectral.DEFAULT_MAX_ITER)
    p.add_argument("--vector", action="store_true", help="include the Perron vector")
    p.add_argument("--brackets", type=int, choices=(1, 2), help="check eigenvector brackets for this apex count")
    p.set_defaults(func=cmd_rho)

    p = sub.add_parser("free", parents=[common], help="pattern freeness, structured and generic")
    _add_graph_args(p)
    p.add_argument("--pattern", required=True, help="P:l, tP:t,l, Star:t,l or Book:t,l")
    p.add_argument("--variant", default="auto", choices=("auto",) + tuple(extremal.VARIANTS))
    p.add_argument("--engine", default="auto", choices=("auto", "dp", "backtrack"))
    p.add_argument("--generic-max-n", type=int, default=40)
    p.add_argument("--no-generic", action="store_true")
    p.set_defaults(func=cmd_free)

    p = sub.add_parser("transform-scan", parents=[common], help="sign of the transformation gain over an n grid")
    p.add_argument("--apex", type=int, choices=(1, 2), required=True)
    p.add_argument("--s1", type=int, required=True)
    p.add_argument("--s2", type=int, required=True)
    p.add_argument("--n-grid", required=True, help="start:stop:step (inclusive) or a comma list")
    p.add_argument("--filler", choices=transforms.FILLERS, default="ones")
    p.add_argument("--no-apex-edge", action="store_true")
    p.set_defaults(func=cmd_transform_scan, table=True)

    p = sub.add_parser("candidate", parents=[common], help="extremal candidate of a theorem part")
    p.add_argument("--theorem", required=True, choices=tuple(extremal.THEOREMS))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--l", type=int, required=True)
    p.add_argument("--variant", choices=extremal.CANDIDATE_VARIANTS, default="statement")
    p.add_argument("--verify", action="store_true")
    p.add_argument("--generic-max-n", type=int, default=40)
    p.set_defaults(func=cmd_candidate)

    p = sub.add_parser("search", parents=[common], help="argmax over all free path partitions")
    p.add_argument("--n", type=int)
    p.add_argument("--n-grid")
    p.add_argument("--apex", type=int, choices=(1, 2), required=True)
    p.add_argument("--pattern", required=True, help="pattern, or 'none'")
    p.add_argument("--mode", choices=("structured", "generic"), default="structured")
    p.add_argument("--no-apex-edge", action="store_true")
    p.add_argument("--theorem", choices=tuple(extremal.THEOREMS), help="compare against this candidate")
    p.add_argument("--t", type=int)
    p.add_argument("--l", type=int)
    p.add_argument("--variant", choices=extremal.CANDIDATE_VARIANTS, default="statement")
    p.add_argument("--graph6-dump", action="store_true", help="add graph6 strings of the maximizers")
    p.set_defaults(func=cmd_search, table=True)

    p = sub.add_parser("oracle", parents=[common], help="whole-space argmax for n <= 8")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--class", dest="graph_class", choices=("planar", "outerplanar", "all"), required=True)
    p.add_argument("--pattern", default="none")
    p.add_argument("--method", choices=("auto", "atlas", "extend", "labeled"), default="auto")
    p.add_argument("--checkpoint", help="JSON file for resumable n=8 scans")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("conjecture", parents=[common], help="argmax evidence for the open starlike cases")
    p.add_argument("--problem", choices=tuple(search.CONJECTURES), required=True)
    p.add_argument("--l", type=int, required=True)
    p.add_argument("--n-grid", required=True)
    p.set_defaults(func=cmd_conjecture, table=True)
    return ap


def render(out, fmt: str) -> str:
    if isinstance(out, str):
        return out
    table = out.pop("_csv", None)
    out = clean(out)
    if fmt == "json":
        return json.dumps(out, indent=2, sort_keys=True) + "\n"
    if fmt == "csv":
        if table is None:
            rows = [{k: v for k, v in out.items() if not isinstance(v, (dict, list))}]
            header = list(rows[0])
        else:
            header, rows = table
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_num(clean(r.get(h))) for h in header])
        return buf.getvalue()
    lines = []

    def walk(prefix, v):
        if isinstance(v, dict):
            for k in sorted(v):
                walk(f"{prefix}.{k}" if prefix else k, v[k])
        elif isinstance(v, list) and v and isinstance(v[0], dict):
            for i, item in enumerate(v):
                walk(f"{prefix}[{i}]", item)
        else:
            lines.append(f"{prefix}: {_num(v) if isinstance(v, list) else v}")

    walk("", out)
    return "\n".join(lines) + "\n"


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:  # usage errors and --help
        return int(e.code or 0)
    fmt = args.format or ("csv" if getattr(args, "table", False) else "json")
    try:
        out = args.func(args)
    except _Usage as e:
        ap.print_usage(sys.stderr)
        print(f"pathspex {args.command}: error: {e}", file=sys.stderr)
        return 2
    except PathspexError as e:
        print(f"{type(e).__name__}: {e}", file=sys.stderr)
        return 1
    text = render(out, fmt)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
