"""Exhaustive argmax searches.

``argmax_partitions`` walks every path partition of ``n - k`` and keeps the
free ones with the largest join spectral radius. ``tiny_oracle`` leaves the
join family altogether and scans every graph on at most 8 vertices.

Pruning in both relies on monotonicity: a subgraph of a free graph in the
class is again free and in the class, so a partition prefix, or a graph on
fewer vertices, that already fails can be dropped with all its extensions.
"""

from __future__ import annotations

import itertools
import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import BudgetExceeded, InvalidInput
from .extremal import CandidateSpec, generic_free, structured_free
from .graphcore import Graph, JoinSpec, PathPartition, Pattern, h_op, h_p, to_graph6
from .patterns import contains, in_class
from .spectral import DEFAULT_TOL, spectral_radius

RHO_TIE_TOL = 1e-8
MAX_PARTITION_TOTAL = 60
TINY_MAX_N = 8
LABELED_MAX_N = 6


@dataclass
class SearchReport:
    problem: dict
    best: list[dict] = field(default_factory=list)
    explored: int = 0
    runtime: float = 0.0
    agreement: dict | None = None
    rows: list[dict] | None = None

    def to_json(self, timings: bool = False) -> dict:
        out = {"problem": self.problem, "best": self.best, "explored": self.explored}
        if self.agreement is not None:
            out["agreement"] = self.agreement
        if self.rows is not None:
            out["rows"] = self.rows
        if timings:
            out["runtime"] = self.runtime
        return out


class _Maxima:
    """Running set of co-maximizers within a tie tolerance; merge is associative."""

    def __init__(self, tie_tol: float = RHO_TIE_TOL):
        self.tie_tol = tie_tol
        self.items: list[tuple[float, object]] = []

    def offer(self, rho: float, key) -> None:
        if not self.items:
            self.items = [(rho, key)]
            return
        top = max(r for r, _ in self.items)
        if rho > top + self.tie_tol:
            self.items = [(r, k) for r, k in self.items if r >= rho - self.tie_tol] + [(rho, key)]
        elif rho >= top - self.tie_tol:
            self.items.append((rho, key))
            new_top = max(top, rho)
            self.items = [(r, k) for r, k in self.items if r >= new_top - self.tie_tol]

    def merge(self, other: _Maxima) -> _Maxima:
        for r, k in other.items:
            self.offer(r, k)
        return self


# -- partition space ------------------------------------------------------------


def _free_test(apex_k, pattern, mode, apex_edge):
    if pattern is None:
        return lambda parts: True
    if mode == "structured":
        return lambda parts: structured_free(apex_k, parts, pattern, apex_edge=apex_edge).status == "Free"
    if mode == "generic":
        return lambda parts: generic_free(JoinSpec(apex_k, PathPartition(parts), apex_edge), pattern)
    raise InvalidInput(f"unknown freeness mode {mode!r}; choose structured or generic")


def iter_free_partitions(m: int, is_free, first_parts=None):
    """Free partitions of ``m`` in reverse-lexicographic order, pruning failed prefixes.

    Adding a part or lengthening one can only create copies, so once a prefix
    ending in part ``x`` is free every smaller final part is free too.
    """

    def walk(prefix, rem, cap):
        if rem == 0:
            yield prefix
            return
        known_free = False
        for x in range(min(rem, cap), 0, -1):
            cand = prefix + (x,)
            if not known_free:
                if not is_free(cand):
                    continue
                known_free = True
            yield from walk(cand, rem - x, x)

    if m == 0:
        yield ()
        return
    for x in range(m, 0, -1) if first_parts is None else first_parts:
        if 1 <= x <= m and is_free((x,)):
            yield from walk((x,), m - x, x)


def _scan_block(args):
    n, apex_k, pattern, mode, apex_edge, tol, tie_tol, tops = args
    is_free = _free_test(apex_k, pattern, mode, apex_edge)
    best = _Maxima(tie_tol)
    explored = 0
    for parts in iter_free_partitions(n - apex_k, is_free, tops):
        explored += 1
        rho = spectral_radius(JoinSpec(apex_k, PathPartition(parts), apex_edge), tol=tol).rho
        best.offer(rho, parts)
    return best.items, explored


def _round(x: float) -> float:
    return float(f"{x:.12g}")


def argmax_partitions(n: int, apex_k: int, pattern: Pattern | None, freeness_mode: str = "structured",
                      apex_edge: bool = True, candidate: CandidateSpec | None = None, tol: float = DEFAULT_TOL,
                      rho_tie_tol: float = RHO_TIE_TOL, workers: int = 1) -> SearchReport:
    """Maximum join spectral radius over all free path partitions of ``n - apex_k``."""
    m = n - apex_k
    if m < 1:
        raise InvalidInput(f"n={n} leaves no path vertices for {apex_k} apex(es)")
    if m > MAX_PARTITION_TOTAL:
        raise BudgetExceeded(f"n - apex_k = {m} exceeds the partition budget {MAX_PARTITION_TOTAL}")
    t0 = time.perf_counter()
    if freeness_mode == "structured" and pattern is not None:
        structured_free(apex_k, (1,), pattern, apex_edge=apex_edge)  # raise early if unsupported
    blocks = [(n, apex_k, pattern, freeness_mode, apex_edge, tol, rho_tie_tol, [x]) for x in range(m, 0, -1)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_scan_block, blocks))
    else:
        results = [_scan_block(b) for b in blocks]
    best = _Maxima(rho_tie_tol)
    explored = 0
    for items, cnt in results:
        explored += cnt
        for r, k in items:
            best.offer(r, k)
    ranked = sorted(best.items, key=lambda rk: rk[1])
    problem = {
        "n": n,
        "apex_k": apex_k,
        "apex_edge": apex_edge if apex_k == 2 else False,
        "pattern": str(pattern) if pattern is not None else "none",
        "class": "outerplanar" if apex_k == 1 else "planar",
        "freeness_mode": freeness_mode,
        "space": "join-partitions",
    }
    rep = SearchReport(problem, [{"partition": list(k), "rho": _round(r)} for r, k in ranked], explored,
                       time.perf_counter() - t0)
    if candidate is not None:
        rep.agreement = _agreement(candidate.spec.partition.parts, ranked, candidate.theorem)
    return rep


def _agreement(cand_parts, ranked, label):
    keys = [tuple(k) for _, k in ranked]
    return {
        "candidate": label,
        "candidate_partition": list(cand_parts),
        "agrees": tuple(cand_parts) in keys,
        "best_is_candidate": bool(keys) and keys[0] == tuple(cand_parts),
    }


# -- conjectures ----------------------------------------------------------------

CONJECTURES = {
    "P1": (1, 3, lambda n, l: h_op(n, 2 * l - 2, l - 2)),
    "P2": (2, 3, lambda n, l: h_p(n, l - 1, l - 2)),
    "P3": (2, 4, lambda n, l: h_p(n, 2 * l - 2, l - 2)),
}


def conjecture_candidate(problem_id: str, n: int, l: int) -> JoinSpec:
    if problem_id not in CONJECTURES:
        raise InvalidInput(f"unknown problem {problem_id!r}; choose from {sorted(CONJECTURES)}")
    k, _, make = CONJECTURES[problem_id]
    if l < 3:
        raise InvalidInput("the conjectures need l >= 3")
    return JoinSpec(k, make(n, l))


def conjecture_scan(problem_id: str, l: int, n_grid, tol: float = DEFAULT_TOL, workers: int = 1) -> SearchReport:
    """Per-n argmax over the join family against the conjectured extremal join."""
    if problem_id not in CONJECTURES:
        raise InvalidInput(f"unknown problem {problem_id!r}; choose from {sorted(CONJECTURES)}")
    k, t, _ = CONJECTURES[problem_id]
    pattern = Pattern.starlike(t, l)
    t0 = time.perf_counter()
    rows, explored = [], 0
    for n in n_grid:
        cand = conjecture_candidate(problem_id, n, l)
        rep = argmax_partitions(n, k, pattern, "generic", tol=tol, workers=workers)
        explored += rep.explored
        best = rep.best[0]
        cand_free = generic_free(cand, pattern)
        cand_rho = spectral_radius(cand, tol=tol).rho
        keys = [tuple(b["partition"]) for b in rep.best]
        rows.append({
            "n": n,
            "best_partition": best["partition"],
            "rho": best["rho"],
            "co_maximizers": len(rep.best),
            "candidate_partition": list(cand.partition.parts),
            "candidate_rho": _round(cand_rho),
            "candidate_free": cand_free,
            "agrees_with_candidate": tuple(cand.partition.parts) in keys,
        })
    problem = {"problem": problem_id, "apex_k": k, "pattern": str(pattern), "l": l,
               "class": "outerplanar" if k == 1 else "planar", "space": "join-partitions"}
    agree = sum(r["agrees_with_candidate"] for r in rows)
    best = [{"n": r["n"], "partition": r["best_partition"], "rho": r["rho"]} for r in rows]
    return SearchReport(problem, best, explored, time.perf_counter() - t0,
                        {"rows": len(rows), "agreeing_rows": agree}, rows)


# -- whole graph space at tiny n -------------------------------------------------


def _rho_dense(g: Graph) -> float:
    if g.m == 0:
        return 0.0
    return float(np.linalg.eigvalsh(g.adjacency_matrix().astype(float))[-1])


def _fingerprint(g: Graph):
    spec = np.round(np.linalg.eigvalsh(g.adjacency_matrix().astype(float)), 6) + 0.0
    return (tuple(sorted(g.degrees())), tuple(spec.tolist()))


def _accepts(g: Graph, graph_class: str, pattern: Pattern | None) -> bool:
    if graph_class == "planar" and g.n >= 3 and g.m > 3 * g.n - 6:
        return False
    if graph_class == "outerplanar" and g.n >= 2 and g.m > 2 * g.n - 3:
        return False
    if pattern is not None and pattern.order <= g.n and contains(g, pattern).found:
        return False
    return in_class(g, graph_class)


def _from_nx(h) -> Graph:
    return Graph.from_edges(h.number_of_nodes(), list(h.edges()))


def _atlas(n: int) -> list[Graph]:
    import networkx as nx

    return [_from_nx(h) for h in nx.graph_atlas_g() if h.number_of_nodes() == n]


def _extend_block(args):
    bases, graph_class, pattern, tie_tol = args
    best = _Maxima(tie_tol)
    count = 0
    for rows in bases:
        base = Graph(len(rows), tuple(rows))
        n = base.n + 1
        for nb in range(1 << base.n):
            new_rows = tuple(r | (((nb >> i) & 1) << base.n) for i, r in enumerate(base.rows)) + (nb,)
            g = Graph(n, new_rows)
            if not _accepts(g, graph_class, pattern):
                continue
            count += 1
            best.offer(_rho_dense(g), new_rows)
    return best.items, count


def _labeled(n: int):
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    for mask in range(1 << len(pairs)):
        yield Graph.from_edges(n, [e for b, e in enumerate(pairs) if (mask >> b) & 1])


def _refine(g: Graph) -> list[int]:
    """Colour refinement; the colours are invariant under relabelling."""
    col = [0] * g.n
    while True:
        sig = [(col[v], tuple(sorted(col[u] for u in g.neighbors(v)))) for v in range(g.n)]
        names = {s: i for i, s in enumerate(sorted(set(sig)))}
        new = [names[s] for s in sig]
        if len(set(new)) == len(set(col)):
            return new
        col = new


def canonical_form(g: Graph) -> Graph:
    """Relabelling with the smallest graph6 string among refinement-compatible orders.

    Exact for any n but exponential in the colour class sizes; used on the
    handful of maximizers a tiny scan reports.
    """
    col = _refine(g)
    classes = [[v for v in range(g.n) if col[v] == c] for c in sorted(set(col))]
    best = None
    for perms in itertools.product(*(itertools.permutations(c) for c in classes)):
        order = [v for block in perms for v in block]
        pos = {v: i for i, v in enumerate(order)}
        h = Graph.from_edges(g.n, [(pos[u], pos[v]) for u, v in g.edges()])
        code = to_graph6(h)
        if best is None or code < best[0]:
            best = (code, h)
    return best[1] if best else g


def _dedupe(items):
    """Exact isomorphism classes among co-maximizers, first representative kept."""
    import networkx as nx

    buckets: dict = {}
    out = []
    for rho, g in items:
        fp = _fingerprint(g)
        reps = buckets.setdefault(fp, [])
        gx = g.to_networkx()
        if any(nx.is_isomorphic(gx, r) for r in reps):
            continue
        reps.append(gx)
        out.append((rho, g))
    return out


def tiny_oracle(n: int, graph_class: str, pattern: Pattern | None, method: str = "auto", workers: int = 1,
                checkpoint: str | os.PathLike | None = None, block_size: int = 32,
                rho_tie_tol: float = RHO_TIE_TOL) -> SearchReport:
    """Maximum spectral radius over all graphs on ``n <= 8`` vertices in a class avoiding a pattern.

    ``method="atlas"`` (default for n <= 7) scans one graph per isomorphism
    class from the networkx atlas. For ``n = 8`` every accepted 7-vertex
    graph is extended by a new vertex in all ``2^7`` ways; every 8-vertex
    graph arises this way since deleting a vertex keeps class and freeness.
    ``method="labeled"`` scans every labeled graph (n <= 6), as a cross-check.
    """
    if n > TINY_MAX_N:
        raise BudgetExceeded(f"tiny_oracle is limited to n <= {TINY_MAX_N}, got {n}")
    if n < 1:
        raise InvalidInput("n must be >= 1")
    if graph_class not in ("planar", "outerplanar", "all"):
        raise InvalidInput(f"unknown graph class {graph_class!r}")
    if method == "auto":
        method = "atlas" if n <= 7 else "extend"
    t0 = time.perf_counter()
    best = _Maxima(rho_tie_tol)
    explored = 0
    if method == "labeled":
        if n > LABELED_MAX_N:
            raise BudgetExceeded(f"labeled scans are limited to n <= {LABELED_MAX_N}")
        for g in _labeled(n):
            if _accepts(g, graph_class, pattern):
                explored += 1
                best.offer(_rho_dense(g), g)
    elif method == "atlas":
        if n > 7:
            raise BudgetExceeded("the atlas covers n <= 7 only")
        for g in _atlas(n):
            if _accepts(g, graph_class, pattern):
                explored += 1
                best.offer(_rho_dense(g), g)
    elif method == "extend":
        if n < 2:
            raise InvalidInput("extension needs n >= 2")
        bases = [g for g in (_atlas(n - 1) if n - 1 <= 7 else []) if _accepts(g, graph_class, pattern)]
        blocks = [bases[i : i + block_size] for i in range(0, len(bases), block_size)]
        state = _load_checkpoint(checkpoint, n, graph_class, pattern, len(blocks))
        todo = [i for i in range(len(blocks)) if i not in state["done"]]
        for r, rows in state["best"]:
            best.offer(r, tuple(rows))
        explored = state["explored"]
        args = [([g.rows for g in blocks[i]], graph_class, pattern, rho_tie_tol) for i in todo]
        if workers > 1:
            ex = ProcessPoolExecutor(max_workers=workers)
            results = ex.map(_extend_block, args)
        else:
            ex = None
            results = map(_extend_block, args)
        try:
            for i, (items, cnt) in zip(todo, results):
                explored += cnt
                for r, rows in items:
                    best.offer(r, rows)
                state["done"].add(i)
                state["explored"] = explored
                state["best"] = [(r, list(rows)) for r, rows in best.items]
                _save_checkpoint(checkpoint, state)
        finally:
            if ex is not None:
                ex.shutdown()
        best.items = [(r, Graph(n, tuple(rows))) for r, rows in best.items]
    else:
        raise InvalidInput(f"unknown method {method!r}")

    uniq = [(r, canonical_form(g)) for r, g in _dedupe(sorted(best.items, key=lambda rg: (-rg[0], to_graph6(rg[1]))))]
    uniq.sort(key=lambda rg: to_graph6(rg[1]))
    problem = {"n": n, "class": graph_class, "pattern": str(pattern) if pattern is not None else "none",
               "space": "whole", "method": method}
    found = [{"graph6": to_graph6(g), "rho": _round(r), "edges": g.m} for r, g in uniq]
    return SearchReport(problem, found, explored, time.perf_counter() - t0)


def _load_checkpoint(path, n, graph_class, pattern, blocks):
    key = {"n": n, "class": graph_class, "pattern": str(pattern) if pattern is not None else "none", "blocks": blocks}
    state = {"key": key, "done": set(), "explored": 0, "best": []}
    if path is None or not Path(path).exists():
        return state
    data = json.loads(Path(path).read_text())
    if data.get("key") != key:
        raise InvalidInput(f"checkpoint {path} belongs to a different scan: {data.get('key')}")
    state.update(done=set(data["done"]), explored=data["explored"], best=[(r, rows) for r, rows in data["best"]])
    return state


def _save_checkpoint(path, state):
    if path is None:
        return
    data = {"key": state["key"], "done": sorted(state["done"]), "explored": state["explored"], "best": state["best"]}
    tmp = Path(str(path) + ".tmp")
    tmp.write_text(json.dumps(data))
    os.replace(tmp, path)
