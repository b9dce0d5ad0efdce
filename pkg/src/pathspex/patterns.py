"""Exact subgraph-containment checks and (outer)planarity tests.

These checkers know nothing about join structure; they are the ground
truth the structured predicates in :mod:`pathspex.extremal` are held to.

Two exact engines back :func:`contains`:

``dp``
    Subset dynamic programming. ``reach[S]`` is the bitmask of vertices
    ``v`` such that ``G[S]`` has a Hamiltonian path ending at ``v``. Pattern
    pieces (paths, starlike branches) are read off as vertex subsets, and
    packing ``t`` disjoint pieces is decided with a superset-closure table.
    Used for hosts up to :data:`DP_MAX_N` vertices.
``backtrack``
    Bitmask backtracking with canonical ordering of identical pieces and a
    failure memo. Used for larger hosts up to :data:`BACKTRACK_MAX_N`.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import InvalidInput, TooLarge
from .graphcore import Graph, Pattern, _bits

LONGEST_PATH_MAX_N = 24
DP_MAX_N = 16
BACKTRACK_MAX_N = 64


@dataclass(frozen=True)
class ContainmentWitness:
    pattern: Pattern
    found: bool
    vertex_map: tuple[int, ...] = ()

    def pieces(self) -> list[list[int]]:
        """Host vertices per pattern component: paths, or centre plus branches/cycles."""
        if not self.found:
            return []
        p, vm = self.pattern, list(self.vertex_map)
        if p.kind in ("Path", "LinearForest"):
            return [vm[i : i + p.l] for i in range(0, len(vm), p.l)]
        leg = p.l - 1
        return [[vm[0]]] + [vm[1 + b * leg : 1 + (b + 1) * leg] for b in range(p.t)]

    def to_json(self) -> dict:
        out = {"pattern": str(self.pattern), "found": self.found}
        if self.found:
            out["witness"] = self.pieces()
        return out


def verify_witness(g: Graph, w: ContainmentWitness) -> bool:
    """True when the witness map is injective and every pattern edge is a host edge."""
    from .graphcore import pattern_graph

    if not w.found:
        return True
    pg = pattern_graph(w.pattern)
    vm = w.vertex_map
    if len(vm) != pg.n or len(set(vm)) != len(vm) or not all(0 <= v < g.n for v in vm):
        return False
    return all(g.has_edge(vm[a], vm[b]) for a, b in pg.edges())


# -- subset DP -------------------------------------------------------------


def _popcount(arr: np.ndarray) -> np.ndarray:
    x = arr.astype(np.uint64)
    x = x - ((x >> np.uint64(1)) & np.uint64(0x5555555555555555))
    x = (x & np.uint64(0x3333333333333333)) + ((x >> np.uint64(2)) & np.uint64(0x3333333333333333))
    x = (x + (x >> np.uint64(4))) & np.uint64(0x0F0F0F0F0F0F0F0F)
    return ((x * np.uint64(0x0101010101010101)) >> np.uint64(56)).astype(np.int8)


@lru_cache(maxsize=4)
def _layers(n: int) -> tuple[np.ndarray, ...]:
    pc = _popcount(np.arange(1 << n, dtype=np.int64))
    return tuple(np.flatnonzero(pc == k) for k in range(n + 1))


class _HamTable:
    """Hamiltonian-path endpoint masks for every vertex subset up to a size cap."""

    def __init__(self, g: Graph, max_size: int | None = None):
        n = g.n
        if n > LONGEST_PATH_MAX_N:
            raise TooLarge(f"subset DP is capped at n <= {LONGEST_PATH_MAX_N}, got n={n}")
        self.g = g
        self.n = n
        max_size = n if max_size is None else min(max_size, n)
        dtype = np.uint32
        reach = np.zeros(1 << n, dtype=dtype)
        for v in range(n):
            reach[1 << v] = 1 << v
        layers = _layers(n)
        adj = [dtype(r) for r in g.rows]
        self.top = 1 if n else 0
        for k in range(2, max_size + 1):
            s = layers[k]
            any_hit = False
            for v in range(n):
                sv = s[(s >> v) & 1 == 1]
                hit = (reach[sv ^ (1 << v)] & adj[v]) != 0
                if hit.any():
                    any_hit = True
                    reach[sv[hit]] |= dtype(1 << v)
            if not any_hit:
                break
            self.top = k
        self.reach = reach

    def sets_of_size(self, k: int) -> np.ndarray:
        if k > self.top:
            return np.zeros(0, dtype=np.int64)
        s = _layers(self.n)[k]
        return s[self.reach[s] != 0]

    def path_on(self, s: int, end_mask: int | None = None) -> list[int]:
        """A Hamiltonian path of ``G[s]``, oriented to end inside ``end_mask`` if given."""
        ends = int(self.reach[s])
        if end_mask is not None:
            ends &= end_mask
        v = (ends & -ends).bit_length() - 1
        out = [v]
        while s != 1 << v:
            prev = s ^ (1 << v)
            u_mask = int(self.reach[prev]) & self.g.rows[v]
            v = (u_mask & -u_mask).bit_length() - 1
            out.append(v)
            s = prev
        return out  # starts at the requested end, walks back


def _superset_closure(n: int, members: np.ndarray) -> np.ndarray:
    up = np.zeros(1 << n, dtype=bool)
    up[members] = True
    idx = np.arange(1 << n, dtype=np.int64)
    for b in range(n):
        lo = idx[(idx >> b) & 1 == 0]
        up[lo | (1 << b)] |= up[lo]
    return up


def _disjoint_unions(family: np.ndarray, base: np.ndarray) -> np.ndarray:
    out = [family[(family & b) == 0] | b for b in base.tolist()]
    if not out:
        return np.zeros(0, dtype=np.int64)
    return np.unique(np.concatenate(out))


def _pack(n: int, family: np.ndarray, universe: int, t: int) -> list[int] | None:
    """``t`` pairwise disjoint members of ``family`` inside ``universe``, or None."""
    family = family[(family & ~universe) == 0]
    if t == 0:
        return []
    if family.size == 0:
        return None
    if t == 1:
        return [int(family[0])]
    unions = family
    for _ in range(t - 2):
        unions = _disjoint_unions(unions, family)
        if unions.size == 0:
            return None
    up = _superset_closure(n, unions)
    ok = up[universe ^ family]
    if not ok.any():
        return None
    first = int(family[np.argmax(ok)])
    rest = _pack(n, family, universe ^ first, t - 1)
    return [first] + rest


def _dp_contains(g: Graph, p: Pattern) -> tuple[int, ...] | None:
    n = g.n
    full = (1 << n) - 1
    if p.kind in ("Path", "LinearForest"):
        t = 1 if p.kind == "Path" else p.t
        table = _HamTable(g, p.l)
        chosen = _pack(n, table.sets_of_size(p.l), full, t)
        if chosen is None:
            return None
        return tuple(v for s in chosen for v in table.path_on(s))
    if p.kind == "Starlike":
        leg = p.l - 1
        table = _HamTable(g, leg)
        sets = table.sets_of_size(leg)
        for c in range(n):
            if g.degree(c) < p.t:
                continue
            nbr = g.rows[c]
            fam = sets[((sets >> c) & 1 == 0) & ((table.reach[sets].astype(np.int64) & nbr) != 0)]
            chosen = _pack(n, fam, full ^ (1 << c), p.t)
            if chosen is not None:
                out = [c]
                for s in chosen:
                    out.extend(table.path_on(s, nbr))
                return tuple(out)
        return None
    return _backtrack_contains(g, p)


# -- backtracking -----------------------------------------------------------


class _Search:
    def __init__(self, g: Graph):
        self.rows = g.rows
        self.n = g.n

    def reachable(self, v: int, avail: int) -> int:
        comp = frontier = 1 << v
        rows = self.rows
        while frontier:
            nxt = 0
            m = frontier
            while m:
                low = m & -m
                nxt |= rows[low.bit_length() - 1]
                m ^= low
            frontier = nxt & avail & ~comp
            comp |= frontier
        return comp

    def paths_from(self, start: int, order: int, avail: int, end_mask: int = -1, end_above: int = -1):
        """Simple paths of ``order`` vertices starting at ``start`` inside ``avail``.

        The last vertex must lie in ``end_mask`` and exceed ``end_above``.
        ``avail`` must not contain ``start``.
        """
        rows = self.rows
        if order == 1:
            if (end_mask >> start) & 1 and start > end_above:
                yield [start]
            return
        path = [start]

        def grow(v, free, need):
            if need == 1:
                cand = rows[v] & free & end_mask
                cand &= ~((1 << (end_above + 1)) - 1)
                while cand:
                    low = cand & -cand
                    path.append(low.bit_length() - 1)
                    yield path
                    path.pop()
                    cand ^= low
                return
            if need > 3 and (self.reachable(v, free).bit_count() - 1) < need:
                return
            cand = rows[v] & free
            while cand:
                low = cand & -cand
                u = low.bit_length() - 1
                path.append(u)
                yield from grow(u, free ^ low, need - 1)
                path.pop()
                cand ^= low

        yield from grow(start, avail, order - 1)

    def pack_paths(self, order: int, count: int, avail: int, min_start: int, memo: set):
        """Yield tuples of ``count`` disjoint ``order``-paths with increasing start vertices."""
        if count == 0:
            yield ()
            return
        key = (avail, count, min_start)
        if key in memo or avail.bit_count() < order * count:
            return
        starts = avail & ~((1 << (min_start + 1)) - 1)
        while starts:
            low = starts & -starts
            s = low.bit_length() - 1
            starts ^= low
            rest = avail ^ low
            for pth in self.paths_from(s, order, rest, end_above=s if order > 1 else -1):
                used = 0
                for v in pth:
                    used |= 1 << v
                first = list(pth)
                for tail in self.pack_paths(order, count - 1, avail & ~used, s, memo):
                    yield (first,) + tail
                    return
        memo.add(key)


def _backtrack_contains(g: Graph, p: Pattern) -> tuple[int, ...] | None:
    n = g.n
    full = (1 << n) - 1
    sr = _Search(g)
    if p.kind in ("Path", "LinearForest"):
        t = 1 if p.kind == "Path" else p.t
        for combo in sr.pack_paths(p.l, t, full, -1, set()):
            return tuple(v for pth in combo for v in pth)
        return None
    leg = p.l - 1
    for c in range(n):
        if g.degree(c) < (p.t if p.kind == "Starlike" else 2 * p.t):
            continue
        nbr = g.rows[c]
        avail0 = full ^ (1 << c)
        memo: set = set()

        def branches(avail, need, min_first):
            if need == 0:
                yield ()
                return
            key = (avail, need, min_first)
            if key in memo or avail.bit_count() < need * leg:
                return
            firsts = nbr & avail & ~((1 << (min_first + 1)) - 1)
            while firsts:
                low = firsts & -firsts
                w = low.bit_length() - 1
                firsts ^= low
                if p.kind == "Starlike":
                    gen = sr.paths_from(w, leg, avail ^ low)
                else:
                    gen = sr.paths_from(w, leg, avail ^ low, end_mask=nbr, end_above=w)
                for pth in gen:
                    used = 0
                    for v in pth:
                        used |= 1 << v
                    first = list(pth)
                    for tail in branches(avail & ~used, need - 1, w):
                        yield (first,) + tail
                        return
            memo.add(key)

        for combo in branches(avail0, p.t, -1):
            return (c,) + tuple(v for b in combo for v in b)
    return None


# -- public API -------------------------------------------------------------


def contains(g: Graph, p: Pattern, engine: str = "auto") -> ContainmentWitness:
    """Decide whether ``p`` embeds in ``g`` as a (not necessarily induced) subgraph.

    Linear forests need vertex-disjoint copies; a book needs ``t`` cycles
    meeting only at a common hub, i.e. a copy of the book graph itself.
    """
    if engine not in ("auto", "dp", "backtrack"):
        raise InvalidInput(f"unknown engine {engine!r}")
    if g.n > BACKTRACK_MAX_N:
        raise TooLarge(f"containment search is capped at n <= {BACKTRACK_MAX_N}, got n={g.n}")
    if p.order > g.n:
        return ContainmentWitness(p, False)
    if engine == "auto":
        engine = "dp" if g.n <= DP_MAX_N else "backtrack"
    if engine == "dp":
        if g.n > LONGEST_PATH_MAX_N:
            raise TooLarge(f"the dp engine is capped at n <= {LONGEST_PATH_MAX_N}")
        vm = _dp_contains(g, p)
    else:
        vm = _backtrack_contains(g, p)
    return ContainmentWitness(p, vm is not None, vm or ())


def is_free(g: Graph, p: Pattern | None, engine: str = "auto") -> bool:
    return True if p is None else not contains(g, p, engine).found


def longest_path_order(g: Graph) -> int:
    """Number of vertices on a longest path, by subset DP (n <= 24)."""
    return _HamTable(g).top


def is_planar(g: Graph) -> bool:
    import networkx as nx

    if g.n >= 3 and g.m > 3 * g.n - 6:
        return False
    return nx.check_planarity(g.to_networkx())[0]


def cone(g: Graph) -> Graph:
    """``K_1 ∨ g`` with the new vertex numbered ``g.n``."""
    full = (1 << g.n) - 1
    rows = tuple(r | (1 << g.n) for r in g.rows) + (full,)
    return Graph(g.n + 1, rows)


def is_outerplanar(g: Graph) -> bool:
    """Outerplanarity as planarity of the cone over ``g``."""
    if g.n >= 2 and g.m > 2 * g.n - 3:
        return False
    return is_planar(cone(g))


def in_class(g: Graph, cls: str) -> bool:
    if cls == "all":
        return True
    if cls == "planar":
        return is_planar(g)
    if cls == "outerplanar":
        return is_outerplanar(g)
    raise InvalidInput(f"unknown graph class {cls!r}")
