"""Graph types, join-graph specs and the named constructors.

Vertex numbering for realized join graphs: apexes first (``0 .. k-1``),
then each path of the partition laid out consecutively in partition order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import InvalidInput

__all__ = [
    "Graph",
    "PathPartition",
    "JoinSpec",
    "Pattern",
    "realize",
    "h_op",
    "h_p",
    "h_p3",
    "pattern_graph",
    "named_graph",
    "NAMED_GRAPHS",
    "parse_pattern",
    "to_graph6",
    "from_graph6",
    "to_dot",
]


def _bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph stored as one adjacency bitrow per vertex."""

    n: int
    rows: tuple[int, ...]

    def __post_init__(self):
        if self.n < 1:
            raise InvalidInput("a graph needs at least one vertex")
        if len(self.rows) != self.n:
            raise InvalidInput("need exactly one adjacency row per vertex")
        full = (1 << self.n) - 1
        for v, row in enumerate(self.rows):
            if row & ~full:
                raise InvalidInput(f"row {v} references a vertex >= n")
            if row >> v & 1:
                raise InvalidInput(f"loop at vertex {v}")
            for u in _bits(row):
                if not self.rows[u] >> v & 1:
                    raise InvalidInput(f"asymmetric adjacency {v}-{u}")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> Graph:
        rows = [0] * n
        for u, v in edges:
            if u == v:
                raise InvalidInput(f"loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise InvalidInput(f"edge ({u}, {v}) outside 0..{n - 1}")
            rows[u] |= 1 << v
            rows[v] |= 1 << u
        return cls(n, tuple(rows))

    @classmethod
    def empty(cls, n: int) -> Graph:
        return cls(n, (0,) * n)

    @classmethod
    def complete(cls, n: int) -> Graph:
        full = (1 << n) - 1
        return cls(n, tuple(full ^ (1 << v) for v in range(n)))

    @classmethod
    def path(cls, n: int) -> Graph:
        return cls.from_edges(n, ((i, i + 1) for i in range(n - 1)))

    @classmethod
    def cycle(cls, n: int) -> Graph:
        if n < 3:
            raise InvalidInput("a cycle needs at least 3 vertices")
        return cls.from_edges(n, [(i, (i + 1) % n) for i in range(n)])

    @classmethod
    def complete_bipartite(cls, a: int, b: int) -> Graph:
        return cls.from_edges(a + b, ((i, a + j) for i in range(a) for j in range(b)))

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.rows[u] >> v & 1)

    def neighbors(self, v: int) -> list[int]:
        return list(_bits(self.rows[v]))

    def degree(self, v: int) -> int:
        return self.rows[v].bit_count()

    def degrees(self) -> list[int]:
        return [r.bit_count() for r in self.rows]

    @property
    def m(self) -> int:
        return sum(r.bit_count() for r in self.rows) // 2

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in _bits(self.rows[u] >> (u + 1) << (u + 1))]

    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        e = self.edges()
        if not e:
            return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
        arr = np.asarray(e, dtype=np.int64)
        return arr[:, 0], arr[:, 1]

    def adjacency_matrix(self) -> np.ndarray:
        a = np.zeros((self.n, self.n))
        u, v = self.edge_arrays()
        a[u, v] = 1.0
        a[v, u] = 1.0
        return a

    def with_edges(self, add=(), delete=()) -> Graph:
        rows = list(self.rows)
        for u, v in delete:
            rows[u] &= ~(1 << v)
            rows[v] &= ~(1 << u)
        for u, v in add:
            rows[u] |= 1 << v
            rows[v] |= 1 << u
        return Graph(self.n, tuple(rows))

    def induced(self, vertices: Sequence[int]) -> Graph:
        """Induced subgraph, relabelled ``0..len(vertices)-1`` in the given order."""
        index = {v: i for i, v in enumerate(vertices)}
        rows = []
        for v in vertices:
            r = 0
            for u in _bits(self.rows[v]):
                if u in index:
                    r |= 1 << index[u]
            rows.append(r)
        return Graph(len(vertices), tuple(rows))

    def components(self) -> list[list[int]]:
        """Connected components as sorted vertex lists, ordered by smallest vertex."""
        seen = 0
        out = []
        for s in range(self.n):
            if seen >> s & 1:
                continue
            comp = frontier = 1 << s
            while frontier:
                nxt = 0
                for v in _bits(frontier):
                    nxt |= self.rows[v]
                frontier = nxt & ~comp
                comp |= frontier
            seen |= comp
            out.append(list(_bits(comp)))
        return out

    def is_connected(self) -> bool:
        return len(self.components()) == 1

    def to_networkx(self):
        import networkx as nx

        g = nx.Graph()
        g.add_nodes_from(range(self.n))
        g.add_edges_from(self.edges())
        return g


@dataclass(frozen=True)
class PathPartition:
    """Multiset of path orders kept sorted non-increasing."""

    parts: tuple[int, ...]

    def __init__(self, parts: Iterable[int] = ()):
        parts = tuple(sorted((int(p) for p in parts), reverse=True))
        if any(p < 1 for p in parts):
            raise InvalidInput(f"path orders must be >= 1, got {parts}")
        object.__setattr__(self, "parts", parts)

    @property
    def total(self) -> int:
        return sum(self.parts)

    def __len__(self) -> int:
        return len(self.parts)

    def __iter__(self):
        return iter(self.parts)

    def __getitem__(self, i):
        return self.parts[i]

    def top(self, i: int) -> int:
        """Order of the i-th longest path (1-based); 0 when fewer paths exist."""
        return self.parts[i - 1] if i <= len(self.parts) else 0

    def __str__(self) -> str:
        return ",".join(map(str, self.parts))


def iter_partitions(m: int, max_part: int | None = None) -> Iterator[tuple[int, ...]]:
    """Integer partitions of ``m`` as non-increasing tuples, reverse-lexicographic order."""
    if m < 0:
        raise InvalidInput("cannot partition a negative number")
    top = m if max_part is None else min(m, max_part)
    if m == 0:
        yield ()
        return
    # iterative stack of (remaining, cap) so deep partitions do not recurse
    parts: list[int] = []
    stack = [(m, top, top)]
    while stack:
        rem, cap, nxt = stack.pop()
        del parts[len(stack):]
        if nxt < 1:
            continue
        stack.append((rem, cap, nxt - 1))
        parts.append(nxt)
        left = rem - nxt
        if left == 0:
            yield tuple(parts)
        else:
            stack.append((left, nxt, min(nxt, left)))


@dataclass(frozen=True)
class JoinSpec:
    """``K_k ∨ (P_{n_1} ∪ ... ∪ P_{n_q})`` with an optional edge between the apexes."""

    apex_k: int
    partition: PathPartition
    apex_edge: bool = field(default=True)

    def __post_init__(self):
        if self.apex_k not in (1, 2):
            raise InvalidInput("apex_k must be 1 or 2")
        if not isinstance(self.partition, PathPartition):
            object.__setattr__(self, "partition", PathPartition(self.partition))
        if self.apex_k == 1:
            object.__setattr__(self, "apex_edge", False)

    @property
    def n(self) -> int:
        return self.apex_k + self.partition.total

    @property
    def edge_count(self) -> int:
        p = self.partition
        return int(self.apex_edge) + self.apex_k * p.total + sum(x - 1 for x in p)

    def to_json(self) -> dict:
        return {
            "apex_k": self.apex_k,
            "apex_edge": self.apex_edge,
            "parts": list(self.partition.parts),
        }

    @classmethod
    def from_json(cls, data) -> JoinSpec:
        if isinstance(data, str):
            data = json.loads(data)
        return cls(int(data["apex_k"]), PathPartition(data["parts"]), bool(data.get("apex_edge", True)))

    def path_ranges(self) -> list[range]:
        """Vertex ranges of the paths in a realized graph."""
        out, start = [], self.apex_k
        for p in self.partition:
            out.append(range(start, start + p))
            start += p
        return out


def realize(spec: JoinSpec) -> Graph:
    """Materialize a join spec as a concrete graph."""
    k = spec.apex_k
    edges = []
    if k == 2 and spec.apex_edge:
        edges.append((0, 1))
    for r in spec.path_ranges():
        for v in r:
            for a in range(k):
                edges.append((a, v))
        edges.extend((v, v + 1) for v in r[:-1])
    return Graph.from_edges(spec.n, edges)


def _repeat_partition(free: int, total_budget: str, leading: list[int], short: int) -> PathPartition:
    if short < 1:
        raise InvalidInput("the repeated path order must be >= 1")
    if free < 0:
        raise InvalidInput(f"leading parts {leading} exceed {total_budget}")
    q, r = divmod(free, short)
    parts = leading + [short] * q
    if r:
        parts.append(r)
    return PathPartition(parts)


def h_op(n: int, n1: int, n2: int) -> PathPartition:
    """One ``P_{n1}``, then as many ``P_{n2}`` as fit in ``n-1`` vertices, then the remainder.

    Accepts ``n1 == n2`` (needed for even ``l - 2`` where ceil and floor coincide).
    """
    if not n1 >= n2 >= 1:
        raise InvalidInput(f"need n1 >= n2 >= 1, got n1={n1}, n2={n2}")
    if n1 > n - 1:
        raise InvalidInput(f"n1={n1} exceeds n-1={n - 1}")
    return _repeat_partition(n - 1 - n1, "n-1", [n1], n2)


def h_p(n: int, n1: int, n2: int) -> PathPartition:
    """Like :func:`h_op` over ``n - 2`` vertices (the two-apex family)."""
    if not n1 >= n2 >= 1:
        raise InvalidInput(f"need n1 >= n2 >= 1, got n1={n1}, n2={n2}")
    if n1 > n - 2:
        raise InvalidInput(f"n1={n1} exceeds n-2={n - 2}")
    return _repeat_partition(n - 2 - n1, "n-2", [n1], n2)


def h_p3(n: int, n1: int, n2: int, n3: int) -> PathPartition:
    """``P_{n1} ∪ P_{n2}`` plus copies of ``P_{n3}`` and a remainder, over ``n - 2`` vertices.

    The copy count is ``floor((n-2-n1-n2)/n3)``; the published definition
    subtracts ``n3`` instead of ``n2`` in one branch, which cannot sum to
    ``n - 2`` and is read as a misprint.
    """
    if not n1 >= n2 >= n3 >= 1:
        raise InvalidInput(f"need n1 >= n2 >= n3 >= 1, got {n1}, {n2}, {n3}")
    if n1 + n2 > n - 2:
        raise InvalidInput(f"n1+n2={n1 + n2} exceeds n-2={n - 2}")
    return _repeat_partition(n - 2 - n1 - n2, "n-2", [n1, n2], n3)


PATTERN_KINDS = ("Path", "LinearForest", "Starlike", "Book")
_GRAMMAR = {"Path": "P", "LinearForest": "tP", "Starlike": "Star", "Book": "Book"}


@dataclass(frozen=True)
class Pattern:
    """Forbidden-subgraph descriptor.

    ``Path(l)`` is ``P_l``; ``LinearForest(t, l)`` is ``tP_l``;
    ``Starlike(t, l)`` is a centre with ``t`` pendant paths of ``l - 1``
    vertices; ``Book(t, l)`` is ``t`` ``l``-cycles sharing one vertex.
    """

    kind: str
    t: int
    l: int  # noqa: E741

    def __post_init__(self):
        if self.kind not in PATTERN_KINDS:
            raise InvalidInput(f"unknown pattern kind {self.kind!r}")
        if self.t < 1:
            raise InvalidInput("t must be >= 1")
        if self.kind == "Path" and self.t != 1:
            raise InvalidInput("Path patterns have t = 1")
        min_l = 3 if self.kind == "Book" else 2
        if self.l < min_l:
            raise InvalidInput(f"{self.kind} needs l >= {min_l}")

    @classmethod
    def path(cls, l: int) -> Pattern:  # noqa: E741
        return cls("Path", 1, l)

    @classmethod
    def linear_forest(cls, t: int, l: int) -> Pattern:  # noqa: E741
        return cls("LinearForest", t, l)

    @classmethod
    def starlike(cls, t: int, l: int) -> Pattern:  # noqa: E741
        return cls("Starlike", t, l)

    @classmethod
    def book(cls, t: int, l: int) -> Pattern:  # noqa: E741
        return cls("Book", t, l)

    @property
    def order(self) -> int:
        if self.kind == "Path":
            return self.l
        if self.kind == "LinearForest":
            return self.t * self.l
        return self.t * (self.l - 1) + 1

    def __str__(self) -> str:
        if self.kind == "Path":
            return f"P:{self.l}"
        return f"{_GRAMMAR[self.kind]}:{self.t},{self.l}"


def parse_pattern(text: str) -> Pattern:
    """Parse ``P:l``, ``tP:t,l``, ``Star:t,l`` or ``Book:t,l``."""
    head, sep, body = text.strip().partition(":")
    if not sep:
        raise InvalidInput(f"bad pattern {text!r}: expected KIND:ARGS")
    try:
        args = [int(a) for a in body.split(",")]
    except ValueError:
        raise InvalidInput(f"bad pattern arguments in {text!r}") from None
    kinds = {v: k for k, v in _GRAMMAR.items()}
    if head not in kinds:
        raise InvalidInput(f"unknown pattern kind {head!r} in {text!r}")
    kind = kinds[head]
    if kind == "Path":
        if len(args) != 1:
            raise InvalidInput("P takes one argument")
        return Pattern.path(args[0])
    if len(args) != 2:
        raise InvalidInput(f"{head} takes two arguments t,l")
    return Pattern(kind, args[0], args[1])


def pattern_graph(p: Pattern) -> Graph:
    """Concrete pattern graph.

    Numbering: linear forests lay copies out consecutively; starlike trees
    and books put the centre at 0 and branch ``b`` at
    ``1 + b(l-1) .. (b+1)(l-1)``, branch order along the path away from the
    centre.
    """
    if p.kind in ("Path", "LinearForest"):
        t = 1 if p.kind == "Path" else p.t
        edges = [(c * p.l + i, c * p.l + i + 1) for c in range(t) for i in range(p.l - 1)]
        return Graph.from_edges(t * p.l, edges)
    leg = p.l - 1
    edges = []
    for b in range(p.t):
        first = 1 + b * leg
        edges.append((0, first))
        edges.extend((first + i, first + i + 1) for i in range(leg - 1))
        if p.kind == "Book":
            edges.append((0, first + leg - 1))
    return Graph.from_edges(p.order, edges)


def named_graph(name: str, n: int, k: int | None = None) -> Graph:
    """The star, ``K_2 ∨ (n-2)K_1``, ``S_{n,k}``, ``S^+_{n,k}`` or ``K_{2,n-2}``."""
    if name == "star":
        k = 1
    elif name in ("k2_join_empty", "k_2_n2"):
        k = 2
    elif name not in ("s_nk", "s_plus_nk"):
        raise InvalidInput(f"unknown named graph {name!r}; choose from {sorted(NAMED_GRAPHS)}")
    if k is None:
        raise InvalidInput(f"{name} needs k")
    if not n > k >= 1:
        raise InvalidInput(f"need n > k >= 1, got n={n}, k={k}")
    clique = [(a, b) for a in range(k) for b in range(a + 1, k)]
    join = [(a, v) for a in range(k) for v in range(k, n)]
    if name == "k_2_n2":
        return Graph.from_edges(n, join)
    edges = clique + join
    if name == "s_plus_nk":
        if n - k < 2:
            raise InvalidInput("S^+_{n,k} needs n - k >= 2")
        edges.append((k, k + 1))
    return Graph.from_edges(n, edges)


NAMED_GRAPHS = ("star", "k2_join_empty", "s_nk", "s_plus_nk", "k_2_n2")


def _encode_n(n: int) -> str:
    if n <= 62:
        return chr(n + 63)
    if n <= 258047:
        return "~" + "".join(chr(((n >> s) & 63) + 63) for s in (12, 6, 0))
    return "~~" + "".join(chr(((n >> s) & 63) + 63) for s in (30, 24, 18, 12, 6, 0))


def to_graph6(g: Graph) -> str:
    """Standard graph6 string: upper triangle read column by column."""
    bits = [(g.rows[i] >> j) & 1 for j in range(1, g.n) for i in range(j)]
    bits += [0] * (-len(bits) % 6)
    body = []
    for i in range(0, len(bits), 6):
        val = 0
        for b in bits[i : i + 6]:
            val = val << 1 | b
        body.append(chr(val + 63))
    return _encode_n(g.n) + "".join(body)


def from_graph6(text: str) -> Graph:
    s = text.strip()
    if s.startswith(">>graph6<<"):
        s = s[10:]
    data = [ord(c) - 63 for c in s]
    if not data or any(not 0 <= d < 64 for d in data):
        raise InvalidInput(f"not a graph6 string: {text!r}")
    if data[0] < 63:
        n, pos = data[0], 1
    elif len(data) > 1 and data[1] < 63:
        n = (data[1] << 12) | (data[2] << 6) | data[3]
        pos = 4
    else:
        n = 0
        for d in data[2:8]:
            n = n << 6 | d
        pos = 8
    need = (n * (n - 1) // 2 + 5) // 6
    body = data[pos:]
    if len(body) != need:
        raise InvalidInput(f"graph6 body has {len(body)} bytes, expected {need}")
    bits = [(d >> s) & 1 for d in body for s in range(5, -1, -1)]
    edges, k = [], 0
    for j in range(1, n):
        for i in range(j):
            if bits[k]:
                edges.append((i, j))
            k += 1
    return Graph.from_edges(n, edges)


def to_dot(g: Graph, name: str = "G", apexes: Sequence[int] = ()) -> str:
    lines = [f"graph {name} {{"]
    for v in range(g.n):
        attr = " [shape=doublecircle]" if v in apexes else ""
        lines.append(f"  {v}{attr};")
    lines.extend(f"  {u} -- {v};" for u, v in g.edges())
    lines.append("}")
    return "\n".join(lines) + "\n"
