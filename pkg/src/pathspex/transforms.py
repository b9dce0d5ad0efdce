"""Path transformations on join graphs and the Rayleigh perturbation bound.

The ``(s1, s2)``-transformation moves one vertex from a ``P_{s2}`` onto a
``P_{s1}``: the pair becomes ``P_{s1+1} ∪ P_{s2-1}``, and for ``s2 = 1``
the two paths merge. At large ``n`` it raises the spectral radius of the
join; :func:`transform_scan` measures where that starts on a grid.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidEdit, InvalidInput, MissingPart
from .graphcore import Graph, JoinSpec, PathPartition
from .spectral import DEFAULT_TOL, spectral_radius


@dataclass(frozen=True)
class EditScript:
    deletions: tuple[tuple[int, int], ...] = ()
    additions: tuple[tuple[int, int], ...] = ()

    def __init__(self, deletions: Iterable[Sequence[int]] = (), additions: Iterable[Sequence[int]] = ()):
        norm = lambda pairs: tuple((min(u, v), max(u, v)) for u, v in pairs)
        object.__setattr__(self, "deletions", norm(deletions))
        object.__setattr__(self, "additions", norm(additions))

    def __len__(self) -> int:
        return len(self.deletions) + len(self.additions)

    def to_json(self) -> dict:
        return {"deletions": [list(e) for e in self.deletions], "additions": [list(e) for e in self.additions]}


def s_transform(p: PathPartition, s1: int, s2: int) -> PathPartition:
    """Replace ``P_{s1}, P_{s2}`` by ``P_{s1+1}, P_{s2-1}`` (a merge when ``s2 = 1``)."""
    if not s1 >= s2 >= 1:
        raise InvalidInput(f"need s1 >= s2 >= 1, got s1={s1}, s2={s2}")
    have = Counter(p.parts)
    need = Counter([s1, s2])
    for part, cnt in need.items():
        if have[part] < cnt:
            raise MissingPart(f"partition {p} has {have[part]} path(s) of order {part}, needs {cnt}")
    have -= need
    parts = list(have.elements()) + [s1 + 1]
    if s2 > 1:
        parts.append(s2 - 1)
    return PathPartition(parts)


@dataclass(frozen=True)
class TransformComparison:
    n: int
    apex_k: int
    before: PathPartition
    after: PathPartition
    rho_before: float
    rho_after: float

    @property
    def delta(self) -> float:
        return self.rho_after - self.rho_before

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "apex_k": self.apex_k,
            "before": list(self.before.parts),
            "after": list(self.after.parts),
            "rho_before": self.rho_before,
            "rho_after": self.rho_after,
            "delta": self.delta,
        }


def compare_transform(n: int, apex_k: int, p: PathPartition, s1: int, s2: int, tol: float = DEFAULT_TOL,
                      apex_edge: bool = True) -> TransformComparison:
    if p.total != n - apex_k:
        raise InvalidInput(f"partition total {p.total} != n - apex_k = {n - apex_k}")
    q = s_transform(p, s1, s2)
    rb = spectral_radius(JoinSpec(apex_k, p, apex_edge), tol=tol).rho
    ra = spectral_radius(JoinSpec(apex_k, q, apex_edge), tol=tol).rho
    return TransformComparison(n, apex_k, p, q, rb, ra)


def apply_edits(g: Graph, e: EditScript) -> Graph:
    """Delete then add; every deletion must be an edge and every addition a non-edge afterwards."""
    rows = list(g.rows)
    for u, v in e.deletions:
        if not (0 <= u < g.n and 0 <= v < g.n) or not (rows[u] >> v) & 1:
            raise InvalidEdit(f"cannot delete non-edge {u}-{v}")
        rows[u] &= ~(1 << v)
        rows[v] &= ~(1 << u)
    for u, v in e.additions:
        if u == v or not (0 <= u < g.n and 0 <= v < g.n):
            raise InvalidEdit(f"cannot add {u}-{v}")
        if (rows[u] >> v) & 1:
            raise InvalidEdit(f"edge {u}-{v} already present")
        rows[u] |= 1 << v
        rows[v] |= 1 << u
    return Graph(g.n, tuple(rows))


def perturbation_lower_bound(g: Graph, e: EditScript, x: Sequence[float]) -> float:
    """``x^T (A(G') - A(G)) x / x^T x``; a lower bound on ``rho(G') - rho(G)`` for the Perron vector x."""
    x = np.asarray(x, dtype=float)
    if x.shape != (g.n,):
        raise InvalidInput(f"vector length {x.shape} does not match n={g.n}")
    add = sum(x[u] * x[v] for u, v in e.additions)
    rem = sum(x[u] * x[v] for u, v in e.deletions)
    return float(2.0 * (add - rem) / float(x @ x))


def spread_rewiring(spec: JoinSpec) -> EditScript:
    """Shorten the longest path by one and lengthen ``n2 + 1`` copies of the second order.

    Needs ``P_{n1}`` with ``n1 >= 2`` followed by at least ``n2 + 2`` paths
    of order ``n2``. The end vertex of the longest path moves onto the
    ``(n2+2)``-th of them; the ``(n2+2)``-th copy after that is taken apart and
    its vertices are hung on the ends of the first ``n2`` copies.
    Deletes ``n2`` edges and adds ``n2 + 1``.
    """
    p = spec.partition
    n1, n2 = p.top(1), p.top(2)
    if n1 < 2 or len(p) < n2 + 3 or p.top(n2 + 3) != n2:
        raise InvalidEdit(f"partition {p} lacks a long path followed by {n2 + 2} paths of order {n2}")
    ranges = spec.path_ranges()
    first = ranges[0]
    w1, w2 = first[-2], first[-1]
    dels = [(w1, w2)]
    adds = [(w2, ranges[n2 + 1][-1])]
    donor = ranges[n2 + 2]
    dels.extend((donor[i], donor[i + 1]) for i in range(len(donor) - 1))
    adds.extend((donor[i], ranges[i + 1][-1]) for i in range(n2))
    return EditScript(dels, adds)


# -- grid scans ---------------------------------------------------------------


def parse_grid(text: str) -> list[int]:
    """``start:stop:step`` (inclusive stop) or a comma list."""
    try:
        if ":" in text:
            bits = [int(b) for b in text.split(":")]
            if len(bits) == 2:
                bits.append(1)
            start, stop, step = bits
            if step <= 0:
                raise ValueError
            return list(range(start, stop + 1, step))
        return [int(b) for b in text.split(",") if b.strip()]
    except ValueError:
        raise InvalidInput(f"bad grid {text!r}; expected start:stop:step or a comma list") from None


FILLERS = ("ones", "s2")


def base_partition(n: int, apex_k: int, s1: int, s2: int, filler: str = "ones") -> PathPartition:
    """``P_{s1} ∪ P_{s2} ∪ H0`` with ``H0`` isolated vertices, or copies of ``P_{s2}`` plus a remainder."""
    rest = n - apex_k - s1 - s2
    if rest < 0:
        raise InvalidInput(f"n={n} too small for s1={s1}, s2={s2}")
    if filler == "ones":
        h0 = [1] * rest
    elif filler == "s2":
        q, r = divmod(rest, s2)
        h0 = [s2] * q + ([r] if r else [])
    else:
        raise InvalidInput(f"unknown filler {filler!r}; choose from {FILLERS}")
    return PathPartition([s1, s2] + h0)


@dataclass
class ScanReport:
    apex_k: int
    s1: int
    s2: int
    filler: str
    rows: list[TransformComparison] = field(default_factory=list)

    @property
    def threshold(self) -> int | None:
        """Smallest grid n from which delta stays positive to the end of the grid."""
        thr = None
        for row in reversed(self.rows):
            if row.delta > 0:
                thr = row.n
            else:
                break
        return thr

    @property
    def sign_changes(self) -> list[int]:
        """Grid points where the sign of delta differs from the previous grid point."""
        out = []
        for a, b in zip(self.rows, self.rows[1:]):
            if (a.delta > 0) != (b.delta > 0):
                out.append(b.n)
        return out

    def summary(self) -> dict:
        thr = self.threshold
        return {
            "apex_k": self.apex_k,
            "s1": self.s1,
            "s2": self.s2,
            "filler": self.filler,
            "points": len(self.rows),
            "threshold": thr,
            "sign_changes": self.sign_changes,
            "sub_threshold_sign_changes": [n for n in self.sign_changes if thr is None or n < thr],
            "min_delta_at_or_above_threshold": min((r.delta for r in self.rows if thr is not None and r.n >= thr), default=None),
        }


def transform_scan(apex_k: int, s1: int, s2: int, n_grid: Sequence[int], filler: str = "ones",
                   tol: float = DEFAULT_TOL, apex_edge: bool = True) -> ScanReport:
    rep = ScanReport(apex_k, s1, s2, filler)
    for n in n_grid:
        if n - apex_k < s1 + s2:
            continue
        p = base_partition(n, apex_k, s1, s2, filler)
        rep.rows.append(compare_transform(n, apex_k, p, s1, s2, tol, apex_edge))
    return rep
