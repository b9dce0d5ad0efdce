"""Extremal candidates and structured freeness predicates for join graphs.

A join ``K_k ∨ H`` with ``H`` a union of paths is described by its path
orders alone, so freeness of path-like patterns reduces to inequalities on
the largest parts. The predicates here evaluate those inequalities; each
is held to :func:`pathspex.patterns.contains` by the test-suite.

Counting disjoint ``l``-paths
-----------------------------
Copies that avoid the apexes live inside single paths, ``sum(n_i // l)``
of them. Each apex can join at most one more copy, built from end segments
of paths. Donating ``d`` end vertices of ``P_{n_i}`` is free while
``d <= n_i % l`` and costs one internal copy while ``d <= n_i % l + l``.
With paths treated as bins of capacity ``n_i % l`` holding at most two
segments, the extra copies are decided by a small flow feasibility check
on the four largest residues (:func:`max_disjoint_paths`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from typing import Callable

from .errors import InvalidInput, UnsupportedCase, UnsupportedVariant
from .graphcore import JoinSpec, PathPartition, Pattern, h_op, h_p, h_p3, realize

FREE = "Free"
NOT_FREE = "NotFree"
NECESSARY_ONLY = "NecessaryOnly"


@dataclass(frozen=True)
class Freeness:
    """Tri-state answer. ``NecessaryOnly`` reports a bound and is never a certificate."""

    status: str
    variant: str
    bound_holds: bool | None = None

    @property
    def is_free(self) -> bool | None:
        if self.status == NECESSARY_ONLY:
            # a violated necessary bound still proves containment
            return False if self.bound_holds is False else None
        return self.status == FREE

    def to_json(self) -> dict:
        out = {"status": self.status, "variant": self.variant}
        if self.status == NECESSARY_ONLY:
            out["bound_holds"] = self.bound_holds
        return out

    def __str__(self) -> str:
        if self.status == NECESSARY_ONLY:
            return f"NecessaryOnly({str(self.bound_holds).lower()})"
        return self.status


# -- exact counting ---------------------------------------------------------


def _two_copies_fit(caps: list[int], demand: int) -> bool:
    """Two disjoint demands of ``demand`` vertices, each drawn from at most two bins."""
    idx = range(len(caps))
    choices = [c for r in (1, 2) for c in combinations(idx, r)]
    for b1 in choices:
        if sum(caps[i] for i in b1) < demand:
            continue
        for b2 in choices:
            if sum(caps[i] for i in b2) < demand:
                continue
            if sum(caps[i] for i in set(b1) | set(b2)) >= 2 * demand:
                return True
    return False


def max_disjoint_paths(apex_k: int, p: PathPartition | tuple[int, ...], l: int, apex_edge: bool = True) -> int:
    """Maximum number of vertex-disjoint ``P_l`` in ``K_k ∨ (∪ P_{n_i})``."""
    if l < 1:
        raise InvalidInput("path order must be >= 1")
    parts = tuple(p)
    if l == 1:
        return sum(parts) + apex_k
    inner = sum(x // l for x in parts)
    res = sorted((x % l for x in parts), reverse=True)[:4]
    res += [0] * (4 - len(res))
    one_more = res[0] + res[1] >= l - 1
    if apex_k == 1:
        return inner + int(one_more)
    if _two_copies_fit(res, l - 1):
        return inner + 2
    # a copy through both apexes uses up to three segments; without the
    # apex edge the middle segment must be non-empty, impossible for l = 2
    if res[0] + res[1] + res[2] >= l - 2 and (apex_edge or l >= 3):
        one_more = True
    if not one_more:
        for i, x in enumerate(parts):
            if x < l:
                continue
            others = sorted((y % l for j, y in enumerate(parts) if j != i), reverse=True)[:4]
            if _two_copies_fit([x % l + l] + others, l - 1):
                one_more = True
                break
    return inner + int(one_more)


def longest_path_in_join(apex_k: int, p: PathPartition | tuple[int, ...]) -> int:
    """Order of a longest path in ``K_k ∨ H``: the ``k+1`` longest paths strung through the apexes."""
    parts = sorted(p, reverse=True)
    return apex_k + sum(parts[: apex_k + 1])


# -- structured predicates ----------------------------------------------------


def _path_k1(p, l):
    return p.top(1) + p.top(2) <= l - 2


def _path_k2(p, l):
    return p.top(1) + p.top(2) + p.top(3) <= l - 3


def _two_paths_short(p, l):
    """2P_l-freeness of K_2 ∨ H when every path is shorter than l."""
    n1, n2, n3, n4 = (p.top(i) for i in (1, 2, 3, 4))
    contains = n2 + n4 >= l - 1 or (n2 + n3 >= l - 1 and (n1 + n2 + n3 >= 2 * l - 2 or n1 + n4 >= l - 1))
    return not contains


def _two_paths_short_published(p, l):
    return p.top(1) + p.top(2) + p.top(3) <= 2 * l - 3 and p.top(3) + p.top(4) <= l - 2


def _split_k2(p, l, published=False):
    nb = p.top(1) - l
    a = nb + p.top(2) + p.top(3) <= l - 3
    b = p.top(2) + p.top(3) + p.top(4) <= l - 3
    return (a or b) if published else (a and b)


def _split_k1(p, t, l, published=False):
    nb = p.top(1) - (t - 1) * l - (1 if published else 0)
    a = nb + p.top(2) <= l - 2
    b = p.top(2) + p.top(3) <= l - 2
    return (a or b) if published else (a and b)


def _two_paths_k2(p, l):
    r = p.top(1) // l
    if r == 0:
        return _two_paths_short(p, l)
    if r == 1:
        return _split_k2(p, l)
    return False


def _starlike_apex_centre(apex_k, p, t, l):
    """Starlike freeness when only an apex has degree >= t (k=1, t>=4 or k=2, t>=5)."""
    leg = l - 1
    if apex_k == 1:
        return sum(x // leg for x in p) < t
    return max_disjoint_paths(1, p, leg) < t


VARIANTS: dict[str, str] = {
    "count": "exact disjoint-path count, any k, Path or LinearForest",
    "path-k1": "n1+n2 <= l-2 (k=1, Path)",
    "path-k2": "n1+n2+n3 <= l-3 (k=2, Path)",
    "2pl-k2": "2P_l with k=2, dispatched on the number r of l-paths inside the longest path",
    "2pl-k2-short": "2P_l, k=2, n1 <= l-1: corrected pairing rule",
    "2pl-k2-short-published": "2P_l, k=2, n1 <= l-1: n1+n2+n3 <= 2l-3 and n3+n4 <= l-2 as published",
    "2pl-k2-split": "2P_l, k=2, l <= n1 < 2l: (n1-l)+n2+n3 <= l-3 and n2+n3+n4 <= l-3",
    "2pl-k2-split-published": "2P_l, k=2, l <= n1 < 2l: the same two bounds joined by 'or'",
    "tpl-k1-split": "tP_l, k=1, floor(n1/l) = t-1: (n1-(t-1)l)+n2 <= l-2 and n2+n3 <= l-2",
    "tpl-k1-split-published": "tP_l, k=1, floor(n1/l) = t-1: (n1-(t-1)l-1)+n2 <= l-2 or n2+n3 <= l-2",
    "tpl-k1-bound": "necessary only: n1+n2 <= tl-2 (k=1)",
    "tpl-k2-bound": "necessary only: n1+n2+n3 <= tl-3 (k=2)",
    "tpl-k2-bound-published": "necessary only: n1+2n2 <= tl-3 (k=2) as published",
    "starlike-apex": "starlike with t large enough that only an apex can be the centre",
}


def _as_path_count(pattern: Pattern) -> tuple[int, int] | None:
    """``(t, l)`` if the pattern is t disjoint l-paths (a starlike with t <= 2 is one path)."""
    if pattern.kind == "Path":
        return 1, pattern.l
    if pattern.kind == "LinearForest":
        return pattern.t, pattern.l
    if pattern.kind == "Starlike" and pattern.t <= 2:
        return 1, pattern.order
    return None


def default_variant(apex_k: int, pattern: Pattern) -> str:
    tl = _as_path_count(pattern)
    if tl is not None:
        t, _ = tl
        if t == 1:
            return "path-k1" if apex_k == 1 else "path-k2"
        if apex_k == 2 and t == 2:
            return "2pl-k2"
        return "count"
    if pattern.kind == "Starlike" and pattern.t >= (4 if apex_k == 1 else 5):
        return "starlike-apex"
    raise UnsupportedVariant(f"no structured predicate for {pattern} with {apex_k} apex(es)")


def structured_free(apex_k: int, p: PathPartition | tuple[int, ...], pattern: Pattern, variant: str = "auto", apex_edge: bool = True) -> Freeness:
    """Decide freeness of ``pattern`` in ``K_k ∨ H`` from the path orders of ``H``."""
    if apex_k not in (1, 2):
        raise InvalidInput("apex_k must be 1 or 2")
    if not isinstance(p, PathPartition):
        p = PathPartition(p)
    if variant == "auto":
        variant = default_variant(apex_k, pattern)
    if variant not in VARIANTS:
        raise UnsupportedVariant(f"unknown variant {variant!r}; choose from {sorted(VARIANTS)}")

    def bad(why):
        return UnsupportedVariant(f"variant {variant} does not apply to {pattern} with k={apex_k}: {why}")

    if variant == "starlike-apex":
        if pattern.kind != "Starlike" or pattern.t < (4 if apex_k == 1 else 5):
            raise bad("needs a starlike with t >= 4 (k=1) or t >= 5 (k=2)")
        if apex_k == 2 and not apex_edge and pattern.l < 3:
            raise bad("needs the apex edge when l = 2")
        ok = _starlike_apex_centre(apex_k, p, pattern.t, pattern.l)
        return Freeness(FREE if ok else NOT_FREE, variant)

    tl = _as_path_count(pattern)
    if tl is None:
        raise bad("pattern is not a union of equal paths")
    t, l = tl

    if variant == "count":
        ok = max_disjoint_paths(apex_k, p, l, apex_edge) < t
        return Freeness(FREE if ok else NOT_FREE, variant)

    needs_k = {"path-k1": 1, "tpl-k1-split": 1, "tpl-k1-split-published": 1, "tpl-k1-bound": 1}
    k_req = needs_k.get(variant, 2)
    if apex_k != k_req:
        raise bad(f"needs k={k_req}")

    if variant.startswith("path-"):
        if t != 1:
            raise bad("needs a single path")
        ok = _path_k1(p, l) if apex_k == 1 else _path_k2(p, l)
        return Freeness(FREE if ok else NOT_FREE, variant)

    if variant.endswith("-bound") or variant.endswith("-bound-published"):
        if variant == "tpl-k1-bound":
            holds = p.top(1) + p.top(2) <= t * l - 2
        elif variant == "tpl-k2-bound":
            holds = p.top(1) + p.top(2) + p.top(3) <= t * l - 3
        else:
            holds = p.top(1) + 2 * p.top(2) <= t * l - 3
        return Freeness(NECESSARY_ONLY, variant, holds)

    if variant.startswith("2pl-"):
        if t != 2:
            raise bad("needs t = 2")
        r = p.top(1) // l
        if variant == "2pl-k2":
            ok = _two_paths_k2(p, l)
        elif variant.startswith("2pl-k2-short"):
            if r != 0:
                raise bad("needs n1 <= l-1")
            ok = _two_paths_short_published(p, l) if variant.endswith("published") else _two_paths_short(p, l)
        else:
            if r != 1:
                raise bad("needs l <= n1 < 2l")
            ok = _split_k2(p, l, published=variant.endswith("published"))
        return Freeness(FREE if ok else NOT_FREE, variant)

    # tpl-k1-split*
    if p.top(1) // l != t - 1:
        raise bad("needs floor(n1/l) = t-1")
    ok = _split_k1(p, t, l, published=variant.endswith("published"))
    return Freeness(FREE if ok else NOT_FREE, variant)


# -- generic arm on join graphs ------------------------------------------------


def compressed_host(spec: JoinSpec, order: int) -> JoinSpec:
    """Smallest join with the same containment answers for patterns of ``order`` vertices.

    A pattern copy meets at most ``order`` paths and at most ``order``
    vertices of any one path, so paths are capped at ``order`` vertices and
    each path order is kept at most ``order`` times.
    """
    kept: list[int] = []
    seen: dict[int, int] = {}
    for x in spec.partition:
        x = min(x, order)
        if seen.get(x, 0) < order:
            seen[x] = seen.get(x, 0) + 1
            kept.append(x)
    return JoinSpec(spec.apex_k, PathPartition(kept), spec.apex_edge)


@lru_cache(maxsize=200_000)
def _generic_free_cached(apex_k: int, apex_edge: bool, parts: tuple[int, ...], pattern: Pattern, engine: str) -> bool:
    from .patterns import contains

    g = realize(JoinSpec(apex_k, PathPartition(parts), apex_edge))
    return not contains(g, pattern, engine).found


def generic_free(spec: JoinSpec, pattern: Pattern, engine: str = "auto") -> bool:
    """Exact freeness on the realized join, after :func:`compressed_host`."""
    host = compressed_host(spec, pattern.order)
    return _generic_free_cached(host.apex_k, host.apex_edge, host.partition.parts, pattern, engine)


# -- candidates ---------------------------------------------------------------


@dataclass(frozen=True)
class CandidateSpec:
    theorem: str
    n: int
    t: int
    l: int
    spec: JoinSpec
    pattern: Pattern
    graph_class: str
    leading: tuple[int, ...]
    variant: str = "statement"
    threshold: float = field(default=math.nan, compare=False)

    def to_json(self) -> dict:
        return {
            "theorem": self.theorem,
            "params": {"n": self.n, "t": self.t, "l": self.l},
            "pattern": str(self.pattern),
            "class": self.graph_class,
            "leading": list(self.leading),
            "variant": self.variant,
            "partition": list(self.spec.partition.parts),
            "spec": self.spec.to_json(),
            "threshold": self.threshold,
        }


def _fl(a, b):
    return a // b


def _cl(a, b):
    return -((-a) // b)


def _thr_t1(t, l, extra):
    n0 = max(1.27e7, 6.5025 * 2.0 ** ((t - 1) * (l - 1) + l))
    return max(n0, extra)


def _thr_t2(t, l):
    big = max(1.27e7, 6.5025 * 2.0 ** (t * l), (5.08 * _fl(l - 2, 2)) ** 2 + 1)
    return big + 1.5 + 3 * math.sqrt(big - 1.75)


def _thr_t3(t, l, q):
    n0 = max(2.67 * 9.0**17, 10.2 * 2.0 ** ((t - 1) * (l - 1) + l - 3) + 2)
    return max(n0, 625 / 32 * q**2 + 2)


def _thr_t4(t, l, q):
    n0 = max(2.67 * 9.0**17, 10.2 * 2.0 ** (t * l - 3) + 2)
    big = max(n0, 625 / 32 * q**2 + 2)
    return big + 1.5 * math.sqrt(2 * big - 6)


@dataclass(frozen=True)
class _Rule:
    apex_k: int
    graph_class: str
    kind: str
    t_ok: Callable[[int], bool]
    t_text: str
    l_min: int
    leading: Callable[[int, int], tuple[int, ...]]
    threshold: Callable[[int, int], float]


THEOREMS: dict[str, _Rule] = {
    "T1.i": _Rule(1, "outerplanar", "Starlike", lambda t: t == 1, "t=1", 4,
                  lambda t, l: (_cl(l - 2, 2), _fl(l - 2, 2)),
                  lambda t, l: _thr_t1(t, l, (5.08 * _fl(l - 2, 2)) ** 2 + 1)),
    "T1.ii": _Rule(1, "outerplanar", "Starlike", lambda t: t == 2, "t=2", 3,
                   lambda t, l: (_cl(2 * l - 3, 2), _fl(2 * l - 3, 2)),
                   lambda t, l: _thr_t1(t, l, (5.08 * _fl(2 * l - 3, 2)) ** 2 + 1)),
    "T1.iii": _Rule(1, "outerplanar", "Starlike", lambda t: t >= 4, "t>=4", 3,
                    lambda t, l: (t * l - t - 1, l - 2),
                    lambda t, l: _thr_t1(t, l, 0)),
    "T2.i": _Rule(1, "outerplanar", "LinearForest", lambda t: t == 1, "t=1", 4,
                  lambda t, l: (_cl(l - 2, 2), _fl(l - 2, 2)),
                  _thr_t2),
    "T2.ii": _Rule(1, "outerplanar", "LinearForest", lambda t: t >= 2, "t>=2", 3,
                   lambda t, l: (t * l - l - 1, l - 1),
                   _thr_t2),
    "T3.i": _Rule(2, "planar", "Starlike", lambda t: t == 1, "t=1", 6,
                  lambda t, l: (l - 3 - 2 * _fl(l - 3, 3), _fl(l - 3, 3)),
                  lambda t, l: _thr_t3(t, l, _fl(l - 3, 3))),
    "T3.ii": _Rule(2, "planar", "Starlike", lambda t: t == 2, "t=2", 4,
                   lambda t, l: (2 * l - 4 - 2 * _fl(2 * l - 4, 3), _fl(2 * l - 4, 3)),
                   lambda t, l: _thr_t3(t, l, _fl(2 * l - 4, 3))),
    "T3.iii": _Rule(2, "planar", "Starlike", lambda t: t >= 5, "t>=5", 3,
                    lambda t, l: (t * l - t - l, l - 2),
                    lambda t, l: _thr_t3(t, l, _fl(l - 3, 2))),
    "T4.i": _Rule(2, "planar", "LinearForest", lambda t: t == 1, "t=1", 6,
                  lambda t, l: (l - 3 - 2 * _fl(l - 3, 3), _fl(l - 3, 3)),
                  lambda t, l: _thr_t4(t, l, _fl(l - 3, 3))),
    "T4.ii": _Rule(2, "planar", "LinearForest", lambda t: t == 2, "t=2", 4,
                   lambda t, l: (l - 1, _cl(l - 2, 2), _fl(l - 2, 2)),
                   lambda t, l: _thr_t4(t, l, _fl(l - 2, 2))),
    "T4.iii": _Rule(2, "planar", "LinearForest", lambda t: t >= 3, "t>=3", 3,
                    lambda t, l: (t * l - 2 * l - 1, l - 1),
                    lambda t, l: _thr_t4(t, l, _fl(l - 2, 2) + 1)),
}

# the t values no theorem covers, per family
_OPEN = {("T1", 3): "outerplanar starlike with t=3", ("T3", 3): "planar starlike with t=3", ("T3", 4): "planar starlike with t=4"}

CANDIDATE_VARIANTS = ("statement", "proof-text")


def theorem_pattern(kind: str, t: int, l: int) -> Pattern:
    if kind == "LinearForest":
        return Pattern.path(l) if t == 1 else Pattern.linear_forest(t, l)
    return Pattern.starlike(t, l)


def candidate(theorem: str, n: int, t: int, l: int, variant: str = "statement") -> CandidateSpec:
    """The extremal join predicted for ``(n, t, l)`` by one theorem part.

    ``variant="proof-text"`` is accepted for ``T3.ii`` only and gives
    ``K_2 ∨ H_P(l-2, l-2)``, the graph its proof paragraph ends with.
    The n-thresholds are reported as metadata and never enforced.
    """
    if theorem not in THEOREMS:
        raise InvalidInput(f"unknown theorem {theorem!r}; choose from {list(THEOREMS)}")
    if variant not in CANDIDATE_VARIANTS:
        raise UnsupportedVariant(f"unknown candidate variant {variant!r}")
    if variant == "proof-text" and theorem != "T3.ii":
        raise UnsupportedVariant("the proof-text variant exists for T3.ii only")
    rule = THEOREMS[theorem]
    family = theorem.split(".")[0]
    if (family, t) in _OPEN:
        raise UnsupportedCase(f"{theorem}: {_OPEN[family, t]} is left open; see conjecture scans")
    if t < 1 or not rule.t_ok(t):
        raise UnsupportedCase(f"{theorem} needs {rule.t_text}, got t={t}")
    if l < rule.l_min:
        raise UnsupportedCase(f"{theorem} needs l >= {rule.l_min}, got l={l}")
    leading = (l - 2, l - 2) if variant == "proof-text" else rule.leading(t, l)
    if len(leading) == 3:
        part = h_p3(n, *leading)
    elif rule.apex_k == 1:
        part = h_op(n, *leading)
    else:
        part = h_p(n, *leading)
    spec = JoinSpec(rule.apex_k, part, apex_edge=True)
    return CandidateSpec(theorem, n, t, l, spec, theorem_pattern(rule.kind, t, l), rule.graph_class,
                         tuple(leading), variant, rule.threshold(t, l))


def verify_candidate(c: CandidateSpec, generic_max_n: int = 40, tol: float | None = None) -> dict:
    """Run the structured and generic freeness arms, the solver and the class checks."""
    from . import spectral
    from .patterns import BACKTRACK_MAX_N, in_class

    struct = structured_free(c.spec.apex_k, c.spec.partition, c.pattern)
    host = compressed_host(c.spec, c.pattern.order)
    budget = min(generic_max_n, BACKTRACK_MAX_N)
    gen = generic_free(c.spec, c.pattern) if host.n <= budget else None
    res = spectral.spectral_radius(c.spec, **({"tol": tol} if tol else {}))
    if c.spec.apex_k == 1:
        bound = spectral.outerplanar_bound(c.n)
    else:
        bound = spectral.planar_bound(c.n)
    class_ok = in_class(realize(c.spec), c.graph_class)
    return {
        "theorem": c.theorem,
        "params": {"n": c.n, "t": c.t, "l": c.l},
        "variant": c.variant,
        "pattern": str(c.pattern),
        "partition": list(c.spec.partition.parts),
        "rho": res.rho,
        "structured_free": str(struct),
        "generic_free": gen,
        "generic_host_n": host.n,
        "bound": bound,
        "bounds_ok": bool(res.rho <= bound + 1e-9),
        "class_ok": class_ok,
        "threshold": c.threshold,
    }
