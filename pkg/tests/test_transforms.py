from __future__ import annotations

from collections import deque

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pathspex.errors import InvalidEdit, InvalidInput, MissingPart
from pathspex.graphcore import JoinSpec, PathPartition, h_op, iter_partitions, realize
from pathspex.patterns import is_planar
from pathspex.spectral import DEFAULT_TOL, spectral_radius
from pathspex.transforms import (
    EditScript,
    apply_edits,
    base_partition,
    compare_transform,
    parse_grid,
    perturbation_lower_bound,
    s_transform,
    spread_rewiring,
    transform_scan,
)


@pytest.mark.parametrize("parts,s1,s2,out", [([3, 2], 3, 2, [4, 1]), ([4, 3, 1], 4, 1, [5, 3]),
                                             ([2, 2, 2], 2, 2, [3, 2, 1])])
def test_s_transform(parts, s1, s2, out):
    assert list(s_transform(PathPartition(parts), s1, s2).parts) == out


def test_s_transform_errors():
    with pytest.raises(MissingPart):
        s_transform(PathPartition([29]), 2, 1)
    with pytest.raises(MissingPart):
        s_transform(PathPartition([2, 1]), 2, 2)
    with pytest.raises(InvalidInput):
        s_transform(PathPartition([2, 3]), 2, 3)


def _moves(p):
    parts = sorted(set(p), reverse=True)
    for i, s1 in enumerate(parts):
        for s2 in parts[i:]:
            try:
                yield tuple(s_transform(PathPartition(p), s1, s2).parts)
            except MissingPart:
                pass


@pytest.mark.parametrize("m", range(1, 13))
def test_transform_chain_reachability(m):
    everything = set(iter_partitions(m))
    # forward from the all-ones partition reaches every partition
    seen, todo = {(1,) * m}, deque([(1,) * m])
    adj = {p: set() for p in everything}
    while todo:
        p = todo.popleft()
        for q in _moves(p):
            adj[p].add(q)
            adj[q].add(p)
            if q not in seen:
                seen.add(q)
                todo.append(q)
    assert seen == everything
    # and moves plus their inverses connect every pair
    comp, todo = {(m,)}, deque([(m,)])
    while todo:
        for q in adj[todo.popleft()]:
            if q not in comp:
                comp.add(q)
                todo.append(q)
    assert comp == everything


def test_compare_examples():
    c = compare_transform(50, 1, PathPartition([2] * 24 + [1]), 2, 1)
    assert c.delta > 0
    c = compare_transform(50, 2, PathPartition([3] + [2] * 22 + [1]), 3, 1)
    assert c.delta > 0
    assert c.to_json()["after"] == [4] + [2] * 22
    with pytest.raises(MissingPart):
        compare_transform(30, 1, PathPartition([29]), 2, 1)
    with pytest.raises(InvalidInput):
        compare_transform(31, 1, PathPartition([29]), 29, 1)


def test_edit_scripts():
    g = realize(JoinSpec(2, PathPartition([3, 3])))
    assert apply_edits(g, EditScript()) == g
    with pytest.raises(InvalidEdit):
        apply_edits(g, EditScript(deletions=[(2, 4)]))
    with pytest.raises(InvalidEdit):
        apply_edits(g, EditScript(additions=[(0, 2)]))
    # cut one path and reconnect it to the other path's end: still K_2 ∨ (paths)
    h = apply_edits(g, EditScript(deletions=[(3, 4)], additions=[(4, 5)]))
    assert h.m == g.m and is_planar(h)
    assert EditScript([(5, 1)]).deletions == ((1, 5),)


def test_perturbation_trivial():
    g = realize(JoinSpec(1, PathPartition([2, 2])))
    x = spectral_radius(g).vector
    assert perturbation_lower_bound(g, EditScript(), x) == 0.0
    e = EditScript(additions=[(2, 3)])
    lb = perturbation_lower_bound(g, e, x)
    after = spectral_radius(apply_edits(g, e)).rho
    assert lb > 0 and after > spectral_radius(g).rho
    with pytest.raises(InvalidInput):
        perturbation_lower_bound(g, e, [1.0])


def test_spread_rewiring_bound():
    for n in (40, 80, 200):
        spec = JoinSpec(1, h_op(n, 4, 2))
        g = realize(spec)
        e = spread_rewiring(spec)
        assert (len(e.deletions), len(e.additions)) == (2, 3)
        r = spectral_radius(g)
        lb = perturbation_lower_bound(g, e, r.vector)
        after = spectral_radius(apply_edits(g, e)).rho
        assert lb > 0
        assert after - r.rho >= lb - 10 * DEFAULT_TOL
    with pytest.raises(InvalidEdit):
        spread_rewiring(JoinSpec(1, PathPartition([4, 2])))


@settings(max_examples=50, deadline=None)
@given(st.sampled_from([1, 2]), st.lists(st.integers(1, 8), min_size=2, max_size=12), st.integers(0, 10_000))
def test_perturbation_is_lower_bound(k, parts, seed):
    g = realize(JoinSpec(k, PathPartition(parts)))
    rng = np.random.default_rng(seed)
    edges = g.edges()
    non = [(u, v) for u in range(g.n) for v in range(u + 1, g.n) if not g.has_edge(u, v)]
    dels = [edges[i] for i in rng.choice(len(edges), size=min(2, len(edges)), replace=False)]
    adds = [non[i] for i in rng.choice(len(non), size=min(2, len(non)), replace=False)] if non else []
    e = EditScript(dels, adds)
    r = spectral_radius(g)
    lb = perturbation_lower_bound(g, e, r.vector)
    after = spectral_radius(apply_edits(g, e)).rho
    assert lb <= after - r.rho + 10 * DEFAULT_TOL


def test_parse_grid():
    assert parse_grid("30:60:10") == [30, 40, 50, 60]
    assert parse_grid("5,7") == [5, 7]
    assert parse_grid("3:5") == [3, 4, 5]
    for bad in ("a:b", "1:5:0", "1:2:3:4"):
        with pytest.raises(InvalidInput):
            parse_grid(bad)


def test_base_partition():
    assert list(base_partition(12, 1, 3, 2).parts) == [3, 2] + [1] * 6
    assert list(base_partition(12, 1, 3, 2, "s2").parts) == [3, 2, 2, 2, 2]
    with pytest.raises(InvalidInput):
        base_partition(4, 1, 3, 2)
    with pytest.raises(InvalidInput):
        base_partition(12, 1, 3, 2, "zeros")


def test_scan_report():
    rep = transform_scan(1, 3, 2, parse_grid("30:200:10"))
    s = rep.summary()
    assert s["threshold"] == 30 and s["sign_changes"] == [] and s["points"] == 18
    assert s["min_delta_at_or_above_threshold"] > 0


def test_scan_small_n_threshold():
    # the first admissible n is s1 + s2 + k; the gain is already positive there
    rep = transform_scan(2, 5, 5, list(range(1, 30)), filler="ones")
    s = rep.summary()
    assert s["threshold"] == 12
    assert all(r.delta > 0 for r in rep.rows if r.n >= s["threshold"])
    assert set(s["sub_threshold_sign_changes"]) <= set(s["sign_changes"])


def test_scan_skips_tiny_n():
    assert transform_scan(1, 3, 2, [4, 5, 6]).summary()["points"] == 1
