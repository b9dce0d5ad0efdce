from __future__ import annotations

import json
import math

import networkx as nx
import numpy as np
import pytest

from pathspex.errors import BudgetExceeded, InvalidInput, UnsupportedVariant
from pathspex.extremal import candidate, generic_free
from pathspex.graphcore import Graph, JoinSpec, Pattern, PathPartition, from_graph6, iter_partitions, realize
from pathspex.patterns import contains, in_class
from pathspex.search import (
    argmax_partitions,
    canonical_form,
    conjecture_candidate,
    conjecture_scan,
    iter_free_partitions,
    tiny_oracle,
)
from pathspex.spectral import spectral_radius


def brute_argmax(n, k, pat):
    best = None
    for p in iter_partitions(n - k):
        spec = JoinSpec(k, PathPartition(p))
        if pat is not None and contains(realize(spec), pat).found:
            continue
        r = spectral_radius(spec).rho
        if best is None or r > best[0] + 1e-9:
            best = (r, p)
    return best


def test_free_partition_pruning_is_complete():
    pat = Pattern.linear_forest(2, 3)
    test = lambda parts: generic_free(JoinSpec(1, PathPartition(parts)), pat)
    got = set(iter_free_partitions(10, test))
    want = {p for p in iter_partitions(10) if test(p)}
    assert got == want


@pytest.mark.parametrize("n,k,pat", [(12, 1, "P:6"), (12, 2, "P:7"), (11, 1, "tP:2,3"), (12, 2, "tP:2,4"),
                                       (10, 1, "Star:3,3"), (10, 2, "Book:2,4")])
def test_argmax_matches_brute_force(n, k, pat):
    from pathspex.graphcore import parse_pattern

    p = parse_pattern(pat)
    rep = argmax_partitions(n, k, p, "generic")
    want = brute_argmax(n, k, p)
    assert rep.best[0]["rho"] == pytest.approx(want[0], abs=1e-9)
    assert tuple(want[1]) in [tuple(b["partition"]) for b in rep.best]


def test_theorem_examples():
    rep = argmax_partitions(20, 1, Pattern.path(7), candidate=candidate("T1.i", 20, 1, 7))
    assert rep.best[0]["partition"] == [3] + [2] * 8
    assert rep.agreement["agrees"] and rep.agreement["best_is_candidate"]
    star = argmax_partitions(12, 1, Pattern.path(4))
    assert star.best[0]["partition"] == [1] * 11
    assert star.best[0]["rho"] == pytest.approx(math.sqrt(11), abs=1e-9)


@pytest.mark.parametrize("mode", ["structured", "generic"])
def test_two_paths_k2_against_candidate(mode):
    c = candidate("T4.ii", 14, 2, 4)
    rep = argmax_partitions(14, 2, Pattern.linear_forest(2, 4), mode, candidate=c)
    assert rep.best[0]["partition"] == [3] + [1] * 9
    assert rep.agreement["agrees"]


def test_structured_and_generic_modes_agree():
    for pat in (Pattern.path(6), Pattern.linear_forest(2, 3), Pattern.linear_forest(3, 3)):
        for k in (1, 2):
            a = argmax_partitions(13, k, pat, "structured").to_json()
            b = argmax_partitions(13, k, pat, "generic").to_json()
            a["problem"].pop("freeness_mode")
            b["problem"].pop("freeness_mode")
            assert a == b


def test_workers_do_not_change_result():
    a = argmax_partitions(24, 2, Pattern.linear_forest(2, 5), workers=1).to_json()
    b = argmax_partitions(24, 2, Pattern.linear_forest(2, 5), workers=2).to_json()
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)


def test_search_errors():
    with pytest.raises(BudgetExceeded):
        argmax_partitions(70, 1, Pattern.path(5))
    with pytest.raises(InvalidInput):
        argmax_partitions(1, 1, Pattern.path(5))
    with pytest.raises(InvalidInput):
        argmax_partitions(10, 1, Pattern.path(5), "sideways")
    with pytest.raises(UnsupportedVariant):
        argmax_partitions(10, 1, Pattern.book(2, 3), "structured")


def test_unconstrained_join_is_star_like():
    rep = argmax_partitions(10, 1, None)
    assert rep.best[0]["partition"] == [9]


def test_conjecture_candidates():
    assert list(conjecture_candidate("P1", 15, 3).partition.parts) == [4] + [1] * 10
    assert list(conjecture_candidate("P2", 15, 3).partition.parts) == [2] + [1] * 11
    with pytest.raises(InvalidInput):
        conjecture_candidate("P9", 15, 3)


def test_conjecture_scan_rows():
    rep = conjecture_scan("P1", 3, [15, 16])
    assert [r["n"] for r in rep.rows] == [15, 16]
    for r in rep.rows:
        assert r["candidate_free"]
        assert r["rho"] >= r["candidate_rho"] - 1e-9
    assert rep.agreement["rows"] == 2


# -- whole graph space ---------------------------------------------------------------


def test_oracle_outerplanar_p4_is_star():
    rep = tiny_oracle(6, "outerplanar", Pattern.path(4))
    assert len(rep.best) == 1
    g = from_graph6(rep.best[0]["graph6"])
    assert sorted(g.degrees()) == [1] * 5 + [5]
    assert rep.best[0]["rho"] == pytest.approx(math.sqrt(5), abs=1e-9)


def test_oracle_planar_five():
    rep = tiny_oracle(5, "planar", None)
    g = from_graph6(rep.best[0]["graph6"])
    assert g.m == 9  # K_5 minus an edge, the maximal planar graph on 5 vertices
    lab = tiny_oracle(5, "planar", None, method="labeled")
    assert lab.best == rep.best
    assert lab.explored == 1023


def test_oracle_outerplanar_six_beats_fan():
    # a triangle with an ear on each side: rho x = 2x + 2y, rho y = 2x gives 1 + sqrt(5)
    rep = tiny_oracle(6, "outerplanar", None)
    assert [b["rho"] for b in rep.best] == [pytest.approx(1 + math.sqrt(5), abs=1e-9)]
    sun = Graph.from_edges(6, [(0, 1), (1, 2), (2, 0), (0, 3), (1, 3), (1, 4), (2, 4), (2, 5), (0, 5)])
    assert nx.is_isomorphic(from_graph6(rep.best[0]["graph6"]).to_networkx(), sun.to_networkx())
    assert spectral_radius(JoinSpec(1, PathPartition([5]))).rho < rep.best[0]["rho"]


def test_canonical_form_is_label_free():
    g = realize(JoinSpec(2, PathPartition([3, 2, 1])))
    rng = np.random.default_rng(5)
    for _ in range(5):
        perm = rng.permutation(g.n)
        h = Graph.from_edges(g.n, [(int(perm[u]), int(perm[v])) for u, v in g.edges()])
        assert canonical_form(h) == canonical_form(g)


@pytest.mark.parametrize("n,cls,pat", [(5, "outerplanar", None), (6, "planar", Pattern.path(5)),
                                         (6, "all", Pattern.linear_forest(2, 3))])
def test_labeled_matches_atlas(n, cls, pat):
    a = tiny_oracle(n, cls, pat, method="atlas")
    b = tiny_oracle(n, cls, pat, method="labeled")
    assert a.best == b.best


def test_extension_matches_atlas_at_seven():
    a = tiny_oracle(7, "outerplanar", Pattern.path(5), method="atlas")
    b = tiny_oracle(7, "outerplanar", Pattern.path(5), method="extend")
    assert a.best == b.best


def test_oracle_n8_with_checkpoint(tmp_path):
    ck = tmp_path / "scan.json"
    rep = tiny_oracle(8, "planar", Pattern.path(5), checkpoint=ck, block_size=64)
    # K_4 plus any graph on four vertices: all eleven tie at rho = 3
    assert len(rep.best) == 11 and all(b["rho"] == 3.0 for b in rep.best)
    for b in rep.best:
        g = from_graph6(b["graph6"])
        assert in_class(g, "planar") and not contains(g, Pattern.path(5)).found
    again = tiny_oracle(8, "planar", Pattern.path(5), checkpoint=ck, block_size=64)
    assert again.best == rep.best and again.explored == rep.explored
    with pytest.raises(InvalidInput):
        tiny_oracle(8, "outerplanar", Pattern.path(5), checkpoint=ck, block_size=64)


def test_oracle_limits():
    with pytest.raises(BudgetExceeded):
        tiny_oracle(9, "planar", None)
    with pytest.raises(BudgetExceeded):
        tiny_oracle(7, "planar", None, method="labeled")
    with pytest.raises(InvalidInput):
        tiny_oracle(5, "toroidal", None)


def test_dense_rho_matches_solver():
    rep = tiny_oracle(7, "planar", None)
    g = from_graph6(rep.best[0]["graph6"])
    assert rep.best[0]["rho"] == pytest.approx(float(np.linalg.eigvalsh(g.adjacency_matrix())[-1]), abs=1e-9)
    assert g.m == 15
