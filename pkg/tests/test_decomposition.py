"""Oriented and central class partitions and their cardinality lemmas."""

import json
from fractions import Fraction

import pytest

from flipwalk.combinatorics import catalan
from flipwalk.decomposition import (
    boundary_matchings,
    boundary_projection,
    central_face,
    central_partition,
    classify_edges,
    face_contains_center,
    oriented_partition,
    partition_to_json,
    verify_class_product_structure,
    verify_matching_inequality,
)
from flipwalk.errors import InvalidParameterError
from flipwalk.kangulation import build_flip_graph


def _graph(k, n, _cache={}):
    if (k, n) not in _cache:
        _cache[(k, n)] = build_flip_graph(k, n)
    return _cache[(k, n)]


def test_oriented_k5_has_five_classes_with_catalan_sizes():
    p = oriented_partition(_graph(3, 5))
    assert len(p.classes) == 5
    sizes = [c.size for c in p.classes]
    assert sizes == [catalan(a - 1) * catalan(5 - a) for a in range(1, 6)]


def test_oriented_k2_singletons():
    p = oriented_partition(_graph(3, 2))
    assert [c.size for c in p.classes] == [1, 1]


def test_oriented_requires_k3():
    with pytest.raises(InvalidParameterError):
        oriented_partition(_graph(4, 2))


def test_partition_covers_all_vertices():
    for k, n in [(3, 5), (3, 6), (4, 3)]:
        g = _graph(k, n)
        p = central_partition(g)
        assert sum(c.size for c in p.classes) == g.num_vertices
        assert all(vc >= 0 for vc in p.vertex_class)


def test_matching_sizes_are_triple_catalan_products():
    g = _graph(3, 6)
    p = oriented_partition(g)
    for bm in boundary_matchings(p):
        a = p.classes[bm.class_a].defining_polygon[1]
        b = p.classes[bm.class_b].defining_polygon[1]
        assert bm.size == catalan(a - 1) * catalan(b - a - 1) * catalan(6 - b)


def test_oriented_k2_single_matching_edge():
    p = oriented_partition(_graph(3, 2))
    bms = boundary_matchings(p)
    assert len(bms) == 1 and bms[0].size == 1


def test_matching_inequality_k5_and_k2():
    for n in (2, 5):
        report = verify_matching_inequality(oriented_partition(_graph(3, n)))
        assert report["ok"]
        assert report["min_slack_ratio"] <= 1


def test_matching_inequality_worst_pair_k10():
    report = verify_matching_inequality(oriented_partition(_graph(3, 10)))
    p = oriented_partition(_graph(3, 10))
    a, b = report["min_slack_pair"]
    apexes = {p.classes[a].defining_polygon[1], p.classes[b].defining_polygon[1]}
    assert apexes == {1, 10}
    assert report["min_slack_ratio"] == Fraction(
        catalan(9) ** 2, catalan(8) * catalan(10)
    )


def test_center_containment_odd_polygon_no_ties():
    # m odd: no diagonal is a diameter, so the arc test alone decides
    m = 7
    assert face_contains_center((0, 2, 5), m)
    assert not face_contains_center((0, 1, 2), m)


def test_central_partition_square_tie_break():
    g = _graph(3, 2)
    p = central_partition(g)
    assert sorted(c.defining_polygon for c in p.classes) == [(0, 1, 2), (0, 1, 3)]


def test_central_face_unique_per_vertex():
    for t in _graph(3, 6).vertices:
        central_face(t)  # raises if not unique


def test_central_k44_class_factors_bounded():
    g = _graph(4, 4)
    p = central_partition(g)
    for c in p.classes:
        assert c.size == c.expected_size()
        for _, ni in c.cartesian_factors:
            assert ni <= 2  # n/2
        assert len(c.cartesian_factors) == 4


def _expected_central_match(t1, t2, m, k):
    """Independent oracle for |E(T, T')| between central k-gon classes:
    sum, over the 2k-2-gons having T and T' as halves on distinct main
    diagonals, of the Fuss-Catalan products over the 2k-2-gon's arcs."""
    from itertools import combinations

    from flipwalk.combinatorics import fuss_catalan as fc

    total = 0
    size = 2 * k - 2
    for hexa in combinations(range(m), size):
        arcs = [
            (hexa[(i + 1) % size] - hexa[i]) % m for i in range(size)
        ]
        if any((ln - 1) % (k - 2) for ln in arcs):
            continue
        halves = {}
        for i in range(k - 1):
            d = (hexa[i], hexa[i + k - 1])
            h1 = tuple(sorted(hexa[i : i + k]))
            h2 = tuple(sorted(hexa[i + k - 1 :] + hexa[: i + 1]))
            halves[d] = (h1, h2)
        d1 = [d for d, hs in halves.items() if t1 in hs]
        d2 = [d for d, hs in halves.items() if t2 in hs]
        if d1 and d2 and d1 != d2:
            prod = 1
            for ln in arcs:
                prod *= fc(k, (ln - 1) // (k - 2))
            total += prod
    return total


def test_central_k44_matching_sizes_match_hexagon_products():
    g = _graph(4, 4)
    p = central_partition(g)
    m = g.m
    checked_nonempty = 0
    for bm in boundary_matchings(p):
        t1 = tuple(p.classes[bm.class_a].defining_polygon)
        t2 = tuple(p.classes[bm.class_b].defining_polygon)
        assert bm.size == _expected_central_match(t1, t2, m, 4)
        checked_nonempty += bool(bm.size)
    assert checked_nonempty > 0


def test_central_records_empty_pairs():
    g = _graph(4, 4)
    p = central_partition(g)
    bms = boundary_matchings(p)
    k = len(p.classes)
    assert len(bms) == k * (k - 1) // 2
    assert any(bm.size == 0 for bm in bms)


def test_edge_classification_covers_all_edges():
    for kind, part in [
        ("oriented", oriented_partition(_graph(3, 5))),
        ("central", central_partition(_graph(3, 5))),
    ]:
        counts = classify_edges(part)
        assert counts["intra"] + counts["cross"] == counts["total"], kind


def test_class_product_structure():
    verify_class_product_structure(oriented_partition(_graph(3, 6)))
    verify_class_product_structure(central_partition(_graph(3, 6)))
    verify_class_product_structure(central_partition(_graph(4, 4)))


def test_boundary_projection_all_pairs_k5():
    p = oriented_partition(_graph(3, 5))
    for a in range(5):
        for b in range(5):
            if a == b:
                continue
            fi, sub = boundary_projection(p, a, b)
            apex_a = p.classes[a].defining_polygon[1]
            apex_b = p.classes[b].defining_polygon[1]
            assert fi == (1 if apex_b > apex_a else 0)
            assert sub["boundary_size"] > 0


def test_boundary_projection_shared_left_diagonal_targets_right_factor():
    # classes with apex_b > apex_a share the left side of T; the boundary
    # constrains the right sub-polygon's factor
    p = oriented_partition(_graph(3, 6))
    fi, sub = boundary_projection(p, 1, 4)
    assert fi == 1
    assert sub["factor_n"] == 6 - 2  # right factor of the apex-2 class


def test_boundary_projection_trivial_n2():
    p = oriented_partition(_graph(3, 2))
    fi, sub = boundary_projection(p, 0, 1)
    assert sub["boundary_size"] == 1 and sub["size"] == 1


def test_partition_json_export():
    p = oriented_partition(_graph(3, 4))
    doc = json.loads(partition_to_json(p))
    assert doc["kind"] == "oriented" and len(doc["classes"]) == 4
    assert all("edges" not in m for m in doc["matchings"])
    doc_full = json.loads(partition_to_json(p, full_edge_lists=True))
    assert all("edges" in m for m in doc_full["matchings"])
    assert sum(len(m["edges"]) for m in doc_full["matchings"]) == sum(
        m["size"] for m in doc["matchings"]
    )


def test_central_factor_bound_k3():
    # no central-class factor exceeds n/2
    g = _graph(3, 6)
    for c in central_partition(g).classes:
        for _, ni in c.cartesian_factors:
            assert ni <= 3
