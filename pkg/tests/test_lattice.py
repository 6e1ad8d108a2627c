"""Lattice triangulation flip graphs and the block product subgraph."""

import pytest

from flipwalk.errors import InvalidParameterError
from flipwalk.lattice import (
    LatticeTriangulation,
    block_partial_triangulation,
    canonical_lattice_triangulation,
    count_triangulations_recursive,
    enumerate_lattice,
    flips_lattice,
    product_subgraph,
)
from flipwalk.spectral import brute_force_expansion


def test_single_cell_two_triangulations():
    g = enumerate_lattice(2)
    assert g.num_vertices == 2
    assert g.num_edges() == 1
    for v in g.vertices:
        v.validate()


def test_degenerate_1x1():
    g = enumerate_lattice(1)
    assert g.num_vertices == 1 and g.num_edges() == 0


def test_single_cell_flip_swaps_diagonal():
    t = canonical_lattice_triangulation(2)
    out = flips_lattice(t)
    assert len(out) == 1
    nbr, removed, inserted = out[0]
    assert removed == ((0, 1), (1, 0))
    assert inserted == ((0, 0), (1, 1))


def test_triangle_count_identity():
    for n in (2, 3):
        for v in enumerate_lattice(n).vertices:
            assert len(v.triangles()) == 2 * (n - 1) ** 2


def test_bfs_and_recursive_oracles_agree_on_g3():
    g = enumerate_lattice(3)
    assert g.num_vertices == count_triangulations_recursive(3) == 64
    assert count_triangulations_recursive(2) == 2
    assert count_triangulations_recursive(1) == 1


def test_flip_symmetry_and_connectivity_n3():
    g = enumerate_lattice(3)
    assert g.is_connected()
    for i, nbrs in enumerate(g.adj):
        for j in nbrs:
            assert i in g.adj[j]


def test_canonical_n3_flip_count():
    # all 8 interior edges of the canonical staircase happen to be flippable
    assert len(flips_lattice(canonical_lattice_triangulation(3))) == 8


def test_nonconvex_quad_yields_no_flip():
    # flipping cell (0,0) to its NE diagonal makes the apexes of the unit
    # edge ((1,0),(1,1)) collinear with it: that edge then has no flip
    t = canonical_lattice_triangulation(3)
    t2 = next(f[0] for f in flips_lattice(t) if f[1] == ((0, 1), (1, 0)))
    removable = {r for _, r, _ in flips_lattice(t2)}
    assert ((1, 0), (1, 1)) not in removable
    assert len(flips_lattice(t2)) == 6


def test_enumeration_cap():
    with pytest.raises(InvalidParameterError):
        enumerate_lattice(5)


def test_validate_rejects_missing_hull_edge():
    t = canonical_lattice_triangulation(2)
    broken = tuple(e for e in t.edges if e != ((0, 0), (1, 0)))
    with pytest.raises(InvalidParameterError):
        LatticeTriangulation(2, broken).validate()


def test_product_subgraph_is_hypercube():
    h = product_subgraph(4, 2)
    assert h.num_vertices == 16
    assert all(len(a) == 4 for a in h.adj)
    assert h.num_edges() == 32
    # explicit isomorphism: adjacency is exactly Hamming distance one
    for i in range(16):
        for j in h.adj[i]:
            assert sum(a != b for a, b in zip(h.coords[i], h.coords[j])) == 1
    assert h.is_connected()
    for v in h.vertices:
        v.validate()


def test_product_subgraph_expansion_bound():
    h = product_subgraph(4, 2)
    h_block = brute_force_expansion(enumerate_lattice(2)).ratio
    assert brute_force_expansion(h).ratio >= h_block / 2


def test_product_subgraph_block_n_is_whole_graph():
    w = product_subgraph(2, 2)
    assert w.num_vertices == enumerate_lattice(2).num_vertices


def test_product_subgraph_requires_divisibility():
    with pytest.raises(InvalidParameterError):
        product_subgraph(4, 3)


def test_partial_triangulation_forces_only_crossing_structure():
    forced = block_partial_triangulation(4, 2)
    # the four free cells' diagonals are not forced
    for cell in ((0, 0), (0, 2), (2, 0), (2, 2)):
        x, y = cell
        assert ((x, y + 1), (x + 1, y)) not in forced
        assert ((x, y), (x + 1, y + 1)) not in forced


def test_json_and_dot_exports():
    g = enumerate_lattice(2)
    doc = g.to_json_dict()
    assert doc["n"] == 2 and len(doc["vertices"]) == 2
    dot = g.to_dot()
    assert dot.count(" -- ") == 1
