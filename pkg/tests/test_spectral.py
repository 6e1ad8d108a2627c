"""Chain analysis: matrices, TVD, mixing, gaps, expansion, cuts, sampling."""

import math
from fractions import Fraction

import numpy as np
import pytest

from flipwalk.errors import InvalidDistributionError, InvalidParameterError
from flipwalk.flows import SimpleGraph
from flipwalk.kangulation import build_flip_graph
from flipwalk.spectral import (
    brute_force_expansion,
    build_chain,
    cheeger_bounds,
    chi_square_survival,
    mixing_time,
    sample_walk,
    shortest_side_cut,
    spectral_gap,
    tvd,
    tvd_curve,
)


def _graph(k, n, _cache={}):
    if (k, n) not in _cache:
        _cache[(k, n)] = build_flip_graph(k, n)
    return _cache[(k, n)]


def test_k2_transition_matrix():
    chain = build_chain(_graph(3, 2))
    assert np.allclose(chain.transition_matrix(), [[0.5, 0.5], [0.5, 0.5]])


def test_rows_sum_to_one_exactly():
    chain = build_chain(_graph(4, 3))
    for i in range(chain.num_states):
        row = chain.transition_row_exact(i)
        assert sum(row.values()) == 1
        off = [v for j, v in row.items() if j != i]
        assert all(v == Fraction(1, 8) for v in off)  # 2(n-1)(k-2) = 8
        assert len(off) == 4


def test_k5_row_mass():
    chain = build_chain(_graph(3, 5))
    p = chain.transition_matrix()
    assert p.shape == (42, 42)
    off_mass = p.sum(axis=1) - np.diag(p)
    assert np.allclose(off_mass, 0.5)


def test_doubly_stochastic():
    p = build_chain(_graph(3, 4)).transition_matrix()
    assert np.allclose(p.sum(axis=0), 1.0)
    assert np.allclose(p.sum(axis=1), 1.0)


def test_tvd_basic():
    assert tvd([0.5, 0.5], [0.5, 0.5]) == 0
    assert tvd([1.0, 0.0], [0.5, 0.5]) == 0.5
    assert tvd([1.0, 0.0, 0.0], [0.0, 0.0, 1.0]) == 1.0
    with pytest.raises(InvalidDistributionError):
        tvd([0.7, 0.7], [0.5, 0.5])
    with pytest.raises(InvalidDistributionError):
        tvd([1.0], [0.5, 0.5])


def test_mixing_time_k2():
    chain = build_chain(_graph(3, 2))
    assert mixing_time(chain) == 1
    assert mixing_time(chain, eps=1.0) == 0


def test_mixing_time_matches_stepwise_oracle():
    for k, n in [(3, 3), (3, 4), (4, 3)]:
        g = _graph(k, n)
        chain = build_chain(g)
        tau = mixing_time(chain)
        p = chain.transition_matrix()
        m = np.eye(g.num_vertices)
        t = 0
        while 0.5 * np.abs(m - 1.0 / g.num_vertices).sum(axis=1).max() >= 0.25:
            m = m @ p
            t += 1
        assert tau == t, (k, n)


def test_mixing_upper_bound_by_gap():
    chain = build_chain(_graph(3, 4))
    tau = mixing_time(chain)
    lam = chain.spectral_gap()
    assert tau <= (1 / lam) * math.log(14 / 0.25)


def test_spectral_gap_k2_and_cycle():
    assert abs(build_chain(_graph(3, 2)).spectral_gap() - 1.0) < 1e-12
    cyc = SimpleGraph([[1, 3], [0, 2], [1, 3], [0, 2]])
    assert abs(build_chain(cyc).spectral_gap() - 0.5) < 1e-12
    assert spectral_gap(build_chain(_graph(3, 5))) > 0


def test_iterative_gap_matches_dense():
    from flipwalk.spectral import _second_eigenvalue_iterative

    chain = build_chain(_graph(3, 5))
    dense = chain.spectral_gap()
    lam2 = _second_eigenvalue_iterative(chain, 1e-12, 100000)
    assert abs((1.0 - lam2) - dense) < 1e-8


def test_cheeger_bounds_contain_true_expansion():
    for n in (2, 3, 4):
        g = _graph(3, n)
        chain = build_chain(g)
        lo, hi = cheeger_bounds(chain)
        h = brute_force_expansion(g).ratio
        assert lo <= float(h) <= hi


def test_cheeger_four_cycle_brute_force():
    cyc = SimpleGraph([[1, 3], [0, 2], [1, 3], [0, 2]])
    rep = brute_force_expansion(cyc)
    assert rep.ratio == 1  # two opposite edges cut / side of two
    lo, hi = cheeger_bounds(build_chain(cyc))
    assert lo <= 1 <= hi


def test_brute_force_expansion_values():
    assert brute_force_expansion(_graph(3, 2)).ratio == 1
    assert brute_force_expansion(_graph(3, 3)).ratio == 1  # 5-cycle
    rep = brute_force_expansion(_graph(3, 4))
    assert rep.ratio == Fraction(5, 7)
    assert rep.side_size <= 7


def test_brute_force_cap():
    with pytest.raises(InvalidParameterError):
        brute_force_expansion(_graph(3, 5))


def test_tvd_curve_non_increasing():
    chain = build_chain(_graph(3, 5))
    for start in (0, 17, 41):
        curve = tvd_curve(chain, start, 50)
        assert all(curve[i + 1] <= curve[i] + 1e-12 for i in range(len(curve) - 1))


def test_shortest_side_cut_n12():
    rep = shortest_side_cut(12)
    assert not rep.degenerate
    frac = rep.side_size / (rep.side_size + rep.other_size)
    assert 0.05 < frac < 0.95
    assert rep.ratio == Fraction(rep.boundary_size, rep.side_size)


def test_shortest_side_cut_trend():
    r8 = shortest_side_cut(8).ratio
    r16 = shortest_side_cut(16).ratio
    r32 = shortest_side_cut(32).ratio
    assert r8 > r16 > r32


def test_shortest_side_cut_degenerate_notice():
    assert shortest_side_cut(4).degenerate
    assert shortest_side_cut(6).degenerate
    assert not shortest_side_cut(7).degenerate


def test_sample_walk_zero_steps_point_mass():
    res = sample_walk(_graph(3, 4), 0, seed=3, start=5)
    assert res["histogram"][5] == 1 and res["recorded"] == 1


def test_sample_walk_deterministic():
    g = _graph(3, 4)
    r1 = sample_walk(g, 5000, seed=11, start=0, thin=10)
    r2 = sample_walk(g, 5000, seed=11, start=0, thin=10)
    assert r1 == r2
    r3 = sample_walk(g, 5000, seed=12, start=0, thin=10)
    assert r3 != r1


def test_sample_walk_uniformity_chi_square():
    # thinned by 50 steps the samples are nearly independent; frozen seed
    res = sample_walk(_graph(3, 4), 1_000_000, seed=20260808, start=0, thin=50)
    assert res["p_value"] > 0.001


def test_chi_square_survival_reference_values():
    # chi2 with 1 dof at 3.841 is the 5% point
    assert abs(chi_square_survival(3.841458820694124, 1) - 0.05) < 1e-9
    assert chi_square_survival(0.0, 5) == 1.0
    assert abs(chi_square_survival(4.0, 4) - math.exp(-2.0) * (1 + 2.0)) < 1e-12


def test_mixing_time_cap():
    from flipwalk.errors import EnumerationTooLargeError

    chain = build_chain(_graph(3, 4))
    with pytest.raises(EnumerationTooLargeError):
        mixing_time(chain, cap=10)


def test_cheeger_disconnected_graph_zero_bracket():
    g = SimpleGraph([[1], [0], [3], [2]])
    chain = build_chain(g)
    assert chain.spectral_gap() < 1e-10
    lo, hi = cheeger_bounds(chain)
    assert lo < 1e-10 and hi < 1e-4
