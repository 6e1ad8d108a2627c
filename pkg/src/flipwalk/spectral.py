"""Chain analysis for lazy flip walks: transition matrices, total variation
distance, exact mixing times, spectral gaps, Cheeger-style expansion brackets,
brute-force expansion for tiny graphs, and the shortest-side central cut.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .combinatorics import catalan
from .errors import (
    EnumerationTooLargeError,
    InvalidDistributionError,
    InvalidParameterError,
    NumericFailureError,
)

EXACT_START_CAP = 2000  # all-starts exact mixing below this size
EXACT_ANALYSIS_CAP = 300_000  # beyond this, mixing analysis is refused
DENSE_EIG_CAP = 5000


@dataclass
class ChainAnalysis:
    """Lazy uniform walk on a graph: P = I/2 + A/(2*Delta), pi uniform.

    Fields are computed on demand and cached; the transition matrix is held
    dense only while needed.
    """

    graph: object
    delta: int
    _P: np.ndarray | None = field(default=None, repr=False)
    _gap: float | None = field(default=None, repr=False)
    _mixing: dict = field(default_factory=dict, repr=False)

    @property
    def num_states(self) -> int:
        return self.graph.num_vertices

    def transition_matrix(self) -> np.ndarray:
        if self._P is None:
            n = self.num_states
            p = np.zeros((n, n))
            off = 1.0 / (2 * self.delta)
            for i, nbrs in enumerate(self.graph.adj):
                for j in nbrs:
                    p[i, j] = off
                p[i, i] = 1.0 - off * len(nbrs)
            self._P = p
        return self._P

    def transition_row_exact(self, i: int) -> dict:
        """Row i of P as exact rationals (sums to 1 exactly)."""
        off = Fraction(1, 2 * self.delta)
        row = {j: off for j in self.graph.adj[i]}
        row[i] = 1 - off * len(self.graph.adj[i])
        return row

    def spectral_gap(self, tol: float = 1e-10, max_iter: int = 50000) -> float:
        if self._gap is None:
            n = self.num_states
            if n <= DENSE_EIG_CAP:
                evals = np.linalg.eigvalsh(self.transition_matrix())
                lam2 = evals[-2] if n > 1 else evals[-1]
            else:
                lam2 = _second_eigenvalue_iterative(self, tol, max_iter)
            self._gap = float(1.0 - lam2)
        return self._gap

    def second_eigenvector(self) -> np.ndarray:
        n = self.num_states
        if n > DENSE_EIG_CAP:
            _, vec = _second_eigenpair_power(self, 1e-10, 50000)
            return vec
        evals, evecs = np.linalg.eigh(self.transition_matrix())
        return evecs[:, -2]

    def summary(self) -> dict:
        lo, hi = cheeger_bounds(self)
        tau, mode = mixing_time(self, return_mode=True)
        return {
            "vertices": self.num_states,
            "degree": self.delta,
            "spectral_gap": self.spectral_gap(),
            "mixing_time": tau,
            "mixing_mode": mode,
            "cheeger_lower": lo,
            "cheeger_upper": hi,
        }


def build_chain(graph) -> ChainAnalysis:
    """Lazy flip-walk chain: half-stay, otherwise uniform over the
    (n-1)(k-2) moves (max degree for irregular graphs)."""
    delta = graph.degree
    if delta < 1:
        raise InvalidParameterError("graph has no edges; chain is degenerate")
    return ChainAnalysis(graph, delta)


def tvd(mu, nu) -> float:
    """Total variation distance: half the L1 distance."""
    mu = np.asarray(mu, dtype=float)
    nu = np.asarray(nu, dtype=float)
    if mu.shape != nu.shape:
        raise InvalidDistributionError("distributions have different supports")
    for vec in (mu, nu):
        if abs(vec.sum() - 1.0) > 1e-12 or (vec < -1e-15).any():
            raise InvalidDistributionError("input is not a probability vector")
    return 0.5 * float(np.abs(mu - nu).sum())


def _worst_tvd(powermat: np.ndarray) -> float:
    n = powermat.shape[0]
    return 0.5 * float(np.abs(powermat - 1.0 / n).sum(axis=1).max())


def mixing_time(
    chain: ChainAnalysis,
    eps: float = 0.25,
    return_mode: bool = False,
    cap: int = EXACT_ANALYSIS_CAP,
):
    """Least t with worst-start TVD below eps.

    For graphs up to EXACT_START_CAP states this iterates all point-mass
    starts exactly (matrix powers by squaring plus a descending-step binary
    search, using the monotonicity of worst-start TVD).  Larger graphs use
    the extreme entries of the second eigenvector as candidate worst starts
    and the result is flagged as a heuristic lower bound.  States beyond
    `cap` are refused.
    """
    key = (eps,)
    if key in chain._mixing:
        tau, mode = chain._mixing[key]
        return (tau, mode) if return_mode else tau
    n = chain.num_states
    if n > cap:
        raise EnumerationTooLargeError(n, cap)
    if n <= EXACT_START_CAP:
        tau = _mixing_exact(chain, eps)
        mode = "exact-all-starts"
    else:
        tau = _mixing_heuristic(chain, eps)
        mode = "heuristic-start"
    chain._mixing[key] = (tau, mode)
    return (tau, mode) if return_mode else tau


def _mixing_exact(chain: ChainAnalysis, eps: float) -> int:
    n = chain.num_states
    ident = np.eye(n)
    if _worst_tvd(ident) < eps:
        return 0
    p = chain.transition_matrix()
    # doubling phase: snapshots of P^(2^k)
    snapshots = [p]
    cur = p
    t = 1
    while _worst_tvd(cur) >= eps:
        cur = snapshots[-1] @ snapshots[-1]
        # re-normalize rows against accumulated float drift
        cur /= cur.sum(axis=1, keepdims=True)
        snapshots.append(cur)
        t *= 2
        if t > 1 << 40:
            raise NumericFailureError("mixing time did not converge")
    if t == 1:
        return 1
    # descending-step search inside (t/2, t]
    lo = t // 2
    base = snapshots[-2]
    step_idx = len(snapshots) - 3
    while step_idx >= 0:
        cand = base @ snapshots[step_idx]
        if _worst_tvd(cand) >= eps:
            base = cand
            lo += 1 << step_idx
        step_idx -= 1
    return lo + 1


def _mixing_heuristic(chain: ChainAnalysis, eps: float) -> int:
    n = chain.num_states
    vec = chain.second_eigenvector()
    order = np.argsort(vec)
    starts = {int(order[0]), int(order[-1]), int(order[1]), int(order[-2])}
    adj_idx, offsets = _adjacency_arrays(chain.graph)
    off = 1.0 / (2 * chain.delta)
    degs = np.diff(offsets)
    tau = 0
    for s in starts:
        x = np.zeros(n)
        x[s] = 1.0
        t = 0
        while 0.5 * np.abs(x - 1.0 / n).sum() >= eps:
            x = x * (1.0 - off * degs) + off * np.add.reduceat(x[adj_idx], offsets[:-1])
            t += 1
            if t > 10_000_000:
                raise NumericFailureError("heuristic mixing did not converge")
        tau = max(tau, t)
    return tau


def _adjacency_arrays(graph):
    idx = []
    offsets = [0]
    for nbrs in graph.adj:
        idx.extend(nbrs)
        offsets.append(len(idx))
    return np.asarray(idx, dtype=np.int64), np.asarray(offsets, dtype=np.int64)


def _lazy_step_matrixless(chain, x, adj_idx, offsets, degs):
    off = 1.0 / (2 * chain.delta)
    return x * (1.0 - off * degs) + off * np.add.reduceat(x[adj_idx], offsets[:-1])


def tvd_curve(chain: ChainAnalysis, start: int, steps: int) -> list:
    """TVD to uniform after 0..steps lazy steps from a point-mass start."""
    n = chain.num_states
    adj_idx, offsets = _adjacency_arrays(chain.graph)
    degs = np.diff(offsets)
    x = np.zeros(n)
    x[start] = 1.0
    curve = [0.5 * float(np.abs(x - 1.0 / n).sum())]
    for _ in range(steps):
        x = _lazy_step_matrixless(chain, x, adj_idx, offsets, degs)
        curve.append(0.5 * float(np.abs(x - 1.0 / n).sum()))
    return curve


def _second_eigenpair_power(chain, tol, max_iter):
    """Power iteration on P with the all-ones eigenvector deflated."""
    n = chain.num_states
    adj_idx, offsets = _adjacency_arrays(chain.graph)
    degs = np.diff(offsets)
    rng = np.random.default_rng(7)
    x = rng.standard_normal(n)
    x -= x.mean()
    x /= np.linalg.norm(x)
    lam = 0.0
    for _ in range(max_iter):
        y = _lazy_step_matrixless(chain, x, adj_idx, offsets, degs)
        y -= y.mean()
        norm = np.linalg.norm(y)
        if norm == 0:
            raise NumericFailureError("deflated power iteration collapsed")
        y /= norm
        lam_new = float(y @ _lazy_step_matrixless(chain, y, adj_idx, offsets, degs))
        residual = np.linalg.norm(
            _lazy_step_matrixless(chain, y, adj_idx, offsets, degs) - lam_new * y
        )
        x = y
        lam = lam_new
        if residual < tol:
            return lam, x
    raise NumericFailureError("power iteration did not converge", residual=residual)


def _second_eigenvalue_iterative(chain, tol, max_iter):
    lam, _ = _second_eigenpair_power(chain, tol, max_iter)
    return lam


def spectral_gap(chain: ChainAnalysis) -> float:
    return chain.spectral_gap()


def cheeger_bounds(chain: ChainAnalysis) -> tuple:
    """Bracket for the unnormalized expansion h(G) from the spectral gap.

    The degree-normalized expansion h/Delta of the lazy walk satisfies
    lambda/2 <= h/Delta <= sqrt(2 lambda); both ends are reported after
    multiplying back by Delta.
    """
    lam = chain.spectral_gap()
    return chain.delta * lam / 2.0, chain.delta * math.sqrt(2.0 * lam)


@dataclass
class CutReport:
    side: set | None
    side_size: int
    other_size: int
    boundary_size: object  # int (edge count); exact
    ratio: Fraction
    construction: str
    degenerate: bool = False

    def to_json_dict(self) -> dict:
        return {
            "side_size": self.side_size,
            "other_size": self.other_size,
            "boundary_size": self.boundary_size,
            "ratio_num": self.ratio.numerator,
            "ratio_den": self.ratio.denominator,
            "construction": self.construction,
            "degenerate": self.degenerate,
        }


def brute_force_expansion(graph) -> CutReport:
    """Exact minimizer of |dS|/|S| over nonempty S with |S| <= |V|/2."""
    n = graph.num_vertices
    if n > 24:
        raise InvalidParameterError(f"{n} vertices is too large for brute force")
    masks = [0] * n
    for i, nbrs in enumerate(graph.adj):
        for j in nbrs:
            masks[i] |= 1 << j
    full = (1 << n) - 1
    best = None
    for s in range(1, 1 << n):
        size = s.bit_count()
        if 2 * size > n:
            continue
        boundary = 0
        m = s
        while m:
            v = (m & -m).bit_length() - 1
            boundary += (masks[v] & ~s & full).bit_count()
            m &= m - 1
        ratio = Fraction(boundary, size)
        if best is None or ratio < best[0]:
            best = (ratio, s, boundary, size)
    ratio, s, boundary, size = best
    side = {v for v in range(n) if s >> v & 1}
    return CutReport(side, size, n - size, boundary, ratio, "brute-force")


# ---------------------------------------------------------------------------
# central shortest-side cut (class-level; sizes are Catalan products)


def _central_triangles(m: int) -> list:
    out = []
    for a in range(m):
        for b in range(a + 1, m):
            for c in range(b + 1, m):
                arcs = ((b - a, a, b), (c - b, b, c), (m - (c - a), c, a))
                ok = True
                for ln, _, w in arcs:
                    if 2 * ln > m or (
                        2 * ln == m and not (0 < (1 - 2 * w) % (2 * m) < m)
                    ):
                        ok = False
                        break
                if ok:
                    out.append((a, b, c))
    return out


def _tri_arcs(tri: tuple, m: int) -> tuple:
    a, b, c = tri
    return (b - a, c - b, m - (c - a))


def _tri_class_size(tri: tuple, m: int) -> int:
    l1, l2, l3 = _tri_arcs(tri, m)
    return catalan(l1 - 1) * catalan(l2 - 1) * catalan(l3 - 1)


def _tri_match_size(t1: tuple, t2: tuple, m: int) -> int:
    """Matching size between two central classes sharing a triangle side."""
    s1, s2 = set(t1), set(t2)
    if len(s1 & s2) != 2:
        return 0
    quad = sorted(s1 | s2)
    arcs = (
        quad[1] - quad[0],
        quad[2] - quad[1],
        quad[3] - quad[2],
        m - (quad[3] - quad[0]),
    )
    r = 1
    for ln in arcs:
        r *= catalan(ln - 1)
    return r


def shortest_side_cut(n: int) -> CutReport:
    """The central-class cut S = all classes whose central triangle's
    shortest side spans at most m/6 polygon edges (m = n + 2).

    Computed entirely at class level: class sizes and inter-class matching
    sizes are closed-form Catalan products, so no enumeration is needed.
    Emits a degenerate-cut notice for n < 7.
    """
    if n < 2:
        raise InvalidParameterError("need n >= 2")
    m = n + 2
    tris = _central_triangles(m)
    total = sum(_tri_class_size(t, m) for t in tris)
    if total != catalan(n):
        raise InvalidParameterError(
            f"central classes sum to {total}, expected {catalan(n)}"
        )
    in_cut = lambda t: 6 * min(_tri_arcs(t, m)) <= m
    side = [t for t in tris if in_cut(t)]
    other = [t for t in tris if not in_cut(t)]
    s_size = sum(_tri_class_size(t, m) for t in side)
    o_size = total - s_size
    boundary = 0
    for t1 in side:
        for t2 in other:
            boundary += _tri_match_size(t1, t2, m)
    degenerate = n < 7 or s_size == 0 or o_size == 0
    ratio = Fraction(boundary, s_size) if s_size else Fraction(0)
    return CutReport(
        None, s_size, o_size, boundary, ratio, "central-shortest-side", degenerate
    )


# ---------------------------------------------------------------------------
# sampling


def sample_walk(graph, steps: int, seed: int, start: int, thin: int = 1) -> dict:
    """Seeded lazy flip walk; returns the visit histogram of the thinned
    trajectory and a chi-square uniformity statistic.

    The histogram records the initial state and every thin-th subsequent
    state.  Thinning de-correlates consecutive samples so the chi-square
    statistic is meaningful; thin=1 keeps the raw trajectory.
    """
    if start < 0 or start >= graph.num_vertices:
        raise InvalidParameterError(f"invalid start vertex {start}")
    rng = np.random.default_rng(seed)
    delta = graph.degree
    n = graph.num_vertices
    counts = np.zeros(n, dtype=np.int64)
    state = start
    counts[state] += 1
    if steps:
        coins = rng.integers(0, 2 * delta, size=steps)
        for i in range(steps):
            move = int(coins[i])
            nbrs = graph.adj[state]
            if move < len(nbrs):
                state = nbrs[move]
            # else: lazy hold (covers the coin's tails half and any
            # missing moves of an irregular vertex)
            if (i + 1) % thin == 0:
                counts[state] += 1
    recorded = int(counts.sum())
    expected = recorded / n
    stat = float(((counts - expected) ** 2 / expected).sum())
    pvalue = chi_square_survival(stat, n - 1)
    return {
        "histogram": counts.tolist(),
        "recorded": recorded,
        "final_state": int(state),
        "chi_square": stat,
        "dof": n - 1,
        "p_value": pvalue,
    }


def chi_square_survival(stat: float, dof: int) -> float:
    """P[Chi2_dof >= stat], via the regularized upper incomplete gamma."""
    if stat <= 0:
        return 1.0
    return _gammq(dof / 2.0, stat / 2.0)


def _gammq(a: float, x: float) -> float:
    if x < a + 1.0:
        return 1.0 - _gamma_series(a, x)
    return _gamma_cf(a, x)


def _gamma_series(a: float, x: float) -> float:
    gln = math.lgamma(a)
    ap = a
    total = 1.0 / a
    delta = total
    for _ in range(500):
        ap += 1.0
        delta *= x / ap
        total += delta
        if abs(delta) < abs(total) * 1e-15:
            break
    return total * math.exp(-x + a * math.log(x) - gln)


def _gamma_cf(a: float, x: float) -> float:
    gln = math.lgamma(a)
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 500):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-15:
            break
    return math.exp(-x + a * math.log(x) - gln) * h
