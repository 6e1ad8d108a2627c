"""Recursive multicommodity-flow constructions on triangulation flip graphs:
the shuffle/concentrate/transmit/distribute uniform flow, the Cartesian
product combiner, the projection-restriction combiner, and the hierarchical
pairing flow.  All flow values are exact rationals.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd

from .combinatorics import catalan
from .decomposition import boundary_matchings, boundary_projection, oriented_partition
from .errors import InvalidParameterError, StructureMismatchError
from .flows import (
    ArcFlow,
    CongestionReport,
    MsfProblem,
    congestion_report,
    product_graph,
)
from .kangulation import build_flip_graph


# ---------------------------------------------------------------------------
# oriented-class structure cache


@dataclass
class OrientedStructure:
    n: int
    graph: object
    partition: object
    sizes: list
    members: list
    factor_ns: list  # per class: (left n, right n)
    grids: list  # per class: (xi, yi) -> graph vertex
    matching: dict  # ordered (a, b) -> [(u in a, v in b), ...]
    bproj: dict  # ordered (a, b) -> (factor_index, sub_class_index)


@lru_cache(maxsize=None)
def oriented_structure(n: int) -> OrientedStructure:
    graph = build_flip_graph(3, n)
    part = oriented_partition(graph)
    sizes = [c.size for c in part.classes]
    members = [c.member_indices for c in part.classes]
    factor_ns = [tuple(ni for _, ni in c.cartesian_factors) for c in part.classes]
    grids = [
        {coord: c.member_indices[pos] for pos, coord in enumerate(c.coords)}
        for c in part.classes
    ]
    matching = {}
    for bm in boundary_matchings(part):
        matching[(bm.class_a, bm.class_b)] = bm.edges
        matching[(bm.class_b, bm.class_a)] = [(v, u) for u, v in bm.edges]
    bproj = {}
    k = len(part.classes)
    for a in range(k):
        for b in range(k):
            if a != b:
                fi, sub = boundary_projection(part, a, b)
                bproj[(a, b)] = (fi, sub["apex"] - 1)
    return OrientedStructure(
        n, graph, part, sizes, members, factor_ns, grids, matching, bproj
    )


def _lift_map(st: OrientedStructure, ci: int, factor_index: int, fixed: int) -> list:
    """Vertex map from a factor flip graph into one copy inside class ci."""
    grid = st.grids[ci]
    l, r = st.factor_ns[ci]
    if factor_index == 1:
        return [grid[(fixed, u)] for u in range(catalan(r))]
    return [grid[(u, fixed)] for u in range(catalan(l))]


# ---------------------------------------------------------------------------
# the recursive construction: pair flows, distribution flows, shuffles

_PAIR_CACHE: dict = {}
_RDIST_CACHE: dict = {}
_AGG_CACHE: dict = {}


def _check_net(flow: ArcFlow, expected: dict, context: str) -> None:
    """Exact comparison of a flow's per-vertex net inflow with a target."""
    net = flow.net_ints()
    den = flow.den
    for v, w in net.items():
        if Fraction(w, den) != expected.get(v, Fraction(0)):
            raise StructureMismatchError(
                f"{context}: net at {v} is {Fraction(w, den)}, "
                f"expected {expected.get(v, Fraction(0))}"
            )
    for v, x in expected.items():
        if x != Fraction(net.get(v, 0), den):
            raise StructureMismatchError(f"{context}: net at {v} missing {x}")


def pair_flow(n: int, a: int, b: int) -> ArcFlow:
    """Single-source-class worth of the concentrate/transmit/distribute flow
    moving |C_b|/|C_a| units out of every vertex of class a and delivering
    one unit to every vertex of class b.  Verified exactly on construction.
    """
    key = (n, a, b)
    if key in _PAIR_CACHE:
        return _PAIR_CACHE[key]
    st = oriented_structure(n)
    ca, cb = st.sizes[a], st.sizes[b]
    pieces = []
    # concentrate within class a onto the boundary toward b
    fi, sub = st.bproj[(a, b)]
    f_n = st.factor_ns[a][fi]
    if f_n >= 2:
        base = r_dist(f_n, sub).reversed()
        other = catalan(st.factor_ns[a][1 - fi])
        scale = Fraction(cb, ca)
        for copy in range(other):
            pieces.append((base.relabeled(_lift_map(st, a, fi, copy)), scale))
    # transmit across the matching
    arcs = st.matching[(a, b)]
    tran = ArcFlow(len(arcs), {(u, v): cb for u, v in arcs})
    pieces.append((tran, 1))
    # distribute within class b from the boundary toward a
    fj, sub2 = st.bproj[(b, a)]
    f2 = st.factor_ns[b][fj]
    if f2 >= 2:
        base2 = r_dist(f2, sub2)
        other2 = catalan(st.factor_ns[b][1 - fj])
        for copy in range(other2):
            pieces.append((base2.relabeled(_lift_map(st, b, fj, copy)), 1))
    flow = ArcFlow.combine(pieces).reduce()
    expected = {v: Fraction(-cb, ca) for v in st.members[a]}
    for v in st.members[b]:
        expected[v] = Fraction(1)
    _check_net(flow, expected, f"pair_flow({n},{a},{b})")
    _PAIR_CACHE[key] = flow
    return flow


def r_dist(n: int, u: int) -> ArcFlow:
    """Canonical distribution flow on K_n: every vertex of oriented class u
    starts with C_n/|C_u| units; every vertex of K_n ends holding one."""
    key = (n, u)
    if key in _RDIST_CACHE:
        return _RDIST_CACHE[key]
    st = oriented_structure(n)
    flow = ArcFlow.combine(
        (pair_flow(n, u, w), 1) for w in range(len(st.sizes)) if w != u
    ).reduce()
    total = catalan(n)
    su = st.sizes[u]
    expected = {v: Fraction(1) for v in range(total)}
    for v in st.members[u]:
        expected[v] = Fraction(1) - Fraction(total, su)
    _check_net(flow, {v: x for v, x in expected.items() if x}, f"r_dist({n},{u})")
    _RDIST_CACHE[key] = flow
    return flow


def class_product_aggregate(n: int, t: int) -> ArcFlow:
    """Aggregate uniform flow inside class t, via its Cartesian factorization:
    every ordered member pair exchanges one unit."""
    st = oriented_structure(n)
    l, r = st.factor_ns[t]
    cl, cr = catalan(l), catalan(r)
    pieces = []
    if r >= 2:
        h = aggregate_flow(r)
        for x in range(cl):
            pieces.append((h.relabeled(_lift_map(st, t, 1, x)), cl))
    if l >= 2:
        g = aggregate_flow(l)
        for y in range(cr):
            pieces.append((g.relabeled(_lift_map(st, t, 0, y)), cr))
    return ArcFlow.combine(pieces)


def aggregate_flow(n: int) -> ArcFlow:
    """Aggregate arc flow of the recursive uniform multicommodity flow on K_n."""
    if n in _AGG_CACHE:
        return _AGG_CACHE[n]
    if n <= 1:
        flow = ArcFlow()
    else:
        st = oriented_structure(n)
        total = catalan(n)
        pieces = []
        for t, sz in enumerate(st.sizes):
            pieces.append((class_product_aggregate(n, t), Fraction(total, sz)))
            pieces.append((r_dist(n, t), sz))
        flow = ArcFlow.combine(pieces).reduce()
    _AGG_CACHE[n] = flow
    return flow


def shuffle_source_flow(n: int, s: int) -> ArcFlow:
    """Per-source component of the class-internal product flow: source s
    sends one unit to every member of its own class."""
    st = oriented_structure(n)
    t = st.partition.vertex_class[s]
    c = st.partition.classes[t]
    x, y = c.coords[c.member_indices.index(s)]
    l, r = st.factor_ns[t]
    cl, cr = catalan(l), catalan(r)
    pieces = []
    if r >= 2:
        pieces.append((per_source_flow(r, y).relabeled(_lift_map(st, t, 1, x)), cl))
    if l >= 2:
        base = per_source_flow(l, x)
        for y2 in range(cr):
            pieces.append((base.relabeled(_lift_map(st, t, 0, y2)), 1))
    return ArcFlow.combine(pieces)


@lru_cache(maxsize=32)
def per_source_flow(n: int, s: int) -> ArcFlow:
    """Full per-source flow on K_n: one unit from s to every other vertex."""
    if n <= 1:
        return ArcFlow()
    st = oriented_structure(n)
    t = st.partition.vertex_class[s]
    return ArcFlow.combine(
        [
            (shuffle_source_flow(n, s), Fraction(catalan(n), st.sizes[t])),
            (r_dist(n, t), 1),
        ]
    )


def verify_unit_demands(n: int) -> dict:
    """Certify, source by source, that the recursive flow routes exactly one
    unit between every ordered vertex pair of K_n.

    The flow for source s in class T is (C_n/|C_T|) * shuffle_s + r_dist_T.
    Every pair flow and distribution flow is net-verified from its arcs at
    construction time; here the per-source shuffle component is additionally
    verified from its arcs for every source, which pins the per-source net
    to exactly -(C_n - 1) at s and +1 everywhere else.  Exact rationals
    throughout.
    """
    if n <= 1:
        return {"n": n, "sources": 0, "ok": True}
    st = oriented_structure(n)
    for t in range(len(st.sizes)):
        r_dist(n, t)  # net-verified on construction
    count = 0
    for t, sz in enumerate(st.sizes):
        members = st.members[t]
        mset = set(members)
        for s in members:
            sh = shuffle_source_flow(n, s)
            net = sh.net_ints()
            den = sh.den
            if Fraction(net.get(s, 0), den) != Fraction(-(sz - 1)):
                raise StructureMismatchError(
                    f"source {s}: shuffle net {Fraction(net.get(s, 0), den)}"
                )
            for v in members:
                if v != s and Fraction(net.get(v, 0), den) != 1:
                    raise StructureMismatchError(
                        f"source {s}: shuffle net at {v} is "
                        f"{Fraction(net.get(v, 0), den)}"
                    )
            for v in net:
                if v not in mset and net[v] != 0:
                    raise StructureMismatchError(
                        f"source {s}: shuffle leaks to vertex {v}"
                    )
            count += 1
    return {"n": n, "sources": count, "ok": True}


def matching_arc_values(n: int):
    """Un-normalized aggregate flow on every inter-class matching arc."""
    st = oriented_structure(n)
    agg = aggregate_flow(n)
    out = []
    for (a, b), arcs in st.matching.items():
        if a < b:
            for u, v in arcs:
                out.append(((a, b), (u, v), agg.value(u, v)))
                out.append(((b, a), (v, u), agg.value(v, u)))
    return out


def uniform_flow_recursive(graph) -> tuple:
    """The recursive uniform multicommodity flow on a k=3 flip graph.

    Returns (ArcFlow, CongestionReport) with uniform normalization.
    """
    if graph.k != 3:
        raise InvalidParameterError("recursive flow requires k = 3")
    agg = aggregate_flow(graph.n)
    report = congestion_report(agg, graph.num_vertices, "uniform")
    return agg, report


def reset_flow_caches() -> None:
    _PAIR_CACHE.clear()
    _RDIST_CACHE.clear()
    _AGG_CACHE.clear()
    per_source_flow.cache_clear()


# ---------------------------------------------------------------------------
# Cartesian product combiner


def cartesian_flow_combine(factor_flows: list, factor_graphs: list):
    """Combine uniform flows on factors into a uniform flow on the product.

    The pairwise rule routes between copies in two stages (factor flow in the
    source copy, then the other factor's flow), which scales the factor flows
    by the co-factor vertex counts and loses nothing in normalized congestion.

    Returns (flow, product_graph).
    """
    if len(factor_flows) != len(factor_graphs) or not factor_flows:
        raise InvalidParameterError("need one flow per factor graph")
    flow, graph = factor_flows[0], factor_graphs[0]
    for nxt_flow, nxt_graph in zip(factor_flows[1:], factor_graphs[1:]):
        ng, nh = graph.num_vertices, nxt_graph.num_vertices
        prod = product_graph(graph, nxt_graph)
        vals = {}
        for x in range(ng):
            off = x * nh
            for (u, v), w in nxt_flow.vals.items():
                vals[(off + u, off + v)] = w * ng * flow.den
        for y in range(nh):
            for (u, v), w in flow.vals.items():
                arc = (u * nh + y, v * nh + y)
                vals[arc] = vals.get(arc, 0) + w * nh * nxt_flow.den
        flow = ArcFlow(flow.den * nxt_flow.den, vals).reduce()
        graph = prod
    return flow, graph


def cartesian_per_source(per_source_fns: list, factor_graphs: list, coord: tuple) -> ArcFlow:
    """Per-source flow of the two-factor product combiner, for certification."""
    if len(factor_graphs) != 2:
        raise InvalidParameterError("per-source certification implemented for 2 factors")
    (g, h), (x, y) = factor_graphs, coord
    nh = h.num_vertices
    pieces = [(per_source_fns[1](y).relabeled([x * nh + u for u in range(nh)]), g.num_vertices)]
    base = per_source_fns[0](x)
    for y2 in range(nh):
        pieces.append((base.relabeled([u * nh + y2 for u in range(g.num_vertices)]), 1))
    return ArcFlow.combine(pieces)


# ---------------------------------------------------------------------------
# projection-restriction combiner


def _bfs_paths(adj, allowed, root):
    """Deterministic BFS tree inside `allowed`; parent = smallest neighbor."""
    parent = {root: None}
    frontier = [root]
    while frontier:
        nxt = []
        for v in frontier:
            for w in adj[v]:
                if w in allowed and w not in parent:
                    parent[w] = v
                    nxt.append(w)
        frontier = sorted(nxt)
    return parent


def _path(parent, target):
    path = [target]
    while parent[path[-1]] is not None:
        path.append(parent[path[-1]])
    path.reverse()
    return path


def _route(vals: dict, path: list, amount: Fraction) -> None:
    for i in range(len(path) - 1):
        arc = (path[i], path[i + 1])
        vals[arc] = vals.get(arc, Fraction(0)) + amount


@dataclass
class ProjectionRestrictionResult:
    flow: dict  # arc -> Fraction
    report: CongestionReport
    rho_max: Fraction
    rho_bar: Fraction
    gamma: Fraction
    delta: int
    bound: Fraction
    measured: Fraction

    @property
    def satisfied(self) -> bool:
        return self.measured <= self.bound


def projection_restriction_combine(graph, classes: list) -> ProjectionRestrictionResult:
    """Combine per-class restriction flows with a projection flow into one
    flow with demands pi(s) pi(t), following the decomposition construction.

    The chain is the lazy uniform walk: P(x,y) = 1/(2 Delta) per edge with
    Delta the maximum degree, so pi is uniform and Q(x, y) = 1/(2 Delta N).
    Restriction chains use the rejection convention (off-diagonal transition
    probabilities unchanged inside the class).  Congestions rho_max, rho_bar
    and the measured value are all in the f/Q convention of the combiner's
    proof; the report's chain normalization additionally divides by Delta.
    """
    n_verts = graph.num_vertices
    delta = graph.degree
    vclass = {}
    for ci, cls in enumerate(classes):
        for v in cls:
            if v in vclass:
                raise InvalidParameterError(f"vertex {v} in two classes")
            vclass[v] = ci
    if len(vclass) != n_verts:
        raise InvalidParameterError("classes do not partition the vertices")
    pi = Fraction(1, n_verts)
    q_edge = Fraction(1, 2 * delta * n_verts)

    # restriction flows: canonical BFS paths inside each class
    paths = []
    rho_max = Fraction(0)
    for cls in classes:
        allowed = set(cls)
        ptrees = {z: _bfs_paths(graph.adj, allowed, z) for z in cls}
        counts: dict = {}
        cls_paths = {}
        for z in cls:
            for u in cls:
                if u == z:
                    continue
                if u not in ptrees[z]:
                    raise InvalidParameterError("class induces a disconnected subgraph")
                p = _path(ptrees[z], u)
                cls_paths[(z, u)] = p
                for i in range(len(p) - 1):
                    arc = (p[i], p[i + 1])
                    counts[arc] = counts.get(arc, 0) + 1
        paths.append(cls_paths)
        sz = len(cls)
        for arc, cnt in counts.items():
            # f_i/Q_i with f_i = cnt/sz^2 and Q_i = 1/(2 delta sz)
            rho = Fraction(2 * delta * cnt, sz)
            rho_max = max(rho_max, rho)

    # quotient graph and projection flow by canonical quotient paths
    k = len(classes)
    cross_edges = {}
    for i, j in graph.edges():
        ci, cj = vclass[i], vclass[j]
        if ci != cj:
            cross_edges.setdefault((ci, cj), []).append((i, j))
            cross_edges.setdefault((cj, ci), []).append((j, i))
    quotient_adj = [sorted({b for (a, b) in cross_edges if a == ci}) for ci in range(k)]
    qtrees = {i: _bfs_paths(quotient_adj, set(range(k)), i) for i in range(k)}
    pi_bar = [Fraction(len(cls), n_verts) for cls in classes]
    fbar: dict = {}
    qpaths = {}
    for i in range(k):
        for j in range(k):
            if i == j:
                continue
            if j not in qtrees[i]:
                raise InvalidParameterError("quotient graph is disconnected")
            qp = _path(qtrees[i], j)
            qpaths[(i, j)] = qp
            for t in range(len(qp) - 1):
                arc = (qp[t], qp[t + 1])
                fbar[arc] = fbar.get(arc, Fraction(0)) + pi_bar[i] * pi_bar[j]
    rho_bar = Fraction(0)
    for (a, b), val in fbar.items():
        qbar = Fraction(len(cross_edges[(a, b)]), 2 * delta * n_verts)
        rho_bar = max(rho_bar, val / qbar)

    # gamma: worst escape probability
    gamma = Fraction(0)
    for v in range(n_verts):
        ext = sum(1 for w in graph.adj[v] if vclass[w] != vclass[v])
        gamma = max(gamma, Fraction(ext, 2 * delta))

    vals: dict = {}
    # within-class demands pi(z) pi(u), routed on the restriction paths
    for ci, cls in enumerate(classes):
        for (z, u), p in paths[ci].items():
            _route(vals, p, pi * pi)

    # cross-class demands, lifted along the quotient paths
    for (i, j), qp in qpaths.items():
        demand = pi_bar[i] * pi_bar[j]
        comp: dict = {}
        hop_edges = [cross_edges[(qp[t], qp[t + 1])] for t in range(len(qp) - 1)]
        # crossing arcs
        for edges in hop_edges:
            share = demand / len(edges)
            for arc in edges:
                comp[arc] = comp.get(arc, Fraction(0)) + share
        # weights: entry/exit multiplicity per class on the path
        for t, ci in enumerate(qp):
            cls = classes[ci]
            sz = len(cls)
            if t == 0:
                out_w = {}
                for x, _ in hop_edges[0]:
                    out_w[x] = out_w.get(x, 0) + 1
                etot = len(hop_edges[0])
                for z in cls:
                    for w, cnt in out_w.items():
                        if z == w:
                            continue
                        _route(comp, paths[ci][(z, w)], demand * cnt / (sz * etot))
            elif t == len(qp) - 1:
                in_w = {}
                for _, y_ in hop_edges[-1]:
                    in_w[y_] = in_w.get(y_, 0) + 1
                etot = len(hop_edges[-1])
                for z, cnt in in_w.items():
                    for u in cls:
                        if u == z:
                            continue
                        _route(comp, paths[ci][(z, u)], demand * cnt / (etot * sz))
            else:
                in_w = {}
                for _, y_ in hop_edges[t - 1]:
                    in_w[y_] = in_w.get(y_, 0) + 1
                out_w = {}
                for x, _ in hop_edges[t]:
                    out_w[x] = out_w.get(x, 0) + 1
                e_in, e_out = len(hop_edges[t - 1]), len(hop_edges[t])
                for z, ci_n in in_w.items():
                    for w, co_n in out_w.items():
                        if z == w:
                            continue
                        _route(
                            comp,
                            paths[ci][(z, w)],
                            demand * ci_n * co_n / (e_in * e_out),
                        )
        # component conservation: class i sends demand, class j receives it
        net: dict = {}
        for (x, y_), w in comp.items():
            net[x] = net.get(x, Fraction(0)) - w
            net[y_] = net.get(y_, Fraction(0)) + w
        for z in classes[i]:
            if net.get(z, Fraction(0)) != -demand / len(classes[i]):
                raise StructureMismatchError(
                    f"commodity ({i},{j}): bad net at source {z}"
                )
        for u in classes[j]:
            if net.get(u, Fraction(0)) != demand / len(classes[j]):
                raise StructureMismatchError(
                    f"commodity ({i},{j}): bad net at sink {u}"
                )
        for arc, w in comp.items():
            vals[arc] = vals.get(arc, Fraction(0)) + w

    measured = max((val / q_edge for val in vals.values()), default=Fraction(0))
    arg = max(vals, key=lambda a: vals[a]) if vals else None
    bound = (1 + 2 * rho_bar * gamma * delta) * rho_max
    report = CongestionReport(
        rho=measured / delta,
        argmax_arc=arg,
        normalization="chain",
        rho_directed=measured / delta,
    )
    return ProjectionRestrictionResult(
        flow=vals,
        report=report,
        rho_max=rho_max,
        rho_bar=rho_bar,
        gamma=gamma,
        delta=delta,
        bound=bound,
        measured=measured,
    )


# ---------------------------------------------------------------------------
# hierarchical pairing flow (class-level, exact)


def hierarchical_pairing_flow(n: int):
    """Solve the n class-to-graph MSF problems by dyadic pairing of the
    oriented classes, entirely at class level (sizes and matching sizes are
    closed-form Catalan products).

    Every source vertex of class i starts with C_n units; after the log n
    pairing levels every vertex of K_n holds |C_i| units of commodity i,
    certified by exact pool accounting.  Returns (quotient ArcFlow,
    CongestionReport with per-level data, details dict).
    """
    if n < 2:
        raise InvalidParameterError("need at least two classes")
    total = catalan(n)
    sizes = [catalan(a - 1) * catalan(n - a) for a in range(1, n + 1)]

    def match_size(a: int, b: int) -> int:
        lo, hi = min(a, b), max(a, b)
        return catalan(lo - 1) * catalan(hi - lo - 1) * catalan(n - hi)

    # pools[i][c]: units of commodity i currently held by class c
    pools = [
        [Fraction(total * sizes[i]) if c == i else Fraction(0) for c in range(n)]
        for i in range(n)
    ]
    levels = []
    arc_vals: dict = {}
    size = 2
    level_no = 0
    total_congestion = Fraction(0)
    while size <= 2 * (n - 1):
        level_no += 1
        worst = Fraction(0)
        worst_pair = None
        for start in range(0, n, size):
            block = list(range(start, min(start + size, n)))
            left = [c for c in block if c < start + size // 2]
            right = [c for c in block if c >= start + size // 2]
            if not left or not right:
                continue
            s_block = sum(sizes[c] for c in block)
            # all per-level amounts come from the pre-level pools
            pre = {c: [pools[i][c] for i in range(n)] for c in block}
            for l in left:
                for r in right:
                    for src, dst in ((l, r), (r, l)):
                        sent = Fraction(0)
                        for i in range(n):
                            amt = pre[src][i] * sizes[dst] / s_block
                            if amt:
                                pools[i][src] -= amt
                                pools[i][dst] += amt
                                sent += amt
                        if sent:
                            arc_vals[(src, dst)] = arc_vals.get(
                                (src, dst), Fraction(0)
                            ) + sent
                        cong = sent / (match_size(src + 1, dst + 1) * total)
                        if cong > worst:
                            worst, worst_pair = cong, (src + 1, dst + 1)
            # pool invariant: total mass at class c stays C_n * |C_c|
            for c in block:
                held = sum(pools[i][c] for i in range(n))
                if held != total * sizes[c]:
                    raise StructureMismatchError(
                        f"pool invariant broken at class {c}: {held}"
                    )
        levels.append(
            {
                "level": level_no,
                "group_size": min(size, n),
                "congestion": worst,
                "argmax_pair": worst_pair,
            }
        )
        total_congestion += worst
        if size >= n:
            break
        size *= 2
    # final demand certification: commodity i spread with density |C_i|
    for i in range(n):
        for c in range(n):
            if pools[i][c] != Fraction(sizes[i] * sizes[c]):
                raise StructureMismatchError(
                    f"commodity {i} holds {pools[i][c]} at class {c}, "
                    f"expected {sizes[i] * sizes[c]}"
                )
    den = 1
    for v in arc_vals.values():
        den = den * v.denominator // gcd(den, v.denominator)
    flow = ArcFlow(den, {a: int(v * den) for a, v in arc_vals.items()})
    max_arc = max(
        (
            (Fraction(w, den) / (match_size(a + 1, b + 1) * total), (a, b))
            for (a, b), w in flow.vals.items()
        ),
        default=(Fraction(0), None),
    )
    report = CongestionReport(
        rho=max_arc[0],
        argmax_arc=max_arc[1],
        normalization="uniform",
        rho_directed=max_arc[0],
        levels=levels,
    )
    details = {
        "n": n,
        "levels": levels,
        "total_matching_congestion": total_congestion,
        "max_pair_congestion": max_arc[0],
        "demands_certified": True,
    }
    return flow, report, details


# ---------------------------------------------------------------------------
# MSF via the class machinery


def solve_msf_by_classes(problem: MsfProblem) -> ArcFlow:
    """Solve a class-to-graph MSF on a k=3 flip graph with the recursive
    distribution flow: sources must be exactly one oriented class with a
    uniform surplus, sinks all vertices with a uniform deficit."""
    g = problem.graph
    if getattr(g, "k", None) != 3:
        raise InvalidParameterError("class decomposition requires a k=3 flip graph")
    st = oriented_structure(g.n)
    sources = {v for v, s in problem.surplus.items() if s}
    sigma = {problem.surplus[v] for v in sources}
    delta = set(problem.deficit.values())
    if len(sigma) != 1 or len(delta) != 1:
        raise InvalidParameterError("class strategy needs uniform surplus and deficit")
    if set(problem.deficit) != set(range(g.num_vertices)):
        raise InvalidParameterError("class strategy needs the whole graph as sink set")
    for t, members in enumerate(st.members):
        if sources == set(members):
            return ArcFlow.combine([(r_dist(g.n, t), delta.pop())])
    raise InvalidParameterError("source set is not an oriented class")
