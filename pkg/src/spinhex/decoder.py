"""Minimum-weight perfect-matching decoder on the DEM-derived graph.

The matching graph has one node per detector plus a boundary node; each
<=2-detector mechanism becomes an edge of weight ln((1-p)/p).  Decoding a
syndrome pairs up flagged detectors (or sends them to the boundary) so the
total shortest-path weight is minimal; the predicted observable mask is the
XOR of edge masks along all matched paths.

Pair distances are Dijkstra shortest paths through the detector-only graph
(chains through the boundary are represented by the two boundary terms
instead), precomputed once per graph together with per-path observable
masks.  Matching is exact: flagged detectors split into components across
which pairing can never beat two boundary matches (w(u,v) >= db(u)+db(v)),
small components are solved by exhaustive dynamic programming over defect
subsets, and larger ones by blossom perfect matching on a mirrored copy of
the component.  A recursive brute-force oracle provides an independent
route for validation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

from ._blossom import max_weight_matching
from .dem import DetectorErrorModel, merge_probability
from .sampler import SampleResult, unpack_bits

_MAX_DP_COMPONENT = 12
BOUNDARY = -1  # virtual partner index in pairings


@dataclass
class MatchingGraph:
    num_detectors: int
    num_observables: int
    # Parallel arrays, one entry per merged edge; v == num_detectors is the
    # boundary node.
    edge_u: np.ndarray
    edge_v: np.ndarray
    edge_weight: np.ndarray
    edge_mask: np.ndarray
    _paths: tuple | None = field(default=None, repr=False)

    @property
    def num_edges(self) -> int:
        return len(self.edge_u)


def build_matching_graph(dem: DetectorErrorModel) -> MatchingGraph:
    """Weighted matching graph; parallel edges merged before weighting."""
    merged: dict[tuple[int, int], tuple[float, float, int]] = {}
    for mech in dem.mechanisms:
        if not mech.detectors:
            continue  # observable-only mechanisms cannot be matched
        if len(mech.detectors) > 2:
            raise ValueError(f"undecomposed mechanism {mech}")
        u = mech.detectors[0]
        v = mech.detectors[1] if len(mech.detectors) == 2 else dem.num_detectors
        key = (u, v)
        if key in merged:
            p, pmax, mask = merged[key]
            if mech.probability > pmax:
                pmax, mask = mech.probability, mech.observable_mask
            merged[key] = (merge_probability(p, mech.probability), pmax, mask)
        else:
            merged[key] = (mech.probability, mech.probability, mech.observable_mask)

    us, vs, ws, masks = [], [], [], []
    for (u, v), (p, _, mask) in sorted(merged.items()):
        if p >= 0.5:
            raise ValueError(f"edge ({u},{v}) has probability {p} >= 1/2")
        us.append(u)
        vs.append(v)
        ws.append(math.log((1.0 - p) / p))
        masks.append(mask)
    return MatchingGraph(
        num_detectors=dem.num_detectors,
        num_observables=dem.num_observables,
        edge_u=np.array(us, dtype=np.int64),
        edge_v=np.array(vs, dtype=np.int64),
        edge_weight=np.array(ws, dtype=np.float64),
        edge_mask=np.array(masks, dtype=np.int64),
    )


@njit(cache=True)
def _propagate_masks(order, pred, edge_mask_dense):
    n = order.shape[0]
    masks = np.zeros(n, dtype=np.int8)
    for k in range(n):
        v = order[k]
        p = pred[v]
        if p < 0:
            continue
        masks[v] = masks[p] ^ edge_mask_dense[p, v]
    return masks


def _ensure_paths(graph: MatchingGraph) -> tuple:
    """(pair_dist, pair_mask, bdist, bmask): APSP over the detector subgraph
    plus shortest boundary distances, with per-path observable masks."""
    if graph._paths is not None:
        return graph._paths
    nd = graph.num_detectors
    b = nd

    # Minimum-weight dense edge mask lookup for mask propagation (between a
    # fixed node pair, Dijkstra uses the lightest parallel edge; merging
    # already guaranteed uniqueness per pair).
    full_rows = np.concatenate([graph.edge_u, graph.edge_v])
    full_cols = np.concatenate([graph.edge_v, graph.edge_u])
    full_w = np.concatenate([graph.edge_weight, graph.edge_weight])
    full = csr_matrix((full_w, (full_rows, full_cols)), shape=(nd + 1, nd + 1))

    dense_mask = np.zeros((nd + 1, nd + 1), dtype=np.int8)
    for u, v, m in zip(graph.edge_u, graph.edge_v, graph.edge_mask):
        dense_mask[u, v] = m
        dense_mask[v, u] = m

    # Boundary distances over the full graph.
    bdist_all, bpred = dijkstra(
        full, directed=False, indices=[b], return_predecessors=True
    )
    bdist = bdist_all[0, :nd]
    border = np.argsort(bdist_all[0])
    bmask = _propagate_masks(
        border.astype(np.int64), bpred[0].astype(np.int64), dense_mask
    )[:nd]

    # Pairwise distances over the detector-only subgraph.
    interior = ~((graph.edge_u == b) | (graph.edge_v == b))
    sub_rows = np.concatenate([graph.edge_u[interior], graph.edge_v[interior]])
    sub_cols = np.concatenate([graph.edge_v[interior], graph.edge_u[interior]])
    sub_w = np.concatenate([graph.edge_weight[interior]] * 2)
    sub = csr_matrix((sub_w, (sub_rows, sub_cols)), shape=(nd, nd))
    pair_dist, pred = dijkstra(sub, directed=False, return_predecessors=True)
    pair_mask = np.zeros((nd, nd), dtype=np.int8)
    for src in range(nd):
        order = np.argsort(pair_dist[src]).astype(np.int64)
        pair_mask[src] = _propagate_masks(
            order, pred[src].astype(np.int64), dense_mask
        )
    graph._paths = (pair_dist, pair_mask, bdist, bmask)
    return graph._paths


@njit(cache=True)
def _solve_component(w, db, start_mask):
    """Exact min-weight pairing of one defect component by subset DP.

    w[i, j] is the reduced pair weight min(path, both-boundary); db[i] the
    boundary weight; start_mask[i, j] / start_mask[i, i] the observable
    masks of those options.  Returns (weight, mask) with lexicographically
    lowest pairing on ties (partners tried in ascending order, boundary
    last).
    """
    c = w.shape[0]
    size = 1 << c
    dp = np.empty(size, dtype=np.float64)
    dp[0] = 0.0
    for s in range(1, size):
        # Lowest set bit must be matched; try boundary and every partner.
        i = 0
        while not (s >> i) & 1:
            i += 1
        best = dp[s & ~(1 << i)] + db[i]
        for j in range(i + 1, c):
            if (s >> j) & 1:
                cand = dp[s & ~(1 << i) & ~(1 << j)] + w[i, j]
                if cand < best:
                    best = cand
        dp[s] = best
    total = dp[size - 1]
    # Reconstruct: lowest index first, real partners in ascending order
    # before the boundary, first option achieving the optimum.
    mask = 0
    s = size - 1
    while s:
        i = 0
        while not (s >> i) & 1:
            i += 1
        chosen = -2
        for j in range(i + 1, c):
            if (s >> j) & 1 and dp[s & ~(1 << i) & ~(1 << j)] + w[i, j] <= dp[s] + 1e-12:
                chosen = j
                break
        if chosen == -2 or dp[s & ~(1 << i)] + db[i] < dp[s & ~(1 << i) & ~(1 << chosen)] + w[i, chosen] - 1e-12:
            mask ^= start_mask[i, i]
            s &= ~(1 << i)
        else:
            mask ^= start_mask[i, chosen]
            s &= ~(1 << i) & ~(1 << chosen)
    return total, mask


def _reduced_problem(graph: MatchingGraph, defects: np.ndarray):
    """Reduced weights/masks over the flagged detectors."""
    pair_dist, pair_mask, bdist, bmask = _ensure_paths(graph)
    d = defects
    m = len(d)
    pd = pair_dist[np.ix_(d, d)]
    pm = pair_mask[np.ix_(d, d)].astype(np.int64)
    db = bdist[d]
    bsum = db[:, None] + db[None, :]
    w = np.minimum(pd, bsum)
    # Mask of the realized route: direct path unless boundary is cheaper.
    route_mask = np.where(pd <= bsum, pm, (bmask[d][:, None] ^ bmask[d][None, :]))
    np.fill_diagonal(route_mask, bmask[d])  # diagonal holds boundary masks
    return w, db, route_mask


def _components(w: np.ndarray, db: np.ndarray) -> list[np.ndarray]:
    """Split defects where pairing can never beat two boundary matches."""
    m = len(db)
    keep = w < (db[:, None] + db[None, :]) - 1e-12
    parent = list(range(m))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i in range(m):
        for j in range(i + 1, m):
            if keep[i, j]:
                parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(m):
        groups.setdefault(find(i), []).append(i)
    return [np.array(sorted(g), dtype=np.int64) for _, g in sorted(groups.items())]


def decode(graph: MatchingGraph, syndrome) -> int:
    """Predicted observable mask for the flagged detector set."""
    return decode_detailed(graph, syndrome)[1]


def decode_detailed(graph: MatchingGraph, syndrome) -> tuple[float, int]:
    """(total matching weight, predicted observable mask)."""
    defects = np.asarray(sorted(set(int(s) for s in syndrome)), dtype=np.int64)
    if defects.size == 0:
        return 0.0, 0
    if defects.min() < 0 or defects.max() >= graph.num_detectors:
        raise ValueError("syndrome contains out-of-range detector indices")
    w, db, route_mask = _reduced_problem(graph, defects)
    total = 0.0
    mask = 0
    for comp in _components(w, db):
        cw = np.ascontiguousarray(w[np.ix_(comp, comp)])
        cm = np.ascontiguousarray(route_mask[np.ix_(comp, comp)])
        if len(comp) > _MAX_DP_COMPONENT:
            t, mk = _solve_blossom_component(cw, db[comp], cm)
        else:
            t, mk = _solve_component(cw, db[comp], cm)
        total += t
        mask ^= int(mk)
    if math.isinf(total):
        raise ValueError("flagged detector has no path to the boundary or a partner")
    return total, mask


@njit(cache=True)
def _solve_blossom_component(w, db, route_mask):
    """Exact pairing of one component beyond the subset-DP limit.

    Boundary matches are folded into a perfect matching by mirroring the
    component: defect i gets a twin i+c with a diagonal edge of weight
    db[i], and a blossom matching is solved on the doubled graph.  Only
    pair edges strictly cheaper than their two boundary terms are kept
    (any dropped edge's route costs no less than the two diagonals that
    replace it), each with a zero-weight twin copy so the twins of a
    paired edge stay matchable.  Returns (inf, 0) when no perfect
    matching exists (some defect has no finite route at all).
    """
    c = w.shape[0]
    ns = 0
    for i in range(c):
        for j in range(i + 1, c):
            if w[i, j] < db[i] + db[j] - 1e-12:
                ns += 1
    ei = np.empty(2 * ns + c, np.int64)
    ej = np.empty(2 * ns + c, np.int64)
    ew = np.empty(2 * ns + c, np.float64)
    k = 0
    for i in range(c):
        for j in range(i + 1, c):
            if w[i, j] < db[i] + db[j] - 1e-12:
                ei[k] = i
                ej[k] = j
                ew[k] = w[i, j]
                ei[k + 1] = i + c
                ej[k + 1] = j + c
                ew[k + 1] = 0.0
                k += 2
    for i in range(c):
        if np.isfinite(db[i]):
            ei[k] = i
            ej[k] = i + c
            ew[k] = db[i]
            k += 1
    if k == 0:
        return np.inf, 0
    # negate and shift so maximum weight implies maximum cardinality
    neg = -ew[:k]
    lo = neg.min()
    span = neg.max() - lo
    shift = 2 * c * span - lo if span > 0.0 else 1.0 - lo
    mate = max_weight_matching(2 * c, ei[:k], ej[:k], neg + shift)
    total = 0.0
    mask = 0
    for i in range(c):
        j = mate[i]
        if j < 0:
            return np.inf, 0
        if j == i + c:
            total += db[i]
            mask ^= route_mask[i, i]
        elif i < j and j < c:
            total += w[i, j]
            mask ^= route_mask[i, j]
    return total, mask


def brute_force_decode(graph: MatchingGraph, syndrome) -> tuple[float, int]:
    """Exhaustive minimum over all pairings (boundary allowed); <= 12 defects."""
    defects = np.asarray(sorted(set(int(s) for s in syndrome)), dtype=np.int64)
    if defects.size == 0:
        return 0.0, 0
    if defects.size > 12:
        raise ValueError(f"{defects.size} flagged detectors exceed brute-force limit 12")
    w, db, route_mask = _reduced_problem(graph, defects)

    best = [math.inf, 0]

    def rec(remaining: tuple[int, ...], weight: float, mask: int) -> None:
        if not remaining:
            if weight < best[0]:
                best[0], best[1] = weight, mask
            return
        if weight >= best[0]:
            return
        i, rest = remaining[0], remaining[1:]
        for j in rest:
            rec(
                tuple(x for x in rest if x != j),
                weight + w[i, j],
                mask ^ int(route_mask[i, j]),
            )
        rec(rest, weight + db[i], mask ^ int(route_mask[i, i]))

    rec(tuple(range(defects.size)), 0.0, 0)
    return best[0], best[1]


@njit(cache=True)
def _decode_batch_kernel(
    det_words, obs_words, shots, pair_dist, pair_mask, bdist, bmask, max_dp
):
    """Per-shot exact matching over a packed sample batch.

    Returns (#handled-shot failures, predicted masks, fallback shot list);
    shots hitting a degenerate component (no perfect matching) are
    deferred to the Python path and get mask -1 here.
    """
    num_det = det_words.shape[0]
    failures = 0
    predicted = np.zeros(shots, dtype=np.int64)
    fallback = np.empty(shots, dtype=np.int64)
    nfall = 0
    defects = np.empty(num_det, dtype=np.int64)
    for s in range(shots):
        w = s >> 6
        bit = np.uint64(s & 63)
        m = 0
        for d in range(num_det):
            if (det_words[d, w] >> bit) & np.uint64(1):
                defects[m] = d
                m += 1
        actual = np.int64((obs_words[0, w] >> bit) & np.uint64(1))
        mask = 0
        ok = True
        if m > 0:
            wred = np.empty((m, m), dtype=np.float64)
            mred = np.empty((m, m), dtype=np.int64)
            dbv = np.empty(m, dtype=np.float64)
            parent = np.empty(m, dtype=np.int64)
            for i in range(m):
                di = defects[i]
                dbv[i] = bdist[di]
                mred[i, i] = bmask[di]
                parent[i] = i
            for i in range(m):
                for j in range(i + 1, m):
                    pd = pair_dist[defects[i], defects[j]]
                    bs = dbv[i] + dbv[j]
                    if pd <= bs:
                        wred[i, j] = pd
                        mred[i, j] = pair_mask[defects[i], defects[j]]
                    else:
                        wred[i, j] = bs
                        mred[i, j] = bmask[defects[i]] ^ bmask[defects[j]]
                    wred[j, i] = wred[i, j]
                    mred[j, i] = mred[i, j]
                    if pd < bs - 1e-12:
                        # Union components joined by a useful pair edge.
                        ri = i
                        while parent[ri] != ri:
                            ri = parent[ri]
                        rj = j
                        while parent[rj] != rj:
                            rj = parent[rj]
                        if ri != rj:
                            parent[ri] = rj
            for i in range(m):
                ri = i
                while parent[ri] != ri:
                    ri = parent[ri]
                parent[i] = ri
            comp_buf = np.empty(m, dtype=np.int64)
            for root in range(m):
                if parent[root] != root:
                    continue
                c = 0
                for i in range(m):
                    if parent[i] == root:
                        comp_buf[c] = i
                        c += 1
                cw = np.empty((c, c), dtype=np.float64)
                cm = np.empty((c, c), dtype=np.int64)
                cd = np.empty(c, dtype=np.float64)
                for a in range(c):
                    cd[a] = dbv[comp_buf[a]]
                    for b in range(c):
                        cw[a, b] = wred[comp_buf[a], comp_buf[b]]
                        cm[a, b] = mred[comp_buf[a], comp_buf[b]]
                if c > max_dp:
                    t, mk = _solve_blossom_component(cw, cd, cm)
                    if not np.isfinite(t):
                        ok = False
                        break
                else:
                    _, mk = _solve_component(cw, cd, cm)
                mask ^= mk
        if not ok:
            predicted[s] = -1
            fallback[nfall] = s
            nfall += 1
            continue
        predicted[s] = mask
        if mask != actual:
            failures += 1
    return failures, predicted, fallback[:nfall]


def logical_error_count(samples: SampleResult, graph: MatchingGraph) -> int:
    """Shots whose predicted observable mask differs from the sampled one."""
    if samples.num_detectors != graph.num_detectors:
        raise ValueError(
            f"sample has {samples.num_detectors} detectors, "
            f"graph has {graph.num_detectors}"
        )
    if samples.num_observables != graph.num_observables:
        raise ValueError("observable count mismatch")
    if samples.num_observables == 1:
        pair_dist, pair_mask, bdist, bmask = _ensure_paths(graph)
        failures, _, fallback = _decode_batch_kernel(
            samples.det_words,
            samples.obs_words,
            samples.shots,
            pair_dist,
            pair_mask,
            bdist,
            bmask,
            _MAX_DP_COMPONENT,
        )
        if len(fallback):
            det = unpack_bits(samples.det_words, samples.shots)
            obs = unpack_bits(samples.obs_words, samples.shots)
            for s in fallback:
                if decode(graph, np.flatnonzero(det[:, s])) != int(obs[0, s]):
                    failures += 1
        return int(failures)

    det = unpack_bits(samples.det_words, samples.shots)
    obs = unpack_bits(samples.obs_words, samples.shots)
    failures = 0
    for s in range(samples.shots):
        predicted = decode(graph, np.flatnonzero(det[:, s]))
        actual = 0
        for o in range(samples.num_observables):
            if obs[o, s]:
                actual |= 1 << o
        if predicted != actual:
            failures += 1
    return failures
