"""Exact maximum-weight general matching on flat arrays.

Primal-dual blossom algorithm, O(n^3).  Vertices are 0..n-1; blossom slots
occupy n..2n-1 and are recycled.  Dual deltas are computed by brute-force
scans over the edge list instead of least-slack edge caches: the decoder
calls this on sparse per-component graphs where the scan is cheap, and the
simpler bookkeeping keeps the implementation auditable.

The module exposes two entry points: ``max_weight_matching`` (numba kernel,
callable from other jitted code) and ``min_weight_perfect_matching`` (python
wrapper that applies the standard negate-and-shift reduction).
"""

from __future__ import annotations

import numpy as np
from numba import njit

_NONE = 0
_S = 1
_T = 2


@njit(cache=True)
def max_weight_matching(n, ei, ej, ew):  # pragma: no cover - exercised via wrapper
    """Return the mate array of a maximum-weight matching.

    ei/ej/ew: edge endpoint and weight arrays (no multi- or self-edges).
    mate[v] is the matched partner of v, or -1 if v is single.
    """
    m = ei.shape[0]
    if n == 0 or m == 0:
        return np.full(n, -1, np.int64)

    # adjacency in CSR form
    deg = np.zeros(n + 1, np.int64)
    for e in range(m):
        deg[ei[e] + 1] += 1
        deg[ej[e] + 1] += 1
    adj_start = np.cumsum(deg)
    adj_edge = np.zeros(adj_start[n], np.int64)
    fill = adj_start[:-1].copy()
    for e in range(m):
        adj_edge[fill[ei[e]]] = e
        fill[ei[e]] += 1
        adj_edge[fill[ej[e]]] = e
        fill[ej[e]] += 1

    nb = 2 * n
    mate = np.full(n, -1, np.int64)
    vblossom = np.arange(n)           # vertex -> top-level blossom
    parent = np.full(nb, -1, np.int64)
    label = np.zeros(nb, np.uint8)
    # tree link of a labeled blossom: edge (linku, linkv), linkv inside it
    linku = np.full(nb, -1, np.int64)
    linkv = np.full(nb, -1, np.int64)

    # non-trivial blossom b (n <= b < 2n) lives in row b - n:
    # odd alternating cycle over nsub sub-blossoms, cycle edge k running
    # from vertex ceu[k] in sub k to vertex cev[k] in sub (k+1) % nsub.
    nsub = np.zeros(n, np.int64)
    subs = np.zeros((n, n + 1), np.int64)
    ceu = np.zeros((n, n + 1), np.int64)
    cev = np.zeros((n, n + 1), np.int64)
    bbase = np.zeros(n, np.int64)     # base vertex
    bdual = np.zeros(n, np.float64)   # half of the blossom dual variable
    unused = np.arange(n, 2 * n)
    ust = np.zeros(1, np.int64)
    ust[0] = n                        # free blossom slot stack top

    max_weight = ew[0]
    for e in range(1, m):
        if ew[e] > max_weight:
            max_weight = ew[e]
    dual = np.full(n, max_weight)

    queue = np.zeros(n + 8, np.int64)
    qst = np.zeros(2, np.int64)       # queue head, tail
    # a vertex is scanned at most once per stage; edges turning tight after
    # its scan are picked up by the dual-delta pass over the full edge list
    inqueue = np.zeros(n, np.bool_)
    marker = np.zeros(nb, np.bool_)

    # scratch: blossom leaf walks, path tracing, cycle rotation
    vbuf = np.zeros(n, np.int64)
    sbuf = np.zeros(nb, np.int64)
    tru = np.zeros((2, n + 2), np.int64)
    trv = np.zeros((2, n + 2), np.int64)
    tlen = np.zeros(2, np.int64)
    pu = np.zeros(2 * n + 2, np.int64)
    pv = np.zeros(2 * n + 2, np.int64)
    fpn = np.zeros(2 * n + 4, np.int64)   # nodes of a path through a blossom
    fpu = np.zeros(2 * n + 4, np.int64)
    fpv = np.zeros(2 * n + 4, np.int64)
    rot = np.zeros(3 * (n + 1), np.int64)
    stk_a = np.zeros(4 * n + 8, np.int64)
    stk_b = np.zeros(4 * n + 8, np.int64)

    def _leaves(b):
        """Collect the vertices of blossom b into vbuf; returns the count."""
        if b < n:
            vbuf[0] = b
            return 1
        cnt = 0
        sp = 0
        sbuf[0] = b
        sp = 1
        while sp > 0:
            sp -= 1
            x = sbuf[sp]
            row = x - n
            for k in range(nsub[row]):
                s = subs[row, k]
                if s < n:
                    vbuf[cnt] = s
                    cnt += 1
                else:
                    sbuf[sp] = s
                    sp += 1
        return cnt

    def _base_of(b):
        if b < n:
            return b
        return bbase[b - n]

    def _slack(e):
        return dual[ei[e]] + dual[ej[e]] - 2.0 * ew[e]

    def _queue_blossom(b):
        cnt = _leaves(b)
        for k in range(cnt):
            v = vbuf[k]
            if not inqueue[v]:
                inqueue[v] = True
                queue[qst[1]] = v
                qst[1] += 1

    def _find_path(b, s):
        """Alternating path inside blossom b from sub-blossom s to the base.

        Fills fpn (sub-blossom nodes) and fpu/fpv (connecting edges); the
        first edge is matched.  Returns the number of edges (even).
        """
        row = b - n
        k = nsub[row]
        i = 0
        for t in range(k):
            if subs[row, t] == s:
                i = t
                break
        fpn[0] = s
        ne = 0
        nn = 1
        while i != 0:
            if i % 2 == 0:
                # walk backwards; cycle edges are stored forward, so flip
                fpu[ne] = cev[row, i - 1]
                fpv[ne] = ceu[row, i - 1]
                ne += 1
                fpn[nn] = subs[row, i - 1]
                nn += 1
                fpu[ne] = cev[row, i - 2]
                fpv[ne] = ceu[row, i - 2]
                ne += 1
                fpn[nn] = subs[row, i - 2]
                nn += 1
                i -= 2
            else:
                fpu[ne] = ceu[row, i]
                fpv[ne] = cev[row, i]
                ne += 1
                fpn[nn] = subs[row, i + 1]
                nn += 1
                fpu[ne] = ceu[row, i + 1]
                fpv[ne] = cev[row, i + 1]
                ne += 1
                fpn[nn] = subs[row, (i + 2) % k]
                nn += 1
                i = (i + 2) % k
        return ne

    def _augment_blossom(b, v):
        """Augment inside blossom b from vertex v to the blossom base."""
        sp = 0
        stk_a[0] = b
        stk_b[0] = v
        sp = 1
        while sp > 0:
            sp -= 1
            top = stk_a[sp]
            sub = stk_b[sp]
            cur = parent[sub]
            if cur != top:
                stk_a[sp] = top
                stk_b[sp] = cur
                sp += 1
            ne = _find_path(cur, sub)
            for i in range(0, ne, 2):
                x = fpu[i + 1]
                y = fpv[i + 1]
                mate[x] = y
                mate[y] = x
                nx = fpn[i + 1]
                if nx >= n:
                    stk_a[sp] = nx
                    stk_b[sp] = x
                    sp += 1
                ny = fpn[i + 2]
                if ny >= n:
                    stk_a[sp] = ny
                    stk_b[sp] = y
                    sp += 1
            # rotate the cycle so that `sub` becomes position 0 (new base)
            row = cur - n
            k = nsub[row]
            pos = 0
            for t in range(k):
                if subs[row, t] == sub:
                    pos = t
                    break
            if pos != 0:
                for t in range(k):
                    rot[t] = subs[row, (pos + t) % k]
                    rot[t + k] = ceu[row, (pos + t) % k]
                    rot[t + 2 * k] = cev[row, (pos + t) % k]
                for t in range(k):
                    subs[row, t] = rot[t]
                    ceu[row, t] = rot[t + k]
                    cev[row, t] = rot[t + 2 * k]
            bbase[row] = sub if sub < n else bbase[sub - n]

    def _assign_top(b):
        cnt = _leaves(b)
        for k in range(cnt):
            vblossom[vbuf[k]] = b

    def _add_unlabeled(v, w):
        """Label w's blossom T and its mate's blossom S; queue the latter."""
        wb = vblossom[w]
        label[wb] = _T
        linku[wb] = v
        linkv[wb] = w
        wbase = _base_of(wb)
        y = mate[wbase]
        yb = vblossom[y]
        label[yb] = _S
        # the S-blossom hangs off the matched edge, which runs from the
        # T-blossom base (not necessarily from w)
        linku[yb] = wbase
        linkv[yb] = y
        _queue_blossom(yb)

    def _trace(v, w):
        """Trace tree paths from v and w; fills pu/pv with the fused path.

        Returns the path length in edges.  If the paths meet, the result is
        an odd alternating cycle (new blossom); otherwise it is an
        augmenting path between two unmatched blossoms.
        """
        cur = 0
        tlen[0] = 1
        tlen[1] = 0
        tru[0, 0] = v
        trv[0, 0] = w
        first_common = -1
        nmarked = 0
        vv = v
        ww = w
        while vv != -1 or ww != -1:
            vb = vblossom[vv]
            if marker[vb]:
                first_common = vb
                break
            marker[vb] = True
            sbuf[nmarked] = vb
            nmarked += 1
            if linku[vb] == -1:
                vv = -1
            else:
                tru[cur, tlen[cur]] = linku[vb]
                trv[cur, tlen[cur]] = linkv[vb]
                tlen[cur] += 1
                vv = linku[vb]
            if ww != -1:
                t = vv
                vv = ww
                ww = t
                cur ^= 1
        for k in range(nmarked):
            marker[sbuf[k]] = False
        oth = cur ^ 1
        if first_common != -1:
            while tlen[oth] > 0 and vblossom[tru[oth, tlen[oth] - 1]] != first_common:
                tlen[oth] -= 1
        plen = 0
        for k in range(tlen[cur] - 1, -1, -1):
            pu[plen] = tru[cur, k]
            pv[plen] = trv[cur, k]
            plen += 1
        for k in range(tlen[oth]):
            pu[plen] = trv[oth, k]
            pv[plen] = tru[oth, k]
            plen += 1
        return plen

    def _make_blossom(plen):
        """Shrink the odd cycle in pu/pv[0:plen] into a new S-blossom."""
        ust[0] -= 1
        b = unused[ust[0]]
        row = b - n
        nsub[row] = plen
        for k in range(plen):
            s = vblossom[pu[k]]
            subs[row, k] = s
            ceu[row, k] = pu[k]
            cev[row, k] = pv[k]
            parent[s] = b
        base_blossom = subs[row, 0]
        bbase[row] = _base_of(base_blossom)
        bdual[row] = 0.0
        parent[b] = -1
        _assign_top(b)
        label[b] = _S
        linku[b] = linku[base_blossom]
        linkv[b] = linkv[base_blossom]
        # former T-sub-blossoms just became S; their vertices must be scanned
        for k in range(1, plen, 2):
            _queue_blossom(subs[row, k])

    def _expand_t(b):
        """Expand T-blossom b whose dual reached zero; relabel the path."""
        row = b - n
        for k in range(nsub[row]):
            s = subs[row, k]
            parent[s] = -1
            if s < n:
                vblossom[s] = s
            else:
                _assign_top(s)
        entry_u = linku[b]
        entry_v = linkv[b]
        sub = vblossom[entry_v]
        label[sub] = _T
        linku[sub] = entry_u
        linkv[sub] = entry_v
        ne = _find_path(b, sub)
        for i in range(0, ne, 2):
            s1 = fpn[i + 1]
            label[s1] = _S
            linku[s1] = fpu[i]
            linkv[s1] = fpv[i]
            _queue_blossom(s1)
            s2 = fpn[i + 2]
            label[s2] = _T
            linku[s2] = fpu[i + 1]
            linkv[s2] = fpv[i + 1]
        label[b] = _NONE
        linku[b] = -1
        linkv[b] = -1
        nsub[row] = 0
        unused[ust[0]] = b
        ust[0] += 1

    def _expand_zero_dual():
        """Expand, recursively, all top-level blossoms with zero dual."""
        sp = 0
        for b in range(n, nb):
            if nsub[b - n] > 0 and parent[b] == -1 and bdual[b - n] == 0.0:
                stk_a[sp] = b
                sp += 1
        while sp > 0:
            sp -= 1
            b = stk_a[sp]
            row = b - n
            for k in range(nsub[row]):
                s = subs[row, k]
                parent[s] = -1
                if s < n:
                    vblossom[s] = s
                elif bdual[s - n] == 0.0:
                    stk_a[sp] = s
                    sp += 1
                else:
                    _assign_top(s)
            nsub[row] = 0
            label[b] = _NONE
            linku[b] = -1
            linkv[b] = -1
            unused[ust[0]] = b
            ust[0] += 1

    def _augment(plen):
        """Augment the matching along the alternating path in pu/pv."""
        for k in range(0, plen, 2):
            x = pu[k]
            y = pv[k]
            xb = vblossom[x]
            if xb != x:
                _augment_blossom(xb, x)
            yb = vblossom[y]
            if yb != y:
                _augment_blossom(yb, y)
            mate[x] = y
            mate[y] = x

    while True:
        # new stage: fresh labels, queue rooted at unmatched blossoms
        for b in range(nb):
            label[b] = _NONE
            linku[b] = -1
            linkv[b] = -1
        for v in range(n):
            inqueue[v] = False
        qst[0] = 0
        qst[1] = 0
        for v in range(n):
            if mate[v] < 0 and label[vblossom[v]] == _NONE:
                b = vblossom[v]
                label[b] = _S
                _queue_blossom(b)
        if qst[1] == 0:
            break

        augmented = False
        guard = 8 * n * n + 64
        while True:
            guard -= 1
            if guard < 0:
                raise RuntimeError("blossom matching failed to converge")
            # scan the queue for tight edges
            found_path = -1
            while qst[0] < qst[1] and found_path < 0:
                v = queue[qst[0]]
                qst[0] += 1
                for t in range(adj_start[v], adj_start[v + 1]):
                    e = adj_edge[t]
                    w = ej[e] if ei[e] == v else ei[e]
                    vb = vblossom[v]
                    wb = vblossom[w]
                    if vb == wb:
                        continue
                    if _slack(e) <= 0.0:
                        wl = label[wb]
                        if wl == _NONE:
                            _add_unlabeled(v, w)
                        elif wl == _S:
                            plen = _trace(v, w)
                            p = pu[0]
                            q = pv[plen - 1]
                            if vblossom[p] == vblossom[q]:
                                _make_blossom(plen)
                            else:
                                found_path = plen
                                break
            if found_path >= 0:
                _augment(found_path)
                augmented = True
                break

            # dual delta step; type 1 = optimum, 2 = S-free edge,
            # 3 = S-S edge (half slack), 4 = T-blossom expansion
            delta_type = 1
            delta = np.inf
            delta_edge = -1
            delta_blossom = -1
            for v in range(n):
                if label[vblossom[v]] == _S and dual[v] < delta:
                    delta = dual[v]
            for e in range(m):
                bi = vblossom[ei[e]]
                bj = vblossom[ej[e]]
                if bi == bj:
                    continue
                li = label[bi]
                lj = label[bj]
                if li == _S and lj == _S:
                    sl = _slack(e) * 0.5
                    if sl <= delta:
                        delta_type = 3
                        delta = sl
                        delta_edge = e
                elif (li == _S and lj == _NONE) or (li == _NONE and lj == _S):
                    sl = _slack(e)
                    if sl <= delta:
                        delta_type = 2
                        delta = sl
                        delta_edge = e
            for b in range(n, nb):
                if nsub[b - n] > 0 and parent[b] == -1 and label[b] == _T:
                    if bdual[b - n] < delta:
                        delta_type = 4
                        delta = bdual[b - n]
                        delta_blossom = b
            if delta < 0.0:
                delta = 0.0  # guard against float round-off

            for v in range(n):
                lv = label[vblossom[v]]
                if lv == _S:
                    dual[v] -= delta
                elif lv == _T:
                    dual[v] += delta
            for b in range(n, nb):
                if nsub[b - n] > 0 and parent[b] == -1:
                    if label[b] == _S:
                        bdual[b - n] += delta
                    elif label[b] == _T:
                        bdual[b - n] -= delta

            if delta_type == 1:
                break
            if delta_type == 2:
                v = ei[delta_edge]
                w = ej[delta_edge]
                if label[vblossom[v]] != _S:
                    v, w = w, v
                _add_unlabeled(v, w)
            elif delta_type == 3:
                v = ei[delta_edge]
                w = ej[delta_edge]
                plen = _trace(v, w)
                p = pu[0]
                q = pv[plen - 1]
                if vblossom[p] == vblossom[q]:
                    _make_blossom(plen)
                else:
                    _augment(plen)
                    augmented = True
                    break
            elif delta_type == 4:
                _expand_t(delta_blossom)

        _expand_zero_dual()
        if not augmented:
            break

    return mate


def min_weight_perfect_matching(n: int, edges) -> np.ndarray:
    """Minimum-weight perfect matching over the given edges.

    edges: iterable of (i, j, weight).  A perfect matching must exist.
    Returns the mate array; raises ValueError if some vertex stays single.
    """
    ei = np.array([e[0] for e in edges], dtype=np.int64)
    ej = np.array([e[1] for e in edges], dtype=np.int64)
    ew = np.array([float(e[2]) for e in edges], dtype=np.float64)
    if ei.shape[0] == 0:
        if n > 0:
            raise ValueError("no edges: perfect matching impossible")
        return np.zeros(0, dtype=np.int64)
    # negate, then shift so that maximum-weight implies maximum-cardinality
    neg = -ew
    lo = float(np.min(neg))
    span = float(np.max(neg)) - lo
    shift = n * span - lo if span > 0.0 else 1.0 - lo
    mate = max_weight_matching(n, ei, ej, neg + shift)
    if n % 2 == 0 and np.any(mate < 0):
        raise ValueError("graph admits no perfect matching")
    return mate
