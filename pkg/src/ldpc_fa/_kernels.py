"""numba loops for the flooding decoders.

Edge ids follow (CN, position) order. ``cn_ptr`` delimits each CN's edges,
``edge_vn`` maps edge -> VN, and ``vn_ptr``/``vn_edges`` list each VN's edge
ids in ascending CN order.

A non-empty ``trace`` array of shape (I, 2, E) receives, for frame 0, the
CN->VN messages (row 0) and VN->CN messages (row 1) of every iteration.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def _syndrome_ok(hard, cn_ptr, edge_vn):
    for m in range(cn_ptr.shape[0] - 1):
        s = 0
        for e in range(cn_ptr[m], cn_ptr[m + 1]):
            s ^= hard[edge_vn[e]]
        if s:
            return False
    return True


@njit(cache=True)
def minsum_batch(L, cn_ptr, edge_vn, vn_ptr, vn_edges, max_iters, early_stop,
                 offset, lim, trace):
    """Min-sum over a batch. ``lim`` > 0 selects saturating integer arithmetic.

    Returns (bits, iterations, converged, largest |message| seen).
    """
    B, N = L.shape
    M = cn_ptr.shape[0] - 1
    E = edge_vn.shape[0]
    bits = np.zeros((B, N), np.uint8)
    iters = np.full(B, max_iters, np.int64)
    conv = np.zeros(B, np.bool_)
    v2c = np.empty(E, L.dtype)
    c2v = np.empty(E, L.dtype)
    hard = np.empty(N, np.uint8)
    peak = L.dtype.type(0)
    for b in range(B):
        for e in range(E):
            v2c[e] = L[b, edge_vn[e]]
        for it in range(1, max_iters + 1):
            for m in range(M):
                lo = cn_ptr[m]
                hi = cn_ptr[m + 1]
                par = False
                m1 = np.inf
                m2 = np.inf
                i1 = -1
                for e in range(lo, hi):
                    x = v2c[e]
                    if x < 0:
                        par = not par
                        a = -x
                    else:
                        a = x
                    if a < m1:
                        m2 = m1
                        m1 = a
                        i1 = e
                    elif a < m2:
                        m2 = a
                for e in range(lo, hi):
                    mag = m2 if e == i1 else m1
                    if offset > 0:
                        mag = mag - offset
                        if mag < 0:
                            mag = 0
                    if lim > 0 and mag > lim:
                        mag = lim
                    neg = par != (v2c[e] < 0)
                    c2v[e] = -mag if neg else mag
            if trace.shape[0] > 0 and b == 0:
                for e in range(E):
                    trace[it - 1, 0, e] = c2v[e]
            last = it == max_iters
            if early_stop or last:
                for n in range(N):
                    s = L[b, n]
                    for k in range(vn_ptr[n], vn_ptr[n + 1]):
                        s += c2v[vn_edges[k]]
                    hard[n] = 1 if s < 0 else 0
                ok = _syndrome_ok(hard, cn_ptr, edge_vn)
                if ok or last:
                    bits[b, :] = hard
                    conv[b] = ok
                    iters[b] = it
                    break
            for n in range(N):
                s = L[b, n]
                for k in range(vn_ptr[n], vn_ptr[n + 1]):
                    s += c2v[vn_edges[k]]
                for k in range(vn_ptr[n], vn_ptr[n + 1]):
                    e = vn_edges[k]
                    x = s - c2v[e]
                    if lim > 0:
                        if x > lim:
                            x = lim
                        elif x < -lim:
                            x = -lim
                    v2c[e] = x
            if lim > 0:
                for e in range(E):
                    a = abs(v2c[e])
                    if a > peak:
                        peak = a
                    a = abs(c2v[e])
                    if a > peak:
                        peak = a
            if trace.shape[0] > 0 and b == 0:
                for e in range(E):
                    trace[it - 1, 1, e] = v2c[e]
    return bits, iters, conv, peak


@njit(cache=True)
def _label_cn_pass(v2c, c2v, cn_ptr, K):
    half = K // 2
    for m in range(cn_ptr.shape[0] - 1):
        lo = cn_ptr[m]
        hi = cn_ptr[m + 1]
        par = False
        m1 = K
        m2 = K
        i1 = -1
        for e in range(lo, hi):
            lab = v2c[e]
            if lab < half:
                par = not par
                a = half - 1 - lab
            else:
                a = lab - half
            if a < m1:
                m2 = m1
                m1 = a
                i1 = e
            elif a < m2:
                m2 = a
        for e in range(lo, hi):
            mag = m2 if e == i1 else m1
            if mag >= half:
                mag = half - 1
            neg = par != (v2c[e] < half)
            c2v[e] = half - 1 - mag if neg else half + mag


@njit(cache=True)
def _eval_tree(leaves, n_leaves, node_in, node_off, node_kb, tables, scratch):
    for i in range(n_leaves):
        scratch[i] = leaves[i]
    for j in range(node_in.shape[0]):
        a = scratch[node_in[j, 0]]
        c = scratch[node_in[j, 1]]
        scratch[n_leaves + j] = tables[node_off[j] + a * node_kb[j] + c]
    return scratch[n_leaves + node_in.shape[0] - 1]


@njit(cache=True)
def lut_batch(ch, cn_ptr, edge_vn, vn_ptr, vn_edges, n_iters, early_stop,
              k_msg_per_iter, vn_in, vn_off, vn_kb, dec_in, dec_off, dec_kb,
              tables, trace):
    """Finite-alphabet decoding of channel labels ``ch`` (B, N).

    Iteration t (1-based) runs the label-domain CN rule over alphabet
    ``k_msg_per_iter[t-1]``; VN stage t uses node rows ``vn_in[t-1]`` and
    the decision at iteration t uses ``dec_in[t-1]``.
    Leaf order of every tree: channel label, then incoming messages by
    ascending CN index (the target edge skipped for VN stages).
    """
    B, N = ch.shape
    E = edge_vn.shape[0]
    d_v = vn_ptr[1] - vn_ptr[0]
    bits = np.zeros((B, N), np.uint8)
    iters = np.full(B, n_iters, np.int64)
    conv = np.zeros(B, np.bool_)
    v2c = np.empty(E, np.int64)
    c2v = np.empty(E, np.int64)
    hard = np.empty(N, np.uint8)
    leaves = np.empty(d_v + 1, np.int64)
    scratch = np.empty(2 * d_v + 2, np.int64)
    for b in range(B):
        for e in range(E):
            v2c[e] = ch[b, edge_vn[e]]
        for it in range(1, n_iters + 1):
            _label_cn_pass(v2c, c2v, cn_ptr, k_msg_per_iter[it - 1])
            if trace.shape[0] > 0 and b == 0:
                for e in range(E):
                    trace[it - 1, 0, e] = c2v[e]
            last = it == n_iters
            if early_stop or last:
                for n in range(N):
                    leaves[0] = ch[b, n]
                    for k in range(d_v):
                        leaves[k + 1] = c2v[vn_edges[vn_ptr[n] + k]]
                    hard[n] = 1 - _eval_tree(leaves, d_v + 1, dec_in[it - 1],
                                             dec_off[it - 1], dec_kb[it - 1], tables, scratch)
                ok = _syndrome_ok(hard, cn_ptr, edge_vn)
                if ok or last:
                    bits[b, :] = hard
                    conv[b] = ok
                    iters[b] = it
                    break
            s_in = vn_in[it - 1]
            s_off = vn_off[it - 1]
            s_kb = vn_kb[it - 1]
            for n in range(N):
                base = vn_ptr[n]
                for j in range(d_v):
                    leaves[0] = ch[b, n]
                    p = 1
                    for k in range(d_v):
                        if k != j:
                            leaves[p] = c2v[vn_edges[base + k]]
                            p += 1
                    v2c[vn_edges[base + j]] = _eval_tree(leaves, d_v, s_in, s_off, s_kb,
                                                         tables, scratch)
            if trace.shape[0] > 0 and b == 0:
                for e in range(E):
                    trace[it - 1, 1, e] = v2c[e]
    return bits, iters, conv
