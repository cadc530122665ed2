"""Numba kernels behind the decoders and the Monte-Carlo drivers.

All kernels are serial and release the GIL; callers parallelize by slicing
frame ranges across a thread pool.  Per-frame randomness is keyed by the
absolute frame index, so results never depend on chunking or thread count.

Summation follows adjacency order everywhere, which makes every decode
bit-deterministic for identical inputs.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

from .rng import fill_bits, fill_normals, stream_state

ATANH_CLIP = 1.0 - 1e-12


@njit(cache=True, nogil=True)
def syndrome_ok(chk_ptr, edge_vn, z):
    for j in range(chk_ptr.size - 1):
        p = np.uint8(0)
        for e in range(chk_ptr[j], chk_ptr[j + 1]):
            p ^= z[edge_vn[e]]
        if p:
            return False
    return True


@njit(cache=True, nogil=True)
def bp_core(chk_ptr, edge_vn, var_ptr, var_edges, l_ch, max_iters, llr_max,
            use_minsum, v2c, c2v, l_app, z, th, pre,
            trace_c2v, trace_app, want_trace, nsmea, want_nsmea):
    """Flooding sum-product decode of one frame.

    The syndrome of the hard decision is checked before the first message
    update (iteration 0) and after every iteration; returns (converged,
    iterations_used).  c2v/v2c/l_app/z are caller-owned work buffers; th/pre
    must hold the largest check degree.
    """
    n = l_ch.size
    m = chk_ptr.size - 1
    num_edges = edge_vn.size

    for i in range(n):
        la = l_ch[i]
        if la > llr_max:
            la = llr_max
        elif la < -llr_max:
            la = -llr_max
        l_app[i] = la
        z[i] = 1 if la <= 0.0 else 0
    if syndrome_ok(chk_ptr, edge_vn, z):
        return True, 0

    for e in range(num_edges):
        c2v[e] = 0.0

    for it in range(1, max_iters + 1):
        # VN -> CN: channel LLR plus all incoming check messages but the target's
        for i in range(n):
            s = l_ch[i]
            for a in range(var_ptr[i], var_ptr[i + 1]):
                s += c2v[var_edges[a]]
            for a in range(var_ptr[i], var_ptr[i + 1]):
                e = var_edges[a]
                msg = s - c2v[e]
                if msg > llr_max:
                    msg = llr_max
                elif msg < -llr_max:
                    msg = -llr_max
                v2c[e] = msg

        # CN -> VN
        for j in range(m):
            lo = chk_ptr[j]
            deg = chk_ptr[j + 1] - lo
            if use_minsum:
                sgn = 1.0
                m1 = 1e300
                m2 = 1e300
                arg1 = -1
                for kk in range(deg):
                    v = v2c[lo + kk]
                    if v < 0.0:
                        sgn = -sgn
                    av = -v if v < 0.0 else v
                    if av < m1:
                        m2 = m1
                        m1 = av
                        arg1 = kk
                    elif av < m2:
                        m2 = av
                for kk in range(deg):
                    v = v2c[lo + kk]
                    mag = m2 if kk == arg1 else m1
                    if mag > llr_max:
                        mag = llr_max
                    c2v[lo + kk] = (sgn if v >= 0.0 else -sgn) * mag
            else:
                # exact tanh rule with prefix/suffix products for leave-one-out
                p = 1.0
                for kk in range(deg):
                    t = math.tanh(0.5 * v2c[lo + kk])
                    th[kk] = t
                    pre[kk] = p
                    p *= t
                suf = 1.0
                for kk in range(deg - 1, -1, -1):
                    ex = pre[kk] * suf
                    if ex > ATANH_CLIP:
                        ex = ATANH_CLIP
                    elif ex < -ATANH_CLIP:
                        ex = -ATANH_CLIP
                    c2v[lo + kk] = 2.0 * math.atanh(ex)
                    suf *= th[kk]

        # APP and hard decision
        for i in range(n):
            s = l_ch[i]
            for a in range(var_ptr[i], var_ptr[i + 1]):
                s += c2v[var_edges[a]]
            if s > llr_max:
                s = llr_max
            elif s < -llr_max:
                s = -llr_max
            l_app[i] = s
            z[i] = 1 if s <= 0.0 else 0

        if want_trace:
            for e in range(num_edges):
                trace_c2v[it - 1, e] = 1 if c2v[e] >= 0.0 else -1
            for i in range(n):
                trace_app[it - 1, i] = 1 if l_app[i] >= 0.0 else -1
        if want_nsmea:
            for i in range(n):
                ai = 1 if l_app[i] >= 0.0 else -1
                for a in range(var_ptr[i], var_ptr[i + 1]):
                    ce = 1 if c2v[var_edges[a]] >= 0.0 else -1
                    if ce != ai:
                        nsmea[i] += 1

        if syndrome_ok(chk_ptr, edge_vn, z):
            return True, it
    return False, max_iters


@njit(cache=True, nogil=True)
def _max_check_degree(chk_ptr):
    maxd = 1
    for j in range(chk_ptr.size - 1):
        d = chk_ptr[j + 1] - chk_ptr[j]
        if d > maxd:
            maxd = d
    return maxd


@njit(cache=True, nogil=True)
def gen_frames_chunk(seed, frame_base, gmat, all_zero, sigma2,
                     out_ctx, out_y, out_lch):
    """Draw transmitted codewords and noisy observations for a frame range.

    Frame f uses stream (seed, frame_base + f); when not all-zero, k message
    bits are drawn first, then n noise normals.
    """
    count, n = out_y.shape
    k = gmat.shape[0]
    sd = math.sqrt(sigma2)
    noise = np.empty(n, dtype=np.float64)
    mbits = np.empty(k, dtype=np.uint8)
    for f in range(count):
        state = stream_state(np.uint64(seed), np.uint64(frame_base + f))
        if all_zero:
            for i in range(n):
                out_ctx[f, i] = 0
        else:
            state = fill_bits(state, mbits)
            for i in range(n):
                acc = np.uint8(0)
                for a in range(k):
                    acc ^= mbits[a] & gmat[a, i]
                out_ctx[f, i] = acc
        state = fill_normals(state, noise)
        for i in range(n):
            y = (1.0 - 2.0 * out_ctx[f, i]) + sd * noise[i]
            out_y[f, i] = y
            out_lch[f, i] = 2.0 * y / sigma2
    return 0


@njit(cache=True, nogil=True)
def decode_chunk(chk_ptr, edge_vn, var_ptr, var_edges, l_ch_rows, max_iters,
                 llr_max, use_minsum, want_nsmea,
                 out_conv, out_iters, out_chat, out_lapp, out_nsmea):
    """Initial BP over a block of frames, optionally accumulating the
    per-VN sign-mismatch (nsmea) scores used by the oscillation rule."""
    count, n = l_ch_rows.shape
    num_edges = edge_vn.size
    v2c = np.empty(num_edges, dtype=np.float64)
    c2v = np.empty(num_edges, dtype=np.float64)
    l_app = np.empty(n, dtype=np.float64)
    z = np.empty(n, dtype=np.uint8)
    maxd = _max_check_degree(chk_ptr)
    th = np.empty(maxd, dtype=np.float64)
    pre = np.empty(maxd, dtype=np.float64)
    tr = np.empty((0, 0), dtype=np.int8)
    for f in range(count):
        if want_nsmea:
            for i in range(n):
                out_nsmea[f, i] = 0
        conv, iters = bp_core(chk_ptr, edge_vn, var_ptr, var_edges, l_ch_rows[f],
                              max_iters, llr_max, use_minsum, v2c, c2v, l_app, z,
                              th, pre, tr, tr, False,
                              out_nsmea[f if want_nsmea else 0], want_nsmea)
        out_conv[f] = 1 if conv else 0
        out_iters[f] = iters
        for i in range(n):
            out_chat[f, i] = z[i]
            out_lapp[f, i] = l_app[i]
    return 0


@njit(cache=True, nogil=True)
def mrbp_rounds_chunk(chk_ptr, edge_vn, var_ptr, var_edges, l_ch_rows, pi_rows,
                      T, l1, sat, llr_max, use_minsum,
                      out_conv, out_iters, out_cand):
    """Run the T flip-and-saturate re-decoding rounds for each frame."""
    count, n = l_ch_rows.shape
    num_edges = edge_vn.size
    v2c = np.empty(num_edges, dtype=np.float64)
    c2v = np.empty(num_edges, dtype=np.float64)
    l_app = np.empty(n, dtype=np.float64)
    z = np.empty(n, dtype=np.uint8)
    maxd = _max_check_degree(chk_ptr)
    th = np.empty(maxd, dtype=np.float64)
    pre = np.empty(maxd, dtype=np.float64)
    tr = np.empty((0, 0), dtype=np.int8)
    dummy = np.empty(0, dtype=np.int64)
    pert = np.empty(n, dtype=np.float64)
    for f in range(count):
        for t in range(T):
            vn = pi_rows[f, t]
            for i in range(n):
                pert[i] = l_ch_rows[f, i]
            flip = -sat if pert[vn] >= 0.0 else sat
            pert[vn] = flip
            conv, iters = bp_core(chk_ptr, edge_vn, var_ptr, var_edges, pert,
                                  l1, llr_max, use_minsum, v2c, c2v, l_app, z,
                                  th, pre, tr, tr, False, dummy, False)
            out_conv[f, t] = 1 if conv else 0
            out_iters[f, t] = iters
            for i in range(n):
                out_cand[f, t, i] = z[i]
    return 0


@njit(cache=True, nogil=True)
def label_chunk(chk_ptr, edge_vn, var_ptr, var_edges, l_ch_rows, c_tx_rows,
                l1, sat, llr_max, use_minsum, strict, out_labels):
    """Exhaustive single-flip labels: for each frame and each VN i, decode the
    perturbed frame and record whether it converges (to the transmitted word
    when strict)."""
    count, n = l_ch_rows.shape
    num_edges = edge_vn.size
    v2c = np.empty(num_edges, dtype=np.float64)
    c2v = np.empty(num_edges, dtype=np.float64)
    l_app = np.empty(n, dtype=np.float64)
    z = np.empty(n, dtype=np.uint8)
    maxd = _max_check_degree(chk_ptr)
    th = np.empty(maxd, dtype=np.float64)
    pre = np.empty(maxd, dtype=np.float64)
    tr = np.empty((0, 0), dtype=np.int8)
    dummy = np.empty(0, dtype=np.int64)
    pert = np.empty(n, dtype=np.float64)
    for f in range(count):
        for vn in range(n):
            for i in range(n):
                pert[i] = l_ch_rows[f, i]
            pert[vn] = -sat if pert[vn] >= 0.0 else sat
            conv, _ = bp_core(chk_ptr, edge_vn, var_ptr, var_edges, pert,
                              l1, llr_max, use_minsum, v2c, c2v, l_app, z,
                              th, pre, tr, tr, False, dummy, False)
            good = conv
            if conv and strict:
                for i in range(n):
                    if z[i] != c_tx_rows[f, i]:
                        good = False
                        break
            out_labels[f, vn] = 1 if good else 0
    return 0
