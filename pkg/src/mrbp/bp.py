"""Flooding-schedule sum-product decoding with early termination.

The decoder checks the syndrome of the hard decision before the first message
update and after every iteration, stopping as soon as it sees a codeword.
Non-convergence is a normal outcome.  All internal messages and posterior
LLRs are clamped to [-LLR_MAX, +LLR_MAX]; check-node outputs additionally go
through atanh-argument clipping, so saturated inputs stay finite.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .codes import ParityCheckCode

LLR_MAX = 1e6
ATANH_CLIP = _kernels.ATANH_CLIP


@dataclass(frozen=True)
class BpTrace:
    """Per-iteration signs (+1/-1, zero counts as +1) observed during decoding.

    c2v_signs has one row per executed iteration and one column per edge
    (edge order is the code's check-major edge order); app_signs likewise per
    VN.  edge_vn maps columns of c2v_signs to VN indices.
    """

    c2v_signs: np.ndarray   # int8 (iterations_used, E)
    app_signs: np.ndarray   # int8 (iterations_used, n)
    edge_vn: np.ndarray     # int32 (E,)


@dataclass(frozen=True)
class BpOutcome:
    converged: bool
    c_hat: np.ndarray       # uint8 (n,)
    l_app: np.ndarray       # float64 (n,)
    iterations_used: int
    trace: BpTrace | None = None


def bp_decode(code: ParityCheckCode, l_ch: np.ndarray, max_iters: int,
              trace_enabled: bool = False, cn_rule: str = "tanh",
              llr_max: float = LLR_MAX) -> BpOutcome:
    """Decode one frame of channel LLRs; returns the outcome after early stop
    or max_iters.  cn_rule is "tanh" (exact, default) or "minsum"."""
    if max_iters < 1:
        raise ValueError(f"max_iters must be >= 1, got {max_iters}")
    if cn_rule not in ("tanh", "minsum"):
        raise ValueError(f"unknown cn_rule {cn_rule!r}")
    l_ch = np.ascontiguousarray(l_ch, dtype=np.float64)
    if l_ch.shape != (code.n,):
        raise ValueError(f"expected length-{code.n} LLR vector, got shape {l_ch.shape}")

    num_edges = code.num_edges
    v2c = np.empty(num_edges)
    c2v = np.empty(num_edges)
    l_app = np.empty(code.n)
    z = np.empty(code.n, dtype=np.uint8)
    maxd = int(np.diff(code.chk_ptr).max(initial=1))
    th = np.empty(maxd)
    pre = np.empty(maxd)
    if trace_enabled:
        trace_c2v = np.zeros((max_iters, num_edges), dtype=np.int8)
        trace_app = np.zeros((max_iters, code.n), dtype=np.int8)
    else:
        trace_c2v = np.empty((0, 0), dtype=np.int8)
        trace_app = np.empty((0, 0), dtype=np.int8)
    dummy = np.empty(0, dtype=np.int64)

    converged, iters = _kernels.bp_core(
        code.chk_ptr, code.edge_vn, code.var_ptr, code.var_edges, l_ch,
        max_iters, llr_max, cn_rule == "minsum", v2c, c2v, l_app, z,
        th, pre, trace_c2v, trace_app, trace_enabled, dummy, False)

    trace = None
    if trace_enabled:
        trace = BpTrace(c2v_signs=trace_c2v[:iters].copy(),
                        app_signs=trace_app[:iters].copy(),
                        edge_vn=code.edge_vn)
    return BpOutcome(converged=bool(converged), c_hat=z.copy(),
                     l_app=l_app.copy(), iterations_used=int(iters), trace=trace)


def bp_decode_traced(code: ParityCheckCode, l_ch: np.ndarray, max_iters: int,
                     cn_rule: str = "tanh") -> BpOutcome:
    """bp_decode with the sign trace recorded (numerically identical)."""
    return bp_decode(code, l_ch, max_iters, trace_enabled=True, cn_rule=cn_rule)
