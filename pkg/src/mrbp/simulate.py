"""Monte-Carlo FER/BER estimation for BP and multi-round decoding.

Frames are processed in fixed-size batches; the stopping rule (target frame
errors or the frame cap, whichever first) is evaluated on batch boundaries.
Each frame draws from an RNG stream keyed by its absolute index, and worker
threads only split batches into contiguous slices, so counts are identical
for any worker count and the emitted files are byte-for-byte reproducible.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from . import _kernels
from .bp import LLR_MAX
from .channel import sigma2_from_ebn0
from .codes import ParityCheckCode, generator_matrix
from .models import ModelWeights, forward_gru_batch, forward_mlp_batch
from .multiround import DEFAULT_SAT

CSV_COLUMNS = ("snr_db", "frames", "frame_errors", "fer", "ber", "undetected",
               "mean_rounds", "mean_iters")


def _split_ranges(total: int, workers: int):
    """Contiguous near-equal [start, stop) slices covering range(total)."""
    workers = max(1, min(workers, total)) if total else 1
    bounds = np.linspace(0, total, workers + 1).astype(np.int64)
    return [(int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]


def _run_chunks(ranges, fn) -> None:
    if len(ranges) <= 1:
        for a, b in ranges:
            fn(a, b)
        return
    with ThreadPoolExecutor(max_workers=len(ranges)) as pool:
        futures = [pool.submit(fn, a, b) for a, b in ranges]
        for fut in futures:
            fut.result()


def wilson_interval(errors: int, trials: int, z: float = 1.959963984540054):
    """95% binomial (Wilson score) confidence interval for errors/trials."""
    if trials == 0:
        return 0.0, 1.0
    p = errors / trials
    denom = 1.0 + z * z / trials
    center = (p + z * z / (2 * trials)) / denom
    half = z * np.sqrt(p * (1.0 - p) / trials + z * z / (4.0 * trials * trials)) / denom
    lo = 0.0 if errors == 0 else max(0.0, center - half)
    hi = 1.0 if errors == trials else min(1.0, center + half)
    return lo, hi


@dataclass(frozen=True)
class SimConfig:
    code: str
    decoder: str = "bp"           # "bp" | "mrbp"
    rule: str = "nsmea"
    T: int = 5
    sat: float = DEFAULT_SAT
    l0: int = 20
    l1: int = 20
    snrs_db: tuple = (3.0,)
    target_errors: int = 100
    max_frames: int = 10_000_000
    seed: int = 0
    workers: int = 1
    batch: int = 2048
    all_zero: bool = False
    weights: str | None = None
    genie_check: bool = False

    def validate(self) -> None:
        if self.decoder not in ("bp", "mrbp"):
            raise ValueError(f"unknown decoder {self.decoder!r}")
        if self.target_errors < 1:
            raise ValueError("target_errors must be >= 1")
        if not self.snrs_db:
            raise ValueError("SNR list must be nonempty")
        if self.decoder == "mrbp" and not 1 <= self.l1 <= self.l0:
            raise ValueError(f"need 1 <= l1 <= l0, got l1={self.l1}, l0={self.l0}")
        if self.batch < 1 or self.workers < 1 or self.max_frames < 1:
            raise ValueError("batch, workers and max_frames must be >= 1")


@dataclass(frozen=True)
class SimPointResult:
    snr_db: float
    frames: int
    frame_errors: int
    bit_errors: int
    undetected: int
    fer: float
    ber: float
    mean_rounds: float
    mean_iters: float
    wall_time: float
    fer_ci95: tuple

    def row(self) -> dict:
        return {"snr_db": self.snr_db, "frames": self.frames,
                "frame_errors": self.frame_errors, "fer": self.fer,
                "ber": self.ber, "undetected": self.undetected,
                "mean_rounds": self.mean_rounds, "mean_iters": self.mean_iters}


@dataclass(frozen=True)
class SimResult:
    config: SimConfig
    points: tuple


def _rankings(rule, y, l_ch, lapp, nsmea, code, weights, T):
    """First T flip candidates per failed frame, int32 (F, T)."""
    if rule == "chmag":
        order = np.argsort(np.abs(l_ch), axis=1, kind="stable")
    elif rule == "appmag":
        order = np.argsort(np.abs(lapp), axis=1, kind="stable")
    elif rule == "nsmea":
        order = np.argsort(-nsmea, axis=1, kind="stable")
    elif rule == "nn":
        if weights is None:
            raise ValueError("rule 'nn' needs model weights")
        if weights.input_kind == "d1":
            x = y.astype(np.float32)
        else:
            z = (l_ch <= 0).astype(np.uint8)
            s_ch = (z @ code.to_matrix().T % 2).astype(np.float32)
            x = np.concatenate([np.abs(l_ch), s_ch], axis=1).astype(np.float32)
        fwd = forward_mlp_batch if weights.architecture == "mlp" else forward_gru_batch
        order = np.argsort(-fwd(weights, x), axis=1, kind="stable")
    else:
        raise ValueError(f"unknown rule {rule!r}")
    return np.ascontiguousarray(order[:, :T], dtype=np.int32)


def run_point(code: ParityCheckCode, config: SimConfig, snr_db: float,
              weights: ModelWeights | None = None) -> SimPointResult:
    """Simulate one SNR point until target_errors or max_frames."""
    config.validate()
    t0 = time.monotonic()
    rate = code.k / code.n
    sigma2 = sigma2_from_ebn0(snr_db, rate)
    gmat = np.zeros((0, code.n), np.uint8) if config.all_zero else generator_matrix(code)
    want_nsmea = config.decoder == "mrbp" and config.rule == "nsmea"
    n = code.n

    frames = frame_errors = bit_errors = undetected = 0
    rounds_sum = 0
    iters_sum = 0

    while frames < config.max_frames and frame_errors < config.target_errors:
        bsz = min(config.batch, config.max_frames - frames)
        c_tx = np.empty((bsz, n), dtype=np.uint8)
        y = np.empty((bsz, n), dtype=np.float64)
        l_ch = np.empty((bsz, n), dtype=np.float64)
        conv = np.empty(bsz, dtype=np.uint8)
        iters = np.empty(bsz, dtype=np.int32)
        chat = np.empty((bsz, n), dtype=np.uint8)
        lapp = np.empty((bsz, n), dtype=np.float64)
        nsmea = np.zeros((bsz if want_nsmea else 1, n), dtype=np.int64)

        def phase1(a, b):
            _kernels.gen_frames_chunk(config.seed, frames + a, gmat,
                                      config.all_zero, sigma2,
                                      c_tx[a:b], y[a:b], l_ch[a:b])
            _kernels.decode_chunk(code.chk_ptr, code.edge_vn, code.var_ptr,
                                  code.var_edges, l_ch[a:b], config.l0, LLR_MAX,
                                  False, want_nsmea, conv[a:b], iters[a:b],
                                  chat[a:b], lapp[a:b],
                                  nsmea[a:b] if want_nsmea else nsmea)

        _run_chunks(_split_ranges(bsz, config.workers), phase1)

        decision = chat.copy()
        iters_total = iters.astype(np.int64)
        rounds = np.zeros(bsz, dtype=np.int64)
        convd = conv.astype(bool)

        if config.decoder == "mrbp":
            fail = np.flatnonzero(~convd)
            if fail.size:
                pi = _rankings(config.rule, y[fail], l_ch[fail], lapp[fail],
                               nsmea[fail] if want_nsmea else None,
                               code, weights, config.T)
                f_lch = np.ascontiguousarray(l_ch[fail])
                rconv = np.empty((fail.size, config.T), dtype=np.uint8)
                riter = np.empty((fail.size, config.T), dtype=np.int32)
                rcand = np.empty((fail.size, config.T, n), dtype=np.uint8)

                def phase2(a, b):
                    _kernels.mrbp_rounds_chunk(code.chk_ptr, code.edge_vn,
                                               code.var_ptr, code.var_edges,
                                               f_lch[a:b], pi[a:b], config.T,
                                               config.l1, config.sat, LLR_MAX,
                                               False, rconv[a:b], riter[a:b],
                                               rcand[a:b])

                _run_chunks(_split_ranges(fail.size, config.workers), phase2)

                rounds[fail] = config.T
                iters_total[fail] = config.l0 + riter.max(axis=1)
                for fi, fr in enumerate(fail):
                    hits = np.flatnonzero(rconv[fi])
                    if hits.size == 0:
                        # empty candidate list: fall back to the channel
                        # hard decision, matching mrbp_decode
                        decision[fr] = (l_ch[fr] <= 0).astype(np.uint8)
                        continue
                    cands = rcand[fi, hits].astype(np.float64)
                    d = ((y[fr] - (1.0 - 2.0 * cands)) ** 2).sum(axis=1)
                    best = int(np.argmin(d))  # first minimum = earliest round
                    if config.genie_check:
                        assert d[best] <= d.min() + 1e-12
                    decision[fr] = rcand[fi, hits[best]]
                    convd[fr] = True

        err = (decision != c_tx).any(axis=1)
        frame_errors += int(err.sum())
        bit_errors += int((decision != c_tx).sum())
        undetected += int((err & convd).sum())
        rounds_sum += int(rounds.sum())
        iters_sum += int(iters_total.sum())
        frames += bsz

    wall = time.monotonic() - t0
    return SimPointResult(
        snr_db=float(snr_db), frames=frames, frame_errors=frame_errors,
        bit_errors=bit_errors, undetected=undetected,
        fer=frame_errors / frames, ber=bit_errors / (frames * n),
        mean_rounds=rounds_sum / frames, mean_iters=iters_sum / frames,
        wall_time=wall, fer_ci95=wilson_interval(frame_errors, frames))


def run_sweep(code: ParityCheckCode, config: SimConfig,
              weights: ModelWeights | None = None) -> SimResult:
    config.validate()
    points = tuple(run_point(code, config, snr, weights) for snr in config.snrs_db)
    return SimResult(config=config, points=points)


def emit_results(result: SimResult, fmt: str, path) -> None:
    """Write results with the documented column order; floats keep full
    precision (shortest round-trip repr)."""
    if fmt == "csv":
        lines = [",".join(CSV_COLUMNS)]
        for p in result.points:
            row = p.row()
            lines.append(",".join(repr(row[c]) if isinstance(row[c], float)
                                  else str(row[c]) for c in CSV_COLUMNS))
        text = "\n".join(lines) + "\n"
        with open(path, "w") as f:
            f.write(text)
    elif fmt == "json":
        doc = {"config": asdict(result.config),
               "points": [p.row() for p in result.points]}
        with open(path, "w") as f:
            json.dump(doc, f, indent=2)
            f.write("\n")
    else:
        raise ValueError(f"unknown format {fmt!r}")
