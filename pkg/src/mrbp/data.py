"""Labeled training data from BP failures via exhaustive single-flip retries.

A record is one initial-BP failure.  Its label vector b marks, for every VN,
whether flip-and-saturate on that VN followed by an l1-iteration BP run
recovers the transmitted codeword (strict convention; a loose variant accepts
any codeword).  Inputs are stored as |l_ch| plus the hard-decision syndrome
("d2"), optionally with the raw received word ("d1").

File container: magic "MRBPDS\\x01", uint32 little-endian JSON header length,
JSON header, then fixed-size records.  Per record: |l_ch| as float32[n], the
syndrome bit-packed (little bit order, ceil(m/8) bytes), labels bit-packed
(ceil(n/8) bytes), and for d1 additionally y as float32[n].
"""

from __future__ import annotations

import json
import struct
from dataclasses import asdict, dataclass

import numpy as np

from . import _kernels
from .bp import LLR_MAX, bp_decode
from .channel import LlrFrame, SnrSpec, transmit, modulate
from .codes import ParityCheckCode, generator_matrix
from .multiround import DEFAULT_SAT, perturb
from .rng import FrameRng

MAGIC = b"MRBPDS\x01"
FORMAT_VERSION = 1


@dataclass(frozen=True)
class DatasetHeader:
    kind: str             # "d1" | "d2"
    code_hash: str
    n: int
    m: int
    count: int
    eb_n0_db: float
    l0: int
    l1: int
    sat: float
    seed: int
    all_zero: bool
    version: int = FORMAT_VERSION


@dataclass
class RecordBatch:
    """Column-wise storage of training records."""

    abs_l_ch: np.ndarray          # float32 (N, n)
    s_ch: np.ndarray              # uint8 (N, m)
    labels: np.ndarray            # uint8 (N, n)
    y: np.ndarray | None = None   # float32 (N, n), d1 only

    def __len__(self) -> int:
        return self.abs_l_ch.shape[0]


def generate_failures(code: ParityCheckCode, snr: SnrSpec, l0: int, count: int,
                      seed: int, all_zero: bool = True, start_stream: int = 0):
    """Yield exactly `count` tuples (frame, outcome, transmitted, stream_id)
    whose initial BP decode (l0 iterations) fails.

    Frame attempt j draws from stream (seed, start_stream + j); failures keep
    their originating stream id so datasets can be regenerated selectively.
    """
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    gmat = None if all_zero else generator_matrix(code)
    sigma2 = snr.sigma2
    produced = 0
    stream = start_stream
    while produced < count:
        rng = FrameRng(seed, stream)
        if all_zero:
            c_tx = np.zeros(code.n, dtype=np.uint8)
        else:
            c_tx = (rng.bits(gmat.shape[0]).astype(np.uint8) @ gmat % 2).astype(np.uint8)
        frame = transmit(code, modulate(c_tx), sigma2, rng)
        outcome = bp_decode(code, frame.l_ch, l0)
        if not outcome.converged:
            produced += 1
            yield frame, outcome, c_tx, stream
        stream += 1


def label_frame(code: ParityCheckCode, frame: LlrFrame, l1: int,
                sat: float = DEFAULT_SAT,
                transmitted: np.ndarray | None = None) -> np.ndarray:
    """Exhaustive flip labels for one failed frame: b[i] = 1 iff the decode of
    perturb(l_ch, i, sat) with l1 iterations converges -- to `transmitted`
    when given (strict convention), to any codeword otherwise."""
    labels = np.zeros(code.n, dtype=np.uint8)
    for i in range(code.n):
        out = bp_decode(code, perturb(frame.l_ch, i, sat), l1)
        ok = out.converged
        if ok and transmitted is not None:
            ok = bool((out.c_hat == transmitted).all())
        labels[i] = 1 if ok else 0
    return labels


# -- bulk generation (kernel-backed, used by the CLI and the trainer feeds) --

def collect_failures(code: ParityCheckCode, snr: SnrSpec, l0: int, count: int,
                     seed: int, all_zero: bool = True, batch: int = 4096,
                     llr_max: float = LLR_MAX, workers: int = 1):
    """Batched variant of generate_failures returning column arrays
    (y, l_ch, c_tx, stream_ids, attempts)."""
    from .simulate import _split_ranges, _run_chunks  # local: avoids a cycle

    gmat = generator_matrix(code) if not all_zero else np.zeros((0, code.n), np.uint8)
    sigma2 = snr.sigma2
    ys, lchs, ctxs, sids = [], [], [], []
    produced = 0
    stream = 0
    while produced < count:
        c_tx = np.empty((batch, code.n), dtype=np.uint8)
        y = np.empty((batch, code.n), dtype=np.float64)
        l_ch = np.empty((batch, code.n), dtype=np.float64)
        conv = np.empty(batch, dtype=np.uint8)
        iters = np.empty(batch, dtype=np.int32)
        chat = np.empty((batch, code.n), dtype=np.uint8)
        lapp = np.empty((batch, code.n), dtype=np.float64)
        nsmea = np.zeros((1, code.n), dtype=np.int64)

        def gen(a, b):
            _kernels.gen_frames_chunk(seed, stream + a, gmat, all_zero, sigma2,
                                      c_tx[a:b], y[a:b], l_ch[a:b])
            _kernels.decode_chunk(code.chk_ptr, code.edge_vn, code.var_ptr,
                                  code.var_edges, l_ch[a:b], l0, llr_max,
                                  False, False, conv[a:b], iters[a:b],
                                  chat[a:b], lapp[a:b], nsmea)

        _run_chunks(_split_ranges(batch, workers), gen)
        fail = np.flatnonzero(conv == 0)
        ys.append(y[fail])
        lchs.append(l_ch[fail])
        ctxs.append(c_tx[fail])
        sids.append(stream + fail.astype(np.int64))
        produced += fail.size
        stream += batch
    y = np.concatenate(ys)[:count]
    l_ch = np.concatenate(lchs)[:count]
    c_tx = np.concatenate(ctxs)[:count]
    stream_ids = np.concatenate(sids)[:count]
    return y, l_ch, c_tx, stream_ids, stream


def label_many(code: ParityCheckCode, l_ch_rows: np.ndarray, c_tx_rows: np.ndarray,
               l1: int, sat: float = DEFAULT_SAT, strict: bool = True,
               llr_max: float = LLR_MAX, workers: int = 1) -> np.ndarray:
    """Kernel-backed label_frame over many frames; returns uint8 (N, n)."""
    from .simulate import _split_ranges, _run_chunks

    count = l_ch_rows.shape[0]
    labels = np.empty((count, code.n), dtype=np.uint8)

    def work(a, b):
        _kernels.label_chunk(code.chk_ptr, code.edge_vn, code.var_ptr,
                             code.var_edges, l_ch_rows[a:b], c_tx_rows[a:b],
                             l1, sat, llr_max, False, strict, labels[a:b])

    _run_chunks(_split_ranges(count, workers), work)
    return labels


def build_dataset(code: ParityCheckCode, snr: SnrSpec, l0: int, l1: int,
                  count: int, seed: int, kind: str = "d2",
                  all_zero: bool | None = None, sat: float = DEFAULT_SAT,
                  strict: bool = True, workers: int = 1,
                  batch: int = 4096) -> tuple[DatasetHeader, RecordBatch]:
    """Generate `count` labeled failure records at one SNR point.

    d2 defaults to all-zero transmission (the inputs carry no codeword
    dependence); d1 defaults to random codewords since it stores y itself.
    """
    if kind not in ("d1", "d2"):
        raise ValueError(f"kind must be 'd1' or 'd2', got {kind!r}")
    if all_zero is None:
        all_zero = kind == "d2"
    y, l_ch, c_tx, _, _ = collect_failures(code, snr, l0, count, seed,
                                           all_zero=all_zero, batch=batch,
                                           workers=workers)
    labels = label_many(code, l_ch, c_tx, l1, sat=sat, strict=strict,
                        workers=workers)
    header = DatasetHeader(kind=kind, code_hash=code.identity_hash(),
                           n=code.n, m=code.m, count=count,
                           eb_n0_db=snr.eb_n0_db, l0=l0, l1=l1, sat=sat,
                           seed=seed, all_zero=all_zero)
    records = RecordBatch(abs_l_ch=np.abs(l_ch).astype(np.float32),
                          s_ch=_syndromes(code, l_ch), labels=labels,
                          y=y.astype(np.float32) if kind == "d1" else None)
    return header, records


def _syndromes(code: ParityCheckCode, l_ch_rows: np.ndarray) -> np.ndarray:
    z = (l_ch_rows <= 0).astype(np.uint8)
    h = code.to_matrix()
    return (z @ h.T % 2).astype(np.uint8)


# -- container I/O -----------------------------------------------------------

def _record_nbytes(kind: str, n: int, m: int) -> int:
    base = 4 * n + (m + 7) // 8 + (n + 7) // 8
    return base + (4 * n if kind == "d1" else 0)


def write_dataset(path, header: DatasetHeader, records: RecordBatch) -> None:
    if len(records) != header.count:
        raise ValueError(f"header says {header.count} records, got {len(records)}")
    if header.kind == "d1" and records.y is None:
        raise ValueError("d1 dataset needs the received words y")
    blob = json.dumps(asdict(header)).encode()
    n, m = header.n, header.m
    s_packed = np.packbits(records.s_ch, axis=1, bitorder="little")
    b_packed = np.packbits(records.labels, axis=1, bitorder="little")
    parts = [records.abs_l_ch.astype("<f4").view(np.uint8).reshape(len(records), 4 * n),
             s_packed, b_packed]
    if header.kind == "d1":
        parts.append(records.y.astype("<f4").view(np.uint8).reshape(len(records), 4 * n))
    payload = np.concatenate(parts, axis=1) if len(records) else \
        np.zeros((0, _record_nbytes(header.kind, n, m)), np.uint8)
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(struct.pack("<I", len(blob)))
        f.write(blob)
        f.write(payload.tobytes())


def read_dataset(path) -> tuple[DatasetHeader, RecordBatch]:
    with open(path, "rb") as f:
        raw = f.read()
    if raw[:len(MAGIC)] != MAGIC:
        raise ValueError("bad magic: not a dataset container")
    off = len(MAGIC)
    if len(raw) < off + 4:
        raise ValueError("truncated dataset header")
    (jlen,) = struct.unpack_from("<I", raw, off)
    off += 4
    if len(raw) < off + jlen:
        raise ValueError("truncated dataset header block")
    meta = json.loads(raw[off:off + jlen].decode())
    off += jlen
    if meta.get("version") != FORMAT_VERSION:
        raise ValueError(f"unsupported dataset version {meta.get('version')}")
    header = DatasetHeader(**meta)
    n, m, count = header.n, header.m, header.count
    rec = _record_nbytes(header.kind, n, m)
    if len(raw) - off != rec * count:
        raise ValueError(
            f"payload is {len(raw) - off} bytes; header promises {count} "
            f"records of {rec} bytes")
    flat = np.frombuffer(raw, dtype=np.uint8, offset=off).reshape(count, rec)
    pos = 0
    abs_l_ch = flat[:, pos:pos + 4 * n].copy().view("<f4")
    pos += 4 * n
    sb = (m + 7) // 8
    s_ch = np.unpackbits(flat[:, pos:pos + sb], axis=1, count=m, bitorder="little")
    pos += sb
    bb = (n + 7) // 8
    labels = np.unpackbits(flat[:, pos:pos + bb], axis=1, count=n, bitorder="little")
    pos += bb
    y = None
    if header.kind == "d1":
        y = flat[:, pos:pos + 4 * n].copy().view("<f4")
    return header, RecordBatch(abs_l_ch=abs_l_ch, s_ch=s_ch, labels=labels, y=y)
