"""Reader for the labeled-failure dataset container.

Layout (little-endian): magic "MRBPDS\\x01", uint32 JSON header length, JSON
header, then fixed-size records of |l_ch| float32[n], bit-packed syndrome
(ceil(m/8) bytes, little bit order), bit-packed labels (ceil(n/8) bytes), and
for kind "d1" additionally y float32[n].  Model inputs are the raw received
word for d1 and |l_ch| concatenated with the 0/1 syndrome for d2.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass

import numpy as np

MAGIC = b"MRBPDS\x01"
SUPPORTED_VERSION = 1


@dataclass
class FlipDataset:
    """Inputs and per-VN flip labels, ready for training."""

    header: dict
    inputs: np.ndarray   # float32 (N, d)
    labels: np.ndarray   # float32 (N, n)

    def __len__(self) -> int:
        return self.inputs.shape[0]

    @property
    def n(self) -> int:
        return int(self.header["n"])

    @property
    def k(self) -> int:
        return self.n - int(self.header["m"])


def load_dataset(path) -> FlipDataset:
    with open(path, "rb") as f:
        raw = f.read()
    if raw[:len(MAGIC)] != MAGIC:
        raise ValueError("bad magic: not a dataset container")
    (jlen,) = struct.unpack_from("<I", raw, len(MAGIC))
    off = len(MAGIC) + 4
    header = json.loads(raw[off:off + jlen].decode())
    off += jlen
    if header.get("version") != SUPPORTED_VERSION:
        raise ValueError(f"unsupported dataset version {header.get('version')}")
    n, m, count, kind = header["n"], header["m"], header["count"], header["kind"]
    sb, bb = (m + 7) // 8, (n + 7) // 8
    rec = 4 * n + sb + bb + (4 * n if kind == "d1" else 0)
    if len(raw) - off != rec * count:
        raise ValueError(f"payload size does not match {count} records of {rec} bytes")
    flat = np.frombuffer(raw, dtype=np.uint8, offset=off).reshape(count, rec)
    abs_l_ch = flat[:, :4 * n].copy().view("<f4")
    s_ch = np.unpackbits(flat[:, 4 * n:4 * n + sb], axis=1, count=m,
                         bitorder="little")
    labels = np.unpackbits(flat[:, 4 * n + sb:4 * n + sb + bb], axis=1, count=n,
                           bitorder="little").astype(np.float32)
    if kind == "d1":
        y = flat[:, 4 * n + sb + bb:].copy().view("<f4")
        inputs = y.astype(np.float32)
    else:
        inputs = np.concatenate([abs_l_ch, s_ch.astype(np.float32)], axis=1)
    return FlipDataset(header=header, inputs=np.ascontiguousarray(inputs),
                       labels=np.ascontiguousarray(labels))


def split_dataset(ds: FlipDataset, val_fraction: float, seed: int):
    """Deterministic shuffled train/validation split."""
    count = len(ds)
    order = np.random.default_rng(seed).permutation(count)
    n_val = int(round(count * val_fraction))
    val, train = order[:n_val], order[n_val:]
    return ((ds.inputs[train], ds.labels[train]),
            (ds.inputs[val], ds.labels[val]))
