"""Inference for trained flip-probability models from a serialized container.

Container layout (little-endian throughout):

    bytes 0..6   magic "MRBPNN\\x01"
    uint32       byte length of the JSON metadata block
    JSON         architecture, input kind, dimensions, tensor manifest
    payload      raw row-major float32 tensors, in manifest order

Two architectures are supported.  "mlp": affine + ReLU per hidden layer,
affine + sigmoid at the output.  "stacked_gru": the same input vector is fed
at every time step; gates follow the convention

    r = sigmoid(w_ir x + b_ir + w_hr h + b_hr)
    u = sigmoid(w_iu x + b_iu + w_hu h + b_hu)
    c = tanh(w_in x + b_in + r * (w_hn h + b_hn))
    h' = (1 - u) * c + u * h

with h starting at zero, layer l feeding on layer l-1's current hidden
state, and a final affine + sigmoid on the top layer's last hidden state.
Dropout appears in the metadata only; inference ignores it.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass

import numpy as np

MAGIC = b"MRBPNN\x01"
FORMAT_VERSION = 1

_GATES = ("r", "u", "n")


@dataclass(frozen=True)
class ModelWeights:
    architecture: str          # "mlp" | "stacked_gru"
    input_kind: str            # "d1" (received word) | "d2" (|l_ch| ++ syndrome)
    layer_dims: tuple          # mlp: full size chain; gru: (input, hidden)
    time_steps: int            # gru only, 0 for mlp
    num_layers: int            # gru stack depth, 0 for mlp
    output_size: int
    dropout: float
    tensors: dict              # name -> float32 ndarray

    @property
    def input_size(self) -> int:
        return int(self.layer_dims[0])


def _mlp_manifest(layer_dims):
    names = []
    for i in range(len(layer_dims) - 1):
        names.append((f"w{i}", (layer_dims[i + 1], layer_dims[i])))
        names.append((f"b{i}", (layer_dims[i + 1],)))
    return names


def _gru_manifest(input_size, hidden, num_layers, output_size):
    names = []
    for layer in range(num_layers):
        d_in = input_size if layer == 0 else hidden
        for g in _GATES:
            names.append((f"l{layer}.w_i{g}", (hidden, d_in)))
        for g in _GATES:
            names.append((f"l{layer}.w_h{g}", (hidden, hidden)))
        for g in _GATES:
            names.append((f"l{layer}.b_i{g}", (hidden,)))
        for g in _GATES:
            names.append((f"l{layer}.b_h{g}", (hidden,)))
    names.append(("fc.w", (output_size, hidden)))
    names.append(("fc.b", (output_size,)))
    return names


def expected_manifest(w: ModelWeights):
    if w.architecture == "mlp":
        return _mlp_manifest(w.layer_dims)
    return _gru_manifest(w.layer_dims[0], w.layer_dims[1], w.num_layers,
                         w.output_size)


def validate_weights(w: ModelWeights) -> None:
    if w.architecture not in ("mlp", "stacked_gru"):
        raise ValueError(f"unknown architecture {w.architecture!r}")
    if w.input_kind not in ("d1", "d2"):
        raise ValueError(f"unknown input kind {w.input_kind!r}")
    if w.architecture == "stacked_gru" and (w.time_steps < 1 or w.num_layers < 1):
        raise ValueError("stacked_gru needs time_steps >= 1 and num_layers >= 1")
    manifest = expected_manifest(w)
    if [name for name, _ in manifest] != list(w.tensors):
        raise ValueError("tensor manifest does not match the declared architecture")
    for name, shape in manifest:
        t = w.tensors[name]
        if tuple(t.shape) != tuple(shape):
            raise ValueError(f"tensor {name}: expected shape {shape}, got {tuple(t.shape)}")
        if not np.isfinite(t).all():
            raise ValueError(f"tensor {name}: non-finite values")
    if w.architecture == "mlp" and w.layer_dims[-1] != w.output_size:
        raise ValueError("mlp output size disagrees with layer_dims")


def count_parameters(w: ModelWeights) -> int:
    """Total number of stored weight/bias elements."""
    return int(sum(t.size for t in w.tensors.values()))


def save_weights(path, w: ModelWeights) -> None:
    validate_weights(w)
    meta = {
        "format_version": FORMAT_VERSION,
        "architecture": w.architecture,
        "input_kind": w.input_kind,
        "layer_dims": list(int(d) for d in w.layer_dims),
        "time_steps": int(w.time_steps),
        "num_layers": int(w.num_layers),
        "output_size": int(w.output_size),
        "dropout": float(w.dropout),
        "tensors": [{"name": name, "shape": list(map(int, t.shape))}
                    for name, t in w.tensors.items()],
    }
    blob = json.dumps(meta).encode()
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(struct.pack("<I", len(blob)))
        f.write(blob)
        for t in w.tensors.values():
            f.write(np.ascontiguousarray(t, dtype="<f4").tobytes())


def load_weights(path) -> ModelWeights:
    """Read and validate a weight container."""
    with open(path, "rb") as f:
        raw = f.read()
    if raw[:len(MAGIC)] != MAGIC:
        raise ValueError("bad magic: not a model weight container")
    off = len(MAGIC)
    if len(raw) < off + 4:
        raise ValueError("truncated container header")
    (jlen,) = struct.unpack_from("<I", raw, off)
    off += 4
    if len(raw) < off + jlen:
        raise ValueError("truncated metadata block")
    meta = json.loads(raw[off:off + jlen].decode())
    off += jlen
    if meta.get("format_version") != FORMAT_VERSION:
        raise ValueError(f"unsupported format version {meta.get('format_version')}")
    tensors = {}
    for spec in meta["tensors"]:
        shape = tuple(spec["shape"])
        nbytes = 4 * int(np.prod(shape)) if shape else 4
        if len(raw) < off + nbytes:
            raise ValueError(f"truncated tensor payload at {spec['name']!r}")
        tensors[spec["name"]] = np.frombuffer(
            raw, dtype="<f4", count=nbytes // 4, offset=off).reshape(shape).copy()
        off += nbytes
    if off != len(raw):
        raise ValueError("trailing bytes after the last tensor payload")
    w = ModelWeights(architecture=meta["architecture"],
                     input_kind=meta["input_kind"],
                     layer_dims=tuple(meta["layer_dims"]),
                     time_steps=int(meta["time_steps"]),
                     num_layers=int(meta["num_layers"]),
                     output_size=int(meta["output_size"]),
                     dropout=float(meta.get("dropout", 0.0)),
                     tensors=tensors)
    validate_weights(w)
    return w


# -- forward passes ----------------------------------------------------------

def _sigmoid(x):
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def forward_mlp_batch(w: ModelWeights, x: np.ndarray) -> np.ndarray:
    """(B, d_in) float batch -> (B, n) probabilities."""
    h = np.asarray(x, dtype=np.float32)
    if h.ndim != 2 or h.shape[1] != w.input_size:
        raise ValueError(f"expected input width {w.input_size}, got {h.shape}")
    last = len(w.layer_dims) - 2
    for i in range(last + 1):
        h = h @ w.tensors[f"w{i}"].T + w.tensors[f"b{i}"]
        if i < last:
            np.maximum(h, 0.0, out=h)
    return _sigmoid(h.astype(np.float64))


def forward_gru_batch(w: ModelWeights, x: np.ndarray) -> np.ndarray:
    """(B, d_in) float batch -> (B, n) probabilities; the same input vector is
    presented at every time step."""
    x = np.asarray(x, dtype=np.float32)
    if x.ndim != 2 or x.shape[1] != w.input_size:
        raise ValueError(f"expected input width {w.input_size}, got {x.shape}")
    batch = x.shape[0]
    hidden = int(w.layer_dims[1])
    h = [np.zeros((batch, hidden), dtype=np.float32) for _ in range(w.num_layers)]
    t = w.tensors
    for _ in range(w.time_steps):
        inp = x
        for layer in range(w.num_layers):
            hl = h[layer]
            r = _sigmoid((inp @ t[f"l{layer}.w_ir"].T + t[f"l{layer}.b_ir"]
                          + hl @ t[f"l{layer}.w_hr"].T + t[f"l{layer}.b_hr"]).astype(np.float64))
            u = _sigmoid((inp @ t[f"l{layer}.w_iu"].T + t[f"l{layer}.b_iu"]
                          + hl @ t[f"l{layer}.w_hu"].T + t[f"l{layer}.b_hu"]).astype(np.float64))
            c = np.tanh((inp @ t[f"l{layer}.w_in"].T + t[f"l{layer}.b_in"]).astype(np.float64)
                        + r * (hl @ t[f"l{layer}.w_hn"].T + t[f"l{layer}.b_hn"]).astype(np.float64))
            hl = ((1.0 - u) * c + u * hl).astype(np.float32)
            h[layer] = hl
            inp = hl
    out = h[-1] @ t["fc.w"].T + t["fc.b"]
    return _sigmoid(out.astype(np.float64))


def forward_mlp(w: ModelWeights, x: np.ndarray) -> np.ndarray:
    """Single input vector -> per-VN flip-success probabilities in [0, 1]."""
    if w.architecture != "mlp":
        raise ValueError("weights are not an mlp")
    return forward_mlp_batch(w, np.asarray(x)[None, :])[0]


def forward_stacked_gru(w: ModelWeights, x: np.ndarray) -> np.ndarray:
    """Single input vector -> per-VN flip-success probabilities in [0, 1]."""
    if w.architecture != "stacked_gru":
        raise ValueError("weights are not a stacked_gru")
    return forward_gru_batch(w, np.asarray(x)[None, :])[0]


def model_input(w: ModelWeights, frame) -> np.ndarray:
    """Assemble the model input from a frame per the container's input kind."""
    if w.input_kind == "d1":
        return np.asarray(frame.y, dtype=np.float32)
    return np.concatenate([np.abs(frame.l_ch), frame.s_ch.astype(np.float64)]
                          ).astype(np.float32)


def predict_flip_scores(w: ModelWeights, frame) -> np.ndarray:
    """Model scores for one frame; validates dimensions against the frame."""
    x = model_input(w, frame)
    if x.size != w.input_size:
        raise ValueError(
            f"model expects input size {w.input_size}, frame provides {x.size} "
            f"({w.input_kind} inputs)")
    n = frame.y.size
    if w.output_size != n:
        raise ValueError(f"model outputs {w.output_size} scores for n={n}")
    if w.architecture == "mlp":
        return forward_mlp(w, x)
    return forward_stacked_gru(w, x)
