"""Export trained models to the inference weight container.

Container layout (little-endian): magic "MRBPNN\\x01", uint32 JSON metadata
length, JSON metadata, then raw row-major float32 tensors in manifest order.
The GRU export unpacks torch's fused (reset|update|candidate) gate rows into
per-gate tensors named w_ir/w_iu/w_in (and hh/bias counterparts), which is
the gate convention the inference side implements.
"""

from __future__ import annotations

import json
import struct

import numpy as np
import torch
from torch import nn

from .models import FlipGru, FlipMlp

MAGIC = b"MRBPNN\x01"
FORMAT_VERSION = 1
_GATES = ("r", "u", "n")


def _mlp_tensors(model: FlipMlp):
    linears = [m for m in model.net if isinstance(m, nn.Linear)]
    tensors = {}
    for i, lin in enumerate(linears):
        tensors[f"w{i}"] = lin.weight.detach().cpu().numpy()
        tensors[f"b{i}"] = lin.bias.detach().cpu().numpy()
    dims = [linears[0].in_features] + [lin.out_features for lin in linears]
    return tensors, dims


def _gru_tensors(model: FlipGru):
    gru = model.gru
    hidden = gru.hidden_size
    tensors = {}
    for layer in range(gru.num_layers):
        w_ih = getattr(gru, f"weight_ih_l{layer}").detach().cpu().numpy()
        w_hh = getattr(gru, f"weight_hh_l{layer}").detach().cpu().numpy()
        b_ih = getattr(gru, f"bias_ih_l{layer}").detach().cpu().numpy()
        b_hh = getattr(gru, f"bias_hh_l{layer}").detach().cpu().numpy()
        for gi, g in enumerate(_GATES):  # torch packs rows as (r | z | n)
            rows = slice(gi * hidden, (gi + 1) * hidden)
            tensors[f"l{layer}.w_i{g}"] = w_ih[rows]
        for gi, g in enumerate(_GATES):
            rows = slice(gi * hidden, (gi + 1) * hidden)
            tensors[f"l{layer}.w_h{g}"] = w_hh[rows]
        for gi, g in enumerate(_GATES):
            tensors[f"l{layer}.b_i{g}"] = b_ih[gi * hidden:(gi + 1) * hidden]
        for gi, g in enumerate(_GATES):
            tensors[f"l{layer}.b_h{g}"] = b_hh[gi * hidden:(gi + 1) * hidden]
    tensors["fc.w"] = model.fc.weight.detach().cpu().numpy()
    tensors["fc.b"] = model.fc.bias.detach().cpu().numpy()
    return tensors, [gru.input_size, hidden]


def export_weights(model: nn.Module, input_kind: str, path,
                   dropout: float = 0.1) -> None:
    """Serialize a trained model for the inference side."""
    if isinstance(model, FlipMlp):
        architecture = "mlp"
        tensors, layer_dims = _mlp_tensors(model)
        time_steps = num_layers = 0
        output_size = layer_dims[-1]
    elif isinstance(model, FlipGru):
        architecture = "stacked_gru"
        tensors, layer_dims = _gru_tensors(model)
        time_steps = model.steps
        num_layers = model.gru.num_layers
        output_size = model.fc.out_features
    else:
        raise TypeError(f"cannot export {type(model).__name__}")
    meta = {
        "format_version": FORMAT_VERSION,
        "architecture": architecture,
        "input_kind": input_kind,
        "layer_dims": [int(d) for d in layer_dims],
        "time_steps": int(time_steps),
        "num_layers": int(num_layers),
        "output_size": int(output_size),
        "dropout": float(dropout),
        "tensors": [{"name": name, "shape": list(map(int, t.shape))}
                    for name, t in tensors.items()],
    }
    blob = json.dumps(meta).encode()
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(struct.pack("<I", len(blob)))
        f.write(blob)
        for t in tensors.values():
            f.write(np.ascontiguousarray(t, dtype="<f4").tobytes())
