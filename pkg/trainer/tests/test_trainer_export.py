"""Cross-component contract: weights exported here, reloaded through the
inference package, must reproduce the trainer's own forward outputs to
1e-5 absolute on real dataset inputs."""

from pathlib import Path

import numpy as np
import pytest
import torch

from mrbp_trainer.export import export_weights
from mrbp_trainer.models import build_model, input_kind, predict_probs

mrbp = pytest.importorskip("mrbp")

from mrbp.channel import SnrSpec          # noqa: E402
from mrbp.codes import load_alist         # noqa: E402
from mrbp.data import build_dataset       # noqa: E402
from mrbp.models import (count_parameters, forward_gru_batch,  # noqa: E402
                         forward_mlp_batch, load_weights)

QC96 = Path(__file__).parents[2] / "codes" / "qc_96_48.alist"


@pytest.fixture(scope="module")
def qc96_inputs():
    """100 labeled-failure records of the (96,48) code, both input kinds."""
    code = load_alist(QC96)
    snr = SnrSpec(3.0, code.k / code.n)
    _, d2 = build_dataset(code, snr, 20, 20, 100, seed=31, kind="d2", workers=2)
    _, d1 = build_dataset(code, snr, 20, 20, 100, seed=32, kind="d1", workers=2)
    x_d2 = np.concatenate([d2.abs_l_ch, d2.s_ch.astype(np.float32)], axis=1)
    return {"d1": d1.y.astype(np.float32), "d2": x_d2}


def roundtrip_max_diff(model, kind, x, tmp_path):
    path = tmp_path / "w.bin"
    export_weights(model, kind, path)
    weights = load_weights(path)
    ours = predict_probs(model, x).numpy()
    fwd = (forward_mlp_batch if weights.architecture == "mlp"
           else forward_gru_batch)
    theirs = fwd(weights, x)
    return float(np.abs(ours - theirs).max())


@pytest.mark.parametrize("arch", ["mlpa_d1", "mlpa_d2", "mlpb_d2", "gru_d2"])
def test_export_reload_forward_equivalence(arch, tmp_path, qc96_inputs):
    torch.manual_seed(11)
    model = build_model(arch, 96, 48)
    model.eval()
    x = qc96_inputs[input_kind(arch)]
    assert x.shape[0] == 100
    diff = roundtrip_max_diff(model, input_kind(arch), x, tmp_path)
    assert diff <= 1e-5, f"{arch}: max abs diff {diff}"


def test_export_after_some_training(tmp_path, qc96_inputs):
    # weights that moved away from init keep the contract
    torch.manual_seed(5)
    model = build_model("mlpa_d2", 96, 48)
    opt = torch.optim.Adam(model.parameters(), lr=1e-3)
    x = torch.from_numpy(qc96_inputs["d2"])
    b = torch.randint(0, 2, (100, 96)).float()
    for _ in range(30):
        opt.zero_grad()
        loss = torch.nn.functional.binary_cross_entropy_with_logits(model(x), b)
        loss.backward()
        opt.step()
    model.eval()
    diff = roundtrip_max_diff(model, "d2", qc96_inputs["d2"], tmp_path)
    assert diff <= 1e-5


def test_container_loads_with_expected_metadata(tmp_path):
    torch.manual_seed(7)
    model = build_model("gru_d2", 96, 48)
    path = tmp_path / "g.bin"
    export_weights(model, "d2", path)
    w = load_weights(path)
    assert w.architecture == "stacked_gru"
    assert w.layer_dims == (144, 864)
    assert w.time_steps == 5 and w.num_layers == 5
    assert count_parameters(w) == 20_637_600
