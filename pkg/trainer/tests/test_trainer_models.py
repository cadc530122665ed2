import pytest
import torch

from mrbp_trainer.models import (build_model, input_kind, parameter_count,
                                 predict_probs)


@pytest.mark.parametrize("arch, expect", [
    ("mlpa_d1", 46_464),
    ("mlpa_d2", 46_763),
    ("gru_d2", 20_637_600),
    ("mlpb_d2", 20_656_691),
])
def test_parameter_budgets(arch, expect):
    assert parameter_count(build_model(arch, 96, 48)) == expect


def test_input_widths():
    assert build_model("mlpa_d1", 96, 48).dims[0] == 96
    assert build_model("mlpa_d2", 96, 48).dims[0] == 144
    assert build_model("mlpb_d2", 96, 48).dims[0] == 144
    assert build_model("gru_d2", 96, 48).gru.input_size == 144


def test_output_width_and_probs():
    model = build_model("mlpa_d2", 96, 48)
    probs = predict_probs(model, torch.randn(7, 144))
    assert probs.shape == (7, 96)
    assert ((probs >= 0) & (probs <= 1)).all()


def test_gru_steps_and_layers():
    model = build_model("gru_d2", 96, 48)
    assert model.gru.num_layers == 5 and model.steps == 5
    assert model.gru.hidden_size == 864


def test_unknown_architecture():
    with pytest.raises(ValueError):
        build_model("transformer", 96, 48)


def test_input_kind():
    assert input_kind("mlpa_d1") == "d1"
    assert input_kind("gru_d2") == "d2"
