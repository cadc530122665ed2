"""Training loop: Adam + binary cross-entropy with a reduce-on-plateau
learning-rate schedule monitored by the validation loss."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np
import torch
from torch import nn

from .data import FlipDataset, load_dataset, split_dataset
from .export import export_weights
from .models import build_model, input_kind, parameter_count


@dataclass
class TrainConfig:
    dataset: str
    architecture: str = "gru_d2"
    epochs: int = 250
    lr: float = 1e-4
    batch_size: int = 4096
    val_fraction: float = 0.05
    seed: int = 0
    loss: str = "bce"            # "bce" | "mse" (the earlier regression recipe)
    plateau_factor: float = 0.5
    plateau_patience: int = 5
    out: str | None = None
    checkpoint_best: bool = True   # re-export `out` whenever val loss improves
    max_records: int | None = None
    log_every: int = 1


@dataclass
class TrainReport:
    architecture: str
    parameters: int
    records: int
    val_records: int
    seed: int
    torch_version: str
    train_loss: list = field(default_factory=list)
    val_loss: list = field(default_factory=list)
    lr_trace: list = field(default_factory=list)
    best_val: float = float("inf")
    best_epoch: int = -1
    wall_time: float = 0.0


def _epoch_batches(count, batch_size, generator):
    order = torch.randperm(count, generator=generator)
    for a in range(0, count, batch_size):
        yield order[a:a + batch_size]


def _loss_fn(kind):
    if kind == "bce":
        return nn.BCEWithLogitsLoss()
    if kind == "mse":
        def mse(logits, target):
            return torch.mean((torch.sigmoid(logits) - target) ** 2)
        return mse
    raise ValueError(f"unknown loss {kind!r}")


@torch.no_grad()
def _eval_loss(model, loss_fn, x, b, batch_size):
    if len(x) == 0:
        return float("nan")
    model.eval()
    total = 0.0
    for a in range(0, len(x), batch_size):
        xa, ba = x[a:a + batch_size], b[a:a + batch_size]
        total += float(loss_fn(model(xa), ba)) * len(xa)
    return total / len(x)


def train(config: TrainConfig, dataset: FlipDataset | None = None,
          progress=None) -> tuple[nn.Module, TrainReport]:
    """Train per config; returns the best-validation model and a report.
    Exports weights to config.out when set."""
    t0 = time.monotonic()
    if dataset is None:
        dataset = load_dataset(config.dataset)
    if config.max_records is not None and len(dataset) > config.max_records:
        dataset = FlipDataset(header=dataset.header,
                              inputs=dataset.inputs[:config.max_records],
                              labels=dataset.labels[:config.max_records])
    torch.manual_seed(config.seed)
    model = build_model(config.architecture, dataset.n, dataset.k)
    if model(torch.zeros(1, dataset.inputs.shape[1])).shape[1] != dataset.n:
        raise ValueError("architecture output does not match the dataset code")

    (xt, bt), (xv, bv) = split_dataset(dataset, config.val_fraction, config.seed)
    xt = torch.from_numpy(xt)
    bt = torch.from_numpy(bt)
    xv = torch.from_numpy(xv)
    bv = torch.from_numpy(bv)

    loss_fn = _loss_fn(config.loss)
    opt = torch.optim.Adam(model.parameters(), lr=config.lr)
    sched = torch.optim.lr_scheduler.ReduceLROnPlateau(
        opt, factor=config.plateau_factor, patience=config.plateau_patience)
    gen = torch.Generator().manual_seed(config.seed + 1)

    report = TrainReport(architecture=config.architecture,
                         parameters=parameter_count(model),
                         records=len(xt), val_records=len(xv),
                         seed=config.seed, torch_version=torch.__version__)
    best_state = {k: v.detach().clone() for k, v in model.state_dict().items()}

    for epoch in range(config.epochs):
        model.train()
        running = 0.0
        for idx in _epoch_batches(len(xt), config.batch_size, gen):
            opt.zero_grad()
            loss = loss_fn(model(xt[idx]), bt[idx])
            loss.backward()
            opt.step()
            running += float(loss.detach()) * len(idx)
        train_loss = running / len(xt)
        val_loss = _eval_loss(model, loss_fn, xv, bv, config.batch_size)
        monitored = train_loss if np.isnan(val_loss) else val_loss
        sched.step(monitored)
        report.train_loss.append(train_loss)
        report.val_loss.append(val_loss)
        report.lr_trace.append(opt.param_groups[0]["lr"])
        if monitored < report.best_val:
            report.best_val = monitored
            report.best_epoch = epoch
            best_state = {k: v.detach().clone()
                          for k, v in model.state_dict().items()}
            if config.out and config.checkpoint_best:
                export_weights(model, input_kind(config.architecture), config.out)
        if progress is not None:
            progress(epoch, report)

    model.load_state_dict(best_state)
    report.wall_time = time.monotonic() - t0
    if config.out:
        export_weights(model, input_kind(config.architecture), config.out)
    return model, report
