"""The four flip-prediction model variants.

All models emit logits; apply a sigmoid to get per-VN flip-success
probabilities.  Widths are chosen for comparable parameter budgets at
(96,48): the d2 variant of the small MLP narrows its first hidden layer to
155 to stay at the 46k budget of the d1 variant, and the big MLP's seven
hidden layers of 1835 put it at the 20.6M budget of the stacked GRU
(hidden size 6*(2n-k), 5 layers, 5 time steps).
"""

from __future__ import annotations

import torch
from torch import nn

ARCHITECTURES = ("mlpa_d1", "mlpa_d2", "mlpb_d2", "gru_d2")

MLPA_D2_HIDDEN1 = 155
MLPB_HIDDEN = 1835
GRU_LAYERS = 5
GRU_STEPS = 5


class FlipMlp(nn.Module):
    def __init__(self, dims, dropout=0.1):
        super().__init__()
        layers = []
        for i in range(len(dims) - 2):
            layers += [nn.Linear(dims[i], dims[i + 1]), nn.ReLU(),
                       nn.Dropout(dropout)]
        layers.append(nn.Linear(dims[-2], dims[-1]))
        self.net = nn.Sequential(*layers)
        self.dims = tuple(dims)

    def forward(self, x):
        return self.net(x)


class FlipGru(nn.Module):
    """Stacked GRU fed the same input vector at every time step; the top
    layer's final hidden state maps through one affine layer to n logits."""

    def __init__(self, d_in, hidden, num_layers, steps, n_out, dropout=0.1):
        super().__init__()
        self.gru = nn.GRU(d_in, hidden, num_layers=num_layers,
                          batch_first=True, dropout=dropout)
        self.fc = nn.Linear(hidden, n_out)
        self.steps = steps

    def forward(self, x):
        seq = x.unsqueeze(1).expand(-1, self.steps, -1)
        out, _ = self.gru(seq)
        return self.fc(out[:, -1])


def build_model(architecture: str, n: int, k: int, dropout: float = 0.1) -> nn.Module:
    """Construct one of the named architectures for an (n, k) code."""
    d2_in = 2 * n - k
    if architecture == "mlpa_d1":
        return FlipMlp([n, 2 * n, n, n], dropout)
    if architecture == "mlpa_d2":
        return FlipMlp([d2_in, MLPA_D2_HIDDEN1, n, n], dropout)
    if architecture == "mlpb_d2":
        return FlipMlp([d2_in] + [MLPB_HIDDEN] * 7 + [n], dropout)
    if architecture == "gru_d2":
        return FlipGru(d2_in, 6 * d2_in, GRU_LAYERS, GRU_STEPS, n, dropout)
    raise ValueError(f"unknown architecture {architecture!r}")


def input_kind(architecture: str) -> str:
    return "d1" if architecture.endswith("_d1") else "d2"


def parameter_count(model: nn.Module) -> int:
    return sum(p.numel() for p in model.parameters())


@torch.no_grad()
def predict_probs(model: nn.Module, inputs, batch_size: int = 4096) -> torch.Tensor:
    """Batched sigmoid(model(x)) in eval mode."""
    model.eval()
    x = torch.as_tensor(inputs, dtype=torch.float32)
    chunks = [torch.sigmoid(model(x[a:a + batch_size]))
              for a in range(0, len(x), batch_size)]
    return torch.cat(chunks) if chunks else torch.zeros((0,))
