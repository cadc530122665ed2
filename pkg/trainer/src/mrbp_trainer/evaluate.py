"""Ranking-quality metric: does a positive label land in the top-T picks."""

from __future__ import annotations

import numpy as np
import torch

from .data import FlipDataset
from .models import predict_probs


def top_t_hit_rate(scores: np.ndarray, labels: np.ndarray, t: int) -> float:
    """Fraction of records with at least one positive label whose T highest
    scores include a positive; ties break toward the lower VN index."""
    labels = np.asarray(labels)
    has_positive = labels.any(axis=1)
    if not has_positive.any():
        return float("nan")
    order = np.argsort(-np.asarray(scores), axis=1, kind="stable")[:, :t]
    hits = np.take_along_axis(labels, order, axis=1).any(axis=1)
    return float(hits[has_positive].mean())


def evaluate_topT(model: torch.nn.Module, dataset: FlipDataset, t: int) -> float:
    scores = predict_probs(model, dataset.inputs).numpy()
    return top_t_hit_rate(scores, dataset.labels, t)
