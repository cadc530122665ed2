"""Interchangeable rules that order VNs from least to most reliable.

Every rule returns a full permutation pi with pi[0] the least reliable VN
(the first flip candidate).  Ties always break toward the smaller VN index,
so rankings are reproducible across runs and implementations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bp import BpOutcome
from .channel import LlrFrame
from .models import ModelWeights, predict_flip_scores


@dataclass(frozen=True)
class ReliabilityRanking:
    """pi[t] = index of the (t+1)-th least reliable VN; scores are the raw
    rule outputs (direction depends on the rule)."""

    pi: np.ndarray       # int64 (n,)
    scores: np.ndarray   # float64 (n,)


def _rank(scores: np.ndarray, descending: bool) -> ReliabilityRanking:
    scores = np.asarray(scores, dtype=np.float64)
    key = -scores if descending else scores
    return ReliabilityRanking(pi=np.argsort(key, kind="stable"), scores=scores)


def rank_by_channel_magnitude(l_ch: np.ndarray) -> ReliabilityRanking:
    """Least reliable = smallest |channel LLR| (pre-decoding metric)."""
    return _rank(np.abs(l_ch), descending=False)


def rank_by_app_magnitude(outcome: BpOutcome) -> ReliabilityRanking:
    """Least reliable = smallest |posterior LLR| after the failed BP run."""
    return _rank(np.abs(outcome.l_app), descending=False)


def rank_by_nsmea(outcome: BpOutcome) -> ReliabilityRanking:
    """Least reliable = most sign mismatches between incoming check messages
    and the VN's posterior LLR, accumulated over all executed iterations."""
    if outcome.trace is None:
        raise ValueError("nsmea ranking needs a traced BP outcome")
    tr = outcome.trace
    n = tr.app_signs.shape[1]
    mismatches = (tr.c2v_signs != tr.app_signs[:, tr.edge_vn]).sum(axis=0)
    scores = np.bincount(tr.edge_vn, weights=mismatches, minlength=n)
    return _rank(scores, descending=True)


def rank_by_model(weights: ModelWeights, frame: LlrFrame) -> ReliabilityRanking:
    """Least reliable = highest predicted flip-success probability."""
    return _rank(predict_flip_scores(weights, frame), descending=True)


RULES = ("chmag", "appmag", "nsmea", "nn")


def needs_trace(rule: str) -> bool:
    return rule == "nsmea"
