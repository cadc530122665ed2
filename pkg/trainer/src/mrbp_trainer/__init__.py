"""Training side of the flip-prediction pipeline: consumes labeled-failure
datasets, trains the model variants, exports inference weight containers."""

from .data import FlipDataset, load_dataset, split_dataset
from .evaluate import evaluate_topT, top_t_hit_rate
from .export import export_weights
from .models import (ARCHITECTURES, FlipGru, FlipMlp, build_model, input_kind,
                     parameter_count, predict_probs)
from .training import TrainConfig, TrainReport, train

__version__ = "0.1.0"
