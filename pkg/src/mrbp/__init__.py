"""Multi-round belief-propagation decoding workbench for short LDPC codes."""

from .bp import BpOutcome, BpTrace, LLR_MAX, bp_decode, bp_decode_traced
from .channel import (LlrFrame, SnrSpec, make_frame, modulate, sigma2_from_ebn0,
                      transmit)
from .codes import (AlistParseError, ParityCheckCode, brute_force_mld,
                    enumerate_codewords, generator_matrix, load_alist,
                    parse_alist, to_alist)
from .data import (DatasetHeader, RecordBatch, build_dataset, generate_failures,
                   label_frame, read_dataset, write_dataset)
from .models import (ModelWeights, count_parameters, forward_mlp,
                     forward_stacked_gru, load_weights, save_weights)
from .multiround import (CandidateList, MrbpResult, mrbp_decode,
                         mrbp_success_given_labels, perturb)
from .ranking import (ReliabilityRanking, rank_by_app_magnitude,
                      rank_by_channel_magnitude, rank_by_model, rank_by_nsmea)
from .rng import FrameRng
from .simulate import (SimConfig, SimPointResult, SimResult, emit_results,
                       run_point, run_sweep, wilson_interval)

__version__ = "0.1.0"
