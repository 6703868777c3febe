"""Polar codes over binary-input channels with quantum outputs.

Exact desk-scale synthesis of the polarized channels, certified reliability
bounds at arbitrary depth, the fidelity-based coding rule, and a simulator
for the sequential-measurement decoder.
"""

from .budget import Budget, BudgetExceeded
from .channel import (BinaryCQChannel, ChannelParams, channel_fidelity,
                      channel_from_spec, channel_params, holevo_information,
                      holevo_lower_bound_from_fidelity,
                      holevo_upper_bound_from_fidelity, load_channel,
                      make_classical, make_pure_overlap, root_channel_fidelity)
from .encoding import (CodeSpec, bit_reversal_permutation, coset_encode, encode,
                       encode_many, generator_matrix)
from .synthesis import (PureStateEnsemble, SplitChannelIndex, gram_split_params,
                        split_channel, split_params, split_rates,
                        split_root_fidelities, transform_minus, transform_plus)
from .bounds import (ReliabilityBounds, ReliabilityInterval, hybrid_bounds,
                     propagate_all, propagate_from_seed, propagate_minus,
                     propagate_plus)
from .construction import (ConstructionReport, choose_frozen_bits, construct_code,
                           error_bound, select_information_set)
from .decoder import (DecisionProjectorPair, DecoderTrajectory, ErrorReport,
                      SCDecoder, build_decision_projectors, decode_monte_carlo,
                      exact_block_error, sen_bound_check)

__version__ = "0.1.0"

__all__ = [
    "Budget", "BudgetExceeded",
    "BinaryCQChannel", "ChannelParams", "channel_fidelity", "channel_from_spec",
    "channel_params", "holevo_information", "holevo_lower_bound_from_fidelity",
    "holevo_upper_bound_from_fidelity", "load_channel", "make_classical",
    "make_pure_overlap", "root_channel_fidelity",
    "CodeSpec", "bit_reversal_permutation", "coset_encode", "encode",
    "encode_many", "generator_matrix",
    "PureStateEnsemble", "SplitChannelIndex", "gram_split_params", "split_channel",
    "split_params", "split_rates", "split_root_fidelities", "transform_minus",
    "transform_plus",
    "ReliabilityBounds", "ReliabilityInterval", "hybrid_bounds", "propagate_all",
    "propagate_from_seed", "propagate_minus", "propagate_plus",
    "ConstructionReport", "choose_frozen_bits", "construct_code", "error_bound",
    "select_information_set",
    "DecisionProjectorPair", "DecoderTrajectory", "ErrorReport", "SCDecoder",
    "build_decision_projectors", "decode_monte_carlo", "exact_block_error",
    "sen_bound_check",
]
