"""RaptorQ erasure codec with per-class precode sizing.

The encoder follows RFC 6330's systematic construction. Source blocks
carry an importance class, and each class maps to its own LDPC/HDPC row
counts, so blocks that matter more get a denser precode and survive more
channel loss at the same overhead. Also included: an erasure-channel
simulation harness and closed-form decode-probability calculators.
"""

from .chansim import (
    ChannelConfig,
    ExperimentReport,
    TimingReport,
    TrialResult,
    erase,
    measure_timing,
    run_experiment,
    run_trial,
)
from .codec import (
    DecodeFailure,
    IntermediateSymbols,
    SourceBlock,
    Symbol,
    decode_block,
    encode_block,
    from_wire,
    gen_encoding_symbol,
    gen_encoding_symbols,
    make_source_block,
    to_wire,
)
from .codeparams import (
    CodeParams,
    ImportanceClass,
    PrecodeProfile,
    Tuple,
    default_profiles,
    load_profiles,
    params_for,
    parse_profiles,
    pbpr_params,
    standard_params,
    tuple_gen,
)
from .matrixgen import ConstraintMatrix, SingularReport, build_constraint_matrix, rank, solve
from .rankanalysis import (
    MatrixModel,
    RankInputs,
    combined_full_rank_prob,
    combined_full_rank_prob_exact,
    empirical_rank_profile,
    full_rank_prob_random,
    full_rank_prob_random_exact,
)

__version__ = "0.1.0"

__all__ = [
    "ChannelConfig",
    "CodeParams",
    "ConstraintMatrix",
    "DecodeFailure",
    "ExperimentReport",
    "ImportanceClass",
    "IntermediateSymbols",
    "MatrixModel",
    "PrecodeProfile",
    "RankInputs",
    "SingularReport",
    "SourceBlock",
    "Symbol",
    "TimingReport",
    "TrialResult",
    "Tuple",
    "build_constraint_matrix",
    "combined_full_rank_prob",
    "combined_full_rank_prob_exact",
    "decode_block",
    "default_profiles",
    "empirical_rank_profile",
    "encode_block",
    "erase",
    "from_wire",
    "full_rank_prob_random",
    "full_rank_prob_random_exact",
    "gen_encoding_symbol",
    "gen_encoding_symbols",
    "load_profiles",
    "make_source_block",
    "measure_timing",
    "params_for",
    "parse_profiles",
    "pbpr_params",
    "rank",
    "run_experiment",
    "run_trial",
    "solve",
    "standard_params",
    "to_wire",
    "tuple_gen",
    "__version__",
]
