"""Semi-Markov modelling of symbol sequences and periodicity detection.

The package models a DNA (or any finite-alphabet) sequence as a discrete
semi-Markov chain, derives interval transition kernels and d-periodic
return probabilities, re-estimates the model cycle by cycle along the
sequence, and colors regions by whether the periodicity strengthens.
"""

from .estimation import (
    EstimationConfig,
    Run,
    RunLengthEncoding,
    estimate_homogeneous,
    estimate_nh,
    extract_runs,
    rolling_estimate,
)
from .model import (
    VARIANTS,
    CoreSequence,
    IntervalKernel,
    SemiMarkovModel,
    StateSpace,
    WaitingTail,
    build_core,
    geometric_holding,
    interval_transition_closed,
    interval_transition_recursive,
    random_model,
    return_probability,
    uniform_embedded,
    waiting_time_pmf,
)
from .nhmodel import (
    NHIntervalKernel,
    NHSemiMarkovModel,
    all_position_return_probability,
    lift_homogeneous,
    nh_interval_closed,
    nh_interval_recursive,
    nh_return_probability,
    random_nh_model,
)
from .periodicity import (
    GREEN,
    RED,
    CycleProfile,
    RegionAnnotation,
    SequenceAnalysis,
    analyze_sequence,
    color_regions,
    cycle_probabilities,
    nh_cycle_probabilities,
    ratio_series,
)
from .report import AnalysisReport, ReportRow, build_report, write_csv, write_json
from .seqio import (
    GeneratorSpec,
    SymbolSequence,
    generate,
    mc_return_probability,
    read_sequence,
    simulate_smc,
    write_fasta,
)
from .verify import VerificationResult, run_verification

__version__ = "0.1.0"

__all__ = [
    "AnalysisReport",
    "CoreSequence",
    "CycleProfile",
    "EstimationConfig",
    "GREEN",
    "GeneratorSpec",
    "IntervalKernel",
    "NHIntervalKernel",
    "NHSemiMarkovModel",
    "RED",
    "RegionAnnotation",
    "ReportRow",
    "Run",
    "RunLengthEncoding",
    "SemiMarkovModel",
    "SequenceAnalysis",
    "StateSpace",
    "SymbolSequence",
    "VARIANTS",
    "VerificationResult",
    "WaitingTail",
    "all_position_return_probability",
    "analyze_sequence",
    "build_core",
    "build_report",
    "color_regions",
    "cycle_probabilities",
    "estimate_homogeneous",
    "estimate_nh",
    "extract_runs",
    "generate",
    "geometric_holding",
    "interval_transition_closed",
    "interval_transition_recursive",
    "lift_homogeneous",
    "mc_return_probability",
    "nh_cycle_probabilities",
    "nh_interval_closed",
    "nh_interval_recursive",
    "nh_return_probability",
    "random_model",
    "random_nh_model",
    "ratio_series",
    "read_sequence",
    "return_probability",
    "rolling_estimate",
    "run_verification",
    "simulate_smc",
    "uniform_embedded",
    "waiting_time_pmf",
    "write_csv",
    "write_fasta",
    "write_json",
]
