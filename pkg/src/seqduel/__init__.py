"""Two-agent competitive sequential binary hypothesis testing.

A simulation library for a protocol in which two agents privately observe
a hidden binary state, exchange (possibly inverted) belief signals, fuse
what they hear with what they know, and race to stop at a confidence
threshold.  Includes brute-force oracles for the protocol's optimality
claims and a Monte Carlo harness for batch statistics.
"""

from seqduel.beliefs import (
    Belief,
    Hypothesis,
    ImpossibleObservationError,
    ObservationModel,
    Prior,
    bayes_update,
    belief_entropy,
    bernoulli_entropy,
    kl_divergence,
)
from seqduel.engine import (
    AgentId,
    ExperimentConfig,
    Initiator,
    InvariantViolation,
    IterationStep,
    TrialRecord,
    check_trial_invariants,
    derive_streams,
    detect_counterpart_stop,
    evaluate_cost,
    run_trial,
)
from seqduel.experiments import (
    BandMiss,
    BatchSummary,
    KLReport,
    check_reference_bands,
    check_reference_kl,
    export_trajectories,
    kl_report,
    run_batch,
    summarize,
    summary_text,
    write_summary,
)
from seqduel.oracles import (
    ErrorBoundsReport,
    MartingaleReport,
    SuiteResult,
    SweepResult,
    oracle_alpha_sweep,
    oracle_error_bounds,
    oracle_martingale,
    oracle_w_sweep,
    run_all_suites,
)
from seqduel.policies import (
    AgentPolicy,
    Decision,
    SignaledBelief,
    decide,
    expected_signal_distribution,
    final_decision_nonstopper,
    fuse,
    signal,
)
from seqduel.presets import (
    CHANNEL_A_PMFS,
    CHANNEL_B_PMFS,
    REFERENCE_TAU,
    benchmark_config,
    benchmark_models,
)

__version__ = "0.1.0"

__all__ = [
    "AgentId",
    "AgentPolicy",
    "BandMiss",
    "BatchSummary",
    "Belief",
    "CHANNEL_A_PMFS",
    "CHANNEL_B_PMFS",
    "Decision",
    "ErrorBoundsReport",
    "ExperimentConfig",
    "Hypothesis",
    "ImpossibleObservationError",
    "Initiator",
    "InvariantViolation",
    "IterationStep",
    "KLReport",
    "MartingaleReport",
    "ObservationModel",
    "Prior",
    "REFERENCE_TAU",
    "SignaledBelief",
    "SuiteResult",
    "SweepResult",
    "TrialRecord",
    "bayes_update",
    "belief_entropy",
    "benchmark_config",
    "benchmark_models",
    "bernoulli_entropy",
    "check_reference_bands",
    "check_reference_kl",
    "check_trial_invariants",
    "decide",
    "derive_streams",
    "detect_counterpart_stop",
    "evaluate_cost",
    "expected_signal_distribution",
    "export_trajectories",
    "final_decision_nonstopper",
    "fuse",
    "kl_divergence",
    "kl_report",
    "oracle_alpha_sweep",
    "oracle_error_bounds",
    "oracle_martingale",
    "oracle_w_sweep",
    "run_all_suites",
    "run_batch",
    "run_trial",
    "signal",
    "summarize",
    "summary_text",
    "write_summary",
    "__version__",
]
