"""Bundled benchmark scenario and its reference statistics.

The scenario pairs two five-symbol observation channels with contrasting
discrimination power: channel B separates the hypotheses far better than
channel A (KL divergences near 0.496 vs. 0.14 nats), so agent B usually
reaches the confidence threshold first.  The stopping-time averages below
are the benchmark's reference values; reproduction is judged against a
relative band, since the reference estimates carry Monte Carlo error of
their own and the solo-time definition admits small variations.
"""

from __future__ import annotations

from typing import NamedTuple

from seqduel.beliefs import Hypothesis, ObservationModel, Prior
from seqduel.engine import ExperimentConfig
from seqduel.policies import AgentPolicy

__all__ = [
    "CHANNEL_A_PMFS",
    "CHANNEL_B_PMFS",
    "REFERENCE_TAU",
    "REFERENCE_KL_A",
    "REFERENCE_KL_B",
    "TAU_BAND_RELATIVE",
    "KL_TOLERANCE",
    "ReferenceTau",
    "benchmark_models",
    "benchmark_config",
]

CHANNEL_A_PMFS = (
    (0.1, 0.2, 0.1, 0.3, 0.3),
    (0.2, 0.15, 0.25, 0.2, 0.2),
)
CHANNEL_B_PMFS = (
    (0.15, 0.25, 0.15, 0.25, 0.2),
    (0.4, 0.05, 0.35, 0.1, 0.1),
)


class ReferenceTau(NamedTuple):
    tau_avg: float
    tau_solo_a_avg: float
    tau_solo_b_avg: float


# Reference stopping-time averages per confidence threshold.
REFERENCE_TAU: dict[float, ReferenceTau] = {
    0.05: ReferenceTau(6.95, 19.70, 7.95),
    0.01: ReferenceTau(10.34, 30.52, 10.85),
}

# Channel discrimination rates D(pmf_theta0 || pmf_theta1) in nats.
REFERENCE_KL_A = 0.14
REFERENCE_KL_B = 0.496

TAU_BAND_RELATIVE = 0.15
KL_TOLERANCE = 0.005


def benchmark_models() -> tuple[ObservationModel, ObservationModel]:
    return (
        ObservationModel(*CHANNEL_A_PMFS),
        ObservationModel(*CHANNEL_B_PMFS),
    )


def benchmark_config(
    beta: float = 0.05,
    seed: int = 0,
    true_state: Hypothesis | None = None,
    max_iterations: int = 10_000,
    prior_theta1: float = 0.5,
) -> ExperimentConfig:
    """The benchmark scenario under the cost-minimizing policies."""
    model_a, model_b = benchmark_models()
    policy = AgentPolicy.optimal(beta)
    return ExperimentConfig(
        prior=Prior(prior_theta1),
        model_a=model_a,
        model_b=model_b,
        policy_a=policy,
        policy_b=policy,
        true_state=true_state,
        max_iterations=max_iterations,
        seed=seed,
    )
