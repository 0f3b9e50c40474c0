"""Lockstep two-agent trial execution.

One trial: a hidden state is fixed or drawn from the prior, then per
iteration each agent observes privately, updates its local belief,
transmits a possibly-inverted signal, fuses what it received, and runs
its threshold test; an agent also stops when the counterpart's signal
reveals a crossing (the min-component test, which inversion cannot
hide).  Both agents therefore stop at the same iteration.  After the
protocol stops, each agent's solo crossing time is resolved by running
its local belief chain onward on the same observation stream.

Randomness is derived per trial from (seed, trial_index) via spawned
substreams (state, observations x2, signal coins x2), so trials are
reproducible independently of execution order or parallelism.

There are two execution paths.  The general path runs the object-level
protocol above and supports every configuration.  The fast path covers
the common case (both agents fuse at weight 1 with both thresholds
equal to a shared beta < 0.5): there fusion is the identity and the
signal exchange cannot alter any recorded quantity, so each agent's
chain is scanned independently with vectorized sampling.  Log-ratios
are still accumulated with scalar float additions in iteration order,
and threshold crossings are confirmed with the same scalar expressions
the general path evaluates, so the two paths produce bit-identical
records; a property test holds them to that.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from seqduel.beliefs import Belief, Hypothesis, ObservationModel, Prior, bayes_update
from seqduel.policies import (
    AgentPolicy,
    Decision,
    SignaledBelief,
    decide,
    final_decision_nonstopper,
    fuse,
    signal,
)

__all__ = [
    "AgentId",
    "Initiator",
    "ExperimentConfig",
    "IterationStep",
    "TrialRecord",
    "InvariantViolation",
    "run_trial",
    "evaluate_cost",
    "detect_counterpart_stop",
    "check_trial_invariants",
]

_OBS_BLOCK = 64
# Slack subtracted from the log-ratio crossing level when prefiltering
# candidate iterations in the fast path.  It dwarfs float rounding in the
# level itself while staying far below one observation's smallest step,
# so no true crossing can hide below the prefilter.
_CROSSING_MARGIN = 1e-9


class AgentId(Enum):
    A = "a"
    B = "b"


class Initiator(Enum):
    """Which agent's own threshold test fired at the stopping iteration."""

    A = "a"
    B = "b"
    BOTH = "both"


class InvariantViolation(AssertionError):
    """A structural property of the protocol failed on a concrete trial."""


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything one trial needs except the trial index.

    true_state None means the state is drawn from the prior each trial;
    a Hypothesis pins it.  Both agents must use the same beta (the
    fairness condition) unless allow_unequal_beta is set for sweeps.
    """

    prior: Prior
    model_a: ObservationModel
    model_b: ObservationModel
    policy_a: AgentPolicy
    policy_b: AgentPolicy
    true_state: Hypothesis | None = None
    cost_continue_a: float = 1.0
    cost_error_a: float = 1.0
    cost_continue_b: float = 1.0
    cost_error_b: float = 1.0
    max_iterations: int = 10_000
    seed: int = 0
    allow_unequal_beta: bool = False

    def __post_init__(self) -> None:
        if self.policy_a.beta != self.policy_b.beta and not self.allow_unequal_beta:
            raise ValueError(
                "agents must share one confidence threshold beta "
                f"({self.policy_a.beta!r} != {self.policy_b.beta!r}); "
                "set allow_unequal_beta for sweep configurations"
            )
        for name in ("cost_continue_a", "cost_error_a", "cost_continue_b", "cost_error_b"):
            if getattr(self, name) < 0.0:
                raise ValueError(f"{name} must be nonnegative")
        if self.max_iterations < 1:
            raise ValueError(f"max_iterations must be >= 1, got {self.max_iterations}")
        if not isinstance(self.max_iterations, int):
            raise ValueError("max_iterations must be an integer")
        if not isinstance(self.seed, int) or isinstance(self.seed, bool):
            raise ValueError(f"seed must be an integer, got {self.seed!r}")
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must fit in 64 unsigned bits, got {self.seed}")

    def model(self, agent: AgentId) -> ObservationModel:
        return self.model_a if agent is AgentId.A else self.model_b

    def policy(self, agent: AgentId) -> AgentPolicy:
        return self.policy_a if agent is AgentId.A else self.policy_b


@dataclass(frozen=True)
class IterationStep:
    """One lockstep iteration as seen from outside: local beliefs after
    the update, the transmitted signals, and each agent's decision."""

    iteration: int
    belief_a: Belief
    belief_b: Belief
    signal_a: SignaledBelief
    signal_b: SignaledBelief
    decision_a: Decision
    decision_b: Decision


@dataclass(frozen=True)
class TrialRecord:
    true_state: Hypothesis
    tau: int
    tau_solo_a: int | None
    tau_solo_b: int | None
    initiator: Initiator | None
    decision_a: Hypothesis
    decision_b: Hypothesis
    conditional_error_a: float
    conditional_error_b: float
    correct_a: bool
    correct_b: bool
    cost_a: float
    cost_b: float
    truncated: bool
    seed: int
    trial_index: int
    trajectory: tuple[IterationStep, ...] | None = None


def detect_counterpart_stop(received: SignaledBelief, beta: float) -> bool:
    """True iff the signal proves the sender's belief crossed beta.

    The minimum component is unchanged by inversion, so the test reads
    through the signaling policy regardless of the sender's coin.
    """
    return received.min_component <= beta


def evaluate_cost(record: TrialRecord, c: float, c_hat: float, agent: AgentId) -> float:
    """Per-iteration cost plus error penalty: c * tau + c_hat * error."""
    if c < 0.0 or c_hat < 0.0:
        raise ValueError("cost coefficients must be nonnegative")
    err = record.conditional_error_a if agent is AgentId.A else record.conditional_error_b
    return c * record.tau + c_hat * err


def derive_streams(seed: int, trial_index: int) -> tuple[np.random.Generator, ...]:
    """Five independent generators for one trial: true-state draw, agent
    observations (A, B), signal coins (A, B)."""
    children = np.random.SeedSequence(seed, spawn_key=(trial_index,)).spawn(5)
    return tuple(np.random.default_rng(ss) for ss in children)


class _SymbolStream:
    """Buffered symbol sampler over one agent's observation generator.

    Uniforms are drawn in fixed blocks and mapped through the cumulative
    pmf; both engine paths consume the same block sequence, so symbol
    streams agree between them by construction.
    """

    __slots__ = ("_rng", "_cum", "_buf", "_pos")

    def __init__(self, rng: np.random.Generator, model: ObservationModel, state: Hypothesis):
        self._rng = rng
        self._cum = model.cumulative(state)
        self._buf: np.ndarray | None = None
        self._pos = 0

    def _refill(self) -> None:
        u = self._rng.random(_OBS_BLOCK)
        self._buf = np.searchsorted(self._cum, u, side="right")
        self._pos = 0

    def next_symbol(self) -> int:
        if self._buf is None or self._pos >= len(self._buf):
            self._refill()
        s = int(self._buf[self._pos])
        self._pos += 1
        return s

    def next_block(self) -> np.ndarray:
        """Whole remaining buffer (refilling if spent); advances past it."""
        if self._buf is None or self._pos >= len(self._buf):
            self._refill()
        block = self._buf[self._pos :]
        self._pos = len(self._buf)
        return block


def _draw_true_state(config: ExperimentConfig, state_rng: np.random.Generator) -> Hypothesis:
    if config.true_state is not None:
        return config.true_state
    u = state_rng.random()
    return Hypothesis.THETA1 if u < config.prior.p_theta1 else Hypothesis.THETA0


def _fast_path_eligible(config: ExperimentConfig) -> bool:
    for pol in (config.policy_a, config.policy_b):
        if not pol.constant_unit_weight:
            return False
        if not (pol.t_theta0 == pol.t_theta1 == pol.beta):
            return False
        if not pol.beta < 0.5:
            return False
    return config.policy_a.beta == config.policy_b.beta


def _crossed(lr: float, beta: float) -> bool:
    # The exact scalar test both paths share: min component of the belief
    # at this log-ratio, compared against beta.
    t = math.exp(-abs(lr))
    return t / (1.0 + t) <= beta


def _scan_solo_chain(
    stream: _SymbolStream,
    model: ObservationModel,
    lr0: float,
    beta: float,
    max_iterations: int,
) -> tuple[int | None, list[float]]:
    """Iterate one agent's local log-ratio chain until it crosses beta or
    the horizon runs out.  Returns (crossing iteration or None, the full
    list of per-iteration log-ratios up to the scan's end)."""
    level = math.log((1.0 - beta) / beta) - _CROSSING_MARGIN
    llr = model.symbol_log_ratios
    lrs: list[float] = []
    lr = lr0
    n = 0
    while n < max_iterations:
        block = stream.next_block()
        steps = llr[block].tolist()
        for step in steps:
            lr = lr + step
            lrs.append(lr)
            n += 1
            if abs(lr) >= level and _crossed(lr, beta):
                return n, lrs
            if n >= max_iterations:
                break
    return None, lrs


def _run_trial_fast(
    config: ExperimentConfig, seed: int, trial_index: int
) -> TrialRecord:
    state_rng, obs_a, obs_b, _, _ = derive_streams(seed, trial_index)
    true_state = _draw_true_state(config, state_rng)
    beta = config.policy_a.beta
    lr0 = config.prior.as_belief().log_ratio

    stream_a = _SymbolStream(obs_a, config.model_a, true_state)
    stream_b = _SymbolStream(obs_b, config.model_b, true_state)
    solo_a, lrs_a = _scan_solo_chain(stream_a, config.model_a, lr0, beta, config.max_iterations)
    solo_b, lrs_b = _scan_solo_chain(stream_b, config.model_b, lr0, beta, config.max_iterations)

    truncated = solo_a is None and solo_b is None
    if truncated:
        tau = config.max_iterations
        initiator = None
    else:
        tau = min(t for t in (solo_a, solo_b) if t is not None)
        if solo_a == tau and solo_b == tau:
            initiator = Initiator.BOTH
        elif solo_a == tau:
            initiator = Initiator.A
        else:
            initiator = Initiator.B

    belief_a = Belief.from_log_ratio(lrs_a[tau - 1])
    belief_b = Belief.from_log_ratio(lrs_b[tau - 1])

    def declare(belief: Belief, initiated: bool) -> Hypothesis:
        if initiated:
            # own test fired: the branch is decided by which mass collapsed
            return Hypothesis.THETA1 if belief.p_theta0 <= beta else Hypothesis.THETA0
        return final_decision_nonstopper(belief)

    initiated_a = initiator in (Initiator.A, Initiator.BOTH)
    initiated_b = initiator in (Initiator.B, Initiator.BOTH)
    decision_a = declare(belief_a, initiated_a)
    decision_b = declare(belief_b, initiated_b)
    err_a = belief_a.prob(decision_a.other())
    err_b = belief_b.prob(decision_b.other())

    return TrialRecord(
        true_state=true_state,
        tau=tau,
        tau_solo_a=solo_a,
        tau_solo_b=solo_b,
        initiator=initiator,
        decision_a=decision_a,
        decision_b=decision_b,
        conditional_error_a=err_a,
        conditional_error_b=err_b,
        correct_a=decision_a is true_state,
        correct_b=decision_b is true_state,
        cost_a=config.cost_continue_a * tau + config.cost_error_a * err_a,
        cost_b=config.cost_continue_b * tau + config.cost_error_b * err_b,
        truncated=truncated,
        seed=seed,
        trial_index=trial_index,
        trajectory=None,
    )


def _run_trial_general(
    config: ExperimentConfig,
    seed: int,
    trial_index: int,
    record_trajectory: bool,
) -> TrialRecord:
    state_rng, obs_a, obs_b, coin_a, coin_b = derive_streams(seed, trial_index)
    true_state = _draw_true_state(config, state_rng)
    pol_a, pol_b = config.policy_a, config.policy_b
    stream_a = _SymbolStream(obs_a, config.model_a, true_state)
    stream_b = _SymbolStream(obs_b, config.model_b, true_state)

    belief_a = config.prior.as_belief()
    belief_b = config.prior.as_belief()
    solo_a: int | None = None
    solo_b: int | None = None
    steps: list[IterationStep] = []

    tau = config.max_iterations
    truncated = True
    initiator: Initiator | None = None
    fused_a = belief_a
    fused_b = belief_b

    for n in range(1, config.max_iterations + 1):
        belief_a = bayes_update(belief_a, config.model_a, stream_a.next_symbol())
        belief_b = bayes_update(belief_b, config.model_b, stream_b.next_symbol())
        if solo_a is None and belief_a.min_component <= pol_a.beta:
            solo_a = n
        if solo_b is None and belief_b.min_component <= pol_b.beta:
            solo_b = n

        sig_a = signal(belief_a, pol_a.alpha, float(coin_a.random()))
        sig_b = signal(belief_b, pol_b.alpha, float(coin_b.random()))
        fused_a = fuse(belief_a, sig_b, pol_a.weight_at(n))
        fused_b = fuse(belief_b, sig_a, pol_b.weight_at(n))
        own_a = decide(fused_a, pol_a)
        own_b = decide(fused_b, pol_b)
        detected_a = detect_counterpart_stop(sig_b, pol_a.beta)
        detected_b = detect_counterpart_stop(sig_a, pol_b.beta)

        stopping = own_a.stops or own_b.stops or detected_a or detected_b
        if record_trajectory:
            steps.append(
                IterationStep(n, belief_a, belief_b, sig_a, sig_b, own_a, own_b)
            )
        if stopping:
            tau = n
            truncated = False
            if own_a.stops and own_b.stops:
                initiator = Initiator.BOTH
            elif own_a.stops:
                initiator = Initiator.A
            elif own_b.stops:
                initiator = Initiator.B
            else:
                # reachable only off the unit-weight family: a signal
                # revealed beta-crossing of a local belief whose owner's
                # fused test did not fire
                initiator = None
            break

    # resolve outstanding solo crossing times on the same streams
    lr_a, lr_b = belief_a.log_ratio, belief_b.log_ratio
    n_a = n_b = tau
    while solo_a is None and n_a < config.max_iterations:
        lr_a = lr_a + float(config.model_a.symbol_log_ratios[stream_a.next_symbol()])
        n_a += 1
        if _crossed(lr_a, pol_a.beta):
            solo_a = n_a
    while solo_b is None and n_b < config.max_iterations:
        lr_b = lr_b + float(config.model_b.symbol_log_ratios[stream_b.next_symbol()])
        n_b += 1
        if _crossed(lr_b, pol_b.beta):
            solo_b = n_b

    if truncated:
        initiator = None
        decision_a = final_decision_nonstopper(fused_a)
        decision_b = final_decision_nonstopper(fused_b)
    else:
        if own_a.stops:
            decision_a = own_a.declared
        else:
            decision_a = final_decision_nonstopper(fused_a)
        if own_b.stops:
            decision_b = own_b.declared
        else:
            decision_b = final_decision_nonstopper(fused_b)

    err_a = fused_a.prob(decision_a.other())
    err_b = fused_b.prob(decision_b.other())

    if record_trajectory and steps:
        # rewrite the final iteration so exported decisions reflect what
        # each agent actually declared
        last = steps[-1]
        steps[-1] = replace(
            last,
            decision_a=_stop_decision(decision_a),
            decision_b=_stop_decision(decision_b),
        )

    return TrialRecord(
        true_state=true_state,
        tau=tau,
        tau_solo_a=solo_a,
        tau_solo_b=solo_b,
        initiator=initiator,
        decision_a=decision_a,
        decision_b=decision_b,
        conditional_error_a=err_a,
        conditional_error_b=err_b,
        correct_a=decision_a is true_state,
        correct_b=decision_b is true_state,
        cost_a=config.cost_continue_a * tau + config.cost_error_a * err_a,
        cost_b=config.cost_continue_b * tau + config.cost_error_b * err_b,
        truncated=truncated,
        seed=seed,
        trial_index=trial_index,
        trajectory=tuple(steps) if record_trajectory else None,
    )


def _stop_decision(declared: Hypothesis) -> Decision:
    return Decision.STOP_THETA1 if declared is Hypothesis.THETA1 else Decision.STOP_THETA0


def run_trial(
    config: ExperimentConfig,
    seed: int | None = None,
    trial_index: int = 0,
    *,
    record_trajectory: bool = False,
    force_general: bool = False,
) -> TrialRecord:
    """Execute one trial; deterministic in (config, seed, trial_index).

    seed defaults to config.seed.  The fast path is used automatically
    when the configuration permits it and no trajectory was requested;
    force_general pins the object-level path (used by equivalence tests).
    """
    if seed is None:
        seed = config.seed
    if trial_index < 0:
        raise ValueError(f"trial_index must be nonnegative, got {trial_index}")
    if not force_general and not record_trajectory and _fast_path_eligible(config):
        return _run_trial_fast(config, seed, trial_index)
    return _run_trial_general(config, seed, trial_index, record_trajectory)


_ERR_TOL = 1e-12


def check_trial_invariants(record: TrialRecord, config: ExperimentConfig) -> None:
    """Raise InvariantViolation if a structural protocol property failed.

    Checked on every record: the non-initiating agent's conditional error
    never exceeds 1/2, and each initiating agent's error is bounded by the
    threshold of the branch it fired.  For unit-weight configurations with
    thresholds pinned at beta, additionally: the stop iteration equals the
    smaller solo crossing time.
    """

    def fail(what: str) -> None:
        raise InvariantViolation(
            f"{what} (trial_index={record.trial_index}, seed={record.seed})"
        )

    if record.tau < 1 or record.tau > config.max_iterations:
        fail(f"stop iteration {record.tau} outside [1, max_iterations]")

    initiated = {
        AgentId.A: record.initiator in (Initiator.A, Initiator.BOTH),
        AgentId.B: record.initiator in (Initiator.B, Initiator.BOTH),
    }
    for agent, err, declared in (
        (AgentId.A, record.conditional_error_a, record.decision_a),
        (AgentId.B, record.conditional_error_b, record.decision_b),
    ):
        pol = config.policy(agent)
        if initiated[agent] and not record.truncated:
            bound = pol.t_theta0 if declared is Hypothesis.THETA1 else pol.t_theta1
            if err > bound + _ERR_TOL:
                fail(
                    f"initiator {agent.name} error {err!r} exceeds its firing "
                    f"threshold {bound!r}"
                )
        elif err > 0.5 + _ERR_TOL:
            fail(f"non-initiator {agent.name} error {err!r} exceeds 0.5")

    if _fast_path_eligible(config) and not record.truncated:
        solos = [t for t in (record.tau_solo_a, record.tau_solo_b) if t is not None]
        if not solos:
            fail("non-truncated trial with neither solo chain crossed")
        if record.tau != min(solos):
            fail(
                f"stop iteration {record.tau} != min of solo crossing times "
                f"{record.tau_solo_a}, {record.tau_solo_b}"
            )
        if record.initiator is None:
            fail("non-truncated unit-weight trial without an initiator")
