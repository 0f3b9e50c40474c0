"""Monte Carlo harness: seeded batches, summaries, and text exports.

Batches are deterministic in (config.seed, n_trials): every trial derives
its own RNG substreams from (seed, trial_index), so execution order and
worker count cannot change any record.  Aggregation uses exact summation,
making the summary literally identical however the records were produced.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Iterable, Sequence

from seqduel.beliefs import Hypothesis, kl_divergence
from seqduel.engine import (
    AgentId,
    ExperimentConfig,
    Initiator,
    TrialRecord,
    check_trial_invariants,
    run_trial,
)
from seqduel.presets import (
    KL_TOLERANCE,
    REFERENCE_KL_A,
    REFERENCE_KL_B,
    REFERENCE_TAU,
    TAU_BAND_RELATIVE,
)

__all__ = [
    "BatchSummary",
    "KLReport",
    "BandMiss",
    "run_batch",
    "summarize",
    "export_trajectories",
    "kl_report",
    "check_reference_bands",
    "check_reference_kl",
    "format_number",
    "summary_text",
    "write_summary",
]

TRAJECTORY_HEADER = "trial,iteration,agent,belief_theta1,min_component,signal_theta1,decision"


class BandMiss(AssertionError):
    """A batch statistic fell outside its reference acceptance band."""


@dataclass(frozen=True)
class BatchSummary:
    """Aggregate view of one batch.

    Solo averages run over the trials whose chain actually crossed; the
    uncrossed counts say how many did not.  Win counts attribute each
    trial to the agent whose own test fired first (both, when they fired
    together; detected_only for stops triggered purely through the
    counterpart's signal, which unit-weight configurations never produce).
    initiator_error_rate is the fraction of initiated trials in which an
    initiating agent declared the wrong state; noninitiator_error_rate is
    the matching fraction for the other agent over single-initiator
    trials.  tau averages are reported inclusive of simultaneous-crossing
    trials and, separately, excluding them, plus conditioned on each true
    state.
    """

    n_trials: int
    beta: float
    tau_avg: float
    tau_solo_a_avg: float
    tau_solo_b_avg: float
    solo_a_uncrossed: int
    solo_b_uncrossed: int
    win_count_a: int
    win_count_b: int
    win_count_both: int
    detected_only_count: int
    truncated_count: int
    initiator_error_rate: float
    noninitiator_error_rate: float
    tau_avg_excl_ties: float
    tau_avg_theta0: float
    tau_avg_theta1: float


def _mean(values: list[float]) -> float:
    return math.fsum(values) / len(values) if values else 0.0


def summarize(records: Sequence[TrialRecord], beta: float) -> BatchSummary:
    if not records:
        raise ValueError("cannot summarize an empty batch")
    taus = [float(r.tau) for r in records]
    solo_a = [float(r.tau_solo_a) for r in records if r.tau_solo_a is not None]
    solo_b = [float(r.tau_solo_b) for r in records if r.tau_solo_b is not None]
    win_a = sum(1 for r in records if r.initiator is Initiator.A)
    win_b = sum(1 for r in records if r.initiator is Initiator.B)
    win_both = sum(1 for r in records if r.initiator is Initiator.BOTH)
    truncated = sum(1 for r in records if r.truncated)
    detected_only = sum(1 for r in records if r.initiator is None and not r.truncated)

    initiated_trials = 0
    initiator_wrong = 0
    noninit_trials = 0
    noninit_wrong = 0
    for r in records:
        if r.truncated or r.initiator is None:
            continue
        initiated_trials += 1
        wrong = False
        if r.initiator in (Initiator.A, Initiator.BOTH) and not r.correct_a:
            wrong = True
        if r.initiator in (Initiator.B, Initiator.BOTH) and not r.correct_b:
            wrong = True
        if wrong:
            initiator_wrong += 1
        if r.initiator is Initiator.A:
            noninit_trials += 1
            noninit_wrong += 0 if r.correct_b else 1
        elif r.initiator is Initiator.B:
            noninit_trials += 1
            noninit_wrong += 0 if r.correct_a else 1

    return BatchSummary(
        n_trials=len(records),
        beta=beta,
        tau_avg=_mean(taus),
        tau_solo_a_avg=_mean(solo_a),
        tau_solo_b_avg=_mean(solo_b),
        solo_a_uncrossed=len(records) - len(solo_a),
        solo_b_uncrossed=len(records) - len(solo_b),
        win_count_a=win_a,
        win_count_b=win_b,
        win_count_both=win_both,
        detected_only_count=detected_only,
        truncated_count=truncated,
        initiator_error_rate=initiator_wrong / initiated_trials if initiated_trials else 0.0,
        noninitiator_error_rate=noninit_wrong / noninit_trials if noninit_trials else 0.0,
        tau_avg_excl_ties=_mean(
            [float(r.tau) for r in records if r.initiator in (Initiator.A, Initiator.B)]
        ),
        tau_avg_theta0=_mean([float(r.tau) for r in records if r.true_state is Hypothesis.THETA0]),
        tau_avg_theta1=_mean([float(r.tau) for r in records if r.true_state is Hypothesis.THETA1]),
    )


def _trial_chunk(args) -> list[TrialRecord]:
    config, start, stop, record_traj, check = args
    out = []
    for i in range(start, stop):
        rec = run_trial(config, trial_index=i, record_trajectory=record_traj)
        if check:
            check_trial_invariants(rec, config)
        out.append(rec)
    return out


def run_batch(
    config: ExperimentConfig,
    n_trials: int,
    *,
    jobs: int = 1,
    record_trajectories: bool = False,
    check_invariants: bool = True,
) -> tuple[BatchSummary, list[TrialRecord]]:
    """Run n_trials seeded trials and aggregate them.

    jobs > 1 distributes contiguous index ranges over worker processes;
    results are identical to the serial run because every trial is fully
    determined by (config, trial_index).
    """
    if n_trials < 1:
        raise ValueError(f"n_trials must be >= 1, got {n_trials}")
    if jobs < 1:
        raise ValueError(f"jobs must be >= 1, got {jobs}")

    if jobs == 1:
        records = _trial_chunk((config, 0, n_trials, record_trajectories, check_invariants))
    else:
        step = max(1, -(-n_trials // (jobs * 4)))
        chunks = [
            (config, lo, min(lo + step, n_trials), record_trajectories, check_invariants)
            for lo in range(0, n_trials, step)
        ]
        records = []
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for part in pool.map(_trial_chunk, chunks):
                records.extend(part)

    return summarize(records, config.policy_a.beta), records


def format_number(x: float) -> str:
    """Fixed 6-significant-digit rendering used by all text outputs."""
    return format(float(x), ".6g")


def export_trajectories(
    records: Sequence[TrialRecord],
    selection: Iterable[int],
    path: str | Path,
) -> int:
    """Write per-iteration belief curves for the selected trial indices.

    One row per (trial, iteration, agent): the agent's local belief in
    theta1, its minimum component (the would-be decision's conditional
    error), the transmitted signal's theta1 component, and the decision
    label.  Returns the number of data rows written.
    """
    by_index = {r.trial_index: r for r in records}
    rows = []
    for sel in selection:
        rec = by_index.get(sel)
        if rec is None:
            raise ValueError(f"trial index {sel} is not in the supplied records")
        if rec.trajectory is None:
            raise ValueError(
                f"trial index {sel} was run without trajectory recording"
            )
        for step in rec.trajectory:
            for agent, belief, sig, dec in (
                ("a", step.belief_a, step.signal_a, step.decision_a),
                ("b", step.belief_b, step.signal_b, step.decision_b),
            ):
                rows.append(
                    (
                        sel,
                        step.iteration,
                        agent,
                        format_number(belief.p_theta1),
                        format_number(belief.min_component),
                        format_number(sig.p_theta1),
                        dec.value,
                    )
                )
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TRAJECTORY_HEADER.split(","))
        writer.writerows(rows)
    return len(rows)


@dataclass(frozen=True)
class KLReport:
    """Both directed divergences per channel, plus the speed prediction
    (larger divergence discriminates faster)."""

    kl_theta0_theta1_a: float
    kl_theta1_theta0_a: float
    kl_theta0_theta1_b: float
    kl_theta1_theta0_b: float
    predicted_faster: AgentId | None

    def lines(self) -> list[str]:
        faster = self.predicted_faster.name if self.predicted_faster else "none"
        return [
            f"agent a: D(theta0||theta1) = {format_number(self.kl_theta0_theta1_a)}"
            f", D(theta1||theta0) = {format_number(self.kl_theta1_theta0_a)}",
            f"agent b: D(theta0||theta1) = {format_number(self.kl_theta0_theta1_b)}"
            f", D(theta1||theta0) = {format_number(self.kl_theta1_theta0_b)}",
            f"predicted faster agent: {faster}",
        ]


def kl_report(config: ExperimentConfig) -> KLReport:
    a01 = kl_divergence(config.model_a.pmf_theta0, config.model_a.pmf_theta1)
    a10 = kl_divergence(config.model_a.pmf_theta1, config.model_a.pmf_theta0)
    b01 = kl_divergence(config.model_b.pmf_theta0, config.model_b.pmf_theta1)
    b10 = kl_divergence(config.model_b.pmf_theta1, config.model_b.pmf_theta0)
    if b01 > a01:
        faster: AgentId | None = AgentId.B
    elif a01 > b01:
        faster = AgentId.A
    else:
        faster = None
    return KLReport(a01, a10, b01, b10, faster)


def summary_text(summary: BatchSummary) -> str:
    """Render a summary as stable `key = value` lines, one per field."""
    out = []
    for f in fields(summary):
        v = getattr(summary, f.name)
        if isinstance(v, bool) or isinstance(v, int):
            out.append(f"{f.name} = {v}")
        else:
            out.append(f"{f.name} = {format_number(v)}")
    return "\n".join(out) + "\n"


def write_summary(summary: BatchSummary, path: str | Path) -> None:
    Path(path).write_text(summary_text(summary))


def check_reference_bands(summary: BatchSummary, beta: float) -> list[str]:
    """Compare a benchmark batch against the reference stopping times.

    Returns one report line per statistic; raises BandMiss if any falls
    outside the relative band.
    """
    if beta not in REFERENCE_TAU:
        raise ValueError(
            f"no reference statistics for beta={beta!r}; have {sorted(REFERENCE_TAU)}"
        )
    ref = REFERENCE_TAU[beta]
    checks = [
        ("tau_avg", summary.tau_avg, ref.tau_avg),
        ("tau_solo_a_avg", summary.tau_solo_a_avg, ref.tau_solo_a_avg),
        ("tau_solo_b_avg", summary.tau_solo_b_avg, ref.tau_solo_b_avg),
    ]
    lines = []
    misses = []
    for name, got, expected in checks:
        lo = expected * (1.0 - TAU_BAND_RELATIVE)
        hi = expected * (1.0 + TAU_BAND_RELATIVE)
        ok = lo <= got <= hi
        lines.append(
            f"{name}: {format_number(got)} vs reference {format_number(expected)} "
            f"(band {format_number(lo)}..{format_number(hi)}) "
            f"{'ok' if ok else 'MISS'}"
        )
        if not ok:
            misses.append(lines[-1])
    if misses:
        raise BandMiss("; ".join(misses))
    return lines


def check_reference_kl(config: ExperimentConfig) -> list[str]:
    """Compare the configured channels' divergences against the reference
    values; raises BandMiss outside the absolute tolerance."""
    rep = kl_report(config)
    lines = []
    misses = []
    for name, got, expected in (
        ("kl_a", rep.kl_theta0_theta1_a, REFERENCE_KL_A),
        ("kl_b", rep.kl_theta0_theta1_b, REFERENCE_KL_B),
    ):
        ok = abs(got - expected) <= KL_TOLERANCE
        lines.append(
            f"{name}: {format_number(got)} vs reference {format_number(expected)} "
            f"(tolerance {format_number(KL_TOLERANCE)}) {'ok' if ok else 'MISS'}"
        )
        if not ok:
            misses.append(lines[-1])
    if misses:
        raise BandMiss("; ".join(misses))
    return lines
