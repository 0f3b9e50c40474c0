"""Brute-force checks of the protocol's optimality and coupling claims.

Four claims are audited, each independently of the engine's fast paths:

 * coin-flip signaling (alpha = 0.5) maximizes how well a transmitted
   belief hides which hypothesis the sender favors, verified by grid
   search over the receiver-side mixture objective;
 * full self-weight fusion (w = 1) minimizes the fused test's stopping
   time among weights that still meet the error constraint, verified by
   Monte Carlo sweep with the counterpart running coin-flip signaling;
 * the coupled stop: both agents halt together at the smaller solo
   crossing time, the initiator's conditional error is bounded by its
   firing threshold and the other agent's by one half, audited record
   by record;
 * the posterior is a martingale under the predictive distribution, and
   its minimum component reaches any fixed threshold in finite time on
   essentially every sampled path.

The alpha grid is evaluated with integer weights, (k*x + (N-k)*y)/N, so
the objective's symmetry g(alpha) = g(1-alpha) holds bit for bit rather
than within a tolerance.

The w sweep deliberately simulates only the test agent's own stopping
clock (its fused threshold test plus detection of the counterpart's
crossing).  Running the full engine instead would let the counterpart
detect the test agent's local crossing and halt the trial at the same
iteration for every w, hiding exactly the effect the sweep measures.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from seqduel.beliefs import Belief, Hypothesis, ObservationModel, bayes_update
from seqduel.engine import (
    AgentId,
    ExperimentConfig,
    InvariantViolation,
    TrialRecord,
    _SymbolStream,
    _crossed,
    _draw_true_state,
    derive_streams,
    run_trial,
)
from seqduel.policies import AgentPolicy

__all__ = [
    "SweepResult",
    "ErrorBoundsReport",
    "MartingaleReport",
    "SuiteResult",
    "oracle_alpha_sweep",
    "oracle_w_sweep",
    "oracle_error_bounds",
    "oracle_martingale",
    "w_sweep_point_seed",
    "suite_signaling_optimality",
    "suite_fusion_optimality",
    "suite_coupled_stopping",
    "suite_posterior_martingale",
    "run_all_suites",
]


@dataclass(frozen=True)
class SweepResult:
    """Grid sweep outcome.

    argmax_or_argmin is the argmax for the signaling objective and the
    argmin for the stopping-time sweep.  monotonicity_flags holds one
    slope sign per grid segment.  constant marks a flat objective (every
    point optimal);
    conclusive is cleared when Monte Carlo noise is too large to separate
    the best point from its competitors.  stderr_values / error_rates are
    only populated by the Monte Carlo w sweep.
    """

    parameter_grid: tuple[float, ...]
    objective_values: tuple[float, ...]
    argmax_or_argmin: float
    monotonicity_flags: tuple[int, ...]
    single_peaked: bool
    constant: bool = False
    conclusive: bool = True
    stderr_values: tuple[float, ...] | None = None
    error_rates: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        if len(self.objective_values) != len(self.parameter_grid):
            raise ValueError("objective list must match the grid in length")
        if any(b <= a for a, b in zip(self.parameter_grid, self.parameter_grid[1:])):
            raise ValueError("parameter grid must be strictly increasing")


def _slope_signs(values: tuple[float, ...]) -> tuple[int, ...]:
    flags = []
    for a, b in zip(values, values[1:]):
        flags.append(0 if b == a else (1 if b > a else -1))
    return tuple(flags)


def _single_peaked(flags: tuple[int, ...], sense: str) -> bool:
    # "max": never rises again after falling; "min": mirrored.
    descent_seen = False
    bad, turn = (1, -1) if sense == "max" else (-1, 1)
    for f in flags:
        if f == turn:
            descent_seen = True
        elif f == bad and descent_seen:
            return False
    return True


def oracle_alpha_sweep(belief: Belief, grid_step: float = 0.01) -> SweepResult:
    """Exhaustive grid evaluation of the signal-hiding objective
    g(alpha) = min component of the receiver-side mixture.

    The grid is k/N with N = 1/grid_step; grid_step must divide 1 evenly.
    Each point is evaluated with integer weights so that g(k/N) and
    g((N-k)/N) are computed from the same products in commuted order,
    making the symmetry exact.  A belief of (0.5, 0.5) yields a constant
    objective, flagged rather than treated as a peak.
    """
    n_inv = 1.0 / grid_step
    n = round(n_inv)
    if n < 1 or abs(n_inv - n) > 1e-9:
        raise ValueError(f"grid_step must divide 1 evenly, got {grid_step!r}")
    p0, p1 = belief.p_theta0, belief.p_theta1
    grid = []
    values = []
    for k in range(n + 1):
        grid.append(k / n)
        m0 = (k * p0 + (n - k) * p1) / n
        m1 = (k * p1 + (n - k) * p0) / n
        values.append(min(m0, m1))
    grid_t = tuple(grid)
    values_t = tuple(values)
    constant = all(v == values_t[0] for v in values_t)
    if constant:
        argmax_or_argmin = 0.5
    else:
        argmax_or_argmin = grid_t[max(range(len(values_t)), key=values_t.__getitem__)]
    flags = _slope_signs(values_t)
    return SweepResult(
        parameter_grid=grid_t,
        objective_values=values_t,
        argmax_or_argmin=argmax_or_argmin,
        monotonicity_flags=flags,
        single_peaked=_single_peaked(flags, "max"),
        constant=constant,
    )


def w_sweep_point_seed(seed: int, point_index: int) -> int:
    """Deterministic per-point master seed for the w sweep, so each grid
    point runs an independent yet reproducible trial set."""
    ss = np.random.SeedSequence(seed, spawn_key=(point_index,))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _pair_from_lr(lr: float) -> tuple[float, float]:
    if lr == math.inf:
        return (0.0, 1.0)
    if lr == -math.inf:
        return (1.0, 0.0)
    t = math.exp(-abs(lr))
    small = t / (1.0 + t)
    big = 1.0 - small
    return (small, big) if lr >= 0.0 else (big, small)


def _w_point_run(
    config: ExperimentConfig,
    w: float,
    point_seed: int,
    trials: int,
    test_agent: AgentId,
) -> tuple[list[int], int, int]:
    """Simulate the test agent's own stopping clock at fusion weight w.

    Per trial the test agent fuses the counterpart's realized signal at
    weight w, applies its threshold test to the fused pair, and also
    stops on detecting the counterpart's crossing.  Returns the stopping
    times, the number of trials stopped by the agent's own threshold
    test, and how many of those declared the wrong state.
    """
    own_is_a = test_agent is AgentId.A
    model_own = config.model_a if own_is_a else config.model_b
    model_cp = config.model_b if own_is_a else config.model_a
    pol_own = config.policy_a if own_is_a else config.policy_b
    pol_cp = config.policy_b if own_is_a else config.policy_a
    beta = pol_own.beta
    t0, t1 = pol_own.t_theta0, pol_own.t_theta1
    alpha_cp = pol_cp.alpha
    lr0 = config.prior.as_belief().log_ratio
    llr_own = model_own.symbol_log_ratios
    llr_cp = model_cp.symbol_log_ratios

    taus: list[int] = []
    fired = 0
    fired_wrong = 0
    for t_idx in range(trials):
        state_rng, obs_a, obs_b, coin_a, coin_b = derive_streams(point_seed, t_idx)
        true_state = _draw_true_state(config, state_rng)
        obs_own, obs_cp = (obs_a, obs_b) if own_is_a else (obs_b, obs_a)
        coin_cp = coin_b if own_is_a else coin_a
        stream_own = _SymbolStream(obs_own, model_own, true_state)
        stream_cp = _SymbolStream(obs_cp, model_cp, true_state)
        lr_own = lr0
        lr_cp = lr0
        declared: Hypothesis | None = None
        own_fired = False
        tau = config.max_iterations
        coins: list[float] = []
        for n in range(1, config.max_iterations + 1):
            lr_own = lr_own + float(llr_own[stream_own.next_symbol()])
            lr_cp = lr_cp + float(llr_cp[stream_cp.next_symbol()])
            if not coins:
                coins = coin_cp.random(64).tolist()
            truthful = coins.pop(0) < alpha_cp
            cp_pair = _pair_from_lr(lr_cp)
            recv = cp_pair if truthful else (cp_pair[1], cp_pair[0])
            if w == 1.0:
                fused = _pair_from_lr(lr_own)
            elif w == 0.0:
                fused = recv
            else:
                own_pair = _pair_from_lr(lr_own)
                fused = (
                    w * own_pair[0] + (1.0 - w) * recv[0],
                    w * own_pair[1] + (1.0 - w) * recv[1],
                )
            fire1 = fused[0] <= t0
            fire0 = fused[1] <= t1
            if fire1 or fire0:
                if fire1 and fire0:
                    declared = (
                        Hypothesis.THETA1 if fused[0] <= fused[1] else Hypothesis.THETA0
                    )
                else:
                    declared = Hypothesis.THETA1 if fire1 else Hypothesis.THETA0
                own_fired = True
                tau = n
                break
            if min(recv) <= beta:
                declared = (
                    Hypothesis.THETA1 if fused[1] >= fused[0] else Hypothesis.THETA0
                )
                tau = n
                break
        if declared is None:  # truncated: forced argmax on the last fused pair
            declared = Hypothesis.THETA1 if fused[1] >= fused[0] else Hypothesis.THETA0
        taus.append(tau)
        if own_fired:
            fired += 1
            if declared is not true_state:
                fired_wrong += 1
    return taus, fired, fired_wrong


def oracle_w_sweep(
    config: ExperimentConfig,
    w_grid: list[float] | tuple[float, ...],
    trials: int,
    seed: int,
    test_agent: AgentId = AgentId.B,
) -> SweepResult:
    """Monte Carlo sweep of the fusion weight for one agent.

    The counterpart must run coin-flip signaling (alpha = 0.5).  Each grid
    point runs its own reproducible trial set.  error_rates holds, per
    point, the wrong-declaration rate among trials the agent stopped by
    its own threshold test; stops forced by detecting the counterpart are
    excluded because the weight does not govern them (their error is only
    bounded by one half).  Points whose rate stays within a 3-sigma band
    of beta qualify for the stopping-time comparison; argmax_or_argmin is
    the qualifying point with the smallest mean stopping time.  If some
    qualifying point beats w = 1 by more than three combined standard
    errors the sweep raises; if w = 1 wins by less than that margin the
    result is flagged inconclusive.
    """
    grid = tuple(float(w) for w in w_grid)
    if any(not 0.0 <= w <= 1.0 for w in grid):
        raise ValueError("w grid entries must lie in [0, 1]")
    pol_cp = config.policy_b if test_agent is AgentId.A else config.policy_a
    if pol_cp.alpha != 0.5:
        raise ValueError(
            f"counterpart must signal with alpha = 0.5, got {pol_cp.alpha!r}"
        )
    if trials < 2:
        raise ValueError("trials must be at least 2")

    beta = (config.policy_a if test_agent is AgentId.A else config.policy_b).beta
    means = []
    stderrs = []
    err_rates = []
    fired_counts = []
    for i, w in enumerate(grid):
        taus, fired, fired_wrong = _w_point_run(
            config, w, w_sweep_point_seed(seed, i), trials, test_agent
        )
        mean = math.fsum(taus) / trials
        var = math.fsum((t - mean) ** 2 for t in taus) / (trials - 1)
        means.append(mean)
        stderrs.append(math.sqrt(var / trials))
        err_rates.append(fired_wrong / fired if fired else math.nan)
        fired_counts.append(fired)

    def _qualifies(i: int) -> bool:
        if not fired_counts[i]:
            return False
        band = beta + 3.0 * math.sqrt(beta * (1.0 - beta) / fired_counts[i])
        return err_rates[i] <= band

    qualifying = [i for i in range(len(grid)) if _qualifies(i)]
    if not qualifying:
        raise ValueError(
            f"no grid point meets the error constraint "
            f"(firing error rate within 3 sigma of beta={beta}); "
            f"rates: {err_rates!r}"
        )
    best_i = min(qualifying, key=lambda i: means[i])
    conclusive = True
    if 1.0 in grid and grid.index(1.0) in qualifying:
        i_one = grid.index(1.0)
        for i in qualifying:
            if i == i_one:
                continue
            sep = means[i] - means[i_one]
            comb = math.hypot(stderrs[i], stderrs[i_one])
            if sep < -3.0 * comb:
                raise InvariantViolation(
                    f"fusion weight {grid[i]} beats w = 1 by {-sep:.4g} "
                    f"(3 SE = {3 * comb:.4g}) at point seed "
                    f"{w_sweep_point_seed(seed, i)}"
                )
            if sep < 3.0 * comb:
                conclusive = False

    flags = _slope_signs(tuple(means))
    return SweepResult(
        parameter_grid=grid,
        objective_values=tuple(means),
        argmax_or_argmin=grid[best_i],
        monotonicity_flags=flags,
        single_peaked=_single_peaked(flags, "min"),
        conclusive=conclusive,
        stderr_values=tuple(stderrs),
        error_rates=tuple(err_rates),
    )


def _quantiles(values: list[float]) -> tuple[float, float, float, float, float]:
    s = sorted(values)
    if not s:
        return (0.0, 0.0, 0.0, 0.0, 0.0)

    def q(frac: float) -> float:
        return s[min(len(s) - 1, int(frac * len(s)))]

    return (s[0], q(0.25), q(0.5), q(0.75), s[-1])


@dataclass(frozen=True)
class ErrorBoundsReport:
    n_records: int
    n_initiator_checks: int
    n_noninitiator_checks: int
    initiator_error_quantiles: tuple[float, float, float, float, float]
    noninitiator_error_quantiles: tuple[float, float, float, float, float]


_BOUND_TOL = 1e-12


def oracle_error_bounds(records: list[TrialRecord], beta: float) -> ErrorBoundsReport:
    """Audit the per-trial error bounds: every initiating agent's
    conditional error is at most beta, every other agent's at most 0.5.
    Truncated records are rejected; any violation raises with the trial's
    seed."""
    from seqduel.engine import Initiator

    init_errors: list[float] = []
    nonin_errors: list[float] = []
    for rec in records:
        if rec.truncated:
            raise ValueError(
                f"truncated record cannot be audited "
                f"(trial_index={rec.trial_index}, seed={rec.seed})"
            )
        for agent, err in (
            (Initiator.A, rec.conditional_error_a),
            (Initiator.B, rec.conditional_error_b),
        ):
            initiated = rec.initiator is agent or rec.initiator is Initiator.BOTH
            if initiated:
                if err > beta + _BOUND_TOL:
                    raise InvariantViolation(
                        f"initiator error {err!r} exceeds beta={beta!r} "
                        f"(trial_index={rec.trial_index}, seed={rec.seed})"
                    )
                init_errors.append(err)
            else:
                if err > 0.5 + _BOUND_TOL:
                    raise InvariantViolation(
                        f"non-initiator error {err!r} exceeds 0.5 "
                        f"(trial_index={rec.trial_index}, seed={rec.seed})"
                    )
                nonin_errors.append(err)
    return ErrorBoundsReport(
        n_records=len(records),
        n_initiator_checks=len(init_errors),
        n_noninitiator_checks=len(nonin_errors),
        initiator_error_quantiles=_quantiles(init_errors),
        noninitiator_error_quantiles=_quantiles(nonin_errors),
    )


@dataclass(frozen=True)
class MartingaleReport:
    n_beliefs: int
    max_deviation: float
    crossing_paths: int
    crossing_horizon: int
    crossing_fractions: tuple[tuple[float, float], ...]


def oracle_martingale(
    model: ObservationModel,
    belief_grid: list[Belief],
    *,
    tolerance: float = 1e-10,
    crossing_paths: int = 0,
    crossing_betas: tuple[float, ...] = (0.1, 0.05, 0.01),
    crossing_horizon: int = 10_000,
    seed: int = 0,
    prior_p_theta1: float = 0.5,
) -> MartingaleReport:
    """Exact one-step martingale check plus optional crossing simulation.

    For every grid belief the conditional expectation of the posterior,
    summed exhaustively over the alphabet under the belief's predictive
    distribution, must equal the belief within tolerance (hard failure
    otherwise).  With crossing_paths > 0, that many state-resampled
    observation chains are run to the horizon and the fraction whose
    posterior min-component reaches each beta is reported; a fraction
    below 99.9% raises.
    """
    max_dev = 0.0
    for belief in belief_grid:
        e0 = 0.0
        e1 = 0.0
        for s in range(model.alphabet_size):
            marginal = (
                belief.p_theta0 * model.pmf_theta0[s]
                + belief.p_theta1 * model.pmf_theta1[s]
            )
            if marginal == 0.0:
                continue
            post = bayes_update(belief, model, s)
            e0 += marginal * post.p_theta0
            e1 += marginal * post.p_theta1
        dev = max(abs(e0 - belief.p_theta0), abs(e1 - belief.p_theta1))
        max_dev = max(max_dev, dev)
        if dev > tolerance:
            raise InvariantViolation(
                f"one-step expectation deviates by {dev!r} (> {tolerance!r}) "
                f"at belief {belief!r}"
            )

    fractions: list[tuple[float, float]] = []
    if crossing_paths > 0:
        betas = sorted(crossing_betas, reverse=True)
        crossed = {b: 0 for b in betas}
        lr0 = Belief.from_p_theta1(prior_p_theta1).log_ratio
        for j in range(crossing_paths):
            ss_state, ss_obs = np.random.SeedSequence(seed, spawn_key=(j,)).spawn(2)
            state_rng = np.random.default_rng(ss_state)
            state = (
                Hypothesis.THETA1
                if state_rng.random() < prior_p_theta1
                else Hypothesis.THETA0
            )
            stream = _SymbolStream(np.random.default_rng(ss_obs), model, state)
            lr = lr0
            pending = list(betas)
            n = 0
            while pending and n < crossing_horizon:
                lr = lr + float(model.symbol_log_ratios[stream.next_symbol()])
                n += 1
                while pending and _crossed(lr, pending[0]):
                    crossed[pending.pop(0)] += 1
        for b in betas:
            frac = crossed[b] / crossing_paths
            fractions.append((b, frac))
            if frac < 0.999:
                raise InvariantViolation(
                    f"min-component crossed beta={b} on only {frac:.4%} of "
                    f"{crossing_paths} paths within {crossing_horizon} iterations"
                )

    return MartingaleReport(
        n_beliefs=len(belief_grid),
        max_deviation=max_dev,
        crossing_paths=crossing_paths,
        crossing_horizon=crossing_horizon,
        crossing_fractions=tuple(fractions),
    )


# --- verification suites ----------------------------------------------------


@dataclass
class SuiteResult:
    name: str
    passed: bool
    lines: list[str]


_SUITE_SEED = 20_101


def suite_signaling_optimality(
    quick: bool = False, expected_argmax: float = 0.5
) -> SuiteResult:
    """Grid audit: coin-flip signaling maximizes the hiding objective for
    every non-degenerate belief, with exact symmetry and a single peak.

    expected_argmax exists as a negative-control hook for tests; the
    genuine claim is 0.5.
    """
    ks = [1, 10, 25, 49, 60, 75, 90, 99] if quick else [k for k in range(1, 100) if k != 50]
    lines = []
    passed = True
    worst = None
    for k in ks:
        belief = Belief.from_p_theta1(k / 100.0)
        res = oracle_alpha_sweep(belief, 0.01)
        g = res.objective_values
        symmetric = all(g[i] == g[len(g) - 1 - i] for i in range(len(g)))
        ok = res.argmax_or_argmin == expected_argmax and symmetric and res.single_peaked
        if not ok:
            passed = False
            worst = (k, res.argmax_or_argmin, symmetric, res.single_peaked)
    lines.append(f"beliefs checked: {len(ks)} (alpha grid: 101 points)")
    if worst:
        k, arg, sym, peak = worst
        lines.append(
            f"failure at belief p={k / 100.0}: argmax={arg} "
            f"(expected {expected_argmax}), symmetric={sym}, single_peaked={peak}"
        )
    else:
        lines.append(f"argmax = {expected_argmax} at every belief; symmetry exact")
    uninformative = oracle_alpha_sweep(Belief.from_p_theta1(0.5), 0.01)
    if not uninformative.constant:
        passed = False
        lines.append("uninformative belief unexpectedly produced a non-flat objective")
    return SuiteResult("signaling-optimality", passed, lines)


def suite_fusion_optimality(
    quick: bool = False,
    trials: int | None = None,
    seed: int = _SUITE_SEED,
    config: ExperimentConfig | None = None,
) -> SuiteResult:
    """Monte Carlo audit: fusing at w = 1 minimizes the test agent's mean
    stopping time among error-qualifying weights, and the w = 1 point
    replays the engine's own trials exactly."""
    from seqduel.presets import benchmark_config

    if config is None:
        config = benchmark_config(beta=0.05)
    if trials is None:
        trials = 500 if quick else 10_000
    grid = (0.0, 0.25, 0.5, 0.75, 1.0)
    lines = []
    try:
        res = oracle_w_sweep(config, grid, trials, seed)
    except InvariantViolation as exc:
        return SuiteResult("fusion-optimality", False, [f"violation: {exc}"])

    for w, m, se, er in zip(
        res.parameter_grid, res.objective_values, res.stderr_values, res.error_rates
    ):
        lines.append(
            f"w={w}: mean stopping time {m:.4f} (se {se:.4f}), "
            f"firing error rate {er:.4f}"
        )

    # structural: the w = 1 point is the engine on the same seeds
    i_one = res.parameter_grid.index(1.0)
    point_seed = w_sweep_point_seed(seed, i_one)
    engine_taus = [
        run_trial(config, seed=point_seed, trial_index=t).tau for t in range(trials)
    ]
    engine_mean = math.fsum(float(t) for t in engine_taus) / trials
    replay_ok = engine_mean == res.objective_values[i_one]
    lines.append(
        f"w=1 replays engine trials: {'yes' if replay_ok else 'NO'} "
        f"(engine mean {engine_mean:.6f})"
    )

    passed = replay_ok and res.argmax_or_argmin == 1.0
    if quick:
        lines.append("quick mode: statistical separation not asserted")
    else:
        if not res.conclusive:
            lines.append("statistical separation inconclusive at this trial count")
            passed = False
        else:
            i_75 = res.parameter_grid.index(0.75)
            sep = res.objective_values[i_75] - res.objective_values[i_one]
            comb = math.hypot(res.stderr_values[i_75], res.stderr_values[i_one])
            lines.append(f"w=1 beats w=0.75 by {sep:.4f} ({sep / comb:.1f} SE)")
            passed = passed and sep >= 3.0 * comb
    return SuiteResult("fusion-optimality", passed, lines)


def suite_coupled_stopping(
    quick: bool = False,
    trials: int | None = None,
    seed: int = _SUITE_SEED,
) -> SuiteResult:
    """Per-record audit over seeded batches at two confidence levels: the
    stop happens at the smaller solo crossing time and both error bounds
    hold on every single trial."""
    from seqduel.experiments import run_batch
    from seqduel.presets import benchmark_config

    if trials is None:
        trials = 1_000 if quick else 10_000
    lines = []
    passed = True
    for beta in (0.05, 0.01):
        config = benchmark_config(beta=beta, seed=seed)
        summary, records = run_batch(config, trials)
        violations = 0
        for rec in records:
            solos = [t for t in (rec.tau_solo_a, rec.tau_solo_b) if t is not None]
            if rec.truncated or not solos or rec.tau != min(solos):
                violations += 1
        try:
            oracle_error_bounds(records, beta)
        except (InvariantViolation, ValueError) as exc:
            passed = False
            lines.append(f"beta={beta}: error-bound violation: {exc}")
            continue
        if violations:
            passed = False
        lines.append(
            f"beta={beta}: {trials} trials, stop-time violations: {violations}, "
            f"error bounds: all within (initiator <= {beta}, other <= 0.5), "
            f"truncated: {summary.truncated_count}"
        )
    return SuiteResult("coupled-stopping", passed, lines)


def suite_posterior_martingale(
    quick: bool = False,
    seed: int = _SUITE_SEED,
) -> SuiteResult:
    """Exact martingale sums on a belief grid for both benchmark channels,
    plus threshold-crossing certainty over simulated paths."""
    from seqduel.presets import benchmark_models

    model_a, model_b = benchmark_models()
    grid = [Belief.from_p_theta1(k / 51.0) for k in range(1, 51)]
    grid += [Belief.from_p_theta1(0.0), Belief.from_p_theta1(1.0)]
    paths = 1_000 if quick else 10_000
    lines = []
    passed = True
    for name, model in (("a", model_a), ("b", model_b)):
        try:
            rep = oracle_martingale(
                model,
                grid,
                crossing_paths=paths,
                seed=seed,
            )
        except InvariantViolation as exc:
            passed = False
            lines.append(f"channel {name}: violation: {exc}")
            continue
        fracs = ", ".join(f"beta={b}: {f:.2%}" for b, f in rep.crossing_fractions)
        lines.append(
            f"channel {name}: max one-step deviation {rep.max_deviation:.3e} "
            f"over {rep.n_beliefs} beliefs; crossing fractions ({paths} paths): {fracs}"
        )
    return SuiteResult("posterior-martingale", passed, lines)


def run_all_suites(quick: bool = False, expected_argmax: float = 0.5) -> list[SuiteResult]:
    return [
        suite_signaling_optimality(quick, expected_argmax=expected_argmax),
        suite_fusion_optimality(quick),
        suite_coupled_stopping(quick),
        suite_posterior_martingale(quick),
    ]
