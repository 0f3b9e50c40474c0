"""Command-line interface.

Subcommands: `run` (a configured batch), `sweep` (alpha or w grid via the
oracles), `verify` (the four verification suites), and `reproduce-paper`
(the benchmark study at beta 0.05 and 0.01 with reference-band checks).

Configuration files are TOML with a fixed schema; unknown keys are
rejected and every validation error names the offending key.  Seed
precedence: --seed, then the SEQDUEL_SEED environment variable, then the
config file, then 0.  Exit codes: 0 success, 2 configuration error,
3 invariant violation, 4 reference-band miss.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from seqduel.beliefs import Belief, Hypothesis, ObservationModel, Prior
from seqduel.engine import (
    ExperimentConfig,
    InvariantViolation,
    run_trial,
)
from seqduel.experiments import (
    BandMiss,
    check_reference_bands,
    check_reference_kl,
    export_trajectories,
    format_number,
    kl_report,
    run_batch,
    summarize,
    summary_text,
    write_summary,
)
from seqduel.oracles import oracle_alpha_sweep, oracle_w_sweep, run_all_suites
from seqduel.policies import AgentPolicy
from seqduel.presets import REFERENCE_TAU, benchmark_config

__all__ = ["ConfigError", "main", "load_config_file"]


class ConfigError(Exception):
    """Invalid configuration file or flag combination (exit code 2)."""


_TOP_KEYS = {
    "prior_theta1",
    "agents",
    "beta",
    "costs",
    "true_state",
    "max_iterations",
    "trials",
    "seed",
}
_AGENT_KEYS = {"alphabet", "pmf_theta0", "pmf_theta1", "alpha", "w", "t_theta0", "t_theta1"}
_COST_KEYS = {"c_a", "c_hat_a", "c_b", "c_hat_b"}
_TRUE_STATES = {
    "prior": None,
    "fixed:theta0": Hypothesis.THETA0,
    "fixed:theta1": Hypothesis.THETA1,
}


def _number(table: dict, key: str, default: float) -> float:
    v = table.get(key, default)
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{key}: expected a number, got {type(v).__name__}")
    return float(v)


def _integer(table: dict, key: str, default: int) -> int:
    v = table.get(key, default)
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigError(f"{key}: expected an integer, got {type(v).__name__}")
    return v


def _reject_unknown(table: dict, allowed: set, where: str) -> None:
    unknown = sorted(set(table) - allowed)
    if unknown:
        raise ConfigError(f"{where}: unknown key(s): {', '.join(unknown)}")


def _build_agent(entry, index: int, beta: float) -> tuple[ObservationModel, AgentPolicy]:
    where = f"agents[{index}]"
    if not isinstance(entry, dict):
        raise ConfigError(f"{where}: expected a table")
    _reject_unknown(entry, _AGENT_KEYS, where)
    for key in ("pmf_theta0", "pmf_theta1"):
        if key not in entry:
            raise ConfigError(f"{where}.{key}: required")
        if not isinstance(entry[key], list):
            raise ConfigError(f"{where}.{key}: expected a list of numbers")
    try:
        model = ObservationModel(entry["pmf_theta0"], entry["pmf_theta1"])
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"{where}: {exc}") from exc
    if "alphabet" in entry:
        alphabet = entry["alphabet"]
        size = alphabet if isinstance(alphabet, int) else len(alphabet)
        if size != model.alphabet_size:
            raise ConfigError(
                f"{where}.alphabet: size {size} does not match pmf length "
                f"{model.alphabet_size}"
            )
    w = entry.get("w", 1.0)
    if isinstance(w, bool) or not isinstance(w, (int, float, list)):
        raise ConfigError(f"{where}.w: expected a number or a list of numbers")
    try:
        policy = AgentPolicy(
            alpha=_number(entry, "alpha", 0.5),
            w_schedule=w if isinstance(w, list) else float(w),
            t_theta0=_number(entry, "t_theta0", beta),
            t_theta1=_number(entry, "t_theta1", beta),
            beta=beta,
        )
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"{where}: {exc}") from exc
    return model, policy


def load_config_file(path: str | Path) -> dict:
    """Parse and schema-check a TOML run configuration; returns the raw
    table.  Syntax errors keep the parser's line/column message."""
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    _reject_unknown(raw, _TOP_KEYS, str(path))
    if "agents" in raw:
        if not isinstance(raw["agents"], list) or len(raw["agents"]) != 2:
            raise ConfigError("agents: expected exactly two [[agents]] tables")
    if "costs" in raw:
        if not isinstance(raw["costs"], dict):
            raise ConfigError("costs: expected a table")
        _reject_unknown(raw["costs"], _COST_KEYS, "costs")
    if "true_state" in raw and raw["true_state"] not in _TRUE_STATES:
        raise ConfigError(
            f"true_state: expected one of {sorted(_TRUE_STATES)}, "
            f"got {raw['true_state']!r}"
        )
    return raw


def _resolve_seed(flag_seed: int | None, file_seed: int | None) -> int:
    if flag_seed is not None:
        return flag_seed
    env = os.environ.get("SEQDUEL_SEED")
    if env is not None:
        try:
            value = int(env)
        except ValueError:
            raise ConfigError(f"SEQDUEL_SEED: expected an integer, got {env!r}")
        if not 0 <= value < 2**64:
            raise ConfigError(f"SEQDUEL_SEED: {value} outside the 64-bit range")
        return value
    if file_seed is not None:
        return file_seed
    return 0


def _build_run_setup(args) -> tuple[ExperimentConfig, int]:
    """Resolve config file + flags into (ExperimentConfig, trials)."""
    raw = load_config_file(args.config) if args.config else {}

    beta = args.beta if args.beta is not None else _number(raw, "beta", 0.05)
    file_seed = _integer(raw, "seed", 0) if "seed" in raw else None
    seed = _resolve_seed(args.seed, file_seed)
    trials = args.trials if args.trials is not None else _integer(raw, "trials", 1000)
    max_iterations = _integer(raw, "max_iterations", 10_000)
    if args.true_state is not None:
        true_state = _TRUE_STATES["prior" if args.true_state == "prior" else f"fixed:{args.true_state}"]
    else:
        true_state = _TRUE_STATES[raw.get("true_state", "prior")]
    prior_theta1 = _number(raw, "prior_theta1", 0.5)

    if "agents" not in raw:
        try:
            config = benchmark_config(
                beta=beta,
                seed=seed,
                true_state=true_state,
                max_iterations=max_iterations,
                prior_theta1=prior_theta1,
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        return config, trials

    model_a, policy_a = _build_agent(raw["agents"][0], 0, beta)
    model_b, policy_b = _build_agent(raw["agents"][1], 1, beta)
    if args.beta is not None:
        # an explicit --beta pins both stopping thresholds to it
        policy_a = AgentPolicy(alpha=policy_a.alpha, w_schedule=policy_a.w_schedule,
                               t_theta0=beta, t_theta1=beta, beta=beta)
        policy_b = AgentPolicy(alpha=policy_b.alpha, w_schedule=policy_b.w_schedule,
                               t_theta0=beta, t_theta1=beta, beta=beta)
    costs = raw.get("costs", {})
    try:
        config = ExperimentConfig(
            prior=Prior(prior_theta1),
            model_a=model_a,
            model_b=model_b,
            policy_a=policy_a,
            policy_b=policy_b,
            true_state=true_state,
            cost_continue_a=_number(costs, "c_a", 1.0),
            cost_error_a=_number(costs, "c_hat_a", 1.0),
            cost_continue_b=_number(costs, "c_b", 1.0),
            cost_error_b=_number(costs, "c_hat_b", 1.0),
            max_iterations=max_iterations,
            seed=seed,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return config, trials


def _write_trajectory_file(config: ExperimentConfig, n_trials: int, path: Path) -> None:
    picks = list(range(min(2, n_trials)))
    records = [
        run_trial(config, trial_index=i, record_trajectory=True) for i in picks
    ]
    export_trajectories(records, picks, path)


def cmd_run(args) -> int:
    config, trials = _build_run_setup(args)
    summary, _ = run_batch(config, trials, jobs=args.jobs)
    text = summary_text(summary)
    print(text, end="")
    if args.out:
        outdir = Path(args.out)
        outdir.mkdir(parents=True, exist_ok=True)
        (outdir / "summary.txt").write_text(text)
        _write_trajectory_file(config, trials, outdir / "trajectories.csv")
        print(f"wrote {outdir / 'summary.txt'} and {outdir / 'trajectories.csv'}")
    return 0


def cmd_sweep(args) -> int:
    if args.kind == "alpha":
        return _sweep_alpha(args)
    return _sweep_w(args)


def _sweep_alpha(args) -> int:
    ks = [1, 10, 25, 49, 60, 75, 90, 99] if args.quick else [
        k for k in range(1, 100) if k != 50
    ]
    rows = []
    all_ok = True
    for k in ks:
        res = oracle_alpha_sweep(Belief.from_p_theta1(k / 100.0), 0.01)
        g = res.objective_values
        n = len(g) - 1
        symmetric = all(g[i] == g[n - i] for i in range(n + 1))
        ok = res.argmax_or_argmin == 0.5 and symmetric and res.single_peaked
        all_ok = all_ok and ok
        rows.append(
            (
                format_number(k / 100.0),
                format_number(res.argmax_or_argmin),
                format_number(g[n // 2]),
                int(symmetric),
                int(res.single_peaked),
            )
        )
    print(f"alpha sweep: {len(ks)} beliefs x 101-point grid")
    print(f"argmax = 0.5 with exact symmetry everywhere: {'yes' if all_ok else 'NO'}")
    if args.out:
        outdir = Path(args.out)
        outdir.mkdir(parents=True, exist_ok=True)
        path = outdir / "alpha_sweep.csv"
        with path.open("w", newline="") as fh:
            fh.write("belief_p,argmax,g_at_half,symmetric,single_peaked\n")
            for row in rows:
                fh.write(",".join(str(c) for c in row) + "\n")
        print(f"wrote {path}")
    if not all_ok:
        raise InvariantViolation("alpha sweep found a belief with argmax != 0.5")
    return 0


def _sweep_w(args) -> int:
    config, _ = _build_run_setup(args)
    trials = args.trials if args.trials is not None else (500 if args.quick else 10_000)
    seed = config.seed
    try:
        res = oracle_w_sweep(config, (0.0, 0.25, 0.5, 0.75, 1.0), trials, seed)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    print(f"w sweep: {trials} trials per point, seed {seed}")
    print("w,mean_tau,stderr,firing_error_rate")
    lines = []
    for w, m, se, er in zip(
        res.parameter_grid, res.objective_values, res.stderr_values, res.error_rates
    ):
        lines.append(
            f"{format_number(w)},{format_number(m)},{format_number(se)},{format_number(er)}"
        )
        print(lines[-1])
    print(f"fastest qualifying weight: {format_number(res.argmax_or_argmin)}")
    print(f"separation conclusive: {'yes' if res.conclusive else 'no'}")
    if args.out:
        outdir = Path(args.out)
        outdir.mkdir(parents=True, exist_ok=True)
        path = outdir / "w_sweep.csv"
        path.write_text("w,mean_tau,stderr,firing_error_rate\n" + "\n".join(lines) + "\n")
        print(f"wrote {path}")
    return 0


def cmd_verify(args) -> int:
    results = run_all_suites(quick=args.quick, expected_argmax=args.inject_argmax)
    width = max(len(r.name) for r in results)
    for r in results:
        print(f"{r.name:<{width}}  {'PASS' if r.passed else 'FAIL'}")
        for line in r.lines:
            print(f"    {line}")
    if not all(r.passed for r in results):
        failed = ", ".join(r.name for r in results if not r.passed)
        print(f"verification failed: {failed}", file=sys.stderr)
        return 3
    return 0


def cmd_reproduce_paper(args) -> int:
    trials = args.trials if args.trials is not None else 10_000
    seed = _resolve_seed(args.seed, None)
    misses = []

    config = benchmark_config(beta=0.05, seed=seed)
    print("channel divergences (natural log):")
    for line in kl_report(config).lines():
        print(f"  {line}")
    try:
        for line in check_reference_kl(config):
            print(f"  {line}")
    except BandMiss as exc:
        print(f"  MISS: {exc}")
        misses.append("kl")

    outdir = Path(args.out) if args.out else None
    if outdir:
        outdir.mkdir(parents=True, exist_ok=True)
    for beta in (0.05, 0.01):
        cfg = benchmark_config(beta=beta, seed=seed)
        summary, records = run_batch(cfg, trials, jobs=args.jobs)
        print(f"beta={beta}: {trials} trials, seed {seed}")
        try:
            for line in check_reference_bands(summary, beta):
                print(f"  {line}")
        except BandMiss as exc:
            print(f"  MISS: {exc}")
            misses.append(f"beta={beta}")
        k = min(100, trials)
        flavor = summarize(records[:k], beta)
        print(
            f"  {k}-trial flavor: tau_avg {format_number(flavor.tau_avg)} "
            f"(reference study used 100 trials; reported "
            f"{format_number(REFERENCE_TAU[beta].tau_avg)})"
        )
        if outdir:
            write_summary(summary, outdir / f"summary-beta{beta}.txt")
            _write_trajectory_file(cfg, trials, outdir / f"trajectories-beta{beta}.csv")
    if outdir:
        print(f"wrote summaries and trajectories under {outdir}")
    if misses:
        raise BandMiss(f"reference comparison missed: {', '.join(misses)}")
    return 0


def _seed_type(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError(f"{value} outside the 64-bit range")
    return value


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def _add_common(parser, *, beta=False, trials=False, seed=False, jobs=False,
                out=False, quick=False, true_state=False, config=False):
    if config:
        parser.add_argument("--config", metavar="PATH", help="TOML run configuration")
    if beta:
        parser.add_argument(
            "--beta", type=float, metavar="F",
            help="confidence threshold; pins both agents' stopping thresholds",
        )
    if trials:
        parser.add_argument("--trials", type=_positive_int, metavar="N")
    if seed:
        parser.add_argument("--seed", type=_seed_type, metavar="U64")
    if jobs:
        parser.add_argument("--jobs", type=_positive_int, default=1, metavar="N")
    if out:
        parser.add_argument("--out", metavar="DIR", help="directory for output files")
    if quick:
        parser.add_argument("--quick", action="store_true", help="reduced trial counts")
    if true_state:
        parser.add_argument(
            "--true-state", choices=("theta0", "theta1", "prior"), dest="true_state"
        )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="seqduel",
        description="Two-agent sequential hypothesis testing simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a configured batch of trials")
    _add_common(p_run, config=True, beta=True, trials=True, seed=True, jobs=True,
                out=True, true_state=True)
    p_run.set_defaults(func=cmd_run)

    p_sweep = sub.add_parser("sweep", help="grid sweep of alpha or the fusion weight")
    p_sweep.add_argument("kind", choices=("alpha", "w"))
    _add_common(p_sweep, config=True, beta=True, trials=True, seed=True, out=True,
                quick=True)
    p_sweep.set_defaults(func=cmd_sweep, true_state=None, jobs=1)

    p_verify = sub.add_parser("verify", help="run the verification suites")
    _add_common(p_verify, quick=True)
    p_verify.add_argument(
        "--inject-argmax", type=float, default=0.5, help=argparse.SUPPRESS
    )
    p_verify.set_defaults(func=cmd_verify)

    p_repro = sub.add_parser(
        "reproduce-paper", help="benchmark study at beta 0.05 and 0.01"
    )
    _add_common(p_repro, trials=True, seed=True, jobs=True, out=True)
    p_repro.set_defaults(func=cmd_reproduce_paper)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return 3
    except BandMiss as exc:
        print(f"reference band miss: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
