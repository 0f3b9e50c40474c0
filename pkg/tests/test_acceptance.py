"""Acceptance gate: the ten pinned criteria, one test per criterion in
order, against the benchmark channel pair.

Heavy batches (10^5 trials per confidence level) are shared between the
structural criteria through module-scoped fixtures.  Each test prints a
one-line PASS summary with the measured values (visible with -s or -rA).
"""

import csv
import math
import subprocess
import sys
import time
from pathlib import Path

import numpy as np
import pytest

from seqduel.beliefs import Belief, bernoulli_entropy, kl_divergence
from seqduel.cli import main
from seqduel.engine import Initiator, run_trial
from seqduel.experiments import export_trajectories, run_batch
from seqduel.oracles import (
    oracle_alpha_sweep,
    oracle_error_bounds,
    oracle_martingale,
    oracle_w_sweep,
)
from seqduel.presets import (
    CHANNEL_A_PMFS,
    CHANNEL_B_PMFS,
    REFERENCE_KL_A,
    REFERENCE_KL_B,
    REFERENCE_TAU,
    TAU_BAND_RELATIVE,
    benchmark_config,
    benchmark_models,
)

PACKAGE_ROOT = Path(__file__).resolve().parent.parent
REFERENCE_CONFIG = str(PACKAGE_ROOT / "configs" / "reference.toml")


@pytest.fixture(scope="module")
def batches_100k():
    """10^5 seeded trials per confidence level, shared by criteria 3, 4, 9."""
    out = {}
    for beta in (0.05, 0.01):
        config = benchmark_config(beta=beta, seed=0)
        _, records = run_batch(config, 100_000)
        out[beta] = records
    return out


def test_c01_kl_reproduction():
    kl_a = kl_divergence(CHANNEL_A_PMFS[0], CHANNEL_A_PMFS[1])
    kl_b = kl_divergence(CHANNEL_B_PMFS[0], CHANNEL_B_PMFS[1])
    assert abs(kl_a - REFERENCE_KL_A) <= 0.005
    assert abs(kl_b - REFERENCE_KL_B) <= 0.005
    print(f"PASS C1: kl_a={kl_a:.6f} (ref {REFERENCE_KL_A}), "
          f"kl_b={kl_b:.6f} (ref {REFERENCE_KL_B}), tolerance 0.005")


def test_c02_stopping_time_reproduction(capsys):
    start = time.perf_counter()
    code = main(["reproduce-paper"])  # 10^4 trials at beta 0.05 and 0.01, seed 0
    elapsed = time.perf_counter() - start
    out = capsys.readouterr().out
    assert code == 0, out
    assert out.count(" ok") >= 8  # 2 KL lines + 6 stopping-time lines
    assert "MISS" not in out
    assert elapsed < 30.0
    with capsys.disabled():
        print(f"\nPASS C2: reproduce-paper all bands ok "
              f"(+/-{TAU_BAND_RELATIVE:.0%} around {REFERENCE_TAU[0.05].tau_avg}/"
              f"{REFERENCE_TAU[0.01].tau_avg} etc.), {elapsed:.1f}s < 30s")


def test_c03_coupled_stop_is_min_of_solo_times(batches_100k):
    checked = 0
    for beta, records in batches_100k.items():
        for rec in records:
            assert not rec.truncated, f"trial {rec.trial_index} truncated"
            solos = [t for t in (rec.tau_solo_a, rec.tau_solo_b) if t is not None]
            assert solos and rec.tau == min(solos), (
                f"beta={beta} trial {rec.trial_index}: tau={rec.tau}, "
                f"solos=({rec.tau_solo_a}, {rec.tau_solo_b})"
            )
            assert rec.initiator is not None
            checked += 1
    print(f"PASS C3: tau == min(solo crossings) on all {checked} trials "
          f"(10^5 per beta), zero violations")


def test_c04_error_bounds_structural(batches_100k):
    for beta, records in batches_100k.items():
        report = oracle_error_bounds(records, beta)
        assert report.n_records == 100_000
        assert report.initiator_error_quantiles[-1] <= beta + 1e-12
        assert report.noninitiator_error_quantiles[-1] <= 0.5 + 1e-12
    print("PASS C4: initiator error <= beta and non-initiator error <= 0.5 "
          "on all 10^5 trials at beta in {0.05, 0.01}, zero violations")


def test_c05_signaling_sweep_argmax_half():
    start = time.perf_counter()
    beliefs = [k / 100.0 for k in range(1, 100) if k != 50]
    for p in beliefs:
        res = oracle_alpha_sweep(Belief.from_p_theta1(p), 0.01)
        g = res.objective_values
        n = len(g) - 1
        assert res.argmax_or_argmin == 0.5, f"belief {p}: argmax {res.argmax_or_argmin}"
        assert all(g[k] == g[n - k] for k in range(n + 1)), f"belief {p}: asymmetric"
    elapsed = time.perf_counter() - start
    assert elapsed < 1.0
    print(f"PASS C5: argmax g(alpha) = 0.5 with bit-exact symmetry over "
          f"{len(beliefs)} beliefs x 101 alphas, {elapsed:.2f}s < 1s")


def test_c06_fusion_weight_sweep():
    config = benchmark_config(beta=0.05)
    res = oracle_w_sweep(config, (0.0, 0.25, 0.5, 0.75, 1.0), 10_000, seed=20_101)
    assert res.argmax_or_argmin == 1.0
    i_one = res.parameter_grid.index(1.0)
    i_75 = res.parameter_grid.index(0.75)
    separation = res.objective_values[i_75] - res.objective_values[i_one]
    combined_se = math.hypot(res.stderr_values[i_75], res.stderr_values[i_one])
    assert separation >= 3.0 * combined_se
    assert res.conclusive
    print(f"PASS C6: w=1 minimal among qualifying weights "
          f"({res.objective_values[i_one]:.3f} vs {res.objective_values[i_75]:.3f} "
          f"at w=0.75, separation {separation / combined_se:.0f} SE >= 3 SE, "
          f"10^4 trials per point)")


def test_c07_posterior_martingale_exact():
    grid = [Belief.from_p_theta1(k / 51.0) for k in range(1, 51)]
    worst = 0.0
    for model in benchmark_models():
        report = oracle_martingale(model, grid)
        assert report.max_deviation <= 1e-10
        worst = max(worst, report.max_deviation)
    print(f"PASS C7: one-step posterior expectation exact to 1e-10 on 50 "
          f"beliefs x both channels (max deviation {worst:.2e})")


def test_c08_entropy_properties():
    assert bernoulli_entropy(0.5) == 1.0
    for k in range(1001):
        p = k / 1000.0
        assert abs(bernoulli_entropy(p) - bernoulli_entropy(1.0 - p)) <= 1e-12
    rng = np.random.default_rng(20_260_815)
    triples = rng.random((10_000, 3))
    for p, q, lam in triples:
        mixed = bernoulli_entropy(lam * p + (1.0 - lam) * q)
        convex = lam * bernoulli_entropy(p) + (1.0 - lam) * bernoulli_entropy(q)
        assert mixed >= convex - 1e-12
    print("PASS C8: H(0.5)=1, symmetry to 1e-12 on 1001-point grid, "
          "concavity on 10^4 random triples")


def test_c09_trajectory_decay_and_fast_agent_first(batches_100k, tmp_path):
    # the faster channel crosses first in the great majority of trials
    first_10k = batches_100k[0.05][:10_000]
    b_first = sum(1 for r in first_10k if r.tau_solo_b < r.tau_solo_a)
    fraction = b_first / len(first_10k)
    assert fraction >= 0.80

    # two exported trials show the initiator's min component decaying to
    # the threshold
    config = benchmark_config(beta=0.05, seed=0)
    records = [run_trial(config, trial_index=i, record_trajectory=True) for i in (0, 1)]
    path = tmp_path / "trajectories.csv"
    export_trajectories(records, (0, 1), path)
    with path.open() as fh:
        rows = list(csv.DictReader(fh))
    for rec in records:
        initiating = "b" if rec.initiator in (Initiator.B, Initiator.BOTH) else "a"
        series = [
            float(r["min_component"])
            for r in rows
            if int(r["trial"]) == rec.trial_index and r["agent"] == initiating
        ]
        assert len(series) == rec.tau
        assert series[-1] <= 0.05
        assert series[-1] == min(series)
        assert series[-1] < series[0]
    print(f"PASS C9: initiator min-component decays to the threshold in both "
          f"exported trials; fast agent crosses first in {fraction:.1%} "
          f"of 10^4 trials (>= 80%)")


def test_c10_byte_identical_determinism(tmp_path):
    def invoke(out_dir, jobs):
        return subprocess.run(
            [
                sys.executable, "-m", "seqduel.cli", "run",
                "--config", REFERENCE_CONFIG,
                "--trials", "400", "--seed", "7",
                "--jobs", str(jobs), "--out", str(out_dir),
            ],
            capture_output=True,
            cwd=PACKAGE_ROOT,
        )

    runs = {
        "first": invoke(tmp_path / "first", 1),
        "second": invoke(tmp_path / "second", 1),
        "jobs8": invoke(tmp_path / "jobs8", 8),
    }
    for name, proc in runs.items():
        assert proc.returncode == 0, (name, proc.stderr)

    def files(d):
        return {
            p.name: p.read_bytes() for p in sorted((tmp_path / d).iterdir())
        }

    assert files("first") == files("second") == files("jobs8")
    # stdout differs only in the out-directory path it names
    strip = lambda proc, d: proc.stdout.replace(str(tmp_path / d).encode(), b"OUT")
    assert strip(runs["first"], "first") == strip(runs["second"], "second")
    assert strip(runs["first"], "first") == strip(runs["jobs8"], "jobs8")
    print("PASS C10: byte-identical summary, trajectories, and stdout across "
          "repeat runs and --jobs 8 vs --jobs 1")
