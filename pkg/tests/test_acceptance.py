"""Acceptance criteria, one test each, at their stated tolerances.

Every test prints a single ``ACCEPTANCE <n> PASS|FAIL`` line with the
measured quantities, visible without ``-s``.
"""

import time

import numpy as np
import pytest
from scipy.stats import spearmanr

from irssec.harness import cli
from irssec.harness.config import load_config
from irssec.harness.experiments import run_fig1, run_fig2, with_grid
from irssec.harness.validation import (
    check_contamination,
    check_expectation,
    check_monotonicity,
    check_pilot_exactness,
    check_x_subproblem,
    check_y_subproblem,
)

JOBS = 4


@pytest.fixture
def report(capsys):
    def emit(number, name, passed, detail, seconds):
        with capsys.disabled():
            print(f"\nACCEPTANCE {number} {'PASS' if passed else 'FAIL'} {name}: {detail} [{seconds:.1f}s]")

    return emit


def timed(fn, *args, **kwargs):
    t0 = time.perf_counter()
    out = fn(*args, **kwargs)
    return out, time.perf_counter() - t0


@pytest.fixture(scope="module")
def fig1_sweep():
    spec = load_config()
    assert spec.grid == (8, 16, 24, 32, 40, 48, 56, 64) and spec.n_trials == 500
    return timed(run_fig1, spec, jobs=JOBS)


def test_1_pilot_exactness(report):
    res, dt = timed(check_pilot_exactness, seed=7, n_real=100)
    ok = res.passed and dt < 5
    report(1, "pilot exactness", ok, res.detail, dt)
    assert ok


def test_2_contamination_closed_form(report):
    res, dt = timed(check_contamination, seed=7)
    ok = res.passed and dt < 5
    report(2, "contamination closed form", ok, res.detail, dt)
    assert ok


def test_3_expectation_formula(report):
    res, dt = timed(check_expectation, seed=7, n_samples=100_000, probes=5)
    ok = res.passed and dt < 120
    report(3, "expectation formula", ok, res.detail, dt)
    assert ok


def test_4_solver_correctness(report):
    t0 = time.perf_counter()
    parts = [check_x_subproblem(7), check_y_subproblem(7), check_monotonicity(7, n_runs=20)]
    dt = time.perf_counter() - t0
    ok = all(p.passed for p in parts) and dt < 60
    report(4, "solver correctness", ok, "; ".join(p.detail for p in parts), dt)
    assert ok


def test_5_fig1_trend(report, fig1_sweep):
    sweep, dt = fig1_sweep
    prop = {r.sweep_value: r.r_sec for r in sweep.rows if r.scheme == "proposed"}
    bench = {r.sweep_value: r.r_sec for r in sweep.rows if r.scheme == "benchmark"}
    grid = sorted(prop)
    rho = spearmanr(grid, [prop[m] for m in grid]).statistic
    ratio = prop[64] / bench[64] if bench[64] > 0 else np.inf
    ok = rho >= 0.9 and ratio >= 3 and dt < 600
    detail = (
        f"spearman {rho:.3f}, proposed {prop[8]:.3f}->{prop[64]:.3f}, "
        f"benchmark {bench[8]:.3f}->{bench[64]:.3f}, ratio@64 {ratio:.1f}"
    )
    report(5, "fig1 trend", ok, detail, dt)
    assert ok


def test_6_fig2_dip(report):
    spec = with_grid(load_config(), "fig2_sweep")
    assert len(spec.grid) >= 20 and spec.m_irs == 64
    assert spec.theta_star in spec.grid
    sweep, dt = timed(run_fig2, spec, jobs=JOBS)
    rows = {r.sweep_value: r.r_sec for r in sweep.rows if r.scheme == "proposed"}
    values = np.array([rows[v] for v in spec.grid])
    at_star = rows[spec.theta_star]
    median = float(np.median(values))
    argmin = spec.grid[int(np.argmin(values))]
    ok = at_star < 0.25 * median and argmin == spec.theta_star and dt < 900
    detail = f"R_sec(theta*) {at_star:.3f}, median {median:.3f}, argmin {argmin:.4f}"
    report(6, "fig2 dip", ok, detail, dt)
    assert ok


def test_7_determinism(report, tmp_path):
    t0 = time.perf_counter()
    outs = []
    for run in ("a", "b"):
        out = tmp_path / run
        assert cli.main(["fig1", "--out", str(out), "--jobs", str(JOBS)]) == 0
        outs.append((out / "results.csv").read_bytes())
    dt = time.perf_counter() - t0
    ok = outs[0] == outs[1] and dt < 600
    report(7, "determinism", ok, f"{len(outs[0])} bytes, identical={outs[0] == outs[1]}", dt)
    assert ok
