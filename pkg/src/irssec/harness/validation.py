"""Cross-module self-checks run by the ``validate`` verb."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from ..channel import ChannelSampler
from ..objective import (
    SAMPLED_VARIANT,
    AlignmentParams,
    ObjectiveSpec,
    alignment_e,
    f_mu,
    mc_expectation_oracle,
)
from ..optimizer import (
    OptimizerConfig,
    solve_x_subproblem,
    solve_y_subproblem,
    run_alternating,
)
from ..scenario import (
    EVE,
    LargeScaleGains,
    PowerSpec,
    ScenarioConfig,
    build_correlation_set,
    sample_terminals,
)
from ..training import (
    build_pilots,
    contaminated_estimates_analytic,
    estimate_channels,
    simulate_uplink_training,
)

ALL_CHECKS = ("pilot_exactness", "contamination", "expectation", "x_subproblem", "y_subproblem", "monotonicity")


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0
    metrics: dict = field(default_factory=dict)


def random_scenario(rng, n_bs=8, m_irs=8, k_users=2, p_eve=0.5, attacked=0) -> ScenarioConfig:
    return ScenarioConfig(
        n_bs=n_bs,
        m_irs=m_irs,
        terminals=sample_terminals(rng, k_users),
        attacked=attacked,
        powers=PowerSpec(p_uplink=(1.0,) * k_users, p_eve=p_eve),
    )


def _rel(a, b) -> float:
    return float(np.max(np.abs(a - b)) / max(np.max(np.abs(b)), 1e-300))


def unit_gains(k_users: int) -> LargeScaleGains:
    return LargeScaleGains(beta=np.ones(k_users + 1), xi=np.ones(k_users + 1))


def check_pilot_exactness(seed: int, n_real: int = 100) -> CheckResult:
    rng = np.random.default_rng(seed)
    sc = random_scenario(rng, n_bs=8, m_irs=16, k_users=2)
    sampler = ChannelSampler.from_statistics(build_correlation_set(sc), unit_gains(2))
    pilots = build_pilots(2, 16, 2, 2)
    worst = 0.0
    for _ in range(n_real):
        real = sampler.sample(rng)
        est = estimate_channels(
            simulate_uplink_training(real, pilots, sc.powers, 0, attack_on=False), pilots, sc.powers, 0
        )
        worst = max(worst, _rel(est.h_hat, real.h[:2]), _rel(est.f_hat, real.cascade()[:2]))
    return CheckResult("pilot_exactness", worst < 1e-10, f"max relative error {worst:.2e}", metrics={"max_rel": worst})


def check_contamination(seed: int, inject: float = 0.0) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for alpha in (0.25, 0.5, 1.0):
        sc = random_scenario(rng, n_bs=8, m_irs=16, k_users=2, p_eve=alpha)
        sampler = ChannelSampler.from_statistics(build_correlation_set(sc), unit_gains(2))
        pilots = build_pilots(2, 16, 3, 2)
        real = sampler.sample(rng)
        sim = estimate_channels(simulate_uplink_training(real, pilots, sc.powers, 0), pilots, sc.powers, 0)
        ana = contaminated_estimates_analytic(real, alpha + inject, 0)
        direct_err = _rel(sim.h_hat[0] - real.h[0], np.sqrt(alpha) * real.h[EVE])
        worst = max(worst, _rel(sim.h_hat, ana.h_hat), _rel(sim.f_hat, ana.f_hat), direct_err)
    return CheckResult("contamination", worst < 1e-10, f"max relative error {worst:.2e}", metrics={"max_rel": worst})


def check_expectation(seed: int, n_samples: int = 100_000, probes: int = 5) -> CheckResult:
    rng = np.random.default_rng(seed)
    sc = random_scenario(rng, n_bs=8, m_irs=8, k_users=2)
    corr = build_correlation_set(sc)
    gains = unit_gains(2)
    params = AlignmentParams.from_statistics(corr, gains)
    sampler = ChannelSampler.from_statistics(corr, gains)
    alpha = sc.alpha_e
    worst_self = worst_leak = worst_z = 0.0
    for _ in range(probes):
        x = rng.standard_normal(8) + 1j * rng.standard_normal(8)
        y = np.exp(1j * rng.uniform(0, 2 * np.pi, 8))
        own = mc_expectation_oracle(sampler, x, y, alpha, 0, 1, 1, n_samples, rng)
        ref = alignment_e(params, 1, x, y, SAMPLED_VARIANT)
        worst_self = max(worst_self, abs(own.mean - ref) / abs(ref))
        cross = mc_expectation_oracle(sampler, x, y, alpha, 0, EVE, 1, n_samples, rng)
        worst_z = max(worst_z, abs(cross.mean) / cross.stderr)
        leak = mc_expectation_oracle(sampler, x, y, alpha, 0, EVE, 0, n_samples, rng)
        ref = np.sqrt(alpha) * alignment_e(params, EVE, x, y, SAMPLED_VARIANT)
        worst_leak = max(worst_leak, abs(leak.mean - ref) / abs(ref))
    ok = worst_self < 0.05 and worst_leak < 0.05 and worst_z < 3.0
    detail = f"own rel {worst_self:.3%}, leakage rel {worst_leak:.3%}, cross |mean|/se {worst_z:.2f}"
    return CheckResult(
        "expectation", ok, detail, metrics={"own_rel": worst_self, "leak_rel": worst_leak, "cross_z": worst_z}
    )


def _random_objective(rng, m_irs, k_users=2, aligned_eve=False):
    sc = random_scenario(rng, n_bs=8, m_irs=m_irs, k_users=k_users)
    if aligned_eve:
        terms = sc.terminals[:-1] + (sc.terminals[0],)
        sc = ScenarioConfig(n_bs=8, m_irs=m_irs, terminals=terms, powers=sc.powers)
    corr = build_correlation_set(sc)
    gains = LargeScaleGains(beta=rng.uniform(0.2, 1.0, k_users + 1), xi=rng.uniform(0.2, 1.0, k_users + 1))
    params = AlignmentParams.from_statistics(corr, gains)
    zeta = rng.uniform(0.5, 2.0, k_users) * params.beta_tr[:k_users] * 2
    return ObjectiveSpec(zeta=zeta, mu=1.0, attacked_index=0, alpha_e=sc.alpha_e), params


def check_x_subproblem(seed: int, n_instances: int = 20) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_instances):
        spec, params = _random_objective(rng, m_irs=4)
        y = np.exp(1j * rng.uniform(0, 2 * np.pi, 4))
        step = solve_x_subproblem(spec, params, y)
        res = [abs(alignment_e(params, k, step.x[k], y) - spec.zeta[k]) for k in range(params.k_users)]
        res.append(abs(alignment_e(params, EVE, step.x[0], y)))
        worst = max(worst, max(res))
    return CheckResult("x_subproblem", worst < 1e-9, f"max residual {worst:.2e}", metrics={"max_residual": worst})


def grid_minimum(spec, params, x, n_points: int, rng) -> float:
    """Best cost over uniformly sampled points of the relaxed unit disk."""
    m = params.m_irs
    r = np.sqrt(rng.uniform(0, 1, (n_points, m)))
    ys = r * np.exp(1j * rng.uniform(0, 2 * np.pi, (n_points, m)))
    return min(f_mu(spec, params, x, y) for y in ys)


def check_y_subproblem(seed: int, n_instances: int = 5) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for i in range(n_instances):
        m = 1 + i % 2
        spec, params = _random_objective(rng, m_irs=m)
        x = (rng.standard_normal((2, m)) + 1j * rng.standard_normal((2, m))) * 0.5
        y0 = np.ones(m, dtype=complex)
        val = f_mu(spec, params, x, solve_y_subproblem(spec, params, x, y0))
        ref = grid_minimum(spec, params, x, 10_000, rng)
        worst = max(worst, val / ref - 1.0)
    return CheckResult("y_subproblem", worst <= 0.02, f"worst excess over grid {worst:+.3%}", metrics={"excess": worst})


def step_increases(history: list) -> float:
    """Largest increase across any x-step or relaxed y-step of a run."""
    worst = -np.inf
    for (prev_stage, prev), (stage, val) in zip(history, history[1:]):
        if stage in ("relaxed", "x"):
            worst = max(worst, val - prev)
    return worst


def check_monotonicity(seed: int, n_runs: int = 20) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = -np.inf
    for i in range(n_runs):
        spec, params = _random_objective(rng, m_irs=2 + i % 3, aligned_eve=bool(i % 2))
        res = run_alternating(spec, params, OptimizerConfig(theta_init="random", seed=i, max_outer_iters=10))
        worst = max(worst, step_increases(res.history))
    return CheckResult("monotonicity", worst <= 1e-8, f"largest step increase {worst:.2e}", metrics={"max_increase": worst})


def run_validation_suite(settings: dict | None = None) -> list:
    """Run the configured checks; ``checks=[]`` runs nothing and passes."""
    settings = settings or {}
    names = settings.get("checks")
    names = ALL_CHECKS if names is None else tuple(names)
    seed = int(settings.get("seed", 7))
    unknown = set(names) - set(ALL_CHECKS)
    if unknown:
        raise ValueError(f"unknown validation checks: {sorted(unknown)}")
    runners = {
        "pilot_exactness": lambda: check_pilot_exactness(seed),
        "contamination": lambda: check_contamination(seed, float(settings.get("inject_alpha_mismatch", 0.0))),
        "expectation": lambda: check_expectation(seed, int(settings.get("mc_samples", 100_000))),
        "x_subproblem": lambda: check_x_subproblem(seed),
        "y_subproblem": lambda: check_y_subproblem(seed),
        "monotonicity": lambda: check_monotonicity(seed),
    }
    results = []
    for name in names:
        t0 = time.perf_counter()
        res = runners[name]()
        res.seconds = time.perf_counter() - t0
        results.append(res)
    return results
