"""Sweep orchestration: design once from statistics, then Monte Carlo evaluate.

Seed layout (all derived from ``master_seed`` with ``numpy.random.SeedSequence``
spawn keys):

* ``(0,)`` -- terminal placement and IRS angles,
* ``(1, i)`` -- channel realizations of sweep point ``i`` (shared by both
  schemes, so the comparison is paired),
* ``(2, i)`` -- the benchmark's random IRS phases at point ``i``.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from ..channel import ChannelSampler
from ..downlink import benchmark_design, ergodic_rates, proposed_design, random_phases, sinr_esnr
from ..objective import AlignmentParams, ObjectiveSpec, default_targets
from ..optimizer import DesignResult, initial_theta, run_alternating
from ..scenario import (
    AngleSpec,
    ScenarioConfig,
    build_correlation_set,
    build_large_scale,
    rotate_terminal,
    sample_terminal,
)
from ..training import contaminated_estimates_analytic
from .config import ExperimentSpec

log = logging.getLogger(__name__)

PLACEMENT_KEY = 0
CHANNEL_KEY = 1
BENCHMARK_KEY = 2


@dataclass
class ResultRow:
    sweep_value: float
    scheme: str
    user: int
    r_sec: float
    r: float
    r_e: float
    r_sec_weighted_sum: float
    r_sec_stderr: float
    objective: float = float("nan")
    iterations: int = 0
    converged: bool = False
    zero_at_init: bool = False
    n_trials: int = 0
    status: str = "ok"


@dataclass(frozen=True)
class Placement:
    terminals: tuple
    irs_arrival: AngleSpec
    irs_departure: AngleSpec


@dataclass
class SweepResult:
    rows: list
    placement: Placement
    points: list = field(default_factory=list)


def _rng(spec: ExperimentSpec, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(spec.master_seed, spawn_key=key))


def _random_angle(rng: np.random.Generator, spec: ExperimentSpec) -> AngleSpec:
    return AngleSpec(
        float(rng.uniform(0.0, 2.0 * np.pi)),
        float(rng.uniform(*spec.placement_ranges.elevation)),
    )


def resolve_placement(spec: ExperimentSpec) -> Placement:
    """Terminal geometry and IRS angles, sampled once per experiment."""
    rng = _rng(spec, PLACEMENT_KEY)
    if spec.fixed_terminals is not None:
        terminals = spec.fixed_terminals
    else:
        users = tuple(sample_terminal(rng, spec.placement_ranges) for _ in range(spec.k_users))
        terminals = users + (sample_terminal(rng, spec.eve_ranges),)
    arrival = spec.irs_arrival or _random_angle(rng, spec)
    departure = spec.irs_departure or _random_angle(rng, spec)
    return Placement(terminals, arrival, departure)


def build_scenario(spec: ExperimentSpec, placement: Placement, m_irs: int, terminals=None) -> ScenarioConfig:
    return ScenarioConfig(
        n_bs=spec.n_bs,
        m_irs=m_irs,
        terminals=placement.terminals if terminals is None else terminals,
        attacked=spec.attacked,
        irs_arrival=placement.irs_arrival,
        irs_departure=placement.irs_departure,
        spacing=spec.spacing,
        large_scale=spec.large_scale,
        powers=spec.powers,
        timing=spec.timing,
        weights=spec.weights,
    )


def design_for(spec: ExperimentSpec, scenario: ScenarioConfig) -> tuple[DesignResult, AlignmentParams, ObjectiveSpec]:
    """Run the alternating optimizer on the scenario's channel statistics."""
    corr = build_correlation_set(scenario)
    gains = build_large_scale(scenario)
    params = AlignmentParams.from_statistics(corr, gains)
    theta0 = initial_theta(params, spec.optimizer)
    zeta = np.asarray(spec.zeta, dtype=complex) if spec.zeta is not None else default_targets(params, theta0)
    if zeta.shape != (scenario.k_users,):
        raise ValueError(f"need {scenario.k_users} targets, got {zeta.shape}")
    obj = ObjectiveSpec(
        zeta=zeta,
        mu=spec.mu,
        attacked_index=scenario.attacked,
        include_alpha_in_leakage=spec.include_alpha_in_leakage,
        alpha_e=scenario.alpha_e,
    )
    return run_alternating(obj, params, spec.optimizer, theta0=theta0), params, obj


def evaluate_point(spec: ExperimentSpec, scenario: ScenarioConfig, index: int, sweep_value: float) -> list:
    """Design plus paired Monte Carlo evaluation of one sweep point."""
    schemes = ("proposed", "benchmark") if spec.scheme == "both" else (spec.scheme,)
    sampler = ChannelSampler.from_statistics(build_correlation_set(scenario), build_large_scale(scenario))
    real = sampler.sample(_rng(spec, CHANNEL_KEY, index), size=spec.n_trials)
    est = contaminated_estimates_analytic(real, scenario.alpha_e, scenario.attacked)
    p = scenario.powers
    rows = []
    for scheme in schemes:
        meta = {}
        if scheme == "proposed":
            result, _, _ = design_for(spec, scenario)
            design = proposed_design(est, result.c, result.theta, p.p_t)
            meta = dict(
                objective=result.objective,
                iterations=result.iterations,
                converged=result.converged,
                zero_at_init=result.zero_at_init,
            )
        else:
            rng = _rng(spec, BENCHMARK_KEY, index)
            theta = random_phases(rng, scenario.m_irs, spec.n_trials)
            design = benchmark_design(est, rng, p.p_t, theta=theta)
        s, e = sinr_esnr(real, design, p.sigma2, p.rho2)
        rep = ergodic_rates(s, e, weights=scenario.user_weights, prefactor=scenario.prefactor)
        stderr = rep.secrecy_stderr
        for k in range(scenario.k_users):
            rows.append(
                ResultRow(
                    sweep_value=float(sweep_value),
                    scheme=scheme,
                    user=k,
                    r_sec=float(rep.secrecy[k]),
                    r=float(rep.rate[k]),
                    r_e=float(rep.leakage[k]),
                    r_sec_weighted_sum=rep.weighted_sum,
                    r_sec_stderr=float(stderr[k]),
                    n_trials=rep.n_trials,
                    **meta,
                )
            )
    return rows


def _failed_rows(spec: ExperimentSpec, sweep_value: float, exc: Exception) -> list:
    schemes = ("proposed", "benchmark") if spec.scheme == "both" else (spec.scheme,)
    nan = float("nan")
    return [
        ResultRow(float(sweep_value), s, k, nan, nan, nan, nan, nan, status=f"failed: {exc}")
        for s in schemes
        for k in range(spec.k_users)
    ]


def _point_task(args):
    spec, scenario_args, index, value = args
    try:
        scenario = build_scenario(spec, *scenario_args)
        return evaluate_point(spec, scenario, index, value)
    except (ValueError, np.linalg.LinAlgError) as exc:
        log.error("sweep point %s failed: %s", value, exc)
        return _failed_rows(spec, value, exc)


def _run_points(tasks: list, jobs: int) -> list:
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_point_task, tasks))
    else:
        chunks = [_point_task(t) for t in tasks]
    return [row for chunk in chunks for row in chunk]


def fig2_terminals(spec: ExperimentSpec, placement: Placement, value: float) -> tuple:
    """Eavesdropper rotated in azimuth so it coincides with the attacked user at ``theta_star``.

    Both mean azimuths move by ``2 pi (value - theta_star)``; distances and
    elevations are copied from the attacked user.
    """
    user = placement.terminals[spec.attacked]
    eve = rotate_terminal(user, 2.0 * np.pi * (value - spec.theta_star))
    return tuple(placement.terminals[:-1]) + (eve,)


def run_fig1(spec: ExperimentSpec, jobs: int = 1) -> SweepResult:
    """Secrecy rate against IRS size; one optimizer run per size."""
    placement = resolve_placement(spec)
    tasks = [(spec, (placement, int(m)), i, int(m)) for i, m in enumerate(spec.grid)]
    return SweepResult(_run_points(tasks, jobs), placement, list(spec.grid))


def run_fig2(spec: ExperimentSpec, jobs: int = 1) -> SweepResult:
    """Secrecy rate against the eavesdropper's angular position."""
    placement = resolve_placement(spec)
    tasks = [
        (spec, (placement, spec.m_irs, fig2_terminals(spec, placement, float(v))), i, float(v))
        for i, v in enumerate(spec.grid)
    ]
    return SweepResult(_run_points(tasks, jobs), placement, list(spec.grid))


def run_single(spec: ExperimentSpec, jobs: int = 1) -> SweepResult:
    placement = resolve_placement(spec)
    tasks = [(spec, (placement, spec.m_irs), 0, spec.m_irs)]
    return SweepResult(_run_points(tasks, jobs), placement, [spec.m_irs])


def run_experiment(spec: ExperimentSpec, jobs: int = 1) -> SweepResult:
    runners = {"fig1_sweep": run_fig1, "fig2_sweep": run_fig2, "single_point": run_single}
    try:
        runner = runners[spec.kind]
    except KeyError:
        raise ValueError(f"{spec.kind!r} is not a sweep experiment") from None
    return runner(spec, jobs)


def with_grid(spec: ExperimentSpec, kind: str, grid=None) -> ExperimentSpec:
    """Switch experiment kind, substituting the kind's default grid if needed."""
    if spec.kind == kind and grid is None:
        return spec
    if grid is None:
        grid = default_grid(kind, spec)
    return replace(spec, kind=kind, grid=tuple(grid))


def default_grid(kind: str, spec: ExperimentSpec) -> tuple:
    if kind == "fig2_sweep":
        # 24 points over one revolution; 1/12 lies on the grid
        return tuple(np.arange(24) / 24.0)
    if kind == "fig1_sweep":
        return (8, 16, 24, 32, 40, 48, 56, 64)
    return (spec.m_irs,)
