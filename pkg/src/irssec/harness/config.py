"""Experiment configuration files (YAML, versioned schema).

Physical quantities carry their unit in the key name (``*_db``, ``*_m``,
``*_rad``, ``*_symbols``, ``*_over_lambda``). Missing keys take the
defaults below (the reference operating point).
"""

from __future__ import annotations

import copy
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional

import numpy as np
import yaml

from ..optimizer import OptimizerConfig, YSolverConfig
from ..scenario import (
    AngleSpec,
    LargeScaleSpec,
    PlacementRanges,
    PowerSpec,
    SpacingSpec,
    TerminalSpec,
    TimingSpec,
)

SCHEMA_VERSION = 1
KINDS = ("fig1_sweep", "fig2_sweep", "single_point", "validation_suite")
SCHEMES = ("proposed", "benchmark", "both")


class ConfigError(ValueError):
    pass


DEFAULTS: dict = {
    "schema_version": SCHEMA_VERSION,
    "experiment": {
        "kind": "fig1_sweep",
        "grid": [8, 16, 24, 32, 40, 48, 56, 64],
        "n_trials": 500,
        "master_seed": 2020,
        "scheme": "both",
        "m_irs": 64,
        "theta_star": 1.0 / 12.0,
    },
    "scenario": {
        "n_bs": 8,
        "k_users": 1,
        "attacked_user": 0,
        "spacing": {"d_bs_over_lambda": 0.25, "d_irs_over_lambda": 0.5},
        "path_loss": {
            "beta0_db": -10.0,
            "xi0_db": -13.0,
            "alpha_d": 3.6,
            "alpha_r": 2.1,
            "d0_m": 1.0,
        },
        "powers": {
            "p_t": 1.0,
            "p_uplink": None,
            "p_eve": 0.5,
            "sigma2": 0.1,
            "rho2": 0.1,
        },
        "timing": None,
        "weights": None,
        "placement": {
            "mode": "random",
            "d_direct_range_m": [10.0, 30.0],
            "d_reflect_range_m": [15.0, 35.0],
            "elevation_range_rad": [float(np.pi / 4), float(np.pi / 2)],
            "eve_d_direct_range_m": [30.0, 50.0],
            "eve_d_reflect_range_m": [35.0, 55.0],
            "terminals": None,
            "irs_arrival": None,
            "irs_departure": None,
        },
    },
    "optimizer": {
        "eps_theta": 1e-6,
        "eps_c": 1e-6,
        "max_outer_iters": 50,
        "theta_init": "aligned",
        "theta_seed": 0,
        "y_step0": 0.5,
        "y_max_iters": 500,
        "y_tol": 1e-8,
    },
    "objective": {
        "mu": 1.0,
        "include_alpha_in_leakage": False,
        "zeta": None,
    },
    "validation": {
        "checks": None,
        "mc_samples": 100_000,
        "inject_alpha_mismatch": 0.0,
        "seed": 7,
    },
}


def _merge(base: dict, override: dict, path: str = "") -> dict:
    out = copy.deepcopy(base)
    for key, val in override.items():
        where = f"{path}{key}"
        if key not in base:
            raise ConfigError(f"unknown config key {where!r}")
        if isinstance(base[key], dict) and isinstance(val, dict):
            out[key] = _merge(base[key], val, where + ".")
        else:
            out[key] = val
    return out


@dataclass(frozen=True)
class ExperimentSpec:
    kind: str
    grid: tuple
    n_trials: int
    master_seed: int
    scheme: str
    m_irs: int
    theta_star: float
    n_bs: int
    k_users: int
    attacked: int
    spacing: SpacingSpec
    large_scale: LargeScaleSpec
    powers: PowerSpec
    timing: Optional[TimingSpec]
    weights: Optional[tuple]
    placement_mode: str
    placement_ranges: PlacementRanges
    eve_ranges: PlacementRanges
    fixed_terminals: Optional[tuple]
    irs_arrival: Optional[AngleSpec]
    irs_departure: Optional[AngleSpec]
    optimizer: OptimizerConfig
    mu: float
    include_alpha_in_leakage: bool
    zeta: Optional[tuple]
    validation: dict
    raw: dict

    def with_overrides(self, **kw) -> "ExperimentSpec":
        """Re-resolve with experiment-level overrides (``seed``, ``trials``, ``scheme``)."""
        raw = copy.deepcopy(self.raw)
        mapping = {"seed": "master_seed", "trials": "n_trials", "scheme": "scheme", "kind": "kind"}
        for key, val in kw.items():
            if val is not None:
                raw["experiment"][mapping[key]] = val
        return from_dict(raw)


def _angle(d: Optional[dict], where: str) -> Optional[AngleSpec]:
    if d is None:
        return None
    try:
        return AngleSpec(float(d["azimuth_rad"]), float(d["elevation_rad"]))
    except KeyError as exc:
        raise ConfigError(f"{where} needs azimuth_rad and elevation_rad") from exc


def _terminal(d: dict) -> TerminalSpec:
    return TerminalSpec(
        direct=AngleSpec(float(d["direct_azimuth_rad"]), float(d["direct_elevation_rad"])),
        reflect=AngleSpec(float(d["reflect_azimuth_rad"]), float(d["reflect_elevation_rad"])),
        d_direct=float(d["d_direct_m"]),
        d_reflect=float(d["d_reflect_m"]),
    )


def from_dict(data: dict) -> ExperimentSpec:
    data = data or {}
    version = data.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema_version {version} (expected {SCHEMA_VERSION})")
    cfg = _merge(DEFAULTS, data)
    exp, sc, opt, obj = cfg["experiment"], cfg["scenario"], cfg["optimizer"], cfg["objective"]

    if exp["kind"] not in KINDS:
        raise ConfigError(f"experiment.kind must be one of {KINDS}, got {exp['kind']!r}")
    if exp["scheme"] not in SCHEMES:
        raise ConfigError(f"experiment.scheme must be one of {SCHEMES}")
    grid = tuple(exp["grid"])
    if exp["kind"] in ("fig1_sweep", "fig2_sweep") and not grid:
        raise ConfigError("experiment.grid must be non-empty")
    if int(exp["n_trials"]) < 1:
        raise ConfigError("experiment.n_trials must be >= 1")

    k = int(sc["k_users"])
    pw = sc["powers"]
    p_up = tuple(float(p) for p in (pw["p_uplink"] or [1.0] * k))
    timing = sc["timing"]
    if timing is not None:
        timing = TimingSpec(
            t_coherence=float(timing["t_coherence_symbols"]),
            tau_d=int(timing["tau_d_symbols"]),
            tau_c=int(timing["tau_c_symbols"]),
            tau_feedback=float(timing.get("tau_feedback_symbols", 0.0)),
        )
    pl = sc["placement"]
    if pl["mode"] not in ("random", "fixed"):
        raise ConfigError("scenario.placement.mode must be 'random' or 'fixed'")
    fixed = None
    if pl["mode"] == "fixed":
        if not pl["terminals"] or len(pl["terminals"]) != k + 1:
            raise ConfigError(f"fixed placement needs {k + 1} terminals (users then eavesdropper)")
        fixed = tuple(_terminal(t) for t in pl["terminals"])
    ls = sc["path_loss"]

    try:
        spec = ExperimentSpec(
            kind=exp["kind"],
            grid=grid,
            n_trials=int(exp["n_trials"]),
            master_seed=int(exp["master_seed"]),
            scheme=exp["scheme"],
            m_irs=int(exp["m_irs"]),
            theta_star=float(exp["theta_star"]),
            n_bs=int(sc["n_bs"]),
            k_users=k,
            attacked=int(sc["attacked_user"]),
            spacing=SpacingSpec(**sc["spacing"]),
            large_scale=LargeScaleSpec(
                beta0_db=float(ls["beta0_db"]),
                xi0_db=float(ls["xi0_db"]),
                alpha_d=float(ls["alpha_d"]),
                alpha_r=float(ls["alpha_r"]),
                d0=float(ls["d0_m"]),
            ),
            powers=PowerSpec(
                p_t=float(pw["p_t"]),
                p_uplink=p_up,
                p_eve=float(pw["p_eve"]),
                sigma2=float(pw["sigma2"]),
                rho2=float(pw["rho2"]),
            ),
            timing=timing,
            weights=None if sc["weights"] is None else tuple(float(w) for w in sc["weights"]),
            placement_mode=pl["mode"],
            placement_ranges=PlacementRanges(
                d_direct=tuple(pl["d_direct_range_m"]),
                d_reflect=tuple(pl["d_reflect_range_m"]),
                elevation=tuple(pl["elevation_range_rad"]),
            ),
            eve_ranges=PlacementRanges(
                d_direct=tuple(pl["eve_d_direct_range_m"] or pl["d_direct_range_m"]),
                d_reflect=tuple(pl["eve_d_reflect_range_m"] or pl["d_reflect_range_m"]),
                elevation=tuple(pl["elevation_range_rad"]),
            ),
            fixed_terminals=fixed,
            irs_arrival=_angle(pl["irs_arrival"], "irs_arrival"),
            irs_departure=_angle(pl["irs_departure"], "irs_departure"),
            optimizer=OptimizerConfig(
                eps_theta=float(opt["eps_theta"]),
                eps_c=float(opt["eps_c"]),
                max_outer_iters=int(opt["max_outer_iters"]),
                y_solver=YSolverConfig(
                    step0=float(opt["y_step0"]),
                    max_iters=int(opt["y_max_iters"]),
                    tol=float(opt["y_tol"]),
                ),
                theta_init=opt["theta_init"],
                seed=int(opt["theta_seed"]),
            ),
            mu=float(obj["mu"]),
            include_alpha_in_leakage=bool(obj["include_alpha_in_leakage"]),
            zeta=None if obj["zeta"] is None else tuple(complex(z) for z in obj["zeta"]),
            validation=cfg["validation"],
            raw=cfg,
        )
    except (TypeError, ValueError, KeyError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc
    if len(spec.powers.p_uplink) != k:
        raise ConfigError(f"scenario.powers.p_uplink needs {k} entries")
    if not 0 <= spec.attacked < k:
        raise ConfigError("scenario.attacked_user out of range")
    if spec.mu < 0:
        raise ConfigError("objective.mu must be non-negative")
    return spec


def load_config(path: Optional[str | Path] = None) -> ExperimentSpec:
    """Parse a YAML config file; ``None`` gives the defaults."""
    if path is None:
        return from_dict({})
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        data = yaml.safe_load(text) or {}
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: invalid YAML: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    return from_dict(data)


def to_jsonable(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, np.generic):
        return obj.item()
    return obj
