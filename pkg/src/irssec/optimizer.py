"""Alternating minimization of the stochastic-SRZF cost.

The expansion coefficients are solved exactly for a fixed phase vector
(the cost is a sum of moduli of affine maps). The phase vector is updated
on the relaxed set ``|y_m| <= 1`` by projected subgradient descent and then
projected radially onto the unit circle.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .objective import (
    AlignmentParams,
    ObjectiveSpec,
    affine_coefficients_x,
    affine_coefficients_y,
    f_mu,
)
from .scenario import EVE

log = logging.getLogger(__name__)

_RANK_TOL = 1e-10
_ZERO_TOL = 1e-300


@dataclass(frozen=True)
class YSolverConfig:
    step0: float = 0.5
    max_iters: int = 500
    tol: float = 1e-8


@dataclass(frozen=True)
class OptimizerConfig:
    """Stopping rule and initialization of the alternating loop.

    ``theta_init`` is one of ``"ones"``, ``"random"`` (uses ``seed``) or
    ``"aligned"`` (phases of the dominant eigenvector of the users'
    reflected-gain kernels).
    """

    eps_theta: float = 1e-6
    eps_c: float = 1e-6
    max_outer_iters: int = 50
    y_solver: YSolverConfig = YSolverConfig()
    theta_init: str = "ones"
    seed: int = 0

    def __post_init__(self):
        if self.eps_theta <= 0 or self.eps_c <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_outer_iters < 1 or self.y_solver.max_iters < 1:
            raise ValueError("iteration caps must be >= 1")
        if self.theta_init not in ("ones", "random", "aligned"):
            raise ValueError(f"unknown theta_init {self.theta_init!r}")


class XStep(NamedTuple):
    x: np.ndarray  # (K, M)
    value: float
    unreachable: tuple


@dataclass
class DesignResult:
    c: np.ndarray
    theta: np.ndarray
    objective: float
    objective_trace: list
    converged: bool
    iterations: int
    zero_at_init: bool
    history: list = field(default_factory=list)


def _min_norm_single(d: np.ndarray, target: complex) -> np.ndarray:
    return np.conj(d) * target / np.vdot(d, d).real


def _two_point(a1: complex, b1: complex, a2: complex, b2: complex, w: float) -> complex:
    """Minimize ``|a1 z - b1| + w |a2 z - b2|`` over complex scalar ``z``.

    Each term is a weighted distance to ``b/a``; the optimum sits at the
    point carrying the larger weight (the first on ties).
    """
    w1, w2 = abs(a1), w * abs(a2)
    if w1 <= _ZERO_TOL and w2 <= _ZERO_TOL:
        return 0j
    if w1 >= w2:
        return b1 / a1
    return b2 / a2


def solve_x_subproblem(spec: ObjectiveSpec, params: AlignmentParams, y: np.ndarray) -> XStep:
    """Minimum-norm minimizer of ``F_mu`` over all expansion vectors."""
    k_users, m = params.k_users, params.m_irs
    x = np.zeros((k_users, m), dtype=complex)
    unreachable = []
    ell = spec.attacked_index
    w = spec.leakage_weight

    for k in range(k_users):
        off, d = affine_coefficients_x(params, k, y)
        target = spec.zeta[k] - off
        if k == ell and w > 0:
            continue
        if np.vdot(d, d).real <= _ZERO_TOL:
            if abs(target) > 0:
                unreachable.append(k)
            continue
        x[k] = _min_norm_single(d, target)

    if w > 0:
        off1, d1 = affine_coefficients_x(params, ell, y)
        off2, d2 = affine_coefficients_x(params, EVE, y)
        a = np.vstack([d1, d2])
        b = np.array([spec.zeta[ell] - off1, -off2])
        sv = np.linalg.svd(a, compute_uv=False)
        if sv[0] <= _ZERO_TOL:
            if abs(b[0]) > 0:
                unreachable.append(ell)
        elif len(sv) > 1 and sv[1] > _RANK_TOL * sv[0]:
            x[ell] = np.linalg.lstsq(a, b, rcond=None)[0]
        else:
            # rank one: both rows share a direction; search along it
            lead = d1 if np.linalg.norm(d1) >= np.linalg.norm(d2) else d2
            u = np.conj(lead) / np.linalg.norm(lead)
            z = _two_point(d1 @ u, b[0], d2 @ u, b[1], w)
            x[ell] = z * u

    return XStep(x, f_mu(spec, params, x, y), tuple(unreachable))


def _y_terms(spec: ObjectiveSpec, params: AlignmentParams, x: np.ndarray):
    consts, rows, weights = [], [], []
    for k in range(params.k_users):
        off, e = affine_coefficients_y(params, k, x[k])
        consts.append(off - spec.zeta[k])
        rows.append(e)
        weights.append(1.0)
    off, e = affine_coefficients_y(params, EVE, x[spec.attacked_index])
    consts.append(off)
    rows.append(e)
    weights.append(spec.leakage_weight)
    return np.array(consts), np.array(rows), np.array(weights)


def _disk(z: np.ndarray) -> np.ndarray:
    mag = np.abs(z)
    return np.where(mag > 1.0, z / np.maximum(mag, 1.0), z)


def solve_y_subproblem(
    spec: ObjectiveSpec,
    params: AlignmentParams,
    x: np.ndarray,
    y_warm: np.ndarray,
    config: YSolverConfig = YSolverConfig(),
) -> np.ndarray:
    """Relaxed phase update over ``|y_m| <= 1`` by projected subgradient.

    Works in ``z = conj(y)`` where every term is affine. Returns the best
    iterate seen, so the result never scores worse than ``y_warm``.
    """
    consts, rows, weights = _y_terms(spec, params, np.atleast_2d(x))

    def cost(z):
        return float(weights @ np.abs(consts + rows @ z))

    z = _disk(np.conj(np.asarray(y_warm, dtype=complex)))
    best_z, best = z, cost(z)
    if best <= config.tol:
        return np.asarray(y_warm, dtype=complex)
    scale = config.step0 * np.sqrt(len(z))
    for it in range(1, config.max_iters + 1):
        r = consts + rows @ z
        mag = np.abs(r)
        active = mag > 0
        g = (weights[active] * r[active] / mag[active]) @ np.conj(rows[active])
        gnorm = np.linalg.norm(g)
        if gnorm == 0:
            break
        z = _disk(z - scale / np.sqrt(it) * g / gnorm)
        val = cost(z)
        if val < best:
            best, best_z = val, z
            if best <= config.tol:
                break
    return np.conj(best_z)


def project_unit_circle(y_hat: np.ndarray) -> np.ndarray:
    """Radial projection onto the unit circle; zero entries map to 1."""
    y_hat = np.asarray(y_hat, dtype=complex)
    mag = np.abs(y_hat)
    out = np.ones_like(y_hat)
    nz = mag > 0
    out[nz] = np.exp(1j * np.angle(y_hat[nz]))
    return out


def aligned_phases(params: AlignmentParams) -> np.ndarray:
    """Phases maximizing the users' summed expected reflected gain.

    ``y^H G y`` with ``G = sum_k xi_k Tr(T_irs) G_k`` is maximized on the
    unit circle by the dominant eigenvector's phases when ``G`` is rank one
    (the exponential model), and approximately otherwise.
    """
    g = np.tensordot(params.xi_tr_scale[: params.k_users], params.kernel[: params.k_users], axes=1)
    g = 0.5 * (g + g.conj().T)
    _, vecs = np.linalg.eigh(g)
    return project_unit_circle(vecs[:, -1])


def initial_theta(params: AlignmentParams, config: OptimizerConfig) -> np.ndarray:
    m = params.m_irs
    if config.theta_init == "ones":
        return np.ones(m, dtype=complex)
    if config.theta_init == "random":
        rng = np.random.default_rng(config.seed)
        return np.exp(1j * rng.uniform(0.0, 2.0 * np.pi, m))
    return aligned_phases(params)


def run_alternating(
    spec: ObjectiveSpec,
    params: AlignmentParams,
    config: OptimizerConfig = OptimizerConfig(),
    theta0: np.ndarray | None = None,
) -> DesignResult:
    """Alternate relaxed phase updates and exact coefficient updates.

    The loop runs while both the squared phase change and the squared
    Frobenius coefficient change stay above their tolerances. The iterate
    with the lowest post-projection cost is returned.
    """
    theta = initial_theta(params, config) if theta0 is None else np.asarray(theta0, dtype=complex)
    step = solve_x_subproblem(spec, params, theta)
    c = step.x
    history = [("init", step.value)]
    best = (step.value, c, theta)
    zero_at_init = step.value <= config.y_solver.tol
    trace = []
    converged = False
    iterations = 0

    for iterations in range(1, config.max_outer_iters + 1):
        y_hat = solve_y_subproblem(spec, params, c, theta, config.y_solver)
        relaxed = f_mu(spec, params, c, y_hat)
        trace.append(relaxed)
        history.append(("relaxed", relaxed))

        theta_new = project_unit_circle(y_hat)
        history.append(("projected", f_mu(spec, params, c, theta_new)))

        step = solve_x_subproblem(spec, params, theta_new)
        history.append(("x", step.value))
        if step.value < best[0]:
            best = (step.value, step.x, theta_new)

        d_theta = float(np.sum(np.abs(theta_new - theta) ** 2))
        d_c = float(np.sum(np.abs(step.x - c) ** 2))
        theta, c = theta_new, step.x
        if d_theta < config.eps_theta or d_c < config.eps_c:
            converged = True
            break

    if not converged:
        log.warning("alternating optimization hit max_outer_iters=%d", config.max_outer_iters)
    value, c_best, theta_best = best
    return DesignResult(
        c=c_best,
        theta=theta_best,
        objective=value,
        objective_trace=trace,
        converged=converged,
        iterations=iterations,
        zero_at_init=bool(zero_at_init),
        history=history,
    )
