"""Statistical alignment functional and the regularized stochastic-SRZF cost.

For Rayleigh channels the expected alignment between terminal ``k`` and an
expansion beamformer is

    E_k(x, y) = beta_k Tr(T_k) + xi_k Tr(T_irs) Tr(R_irs diag(x) V_k diag(y)^H)

which is affine in ``x`` and in ``conj(y)``. Writing ``G_k = R_irs * V_k^T``
(elementwise) the trace term is ``conj(y)^T G_k x``.

The sampled quantity ``E[g_k(y)^T conj(g_hat_k(x))]`` equals the complex
conjugate of ``E_k(x, y)`` (select it with ``variant="conjugate"``). Only
moduli enter the cost, so with real targets both variants give the same
objective value.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .channel import ChannelSampler
from .scenario import EVE, CorrelationSet, LargeScaleGains
from .training import contaminated_estimates_analytic

TRACE = "trace"
CONJUGATE = "conjugate"
# variant reproduced by the Monte Carlo oracle
SAMPLED_VARIANT = CONJUGATE


@dataclass(frozen=True)
class AlignmentParams:
    """Per-terminal constants of ``E_k``; terminal axis is ``(K+1,)``, eavesdropper last."""

    beta_tr: np.ndarray
    xi_tr_scale: np.ndarray
    r_irs: np.ndarray
    v: np.ndarray
    kernel: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        # G_k[i, j] = R[i, j] V_k[j, i]
        kernel = self.r_irs[None, :, :] * np.swapaxes(self.v, -1, -2)
        object.__setattr__(self, "kernel", kernel)

    @classmethod
    def from_statistics(cls, corr: CorrelationSet, gains: LargeScaleGains) -> "AlignmentParams":
        tr_t = np.real(np.trace(corr.t, axis1=-2, axis2=-1))
        tr_irs = float(np.real(np.trace(corr.t_irs)))
        return cls(
            beta_tr=np.asarray(gains.beta) * tr_t,
            xi_tr_scale=np.asarray(gains.xi) * tr_irs,
            r_irs=corr.r_irs,
            v=corr.v,
        )

    @property
    def k_users(self) -> int:
        return len(self.beta_tr) - 1

    @property
    def m_irs(self) -> int:
        return self.r_irs.shape[0]


class Affine(NamedTuple):
    offset: complex
    coeffs: np.ndarray


def alignment_e(params: AlignmentParams, k: int, x: np.ndarray, y: np.ndarray, variant: str = TRACE) -> complex:
    value = params.beta_tr[k] + params.xi_tr_scale[k] * (np.conj(y) @ params.kernel[k] @ x)
    if variant == CONJUGATE:
        return complex(np.conj(value))
    if variant != TRACE:
        raise ValueError(f"unknown alignment variant {variant!r}")
    return complex(value)


def affine_coefficients_x(params: AlignmentParams, k: int, y: np.ndarray) -> Affine:
    """``E_k(x, y) = offset + coeffs @ x`` for fixed ``y``."""
    d = params.xi_tr_scale[k] * (np.conj(y) @ params.kernel[k])
    return Affine(complex(params.beta_tr[k]), d)


def affine_coefficients_y(params: AlignmentParams, k: int, x: np.ndarray) -> Affine:
    """``E_k(x, y) = offset + coeffs @ conj(y)`` for fixed ``x``."""
    e = params.xi_tr_scale[k] * (params.kernel[k] @ x)
    return Affine(complex(params.beta_tr[k]), e)


@dataclass(frozen=True)
class ObjectiveSpec:
    """Targets and regularization of ``F_mu``.

    ``leakage_scale`` multiplies the eavesdropper term on top of ``mu``;
    it is ``sqrt(alpha_e)`` when ``include_alpha_in_leakage`` is set.
    """

    zeta: np.ndarray
    mu: float = 1.0
    attacked_index: int = 0
    include_alpha_in_leakage: bool = False
    alpha_e: float = 1.0

    def __post_init__(self):
        if self.mu < 0:
            raise ValueError("regularizer mu must be non-negative")
        object.__setattr__(self, "zeta", np.asarray(self.zeta, dtype=complex))

    @property
    def leakage_weight(self) -> float:
        s = np.sqrt(self.alpha_e) if self.include_alpha_in_leakage else 1.0
        return self.mu * s


def default_targets(params: AlignmentParams, theta0: np.ndarray | None = None) -> np.ndarray:
    """Expected alignment of plain MRT under the IRS configuration ``theta0``.

    ``theta0=None`` means an unconfigured IRS (all-ones phases).
    """
    if theta0 is None:
        theta0 = np.ones(params.m_irs, dtype=complex)
    return np.array([alignment_e(params, k, theta0, theta0).real for k in range(params.k_users)], dtype=complex)


def f_mu(spec: ObjectiveSpec, params: AlignmentParams, x: np.ndarray, y: np.ndarray) -> float:
    """Regularized cost ``sum_k |E_k(x_k, y) - zeta_k| + mu |E_e(x_l, y)|``.

    ``x`` is ``(K, M)``: one expansion vector per user.
    """
    x = np.atleast_2d(x)
    total = 0.0
    for k in range(params.k_users):
        total += abs(alignment_e(params, k, x[k], y) - spec.zeta[k])
    total += spec.leakage_weight * abs(alignment_e(params, EVE, x[spec.attacked_index], y))
    return float(total)


class MCEstimate(NamedTuple):
    mean: complex
    stderr: float
    n_samples: int


def mc_expectation_oracle(
    sampler: ChannelSampler,
    x: np.ndarray,
    y: np.ndarray,
    alpha_e: float,
    attacked: int,
    observer: int,
    user: int,
    n_samples: int,
    rng: np.random.Generator,
    chunk: int = 10_000,
) -> MCEstimate:
    """Sample ``E[g_observer(y)^T conj(g_hat_user(x))]`` over fresh channels.

    ``g_hat`` is assembled from the contaminated estimates, so the attacked
    user's expansion carries the eavesdropper's channel.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    total = 0j
    sq = 0.0
    done = 0
    while done < n_samples:
        n = min(chunk, n_samples - done)
        real = sampler.sample(rng, size=n)
        est = contaminated_estimates_analytic(real, alpha_e, attacked)
        g_obs = real.end_to_end(y, observer)
        g_hat = est.g_hat(x, user)
        vals = np.sum(g_obs * np.conj(g_hat), axis=-1)
        total += vals.sum()
        sq += float(np.sum(np.abs(vals) ** 2))
        done += n
    mean = total / n_samples
    var = max(sq / n_samples - abs(mean) ** 2, 0.0) * n_samples / max(n_samples - 1, 1)
    return MCEstimate(complex(mean), float(np.sqrt(var / n_samples)), n_samples)
