"""Beamformer assembly, benchmark scheme and ergodic secrecy rates."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .channel import ChannelRealization
from .scenario import EVE, TimingSpec
from .training import EstimatedCsi


@dataclass(frozen=True)
class PrecoderDesign:
    """Beamformers ``w (..., K, N)`` and IRS phases ``theta (..., M)``."""

    w: np.ndarray
    theta: np.ndarray
    source: str = "proposed"


def _normalize(v: np.ndarray, p_t: float) -> np.ndarray:
    norm = np.linalg.norm(v, axis=-1, keepdims=True)
    if np.any(norm == 0):
        raise ValueError("degenerate design: zero expansion vector")
    return np.sqrt(p_t) * np.conj(v) / norm


def assemble_beamformer(est: EstimatedCsi, c_k: np.ndarray, p_t: float, k: int) -> np.ndarray:
    """``w_k = sqrt(P_T) conj(g_hat_k(c_k)) / ||g_hat_k(c_k)||``."""
    return _normalize(est.g_hat(c_k, k), p_t)


def proposed_design(est: EstimatedCsi, c: np.ndarray, theta: np.ndarray, p_t: float) -> PrecoderDesign:
    """Expansion beamformers for all users with a fixed IRS configuration."""
    return PrecoderDesign(w=_normalize(est.g_hat(c), p_t), theta=np.asarray(theta), source="proposed")


def random_phases(rng: np.random.Generator, m_irs: int, size: int | None = None) -> np.ndarray:
    shape = (m_irs,) if size is None else (size, m_irs)
    return np.exp(1j * rng.uniform(0.0, 2.0 * np.pi, shape))


def benchmark_design(
    est: EstimatedCsi, rng: np.random.Generator, p_t: float, theta: Optional[np.ndarray] = None
) -> PrecoderDesign:
    """Random IRS phases with conventional MRT over the estimated end-to-end channel.

    ``theta`` may be supplied to reuse phases already drawn from ``rng``.
    """
    m = est.f_hat.shape[-1]
    batch = est.h_hat.shape[:-2]
    if theta is None:
        theta = random_phases(rng, m, batch[0] if batch else None)
    th = np.asarray(theta)[..., None, :]
    g_hat = est.g_hat(th)
    return PrecoderDesign(w=_normalize(g_hat, p_t), theta=np.asarray(theta), source="benchmark")


def _gains(real: ChannelRealization, design: PrecoderDesign) -> np.ndarray:
    """Amplitudes ``A[..., i, j] = g_i(theta)^T w_j`` for every terminal ``i``."""
    g = real.end_to_end(design.theta)
    return np.einsum("...in,...jn->...ij", g, design.w)


def sinr(real: ChannelRealization, design: PrecoderDesign, k: int, sigma2: float) -> np.ndarray:
    amp = np.abs(_gains(real, design)[..., k, :]) ** 2
    signal = amp[..., k]
    interference = amp.sum(axis=-1) - signal
    return signal / (sigma2 + interference)


def esnr(real: ChannelRealization, design: PrecoderDesign, k: int, rho2: float) -> np.ndarray:
    g_e = real.end_to_end(design.theta, EVE)
    return np.abs(np.einsum("...n,...n->...", g_e, design.w[..., k, :])) ** 2 / rho2


def sinr_esnr(real: ChannelRealization, design: PrecoderDesign, sigma2: float, rho2: float):
    """SINR and ESNR of every user, shaped ``(..., K)``."""
    amp = np.abs(_gains(real, design)) ** 2
    k_users = design.w.shape[-2]
    users = amp[..., :k_users, :]
    signal = np.diagonal(users, axis1=-2, axis2=-1)
    interference = users.sum(axis=-1) - signal
    return signal / (sigma2 + interference), amp[..., EVE, :] / rho2


@dataclass(frozen=True)
class RateReport:
    sinr_samples: np.ndarray  # (n_trials, K)
    esnr_samples: np.ndarray
    rate: np.ndarray  # R_k
    leakage: np.ndarray  # R^e_k
    secrecy: np.ndarray  # R^sec_k
    weighted_sum: float
    prefactor: float
    n_trials: int

    @property
    def secrecy_stderr(self) -> np.ndarray:
        """Standard error of the unclamped secrecy-rate mean."""
        ratio = np.log2((1 + self.sinr_samples) / (1 + self.esnr_samples))
        if self.n_trials < 2:
            return np.full(ratio.shape[-1], np.nan)
        return self.prefactor * ratio.std(axis=0, ddof=1) / np.sqrt(self.n_trials)


def ergodic_rates(
    sinr_samples: np.ndarray,
    esnr_samples: np.ndarray,
    timing: Optional[TimingSpec] = None,
    weights: Optional[np.ndarray] = None,
    m_irs: int = 0,
    prefactor: Optional[float] = None,
) -> RateReport:
    """Ergodic rate, leakage and secrecy rate per user (log base 2).

    The ``[.]^+`` clamp is applied to the mean log-ratio, not per trial.
    """
    s = np.atleast_2d(np.asarray(sinr_samples, dtype=float))
    e = np.atleast_2d(np.asarray(esnr_samples, dtype=float))
    if s.shape != e.shape:
        raise ValueError("SINR and ESNR sample arrays must match")
    if s.shape[0] < 1:
        raise ValueError("need at least one trial")
    if prefactor is None:
        prefactor = 1.0 if timing is None else timing.prefactor(m_irs)
    rate = prefactor * np.mean(np.log2(1 + s), axis=0)
    leak = prefactor * np.mean(np.log2(1 + e), axis=0)
    sec = prefactor * np.maximum(0.0, np.mean(np.log2((1 + s) / (1 + e)), axis=0))
    w = np.ones(s.shape[1]) if weights is None else np.asarray(weights, dtype=float)
    return RateReport(
        sinr_samples=s,
        esnr_samples=e,
        rate=rate,
        leakage=leak,
        secrecy=sec,
        weighted_sum=float(w @ sec),
        prefactor=float(prefactor),
        n_trials=s.shape[0],
    )
