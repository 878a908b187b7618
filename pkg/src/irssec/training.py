"""Uplink pilot training under an active pilot attack.

The BS first estimates the direct channels from ``tau_d`` symbols with the
IRS off, then cycles through the IRS elements, switching on one element at
a time for ``tau_c`` symbols to estimate the per-element cascaded columns.
The eavesdropper replays the attacked user's public pilot, so the estimate
of that user absorbs ``sqrt(P_e / P_l)`` times the eavesdropper's channel.
Training is noise-free.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelRealization
from .scenario import EVE, PowerSpec


@dataclass(frozen=True)
class PilotBook:
    mu: np.ndarray  # (K, tau_d)
    omega: np.ndarray  # (K, M, tau_c)


@dataclass(frozen=True)
class TrainingBlocks:
    q_d: np.ndarray  # (..., N, tau_d)
    q_r: np.ndarray  # (..., M, N, tau_c), one block per IRS sub-frame


@dataclass(frozen=True)
class EstimatedCsi:
    """BS-side channel estimates for the K users.

    ``f_hat[..., k, :, m]`` is the estimate of the cascaded column
    ``f_{k,m}``, so ``f_hat[k]`` is the estimated ``F_k``.
    """

    h_hat: np.ndarray  # (..., K, N)
    f_hat: np.ndarray  # (..., K, N, M)
    attacked_index: int
    alpha_e: float

    def g_hat(self, coeffs: np.ndarray, k: int | None = None) -> np.ndarray:
        """Expansion ``h_hat_k + sum_m coeffs_m f_hat_{k,m}``.

        With ``k=None`` ``coeffs`` is ``(K, M)`` (one vector per user) or a
        single ``(M,)`` vector shared by every user.
        """
        if k is not None:
            return self.h_hat[..., k, :] + np.einsum("...nm,...m->...n", self.f_hat[..., k, :, :], coeffs)
        coeffs = np.broadcast_to(coeffs, self.h_hat.shape[:-2] + (self.h_hat.shape[-2], self.f_hat.shape[-1]))
        return self.h_hat + np.einsum("...knm,...km->...kn", self.f_hat, coeffs)


def _dft_rows(count: int, length: int) -> np.ndarray:
    n = np.arange(length)
    return np.exp(-2j * np.pi * np.outer(np.arange(count), n) / length)


def build_pilots(k_users: int, m_irs: int, tau_d: int, tau_c: int) -> PilotBook:
    """Orthogonal unit-modulus pilots from DFT rows.

    Every sequence has squared norm equal to its length, matching the
    ``1 / tau`` normalisation in the estimator.
    """
    if tau_d < k_users or tau_c < k_users:
        raise ValueError(f"pilot lengths (tau_d={tau_d}, tau_c={tau_c}) must be >= K={k_users}")
    mu = _dft_rows(k_users, tau_d)
    omega = np.repeat(_dft_rows(k_users, tau_c)[:, None, :], m_irs, axis=1)
    return PilotBook(mu=mu, omega=omega)


def simulate_uplink_training(
    real: ChannelRealization,
    pilots: PilotBook,
    powers: PowerSpec,
    attacked: int,
    attack_on: bool = True,
) -> TrainingBlocks:
    """Received pilot blocks for the direct phase and each IRS sub-frame.

    During sub-frame ``m`` only element ``m`` is active with unit gain, so
    terminal ``k`` is seen through ``h_k + f_{k,m}``.
    """
    k_users = real.k_users
    p = np.sqrt(np.asarray(powers.p_uplink, dtype=float))
    h_users = real.h[..., :k_users, :]
    q_d = np.einsum("k,...kn,kt->...nt", p, h_users, pilots.mu)

    f_all = real.cascade()  # (..., K+1, N, M)
    # reflected signal of terminal k in sub-frame m: h_k + f_{k,m}
    seen = real.h[..., :, :, None] + f_all  # (..., K+1, N, M)
    q_r = np.einsum("k,...knm,kmt->...mnt", p, seen[..., :k_users, :, :], pilots.omega)

    if attack_on:
        pe = np.sqrt(powers.p_eve)
        q_d = q_d + pe * np.einsum("...n,t->...nt", real.h[..., EVE, :], pilots.mu[attacked])
        q_r = q_r + pe * np.einsum("...nm,mt->...mnt", seen[..., EVE, :, :], pilots.omega[attacked])
    return TrainingBlocks(q_d=q_d, q_r=q_r)


def estimate_channels(
    blocks: TrainingBlocks, pilots: PilotBook, powers: PowerSpec, attacked: int
) -> EstimatedCsi:
    """Project the received blocks on the pilots and cancel the direct path."""
    p = np.sqrt(np.asarray(powers.p_uplink, dtype=float))
    tau_d = pilots.mu.shape[1]
    tau_c = pilots.omega.shape[2]
    h_hat = np.einsum("...nt,kt->...kn", blocks.q_d, pilots.mu.conj()) / (p[:, None] * tau_d)
    proj = np.einsum("...mnt,kmt->...knm", blocks.q_r, pilots.omega.conj()) / (
        p[:, None, None] * tau_c
    )
    f_hat = proj - h_hat[..., :, :, None]
    return EstimatedCsi(
        h_hat=h_hat, f_hat=f_hat, attacked_index=attacked, alpha_e=powers.alpha_e(attacked)
    )


def contaminated_estimates_analytic(
    real: ChannelRealization, alpha_e: float, attacked: int
) -> EstimatedCsi:
    """Closed-form estimates: exact for every user except ``attacked``,
    whose direct and cascaded estimates gain ``sqrt(alpha_e)`` times the
    eavesdropper's channels."""
    k_users = real.k_users
    f_all = real.cascade()
    h_hat = real.h[..., :k_users, :].copy()
    f_hat = f_all[..., :k_users, :, :].copy()
    s = np.sqrt(alpha_e)
    h_hat[..., attacked, :] += s * real.h[..., EVE, :]
    f_hat[..., attacked, :, :] += s * f_all[..., EVE, :, :]
    return EstimatedCsi(h_hat=h_hat, f_hat=f_hat, attacked_index=attacked, alpha_e=alpha_e)
