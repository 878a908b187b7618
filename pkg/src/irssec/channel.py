"""Correlated Rayleigh channel sampling and cascaded/end-to-end channels."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .scenario import EVE, CorrelationSet, LargeScaleGains

_HERM_TOL = 1e-10
_EIG_TOL = 1e-9


def matrix_sqrt_psd(m: np.ndarray) -> np.ndarray:
    """Hermitian square root of a PSD matrix via eigendecomposition.

    Eigenvalues down to ``-1e-9`` (relative to the spectral scale) are
    clamped to zero so exactly singular matrices are accepted; so are
    positive eigenvalues at round-off level.
    """
    m = np.asarray(m)
    scale = max(1.0, float(np.max(np.abs(m))))
    if np.max(np.abs(m - m.conj().T)) > _HERM_TOL * scale:
        raise ValueError("matrix is not Hermitian")
    w, q = np.linalg.eigh(m)
    if w.min() < -_EIG_TOL * scale:
        raise ValueError(f"matrix is not PSD (min eigenvalue {w.min():.3e})")
    # round-off eigenvalues would otherwise become sqrt(eps)-sized noise
    w = np.where(w > len(w) * np.finfo(float).eps * max(w.max(), 0.0), w, 0.0)
    return (q * np.sqrt(w)) @ q.conj().T


def complex_normal(rng: np.random.Generator, shape) -> np.ndarray:
    """Circularly-symmetric CN(0, 1) samples."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


@dataclass(frozen=True)
class ChannelRealization:
    """One (or a batch of) channel draws.

    Arrays may carry leading batch dimensions; the trailing layout is
    ``h: (K+1, N)``, ``u: (N, M)`` and ``a: (K+1, M)``, eavesdropper last.
    """

    h: np.ndarray
    u: np.ndarray
    a: np.ndarray

    @property
    def k_users(self) -> int:
        return self.h.shape[-2] - 1

    def cascade(self, k: int | None = None) -> np.ndarray:
        """Cascaded channel ``F_k = U diag(a_k)``; all terminals if ``k`` is None."""
        if k is None:
            return self.u[..., None, :, :] * self.a[..., :, None, :]
        return cascade_matrix(self.u, self.a[..., k, :])

    def end_to_end(self, theta: np.ndarray, k: int | None = None) -> np.ndarray:
        if k is None:
            return self.h + np.einsum("...knm,...m->...kn", self.cascade(), theta)
        return end_to_end(self.h[..., k, :], self.cascade(k), theta)


def cascade_matrix(u: np.ndarray, a_k: np.ndarray) -> np.ndarray:
    """Scale column ``m`` of ``u`` by ``a_k[m]``."""
    return u * a_k[..., None, :]


def end_to_end(h_k: np.ndarray, f_k: np.ndarray, theta: np.ndarray) -> np.ndarray:
    """``g_k(theta) = h_k + F_k theta``."""
    return h_k + np.einsum("...nm,...m->...n", f_k, theta)


def _color(sqrt_cov: np.ndarray, white: np.ndarray) -> np.ndarray:
    return np.einsum("...ij,...j->...i", sqrt_cov, white)


@dataclass(frozen=True)
class ChannelSampler:
    """Precomputed square roots for repeated sampling from one scenario."""

    t_sqrt: np.ndarray
    t_irs_sqrt: np.ndarray
    r_irs_sqrt: np.ndarray
    v_sqrt: np.ndarray
    beta: np.ndarray
    xi: np.ndarray

    @classmethod
    def from_statistics(cls, corr: CorrelationSet, gains: LargeScaleGains) -> "ChannelSampler":
        return cls(
            t_sqrt=np.stack([matrix_sqrt_psd(t) for t in corr.t]),
            t_irs_sqrt=matrix_sqrt_psd(corr.t_irs),
            r_irs_sqrt=matrix_sqrt_psd(corr.r_irs),
            v_sqrt=np.stack([matrix_sqrt_psd(v) for v in corr.v]),
            beta=np.asarray(gains.beta, dtype=float),
            xi=np.asarray(gains.xi, dtype=float),
        )

    def sample(self, rng: np.random.Generator, size: int | None = None) -> ChannelRealization:
        batch = () if size is None else (size,)
        n_term, n = self.t_sqrt.shape[:2]
        m = self.r_irs_sqrt.shape[0]
        h0 = complex_normal(rng, batch + (n_term, n))
        u0 = complex_normal(rng, batch + (n, m))
        a0 = complex_normal(rng, batch + (n_term, m))
        h = np.sqrt(self.beta)[:, None] * _color(self.t_sqrt, h0)
        u = self.t_irs_sqrt @ u0 @ self.r_irs_sqrt
        a = np.sqrt(self.xi)[:, None] * _color(self.v_sqrt, a0)
        return ChannelRealization(h=h, u=u, a=a)


def sample_realization(
    corr: CorrelationSet,
    gains: LargeScaleGains,
    rng: np.random.Generator,
    size: int | None = None,
) -> ChannelRealization:
    """Draw correlated Rayleigh channels for every terminal.

    ``h_k = sqrt(beta_k) T_k^{1/2} h0``, ``U = T_irs^{1/2} U0 R_irs^{1/2}``
    and ``a_k = sqrt(xi_k) V_k^{1/2} a0`` with i.i.d. CN(0, 1) entries.
    Pass ``size`` to draw a batch along a new leading axis.
    """
    return ChannelSampler.from_statistics(corr, gains).sample(rng, size)


__all__ = [
    "EVE",
    "ChannelRealization",
    "ChannelSampler",
    "cascade_matrix",
    "complex_normal",
    "end_to_end",
    "matrix_sqrt_psd",
    "sample_realization",
]
