"""Deterministic system parameters, spatial correlation and large-scale fading.

Terminals are stored as a stacked sequence: indices ``0..K-1`` are the
legitimate user terminals and the last entry (index ``EVE == -1``) is the
eavesdropper. Every per-terminal array in the package follows this layout.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

EVE = -1

_UNIT_TOL = 1e-12


@dataclass(frozen=True)
class AngleSpec:
    """Azimuth/elevation pair in radians."""

    azimuth: float
    elevation: float

    def __post_init__(self):
        if not (np.isfinite(self.azimuth) and np.isfinite(self.elevation)):
            raise ValueError(f"non-finite angle: {self}")


@dataclass(frozen=True)
class SpacingSpec:
    d_bs_over_lambda: float = 0.25
    d_irs_over_lambda: float = 0.5

    def __post_init__(self):
        if self.d_bs_over_lambda <= 0 or self.d_irs_over_lambda <= 0:
            raise ValueError("antenna spacings must be positive")


@dataclass(frozen=True)
class LargeScaleSpec:
    """Path-loss model constants shared by all terminals."""

    beta0_db: float = -10.0
    xi0_db: float = -13.0
    alpha_d: float = 3.6
    alpha_r: float = 2.1
    d0: float = 1.0

    def __post_init__(self):
        if self.alpha_d <= 0 or self.alpha_r <= 0:
            raise ValueError("path-loss exponents must be positive")
        if self.d0 <= 0:
            raise ValueError("reference distance must be positive")


@dataclass(frozen=True)
class PowerSpec:
    p_t: float = 1.0
    p_uplink: tuple = (1.0,)
    p_eve: float = 0.5
    sigma2: float = 0.1
    rho2: float = 0.1

    def __post_init__(self):
        vals = (self.p_t, self.p_eve, self.sigma2, self.rho2, *self.p_uplink)
        if any(v <= 0 for v in vals):
            raise ValueError("powers and noise variances must be positive")

    def alpha_e(self, attacked: int) -> float:
        return self.p_eve / self.p_uplink[attacked]


@dataclass(frozen=True)
class TimingSpec:
    """Coherence-block timing; ``tau = tau_d + M * tau_c``."""

    t_coherence: float
    tau_d: int
    tau_c: int
    tau_feedback: float = 0.0

    def tau(self, m_irs: int) -> int:
        return self.tau_d + m_irs * self.tau_c

    def prefactor(self, m_irs: int) -> float:
        pre = (self.t_coherence - self.tau(m_irs) - self.tau_feedback) / self.t_coherence
        if not 0.0 < pre <= 1.0:
            raise ValueError(
                f"coherence interval {self.t_coherence} too short for training "
                f"length {self.tau(m_irs)} plus feedback {self.tau_feedback}"
            )
        return pre


@dataclass(frozen=True)
class TerminalSpec:
    """Geometry of one terminal: mean arrival angles and path distances.

    ``direct`` is the average direction seen at the BS over the direct
    path, ``reflect`` the average direction seen at the IRS. ``d_reflect``
    is the total BS-IRS-terminal distance.
    """

    direct: AngleSpec
    reflect: AngleSpec
    d_direct: float
    d_reflect: float

    def __post_init__(self):
        if self.d_direct <= 0 or self.d_reflect <= 0:
            raise ValueError("terminal distances must be positive")


@dataclass(frozen=True)
class Dimensions:
    n_bs: int
    m_irs: int
    k_users: int
    attacked_index: int

    def __post_init__(self):
        if min(self.n_bs, self.m_irs, self.k_users) < 1:
            raise ValueError(f"all dimensions must be >= 1: {self}")
        if not 0 <= self.attacked_index < self.k_users:
            raise ValueError(
                f"attacked_index {self.attacked_index} outside [0, {self.k_users})"
            )


@dataclass(frozen=True)
class ScenarioConfig:
    """All deterministic parameters of one simulated deployment.

    ``terminals`` holds the K legitimate users followed by the eavesdropper.
    ``attacked`` is the zero-based index of the overheard user.
    """

    n_bs: int
    m_irs: int
    terminals: tuple
    attacked: int = 0
    irs_arrival: AngleSpec = AngleSpec(np.pi / 3, np.pi / 2)
    irs_departure: AngleSpec = AngleSpec(np.pi / 4, np.pi / 2)
    spacing: SpacingSpec = SpacingSpec()
    large_scale: LargeScaleSpec = LargeScaleSpec()
    powers: PowerSpec = PowerSpec()
    timing: Optional[TimingSpec] = None
    weights: Optional[tuple] = None

    def __post_init__(self):
        if len(self.terminals) < 2:
            raise ValueError("need at least one user plus the eavesdropper")
        dims = self.dims  # validates counts
        if len(self.powers.p_uplink) != dims.k_users:
            raise ValueError(
                f"{len(self.powers.p_uplink)} uplink powers for {dims.k_users} users"
            )
        if self.weights is not None and len(self.weights) != dims.k_users:
            raise ValueError("one priority weight per user required")
        if self.timing is not None:
            if self.timing.tau_d < dims.k_users or self.timing.tau_c < dims.k_users:
                raise ValueError("pilot sub-lengths must be at least K")
            self.timing.prefactor(self.m_irs)

    @property
    def k_users(self) -> int:
        return len(self.terminals) - 1

    @property
    def dims(self) -> Dimensions:
        return Dimensions(self.n_bs, self.m_irs, self.k_users, self.attacked)

    @property
    def alpha_e(self) -> float:
        return self.powers.alpha_e(self.attacked)

    @property
    def prefactor(self) -> float:
        if self.timing is None:
            return 1.0
        return self.timing.prefactor(self.m_irs)

    @property
    def user_weights(self) -> np.ndarray:
        if self.weights is None:
            return np.ones(self.k_users)
        return np.asarray(self.weights, dtype=float)


@dataclass(frozen=True)
class CorrelationSet:
    """Spatial correlation matrices; ``t`` and ``v`` are stacked per terminal."""

    t: np.ndarray  # (K+1, N, N)
    t_irs: np.ndarray  # (N, N)
    r_irs: np.ndarray  # (M, M)
    v: np.ndarray  # (K+1, M, M)


@dataclass(frozen=True)
class LargeScaleGains:
    beta: np.ndarray  # (K+1,) direct-path gains
    xi: np.ndarray  # (K+1,) reflect-path gains


def correlation_generator(spacing: float, angles: AngleSpec) -> complex:
    """Unit-modulus generator ``exp(j 2 pi d/lambda sin(az) sin(el))``."""
    if spacing <= 0:
        raise ValueError("spacing must be positive")
    phase = 2.0 * np.pi * spacing * np.sin(angles.azimuth) * np.sin(angles.elevation)
    return complex(np.exp(1j * phase))


def build_exponential_correlation(size: int, generator: complex) -> np.ndarray:
    """Exponential correlation matrix with entries ``generator**(n - n')``.

    The result is ``v v^H`` with ``v_n = generator**n``: Hermitian, unit
    diagonal and rank one.
    """
    if size < 1:
        raise ValueError("size must be >= 1")
    if abs(abs(generator) - 1.0) > _UNIT_TOL:
        raise ValueError(
            f"correlation generator must be unit-modulus, got |t| = {abs(generator)!r}"
        )
    # build from the phase so integer powers stay exactly unit-modulus
    phase = np.angle(generator)
    n = np.arange(size)
    return np.exp(1j * phase * (n[:, None] - n[None, :]))


def path_loss(reference_db: float, distance: float, d0: float, exponent: float) -> float:
    if distance <= 0 or d0 <= 0:
        raise ValueError(f"distances must be positive (distance={distance}, d0={d0})")
    return 10.0 ** (reference_db / 10.0) * (distance / d0) ** (-exponent)


def build_correlation_set(config: ScenarioConfig) -> CorrelationSet:
    sp = config.spacing
    n, m = config.n_bs, config.m_irs
    t = np.stack(
        [
            build_exponential_correlation(n, correlation_generator(sp.d_bs_over_lambda, term.direct))
            for term in config.terminals
        ]
    )
    v = np.stack(
        [
            build_exponential_correlation(m, correlation_generator(sp.d_irs_over_lambda, term.reflect))
            for term in config.terminals
        ]
    )
    t_irs = build_exponential_correlation(
        n, correlation_generator(sp.d_bs_over_lambda, config.irs_arrival)
    )
    r_irs = build_exponential_correlation(
        m, correlation_generator(sp.d_irs_over_lambda, config.irs_departure)
    )
    return CorrelationSet(t=t, t_irs=t_irs, r_irs=r_irs, v=v)


def build_large_scale(config: ScenarioConfig) -> LargeScaleGains:
    ls = config.large_scale
    beta = [path_loss(ls.beta0_db, term.d_direct, ls.d0, ls.alpha_d) for term in config.terminals]
    xi = [path_loss(ls.xi0_db, term.d_reflect, ls.d0, ls.alpha_r) for term in config.terminals]
    return LargeScaleGains(beta=np.array(beta), xi=np.array(xi))


@dataclass(frozen=True)
class PlacementRanges:
    """Sampling ranges for random terminal placement."""

    d_direct: tuple = (20.0, 40.0)
    d_reflect: tuple = (20.0, 40.0)
    elevation: tuple = (np.pi / 4, np.pi / 2)


def sample_terminal(rng: np.random.Generator, ranges: PlacementRanges = PlacementRanges()) -> TerminalSpec:
    """Draw a terminal with uniform azimuths, elevations and distances."""

    def angle():
        return AngleSpec(
            float(rng.uniform(0.0, 2.0 * np.pi)), float(rng.uniform(*ranges.elevation))
        )

    direct, reflect = angle(), angle()
    return TerminalSpec(
        direct=direct,
        reflect=reflect,
        d_direct=float(rng.uniform(*ranges.d_direct)),
        d_reflect=float(rng.uniform(*ranges.d_reflect)),
    )


def sample_terminals(
    rng: np.random.Generator, k_users: int, ranges: PlacementRanges = PlacementRanges()
) -> tuple:
    """K users followed by the eavesdropper, all randomly placed."""
    return tuple(sample_terminal(rng, ranges) for _ in range(k_users + 1))


def rotate_terminal(term: TerminalSpec, offset: float) -> TerminalSpec:
    """Shift both mean azimuths of ``term`` by ``offset`` radians."""
    return TerminalSpec(
        direct=AngleSpec(term.direct.azimuth + offset, term.direct.elevation),
        reflect=AngleSpec(term.reflect.azimuth + offset, term.reflect.elevation),
        d_direct=term.d_direct,
        d_reflect=term.d_reflect,
    )
