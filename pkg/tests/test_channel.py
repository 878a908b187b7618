import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from irssec.channel import (
    ChannelRealization,
    ChannelSampler,
    cascade_matrix,
    end_to_end,
    matrix_sqrt_psd,
    sample_realization,
)
from irssec.scenario import CorrelationSet, LargeScaleGains, build_exponential_correlation

from .conftest import crandn


def identity_stats(n, m, terminals=2, beta=1.0, xi=1.0):
    corr = CorrelationSet(
        t=np.stack([np.eye(n)] * terminals),
        t_irs=np.eye(n),
        r_irs=np.eye(m),
        v=np.stack([np.eye(m)] * terminals),
    )
    return corr, LargeScaleGains(beta=np.full(terminals, beta), xi=np.full(terminals, xi))


def test_sqrt_simple_cases():
    np.testing.assert_allclose(matrix_sqrt_psd(np.eye(3)), np.eye(3), atol=1e-14)
    np.testing.assert_allclose(matrix_sqrt_psd(np.diag([4.0, 1.0])), np.diag([2.0, 1.0]), atol=1e-14)


def test_sqrt_reconstructs_random_psd(rng):
    a = crandn(rng, 8, 8)
    m = a @ a.conj().T
    s = matrix_sqrt_psd(m)
    assert np.linalg.norm(s @ s - m) / np.linalg.norm(m) < 1e-8
    np.testing.assert_allclose(s, s.conj().T, atol=1e-12)


def test_sqrt_rank_one():
    t = build_exponential_correlation(8, np.exp(0.3j))
    s = matrix_sqrt_psd(t)
    np.testing.assert_allclose(s @ s, t, atol=1e-12)


def test_sqrt_rejects_bad_input():
    with pytest.raises(ValueError, match="Hermitian"):
        matrix_sqrt_psd(np.array([[1.0, 2.0], [0.0, 1.0]]))
    with pytest.raises(ValueError, match="PSD"):
        matrix_sqrt_psd(np.diag([1.0, -1.0]))


def test_zero_gain_gives_zero_channel(rng):
    corr, gains = identity_stats(4, 3)
    gains = LargeScaleGains(beta=np.array([0.0, 1.0]), xi=gains.xi)
    real = sample_realization(corr, gains, rng)
    assert np.all(real.h[0] == 0)
    assert np.any(real.h[1] != 0)


def test_identity_covariance(rng):
    corr, gains = identity_stats(4, 3)
    real = ChannelSampler.from_statistics(corr, gains).sample(rng, size=100_000)
    h = real.h[:, 0, :]
    cov = h.T @ h.conj() / len(h)
    assert np.max(np.abs(cov - np.eye(4))) < 0.05


def test_rank_one_draws_follow_steering_vector(rng):
    t = np.exp(0.9j)
    n = 8
    corr, gains = identity_stats(n, 2)
    corr = CorrelationSet(
        t=np.stack([build_exponential_correlation(n, t)] * 2), t_irs=corr.t_irs, r_irs=corr.r_irs, v=corr.v
    )
    steer = t ** np.arange(n)
    real = sample_realization(corr, gains, rng, size=20)
    for h in real.h[:, 0, :]:
        coef = np.vdot(steer, h) / np.vdot(steer, steer)
        assert np.linalg.norm(h - coef * steer) <= 1e-9 * np.linalg.norm(h)


def test_cascade_cases(rng):
    u = crandn(rng, 4, 5)
    np.testing.assert_array_equal(cascade_matrix(u, np.ones(5)), u)
    sel = cascade_matrix(u, np.eye(5)[2])
    assert np.count_nonzero(np.linalg.norm(sel, axis=0)) == 1
    np.testing.assert_array_equal(sel[:, 2], u[:, 2])
    a, theta = crandn(rng, 5), np.exp(1j * rng.uniform(0, 6, 5))
    oracle = np.array([sum(u[n, m] * a[m] * theta[m] for m in range(5)) for n in range(4)])
    np.testing.assert_allclose(cascade_matrix(u, a) @ theta, oracle, atol=1e-12)


def test_end_to_end_cases(rng):
    h, f = crandn(rng, 4), crandn(rng, 4, 3)
    np.testing.assert_array_equal(end_to_end(h, f, np.zeros(3)), h)
    np.testing.assert_allclose(end_to_end(h, f[:, :1], np.ones(1)), h + f[:, 0])
    theta = np.exp(1j * rng.uniform(0, 6, 3))
    loop = h.copy()
    for m in range(3):
        loop = loop + f[:, m] * theta[m]
    np.testing.assert_allclose(end_to_end(h, f, theta), loop, atol=1e-12)


def test_realization_methods_agree(rng):
    corr, gains = identity_stats(4, 3, terminals=3)
    real = sample_realization(corr, gains, rng, size=5)
    theta = np.exp(1j * rng.uniform(0, 6, 3))
    g_all = real.end_to_end(theta)
    for k in range(3):
        np.testing.assert_allclose(real.cascade()[:, k], real.cascade(k))
        np.testing.assert_allclose(g_all[:, k], real.end_to_end(theta, k), atol=1e-12)
    assert real.k_users == 2


def test_sampling_is_seeded():
    corr, gains = identity_stats(4, 3)
    a = sample_realization(corr, gains, np.random.default_rng(5), size=3)
    b = sample_realization(corr, gains, np.random.default_rng(5), size=3)
    assert isinstance(a, ChannelRealization)
    np.testing.assert_array_equal(a.h, b.h)
    np.testing.assert_array_equal(a.u, b.u)


@settings(max_examples=30, deadline=None)
@given(n=st.integers(1, 10), seed=st.integers(0, 2**31))
def test_sqrt_property(n, seed):
    r = np.random.default_rng(seed)
    a = crandn(r, n, max(1, n // 2))
    m = a @ a.conj().T
    s = matrix_sqrt_psd(m)
    assert np.linalg.norm(s @ s - m) <= 1e-8 * max(1.0, np.linalg.norm(m))
    assert np.linalg.eigvalsh(s).min() > -1e-8 * max(1.0, np.linalg.norm(m))
