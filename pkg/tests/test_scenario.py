import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from irssec.scenario import (
    AngleSpec,
    PowerSpec,
    ScenarioConfig,
    TerminalSpec,
    TimingSpec,
    build_correlation_set,
    build_exponential_correlation,
    build_large_scale,
    correlation_generator,
    path_loss,
    rotate_terminal,
)

from .conftest import make_scenario

angles = st.floats(-2 * np.pi, 2 * np.pi, allow_nan=False)


def test_single_element_correlation():
    assert np.array_equal(build_exponential_correlation(1, np.exp(0.7j)), [[1.0]])


def test_four_by_four_quarter_turn():
    t = build_exponential_correlation(4, 1j)
    n = np.arange(4)
    expected = 1j ** (n[:, None] - n[None, :]).astype(float)
    np.testing.assert_allclose(t, expected, atol=1e-14)
    assert np.trace(t).real == pytest.approx(4.0)
    np.testing.assert_allclose(np.linalg.eigvalsh(t), [0, 0, 0, 4], atol=1e-12)


def test_generator_values():
    assert correlation_generator(0.25, AngleSpec(0.0, 1.0)) == pytest.approx(1 + 0j)
    assert correlation_generator(0.25, AngleSpec(np.pi / 2, np.pi / 2)) == pytest.approx(1j)
    t = correlation_generator(0.5, AngleSpec(np.pi / 2, np.pi / 2))
    assert t == pytest.approx(-1 + 0j)


def test_bs_array_generator_at_broadside_quarter_wavelength():
    t = correlation_generator(0.25, AngleSpec(np.pi / 2, np.pi / 2))
    mat = build_exponential_correlation(8, t)
    assert mat.shape == (8, 8)
    assert mat[1, 0] == pytest.approx(1j)


def test_rejects_non_unit_generator():
    with pytest.raises(ValueError, match="unit-modulus"):
        build_exponential_correlation(4, 1.01)
    with pytest.raises(ValueError):
        correlation_generator(0.0, AngleSpec(0.1, 0.2))


def test_path_loss_values():
    assert path_loss(-10, 1, 1, 3.6) == pytest.approx(0.1)
    assert path_loss(0, 1, 1, 7.3) == pytest.approx(1.0)
    assert path_loss(-10, 10, 1, 3.6) == pytest.approx(2.512e-5, rel=1e-3)
    with pytest.raises(ValueError):
        path_loss(-10, 0, 1, 3.6)


@given(d=st.floats(0.1, 1e3), step=st.floats(0.01, 100), exponent=st.floats(0.5, 5))
def test_path_loss_decreasing(d, step, exponent):
    assert path_loss(-13, d + step, 1, exponent) < path_loss(-13, d, 1, exponent)


@given(size=st.integers(1, 16), phase=angles)
def test_correlation_is_hermitian_psd_rank_one(size, phase):
    t = build_exponential_correlation(size, np.exp(1j * phase))
    np.testing.assert_allclose(t, t.conj().T, atol=1e-12)
    np.testing.assert_allclose(np.diag(t), 1.0, atol=1e-12)
    w = np.linalg.eigvalsh(t)
    assert w.min() > -1e-9 * size
    assert w[-1] == pytest.approx(size)
    assert np.linalg.matrix_rank(t, tol=1e-8 * size) == 1


def test_zero_angles_give_all_ones():
    zero = AngleSpec(0.0, 0.0)
    term = TerminalSpec(zero, zero, 10.0, 20.0)
    sc = ScenarioConfig(n_bs=4, m_irs=6, terminals=(term, term), irs_arrival=zero, irs_departure=zero)
    corr = build_correlation_set(sc)
    for mat in (*corr.t, *corr.v, corr.t_irs, corr.r_irs):
        np.testing.assert_allclose(mat, np.ones_like(mat), atol=1e-14)


def test_aligned_eavesdropper_shares_correlations(rng):
    sc = make_scenario(rng, k_users=1)
    user = sc.terminals[0]
    same = ScenarioConfig(n_bs=8, m_irs=8, terminals=(user, rotate_terminal(user, 0.0)))
    corr = build_correlation_set(same)
    np.testing.assert_array_equal(corr.t[0], corr.t[-1])
    np.testing.assert_array_equal(corr.v[0], corr.v[-1])


def test_random_correlation_set_is_psd(rng):
    for _ in range(10):
        corr = build_correlation_set(make_scenario(rng, m_irs=16))
        for mat in (*corr.t, *corr.v, corr.t_irs, corr.r_irs):
            assert np.linalg.eigvalsh(mat).min() > -1e-9


def test_large_scale_gains(rng):
    sc = make_scenario(rng)
    gains = build_large_scale(sc)
    assert gains.beta.shape == gains.xi.shape == (3,)
    term = sc.terminals[1]
    assert gains.beta[1] == pytest.approx(path_loss(-10, term.d_direct, 1, 3.6))
    assert gains.xi[1] == pytest.approx(path_loss(-13, term.d_reflect, 1, 2.1))


def test_config_validation(rng):
    terms = make_scenario(rng, k_users=2).terminals
    with pytest.raises(ValueError):
        ScenarioConfig(n_bs=8, m_irs=8, terminals=terms, attacked=2, powers=PowerSpec(p_uplink=(1.0, 1.0)))
    with pytest.raises(ValueError):
        ScenarioConfig(n_bs=8, m_irs=8, terminals=terms)  # one uplink power for two users
    with pytest.raises(ValueError):
        ScenarioConfig(n_bs=8, m_irs=8, terminals=terms[:1])
    with pytest.raises(ValueError):
        TerminalSpec(AngleSpec(0, 0), AngleSpec(0, 0), -1.0, 1.0)
    with pytest.raises(ValueError):
        AngleSpec(float("nan"), 0.0)


def test_alpha_and_prefactor(rng):
    sc = make_scenario(rng, k_users=2, p_eve=0.25)
    assert sc.alpha_e == pytest.approx(0.25)
    assert sc.prefactor == 1.0
    timing = TimingSpec(t_coherence=1000, tau_d=2, tau_c=2, tau_feedback=10)
    assert timing.tau(8) == 18
    assert timing.prefactor(8) == pytest.approx((1000 - 18 - 10) / 1000)
    with pytest.raises(ValueError, match="too short"):
        TimingSpec(t_coherence=10, tau_d=2, tau_c=2).prefactor(8)
