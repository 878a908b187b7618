import numpy as np
import pytest

from irssec.objective import AlignmentParams, ObjectiveSpec
from irssec.scenario import (
    LargeScaleGains,
    PowerSpec,
    ScenarioConfig,
    build_correlation_set,
    sample_terminals,
)


def make_scenario(rng, n_bs=8, m_irs=8, k_users=2, p_eve=0.5, attacked=0):
    return ScenarioConfig(
        n_bs=n_bs,
        m_irs=m_irs,
        terminals=sample_terminals(rng, k_users),
        attacked=attacked,
        powers=PowerSpec(p_uplink=(1.0,) * k_users, p_eve=p_eve),
    )


def make_objective(rng, m_irs=4, k_users=2, mu=1.0):
    sc = make_scenario(rng, m_irs=m_irs, k_users=k_users)
    gains = LargeScaleGains(beta=rng.uniform(0.2, 1.0, k_users + 1), xi=rng.uniform(0.2, 1.0, k_users + 1))
    params = AlignmentParams.from_statistics(build_correlation_set(sc), gains)
    zeta = rng.uniform(0.5, 2.0, k_users) * params.beta_tr[:k_users] * 2
    return ObjectiveSpec(zeta=zeta, mu=mu, attacked_index=0, alpha_e=sc.alpha_e), params


def crandn(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
