import numpy as np
import pytest

from wiretap_ldpc.channel import ChannelSetting
from wiretap_ldpc.degrees import DegreeDistribution
from wiretap_ldpc.secret import build_secret_code
from wiretap_ldpc.tanner import sample_graph

# Table I of the source study: the three optimized ensembles
TABLE1_RATE541 = dict(
    lam={2: 0.3013, 3: 0.1846, 4: 0.1510, 9: 0.0614, 10: 0.3017},
    rho={7: 0.3892, 8: 0.6054, 10: 0.0054},
)
TABLE1_RATE508 = dict(
    lam={2: 0.2762, 3: 0.2804, 10: 0.4434},
    rho={7: 0.6086, 8: 0.3914},
)
TABLE1_RATE505 = dict(
    lam={2: 0.2599, 3: 0.2837, 4: 0.0281, 10: 0.4283},
    rho={7: 0.6315, 8: 0.3532, 10: 0.0153},
)

SETTING_I = dict(max_snr_db=3.55, alpha_sq_db=-4.4)
SETTING_II = dict(max_snr_db=1.0, alpha_sq_db=-1.0)

# secret rate 0.33 -> puncture fraction
P_RS033 = 0.33 / 1.33


@pytest.fixture(scope="session")
def rate541():
    return DegreeDistribution(**TABLE1_RATE541)


@pytest.fixture(scope="session")
def rate508():
    return DegreeDistribution(**TABLE1_RATE508)


@pytest.fixture(scope="session")
def rate505():
    return DegreeDistribution(**TABLE1_RATE505)


@pytest.fixture(scope="session")
def setting_i():
    return ChannelSetting(**SETTING_I)


@pytest.fixture(scope="session")
def setting_ii():
    return ChannelSetting(**SETTING_II)


@pytest.fixture(scope="session")
def small_graph(rate541):
    """Table-I ensemble instance at desk-test size."""
    return sample_graph(rate541, 1200, seed=41)


@pytest.fixture(scope="session")
def small_code(small_graph):
    k = int(round(P_RS033 * small_graph.n_var))
    return build_secret_code(small_graph, k, seed=42)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240811)
