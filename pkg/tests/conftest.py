import pytest

from mfneuron.model import BiasConfiguration, SigmoidParams
from mfneuron.presets import get_preset

NA = 1e-9


@pytest.fixture(scope="session")
def burster():
    return get_preset("burster")


@pytest.fixture(scope="session")
def tonic_spiker():
    return get_preset("tonic-spiker")


@pytest.fixture(scope="session")
def resting():
    return get_preset("resting")


@pytest.fixture
def zero_gain_cfg():
    """Both sigmoid gains zero: the model collapses to coupled linear
    filters. The slow time constants are made enormous so the fast
    equation is a pure leaky integrator over any test horizon."""
    return BiasConfiguration(
        tau_f=1e-3,
        tau_s=1e4,
        tau_u=1e5,
        g_f=1.0,
        g_s=1.0,
        g_u=1.0,
        sig_f=SigmoidParams(i_thr=1 * NA, i_lin=1 * NA, i_gain0=0.0),
        sig_s=SigmoidParams(i_thr=1 * NA, i_lin=1 * NA, i_gain0=0.0),
    )
