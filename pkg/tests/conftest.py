import numpy as np
import pytest

from srmot import (DriveParams, SystemParams, load_constants,
                   rabi_from_saturation)


@pytest.fixture(scope="session")
def sr():
    return load_constants()


def make_params(sr, s12=1.3, d12_frac=-0.5, s34=2.1, d34=0.0, s56=25.0, d56=0.0,
                gamma_blue=190.0, gamma_grrd=2500.0, r_load=1.0e8):
    """Reference operating point of the balance measurements, overridable."""
    return SystemParams(
        constants=sr,
        blue=DriveParams(omega=rabi_from_saturation(s12, sr.gamma_12),
                         delta=d12_frac * sr.gamma_12),
        green=DriveParams(omega=rabi_from_saturation(s34, sr.gamma_34), delta=d34),
        red=DriveParams(omega=rabi_from_saturation(s56, sr.gamma_56), delta=d56),
        gamma_blue=gamma_blue, gamma_grrd=gamma_grrd, r_load=r_load)


@pytest.fixture()
def fig_params(sr):
    return make_params(sr)


def random_params(sr, rng, **kwargs):
    """Random drives on the fixed level structure."""
    s12, s34, s56 = rng.uniform(0.05, 30.0, 3)
    d12, d34, d56 = rng.uniform(-2.0, 2.0, 3) * np.array(
        [sr.gamma_12, sr.gamma_34, sr.gamma_56])
    return make_params(sr, s12=s12, d12_frac=d12 / sr.gamma_12, s34=s34, d34=d34,
                       s56=s56, d56=d56, **kwargs)
