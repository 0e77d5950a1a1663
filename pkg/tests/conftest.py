import numpy as np
import pytest

from iongeom.chain import TrapConfig, chain_modes
from iongeom.constants import MASS_BE9, RAMAN_WAVEVECTOR_BE9


def be9_trap(n_ions, fz=0.62e6, alpha=0.0):
    return TrapConfig(
        ion_count=n_ions,
        axial_com_frequency=fz,
        ion_mass=MASS_BE9,
        raman_wavevector=RAMAN_WAVEVECTOR_BE9,
        quartic_coefficient=alpha,
    )


@pytest.fixture(autouse=True)
def _quiet_lamb_dicke_warnings():
    # Low trap frequencies in sweeps push eta above 1; that warning is
    # expected and not under test here.
    import warnings

    with warnings.catch_warnings():
        warnings.filterwarnings("ignore", message="Lamb-Dicke parameter")
        yield


@pytest.fixture(scope="session")
def chain4():
    cfg = be9_trap(4)
    return (cfg, *chain_modes(cfg))


@pytest.fixture(scope="session")
def chain6():
    cfg = be9_trap(6)
    return (cfg, *chain_modes(cfg))


@pytest.fixture(scope="session")
def chain8():
    cfg = be9_trap(8)
    return (cfg, *chain_modes(cfg))


def rng(seed=0):
    return np.random.default_rng(seed)
