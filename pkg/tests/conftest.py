import numpy as np
import pytest

from dressedrabi.hilbert import SpaceDims
from dressedrabi.lindblad import RateFunctions
from dressedrabi.rabi import RabiParams


@pytest.fixture(scope="session")
def dims40():
    return SpaceDims(40)


def fig3_params() -> RabiParams:
    return RabiParams(omega=1.0, omega0=0.3, beta=0.1)


def fig3_rates(gamma_f_scale: float = 1.0) -> RateFunctions:
    """Damping set Gamma = 6 kappa = 3 gamma_f = 3 omega0 beta^2 / 5.

    kappa is the total cross-ladder rate gamma + 4 beta^2 Gamma, so the bare
    qubit rate is backed out of it.
    """
    p = fig3_params()
    big = 3.0 * p.omega0 * p.beta**2 / 5.0
    kappa = big / 6.0
    small = kappa - 4.0 * p.beta**2 * big
    return RateFunctions.flat(big, small, gamma_f=gamma_f_scale * big / 3.0)


def random_density(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Full-rank random state from a Ginibre matrix."""
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real
