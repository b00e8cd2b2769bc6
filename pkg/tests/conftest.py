import numpy as np
import pytest

from thermrom import RomCoefficients


def draw_stable_coefficients(rng: np.random.Generator) -> RomCoefficients:
    """Random stable model drawn through its characteristic roots.

    Half the draws are overdamped (two real decay rates), half underdamped
    (a conjugate pair). Rates span moderate building-physics magnitudes so
    every sampled model is integrable by RK4 at 0.01 h substeps.
    """
    c1 = float(np.exp(rng.uniform(np.log(0.05), np.log(2.0))))
    if rng.random() < 0.5:
        lam1 = -float(np.exp(rng.uniform(np.log(0.02), np.log(2.0))))
        lam2 = -float(np.exp(rng.uniform(np.log(2.0), np.log(100.0))))
        c2 = -c1 * (lam1 + lam2)
        c3 = c1 * lam1 * lam2
    else:
        sigma = -float(np.exp(rng.uniform(np.log(0.05), np.log(3.0))))
        omega = float(np.exp(rng.uniform(np.log(0.05), np.log(3.0))))
        c2 = -2.0 * c1 * sigma
        c3 = c1 * (sigma * sigma + omega * omega)
    c4 = float(rng.uniform(-3.0, 3.0))
    return RomCoefficients(c1, c2, c3, c4)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
