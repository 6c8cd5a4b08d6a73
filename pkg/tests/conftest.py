import warnings

import numpy as np
import pytest

from hyplyap.errors import IntegerGamma, InvalidParams
from hyplyap.params import HGParams

warnings.filterwarnings("ignore", message="eigenvalue moduli")


def random_params(rng: np.random.Generator, n: int,
                  min_gap: float = 0.02, wall_margin: float = 0.02) -> HGParams:
    """Random parameter set with comfortable chamber margins."""
    for _ in range(1000):
        values = np.sort(rng.random(2 * n))
        gaps = np.diff(values)
        wrap = 1.0 - values[-1] + values[0]
        if gaps.size and (gaps.min() < min_gap or wrap < min_gap):
            continue
        idx = rng.permutation(2 * n)
        alpha = [float(values[i]) for i in idx[:n]]
        beta = [float(values[i]) for i in idx[n:]]
        gamma_frac = (sum(beta) - sum(alpha)) % 1.0
        if min(gamma_frac, 1.0 - gamma_frac) < wall_margin:
            continue
        try:
            return HGParams(alpha, beta)
        except (InvalidParams, IntegerGamma):
            continue
    raise RuntimeError("could not draw valid parameters")


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
