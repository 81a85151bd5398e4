import math

import numpy as np
import pytest

from glsdim import GLSScheme, Placement, make_family


@pytest.fixture(scope="session")
def luroth():
    return make_family("luroth")


@pytest.fixture(scope="session")
def geometric_half():
    return make_family("geometric", ratio=0.5)


@pytest.fixture(scope="session")
def golden():
    return make_family("golden")


@pytest.fixture(scope="session")
def loglog():
    return make_family("loglog")


@pytest.fixture(scope="session")
def thirds():
    return make_family("explicit", values=[1 / 3, 1 / 3, 1 / 3])


@pytest.fixture(scope="session")
def luroth_scheme(luroth):
    return GLSScheme(luroth)


@pytest.fixture(scope="session")
def geometric_scheme(geometric_half):
    return GLSScheme(geometric_half)


@pytest.fixture(scope="session")
def thirds_scheme(thirds):
    return GLSScheme(thirds)


def brute_tail_bracket(term, k, n_exact, tail_lo, tail_hi):
    """Exact partial sum of term(i) for k <= i < k+n_exact plus caller-supplied
    integral bracket for the remainder; returns (lo, hi)."""
    i = np.arange(k, k + n_exact, dtype=np.float64)
    s = float(term(i).sum())
    return s + tail_lo, s + tail_hi


GOLDEN_RATIO = (1.0 + math.sqrt(5.0)) / 2.0

# Closed form for the dimension of the geometric(1/2) family restricted away
# from digit 0: the power sum reduces to y^2 + y = 1 in y = 2^-x.
GEO_EXCL0_DIM = -math.log2((math.sqrt(5.0) - 1.0) / 2.0)
