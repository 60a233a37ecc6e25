import sys
from pathlib import Path

import pytest
from hypothesis import settings, strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from xyqfi import ChainParams, QuadratureConfig  # noqa: E402

settings.register_profile("default", max_examples=25, deadline=None)
settings.load_profile("default")

TIGHT = QuadratureConfig(abs_tol=1e-13, rel_tol=1e-12, max_subdivisions=5000)


def _away(lo, hi, holes, width):
    return st.floats(lo, hi).filter(lambda x: all(abs(x - h) > width for h in holes))


# parameter points kept clear of J = 0, J = +-1 and the gamma = 0 line
noncritical = st.builds(
    ChainParams,
    J=_away(-2.0, 2.0, (-1.0, 0.0, 1.0), 0.05),
    gamma=_away(-1.0, 1.0, (0.0,), 0.2),
    D=st.floats(0.0, 0.5),
)


@pytest.fixture
def tight():
    return TIGHT
