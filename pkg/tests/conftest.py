import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from popcurve.series import NormalizedSeries


def norm(values) -> NormalizedSeries:
    """Wrap raw floats as a NormalizedSeries without re-scaling."""
    return NormalizedSeries(values=np.asarray(values, dtype=float))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
