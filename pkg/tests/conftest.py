"""Shared fixtures: kernel warmup and schedule helpers."""

import numpy as np
import pytest

from cdqaoa import _kernels
from cdqaoa.model import Variant, AngleSchedule, params_per_step


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    """Compile jitted kernels once so individual tests stay fast."""
    _kernels.warmup()


@pytest.fixture
def rng():
    return np.random.default_rng(20260815)


def random_schedule(variant: Variant, p: int, rng: np.random.Generator,
                    scale: float = 1.0) -> AngleSchedule:
    m = params_per_step(variant)
    values = rng.uniform(-scale, scale, size=(p, m))
    return AngleSchedule(variant=variant, values=values)
