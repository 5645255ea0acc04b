"""Shared randomized-parameter draws for the property suites."""

import numpy as np
import pytest

from sevreg import Burr, CompositeLognormal, GlogM, Lognormal, Stoppa


def draw_tail(family, rng):
    """One valid tail-family instance; alpha > 1 where the composite needs it."""
    beta = float(np.exp(rng.uniform(np.log(0.05), np.log(20.0))))
    if family == "burr":
        return Burr(alpha=rng.uniform(1.2, 4.0), delta=rng.uniform(0.4, 3.0), beta=beta)
    if family == "stoppa":
        return Stoppa(alpha=rng.uniform(1.2, 4.0), delta=rng.uniform(0.4, 3.0), beta=beta)
    return GlogM(alpha=rng.uniform(0.25, 1.5), beta=beta)


def draw_head(rng):
    return Lognormal(mu=rng.uniform(-1.0, 2.0), sigma=rng.uniform(0.3, 2.0))


def draw_composite(family, rng):
    return CompositeLognormal(sigma=float(rng.uniform(0.4, 2.0)), tail=draw_tail(family, rng))


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)


FAMILIES = ("burr", "stoppa", "glogm")
