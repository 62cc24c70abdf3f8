import numpy as np
import pytest

from dibc.adversaries import HONEST_ASSIGNMENT
from dibc.behaviors import from_quantum
from dibc.quantum import ghz_state


@pytest.fixture(scope="session")
def ghz_table():
    """Honest GHZ boxes: input 0 measures sigma_y, input 1 measures sigma_x."""
    return from_quantum(ghz_state(), [HONEST_ASSIGNMENT] * 3)


class ReplayRNG:
    """Generator stand-in that replays a fixed sequence of uniforms.

    Lets per-trial engine runs consume exactly the uniforms fed to a batched
    kernel, so the two can be compared trial by trial.
    """

    def __init__(self, values):
        self._values = list(np.asarray(values, dtype=float).ravel())
        self._pos = 0

    def random(self, size=None):
        if size is not None:
            return np.array([self.random() for _ in range(int(size))])
        value = self._values[self._pos]
        self._pos += 1
        return value

    @property
    def consumed(self):
        return self._pos


@pytest.fixture
def replay_rng_factory():
    return ReplayRNG
