import numpy as np
import pytest

from greedybandit import make_figure1_instance
from greedybandit.model import Instance, Unit
from greedybandit.rewards import make_reward_function


@pytest.fixture
def fig1():
    return make_figure1_instance(0.04)


@pytest.fixture
def fig1_fn(fig1):
    return make_reward_function(fig1)


def random_pmc_instance(rng, max_units=8, max_k=3, n=None, action_size=None):
    """Random bipartite coverage instance with uniform weights in [0, 1]."""
    n = int(n if n is not None else rng.integers(2, max_units + 1))
    sizes = rng.integers(1, 4, size=n)
    m = int(sizes.sum())
    n_right = int(rng.integers(1, 5))
    units = []
    start = 0
    for i in range(n):
        units.append(Unit(i, tuple(range(start, start + int(sizes[i])))))
        start += int(sizes[i])
    K = int(
        action_size
        if action_size is not None
        else rng.integers(1, min(n, max_k) + 1)
    )
    return Instance(
        units=tuple(units),
        action_size=K,
        means=rng.random(m),
        outcome_model="bernoulli",
        reward_kind="pmc",
        arm_right=rng.integers(0, n_right, size=m),
    )
