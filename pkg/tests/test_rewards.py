import itertools

import numpy as np
import pytest

from greedybandit import InvalidActionError
from greedybandit.rewards import (
    RewardFunction,
    make_reward_function,
    marginal_gain,
    reward,
    verify_lipschitz,
)
from greedybandit.model import Instance, Unit

from conftest import random_pmc_instance


def test_make_reward_function(fig1):
    fn = make_reward_function(fig1)
    assert fn.kind == "pmc"
    assert fn.n_right == 2
    assert fn.lipschitz_B == 1.0
    with pytest.raises(ValueError):
        RewardFunction(kind="pmc")
    with pytest.raises(ValueError):
        RewardFunction(kind="other")


def test_pmc_reward_by_hand(fig1, fig1_fn):
    mu = fig1.means
    # {u2}: v1 covered w.p. 0.2, v2 w.p. 0.3
    assert reward(fig1_fn, (1,), mu, fig1) == pytest.approx(0.5, abs=1e-15)
    # {u1, u2}: v1 1-(0.51*0.8), v2 0.3
    expect = (1 - 0.51 * 0.8) + 0.3
    assert reward(fig1_fn, (0, 1), mu, fig1) == pytest.approx(expect, abs=1e-15)
    # empty action
    assert reward(fig1_fn, (), mu, fig1) == 0.0


def test_reward_order_invariance(fig1, fig1_fn):
    mu = fig1.means
    for a, b in itertools.combinations(range(4), 2):
        assert reward(fig1_fn, (a, b), mu, fig1) == pytest.approx(
            reward(fig1_fn, (b, a), mu, fig1), abs=1e-15
        )


def test_linear_reward():
    inst = Instance(
        units=(Unit(0, (0, 1)), Unit(1, (2,))),
        action_size=2,
        means=np.array([0.5, 0.25, 0.125]),
        reward_kind="linear",
    )
    fn = make_reward_function(inst)
    assert reward(fn, (0,), inst.means, inst) == 0.75
    assert reward(fn, (0, 1), inst.means, inst) == 0.875


def test_reward_accepts_theta_outside_unit_interval(fig1, fig1_fn):
    theta = np.array([1.3, -0.2, 0.3, 0.3, 0.1, 0.5])
    raw = reward(fig1_fn, (0, 1), theta, fig1)
    # evaluated as-is: v1 survives (1-1.3)*(1-(-0.2)) = -0.36
    assert raw == pytest.approx((1 - (-0.3) * 1.2) + 0.3, abs=1e-15)
    clamped = reward(fig1_fn, (0, 1), theta, fig1, clamp_theta=True)
    assert clamped == pytest.approx(1.0 + 0.3, abs=1e-15)


def test_reward_validates_action(fig1, fig1_fn):
    with pytest.raises(InvalidActionError):
        reward(fig1_fn, (1, 1), fig1.means, fig1)


def test_marginal_gain(fig1, fig1_fn):
    mu = fig1.means
    gain = marginal_gain(fig1_fn, (1,), 0, mu, fig1)
    assert gain == pytest.approx(
        reward(fig1_fn, (1, 0), mu, fig1) - reward(fig1_fn, (1,), mu, fig1), abs=1e-15
    )
    with pytest.raises(InvalidActionError):
        marginal_gain(fig1_fn, (1,), 1, mu, fig1)


def test_lipschitz_property_random():
    rng = np.random.default_rng(42)
    for _ in range(50):
        inst = random_pmc_instance(rng)
        fn = make_reward_function(inst)
        theta = rng.random(inst.arm_count)
        other = rng.random(inst.arm_count)
        action = tuple(
            rng.choice(inst.unit_count, size=inst.action_size, replace=False)
        )
        assert verify_lipschitz(fn, action, theta, other, inst)
