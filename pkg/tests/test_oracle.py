import itertools

import numpy as np
import pytest

from greedybandit import CapacityError, InfeasibleError
from greedybandit.model import Instance, Unit
from greedybandit.oracle import (
    brute_force_best,
    enumerate_sigma_k,
    greedy,
    min_reward_greedy_solution,
)
from greedybandit.rewards import make_reward_function, reward
from greedybandit.analysis import make_figure1_instance

from conftest import random_pmc_instance


def test_greedy_trace_fig1(fig1, fig1_fn):
    result = greedy(fig1, fig1_fn, fig1.means)
    assert result.action == (1, 0)
    assert result.step_values[0] == pytest.approx(0.5, abs=1e-12)
    assert result.step_values[1] == pytest.approx(0.892, abs=1e-12)
    assert result.value == pytest.approx(0.892, abs=1e-12)


def test_greedy_tie_break_lowest_id():
    # three identical singleton units: ties must go to the lowest id
    inst = Instance(
        units=(Unit(0, (0,)), Unit(1, (1,)), Unit(2, (2,))),
        action_size=2,
        means=np.array([0.5, 0.5, 0.5]),
        arm_right=np.array([0, 1, 2]),
    )
    fn = make_reward_function(inst)
    assert greedy(inst, fn, inst.means).action == (0, 1)


def test_greedy_infeasible():
    inst = Instance(
        units=(Unit(0, (0,)),),
        action_size=1,
        means=np.array([0.5]),
        arm_right=np.array([0]),
    )
    fn = make_reward_function(inst)
    with pytest.raises(InfeasibleError):
        enumerate_sigma_k(inst, fn, inst.means, 2)


def test_brute_force_fig1(fig1, fig1_fn):
    action, value = brute_force_best(fig1, fig1_fn, fig1.means)
    assert action == (0, 3)
    assert value == pytest.approx(0.97, abs=1e-12)


def test_brute_force_cap(fig1, fig1_fn):
    with pytest.raises(CapacityError):
        brute_force_best(fig1, fig1_fn, fig1.means, cap=3)


def test_greedy_matches_brute_force_on_easy_instances():
    # with a single selection greedy IS exhaustive search
    rng = np.random.default_rng(3)
    for _ in range(20):
        inst = random_pmc_instance(rng, action_size=1)
        fn = make_reward_function(inst)
        g = greedy(inst, fn, inst.means)
        action, value = brute_force_best(inst, fn, inst.means)
        assert g.value == pytest.approx(value, abs=1e-12)


def test_sigma_k_unique_case(fig1, fig1_fn):
    sols = enumerate_sigma_k(fig1, fig1_fn, fig1.means, 2, tolerance=0.0)
    assert sols == [(1, 0)]


def test_sigma_k_with_ties():
    inst = make_figure1_instance(0.0, allow_ties=True)
    fn = make_reward_function(inst)
    assert enumerate_sigma_k(inst, fn, inst.means, 1, tolerance=0.0) == [(1,), (2,)]
    sols = enumerate_sigma_k(inst, fn, inst.means, 2, tolerance=0.0)
    assert sols == [(1, 0), (2, 3)]


def test_sigma_k_matches_exhaustive_definition():
    # brute-force check of the reachable-prefix definition at each step
    inst = make_figure1_instance(0.0, allow_ties=True)
    fn = make_reward_function(inst)
    mu = inst.means
    step1 = {reward(fn, (u,), mu, inst): u for u in range(4)}
    best = max(step1)
    expected_first = sorted(u for u in range(4) if reward(fn, (u,), mu, inst) == best)
    got = sorted({s[0] for s in enumerate_sigma_k(inst, fn, mu, 1, tolerance=0.0)})
    assert got == expected_first


def test_sigma_k_cap():
    inst = Instance(
        units=tuple(Unit(i, (i,)) for i in range(6)),
        action_size=3,
        means=np.full(6, 0.5),
        arm_right=np.arange(6),
    )
    fn = make_reward_function(inst)
    with pytest.raises(CapacityError):
        enumerate_sigma_k(inst, fn, inst.means, 3, cap=10)


def test_min_reward_greedy_solution():
    inst = make_figure1_instance(0.0, allow_ties=True)
    fn = make_reward_function(inst)
    sols = [(1, 0), (2, 3)]
    pick = min_reward_greedy_solution(sols, fn, inst.means, inst)
    assert pick == (2, 3)
    # exhaustive check
    vals = {s: reward(fn, s, inst.means, inst) for s in sols}
    assert vals[pick] == min(vals.values())
    with pytest.raises(ValueError):
        min_reward_greedy_solution([], fn, inst.means, inst)


def test_min_reward_tie_goes_lexicographic(fig1, fig1_fn):
    # equal-reward candidates: lexicographically smallest wins
    pick = min_reward_greedy_solution([(1, 0), (0, 1)], fig1_fn, fig1.means, fig1)
    assert pick == (0, 1)
