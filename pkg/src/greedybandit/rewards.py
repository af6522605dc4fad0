"""Expected-reward functions over actions.

Two kinds are supported:

* "pmc": coverage on a weighted bipartite graph.  The value of an action is
  the expected number of right nodes influenced,
  sum_v (1 - prod_{edges (u,v), u selected} (1 - theta_edge)).
* "linear": the plain sum of theta over all arms of the selected units.

Both are 1-Lipschitz in each arm coordinate, so the Lipschitz constant is
hard-coded to B=1 rather than estimated.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InvalidActionError
from .model import Instance, validate_action


@dataclass(frozen=True)
class RewardFunction:
    kind: str
    arm_right: np.ndarray | None = None
    n_right: int = 0
    lipschitz_B: float = 1.0

    def __post_init__(self):
        if self.kind not in ("pmc", "linear"):
            raise ValueError(f"unknown reward kind {self.kind!r}")
        if self.kind == "pmc" and self.arm_right is None:
            raise ValueError("pmc reward requires edge targets")


def make_reward_function(instance: Instance) -> RewardFunction:
    """Build the reward function an instance declares."""
    if instance.reward_kind == "pmc":
        return RewardFunction(
            kind="pmc", arm_right=instance.arm_right, n_right=instance.right_count
        )
    return RewardFunction(kind="linear")


def reward(
    fn: RewardFunction,
    action: Sequence[int],
    theta: np.ndarray,
    instance: Instance,
    clamp_theta: bool = False,
) -> float:
    """Expected reward of an ordered action under parameter vector theta.

    The value is invariant to the order of units in the action.  Theta entries
    outside [0,1] (Gaussian posterior samples) are evaluated as-is unless
    `clamp_theta` is set.
    """
    validate_action(action, instance)
    theta = np.asarray(theta, dtype=np.float64)
    if clamp_theta:
        theta = np.clip(theta, 0.0, 1.0)
    if fn.kind == "linear":
        total = 0.0
        for u in action:
            for a in instance.units[int(u)].arms:
                total += float(theta[a])
        return total
    survive = np.ones(fn.n_right, dtype=np.float64)
    for u in action:
        for a in instance.units[int(u)].arms:
            v = int(fn.arm_right[a])
            survive[v] *= 1.0 - float(theta[a])
    return float(np.sum(1.0 - survive))


def marginal_gain(
    fn: RewardFunction,
    prefix: Sequence[int],
    unit: int,
    theta: np.ndarray,
    instance: Instance,
    clamp_theta: bool = False,
) -> float:
    """reward(prefix + [unit]) - reward(prefix)."""
    if int(unit) in [int(u) for u in prefix]:
        raise InvalidActionError(f"unit {unit} already in prefix {tuple(prefix)}")
    before = reward(fn, prefix, theta, instance, clamp_theta)
    after = reward(fn, list(prefix) + [int(unit)], theta, instance, clamp_theta)
    return after - before


def verify_lipschitz(
    fn: RewardFunction,
    action: Sequence[int],
    theta: np.ndarray,
    theta_other: np.ndarray,
    instance: Instance,
) -> bool:
    """True iff |r(S,theta) - r(S,theta')| <= B * sum_{i in union S} |theta_i - theta'_i|.

    Holds for every valid action and pair of vectors in [0,1]^m; used by
    randomized property tests.
    """
    diff = abs(
        reward(fn, action, theta, instance) - reward(fn, action, theta_other, instance)
    )
    bound = 0.0
    for u in action:
        for a in instance.units[int(u)].arms:
            bound += abs(float(theta[a]) - float(theta_other[a]))
    return diff <= fn.lipschitz_B * bound + 1e-12
