"""Online policies: Thompson sampling with Beta or Gaussian posteriors over
the greedy oracle, plus a CUCB-style index baseline for comparison runs.

These are the reference (readable) implementations of the per-round
operations.  The experiment harness runs the same logic through the compiled
kernel; a test pins the two against each other.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, InfeasibleError, UninitializedStateError
from .model import Feedback, Instance, draw_outcomes, observe
from .oracle import greedy
from .rewards import RewardFunction

POLICY_KINDS = ("cts-beta", "cts-gaussian", "cucb")


@dataclass
class BetaState:
    """Per-arm Beta(a, b) posterior counts, initialized to a=b=1."""

    a: np.ndarray
    b: np.ndarray

    @classmethod
    def fresh(cls, arm_count: int) -> "BetaState":
        return cls(
            a=np.ones(arm_count, dtype=np.int64), b=np.ones(arm_count, dtype=np.int64)
        )

    def update_count(self) -> int:
        return int(np.sum(self.a + self.b - 2))


@dataclass
class GaussianState:
    """Per-arm observation counts and running empirical means."""

    counts: np.ndarray
    emp_means: np.ndarray

    @classmethod
    def fresh(cls, arm_count: int) -> "GaussianState":
        return cls(
            counts=np.zeros(arm_count, dtype=np.int64),
            emp_means=np.zeros(arm_count, dtype=np.float64),
        )


@dataclass
class CucbState:
    """Counts/means like the Gaussian state plus the current round index."""

    counts: np.ndarray
    emp_means: np.ndarray
    round: int = 0

    @classmethod
    def fresh(cls, arm_count: int) -> "CucbState":
        return cls(
            counts=np.zeros(arm_count, dtype=np.int64),
            emp_means=np.zeros(arm_count, dtype=np.float64),
        )


def sample_theta_beta(state: BetaState, rng: np.random.Generator) -> np.ndarray:
    """One independent Beta(a_i, b_i) draw per arm."""
    return rng.beta(state.a.astype(np.float64), state.b.astype(np.float64))


def update_beta(state: BetaState, feedback: Feedback, rng: np.random.Generator) -> BetaState:
    """Round each observation to a Bernoulli pseudo-count and update in place.

    One uniform is consumed per observed arm even when the outcome is already
    0 or 1, so the draw count does not depend on the outcome model.
    """
    x = feedback.values
    if np.any(x < 0.0) or np.any(x > 1.0):
        raise DomainError(
            "Beta update requires outcomes in [0,1]; pair this policy with a "
            "deterministic or Bernoulli outcome model"
        )
    u = rng.random(len(feedback.arms))
    y = u < x
    np.add.at(state.a, feedback.arms[y], 1)
    np.add.at(state.b, feedback.arms[~y], 1)
    return state


def initialize_gaussian(
    instance: Instance,
    fn: RewardFunction,
    rng: np.random.Generator,
) -> tuple[GaussianState, list[tuple[int, ...]], list[Feedback]]:
    """Covering phase so every arm gets at least one observation.

    Deterministic schedule: walk units in id order; for each unit not yet
    played, play the action made of that unit plus the K-1 lowest-id other
    units.  Returns the state together with the played actions and feedback;
    the caller decides whether those rounds count toward regret.
    """
    n = instance.unit_count
    K = instance.action_size
    if K > n:
        raise InfeasibleError(f"K={K} exceeds {n} units")
    state = GaussianState.fresh(instance.arm_count)
    played = np.zeros(n, dtype=bool)
    actions: list[tuple[int, ...]] = []
    feedbacks: list[Feedback] = []
    for s in range(n):
        if played[s]:
            continue
        fill = [u for u in range(n) if u != s][: K - 1]
        action = tuple([s] + fill)
        outcomes = draw_outcomes(instance, rng)
        fb = observe(action, outcomes, instance)
        update_gaussian(state, fb)
        for u in action:
            played[u] = True
        actions.append(action)
        feedbacks.append(fb)
    return state, actions, feedbacks


def sample_theta_gaussian(state: GaussianState, rng: np.random.Generator) -> np.ndarray:
    """One N(emp_mean_i, 1/count_i) draw per arm; entries may leave [0,1]."""
    if np.any(state.counts < 1):
        raise UninitializedStateError("every arm needs an observation before sampling")
    return state.emp_means + rng.standard_normal(len(state.counts)) / np.sqrt(
        state.counts
    )


def update_gaussian(state: GaussianState | CucbState, feedback: Feedback):
    """Running-mean update: emp' = (emp*N + X)/(N+1), N' = N+1."""
    idx = feedback.arms
    state.emp_means[idx] = (
        state.emp_means[idx] * state.counts[idx] + feedback.values
    ) / (state.counts[idx] + 1)
    state.counts[idx] += 1
    return state


def cucb_indices(state: CucbState, round_index: int) -> np.ndarray:
    """Per-arm index emp_mean + sqrt(3 ln t / (2 N)), truncated to [0,1].

    Unobserved arms get index 1 so they are explored first.  The radius
    constant is a conventional baseline choice, not tuned.
    """
    out = np.ones(len(state.counts), dtype=np.float64)
    seen = state.counts > 0
    with np.errstate(divide="ignore"):
        radius = np.sqrt(3.0 * np.log(float(max(round_index, 1))) / (2.0 * state.counts))
    out[seen] = np.clip(state.emp_means[seen] + radius[seen], 0.0, 1.0)
    return out


def select_action(
    kind: str,
    state,
    instance: Instance,
    fn: RewardFunction,
    rng: np.random.Generator,
    clamp_theta: bool = False,
) -> tuple[int, ...]:
    """Sample (or compute) a parameter vector per the policy kind and run greedy."""
    if kind == "cts-beta":
        theta = sample_theta_beta(state, rng)
    elif kind == "cts-gaussian":
        theta = sample_theta_gaussian(state, rng)
    elif kind == "cucb":
        theta = cucb_indices(state, state.round + 1)
    else:
        raise ValueError(f"unknown policy kind {kind!r}")
    return greedy(instance, fn, theta, clamp_theta).action
