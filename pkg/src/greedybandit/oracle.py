"""Offline oracles: sequential greedy selection, exact brute force, and the
machinery for the case where greedy admits several solutions under ties."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import CapacityError, InfeasibleError
from .model import Instance
from .rewards import RewardFunction, reward

DEFAULT_ENUMERATION_CAP = 10**6


@dataclass(frozen=True)
class GreedyResult:
    """Ordered greedy solution plus the reward reached after each step."""

    action: tuple[int, ...]
    step_values: tuple[float, ...]

    @property
    def value(self) -> float:
        return self.step_values[-1] if self.step_values else 0.0


def greedy(
    instance: Instance,
    fn: RewardFunction,
    theta: np.ndarray,
    clamp_theta: bool = False,
) -> GreedyResult:
    """Select K units, each maximizing the reward of the extended prefix.

    Argmax comparison is strict `>` with no epsilon; exact ties go to the
    lowest unit id, which makes traces reproducible.
    """
    n = instance.unit_count
    K = instance.action_size
    if K > n:
        raise InfeasibleError(f"K={K} exceeds {n} units")
    chosen: list[int] = []
    values: list[float] = []
    for _ in range(K):
        best_u = -1
        best_val = -np.inf
        for u in range(n):
            if u in chosen:
                continue
            val = reward(fn, chosen + [u], theta, instance, clamp_theta)
            if val > best_val:
                best_val = val
                best_u = u
        chosen.append(best_u)
        values.append(best_val)
    return GreedyResult(action=tuple(chosen), step_values=tuple(values))


def brute_force_best(
    instance: Instance,
    fn: RewardFunction,
    theta: np.ndarray,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> tuple[tuple[int, ...], float]:
    """Exact optimum by enumerating all size-K unit subsets.

    Ties go to the lexicographically smallest subset.  Raises CapacityError
    when C(n, K) exceeds the cap.
    """
    n = instance.unit_count
    K = instance.action_size
    if K > n:
        raise InfeasibleError(f"K={K} exceeds {n} units")
    import math

    if math.comb(n, K) > cap:
        raise CapacityError(f"C({n},{K}) exceeds enumeration cap {cap}")
    best: tuple[int, ...] | None = None
    best_val = -np.inf
    for combo in itertools.combinations(range(n), K):
        val = reward(fn, combo, theta, instance)
        if val > best_val:
            best_val = val
            best = combo
    return best, float(best_val)


def enumerate_sigma_k(
    instance: Instance,
    fn: RewardFunction,
    theta: np.ndarray,
    k: int,
    tolerance: float = 1e-12,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> list[tuple[int, ...]]:
    """All length-k ordered actions reachable by greedy when argmax ties exist.

    Breadth-first expansion over greedy prefixes; at each step every unit
    whose extended-prefix reward is within `tolerance` of the step maximum is
    kept as a branch.  With tolerance 0 only exact float ties branch.
    """
    n = instance.unit_count
    if k > n:
        raise InfeasibleError(f"k={k} exceeds {n} units")
    frontier: list[tuple[int, ...]] = [()]
    for _ in range(k):
        nxt: list[tuple[int, ...]] = []
        for prefix in frontier:
            vals = {}
            for u in range(n):
                if u in prefix:
                    continue
                vals[u] = reward(fn, list(prefix) + [u], theta, instance)
            step_max = max(vals.values())
            for u in sorted(vals):
                if vals[u] >= step_max - tolerance:
                    nxt.append(prefix + (u,))
            if len(nxt) > cap:
                raise CapacityError(f"tie expansion exceeds cap {cap}")
        frontier = nxt
    return frontier


def min_reward_greedy_solution(
    solutions: Sequence[tuple[int, ...]],
    fn: RewardFunction,
    theta: np.ndarray,
    instance: Instance,
) -> tuple[int, ...]:
    """Worst-case convention: the reachable solution with minimum reward.

    Ties go to the lexicographically smallest action.
    """
    if not solutions:
        raise ValueError("empty solution set")
    best = None
    best_val = np.inf
    for action in sorted(solutions):
        val = reward(fn, action, theta, instance)
        if val < best_val:
            best_val = val
            best = action
    return tuple(best)
