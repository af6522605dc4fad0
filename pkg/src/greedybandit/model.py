"""Problem instances, outcome generation, and semi-bandit feedback.

An instance consists of m base arms partitioned into units; an action is an
ordered sequence of K distinct units and playing it reveals the outcome of
every arm inside those units (semi-bandit feedback).

RNG draw order per round is fixed for reproducibility: environment outcomes
first (one draw per arm for stochastic models, none for the deterministic
model), then policy sampling, then the Bernoulli rounding used by the Beta
posterior update. Outcomes are drawn for *all* arms every round so the number
of consumed draws never depends on the selected action.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidActionError

OUTCOME_MODELS = ("deterministic", "bernoulli", "gaussian")
REWARD_KINDS = ("pmc", "linear")


@dataclass(frozen=True)
class Unit:
    """A group of base arms that is always selected together."""

    id: int
    arms: tuple[int, ...]
    name: str = ""

    def __post_init__(self):
        if len(self.arms) == 0:
            raise ValueError(f"unit {self.id} has no arms")
        if len(set(self.arms)) != len(self.arms):
            raise ValueError(f"unit {self.id} lists an arm twice")
        if not self.name:
            object.__setattr__(self, "name", f"s{self.id}")


@dataclass(frozen=True)
class Instance:
    """An immutable problem description.

    The units must partition the arm index range 0..m-1.  For the coverage
    reward ("pmc") each arm is an edge of a bipartite graph and `arm_right`
    maps it to its right-node index; the left node of every arm in a unit is
    the unit itself.
    """

    units: tuple[Unit, ...]
    action_size: int
    means: np.ndarray
    outcome_model: str = "bernoulli"
    reward_kind: str = "pmc"
    arm_right: np.ndarray | None = None
    right_names: tuple[str, ...] = ()
    name: str = "instance"

    def __post_init__(self):
        means = np.ascontiguousarray(np.asarray(self.means, dtype=np.float64))
        means.setflags(write=False)
        object.__setattr__(self, "means", means)
        m = means.shape[0]

        seen = np.zeros(m, dtype=bool)
        for unit in self.units:
            for a in unit.arms:
                if not 0 <= a < m:
                    raise ValueError(f"unit {unit.id} references arm {a} outside [0, {m})")
                if seen[a]:
                    raise ValueError(f"arm {a} appears in more than one unit")
                seen[a] = True
        if not seen.all():
            missing = np.flatnonzero(~seen).tolist()
            raise ValueError(f"arms {missing} belong to no unit")
        for idx, unit in enumerate(self.units):
            if unit.id != idx:
                raise ValueError("unit ids must be consecutive 0..n-1 in order")

        if not 1 <= self.action_size <= len(self.units):
            raise ValueError(
                f"action size {self.action_size} outside [1, {len(self.units)}]"
            )
        if means.min(initial=0.0) < 0.0 or means.max(initial=0.0) > 1.0:
            raise ValueError("every mean must lie in [0, 1]")
        if self.outcome_model not in OUTCOME_MODELS:
            raise ValueError(f"unknown outcome model {self.outcome_model!r}")
        if self.reward_kind not in REWARD_KINDS:
            raise ValueError(f"unknown reward kind {self.reward_kind!r}")

        if self.reward_kind == "pmc":
            if self.arm_right is None:
                raise ValueError("pmc reward requires arm_right edge targets")
            arm_right = np.ascontiguousarray(np.asarray(self.arm_right, dtype=np.int64))
            arm_right.setflags(write=False)
            object.__setattr__(self, "arm_right", arm_right)
            if arm_right.shape[0] != m:
                raise ValueError("arm_right must assign a right node to every arm")
            if arm_right.min(initial=0) < 0:
                raise ValueError("right-node indices must be non-negative")
            n_right = int(arm_right.max()) + 1 if m else 0
            if not self.right_names:
                object.__setattr__(
                    self, "right_names", tuple(f"v{v}" for v in range(n_right))
                )
        elif self.arm_right is not None:
            raise ValueError("linear reward takes no edge map")

    @property
    def arm_count(self) -> int:
        return int(self.means.shape[0])

    @property
    def unit_count(self) -> int:
        return len(self.units)

    @property
    def right_count(self) -> int:
        if self.arm_right is None:
            return 0
        return int(self.arm_right.max()) + 1 if self.arm_count else 0

    def unit_name(self, unit_id: int) -> str:
        return self.units[unit_id].name

    def unit_by_name(self, name: str) -> int:
        for unit in self.units:
            if unit.name == name:
                return unit.id
        raise KeyError(name)

    @property
    def arm_unit(self) -> np.ndarray:
        """Length-m map from arm index to owning unit id."""
        out = np.empty(self.arm_count, dtype=np.int64)
        for unit in self.units:
            for a in unit.arms:
                out[a] = unit.id
        return out

    # -- file format -------------------------------------------------------

    def to_dict(self) -> dict:
        doc = {
            "name": self.name,
            "arms": self.arm_count,
            "units": {u.name: list(u.arms) for u in self.units},
            "K": self.action_size,
            "means": [float(x) for x in self.means],
            "outcome_model": self.outcome_model,
            "reward_kind": self.reward_kind,
        }
        if self.reward_kind == "pmc":
            doc["edges"] = {
                str(a): [self.units[self.arm_unit[a]].name, self.right_names[v]]
                for a, v in enumerate(self.arm_right)
            }
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "Instance":
        units = tuple(
            Unit(id=i, arms=tuple(arms), name=name)
            for i, (name, arms) in enumerate(doc["units"].items())
        )
        arm_right = None
        right_names: tuple[str, ...] = ()
        if doc["reward_kind"] == "pmc":
            edges = doc["edges"]
            names: list[str] = []
            arm_right = np.empty(int(doc["arms"]), dtype=np.int64)
            for a in range(int(doc["arms"])):
                _, right = edges[str(a)]
                if right not in names:
                    names.append(right)
                arm_right[a] = names.index(right)
            right_names = tuple(names)
        return cls(
            units=units,
            action_size=int(doc["K"]),
            means=np.asarray(doc["means"], dtype=np.float64),
            outcome_model=doc["outcome_model"],
            reward_kind=doc["reward_kind"],
            arm_right=arm_right,
            right_names=right_names,
            name=doc.get("name", "instance"),
        )

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "Instance":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


@dataclass(frozen=True)
class Feedback:
    """Observed (arm, outcome) pairs for one round, in ascending arm order."""

    arms: np.ndarray
    values: np.ndarray

    def pairs(self) -> list[tuple[int, float]]:
        return [(int(a), float(x)) for a, x in zip(self.arms, self.values)]


def validate_action(action: Sequence[int], instance: Instance, require_full: bool = False):
    """Check an ordered unit sequence against an instance.

    The prefix of length k of an action records the first k greedy picks, so
    order matters and units may not repeat.
    """
    n = instance.unit_count
    for u in action:
        if not 0 <= int(u) < n:
            raise InvalidActionError(f"unknown unit id {u}")
    if len(set(action)) != len(action):
        raise InvalidActionError(f"action {tuple(action)} repeats a unit")
    if len(action) > instance.action_size:
        raise InvalidActionError(
            f"action length {len(action)} exceeds K={instance.action_size}"
        )
    if require_full and len(action) != instance.action_size:
        raise InvalidActionError(
            f"action length {len(action)} != K={instance.action_size}"
        )


def union_arms(action: Sequence[int], instance: Instance) -> set[int]:
    """Union of base arms over the action's units."""
    validate_action(action, instance)
    out: set[int] = set()
    for u in action:
        out.update(instance.units[int(u)].arms)
    return out


def draw_outcomes(instance: Instance, rng: np.random.Generator) -> np.ndarray:
    """Draw one outcome per arm according to the instance's outcome model.

    deterministic: the outcome is exactly the mean, no draws consumed;
    bernoulli: one uniform per arm, outcome in {0,1};
    gaussian: one unit-variance normal per arm centred at the mean.
    """
    mu = instance.means
    if instance.outcome_model == "deterministic":
        return mu.copy()
    if instance.outcome_model == "bernoulli":
        return (rng.random(mu.shape[0]) < mu).astype(np.float64)
    return mu + rng.standard_normal(mu.shape[0])


def observe(action: Sequence[int], outcomes: np.ndarray, instance: Instance) -> Feedback:
    """Semi-bandit feedback: outcomes of exactly the arms in the action's units."""
    validate_action(action, instance, require_full=True)
    arms = np.array(sorted(union_arms(action, instance)), dtype=np.int64)
    return Feedback(arms=arms, values=np.asarray(outcomes, dtype=np.float64)[arms])


def replication_rng(base_seed: int, replication: int) -> np.random.Generator:
    """Generator for replication j, derived deterministically from the base seed."""
    return np.random.default_rng(
        np.random.SeedSequence(entropy=base_seed, spawn_key=(replication,))
    )
