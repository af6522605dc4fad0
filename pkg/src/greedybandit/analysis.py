"""Closed-form gap analytics, exploration prices, regret-bound evaluation,
and the built-in hard bipartite instance."""

from __future__ import annotations

import io
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import CapacityError, MultipleSolutionsError
from .model import Instance, Unit, union_arms
from .oracle import (
    DEFAULT_ENUMERATION_CAP,
    brute_force_best,
    enumerate_sigma_k,
    greedy,
)
from .rewards import RewardFunction, make_reward_function, reward


@dataclass(frozen=True)
class GapReport:
    """All gap quantities of an instance under its true means.

    marginal_gaps[(s, k)] is the reward loss from substituting unit s for the
    k-th greedy pick given the first k-1 greedy picks; defined for every unit
    s outside the length-(k-1) greedy prefix, zero exactly for the pick
    itself.  action_gaps maps each unordered size-K action (sorted tuple) to
    its distance from the greedy solution's reward, floored at zero.
    """

    greedy_solution: tuple[int, ...]
    greedy_value: float
    step_values: tuple[float, ...]
    marginal_gaps: dict[tuple[int, int], float]
    action_gaps: dict[tuple[int, ...], float]
    unit_gap_min: dict[int, float]
    unit_gap_max: dict[int, float]
    delta_max: float
    unit_sizes: dict[int, int]
    union_size: int
    unit_names: tuple[str, ...]

    @property
    def K(self) -> int:
        return len(self.greedy_solution)

    def relevant_steps(self, unit: int) -> list[int]:
        """Steps k at which the unit sits outside the length-k greedy prefix."""
        return [
            k
            for k in range(1, self.K + 1)
            if unit not in self.greedy_solution[:k]
        ]

    def marginal_gaps_csv(self) -> str:
        buf = io.StringIO()
        buf.write("unit,k,gap\n")
        for (s, k), v in sorted(self.marginal_gaps.items()):
            buf.write(f"{self.unit_names[s]},{k},{v!r}\n")
        return buf.getvalue()

    def action_gaps_csv(self) -> str:
        buf = io.StringIO()
        buf.write("action,gap\n")
        for action, v in sorted(self.action_gaps.items()):
            name = "|".join(self.unit_names[u] for u in action)
            buf.write(f"{name},{v!r}\n")
        return buf.getvalue()

    def format_text(self) -> str:
        lines = [
            "greedy solution: ("
            + ", ".join(self.unit_names[u] for u in self.greedy_solution)
            + f")  value {self.greedy_value!r}",
            f"delta_max: {self.delta_max!r}",
            "marginal gaps:",
        ]
        for (s, k), v in sorted(self.marginal_gaps.items()):
            lines.append(f"  ({self.unit_names[s]}, k={k}): {v!r}")
        lines.append("unit gap ranges:")
        for s in sorted(self.unit_gap_min):
            lines.append(
                f"  {self.unit_names[s]}: min {self.unit_gap_min[s]!r}"
                f" max {self.unit_gap_max[s]!r}"
            )
        return "\n".join(lines) + "\n"


def compute_gaps(
    instance: Instance,
    fn: RewardFunction | None = None,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> GapReport:
    """Evaluate every gap quantity exactly via enumeration.

    Requires the greedy trajectory to be unique at tolerance 0; otherwise a
    MultipleSolutionsError carrying the reachable-solution set is raised and
    the caller may switch to the minimum-reward convention.
    """
    fn = fn or make_reward_function(instance)
    mu = instance.means
    K = instance.action_size
    n = instance.unit_count
    solutions = enumerate_sigma_k(instance, fn, mu, K, tolerance=0.0, cap=cap)
    if len(solutions) > 1:
        raise MultipleSolutionsError(
            f"greedy admits {len(solutions)} solutions under the true means",
            solutions,
        )
    result = greedy(instance, fn, mu)
    sg = result.action

    marginal: dict[tuple[int, int], float] = {}
    for k in range(1, K + 1):
        prefix = list(sg[: k - 1])
        value_k = result.step_values[k - 1]
        for s in range(n):
            if s in prefix:
                continue
            marginal[(s, k)] = value_k - reward(fn, prefix + [s], mu, instance)

    if math.comb(n, K) > cap:
        raise CapacityError(f"C({n},{K}) exceeds enumeration cap {cap}")
    action_gaps: dict[tuple[int, ...], float] = {}
    for combo in itertools.combinations(range(n), K):
        action_gaps[combo] = max(result.value - reward(fn, combo, mu, instance), 0.0)

    unit_min = {}
    unit_max = {}
    for s in range(n):
        vals = [g for a, g in action_gaps.items() if s in a]
        unit_min[s] = min(vals)
        unit_max[s] = max(vals)
    delta_max = max(action_gaps.values())

    return GapReport(
        greedy_solution=sg,
        greedy_value=result.value,
        step_values=result.step_values,
        marginal_gaps=marginal,
        action_gaps=action_gaps,
        unit_gap_min=unit_min,
        unit_gap_max=unit_max,
        delta_max=delta_max,
        unit_sizes={u.id: len(u.arms) for u in instance.units},
        union_size=len(union_arms(sg, instance)),
        unit_names=tuple(u.name for u in instance.units),
    )


def default_eps(report: GapReport, B: float = 1.0) -> float:
    """Largest admissible epsilon scaled by 0.9.

    The bound requires gap > 2*B*|union S_g|*eps at every relevant (unit,
    step); this picks 0.9 times the binding value.
    """
    s_g1 = report.greedy_solution[0]
    gaps = [
        report.marginal_gaps[(s, k)]
        for s in report.unit_sizes
        if s != s_g1
        for k in report.relevant_steps(s)
    ]
    return 0.9 * min(gaps) / (2.0 * B * report.union_size)


def exploration_price(
    report: GapReport,
    unit: int,
    horizon: int,
    B: float = 1.0,
    eps: float = 0.0,
    gaussian: bool = False,
) -> float:
    """Selection-count scale a suboptimal unit must incur:

        max_{k: s outside length-k prefix} c*B^2*|s|^2*ln T / (gap_{s,k} - 2B|union S_g|eps)^2

    with c=6 for the Beta-posterior bound and c=8 for the Gaussian variant.
    """
    steps = report.relevant_steps(unit)
    if not steps:
        raise ValueError(f"unit {unit} is the first greedy pick; no price defined")
    c = 8.0 if gaussian else 6.0
    size = report.unit_sizes[unit]
    shift = 2.0 * B * report.union_size * eps
    best = -np.inf
    for k in steps:
        gap = report.marginal_gaps[(unit, k)]
        if gap <= shift:
            raise ValueError(
                f"eps too large: gap {gap} at (unit {unit}, k={k}) "
                f"must exceed {shift}"
            )
        best = max(best, c * B * B * size * size * math.log(horizon) / (gap - shift) ** 2)
    return best


@dataclass(frozen=True)
class BoundReport:
    """Evaluated regret upper bound, leading log-T term separated from the
    additive terms whose universal constants the analysis leaves unspecified."""

    leading_term: float
    constant_term: float
    eps: float
    C: float
    C_prime: float

    @property
    def total(self) -> float:
        return self.leading_term + self.constant_term


def upper_bound_value(
    report: GapReport,
    instance: Instance,
    horizon: int,
    B: float = 1.0,
    eps: float | None = None,
    C: float = 1.0,
    C_prime: float = 1.0,
    gaussian: bool = False,
) -> BoundReport:
    """Evaluate the regret upper bound at the given horizon.

    Leading term: sum over units other than the first greedy pick of the
    exploration price times that unit's maximum action gap.  The additive
    terms use caller-supplied C, C' (default 1); they are reported separately
    because their true values are unspecified.
    """
    if eps is None:
        eps = default_eps(report, B)
    s_g1 = report.greedy_solution[0]
    leading = 0.0
    for s in report.unit_sizes:
        if s == s_g1 or not report.relevant_steps(s):
            continue
        leading += (
            exploration_price(report, s, horizon, B, eps, gaussian)
            * report.unit_gap_max[s]
        )
    if horizon <= 1:
        leading = 0.0

    const = 0.0
    for k, s in enumerate(report.greedy_solution, start=1):
        const += (C / eps**2) * (C_prime / eps**4) ** report.unit_sizes[s]
    const *= report.delta_max
    const += (
        report.union_size * (2.0 + 8.0 / eps**2) + 4.0 * instance.arm_count
    ) * report.delta_max
    return BoundReport(
        leading_term=leading, constant_term=const, eps=eps, C=C, C_prime=C_prime
    )


def greedy_regret(
    instance: Instance,
    fn: RewardFunction,
    baseline_value: float,
    action,
) -> float:
    """Per-round greedy regret max(baseline - r(action, mu), 0)."""
    return max(baseline_value - reward(fn, action, instance.means, instance), 0.0)


def make_figure1_instance(
    delta: float,
    outcome_model: str = "deterministic",
    allow_ties: bool = False,
) -> Instance:
    """The 4x2 bipartite coverage instance whose hardness scales as 1/delta^2.

    Four left nodes u1..u4, two right nodes v1, v2, six edges with weights
    (u1v1, u2v1, u2v2, u3v1, u3v2, u4v2) = (0.49, 0.2, 0.3, 0.3, 0.2-delta,
    0.48) and K=2.  Valid for 0 < delta <= 0.04; `allow_ties` additionally
    permits delta = 0, where u2 and u3 tie at the first greedy step.
    """
    lo_ok = delta > 0.0 or (allow_ties and delta == 0.0)
    if not (lo_ok and delta <= 0.04):
        raise ValueError(f"delta={delta} outside (0, 0.04]")
    units = (
        Unit(0, (0,), "u1"),
        Unit(1, (1, 2), "u2"),
        Unit(2, (3, 4), "u3"),
        Unit(3, (5,), "u4"),
    )
    means = np.array([0.49, 0.2, 0.3, 0.3, 0.2 - delta, 0.48])
    arm_right = np.array([0, 0, 1, 0, 1, 1], dtype=np.int64)
    return Instance(
        units=units,
        action_size=2,
        means=means,
        outcome_model=outcome_model,
        reward_kind="pmc",
        arm_right=arm_right,
        right_names=("v1", "v2"),
        name=f"figure1-d{delta:g}",
    )
