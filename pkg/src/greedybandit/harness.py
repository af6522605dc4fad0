"""Experiment runner: replicated simulations, regret traces, selection
counts, scaling studies, and CSV/JSON emission.

Replication j derives its generator from (base seed, j), so serial and
parallel execution of the same config produce identical traces and therefore
byte-identical CSV files.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field, replace

import numpy as np
from joblib import Parallel, delayed

from . import backend
from .analysis import (
    compute_gaps,
    greedy_regret,
    make_figure1_instance,
    upper_bound_value,
)
from .errors import CapacityError, MultipleSolutionsError
from .model import Instance, replication_rng
from .oracle import enumerate_sigma_k, greedy, min_reward_greedy_solution
from .policies import initialize_gaussian
from .rewards import make_reward_function, reward


@dataclass(frozen=True)
class ExperimentConfig:
    instance: str = "figure1"      # "figure1" or a path to an instance file
    delta: float = 0.04            # figure1 parameter, ignored for files
    policy: str = "cts-gaussian"   # "cts-beta" | "cts-gaussian" | "cucb"
    horizon: int = 10_000
    replications: int = 20
    seed: int = 0
    out_dir: str | None = None
    outcome_model: str | None = None   # override the instance's model
    include_init_rounds: bool = False  # count the covering phase in curves
    clamp_theta: bool = False
    jobs: int = 1
    checkpoints: int = 50
    full_trace: bool = False

    def __post_init__(self):
        if self.horizon < 1:
            raise ValueError("horizon must be >= 1")
        if self.replications < 1:
            raise ValueError("replications must be >= 1")


@dataclass
class RegretTrace:
    """Everything recorded for one replication."""

    actions: np.ndarray        # (T, K) unit ids in pick order
    inst_regret: np.ndarray    # (T,)
    init_actions: list         # covering-phase actions (Gaussian policy only)
    init_regret: np.ndarray
    baseline_value: float
    baseline_action: tuple
    unit_count: int

    @property
    def horizon(self) -> int:
        return int(self.inst_regret.shape[0])

    def cumulative_regret(self, include_init: bool = False) -> np.ndarray:
        reg = self.inst_regret
        if include_init and len(self.init_regret):
            reg = np.concatenate([self.init_regret, reg])
        return np.cumsum(reg)

    @property
    def unit_selection_counts(self) -> np.ndarray:
        """N_{T+1,s}: per-unit selection counts over the main rounds."""
        return np.bincount(self.actions.ravel(), minlength=self.unit_count)

    def arm_observation_counts(self, instance: Instance) -> np.ndarray:
        counts = self.unit_selection_counts
        out = np.zeros(instance.arm_count, dtype=np.int64)
        for unit in instance.units:
            for a in unit.arms:
                out[a] += counts[unit.id]
        return out


def resolve_instance(config: ExperimentConfig) -> Instance:
    if config.instance == "figure1":
        inst = make_figure1_instance(config.delta)
    else:
        inst = Instance.load(config.instance)
    if config.outcome_model and config.outcome_model != inst.outcome_model:
        inst = replace(inst, outcome_model=config.outcome_model)
    return inst


def baseline_solution(instance: Instance, fn=None) -> tuple[tuple[int, ...], float, bool]:
    """Greedy solution under the true means used as the regret baseline.

    Returns (action, value, used_min_reward_convention).  When the greedy
    trajectory is not unique the worst reachable solution is used.
    """
    fn = fn or make_reward_function(instance)
    try:
        solutions = enumerate_sigma_k(
            instance, fn, instance.means, instance.action_size, tolerance=0.0
        )
    except CapacityError:
        solutions = []
    if len(solutions) > 1:
        action = min_reward_greedy_solution(solutions, fn, instance.means, instance)
        return action, reward(fn, action, instance.means, instance), True
    result = greedy(instance, fn, instance.means)
    return result.action, result.value, False


def run_replication(config: ExperimentConfig, replication_index: int) -> RegretTrace:
    """Full interaction loop for one replication, deterministic in (config, index)."""
    instance = resolve_instance(config)
    fn = make_reward_function(instance)
    base_action, base_value, _ = baseline_solution(instance, fn)
    rng = replication_rng(config.seed, replication_index)
    lowered = backend.lower_instance(instance)
    m = instance.arm_count

    init_actions: list = []
    init_regret = np.zeros(0, dtype=np.float64)
    kwargs: dict = {}
    if config.policy == "cts-beta":
        if instance.outcome_model == "gaussian":
            raise ValueError(
                "the Beta-posterior policy requires outcomes in [0,1]; "
                "use cts-gaussian for Gaussian outcome models"
            )
        kwargs["beta_a"] = np.ones(m, dtype=np.float64)
        kwargs["beta_b"] = np.ones(m, dtype=np.float64)
    elif config.policy == "cts-gaussian":
        state, init_actions, _ = initialize_gaussian(instance, fn, rng)
        init_regret = np.array(
            [greedy_regret(instance, fn, base_value, a) for a in init_actions]
        )
        kwargs["counts"] = state.counts
        kwargs["emp_means"] = state.emp_means
    elif config.policy == "cucb":
        kwargs["counts"] = np.zeros(m, dtype=np.int64)
        kwargs["emp_means"] = np.zeros(m, dtype=np.float64)
    else:
        raise ValueError(f"unknown policy {config.policy!r}")

    actions, inst_regret = backend.simulate(
        lowered,
        config.policy,
        config.horizon,
        rng,
        base_value,
        clamp_theta=config.clamp_theta,
        **kwargs,
    )
    return RegretTrace(
        actions=actions,
        inst_regret=inst_regret,
        init_actions=init_actions,
        init_regret=init_regret,
        baseline_value=base_value,
        baseline_action=base_action,
        unit_count=instance.unit_count,
    )


def checkpoint_rounds(horizon: int, count: int) -> np.ndarray:
    """`count` log-spaced round indices in [1, horizon], deduplicated."""
    pts = np.unique(
        np.round(np.logspace(0.0, math.log10(horizon), count)).astype(np.int64)
    )
    return np.clip(pts, 1, horizon)


def _fmt(x) -> str:
    return repr(float(x))


def _trace_csv(trace: RegretTrace, instance: Instance, rounds: np.ndarray) -> str:
    cum = trace.cumulative_regret()
    lines = ["t,action,inst_regret,cum_regret"]
    for t in rounds:
        name = "|".join(instance.unit_name(int(u)) for u in trace.actions[t - 1])
        lines.append(
            f"{int(t)},{name},{_fmt(trace.inst_regret[t - 1])},{_fmt(cum[t - 1])}"
        )
    return "\n".join(lines) + "\n"


def _experiment_dir(config: ExperimentConfig) -> str:
    if config.instance == "figure1":
        tag = f"{config.delta:g}"
    else:
        tag = os.path.splitext(os.path.basename(config.instance))[0]
    return os.path.join(config.out_dir or ".", config.policy, tag)


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    traces: list[RegretTrace]
    rounds: np.ndarray
    mean_cum_regret: np.ndarray   # over checkpoints
    std_cum_regret: np.ndarray
    mean_unit_counts: np.ndarray
    out_dir: str | None = None

    @property
    def mean_terminal_regret(self) -> float:
        return float(self.mean_cum_regret[-1])

    @property
    def std_terminal_regret(self) -> float:
        return float(self.std_cum_regret[-1])


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    """Run all replications (optionally in parallel) and optionally write CSVs.

    Output layout under out_dir: <policy>/<delta>/rep<j>.csv per replication,
    plus aggregate.csv (checkpoint mean/std of cumulative regret),
    unit_counts.csv, and summary.json.
    """
    instance = resolve_instance(config)
    R = config.replications
    if config.jobs != 1:
        traces = Parallel(n_jobs=config.jobs)(
            delayed(run_replication)(config, j) for j in range(R)
        )
    else:
        traces = [run_replication(config, j) for j in range(R)]

    include_init = config.include_init_rounds
    horizon = config.horizon
    if include_init and traces[0].init_actions:
        horizon += len(traces[0].init_actions)
    rounds = (
        np.arange(1, horizon + 1)
        if config.full_trace
        else checkpoint_rounds(horizon, config.checkpoints)
    )
    cums = np.stack([tr.cumulative_regret(include_init) for tr in traces])
    mean_cum = cums[:, rounds - 1].mean(axis=0)
    std_cum = (
        cums[:, rounds - 1].std(axis=0, ddof=1) if R > 1 else np.zeros(len(rounds))
    )
    mean_counts = np.stack([tr.unit_selection_counts for tr in traces]).mean(axis=0)

    result = ExperimentResult(
        config=config,
        traces=traces,
        rounds=rounds,
        mean_cum_regret=mean_cum,
        std_cum_regret=std_cum,
        mean_unit_counts=mean_counts,
    )
    if config.out_dir:
        result.out_dir = _write_experiment(result, instance)
    return result


def _write_experiment(result: ExperimentResult, instance: Instance) -> str:
    config = result.config
    exp_dir = _experiment_dir(config)
    os.makedirs(exp_dir, exist_ok=True)

    trace_rounds = (
        np.arange(1, config.horizon + 1)
        if config.full_trace
        else checkpoint_rounds(config.horizon, config.checkpoints)
    )
    for j, trace in enumerate(result.traces):
        with open(os.path.join(exp_dir, f"rep{j}.csv"), "w") as fh:
            fh.write(_trace_csv(trace, instance, trace_rounds))

    with open(os.path.join(exp_dir, "aggregate.csv"), "w") as fh:
        fh.write("t,mean_cum_regret,std_cum_regret\n")
        for i, t in enumerate(result.rounds):
            fh.write(
                f"{int(t)},{_fmt(result.mean_cum_regret[i])},"
                f"{_fmt(result.std_cum_regret[i])}\n"
            )

    with open(os.path.join(exp_dir, "unit_counts.csv"), "w") as fh:
        fh.write("unit,mean_count\n")
        for u in range(instance.unit_count):
            fh.write(f"{instance.unit_name(u)},{_fmt(result.mean_unit_counts[u])}\n")

    summary = _summary(result, instance)
    with open(os.path.join(exp_dir, "summary.json"), "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return exp_dir


def _summary(result: ExperimentResult, instance: Instance) -> dict:
    config = result.config
    trace = result.traces[0]
    summary = {
        "config": {
            "instance": config.instance,
            "delta": config.delta,
            "policy": config.policy,
            "horizon": config.horizon,
            "replications": config.replications,
            "seed": config.seed,
            "outcome_model": instance.outcome_model,
            "include_init_rounds": config.include_init_rounds,
            "clamp_theta": config.clamp_theta,
        },
        "backend": backend.backend_name(),
        "baseline_action": [instance.unit_name(u) for u in trace.baseline_action],
        "baseline_value": trace.baseline_value,
        "mean_terminal_regret": result.mean_terminal_regret,
        "std_terminal_regret": result.std_terminal_regret,
        "mean_unit_counts": {
            instance.unit_name(u): float(result.mean_unit_counts[u])
            for u in range(instance.unit_count)
        },
        "init_rounds": len(trace.init_actions),
    }
    fn = make_reward_function(instance)
    try:
        report = compute_gaps(instance, fn)
        bound = upper_bound_value(report, instance, horizon=config.horizon)
        summary["gap_report"] = {
            "greedy_solution": [instance.unit_name(u) for u in report.greedy_solution],
            "delta_max": report.delta_max,
            "marginal_gaps": {
                f"{instance.unit_name(s)},k={k}": v
                for (s, k), v in sorted(report.marginal_gaps.items())
            },
        }
        summary["upper_bound"] = {
            "leading_term": bound.leading_term,
            "constant_term": bound.constant_term,
            "eps": bound.eps,
        }
    except MultipleSolutionsError as err:
        summary["baseline_convention"] = (
            "greedy not unique under true means; minimum-reward reachable "
            f"solution used ({len(err.solutions)} candidates)"
        )
    except CapacityError:
        summary["gap_report"] = "skipped: instance exceeds enumeration cap"
    return summary


def scaling_study(
    base_config: ExperimentConfig,
    deltas: list[float],
    horizons: list[int],
    tracked_unit: str = "u3",
) -> dict:
    """Grid study over (delta, horizon) on the built-in instance.

    Emits one row per cell with mean/std terminal regret and the mean
    selection count of the tracked unit, plus log-log fitted slopes.
    """
    if not deltas:
        raise ValueError("empty delta grid")
    if not horizons:
        raise ValueError("empty horizon grid")
    if base_config.instance != "figure1":
        raise ValueError("scaling studies run on the built-in figure1 instance")

    instance = make_figure1_instance(max(deltas))
    unit_id = instance.unit_by_name(tracked_unit)
    rows = []
    for delta in deltas:
        for T in horizons:
            cfg = replace(
                base_config, delta=delta, horizon=int(T), out_dir=None
            )
            res = run_experiment(cfg)
            rows.append(
                {
                    "delta": delta,
                    "T": int(T),
                    "mean_regret": res.mean_terminal_regret,
                    "std_regret": res.std_terminal_regret,
                    f"mean_N{tracked_unit}": float(res.mean_unit_counts[unit_id]),
                }
            )

    count_key = f"mean_N{tracked_unit}"
    fits: dict = {}
    t_max = max(horizons)
    at_tmax = [r for r in rows if r["T"] == t_max and r["mean_regret"] > 0]
    if len(at_tmax) >= 2 and len(set(r["delta"] for r in at_tmax)) >= 2:
        xs = np.log([1.0 / r["delta"] for r in at_tmax])
        ys = np.log([r["mean_regret"] for r in at_tmax])
        fits["regret_vs_inv_delta_exponent"] = float(np.polyfit(xs, ys, 1)[0])
    for delta in deltas:
        at_d = [r for r in rows if r["delta"] == delta]
        if len(at_d) >= 2:
            xs = np.log([r["T"] for r in at_d])
            fits[f"regret_vs_logT_slope_delta={delta:g}"] = float(
                np.polyfit(xs, [r["mean_regret"] for r in at_d], 1)[0]
            )
            fits[f"count_vs_logT_slope_delta={delta:g}"] = float(
                np.polyfit(xs, [r[count_key] for r in at_d], 1)[0]
            )

    study = {"rows": rows, "fits": fits, "tracked_unit": tracked_unit}
    if base_config.out_dir:
        os.makedirs(base_config.out_dir, exist_ok=True)
        path = os.path.join(base_config.out_dir, "scaling.csv")
        with open(path, "w") as fh:
            fh.write(f"delta,T,mean_regret,std_regret,mean_N{tracked_unit}\n")
            for r in rows:
                fh.write(
                    f"{r['delta']!r},{r['T']},{_fmt(r['mean_regret'])},"
                    f"{_fmt(r['std_regret'])},{_fmt(r[count_key])}\n"
                )
        with open(os.path.join(base_config.out_dir, "scaling_summary.json"), "w") as fh:
            json.dump(study, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return study
