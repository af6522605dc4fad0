"""Command-line harness.

Subcommands: run, scaling, gaps, oracle, gen-figure1.
"""

from __future__ import annotations

import json
import os
import sys

import click

from .analysis import compute_gaps, make_figure1_instance, upper_bound_value
from .errors import MultipleSolutionsError
from .harness import ExperimentConfig, run_experiment, scaling_study
from .model import Instance
from .oracle import brute_force_best, greedy
from .rewards import make_reward_function


def _instance_options(f):
    f = click.option(
        "--instance", "instance_path", type=click.Path(exists=True), default=None,
        help="Instance file; mutually exclusive with --figure1-delta.",
    )(f)
    f = click.option(
        "--figure1-delta", type=float, default=None,
        help="Use the built-in hard instance with this delta.",
    )(f)
    return f


def _load(instance_path, figure1_delta) -> Instance:
    if (instance_path is None) == (figure1_delta is None):
        raise click.UsageError("give exactly one of --instance / --figure1-delta")
    if instance_path is not None:
        return Instance.load(instance_path)
    return make_figure1_instance(figure1_delta)


@click.group()
def main():
    """Combinatorial bandit simulator with a greedy offline oracle."""


@main.command("gen-figure1")
@click.option("--delta", type=float, required=True)
@click.option(
    "--outcome-model",
    type=click.Choice(["deterministic", "bernoulli", "gaussian"]),
    default="deterministic",
    show_default=True,
)
@click.option("--out", type=click.Path(), required=True, help="Output instance file.")
def gen_figure1(delta, outcome_model, out):
    """Write the built-in 4x2 coverage instance parameterized by delta."""
    inst = make_figure1_instance(delta, outcome_model=outcome_model)
    inst.save(out)
    click.echo(f"wrote {out}")


@main.command()
@_instance_options
@click.option("--out", type=click.Path(), default=None, help="Directory for CSV output.")
def gaps(instance_path, figure1_delta, out):
    """Print the gap report for an instance; optionally write CSV tables."""
    inst = _load(instance_path, figure1_delta)
    fn = make_reward_function(inst)
    try:
        report = compute_gaps(inst, fn)
    except MultipleSolutionsError as err:
        click.echo(
            f"greedy is not unique under the true means: "
            f"{len(err.solutions)} reachable solutions"
        )
        for action in err.solutions:
            click.echo("  (" + ", ".join(inst.unit_name(u) for u in action) + ")")
        sys.exit(1)
    click.echo(report.format_text(), nl=False)
    if out:
        os.makedirs(out, exist_ok=True)
        with open(os.path.join(out, "marginal_gaps.csv"), "w") as fh:
            fh.write(report.marginal_gaps_csv())
        with open(os.path.join(out, "action_gaps.csv"), "w") as fh:
            fh.write(report.action_gaps_csv())
        click.echo(f"wrote CSV tables to {out}")


@main.command()
@_instance_options
def oracle(instance_path, figure1_delta):
    """Compare greedy and exact brute force on an instance."""
    inst = _load(instance_path, figure1_delta)
    fn = make_reward_function(inst)
    g = greedy(inst, fn, inst.means)
    best_action, best_value = brute_force_best(inst, fn, inst.means)
    g_name = "(" + ", ".join(inst.unit_name(u) for u in g.action) + ")"
    b_name = "{" + ", ".join(inst.unit_name(u) for u in best_action) + "}"
    click.echo(f"greedy:      {g_name}  value {g.value!r}")
    click.echo(f"brute force: {b_name}  value {best_value!r}")
    if best_value > 0:
        click.echo(f"ratio:       {g.value / best_value!r}")


def _common_run_options(f):
    f = click.option("--policy", type=click.Choice(["cts-beta", "cts-gaussian", "cucb"]),
                     default="cts-gaussian", show_default=True)(f)
    f = click.option("--horizon", "-T", type=int, default=10_000, show_default=True)(f)
    f = click.option("--reps", "-R", type=int, default=20, show_default=True)(f)
    f = click.option("--seed", type=int, default=0, show_default=True)(f)
    f = click.option("--out", type=click.Path(), required=True)(f)
    f = click.option("--jobs", type=int, default=1, show_default=True,
                     help="Parallel replications (-1 = all cores).")(f)
    f = click.option("--outcome-model",
                     type=click.Choice(["deterministic", "bernoulli", "gaussian"]),
                     default=None, help="Override the instance's outcome model.")(f)
    f = click.option("--include-init-rounds", is_flag=True,
                     help="Count the Gaussian covering phase in regret curves.")(f)
    f = click.option("--clamp-theta", is_flag=True,
                     help="Clamp sampled parameters to [0,1] before greedy.")(f)
    f = click.option("--full-trace", is_flag=True,
                     help="Write every round instead of 50 log-spaced checkpoints.")(f)
    return f


@main.command()
@_instance_options
@_common_run_options
def run(instance_path, figure1_delta, policy, horizon, reps, seed, out, jobs,
        outcome_model, include_init_rounds, clamp_theta, full_trace):
    """Run one replicated experiment and write traces plus a summary."""
    if (instance_path is None) == (figure1_delta is None):
        raise click.UsageError("give exactly one of --instance / --figure1-delta")
    config = ExperimentConfig(
        instance=instance_path or "figure1",
        delta=figure1_delta if figure1_delta is not None else 0.04,
        policy=policy,
        horizon=horizon,
        replications=reps,
        seed=seed,
        out_dir=out,
        outcome_model=outcome_model,
        include_init_rounds=include_init_rounds,
        clamp_theta=clamp_theta,
        jobs=jobs,
        full_trace=full_trace,
    )
    result = run_experiment(config)
    click.echo(f"wrote {result.out_dir}")
    click.echo(f"mean terminal regret: {result.mean_terminal_regret!r}")


@main.command()
@click.option("--deltas", default="0.04,0.02,0.01", show_default=True,
              help="Comma-separated delta grid.")
@click.option("--horizons", default="10000,100000", show_default=True,
              help="Comma-separated horizon grid.")
@click.option("--tracked-unit", default="u3", show_default=True)
@_common_run_options
def scaling(deltas, horizons, tracked_unit, policy, horizon, reps, seed, out, jobs,
            outcome_model, include_init_rounds, clamp_theta, full_trace):
    """Delta x horizon grid study on the built-in instance."""
    delta_grid = [float(x) for x in deltas.split(",") if x]
    horizon_grid = [int(float(x)) for x in horizons.split(",") if x]
    config = ExperimentConfig(
        instance="figure1",
        policy=policy,
        replications=reps,
        seed=seed,
        out_dir=out,
        outcome_model=outcome_model,
        include_init_rounds=include_init_rounds,
        clamp_theta=clamp_theta,
        jobs=jobs,
        full_trace=full_trace,
    )
    study = scaling_study(config, delta_grid, horizon_grid, tracked_unit)
    click.echo(json.dumps(study["fits"], indent=2, sort_keys=True))
    click.echo(f"wrote {os.path.join(out, 'scaling.csv')}")


if __name__ == "__main__":
    main()
