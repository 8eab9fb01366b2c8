"""Command line entry point: train, eval, sweep and selftest."""

import logging
import os
import sys

import click
import daiquiri
import daiquiri.formatter
import daiquiri.output

from src.agent.sac import RiskConditionedSAC
from src.config import (EVAL_FILENAME, EXIT_NUMERICAL_ABORT, EXIT_OK, EXIT_TEST_FAILURE,
                        EXIT_USAGE, LOGGING_LEVEL, PATHS_FILENAME, SEEDS_FILENAME, SWEEP_FILENAME,
                        TRACES_FILENAME)
from src.env.maze import load_maze_spec, preset_path
from src.exceptions import ConfigurationError, NumericalAbort, RiskDomainError
from src.reporting import SweepReport, write_paths_svg, write_traces
from src.selftest import first_failure, run_suites
from src.training.evaluate import EvalOptions, check_compatible, evaluate, summarize_seeds
from src.training.seeding import named_stream
from src.training.train import TrainConfig, train
from src.utils import apply_overrides, load_config_file

_logger = daiquiri.getLogger(__name__)

LOG_FORMAT = "[%(asctime)s] %(levelname)s in %(module)s: %(message)s%(extras)s"
LOG_LEVELS = ["DEBUG", "INFO", "WARNING", "ERROR"]


def setup_logging(level=LOGGING_LEVEL):
    """Route all package logs to stderr with their structured extras."""
    daiquiri.setup(level=logging.getLevelName(level.upper()), outputs=[
        daiquiri.output.Stream(sys.stderr, formatter=daiquiri.formatter.ExtrasFormatter(
            fmt=LOG_FORMAT))])


def resolve_config_path(value):
    """Accept either a config file path or the name of a shipped preset."""
    if os.path.isfile(value):
        return value
    candidate = preset_path(value)
    if os.path.isfile(candidate):
        return candidate
    raise ConfigurationError("No config file or preset named '{}'".format(value))


def parse_deltas(text):
    """Comma separated risk bounds; an empty string gives an empty list."""
    try:
        deltas = [float(item) for item in text.split(",") if item.strip()]
    except ValueError as exc:
        raise ConfigurationError("Risk bounds must be numbers: '{}'".format(text)) from exc
    bad = [d for d in deltas if not 0.0 <= d <= 1.0]
    if bad:
        raise RiskDomainError("Risk bounds {} outside [0, 1]".format(bad))
    return deltas


def _load_maze(env, env_overrides):
    return load_maze_spec(resolve_config_path(env), env_overrides)


def _fail(ctx, code, message):
    click.echo("error: {}".format(message), err=True)
    ctx.exit(code)


def _run(ctx, action):
    """Map package errors onto exit codes."""
    try:
        return action()
    except (ConfigurationError, RiskDomainError) as exc:
        _fail(ctx, EXIT_USAGE, exc)
    except NumericalAbort as exc:
        _fail(ctx, EXIT_NUMERICAL_ABORT, "{} (dump: {})".format(exc, exc.dump_path))


@click.group()
@click.option("--log-level", type=click.Choice(LOG_LEVELS, case_sensitive=False),
              default=LOGGING_LEVEL.upper(), show_default=True, help="Logging verbosity.")
def cli(log_level):
    """Risk-conditioned soft actor critic for chance-constrained mazes."""
    setup_logging(log_level)


@cli.command("train")
@click.option("--env", "env", required=True, help="Maze config file or preset name.")
@click.option("--train", "train_cfg", default=None, help="Training config file or preset.")
@click.option("--seed", type=int, default=None, help="Master seed, overrides the config.")
@click.option("--out", required=True, type=click.Path(file_okay=False), help="Output dir.")
@click.option("--override", "overrides", multiple=True, help="key=value, env.key=value.")
@click.option("--timing", is_flag=True, help="Record wall-clock time per epoch.")
@click.pass_context
def cmd_train(ctx, env, train_cfg, seed, out, overrides, timing):
    """Train an agent and write checkpoint, log and resolved config."""
    def action():
        train_dict = load_config_file(resolve_config_path(train_cfg)) if train_cfg else {}
        train_dict, env_overrides = apply_overrides(train_dict, {}, overrides)
        if seed is not None:
            train_dict["seed"] = seed
        if timing:
            train_dict["record_wall_time"] = True
        config = TrainConfig.from_dict(train_dict)
        spec = _load_maze(env, env_overrides)
        result = train(config, spec, out)
        _logger.info("Training finished", out=out, config_hash=result.config_hash)
        click.echo("checkpoint: {}\nlog: {}".format(result.checkpoint_path, result.log_path))
    _run(ctx, action)
    ctx.exit(EXIT_OK)


def _evaluation_setup(env, deltas, overrides):
    options_dict, env_overrides = apply_overrides({}, {}, overrides)
    options = EvalOptions.from_dict(options_dict)
    return options, parse_deltas(deltas), _load_maze(env, env_overrides)


def _evaluate_checkpoint(spec, options, deltas, checkpoint, episodes, seed, timing):
    agent, metadata = RiskConditionedSAC.load(checkpoint)
    check_compatible(metadata, spec)
    table, traces = evaluate(agent, spec, deltas, episodes,
                             named_stream(seed, "eval"), sigma=options.sigma,
                             risk_rollouts=options.risk_rollouts,
                             risk_samples=options.risk_samples, n_workers=options.n_workers,
                             record_time=timing)
    return metadata, table, traces


def evaluation_options(command):
    """Options shared by ``eval`` and ``sweep``."""
    options = [
        click.option("--env", "env", required=True, help="Maze config file or preset name."),
        click.option("--deltas", default="0.1,0.2,0.3", show_default=True,
                     help="Comma separated risk bounds."),
        click.option("--episodes", type=int, default=1, show_default=True,
                     help="Recorded episodes per risk bound."),
        click.option("--seed", type=int, default=0, show_default=True),
        click.option("--out", required=True, type=click.Path(file_okay=False)),
        click.option("--override", "overrides", multiple=True,
                     help="sigma, risk_rollouts, risk_samples, n_workers or env.key=value."),
        click.option("--timing", is_flag=True, help="Measure inference time per episode."),
    ]
    for option in reversed(options):
        command = option(command)
    return command


@cli.command("eval")
@evaluation_options
@click.option("--checkpoint", required=True, help="Checkpoint JSON file.")
@click.pass_context
def cmd_eval(ctx, env, deltas, episodes, seed, out, overrides, timing, checkpoint):
    """Evaluate a checkpoint and write eval.csv and traces.json."""
    def action():
        options, delta_list, spec = _evaluation_setup(env, deltas, overrides)
        _, table, traces = _evaluate_checkpoint(spec, options, delta_list, checkpoint,
                                                episodes, seed, timing)
        os.makedirs(out, exist_ok=True)
        table.to_csv(os.path.join(out, EVAL_FILENAME), index=False)
        write_traces(os.path.join(out, TRACES_FILENAME), spec, traces)
        click.echo(table.to_string(index=False))
    _run(ctx, action)
    ctx.exit(EXIT_OK)


@cli.command("sweep")
@evaluation_options
@click.option("--checkpoint", "checkpoints", required=True, multiple=True,
              help="Checkpoint JSON file; repeat for one checkpoint per training seed.")
@click.pass_context
def cmd_sweep(ctx, env, deltas, episodes, seed, out, overrides, timing, checkpoints):
    """Sweep risk bounds and write sweep.csv, traces.json and paths.svg.

    Traces and paths come from the first checkpoint. With several checkpoints the per-bound
    mean and standard deviation across them go to seeds.csv.
    """
    def action():
        options, delta_list, spec = _evaluation_setup(env, deltas, overrides)
        reports, tables, first_traces = [], [], None
        for checkpoint in checkpoints:
            metadata, table, traces = _evaluate_checkpoint(spec, options, delta_list,
                                                           checkpoint, episodes, seed, timing)
            reports.append(SweepReport.from_eval_table(
                table, spec.name, metadata.get("config_hash", os.path.basename(checkpoint)),
                seed))
            tables.append(table)
            if first_traces is None:
                first_traces = traces
        os.makedirs(out, exist_ok=True)
        SweepReport.concat(reports).to_csv(os.path.join(out, SWEEP_FILENAME))
        write_traces(os.path.join(out, TRACES_FILENAME), spec, first_traces)
        write_paths_svg(os.path.join(out, PATHS_FILENAME), spec, first_traces)
        click.echo("\n\n".join(report.human_table() for report in reports))
        if len(tables) > 1:
            summary = summarize_seeds(tables)
            summary.to_csv(os.path.join(out, SEEDS_FILENAME), index=False)
            click.echo("\n{} checkpoints:\n{}".format(len(tables), summary[
                ["delta", "exec_risk_mean", "exec_risk_std", "distance_m_mean",
                 "distance_m_std"]].to_string(index=False, float_format="%.4f")))
    _run(ctx, action)
    ctx.exit(EXIT_OK)


@cli.command("selftest")
@click.option("--suite", "suites", multiple=True,
              help="Group (risk, nn, agent) or single suite; repeatable, default all.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.pass_context
def cmd_selftest(ctx, suites, seed):
    """Run the oracle property suites."""
    results = _run(ctx, lambda: run_suites(suites, seed))
    for result in results:
        click.echo(result.summary())
    failed = first_failure(results)
    if failed:
        click.echo("selftest failed in suite {}: {}".format(failed.name, failed.failure),
                   err=True)
        ctx.exit(EXIT_TEST_FAILURE)
    click.echo("all {} suites passed".format(len(results)))
    ctx.exit(EXIT_OK)


if __name__ == "__main__":
    cli()
