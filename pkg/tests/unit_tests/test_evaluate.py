"""Tests for policy evaluation across risk bounds."""

import numpy as np
import pandas as pd
import pytest

from src.agent.sac import RiskConditionedSAC
from src.env.maze import MazeSpec
from src.exceptions import ConfigurationError, RiskDomainError
from src.training.evaluate import (EVAL_COLUMNS, EvalOptions, check_compatible, evaluate,
                                   run_episode, summarize_seeds)
from src.training.seeding import named_stream


@pytest.fixture
def agent():
    """Untrained agent for the linear mazes."""
    return RiskConditionedSAC.create(2, 2, named_stream(0, "init"), hidden=8)


def test_empty_delta_list(agent, one_obstacle, rng):
    """No bounds, no rows, no error."""
    table, traces = evaluate(agent, one_obstacle, [], 1, rng)
    assert table.empty and list(table.columns) == EVAL_COLUMNS
    assert traces == []


def test_rows_follow_delta_order(agent, one_obstacle, rng):
    """One row per bound in input order with sane metrics."""
    table, traces = evaluate(agent, one_obstacle, [0.3, 0.1], 2, rng, sigma=0.5,
                             risk_rollouts=3, risk_samples=20)
    assert list(table["delta"]) == [0.3, 0.1]
    assert len(traces) == 4
    assert table["exec_risk"].between(0.0, 1.0).all()
    assert table["goal_rate"].between(0.0, 1.0).all()
    assert (table["time_s"] == 0.0).all()


def test_trace_totals(agent, one_obstacle, rng):
    """Traces carry consistent steps, distance and execution risk."""
    trace = run_episode(agent, one_obstacle, 0.2, rng, 0.5, risk_samples=20)
    assert trace.steps == len(trace.actions) == len(trace.states) - 1
    assert len(trace.r_b) == len(trace.states)
    positions = np.asarray(trace.states)
    assert trace.distance == pytest.approx(np.sum(np.linalg.norm(np.diff(positions, axis=0),
                                                                 axis=1)))
    assert 0.0 <= trace.exec_risk <= 1.0


def test_deterministic_given_seed(agent, one_obstacle):
    """Same generator seed, same table."""
    tables = [evaluate(agent, one_obstacle, [0.2], 1, named_stream(4, "eval"), sigma=0.5,
                       risk_rollouts=2, risk_samples=10)[0] for _ in range(2)]
    pd.testing.assert_frame_equal(tables[0], tables[1])


def test_out_of_range_delta(agent, one_obstacle, rng):
    """Bounds are validated before any rollout."""
    with pytest.raises(RiskDomainError):
        evaluate(agent, one_obstacle, [0.2, 1.5], 1, rng)


def test_checkpoint_must_match_dynamics(agent, one_obstacle, dubins_maze, tmpdir):
    """A linear checkpoint cannot drive a Dubins maze."""
    path = str(tmpdir.join("checkpoint.json"))
    agent.save(path, {"dynamics": "linear"})
    with pytest.raises(ConfigurationError):
        evaluate(path, dubins_maze, [0.2], 1, named_stream(0, "eval"))
    with pytest.raises(ConfigurationError):
        check_compatible({"obs_dim": 5}, one_obstacle)
    check_compatible({"dynamics": "linear", "obs_dim": 2}, MazeSpec(name="Other"))


def test_options_from_dict():
    """Options reject unknown keys and non-positive counts."""
    assert EvalOptions.from_dict({"risk_rollouts": 7}).risk_rollouts == 7
    with pytest.raises(ConfigurationError):
        EvalOptions.from_dict({"episodes": 2})
    with pytest.raises(ConfigurationError):
        EvalOptions.from_dict({"n_workers": 0})
    with pytest.raises(ConfigurationError):
        EvalOptions.from_dict({"risk_rollouts": "many"})


def test_summarize_seeds():
    """Per-delta mean and standard deviation across seeds."""
    def table(distance):
        return pd.DataFrame([{c: 0.0 for c in EVAL_COLUMNS} for _ in range(2)]).assign(
            delta=[0.1, 0.2], distance_m=distance)

    summary = summarize_seeds([table([8.0, 7.0]), table([10.0, 7.0])])
    assert list(summary["delta"]) == [0.1, 0.2]
    assert list(summary["distance_m_mean"]) == [9.0, 7.0]
    assert summary["distance_m_std"][0] == pytest.approx(np.sqrt(2.0))
    assert summary["distance_m_std"][1] == 0.0
    assert summarize_seeds([]).empty
