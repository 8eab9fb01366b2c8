"""Shared fixtures for the unit tests."""

import numpy as np
import pytest

from src.env.maze import MazeSpec, Rect
from src.training.train import TrainConfig


@pytest.fixture
def rng():
    """Seeded Philox generator."""
    return np.random.Generator(np.random.Philox(1234))


@pytest.fixture
def one_obstacle():
    """Default OneObstacle maze with linear dynamics."""
    return MazeSpec()


@pytest.fixture
def empty_maze():
    """Obstacle-free maze."""
    return MazeSpec(name="Empty", obstacles=())


@pytest.fixture
def dubins_maze():
    """Small Dubins maze."""
    return MazeSpec(name="DubinsBox", dynamics="dubins", obstacles=(Rect(4.0, 6.0, 0.0, 3.0),),
                    horizon=20)


@pytest.fixture
def tiny_config():
    """Training config small enough for unit tests."""
    return TrainConfig(epochs=2, env_steps_per_epoch=30, grad_steps_per_epoch=3, batch_size=8,
                       buffer_capacity=200, risk_samples=20, sigma=0.5, eval_interval=1,
                       eval_episodes=1, eval_deltas=[0.2], eval_risk_rollouts=2, hidden=8,
                       warmup_steps=10, seed=3)
