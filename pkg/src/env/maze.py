"""Maze geometry: bounds, rectangular obstacles, start and goal."""

import os
from dataclasses import asdict, dataclass, fields
from typing import Tuple

import numpy as np

from src.config import PRESETS_DIR
from src.exceptions import ConfigurationError
from src.utils import load_config_file

DYNAMICS = ("linear", "dubins")
START_MODES = ("fixed", "uniform_free")


@dataclass(frozen=True)
class Rect:
    """Closed axis-aligned rectangle ``[x_min, x_max] x [y_min, y_max]``."""

    x_min: float
    x_max: float
    y_min: float
    y_max: float

    def __post_init__(self):
        """Reject empty rectangles."""
        if not (self.x_min <= self.x_max and self.y_min <= self.y_max):
            raise ConfigurationError("Degenerate rectangle {}".format(self))

    def contains(self, points):
        """Closed containment test for a (2,) point or an (n, 2) array."""
        points = np.asarray(points, dtype=np.float64)
        x, y = points[..., 0], points[..., 1]
        return (x >= self.x_min) & (x <= self.x_max) & (y >= self.y_min) & (y <= self.y_max)

    def distance(self, points):
        """Euclidean distance from points to the rectangle, 0 inside."""
        points = np.asarray(points, dtype=np.float64)
        dx = np.maximum(np.maximum(self.x_min - points[..., 0], 0.0), points[..., 0] - self.x_max)
        dy = np.maximum(np.maximum(self.y_min - points[..., 1], 0.0), points[..., 1] - self.y_max)
        return np.hypot(dx, dy)

    def as_list(self):
        """``[x_min, x_max, y_min, y_max]``."""
        return [self.x_min, self.x_max, self.y_min, self.y_max]


@dataclass(frozen=True)
class MazeSpec:
    """A maze with its dynamics, reward constants and uncertainty model."""

    name: str = "OneObstacle"
    bounds: Rect = Rect(0.0, 10.0, 0.0, 10.0)
    obstacles: Tuple[Rect, ...] = (Rect(4.0, 6.0, 3.0, 7.0),)
    start: Tuple[float, float] = (1.0, 5.0)
    start_heading: float = 0.0
    start_speed: float = 0.0
    start_mode: str = "fixed"
    goal: Tuple[float, float] = (9.0, 5.0)
    goal_radius: float = 0.5
    horizon: int = 50
    dt: float = 1.0
    dynamics: str = "linear"
    step_cost: float = 1.0
    goal_bonus: float = 100.0
    progress_coef: float = 0.0
    sigma: float = 1.0
    noise_in_transition: bool = False
    v_max: float = 1.0
    u_theta_max: float = 1.0
    u_v_max: float = 0.5

    def __post_init__(self):
        """Validate the geometry and the constants."""
        if self.dynamics not in DYNAMICS:
            raise ConfigurationError("Unknown dynamics '{}'".format(self.dynamics))
        if self.start_mode not in START_MODES:
            raise ConfigurationError("Unknown start mode '{}'".format(self.start_mode))
        if self.goal_radius <= 0 or self.horizon < 1 or self.dt <= 0:
            raise ConfigurationError("goal_radius and dt must be > 0 and horizon >= 1")
        if self.sigma < 0 or self.v_max <= 0:
            raise ConfigurationError("sigma must be >= 0 and v_max > 0")
        for rect in self.obstacles:
            if not (rect.x_min >= self.bounds.x_min and rect.x_max <= self.bounds.x_max
                    and rect.y_min >= self.bounds.y_min and rect.y_max <= self.bounds.y_max):
                raise ConfigurationError("Obstacle {} leaves the maze bounds".format(rect))
        if not self.bounds.contains(self.goal) or in_collision(self, self.goal):
            raise ConfigurationError("Goal {} is outside the maze or inside an obstacle".format(
                self.goal))
        if not self.bounds.contains(self.start):
            raise ConfigurationError("Start {} is outside the maze".format(self.start))

    @classmethod
    def from_dict(cls, content):
        """Build a spec from a config mapping (lists for rectangles and points)."""
        known = {f.name for f in fields(cls)}
        unknown = set(content) - known
        if unknown:
            raise ConfigurationError("Unknown maze config keys: {}".format(sorted(unknown)))
        kwargs = dict(content)
        try:
            if "bounds" in kwargs:
                kwargs["bounds"] = Rect(*[float(v) for v in kwargs["bounds"]])
            if "obstacles" in kwargs:
                kwargs["obstacles"] = tuple(Rect(*[float(v) for v in o])
                                            for o in kwargs["obstacles"])
            for key in ("start", "goal"):
                if key in kwargs:
                    kwargs[key] = tuple(float(v) for v in kwargs[key])
                    if len(kwargs[key]) != 2:
                        raise ConfigurationError("{} must be a 2-D point".format(key))
            return cls(**kwargs)
        except ConfigurationError:
            raise
        except (TypeError, ValueError) as exc:
            raise ConfigurationError("Malformed maze config: {}".format(exc)) from exc

    def to_dict(self):
        """Plain mapping, the inverse of :meth:`from_dict`."""
        content = asdict(self)
        content["bounds"] = self.bounds.as_list()
        content["obstacles"] = [o.as_list() for o in self.obstacles]
        content["start"] = list(self.start)
        content["goal"] = list(self.goal)
        return content

    @property
    def state_dim(self):
        """Length of the AgentState vector."""
        return 2 if self.dynamics == "linear" else 4

    @property
    def action_dim(self):
        """Length of the action vector."""
        return 2


def load_maze_spec(path, overrides=None):
    """Load a maze spec from a TOML/JSON/YAML file, applying dict overrides."""
    content = load_config_file(path)
    content.update(overrides or {})
    return MazeSpec.from_dict(content)


def preset_path(name):
    """Path of a shipped maze preset, e.g. ``one_obstacle``."""
    return os.path.join(PRESETS_DIR, "{}.toml".format(name))


def in_collision(spec, points):
    """Whether points lie in any obstacle; closed rectangles, so edges count.

    :param points: A (2,) point or an (n, 2) array; positions beyond index 1 are ignored.
    """
    points = np.asarray(points, dtype=np.float64)[..., :2]
    hit = np.zeros(points.shape[:-1], dtype=bool)
    for rect in spec.obstacles:
        hit |= rect.contains(points)
    return bool(hit) if hit.ndim == 0 else hit


def clearance(spec, points):
    """Distance from points to the nearest obstacle, ``inf`` in an obstacle-free maze."""
    points = np.asarray(points, dtype=np.float64)[..., :2]
    best = np.full(points.shape[:-1], np.inf)
    for rect in spec.obstacles:
        best = np.minimum(best, rect.distance(points))
    return float(best) if best.ndim == 0 else best

