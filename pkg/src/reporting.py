"""Sweep tables, path traces and SVG path plots."""

import json
import platform
import xml.etree.ElementTree as ET
from dataclasses import dataclass

import daiquiri
import numpy as np
import pandas as pd

from src.config import TRACES_SCHEMA_VERSION
from src.env.dynamics import project_action, step_dynamics
from src.exceptions import ConfigurationError

_logger = daiquiri.getLogger(__name__)

SWEEP_COLUMNS = ["env", "checkpoint", "seed", "delta", "distance_m", "steps", "exec_risk",
                 "time_s"]
PATH_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2",
               "#17becf"]
SVG_NS = "http://www.w3.org/2000/svg"
SVG_SCALE = 40.0


@dataclass
class SweepReport:
    """One row per requested risk bound for a checkpoint on a maze."""

    rows: pd.DataFrame
    env: str
    checkpoint: str
    seed: int

    @classmethod
    def from_eval_table(cls, table, env, checkpoint, seed):
        """Select the sweep columns from an evaluation table."""
        rows = table[["delta", "distance_m", "steps", "exec_risk", "time_s"]].copy()
        rows.insert(0, "seed", seed)
        rows.insert(0, "checkpoint", checkpoint)
        rows.insert(0, "env", env)
        return cls(rows[SWEEP_COLUMNS].reset_index(drop=True), env, checkpoint, seed)

    @classmethod
    def concat(cls, reports):
        """Stack the rows of several checkpoints evaluated on the same maze and seed."""
        if not reports:
            raise ConfigurationError("Nothing to report")
        rows = pd.concat([r.rows for r in reports], ignore_index=True)
        first = reports[0]
        return cls(rows, first.env, ",".join(r.checkpoint for r in reports), first.seed)

    def to_csv(self, path):
        """Write the rows as CSV."""
        self.rows.to_csv(path, index=False)
        return path

    def header(self):
        """Run identification, including the CPU the numbers were measured on."""
        return "env={} checkpoint={} seed={} hardware={} {} ({}), no GPU".format(
            self.env, self.checkpoint, self.seed, platform.machine(),
            platform.processor() or "unknown cpu", platform.system())

    def human_table(self):
        """Header plus an aligned text table of the metrics."""
        body = self.rows[["delta", "distance_m", "steps", "exec_risk", "time_s"]].rename(
            columns={"delta": "Delta", "distance_m": "Distance[m]", "steps": "Steps",
                     "exec_risk": "Risk", "time_s": "Time[s]"})
        return "{}\n{}".format(self.header(), body.to_string(index=False, float_format="%.4f"))


def trace_record(spec, trace):
    """JSON-ready form of an EpisodeTrace."""
    return {"env": spec.name, "delta": trace.delta,
            "states": [np.asarray(s).tolist() for s in trace.states],
            "actions": [np.asarray(a).tolist() for a in trace.actions],
            "r_b": [float(r) for r in trace.r_b], "exec_risk": trace.exec_risk,
            "done_reason": trace.done_reason}


def write_traces(path, spec, traces):
    """Write traces as a versioned JSON document."""
    document = {"schema_version": TRACES_SCHEMA_VERSION, "env": spec.name,
                "traces": [trace_record(spec, t) for t in traces]}
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(document, handle, indent=1)
    return path


def read_traces(path):
    """Load a traces document and check its schema version."""
    with open(path, encoding="utf-8") as handle:
        document = json.load(handle)
    if document.get("schema_version") != TRACES_SCHEMA_VERSION:
        raise ConfigurationError("Unsupported traces schema version {}".format(
            document.get("schema_version")))
    return document


def replay_actions(spec, start_state, actions):
    """Re-run recorded squashed actions through the deterministic dynamics."""
    states = [np.asarray(start_state, dtype=np.float64)]
    for action in actions:
        states.append(step_dynamics(spec, states[-1], project_action(spec, action)))
    return states


def _svg_point(spec, x, y):
    return (x - spec.bounds.x_min) * SVG_SCALE, (spec.bounds.y_max - y) * SVG_SCALE


def paths_svg(spec, traces):
    """SVG tree with the maze, its obstacles and one polyline per risk bound.

    Only the first trace of each risk bound is drawn.
    """
    bounds = spec.bounds
    width = (bounds.x_max - bounds.x_min) * SVG_SCALE
    height = (bounds.y_max - bounds.y_min) * SVG_SCALE
    root = ET.Element("svg", xmlns=SVG_NS, width="{:.0f}".format(width),
                      height="{:.0f}".format(height),
                      viewBox="0 0 {:.1f} {:.1f}".format(width, height))
    ET.SubElement(root, "title").text = "{} paths".format(spec.name)
    ET.SubElement(root, "path", d="M0,0 H{w:.1f} V{h:.1f} H0 Z".format(w=width, h=height),
                  fill="none", stroke="black")
    for rect in spec.obstacles:
        x, y = _svg_point(spec, rect.x_min, rect.y_max)
        ET.SubElement(root, "rect", x="{:.2f}".format(x), y="{:.2f}".format(y),
                      width="{:.2f}".format((rect.x_max - rect.x_min) * SVG_SCALE),
                      height="{:.2f}".format((rect.y_max - rect.y_min) * SVG_SCALE),
                      fill="#777777")
    gx, gy = _svg_point(spec, *spec.goal)
    ET.SubElement(root, "circle", cx="{:.2f}".format(gx), cy="{:.2f}".format(gy),
                  r="{:.2f}".format(spec.goal_radius * SVG_SCALE), fill="none",
                  stroke="green")
    drawn = []
    for trace in traces:
        if trace.delta in drawn:
            continue
        color = PATH_COLORS[len(drawn) % len(PATH_COLORS)]
        drawn.append(trace.delta)
        points = " ".join("{:.2f},{:.2f}".format(*_svg_point(spec, s[0], s[1]))
                          for s in trace.states)
        line = ET.SubElement(root, "polyline", points=points, fill="none", stroke=color)
        line.set("data-delta", "{:g}".format(trace.delta))
        sx, sy = _svg_point(spec, trace.states[0][0], trace.states[0][1])
        ET.SubElement(root, "circle", cx="{:.2f}".format(sx), cy="{:.2f}".format(sy), r="3",
                      fill=color)
    return ET.ElementTree(root)


def write_paths_svg(path, spec, traces):
    """Write :func:`paths_svg` to a file."""
    paths_svg(spec, traces).write(path, encoding="unicode")
    _logger.info("Path plot written", path=path, polylines=len({t.delta for t in traces}))
    return path
