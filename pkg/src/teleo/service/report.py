"""Render figures from a JSONL trace: world + trajectory, and a timeline
of the selected action with the activation depth."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Optional, Union

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
from matplotlib.patches import Circle


def load_trace(path: Union[str, Path]) -> list[dict]:
    records = []
    with open(path) as f:
        for line in f:
            line = line.strip()
            if line:
                records.append(json.loads(line))
    return records


def _world_geometry(scenario_doc: Optional[dict]):
    if not scenario_doc:
        return [], []
    world = scenario_doc.get("world", {})
    if isinstance(world, str):  # path form not resolvable here
        return [], []
    return world.get("obstacles", []), world.get("bars", [])


def render_trajectory(records, out_path, scenario_doc=None, title="trajectory"):
    fig, ax = plt.subplots(figsize=(7, 7))
    obstacles, bars = _world_geometry(scenario_doc)
    for obs in obstacles:
        ax.add_patch(Circle(obs["center"], obs["radius"], facecolor="#cccccc", edgecolor="#555555"))
    for bar in bars:
        (x1, y1), (x2, y2) = bar["p"], bar["q"]
        ax.plot([x1, x2], [y1, y2], linewidth=8 * bar.get("half_width", 0.25), color="#8c564b",
                solid_capstyle="round")
    robot_ids = sorted({rid for rec in records for rid in rec.get("robots", {})})
    for rid in robot_ids:
        xs, ys = [], []
        for rec in records:
            robot = rec.get("robots", {}).get(rid)
            if robot:
                x, y = robot["pose"]["position"]
                xs.append(x)
                ys.append(y)
        if not xs:
            continue
        ax.plot(xs, ys, linewidth=1.0, label=rid)
        ax.plot(xs[0], ys[0], "o", markersize=6)
        ax.plot(xs[-1], ys[-1], "x", markersize=8)
    ax.set_xlabel("x (units)")
    ax.set_ylabel("y (units)")
    ax.set_title(title)
    ax.set_aspect("equal", adjustable="datalim")
    if robot_ids:
        ax.legend(loc="best", fontsize=8)
    fig.savefig(out_path, dpi=120, bbox_inches="tight")
    plt.close(fig)
    return out_path


def render_activity(records, out_path, title="activity"):
    fig, (ax_action, ax_depth) = plt.subplots(2, 1, figsize=(9, 5), sharex=True)
    robot_ids = sorted({rid for rec in records for rid in rec.get("robots", {})})
    action_names: list[str] = []
    for rid in robot_ids:
        ticks, actions, depths = [], [], []
        for rec in records:
            robot = rec.get("robots", {}).get(rid)
            if not robot or "action" not in robot:
                continue
            name = robot["action"]["name"]
            if name not in action_names:
                action_names.append(name)
            ticks.append(rec["tick"])
            actions.append(action_names.index(name))
            depths.append(len(robot.get("activation", [])))
        if ticks:
            ax_action.step(ticks, actions, where="post", linewidth=0.8, label=rid)
            ax_depth.step(ticks, depths, where="post", linewidth=0.8, label=rid)
    ax_action.set_yticks(range(len(action_names)))
    ax_action.set_yticklabels(action_names, fontsize=8)
    ax_action.set_ylabel("action")
    ax_action.set_title(title)
    ax_depth.set_ylabel("activation depth")
    ax_depth.set_xlabel("tick")
    if robot_ids:
        ax_depth.legend(loc="best", fontsize=8)
    fig.savefig(out_path, dpi=120, bbox_inches="tight")
    plt.close(fig)
    return out_path


def render_report(
    trace_path: Union[str, Path],
    out_dir: Union[str, Path],
    scenario_path: Union[str, Path, None] = None,
) -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    records = [r for r in load_trace(trace_path) if "error" not in r]
    scenario_doc = None
    if scenario_path is not None:
        scenario_doc = json.loads(Path(scenario_path).read_text())
    stem = Path(trace_path).stem
    return [
        render_trajectory(records, out_dir / f"{stem}_trajectory.png", scenario_doc, title=stem),
        render_activity(records, out_dir / f"{stem}_activity.png", title=stem),
    ]
