"""Versioned trajectory records shared by the planner, evaluation and server."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import List, Optional

from .gridworld import (
    Action,
    GridMap,
    ObservedMap,
    Pose,
    apply_action,
    cell_to_char,
    char_to_cell,
    observe,
)

FORMAT_VERSION = 1

_ACTION_NAMES = {
    Action.TURN_LEFT: "TurnLeft",
    Action.TURN_RIGHT: "TurnRight",
    Action.FORWARD: "Forward",
}
_ACTIONS_BY_NAME = {v: k for k, v in _ACTION_NAMES.items()}


def action_name(action: Action) -> str:
    return _ACTION_NAMES[Action(action)]


def action_from_name(name: str) -> Action:
    return _ACTIONS_BY_NAME[name]


@dataclass
class Step:
    i: int
    pose: Pose
    action: Action
    reward: int
    observed_new: list  # [(x, y, cell)] cells newly known after this step

    def to_dict(self) -> dict:
        return {
            "i": self.i,
            "pose": self.pose.to_dict(),
            "action": action_name(self.action),
            "reward": self.reward,
            "observed_new": [[x, y, cell_to_char(c)] for x, y, c in self.observed_new],
        }

    @staticmethod
    def from_dict(d: dict) -> "Step":
        return Step(
            i=int(d["i"]),
            pose=Pose.from_dict(d["pose"]),
            action=action_from_name(d["action"]),
            reward=int(d["reward"]),
            observed_new=[(int(x), int(y), char_to_cell(c)) for x, y, c in d["observed_new"]],
        )


@dataclass
class Trajectory:
    map_id: str
    provenance: dict  # {"kind": "Uniform"|"MAP"|"Distributional"|"human", "seed", "config_digest"}
    started_at: str
    start_pose: Pose
    initial_observed: list  # [(x, y, cell)] cells known before the first action
    steps: List[Step] = field(default_factory=list)
    done: bool = True

    @property
    def total_reward(self) -> int:
        return sum(s.reward for s in self.steps)

    def poses(self) -> list:
        return [self.start_pose] + [s.pose for s in self.steps]

    def actions(self) -> list:
        return [s.action for s in self.steps]

    def to_dict(self) -> dict:
        return {
            "version": FORMAT_VERSION,
            "header": {
                "map_id": self.map_id,
                "provenance": self.provenance,
                "started_at": self.started_at,
                "start": {
                    "pose": self.start_pose.to_dict(),
                    "observed": [
                        [x, y, cell_to_char(c)] for x, y, c in self.initial_observed
                    ],
                },
                "done": self.done,
            },
            "steps": [s.to_dict() for s in self.steps],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":")) + "\n"

    @staticmethod
    def from_dict(d: dict) -> "Trajectory":
        if int(d.get("version", -1)) != FORMAT_VERSION:
            raise ValueError("unsupported trajectory format version")
        h = d["header"]
        return Trajectory(
            map_id=str(h["map_id"]),
            provenance=dict(h["provenance"]),
            started_at=str(h["started_at"]),
            start_pose=Pose.from_dict(h["start"]["pose"]),
            initial_observed=[
                (int(x), int(y), char_to_cell(c)) for x, y, c in h["start"]["observed"]
            ],
            steps=[Step.from_dict(s) for s in d["steps"]],
            done=bool(h.get("done", True)),
        )

    @staticmethod
    def from_json(text: str) -> "Trajectory":
        return Trajectory.from_dict(json.loads(text))


def replay(grid: GridMap, trajectory: Trajectory, upto: Optional[int] = None):
    """Re-run a trajectory's actions through the engine.

    Returns (pose, observed, poses) after ``upto`` steps (all by default).
    Raises if the recorded poses diverge from the engine's.
    """
    pose = grid.start
    observed = ObservedMap.blank(grid).merge(observe(grid, pose))
    poses = [pose]
    steps = trajectory.steps if upto is None else trajectory.steps[:upto]
    for step in steps:
        pose, reward, observed = apply_action(grid, observed, pose, step.action)
        if step.pose != pose:
            raise ValueError(f"trajectory diverges from engine at step {step.i}")
        if step.reward != reward:
            raise ValueError(f"reward mismatch at step {step.i}")
        poses.append(pose)
    return pose, observed, poses
