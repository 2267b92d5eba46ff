"""Trajectory serialization round-trips and engine replay validation."""

import pytest

from mapinduction.config import PipelineConfigs, PlannerConfig
from mapinduction.gridworld import Action, Pose, parse_map
from mapinduction.planner import AgentKind, run_episode
from mapinduction.trajectory import (
    Step,
    Trajectory,
    action_from_name,
    action_name,
    replay,
)


def make_traj():
    g = parse_map("S.D", sidecar={"timeout_steps": 20}, map_id="c3")
    cfgs = PipelineConfigs(planner=PlannerConfig(simulations_per_step=100))
    return g, run_episode(g, AgentKind.DISTRIBUTIONAL, cfgs, seed=0)


def test_action_names_round_trip():
    for a in Action:
        assert action_from_name(action_name(a)) == a
    assert action_name(Action.FORWARD) == "Forward"


def test_json_round_trip():
    _, traj = make_traj()
    blob = traj.to_json()
    back = Trajectory.from_dict(__import__("json").loads(blob))
    assert back.to_json() == blob
    assert back.start_pose == traj.start_pose
    assert back.steps[0].action == traj.steps[0].action


def test_version_check():
    with pytest.raises(ValueError):
        Trajectory.from_dict({"version": 99, "header": {}, "steps": []})


def test_replay_reproduces_episode():
    g, traj = make_traj()
    pose, observed, poses = replay(g, traj)
    assert pose == traj.steps[-1].pose
    assert poses == traj.poses()
    assert observed.collected == {(2, 0)}


def test_replay_prefix():
    g, traj = make_traj()
    pose, _, poses = replay(g, traj, upto=1)
    assert pose == traj.steps[0].pose
    assert len(poses) == 2


def test_replay_detects_divergence():
    g, traj = make_traj()
    traj.steps[0] = Step(
        traj.steps[0].i,
        Pose(9, 9, "N"),
        traj.steps[0].action,
        traj.steps[0].reward,
        [],
    )
    with pytest.raises(ValueError):
        replay(g, traj)
