"""Environment generator: tiling, cues, reflection, determinism."""

import pytest

from mapinduction.envgen import (
    BUNDLED_SPECS,
    EXP1_UNIT,
    EXP2_UNIT,
    EnvSpec,
    bundled_map,
    bundled_map_ids,
    gen_environment,
)
from mapinduction.gridworld import (
    REWARD,
    WALL,
    MapError,
    Pose,
    cue_cell,
    parse_map,
)


def exp1_unit_rewards():
    return {EXP1_UNIT.reward_offsets["left"]} | set(EXP1_UNIT.extra_rewards)


def test_single_unit_exp1():
    g = gen_environment(EnvSpec(unit="exp1", n_units=1, map_id="one"))
    assert (g.width, g.height) == (EXP1_UNIT.width, EXP1_UNIT.height)
    assert g.reward_coords == exp1_unit_rewards()
    assert g.start == Pose(0, 0, "E")


def test_exp1_rewards_are_translates():
    n = 5
    g = gen_environment(EnvSpec(unit="exp1", n_units=n))
    assert g.reward_coords == {
        (ox + u * EXP1_UNIT.width, oy)
        for u in range(n)
        for ox, oy in exp1_unit_rewards()
    }


def test_reflection_is_fliph_with_mirrored_start():
    spec = EnvSpec(unit="exp1", n_units=2)
    g = gen_environment(spec)
    r = gen_environment(EnvSpec(unit="exp1", n_units=2, reflect=True))
    for y in range(g.height):
        for x in range(g.width):
            assert r.cell_at(x, y) == g.cell_at(g.width - 1 - x, y)
    assert r.start == Pose(g.width - 1, 0, "W")


def test_reflection_involution():
    g = gen_environment(EnvSpec(unit="exp2", n_units=2, seed=3))
    rr = gen_environment(EnvSpec(unit="exp2", n_units=2, seed=3, reflect=True))
    back = [
        rr.cell_at(rr.width - 1 - x, y)
        for y in range(rr.height)
        for x in range(rr.width)
    ]
    assert tuple(back) == g.cells


def test_generator_determinism():
    spec = EnvSpec(unit="exp2", n_units=4, seed=11)
    assert gen_environment(spec).to_text() == gen_environment(spec).to_text()


def test_cue_color_matches_reward_side():
    g = bundled_map("exp2_u3")
    uw = EXP2_UNIT.width
    # unit 0: color 0 (reward up); units 1-2: color 1 (reward down)
    sx, sy = EXP2_UNIT.cue_slots["up"]
    assert g.cell_at(sx, sy) == cue_cell(0)
    for u in (1, 2):
        assert g.cell_at(u * uw + sx, sy) == cue_cell(1)
    ux, uy = EXP2_UNIT.reward_offsets["up"]
    dx, dy = EXP2_UNIT.reward_offsets["down"]
    pockets = {(ux, uy), (uw + dx, dy), (2 * uw + dx, dy)}
    fixed = {
        (u * uw + bx, by)
        for u in range(3)
        for bx, by in EXP2_UNIT.extra_rewards
    }
    assert g.reward_coords == pockets | fixed
    assert g.cue_legend == {0: "reward-up", 1: "reward-down"}


def test_cue_assignment_validation():
    up = EXP2_UNIT.reward_offsets["up"]
    with pytest.raises(MapError):
        gen_environment(
            EnvSpec(unit="exp2", n_units=1, cue_assignment=[(0, 1, up)])
        )  # color 1 belongs to the down chamber, not the up offset
    with pytest.raises(MapError):
        gen_environment(
            EnvSpec(unit="exp2", n_units=2, cue_assignment=[(0, 0, up)])
        )  # unit 1 missing
    with pytest.raises(MapError):
        gen_environment(
            EnvSpec(unit="exp1", n_units=1, cue_assignment=[(0, 0, up)])
        )  # exp1 has no cue slots


def test_room_layer_complete_and_parse_round_trip():
    for map_id in bundled_map_ids():
        g = bundled_map(map_id)
        assert g.rooms is not None
        for i, c in enumerate(g.cells):
            if c != WALL:
                assert g.rooms[i] >= 0
        g2 = parse_map(g.to_text(), g.sidecar(), map_id=g.map_id)
        assert g2 == g


def test_timeout_is_four_times_non_wall():
    g = bundled_map("exp1_u2")
    assert g.timeout_steps == 4 * g.non_wall_count()


def test_spec_round_trip():
    for spec in BUNDLED_SPECS.values():
        assert EnvSpec.from_dict(spec.to_dict()) == spec


def test_hidden_deep_chamber_visible_cue_room_and_alcove():
    """The deep (up) chamber end is invisible from every corridor pose; the
    alcove (down) chamber, the cue room's bait diamond and its colored slot
    are all visible from the corridor."""
    from mapinduction.gridworld import observe

    g = gen_environment(EnvSpec(unit="exp2", n_units=1, seed=0))
    cy = EXP2_UNIT.start[1]
    corridor = [
        (x, cy) for x in range(g.width) if g.cell_at(x, cy) != WALL
    ]
    deep = EXP2_UNIT.reward_offsets["up"]
    seen = set()
    for x, y in corridor:
        for f in "NESW":
            vis = {(a, b) for a, b, _ in observe(g, Pose(x, y, f)).visible}
            assert deep not in vis
            seen |= vis
    assert EXP2_UNIT.reward_offsets["down"] in seen
    assert EXP2_UNIT.cue_slots["up"] in seen
    assert EXP2_UNIT.extra_rewards[0] in seen
    # nor is the deep end visible from inside the cue room or the passage
    # entrance -- only from well inside the passage
    for pos in [(1, 3), (1, 2), (2, 3), (2, 2)]:
        for f in "NESW":
            vis = {(a, b) for a, b, _ in observe(g, Pose(*pos, f)).visible}
            assert deep not in vis
