"""Map parsing, dynamics and line of sight, checked against the exact oracle."""

import random

import pytest

from mapinduction.gridworld import (
    EMPTY,
    REWARD,
    UNKNOWN,
    WALL,
    Action,
    GridMap,
    MapError,
    ObservedMap,
    Pose,
    apply_action,
    cell_to_char,
    char_to_cell,
    cue_cell,
    is_terminal,
    load_map_file,
    observe,
    parse_map,
)

from oracles import random_open_map, visible_cells_oracle


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------


def test_parse_minimal_enclosure():
    g = parse_map("###\n#S#\n###", sidecar={"timeout_steps": 100})
    assert (g.width, g.height) == (3, 3)
    assert g.start == Pose(1, 1, "E")
    assert g.timeout_steps == 100
    assert g.reward_coords == frozenset()


def test_parse_reward_character():
    g = parse_map("S.D\n...")
    assert g.cell_at(2, 0) == REWARD
    assert g.reward_coords == {(2, 0)}


def test_parse_bundled_example_reward_count():
    import mapinduction

    path = (
        __import__("pathlib").Path(mapinduction.__file__).parent
        / "assets"
        / "maps"
        / "corridor_unit.map"
    )
    g = load_map_file(path)
    assert len(g.reward_coords) == path.read_text().count("D")
    assert g.timeout_steps == 100


def test_parse_errors():
    with pytest.raises(MapError):
        parse_map("S.\n...")  # ragged
    with pytest.raises(ValueError):
        parse_map("S!\n..")  # unknown character
    with pytest.raises(MapError):
        parse_map("..\n..")  # no start
    with pytest.raises(MapError):
        parse_map("SS\n..")  # two starts
    with pytest.raises(MapError):
        parse_map("S#.\n###")  # unreachable open cell
    with pytest.raises(MapError):
        parse_map("S?\n..")  # unknown cell in ground truth


def test_room_layer_validation():
    sidecar = {"rooms": [[0, 0], [0, -1]], "timeout_steps": 10}
    g = parse_map("S.\n.#", sidecar=sidecar)
    assert g.rooms == (0, 0, 0, -1)
    with pytest.raises(MapError):
        parse_map("S.\n..", sidecar={"rooms": [[0, 0], [0, -1]]})


def test_text_round_trip():
    text = "S..a\n#.D.\n....\n"
    g = parse_map(text, sidecar={"timeout_steps": 44})
    g2 = parse_map(g.to_text(), sidecar=g.sidecar())
    assert g == g2
    assert g.to_text() == text


def test_char_cell_bijection():
    for ch in ".#D?" + "abcxyz":
        assert cell_to_char(char_to_cell(ch)) == ch
    assert cue_cell(0) == char_to_cell("a")
    with pytest.raises(ValueError):
        cue_cell(26)


# ---------------------------------------------------------------------------
# dynamics
# ---------------------------------------------------------------------------

OPEN3 = parse_map("...\n.S.\n...", sidecar={"start": {"x": 1, "y": 1, "facing": "E"}})


def test_turns_rotate():
    obs = ObservedMap.blank(OPEN3)
    p, r, _ = apply_action(OPEN3, obs, Pose(1, 1, "E"), Action.TURN_LEFT)
    assert (p, r) == (Pose(1, 1, "N"), 0)
    p, r, _ = apply_action(OPEN3, obs, Pose(1, 1, "E"), Action.TURN_RIGHT)
    assert (p, r) == (Pose(1, 1, "S"), 0)


def test_rotation_closure():
    p = Pose(1, 1, "E")
    obs = ObservedMap.blank(OPEN3)
    for _ in range(4):
        p, _, obs = apply_action(OPEN3, obs, p, Action.TURN_LEFT)
    assert p == Pose(1, 1, "E")


def test_forward_blocked_is_noop():
    g = parse_map("S#\n..")
    obs = ObservedMap.blank(g)
    p, r, _ = apply_action(g, obs, Pose(0, 0, "E"), Action.FORWARD)
    assert (p, r) == (Pose(0, 0, "E"), 0)
    # out of bounds likewise
    p, r, _ = apply_action(g, obs, Pose(0, 0, "N"), Action.FORWARD)
    assert (p, r) == (Pose(0, 0, "N"), 0)


def test_forward_collects_reward_once():
    g = parse_map("S.D")
    obs = ObservedMap.blank(g).merge(observe(g, g.start))
    p, r, obs = apply_action(g, obs, Pose(1, 0, "E"), Action.FORWARD)
    assert (p, r) == (Pose(2, 0, "E"), 1)
    assert (2, 0) in obs.collected
    # walking over the same spot again yields nothing
    p, r, obs = apply_action(g, obs, Pose(1, 0, "E"), Action.FORWARD)
    assert r == 0


def test_collected_reward_reported_empty():
    g = parse_map("S.D")
    obs = observe(g, Pose(1, 0, "E"), collected={(2, 0)})
    assert (2, 0, EMPTY) in obs.visible


def test_observation_monotonicity():
    g = parse_map("S....\n.....\n..#..\n.....\n.....")
    obs = ObservedMap.blank(g).merge(observe(g, g.start))
    pose = g.start
    rng = random.Random(5)
    for _ in range(40):
        before = obs.known_count()
        pose, _, obs = apply_action(g, obs, pose, Action(rng.randrange(3)))
        assert obs.known_count() >= before


def test_is_terminal():
    g = parse_map("S.D", sidecar={"timeout_steps": 7})
    empty = ObservedMap.blank(g)
    assert not is_terminal(g, empty, 6)
    assert is_terminal(g, empty, 7)
    done = empty.with_collected((2, 0))
    assert is_terminal(g, done, 0)


# ---------------------------------------------------------------------------
# line of sight
# ---------------------------------------------------------------------------


def test_los_straight_corridor():
    g = parse_map("S....#", sidecar={"timeout_steps": 9})
    vis = {(x, y) for x, y, _ in observe(g, Pose(2, 0, "E")).visible}
    assert vis == {(2, 0), (3, 0), (4, 0), (5, 0)}


def test_los_wall_occludes():
    g = parse_map("S#...\n.....")
    vis = {(x, y) for x, y, _ in observe(g, Pose(0, 0, "E")).visible}
    assert (1, 0) in vis  # the wall itself is visible when first hit
    assert all((x, 0) not in vis for x in (2, 3, 4))


def test_los_own_cell_always_visible():
    g = parse_map("S#\n##", sidecar={"timeout_steps": 1})
    vis = observe(g, Pose(0, 0, "S")).visible
    assert (0, 0, EMPTY) in vis


def test_los_matches_oracle_open_room():
    g = parse_map("S....\n.....\n.....\n.....\n.....")
    for facing in "NESW":
        pose = Pose(2, 2, facing)
        got = {(x, y) for x, y, _ in observe(g, pose).visible}
        assert got == visible_cells_oracle(g, pose)


def test_los_matches_oracle_corner_cases():
    # exact corner crossings on the 45-degree diagonal
    g = parse_map("S...\n.#..\n....\n....")
    for facing in "NESW":
        for x in range(4):
            for y in range(4):
                if g.cell_at(x, y) == WALL:
                    continue
                pose = Pose(x, y, facing)
                got = {(c[0], c[1]) for c in observe(g, pose).visible}
                assert got == visible_cells_oracle(g, pose), pose


def test_los_mirror_equivariance_random_maps():
    rng = random.Random(11)
    for _ in range(100):
        g = random_open_map(rng, 7, 5)
        mirrored = GridMap(
            g.width,
            g.height,
            [
                g.cell_at(g.width - 1 - x, y)
                for y in range(g.height)
                for x in range(g.width)
            ],
            Pose(g.width - 1 - g.start.x, g.start.y, "W"),
            g.timeout_steps,
            validate=False,
        )
        flip_facing = {"E": "W", "W": "E", "N": "N", "S": "S"}
        pose = Pose(g.start.x, g.start.y, "NESW"[rng.randrange(4)])
        mpose = Pose(g.width - 1 - pose.x, pose.y, flip_facing[pose.facing])
        vis = {(x, y) for x, y, _ in observe(g, pose).visible}
        mvis = {(x, y) for x, y, _ in observe(mirrored, mpose).visible}
        assert {(g.width - 1 - x, y) for x, y in vis} == mvis


def test_observed_map_merge_keeps_collected_reward_knowledge():
    g = parse_map("S.D")
    obs = ObservedMap.blank(g).merge(observe(g, g.start))
    assert obs.cell_at(2, 0) == REWARD
    obs = obs.with_collected((2, 0))
    # post-collection observation reports the cell empty, but the history
    # keeps the fact that a reward was there
    obs = obs.merge(observe(g, g.start, collected=obs.collected))
    assert obs.cell_at(2, 0) == REWARD
    assert obs.collected == {(2, 0)}
