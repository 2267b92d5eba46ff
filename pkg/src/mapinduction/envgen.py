"""Environment generation: corridor-of-units maps in two styles.

``exp1`` units repeat one reward offset in every unit (two chambers per unit,
the reward always in the left pocket).  ``exp2`` units add a small cue room
whose colored cell co-occurs with the unit's reward side: color 0 in the left
cue slot means the left pocket holds the reward, color 1 in the right slot
means the right pocket.  Unit geometry is mirror-symmetric so that flipped
region hypotheses express exactly the alternative cue/reward pairing.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

from .gridworld import (
    EMPTY,
    REWARD,
    WALL,
    GridMap,
    MapError,
    Pose,
    char_to_cell,
    cue_cell,
)


@dataclass
class UnitTemplate:
    rows: List[str]  # '.' open, '#' wall
    room_rows: List[str]  # 'C' corridor, '#' wall, digit = room id in unit
    reward_offsets: dict  # side -> (x, y); the cue-dependent reward slot
    cue_slots: dict  # side -> (x, y); empty for cue-less units
    cue_colors: dict  # side -> color_id
    extra_rewards: Tuple[Tuple[int, int], ...] = ()  # fixed diamonds, every unit
    start: Tuple[int, int] = (0, 0)  # start offset within the first unit

    @property
    def width(self) -> int:
        return len(self.rows[0])

    @property
    def height(self) -> int:
        return len(self.rows)

    @property
    def n_chambers(self) -> int:
        return 1 + max(int(c) for r in self.room_rows for c in r if c.isdigit())


# Exp1-style unit: corridor along the top, one deep winding "snake" passage
# on the west side (entered at its mouth (2,1), exiting via the return shaft
# in column 4), crumb diamonds spaced along the corridor, and one shallow
# diamond nook at the east end.  Diamond spacing is chosen so that at every
# decision point the nearest diamond is the correct next target: a one-cell
# dip is never in competition with an almost-as-close onward diamond.  The
# snake's mouth holds a diamond but the winding depths below are empty; an
# agent without an induced map keeps finding nearby frontier all the way
# down, while an agent that has induced the unit layout predicts the depths
# empty and skips them.  That skipped region is the observed-area contrast.
EXP1_UNIT = UnitTemplate(
    rows=[
        "...............",
        "##.#.########.#",
        "#..#.##########",
        "#.##.##########",
        "#..#.##########",
        "##.#.##########",
        "#..#.##########",
        "#.##.##########",
        "#..#.##########",
        "##.#.##########",
        "#..#.##########",
        "#.##.##########",
        "#..#.##########",
        "##...##########",
        "###############",
    ],
    room_rows=[
        "CCCCCCCCCCCCCCC",
        "##0#0########1#",
        "#00#0##########",
        "#0##0##########",
        "#00#0##########",
        "##0#0##########",
        "#00#0##########",
        "#0##0##########",
        "#00#0##########",
        "##0#0##########",
        "#00#0##########",
        "#0##0##########",
        "#00#0##########",
        "##000##########",
        "###############",
    ],
    reward_offsets={"left": (13, 1)},
    cue_slots={},
    cue_colors={},
    extra_rewards=((2, 1), (6, 0), (9, 0), (12, 0)),
)

# Exp2-style unit: corridor through the middle, a baited cue room at the unit
# entrance (diamond plus a colored slot whose color co-occurs with the reward
# side), and two asymmetric chambers.  The "up" chamber is a doglegged dead-end
# passage whose far end is invisible from the corridor; the "down" chamber is a
# one-cell alcove visible from the corridor while walking past.  The cue side
# decides which chamber holds the unit reward.
EXP2_UNIT = UnitTemplate(
    rows=[
        "##...#######",
        "##.#########",
        "#..#########",
        "#..#########",
        "............",
        "#####.######",
        "############",
        "############",
        "############",
    ],
    room_rows=[
        "##111#######",
        "##1#########",
        "#01#########",
        "#01#########",
        "CCCCCCCCCCCC",
        "#####2######",
        "############",
        "############",
        "############",
    ],
    reward_offsets={"up": (4, 0), "down": (5, 5)},
    cue_slots={"up": (1, 2), "down": (1, 2)},
    cue_colors={"up": 0, "down": 1},
    extra_rewards=((1, 3), (9, 4)),
    start=(0, 4),
)

TEMPLATES = {"exp1": EXP1_UNIT, "exp2": EXP2_UNIT}


@dataclass
class EnvSpec:
    unit: str = "exp1"
    n_units: int = 5
    corridor_width: int = 1
    reflect: bool = False
    # explicit (unit_index, color_id, (x, y) reward offset) entries; None =
    # exp1 mode for cue-less units, seeded random sides for cue units
    cue_assignment: Optional[List[Tuple[int, int, Tuple[int, int]]]] = None
    seed: int = 0
    map_id: str = ""

    def to_dict(self) -> dict:
        return {
            "unit": self.unit,
            "n_units": self.n_units,
            "corridor_width": self.corridor_width,
            "reflect": self.reflect,
            "cue_assignment": [
                [u, c, list(off)] for u, c, off in self.cue_assignment
            ]
            if self.cue_assignment
            else None,
            "seed": self.seed,
            "map_id": self.map_id,
        }

    @staticmethod
    def from_dict(d: dict) -> "EnvSpec":
        ca = d.get("cue_assignment")
        return EnvSpec(
            unit=str(d.get("unit", "exp1")),
            n_units=int(d.get("n_units", 5)),
            corridor_width=int(d.get("corridor_width", 1)),
            reflect=bool(d.get("reflect", False)),
            cue_assignment=[(int(u), int(c), (int(o[0]), int(o[1]))) for u, c, o in ca]
            if ca
            else None,
            seed=int(d.get("seed", 0)),
            map_id=str(d.get("map_id", "")),
        )


def _side_of_offset(template: UnitTemplate, offset) -> str:
    for side, off in template.reward_offsets.items():
        if tuple(off) == tuple(offset):
            return side
    raise MapError(f"reward offset {offset} is not a slot of this unit")


def gen_environment(spec: EnvSpec) -> GridMap:
    """Tile ``n_units`` copies of the unit along a corridor; deterministic."""
    if spec.n_units < 1:
        raise MapError("need at least one unit")
    template = TEMPLATES.get(spec.unit)
    if template is None:
        raise MapError(f"unknown unit template {spec.unit!r}")
    rows = list(template.rows)
    room_rows = list(template.room_rows)
    for _ in range(spec.corridor_width - 1):
        rows.insert(0, rows[0])
        room_rows.insert(0, room_rows[0])

    uw, uh = template.width, len(rows)
    width, height = uw * spec.n_units, uh
    cells = [WALL] * (width * height)
    rooms = [-1] * (width * height)
    n_chambers = template.n_chambers

    # per-unit cue side assignment
    has_cues = bool(template.cue_slots)
    assignment = {}
    if has_cues:
        if spec.cue_assignment is not None:
            for u, color, off in spec.cue_assignment:
                if not 0 <= u < spec.n_units:
                    raise MapError(f"cue assignment for unit {u} out of range")
                side = _side_of_offset(template, off)
                if template.cue_colors[side] != color:
                    raise MapError(
                        f"color {color} inconsistent with reward offset {off}"
                    )
                assignment[u] = side
            missing = set(range(spec.n_units)) - set(assignment)
            if missing:
                raise MapError(f"cue assignment missing units {sorted(missing)}")
        else:
            rng = random.Random(spec.seed)
            for u in range(spec.n_units):
                assignment[u] = "up" if rng.random() < 0.5 else "down"
    elif spec.cue_assignment:
        raise MapError("cue assignment given for a cue-less unit template")

    for u in range(spec.n_units):
        x0 = u * uw
        for y in range(uh):
            for x in range(uw):
                i = y * width + (x0 + x)
                cells[i] = char_to_cell(rows[y][x])
                rc = room_rows[y][x]
                if rc == "C":
                    rooms[i] = 0
                elif rc.isdigit():
                    rooms[i] = 1 + u * n_chambers + int(rc)
        if has_cues:
            side = assignment[u]
            cx, cy = template.cue_slots[side]
            cells[cy * width + x0 + cx] = cue_cell(template.cue_colors[side])
            rx, ry = template.reward_offsets[side]
        else:
            rx, ry = next(iter(template.reward_offsets.values()))
        for px, py in ((rx, ry),) + tuple(template.extra_rewards):
            i = py * width + x0 + px
            if cells[i] == WALL:
                raise MapError(f"reward offset {(px, py)} lands on a wall")
            cells[i] = REWARD

    sx, sy = template.start
    start = Pose(sx, sy, "E")
    if spec.reflect:
        cells = [
            cells[y * width + (width - 1 - x)]
            for y in range(height)
            for x in range(width)
        ]
        rooms = [
            rooms[y * width + (width - 1 - x)]
            for y in range(height)
            for x in range(width)
        ]
        start = Pose(width - 1 - sx, sy, "W")

    non_wall = sum(1 for c in cells if c != WALL)
    cue_legend = (
        {template.cue_colors[s]: f"reward-{s}" for s in template.cue_colors}
        if has_cues
        else None
    )
    map_id = spec.map_id or f"{spec.unit}_u{spec.n_units}" + ("_r" if spec.reflect else "")
    return GridMap(
        width,
        height,
        cells,
        start,
        timeout_steps=4 * non_wall,
        rooms=rooms,
        cue_legend=cue_legend,
        map_id=map_id,
    )


BUNDLED_SPECS = {
    "exp1_u2": EnvSpec(unit="exp1", n_units=2, map_id="exp1_u2"),
    "exp1_u2_r": EnvSpec(unit="exp1", n_units=2, reflect=True, map_id="exp1_u2_r"),
    "exp1_u5": EnvSpec(unit="exp1", n_units=5, map_id="exp1_u5"),
    "exp2_u3": EnvSpec(
        unit="exp2",
        n_units=3,
        cue_assignment=[(0, 0, (4, 0)), (1, 1, (5, 5)), (2, 1, (5, 5))],
        map_id="exp2_u3",
    ),
    "exp2_u5": EnvSpec(unit="exp2", n_units=5, seed=7, map_id="exp2_u5"),
}


def bundled_map(map_id: str) -> GridMap:
    spec = BUNDLED_SPECS.get(map_id)
    if spec is None:
        raise KeyError(f"unknown bundled map {map_id!r}")
    return gen_environment(spec)


def bundled_map_ids() -> list:
    return sorted(BUNDLED_SPECS)
