"""Map generator: a probabilistic grammar over region primitives.

Production rules and probabilities:

    flipH, flipV, rotate90           each 1/3
    hcat, vcat                       each 1/2
    root (exact target dimensions)   1
    terminal (pick a primitive)      uniform over the primitive set

The grammar as written is self-referential, so derivations are bounded by a
rule-application depth and terminals draw uniformly from the primitives.
Weights are exact rationals internally; duplicates (identical lattices) are
merged by summing weights.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .gridworld import cell_to_char
from .regions import Region

TRANSFORM_PROB = Fraction(1, 3)
COMPOSE_PROB = Fraction(1, 2)

FLIP_H = "FlipH"
FLIP_V = "FlipV"
ROTATE_90 = "Rotate90"
HCAT = "HCat"
VCAT = "VCat"


@dataclass
class GrammarConfig:
    max_depth: int = 6
    max_hypotheses: int = 256

    def to_dict(self) -> dict:
        return {"max_depth": self.max_depth, "max_hypotheses": self.max_hypotheses}

    @staticmethod
    def from_dict(d: dict) -> "GrammarConfig":
        return GrammarConfig(
            max_depth=int(d.get("max_depth", 6)),
            max_hypotheses=int(d.get("max_hypotheses", 256)),
        )


@dataclass(frozen=True)
class MapHypothesis:
    """A full-size candidate map completion."""

    width: int
    height: int
    cells: tuple
    weight: Fraction  # total derivation mass reaching this lattice
    posterior: Optional[float] = None

    @property
    def derivation_weight(self) -> float:
        return float(self.weight)

    def cell_at(self, x: int, y: int) -> int:
        return self.cells[y * self.width + x]

    def to_text(self) -> str:
        return "\n".join(
            "".join(cell_to_char(self.cells[y * self.width + x]) for x in range(self.width))
            for y in range(self.height)
        )


def _to_array(region: Region) -> np.ndarray:
    return np.array(region.cells, dtype=np.uint8).reshape(region.height, region.width)


def _from_array(arr: np.ndarray) -> Region:
    h, w = arr.shape
    return Region(w, h, tuple(int(v) for v in arr.ravel()))


def transform(region: Region, kind: str) -> Region:
    """Apply flipH / flipV / rotate90 (quarter turn counterclockwise)."""
    arr = _to_array(region)
    if kind == FLIP_H:
        out = arr[:, ::-1]
    elif kind == FLIP_V:
        out = arr[::-1, :]
    elif kind == ROTATE_90:
        out = np.rot90(arr)
    else:
        raise ValueError(f"unknown transform {kind}")
    return _from_array(out)


def compose(a: Region, b: Region, kind: str) -> Region:
    """Concatenate two regions; ``a`` is the left (hcat) or top (vcat) operand."""
    aa, bb = _to_array(a), _to_array(b)
    if kind == HCAT:
        if a.height != b.height:
            raise ValueError("hcat operands must share height")
        out = np.concatenate([aa, bb], axis=1)
    elif kind == VCAT:
        if a.width != b.width:
            raise ValueError("vcat operands must share width")
        out = np.concatenate([aa, bb], axis=0)
    else:
        raise ValueError(f"unknown composition {kind}")
    return _from_array(out)


def _dims_usable(w: int, h: int, s_x: int, s_y: int) -> bool:
    return (w <= s_x and h <= s_y) or (w <= s_y and h <= s_x)


def enumerate_completions(
    primitives: Sequence[Region], target: tuple, config: GrammarConfig
) -> list:
    """All distinct full-size lattices derivable within the depth bound.

    Bottom-up dynamic programming over (lattice, depth): depth-0 entries are
    the primitives at uniform terminal weight; each further depth applies the
    unary transforms (x 1/3) and binary concatenations (x 1/2) of previously
    derived entries.  Identical lattices merge by weight.  Returns hypotheses
    of exactly the target dimensions, ordered by descending weight then
    lexicographic serialization, truncated to ``config.max_hypotheses``.
    """
    if not primitives:
        raise ValueError("no primitives")
    s_x, s_y = target
    n = len(primitives)
    term_w = Fraction(1, n)

    # by_depth[d]: {(h, w, bytes): [array, weight]}
    def keyed(arr: np.ndarray):
        return (arr.shape[0], arr.shape[1], arr.tobytes())

    by_depth: list = [dict()]
    for p in primitives:
        arr = _to_array(p)
        k = keyed(arr)
        if k in by_depth[0]:
            by_depth[0][k][1] += term_w
        else:
            by_depth[0][k] = [arr, term_w]

    for d in range(1, config.max_depth + 1):
        level: dict = {}

        def add(arr, w):
            hh, ww = arr.shape
            if not _dims_usable(ww, hh, s_x, s_y):
                return
            k = keyed(arr)
            if k in level:
                level[k][1] += w
            else:
                level[k] = [np.ascontiguousarray(arr), w]

        for arr, w in by_depth[d - 1].values():
            add(arr[:, ::-1], w * TRANSFORM_PROB)
            add(arr[::-1, :], w * TRANSFORM_PROB)
            add(np.rot90(arr), w * TRANSFORM_PROB)
        for d1 in range(d):
            d2 = d - 1 - d1
            for arr_a, w_a in by_depth[d1].values():
                for arr_b, w_b in by_depth[d2].values():
                    if arr_a.shape[0] == arr_b.shape[0]:
                        add(
                            np.concatenate([arr_a, arr_b], axis=1),
                            w_a * w_b * COMPOSE_PROB,
                        )
                    if arr_a.shape[1] == arr_b.shape[1]:
                        add(
                            np.concatenate([arr_a, arr_b], axis=0),
                            w_a * w_b * COMPOSE_PROB,
                        )
        by_depth.append(level)

    total: dict = {}
    for level in by_depth:
        for (hh, ww, key), (arr, w) in level.items():
            if ww == s_x and hh == s_y:
                if key in total:
                    total[key][1] += w
                else:
                    total[key] = [arr, w]

    hyps = [
        MapHypothesis(s_x, s_y, tuple(int(v) for v in arr.ravel()), w)
        for arr, w in total.values()
    ]
    hyps.sort(key=lambda h: (-h.weight, bytes(h.cells)))
    return hyps[: config.max_hypotheses]


def dump_hypotheses(hyps: Sequence[MapHypothesis]) -> str:
    """Debug dump: one block per hypothesis plus its weight line."""
    blocks = []
    for h in hyps:
        blocks.append(f"weight {float(h.weight):.12g}\n{h.to_text()}")
    return "\n\n".join(blocks) + "\n"
