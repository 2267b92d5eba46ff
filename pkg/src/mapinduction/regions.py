"""Region extraction: rectangular submap candidates cut from the observed map."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from .gridworld import UNKNOWN, ObservedMap, cell_to_char


@dataclass
class RegionConfig:
    min_known_fraction: float = 0.5
    max_regions: int = 12
    # explicit (width, height) candidate list; None = composable dims of the map
    candidate_dims: Optional[Sequence[tuple]] = None

    def to_dict(self) -> dict:
        return {
            "min_known_fraction": self.min_known_fraction,
            "max_regions": self.max_regions,
            "candidate_dims": [list(d) for d in self.candidate_dims]
            if self.candidate_dims
            else None,
        }

    @staticmethod
    def from_dict(d: dict) -> "RegionConfig":
        dims = d.get("candidate_dims")
        return RegionConfig(
            min_known_fraction=float(d.get("min_known_fraction", 0.5)),
            max_regions=int(d.get("max_regions", 12)),
            candidate_dims=[tuple(x) for x in dims] if dims else None,
        )


@dataclass(frozen=True)
class Region:
    """A rectangular crop of the observed lattice (may contain unknown cells)."""

    width: int
    height: int
    cells: tuple  # row-major cell codes
    origins: tuple = ()  # (x, y) coordinates this content was cut from

    def cell_at(self, x: int, y: int) -> int:
        return self.cells[y * self.width + x]

    def known_fraction(self) -> float:
        return sum(1 for c in self.cells if c != UNKNOWN) / len(self.cells)

    def to_text(self) -> str:
        return "\n".join(
            "".join(cell_to_char(self.cells[y * self.width + x]) for x in range(self.width))
            for y in range(self.height)
        )

    def key(self) -> tuple:
        return (self.width, self.height, self.cells)


def candidate_dimensions(s_x: int, s_y: int) -> list:
    """Dimension pairs composable to (s_x, s_y) by repeated hcat/vcat,
    directly or after a quarter-turn."""
    dims = []
    for dx in range(1, max(s_x, s_y) + 1):
        for dy in range(1, max(s_x, s_y) + 1):
            if (s_x % dx == 0 and s_y % dy == 0) or (s_x % dy == 0 and s_y % dx == 0):
                dims.append((dx, dy))
    return dims


def crop(observed: ObservedMap, x0: int, y0: int, dx: int, dy: int) -> tuple:
    w = observed.width
    out = []
    for y in range(y0, y0 + dy):
        out.extend(observed.cells[y * w + x0 : y * w + x0 + dx])
    return tuple(out)


def extract_regions(observed: ObservedMap, config: RegionConfig) -> list:
    """Deduplicated rectangular crops meeting the known-cell threshold.

    Sorted by descending known fraction, then descending area, truncated to
    ``config.max_regions``.  Crops with identical content are merged (their
    origin list is retained).
    """
    if observed.known_count() == 0:
        raise ValueError("observed map has no known cells")
    s_x, s_y = observed.width, observed.height
    dims = config.candidate_dims or candidate_dimensions(s_x, s_y)
    by_content: dict = {}
    for dx, dy in dims:
        if dx > s_x or dy > s_y:
            continue
        area = dx * dy
        for y0 in range(s_y - dy + 1):
            for x0 in range(s_x - dx + 1):
                cells = crop(observed, x0, y0, dx, dy)
                known = sum(1 for c in cells if c != UNKNOWN)
                if known / area < config.min_known_fraction:
                    continue
                key = (dx, dy, cells)
                entry = by_content.get(key)
                if entry is None:
                    by_content[key] = [known / area, [(x0, y0)]]
                else:
                    entry[1].append((x0, y0))
    regions = [
        Region(dx, dy, cells, tuple(origins))
        for (dx, dy, cells), (frac, origins) in by_content.items()
    ]
    regions.sort(
        key=lambda r: (-r.known_fraction(), -r.width * r.height, r.cells)
    )
    return regions[: config.max_regions]
