"""Grid partition of the pitch into role areas and 8-connected action areas.

The pitch is carved into a coarse lattice (3 columns of defense / middle /
attack bands by 5 rows, configurable). A formation name like "4-4-2" places
that many outfield roles in each column; every role may act in its home
cell plus the 8-connected neighbourhood, so midfielders end up with the
largest areas and play stays loosely stitched together.

Formations are built in a canonical orientation (own goal on the LEFT);
mirror the query point for the team defending the right goal.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from types import MappingProxyType
from typing import Mapping

from .geometry import PitchGeometry, Vec2

Cell = tuple[int, int]  # (row, col)

GOALKEEPER_ROLE = "GK"

#: Depth from the goal line and half-width of the goalkeeper's box.
GK_BOX_DEPTH = 16.5
GK_BOX_HALF_WIDTH = 20.16
GK_HOME_OFFSET = 5.0

_LINE_PREFIXES = ("DF", "MF", "FW")

#: Which of the 5 rows each line occupies, by player count; symmetric
#: about the central row.
_ROW_PLACEMENTS = {
    1: (2,),
    2: (1, 3),
    3: (1, 2, 3),
    4: (0, 1, 3, 4),
    5: (0, 1, 2, 3, 4),
}


class FormationError(ValueError):
    pass


class AreaClass(Enum):
    MAIN = "main"
    ASSISTANT = "assistant"
    OUTSIDE = "outside"


@dataclass(frozen=True)
class Formation:
    """Immutable role-to-cell assignment over a band grid."""

    name: str
    rows: int
    cols: int
    pitch: PitchGeometry
    assignment: Mapping[str, Cell]
    home_positions: Mapping[str, Vec2]
    gk_home: Vec2
    gk_box: tuple[Vec2, Vec2] = field(default=(Vec2(0, 0), Vec2(0, 0)))

    @property
    def cell_width(self) -> float:
        return self.pitch.length / self.cols

    @property
    def cell_height(self) -> float:
        return self.pitch.width / self.rows

    def outfield_roles(self) -> tuple[str, ...]:
        return tuple(self.assignment.keys())

    def roles(self) -> tuple[str, ...]:
        return (GOALKEEPER_ROLE,) + self.outfield_roles()

    def cell_center(self, cell: Cell) -> Vec2:
        row, col = cell
        x = -self.pitch.half_length + (col + 0.5) * self.cell_width
        y = -self.pitch.half_width + (row + 0.5) * self.cell_height
        return Vec2(x, y)

    def cell_of(self, p: Vec2) -> Cell:
        """Grid cell containing `p`; boundary points go to the smaller row
        index, then the smaller column index. Total over the pitch."""
        return (self._axis_index(p.y + self.pitch.half_width,
                                 self.cell_height, self.rows),
                self._axis_index(p.x + self.pitch.half_length,
                                 self.cell_width, self.cols))

    @staticmethod
    def _axis_index(offset: float, size: float, count: int) -> int:
        t = offset / size
        idx = int(t)
        if t == idx and idx > 0:
            idx -= 1  # boundary belongs to the lower cell
        return min(max(idx, 0), count - 1)

    def in_gk_box(self, p: Vec2) -> bool:
        lo, hi = self.gk_box
        return lo.x <= p.x <= hi.x and lo.y <= p.y <= hi.y


@dataclass(frozen=True)
class ActionArea:
    """A role's home cell plus its 8-connected neighbours."""

    owner: str
    home_cell: Cell
    cells: frozenset[Cell]
    formation: Formation

    def classify(self, p: Vec2) -> AreaClass:
        cell = self.formation.cell_of(p)
        if cell == self.home_cell:
            return AreaClass.MAIN
        if cell in self.cells:
            return AreaClass.ASSISTANT
        return AreaClass.OUTSIDE


def parse_formation_name(name: str) -> tuple[int, int, int]:
    parts = name.split("-")
    if len(parts) != 3:
        raise FormationError(f"unknown formation {name!r}: want 'D-M-F'")
    try:
        counts = tuple(int(p) for p in parts)
    except ValueError:
        raise FormationError(f"unknown formation {name!r}: non-numeric counts") from None
    if sum(counts) != 10:
        raise FormationError(f"unknown formation {name!r}: outfield counts must sum to 10")
    if any(c < 1 or c > 5 for c in counts):
        raise FormationError(f"unknown formation {name!r}: each line needs 1..5 players")
    return counts  # type: ignore[return-value]


def build_formation(name: str, pitch: PitchGeometry | None = None,
                    rows: int = 5, cols: int = 3) -> Formation:
    """Build the named formation over a rows x cols band grid.

    Canonical orientation: column 0 is the defensive band next to the own
    (left) goal. The goalkeeper lives outside the grid in a fixed box.
    """
    pitch = pitch or PitchGeometry()
    counts = parse_formation_name(name)
    if cols != len(counts):
        raise FormationError(f"{name!r} needs {len(counts)} columns, grid has {cols}")
    if rows != 5:
        raise FormationError("row placements are defined for 5-row grids")

    assignment: dict[str, Cell] = {}
    for col, (prefix, count) in enumerate(zip(_LINE_PREFIXES, counts)):
        for i, row in enumerate(_ROW_PLACEMENTS[count], start=1):
            assignment[f"{prefix}{i}"] = (row, col)

    gk_home = Vec2(-pitch.half_length + GK_HOME_OFFSET, 0.0)
    gk_box = (Vec2(-pitch.half_length, -GK_BOX_HALF_WIDTH),
              Vec2(-pitch.half_length + GK_BOX_DEPTH, GK_BOX_HALF_WIDTH))

    formation = Formation(
        name=name, rows=rows, cols=cols, pitch=pitch,
        assignment=MappingProxyType(assignment),
        home_positions=MappingProxyType({}),  # replaced below
        gk_home=gk_home, gk_box=gk_box,
    )
    homes = {role: formation.cell_center(cell) for role, cell in assignment.items()}
    homes[GOALKEEPER_ROLE] = gk_home
    object.__setattr__(formation, "home_positions", MappingProxyType(homes))
    return formation


def action_area(formation: Formation, role: str) -> ActionArea:
    """Home cell plus up to 8 neighbours, clipped at the grid edges."""
    if role == GOALKEEPER_ROLE:
        raise FormationError("the goalkeeper has a fixed box, not a grid area")
    try:
        home = formation.assignment[role]
    except KeyError:
        raise FormationError(f"unknown role {role!r} in {formation.name}") from None
    row, col = home
    cells = frozenset(
        (r, c)
        for r in range(max(row - 1, 0), min(row + 2, formation.rows))
        for c in range(max(col - 1, 0), min(col + 2, formation.cols))
    )
    return ActionArea(owner=role, home_cell=home, cells=cells, formation=formation)


def area_contains(area: ActionArea, p: Vec2) -> AreaClass:
    """Main for the home cell, Assistant for a neighbour, Outside otherwise."""
    return area.classify(p)


def mirror_x(p: Vec2) -> Vec2:
    """Map a pitch point into the canonical left-defending orientation."""
    return Vec2(-p.x, p.y)
