"""CSV exports: evaluation-field heatmaps and equal-angle isolines.

Heatmaps sample a chosen scalar field on a regular pitch grid
(header ``x,y,value``); isolines sample the constant-visual-angle arcs in
front of a goal (header ``alpha,x,y,alpha_check``), each sample re-checked
through the angle computation.
"""

from __future__ import annotations

import csv
import math
from typing import IO, Iterable

from .evaluation import (
    AbilityParams,
    EvalPoint,
    defensive,
    defensive_pitch_gradient_raw,
    shooting_success,
)
from .geometry import (
    GeometryError,
    GoalFrame,
    PitchGeometry,
    Vec2,
    equal_angle_arc_points,
    visual_angle,
)

HEATMAP_FIELDS = ("shooting_success", "defensive", "gradient_magnitude")


class ExportError(ValueError):
    pass


def _grid(lo: float, hi: float, step: float) -> list[float]:
    count = int(math.floor((hi - lo) / step + 1e-9))
    return [lo + i * step for i in range(count + 1)]


def export_heatmap(field: str, frame: GoalFrame, pitch: PitchGeometry,
                   grid_step: float, out: IO[str], f: float = 1.0,
                   f_max: float = 1.0, xi: int = 0) -> int:
    """Write one row per grid node; returns the number of value rows.

    Nodes that coincide with a goalpost (where the visual angle is
    undefined) are skipped.
    """
    if field not in HEATMAP_FIELDS:
        raise ExportError(f"unknown field {field!r}; choose from {HEATMAP_FIELDS}")
    if not grid_step > 0:
        raise ExportError(f"grid step must be positive, got {grid_step}")
    ability = AbilityParams(f, f_max)
    posts = frame.posts(pitch)
    gx = frame.goal_line_x(pitch)
    writer = csv.writer(out)
    writer.writerow(["x", "y", "value"])
    rows = 0
    for x in _grid(-pitch.half_length, pitch.half_length, grid_step):
        for y in _grid(-pitch.half_width, pitch.half_width, grid_step):
            p = Vec2(x, y)
            try:
                if field == "gradient_magnitude":
                    value = defensive_pitch_gradient_raw(p, frame, pitch).length()
                else:
                    pt = EvalPoint(abs(x - gx), visual_angle(p, posts[0], posts[1]))
                    value = (shooting_success(pt, ability, xi)
                             if field == "shooting_success" else defensive(pt))
            except GeometryError:
                continue  # node sits exactly on a post
            writer.writerow([x, y, value])
            rows += 1
    return rows


def export_isolines(alphas: Iterable[float], frame: GoalFrame,
                    pitch: PitchGeometry, out: IO[str],
                    samples_per_arc: int = 256) -> int:
    """Sample each equal-angle arc inside the pitch; returns row count."""
    posts = frame.posts(pitch)
    writer = csv.writer(out)
    writer.writerow(["alpha", "x", "y", "alpha_check"])
    rows = 0
    for alpha in alphas:
        if not 0.0 < alpha < math.pi:
            raise ExportError(f"alpha must lie strictly in (0, pi), got {alpha}")
        for p in equal_angle_arc_points(alpha, posts, samples_per_arc):
            if not pitch.contains(p):
                continue
            writer.writerow([alpha, p.x, p.y, visual_angle(p, posts[0], posts[1])])
            rows += 1
    return rows
