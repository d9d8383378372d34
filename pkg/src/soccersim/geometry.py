"""Pitch coordinate system, goal geometry and the two parameters the whole
decision model is built on: perpendicular distance to a goal line and the
visual angle subtended by a goalpost pair.

Coordinate frame: origin at pitch centre, x toward the right goal, y spans
the width. Teams are mirrored by choosing a `GoalFrame`, never by flipping
coordinates, so evaluation code stays side-agnostic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

_POST_EPS = 1e-12


class GeometryError(ValueError):
    """Degenerate geometric input (observer on a post, bad angle range)."""


@dataclass(frozen=True, slots=True)
class Vec2:
    """Immutable 2D point/vector in metres. Components must be finite."""

    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise GeometryError(f"non-finite vector ({self.x}, {self.y})")

    def __add__(self, other: Vec2) -> Vec2:
        return Vec2(self.x + other.x, self.y + other.y)

    def __sub__(self, other: Vec2) -> Vec2:
        return Vec2(self.x - other.x, self.y - other.y)

    def __mul__(self, scalar: float) -> Vec2:
        return Vec2(self.x * scalar, self.y * scalar)

    __rmul__ = __mul__

    def __neg__(self) -> Vec2:
        return Vec2(-self.x, -self.y)

    def dot(self, other: Vec2) -> float:
        return self.x * other.x + self.y * other.y

    def cross(self, other: Vec2) -> float:
        """Scalar z-component of the 3D cross product."""
        return self.x * other.y - self.y * other.x

    def length(self) -> float:
        return math.hypot(self.x, self.y)

    def length_squared(self) -> float:
        return self.x * self.x + self.y * self.y

    def distance_to(self, other: Vec2) -> float:
        return math.hypot(self.x - other.x, self.y - other.y)

    def normalized(self) -> Vec2:
        n = self.length()
        if n < 1e-12:
            return Vec2(0.0, 0.0)
        return Vec2(self.x / n, self.y / n)

    def angle(self) -> float:
        """Bearing in radians from the +x axis."""
        return math.atan2(self.y, self.x)

    def clamped_to(self, max_length: float) -> Vec2:
        n = self.length()
        if n <= max_length:
            return self
        s = max_length / n
        return Vec2(self.x * s, self.y * s)

    @staticmethod
    def from_polar(length: float, angle: float) -> Vec2:
        return Vec2(length * math.cos(angle), length * math.sin(angle))


class Side(Enum):
    LEFT = "left"
    RIGHT = "right"

    @property
    def opposite(self) -> Side:
        return Side.RIGHT if self is Side.LEFT else Side.LEFT


@dataclass(frozen=True)
class PitchGeometry:
    """Pitch dimensions in metres.

    Defaults follow the usual 2D simulation conventions (105 x 68 field,
    14.02 m goal mouth); all configurable.
    """

    length: float = 105.0
    width: float = 68.0
    goal_width: float = 14.02

    def __post_init__(self):
        if self.length <= 0 or self.width <= 0:
            raise GeometryError("pitch dimensions must be positive")
        if not 0 < self.goal_width < self.width:
            raise GeometryError("goal width must lie in (0, pitch width)")
        gx, h = self.length / 2.0, self.goal_width / 2.0
        object.__setattr__(self, "_posts", {
            Side.RIGHT: (Vec2(gx, -h), Vec2(gx, h)),
            Side.LEFT: (Vec2(-gx, h), Vec2(-gx, -h)),
        })

    @property
    def half_length(self) -> float:
        return self.length / 2.0

    @property
    def half_width(self) -> float:
        return self.width / 2.0

    @property
    def half_goal_width(self) -> float:
        return self.goal_width / 2.0

    def goal_line_x(self, side: Side) -> float:
        return -self.half_length if side is Side.LEFT else self.half_length

    def goal_posts(self, side: Side) -> tuple[Vec2, Vec2]:
        """Posts of one goal, ordered so that arcs built from the pair
        (see `equal_angle_circle`) bulge into the field."""
        return self._posts[side]

    def goal_center(self, side: Side) -> Vec2:
        return Vec2(self.goal_line_x(side), 0.0)

    def contains(self, p: Vec2, tol: float = 1e-9) -> bool:
        return (abs(p.x) <= self.half_length + tol
                and abs(p.y) <= self.half_width + tol)


@dataclass(frozen=True, slots=True)
class GoalFrame:
    """Selects which goal defines distance and visual angle for a team."""

    attacked_side: Side

    def goal_line_x(self, pitch: PitchGeometry) -> float:
        return pitch.goal_line_x(self.attacked_side)

    def posts(self, pitch: PitchGeometry) -> tuple[Vec2, Vec2]:
        return pitch.goal_posts(self.attacked_side)

    def goal_center(self, pitch: PitchGeometry) -> Vec2:
        return pitch.goal_center(self.attacked_side)


def vertical_distance(p: Vec2, frame: GoalFrame, pitch: PitchGeometry) -> float:
    """Perpendicular distance from `p` to the goal line of `frame`."""
    if not pitch.contains(p):
        raise GeometryError(f"point {p} outside pitch bounding box")
    return abs(p.x - frame.goal_line_x(pitch))


def visual_angle(p: Vec2, post1: Vec2, post2: Vec2) -> float:
    """Angle at `p` subtended by the two posts, in [0, pi].

    Equivalent to arccos of the normalized dot product of the two
    post directions, but computed via atan2 so it stays accurate when the
    three points are nearly collinear.
    """
    ux, uy = post1.x - p.x, post1.y - p.y
    vx, vy = post2.x - p.x, post2.y - p.y
    if ux * ux + uy * uy < _POST_EPS * _POST_EPS:
        raise GeometryError("observer coincides with a goalpost")
    if vx * vx + vy * vy < _POST_EPS * _POST_EPS:
        raise GeometryError("observer coincides with a goalpost")
    cross = ux * vy - uy * vx
    dot = ux * vx + uy * vy
    return abs(math.atan2(cross, dot))


@dataclass(frozen=True, slots=True)
class EqualAngleCircle:
    """Circle through two posts whose field-side arc sees them at one angle."""

    center: Vec2
    radius: float


def equal_angle_circle(alpha: float, posts: tuple[Vec2, Vec2]) -> EqualAngleCircle:
    """Circle on which an arc of points sees the post segment under `alpha`.

    The arc lying on the +n side of the chord sees exactly `alpha`, where
    n is the 90-degree counterclockwise rotation of (post2 - post1). With
    posts ordered as `PitchGeometry.goal_posts` returns them, that arc
    bulges into the field.
    """
    if not 0.0 < alpha < math.pi:
        raise GeometryError(f"alpha must lie strictly in (0, pi), got {alpha}")
    a, b = posts
    chord = b - a
    w = chord.length()
    if w < _POST_EPS:
        raise GeometryError("coincident posts")
    mid = Vec2((a.x + b.x) / 2.0, (a.y + b.y) / 2.0)
    n = Vec2(-chord.y, chord.x).normalized()
    radius = w / (2.0 * math.sin(alpha))
    center = mid + n * (w / 2.0 / math.tan(alpha))
    return EqualAngleCircle(center=center, radius=radius)


def equal_angle_arc_points(alpha: float, posts: tuple[Vec2, Vec2],
                           count: int) -> list[Vec2]:
    """`count` interior samples of the arc that sees the posts under `alpha`.

    Endpoints (the posts themselves) are excluded; the angle there is
    undefined.
    """
    circle = equal_angle_circle(alpha, posts)
    a, b = posts
    c, r = circle.center, circle.radius
    chord = b - a
    n = Vec2(-chord.y, chord.x).normalized()
    # Extreme point of the alpha-seeing arc; always on the +n side.
    extreme = c + n * r
    theta_a = (a - c).angle()
    theta_b = (b - c).angle()
    theta_e = (extreme - c).angle()
    ccw = (theta_b - theta_a) % (2.0 * math.pi)
    e_off = (theta_e - theta_a) % (2.0 * math.pi)
    sweep = ccw if e_off <= ccw else ccw - 2.0 * math.pi
    pts = []
    for i in range(count):
        t = (i + 1) / (count + 1)
        theta = theta_a + t * sweep
        pts.append(Vec2(c.x + r * math.cos(theta), c.y + r * math.sin(theta)))
    return pts
