"""Closed-form evaluation functions driving every agent decision.

Three scalar models over goal distance d and visual angle alpha:

* shot quality  score(d, alpha, f, xi) in [0, 1], scaled by player ability
  f / f_max and divided down by the opponent interference level xi;
* defensive value of a location, the interference-free, ability-free term
  of the shot score;
* message trust as inverse squared distance between the communicating
  agents.

Plus the analytic gradient of the defensive field, both in (d, alpha)
coordinates and composed onto pitch coordinates for movement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

from .geometry import (
    GeometryError,
    GoalFrame,
    PitchGeometry,
    Vec2,
    visual_angle,
)

#: Distances below this are treated as co-location when scoring message
#: trust; keeps the inverse-square law finite.
BELIEVE_MIN_DISTANCE = 0.1

#: Composite pitch gradients with magnitude below this flag a stationary
#: point and come back as the zero vector.
GRADIENT_EPS = 1e-9


@dataclass(frozen=True, slots=True)
class EvalPoint:
    """A location reduced to the two model parameters."""

    d: float
    alpha: float

    def __post_init__(self):
        if not (math.isfinite(self.d) and self.d >= 0.0):
            raise ValueError(f"distance must be finite and >= 0, got {self.d}")
        if not (0.0 <= self.alpha <= math.pi):
            raise ValueError(f"visual angle must lie in [0, pi], got {self.alpha}")


@dataclass(frozen=True, slots=True)
class AbilityParams:
    """Shooter ability f, normalized by the league-wide maximum f_max."""

    f: float
    f_max: float

    def __post_init__(self):
        if not (math.isfinite(self.f_max) and self.f_max > 0.0):
            raise ValueError(f"f_max must be positive, got {self.f_max}")
        if not (math.isfinite(self.f) and 0.0 <= self.f <= self.f_max):
            raise ValueError(f"f must lie in [0, f_max], got {self.f}")


def _check_xi(xi: int) -> int:
    if isinstance(xi, bool) or not isinstance(xi, int) or xi < 0:
        raise ValueError(f"interference level must be a non-negative int, got {xi!r}")
    return xi


def shooting_success(pt: EvalPoint, ability: AbilityParams, xi: int = 0) -> float:
    """Shot quality score in [0, 1].

    The base term A = alpha / ((1+d)^2 pi) is topped up by the
    ability term B = f*alpha / (f_max*(1+d)*pi) acting on the remaining
    headroom, then the whole thing is divided by (1 + xi):

        { A + B*(1 - A) } / (1 + xi)

    Equals 1 exactly for (d=0, alpha=pi, xi=0) and 0 exactly for alpha=0.
    """
    _check_xi(xi)
    a = pt.alpha / ((1.0 + pt.d) ** 2 * math.pi)
    b = ability.f * pt.alpha / (ability.f_max * (1.0 + pt.d) * math.pi)
    return (a + b * (1.0 - a)) / (1.0 + xi)


def defensive(pt: EvalPoint) -> float:
    """Defensive value of a location: alpha / ((1+d)^2 pi), in [0, 1].

    Identical to the A-term of `shooting_success`; high where an attacker
    standing there would threaten most.
    """
    return pt.alpha / ((1.0 + pt.d) ** 2 * math.pi)


def defensive_gradient_da(pt: EvalPoint) -> tuple[float, float]:
    """Analytic gradient of `defensive` in (d, alpha) coordinates.

    First component -2*alpha / (pi*(1+d)^3) is always <= 0, second
    1 / (pi*(1+d)^2) always > 0: the value rises toward the goal line and
    with a widening angle.
    """
    dd = -2.0 * pt.alpha / (math.pi * (1.0 + pt.d) ** 3)
    da = 1.0 / (math.pi * (1.0 + pt.d) ** 2)
    return (dd, da)


def believe(dist: float, min_distance: float = BELIEVE_MIN_DISTANCE) -> float:
    """Trust score 1/d^2 for a message that travelled `dist` metres.

    Strictly decreasing in distance. Distances below `min_distance`
    (co-located agents) are clamped so the score stays finite.
    """
    if not math.isfinite(dist) or dist < 0.0:
        raise ValueError(f"distance must be finite and >= 0, got {dist}")
    d = max(dist, min_distance)
    return 1.0 / (d * d)


def interference_xi(shooter: Vec2, opponents: Iterable[Vec2],
                    posts: tuple[Vec2, Vec2], cutoff: float) -> int:
    """Interference level: opponents strictly inside the shot triangle
    (shooter, post, post) and no farther than `cutoff` from the shooter."""
    if not cutoff > 0.0:
        raise ValueError(f"cutoff must be positive, got {cutoff}")
    p1, p2 = posts
    sx, sy = shooter.x, shooter.y
    e1x, e1y = p1.x - sx, p1.y - sy
    e2x, e2y = p2.x - p1.x, p2.y - p1.y
    e3x, e3y = sx - p2.x, sy - p2.y
    cutoff_sq = cutoff * cutoff
    count = 0
    for opp in opponents:
        ox, oy = opp.x, opp.y
        dx, dy = ox - sx, oy - sy
        if dx * dx + dy * dy > cutoff_sq:
            continue
        s1 = e1x * dy - e1y * dx
        s2 = e2x * (oy - p1.y) - e2y * (ox - p1.x)
        s3 = e3x * (oy - p2.y) - e3y * (ox - p2.x)
        if (s1 > 0.0 and s2 > 0.0 and s3 > 0.0) or \
           (s1 < 0.0 and s2 < 0.0 and s3 < 0.0):
            count += 1
    return count


def _bearing_gradient(to_target_x: float, to_target_y: float) -> tuple[float, float]:
    # d/dp of atan2(t.y - p.y, t.x - p.x)
    r2 = to_target_x * to_target_x + to_target_y * to_target_y
    return (to_target_y / r2, -to_target_x / r2)


def defensive_pitch_gradient_raw(p: Vec2, frame: GoalFrame,
                                 pitch: PitchGeometry) -> Vec2:
    """Unnormalized pitch-coordinate gradient of p -> defensive(d(p), alpha(p)).

    Chain rule through the distance and visual-angle maps. On the open goal
    segment itself the field sits at its global maximum ridge and the
    gradient is returned as zero.
    """
    g1, g2 = frame.posts(pitch)
    gx = frame.goal_line_x(pitch)
    ux, uy = g1.x - p.x, g1.y - p.y
    vx, vy = g2.x - p.x, g2.y - p.y
    if ux * ux + uy * uy < 1e-18 or vx * vx + vy * vy < 1e-18:
        raise GeometryError("gradient undefined on a goalpost")

    d = abs(p.x - gx)
    lo, hi = min(g1.y, g2.y), max(g1.y, g2.y)
    if d < 1e-12 and lo < p.y < hi:
        return Vec2(0.0, 0.0)  # global-maximum ridge on the goal mouth

    alpha = visual_angle(p, g1, g2)
    dd, da = defensive_gradient_da(EvalPoint(d, alpha))

    grad_d_x = 0.0 if p.x == gx else math.copysign(1.0, p.x - gx)

    # atan2(cross(u, v), dot(u, v)) is the signed angle from u to v, so the
    # bearing difference theta_u - theta_v carries the opposite sign.
    phi = math.atan2(ux * vy - uy * vx, ux * vx + uy * vy)
    sign = -1.0 if phi >= 0.0 else 1.0
    tux, tuy = _bearing_gradient(ux, uy)
    tvx, tvy = _bearing_gradient(vx, vy)
    grad_alpha = Vec2(sign * (tux - tvx), sign * (tuy - tvy))

    return Vec2(dd * grad_d_x + da * grad_alpha.x, da * grad_alpha.y)


def defensive_pitch_gradient(p: Vec2, frame: GoalFrame,
                             pitch: PitchGeometry) -> Vec2:
    """Unit direction of steepest increase of the defensive field at `p`.

    Returns the zero vector when the gradient magnitude falls below
    `GRADIENT_EPS`, flagging a stationary point.
    """
    g = defensive_pitch_gradient_raw(p, frame, pitch)
    mag = g.length()
    if mag < GRADIENT_EPS:
        return Vec2(0.0, 0.0)
    return Vec2(g.x / mag, g.y / mag)
