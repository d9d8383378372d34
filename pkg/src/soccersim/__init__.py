"""Deterministic 2D multi-agent soccer decision simulator.

Agents decide from two closed-form evaluation functions over goal distance
and goalpost visual angle; a seeded in-process engine supplies cycles,
noisy perception and an unreliable say channel.
"""

from .geometry import GoalFrame, PitchGeometry, Side, Vec2
from .evaluation import (
    AbilityParams,
    EvalPoint,
    believe,
    defensive,
    defensive_gradient_da,
    defensive_pitch_gradient,
    interference_xi,
    shooting_success,
)

__version__ = "0.1.0"

__all__ = [
    "AbilityParams",
    "EvalPoint",
    "GoalFrame",
    "PitchGeometry",
    "Side",
    "Vec2",
    "believe",
    "defensive",
    "defensive_gradient_da",
    "defensive_pitch_gradient",
    "interference_xi",
    "shooting_success",
    "__version__",
]
