"""One-way, unreliable, distance-degraded say channel.

A message reaches each of the 21 other players independently with
probability min(1, hear_range / distance); the sender gets nothing back.
Payloads are never corrupted, only lost, and never contain coordinates:
agents share either their own shot score or a bare tactic code.

Receivers judge trust with the inverse-square `believe` score; anything
below their threshold is discarded before it can influence a decision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Union

from .engine import PlayerId, WorldState
from .evaluation import believe
from .seeding import SeedStream


class CommsError(ValueError):
    pass


@dataclass(frozen=True, slots=True)
class ShootValue:
    """A teammate's own shot score, broadcast for pass targeting."""

    value: float

    def __post_init__(self):
        if not (math.isfinite(self.value) and 0.0 <= self.value <= 1.0):
            raise CommsError(f"shoot value must lie in [0, 1], got {self.value}")


@dataclass(frozen=True, slots=True)
class Signal:
    """A bare tactic code; meaning lives in the shared codebook only."""

    code: int

    def __post_init__(self):
        if not isinstance(self.code, int) or isinstance(self.code, bool):
            raise CommsError(f"signal code must be an int, got {self.code!r}")


Payload = Union[ShootValue, Signal]


@dataclass(frozen=True, slots=True)
class Message:
    sender: PlayerId
    cycle: int
    payload: Payload


@dataclass(frozen=True, slots=True)
class DeliveryRecord:
    """Audit row for one (message, receiver) delivery attempt."""

    message: Message
    receiver: PlayerId
    distance: float
    delivered: bool
    believed: bool = False

    def __post_init__(self):
        if self.believed and not self.delivered:
            raise CommsError("a message cannot be believed but not delivered")


def payload_to_dict(payload: Payload) -> dict:
    if isinstance(payload, ShootValue):
        return {"kind": "shoot_value", "value": payload.value}
    return {"kind": "signal", "code": payload.code}


def delivery_probability(distance: float, hear_range: float) -> float:
    if distance <= hear_range:
        return 1.0
    return hear_range / distance


def broadcast(msg: Message, world: WorldState, seeds: SeedStream,
              hear_range: float) -> list[DeliveryRecord]:
    """Attempt delivery of `msg` to every other player.

    Each pair gets its own tagged draw, so an outcome is a pure function
    of (seed, cycle, sender, receiver). The sender never receives an echo.
    """
    sender_state = world.player(msg.sender)
    sender_index = msg.sender.index
    records = []
    for p in world.players:
        if p.id == msg.sender:
            continue
        dist = sender_state.pos.distance_to(p.pos)
        prob = delivery_probability(dist, hear_range)
        delivered = prob >= 1.0 or seeds.uniform(
            "say", world.cycle, sender_index, p.id.index) < prob
        records.append(DeliveryRecord(message=msg, receiver=p.id,
                                      distance=dist, delivered=delivered))
    return records


def filter_believed(delivered: Iterable[tuple[Message, float]],
                    threshold: float) -> list[Message]:
    """Keep messages whose sender distance passes the trust cut.

    `delivered` pairs each message with the receiver's estimate of the
    sender's distance; messages with believe(distance) >= threshold
    survive, in their original order.
    """
    if not threshold > 0.0:
        raise CommsError(f"believe threshold must be positive, got {threshold}")
    return [msg for msg, dist in delivered if believe(dist) >= threshold]
