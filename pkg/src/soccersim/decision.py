"""Per-agent, per-cycle decision rules.

With the ball: shoot once the shot score clears the critical threshold,
otherwise trigger a pre-agreed rendezvous tactic in a registered zone,
otherwise pass to a trusted teammate reporting a better score, otherwise
step toward the best nearby spot (a short dribble touch).

Without the ball, defending: intercept any ball inside the own action
area by simulating its decayed path, else slide along the defensive-field
gradient while the opponents attack, else hold the formation spot.

Coupled tactics communicate through bare codebook signals; the rendezvous
coordinates never travel over the channel.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from typing import Iterable, Optional, Sequence

from .comms import Message, ShootValue, Signal, filter_believed
from .engine import BallState, Command, Dash, EngineConfig, Kick, Noop, Percept
from .evaluation import (
    AbilityParams,
    EvalPoint,
    defensive_pitch_gradient,
    interference_xi,
    shooting_success,
)
from .formation import ActionArea, AreaClass, mirror_x
from .geometry import GeometryError, GoalFrame, PitchGeometry, Side, Vec2, visual_angle

#: Perceived distance to the ball below which a player is judged to be in
#: control, as a multiple of the true kickable margin (slack for noise).
CONTROL_SLACK = 1.5


class DecisionError(ValueError):
    pass


@dataclass(frozen=True)
class DecisionConfig:
    shoot_threshold: float = 0.6
    believe_threshold: float = 0.0004
    xi_cutoff: float = 15.0
    sample_radius: float = 10.0
    sample_count: int = 16
    sample_rings: int = 2
    pass_margin: float = 0.05
    pass_horizon: int = 50
    intercept_horizon: int = 50
    dribble_power: float = 0.06
    pass_overshoot: float = 1.2
    escape_patience: int = 5
    runner_radius: float = 30.0
    signal_ttl: int = 25

    def __post_init__(self):
        if not 0.0 < self.shoot_threshold <= 1.0:
            raise DecisionError(
                f"shoot threshold must lie in (0, 1], got {self.shoot_threshold}")
        positives = ("believe_threshold", "xi_cutoff", "sample_radius",
                     "sample_count", "sample_rings", "pass_margin",
                     "pass_horizon", "intercept_horizon", "dribble_power",
                     "pass_overshoot", "escape_patience", "runner_radius",
                     "signal_ttl")
        for name in positives:
            if getattr(self, name) <= 0:
                raise DecisionError(f"{name} must be positive")


class Rationale(Enum):
    SHOOT = "Shoot"
    PASS_TO_BETTER = "PassToBetter"
    MOVE_TO_BETTER = "MoveToBetter"
    INTERCEPT = "Intercept"
    GRADIENT_MOVE = "GradientMove"
    TACTIC_RUN = "TacticRun"
    TACTIC_PASS = "TacticPass"
    HOLD_AREA = "HoldArea"


_ALLOWED_BODIES = {
    Rationale.SHOOT: (Kick,),
    Rationale.PASS_TO_BETTER: (Kick,),
    Rationale.TACTIC_PASS: (Kick,),
    Rationale.MOVE_TO_BETTER: (Kick, Dash),
    Rationale.INTERCEPT: (Dash,),
    Rationale.GRADIENT_MOVE: (Dash,),
    Rationale.TACTIC_RUN: (Dash,),
    Rationale.HOLD_AREA: (Dash, Noop),
}


@dataclass(frozen=True, slots=True)
class AgentDecision:
    command: Command
    rationale: Rationale

    def __post_init__(self):
        if not isinstance(self.command.body, _ALLOWED_BODIES[self.rationale]):
            raise DecisionError(
                f"{self.rationale.value} cannot issue "
                f"{type(self.command.body).__name__}")


# --- coupled-tactic codebook -------------------------------------------------

class Tactic(Enum):
    VERTICAL_PASS_INCLINE_ARRIVE = "vertical_pass_incline_arrive"
    INCLINE_PASS_VERTICAL_ARRIVE = "incline_pass_vertical_arrive"


@dataclass(frozen=True, slots=True)
class TacticSignal:
    code: int
    tactic: Tactic
    zone: int


@dataclass(frozen=True, slots=True)
class Rect:
    x0: float
    y0: float
    x1: float
    y1: float

    def __post_init__(self):
        if self.x0 > self.x1 or self.y0 > self.y1:
            raise DecisionError(f"malformed zone rectangle {self}")

    def contains(self, p: Vec2) -> bool:
        return self.x0 <= p.x <= self.x1 and self.y0 <= p.y <= self.y1


@dataclass(frozen=True, slots=True)
class CodebookEntry:
    """One pre-agreed play: a trigger zone and a rendezvous point.

    `pass_target` is where the passer sends the ball, `run_target` where
    the runner goes; coupling is sound because both name the same spot.
    Coordinates are expressed for a team attacking the right goal.
    """

    code: int
    tactic: Tactic
    zone: Rect
    pass_target: Vec2
    run_target: Vec2


@dataclass(frozen=True)
class CoupledTacticTable:
    entries: tuple[CodebookEntry, ...] = field(default=())

    def __post_init__(self):
        codes = [e.code for e in self.entries]
        if len(codes) != len(set(codes)):
            raise DecisionError("duplicate tactic codes in codebook")

    def validate(self, pitch: PitchGeometry) -> None:
        for e in self.entries:
            if e.pass_target != e.run_target:
                raise DecisionError(
                    f"code {e.code}: passer and runner must rendezvous at one "
                    f"point, got {e.pass_target} vs {e.run_target}")
            for target in (e.pass_target, e.run_target):
                if not pitch.contains(target):
                    raise DecisionError(f"code {e.code}: target {target} off pitch")

    def entry(self, code: int) -> Optional[CodebookEntry]:
        for e in self.entries:
            if e.code == code:
                return e
        return None

    def entry_in_zone(self, canonical_pos: Vec2) -> Optional[CodebookEntry]:
        for e in self.entries:
            if e.zone.contains(canonical_pos):
                return e
        return None


def codebook_from_dict(data: dict) -> CoupledTacticTable:
    entries = []
    for raw in data["entries"]:
        entries.append(CodebookEntry(
            code=int(raw["code"]),
            tactic=Tactic(raw["tactic"]),
            zone=Rect(*raw["zone"]),
            pass_target=Vec2(*raw["pass_target"]),
            run_target=Vec2(*raw["run_target"]),
        ))
    return CoupledTacticTable(entries=tuple(entries))


def load_codebook(path: Optional[str] = None,
                  pitch: Optional[PitchGeometry] = None) -> CoupledTacticTable:
    """Load a codebook JSON file, or the packaged default when no path."""
    if path is None:
        text = resources.files("soccersim").joinpath(
            "data/default_codebook.json").read_text(encoding="utf-8")
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    table = codebook_from_dict(json.loads(text))
    table.validate(pitch or PitchGeometry())
    return table


def oriented_point(p: Vec2, attacking: Side) -> Vec2:
    """Map between pitch coordinates and the codebook's canonical
    attack-right orientation (an involution)."""
    return p if attacking is Side.RIGHT else mirror_x(p)


def clamp_to_pitch(p: Vec2, pitch: PitchGeometry, inset: float = 0.0) -> Vec2:
    return Vec2(min(max(p.x, -pitch.half_length + inset), pitch.half_length - inset),
                min(max(p.y, -pitch.half_width + inset), pitch.half_width - inset))


# --- geometric planning ops ---------------------------------------------------

def intercept_point(ball: BallState, start: Vec2, max_speed: float,
                    ball_decay: float, horizon: int,
                    kickable_margin: float = 1.0) -> Optional[tuple[Vec2, int]]:
    """Earliest cycle at which a chaser from `start` can reach the ball.

    Simulates the decayed ball path cycle by cycle; feasible at cycle t
    when the chaser's reach max_speed*t + kickable_margin covers the
    distance. Returns (meet point, cycle) or None within the horizon.
    """
    if horizon < 1:
        raise DecisionError(f"horizon must be >= 1, got {horizon}")
    pos, vel = ball.pos, ball.vel
    for t in range(1, horizon + 1):
        pos = pos + vel
        vel = vel * ball_decay
        if start.distance_to(pos) <= max_speed * t + kickable_margin:
            return pos, t
    return None


def _wrap_angle(a: float) -> float:
    return (a + math.pi) % (2.0 * math.pi) - math.pi


def aim_shot(shooter: Vec2, posts: tuple[Vec2, Vec2],
             opponents: Iterable[Vec2]) -> float:
    """Shot bearing: middle of the widest angular gap between obstacles
    inside the shot cone; straight at the goal center when it is empty."""
    p1, p2 = posts
    b1 = (p1 - shooter).angle()
    span = _wrap_angle((p2 - shooter).angle() - b1)
    cone = [opp for opp in opponents
            if interference_xi(shooter, (opp,), posts, math.inf)]
    if not cone or span == 0.0:
        center = Vec2((p1.x + p2.x) / 2.0, (p1.y + p2.y) / 2.0)
        return (center - shooter).angle()
    fractions = sorted({0.0, 1.0}.union(
        _wrap_angle((opp - shooter).angle() - b1) / span for opp in cone))
    best_width, best_mid = -1.0, 0.5
    for lo, hi in zip(fractions, fractions[1:]):
        if hi - lo > best_width + 1e-15:
            best_width, best_mid = hi - lo, (lo + hi) / 2.0
    return b1 + best_mid * span


def lead_pass(passer: Vec2, receiver_pos: Vec2, receiver_vel: Vec2,
              ball_kick_speed: float, ball_decay: float,
              horizon: int = 50) -> tuple[float, float]:
    """Kick direction and power meeting a constant-velocity receiver.

    Picks the earliest cycle at which a legal power (<= 1) lands the ball
    exactly on the receiver's projected position; falls back to a direct
    rolled pass at the current position when no meet is reachable.
    """
    if receiver_pos == passer:
        raise DecisionError("receiver must be distinct from passer")
    for t in range(1, horizon + 1):
        meet = receiver_pos + receiver_vel * t
        dist = passer.distance_to(meet)
        if dist < 1e-9:
            continue
        travel_fraction = (1.0 - ball_decay ** t) / (1.0 - ball_decay)
        speed_needed = dist / travel_fraction
        power = speed_needed / ball_kick_speed
        if power <= 1.0:
            return (meet - passer).angle(), power
    dist = passer.distance_to(receiver_pos)
    power = min(1.0, dist * (1.0 - ball_decay) / ball_kick_speed)
    return (receiver_pos - passer).angle(), power


def stop_at_power(distance: float, ball_kick_speed: float, ball_decay: float,
                  overshoot: float = 1.0) -> float:
    """Kick power whose total rolled distance is overshoot*distance."""
    return min(1.0, distance * (1.0 - ball_decay) * overshoot / ball_kick_speed)


# --- percept digestion --------------------------------------------------------

def split_seen(percept: Percept) -> tuple[list, list[Vec2]]:
    """(teammates as (id, pos), opponent positions) from one percept."""
    mine = percept.observer.team
    teammates, opponents = [], []
    for pid, pos in percept.seen_players:
        if pid.team == mine:
            teammates.append((pid, pos))
        else:
            opponents.append(pos)
    return teammates, opponents


def shoot_value_at(pos: Vec2, opponents: Sequence[Vec2], ability: AbilityParams,
                   frame: GoalFrame, pitch: PitchGeometry,
                   config: DecisionConfig) -> float:
    """Shot score of standing at `pos` given the perceived opposition."""
    posts = frame.posts(pitch)
    d = abs(pos.x - frame.goal_line_x(pitch))
    alpha = visual_angle(pos, posts[0], posts[1])
    xi = interference_xi(pos, opponents, posts, config.xi_cutoff)
    return shooting_success(EvalPoint(d, alpha), ability, xi)


def believed_shoot_reports(percept: Percept, config: DecisionConfig) -> list:
    """Trusted teammate shot reports as (sender, value, perceived position).

    Distance for the trust cut is measured to the sender's perceived
    position; reports from unseen senders cannot be judged and are dropped.
    """
    mine = percept.observer.team
    reports = []
    for msg in percept.heard:
        if msg.sender.team != mine or not isinstance(msg.payload, ShootValue):
            continue
        sender_pos = next((pos for pid, pos in percept.seen_players
                           if pid == msg.sender), None)
        if sender_pos is None:
            continue
        dist = percept.self_pos.distance_to(sender_pos)
        if filter_believed([(msg, dist)], config.believe_threshold):
            reports.append((msg.sender, msg.payload.value, sender_pos))
    return reports


def believed_signals(percept: Percept, config: DecisionConfig,
                     table: CoupledTacticTable) -> list[tuple]:
    """Trusted teammate tactic signals as (sender, entry)."""
    mine = percept.observer.team
    out = []
    for msg in percept.heard:
        if msg.sender.team != mine or not isinstance(msg.payload, Signal):
            continue
        entry = table.entry(msg.payload.code)
        if entry is None:
            continue
        sender_pos = next((pos for pid, pos in percept.seen_players
                           if pid == msg.sender), None)
        if sender_pos is None:
            continue
        dist = percept.self_pos.distance_to(sender_pos)
        if filter_believed([(msg, dist)], config.believe_threshold):
            out.append((msg.sender, entry))
    return out


# --- decision ops --------------------------------------------------------------

def should_broadcast(percept: Percept, frame: GoalFrame,
                     pitch: PitchGeometry) -> bool:
    """Broadcast own shot score only when an opponent shows inside the own
    goal-view cone; an empty cone means the agent may be past the defence
    (offside) and stays silent."""
    _, opponents = split_seen(percept)
    if not opponents:
        return False
    posts = frame.posts(pitch)
    return interference_xi(percept.self_pos, opponents, posts, math.inf) > 0


def decide_offense(percept: Percept, ability: AbilityParams, frame: GoalFrame,
                   pitch: PitchGeometry, config: DecisionConfig,
                   engine_cfg: EngineConfig) -> AgentDecision:
    """Ball-holder priority: shoot above threshold, else pass to a trusted
    better-placed teammate, else dribble toward the best sampled spot."""
    teammates, opponents = split_seen(percept)
    me = percept.self_pos
    posts = frame.posts(pitch)
    value = shoot_value_at(me, opponents, ability, frame, pitch, config)

    if value > config.shoot_threshold:
        direction = aim_shot(me, posts, opponents)
        return AgentDecision(Command(Kick(1.0, direction)), Rationale.SHOOT)

    reports = believed_shoot_reports(percept, config)
    if reports:
        sender, best_value, sender_pos = max(
            reports, key=lambda r: (r[1], -r[0].index))
        if best_value > value + config.pass_margin:
            direction, power = lead_pass(
                me, sender_pos, Vec2(0.0, 0.0),
                engine_cfg.ball_kick_speed, engine_cfg.ball_decay,
                config.pass_horizon)
            return AgentDecision(Command(Kick(power, direction)),
                                 Rationale.PASS_TO_BETTER)

    best_pos, best_val = None, value
    inset = engine_cfg.kickable_margin / 2.0
    for ring in range(1, config.sample_rings + 1):
        radius = config.sample_radius * ring / config.sample_rings
        for j in range(config.sample_count):
            angle = 2.0 * math.pi * j / config.sample_count
            cand = clamp_to_pitch(Vec2(me.x + radius * math.cos(angle),
                                       me.y + radius * math.sin(angle)),
                                  pitch, inset)
            if cand.distance_to(me) < 0.25:
                continue
            try:
                v = shoot_value_at(cand, opponents, ability, frame, pitch, config)
            except GeometryError:
                continue  # candidate fell exactly on a post
            if v > best_val + 1e-12:
                best_val, best_pos = v, cand
    if best_pos is not None:
        # short touch from where the ball actually lies, rolling out at
        # the chosen spot rather than past it
        ball = percept.ball_pos
        distance = ball.distance_to(best_pos)
        if distance < 1e-9:
            return AgentDecision(Command(Dash(Vec2(0.0, 0.0))),
                                 Rationale.MOVE_TO_BETTER)
        power = min(config.dribble_power,
                    stop_at_power(distance, engine_cfg.ball_kick_speed,
                                  engine_cfg.ball_decay))
        return AgentDecision(Command(Kick(power, (best_pos - ball).angle())),
                             Rationale.MOVE_TO_BETTER)
    return AgentDecision(Command(Dash(Vec2(0.0, 0.0))), Rationale.MOVE_TO_BETTER)


def trigger_coupled_tactic(percept: Percept, config: DecisionConfig,
                           table: CoupledTacticTable, frame: GoalFrame,
                           pitch: PitchGeometry, engine_cfg: EngineConfig
                           ) -> Optional[tuple[TacticSignal, AgentDecision]]:
    """Fire a pre-agreed play when standing in a registered zone with a
    plausible runner around: say the bare code and send the ball to the
    rendezvous point. Returns None when no entry applies."""
    attacking = frame.attacked_side
    canon = oriented_point(percept.self_pos, attacking)
    entry = table.entry_in_zone(canon)
    if entry is None:
        return None
    run_target = oriented_point(entry.run_target, attacking)
    teammates, _ = split_seen(percept)
    if not teammates:
        return None
    nearest = min(pos.distance_to(run_target) for _, pos in teammates)
    if nearest > config.runner_radius:
        return None
    pass_target = oriented_point(entry.pass_target, attacking)
    me = percept.self_pos
    power = stop_at_power(me.distance_to(pass_target),
                          engine_cfg.ball_kick_speed, engine_cfg.ball_decay,
                          config.pass_overshoot)
    msg = Message(percept.observer, percept.cycle, Signal(entry.code))
    command = Command(Kick(power, (pass_target - me).angle()), say=msg)
    signal = TacticSignal(code=entry.code, tactic=entry.tactic, zone=entry.code)
    return signal, AgentDecision(command, Rationale.TACTIC_PASS)


def decide_defense(percept: Percept, area: ActionArea, home_pos: Vec2,
                   defends: Side, config: DecisionConfig,
                   pitch: PitchGeometry, engine_cfg: EngineConfig,
                   stuck_cycles: int = 0) -> AgentDecision:
    """Defensive priority: intercept a ball inside the own area, else move
    along the defensive gradient while the opponents attack, else hold the
    formation spot.

    A defender stalled on a gradient stationary point for
    `config.escape_patience` cycles falls back to holding its area; the
    interception branch always outranks the stall.
    """
    me = percept.self_pos
    ball = percept.ball_pos
    max_speed = engine_cfg.player_max_speed

    canonical_ball = ball if defends is Side.LEFT else mirror_x(ball)
    if area.classify(canonical_ball) is not AreaClass.OUTSIDE:
        sol = intercept_point(BallState(ball, percept.ball_vel), me,
                              max_speed, engine_cfg.ball_decay,
                              config.intercept_horizon,
                              engine_cfg.kickable_margin)
        target = sol[0] if sol else ball
        target = Vec2(min(max(target.x, -pitch.half_length), pitch.half_length),
                      min(max(target.y, -pitch.half_width), pitch.half_width))
        return AgentDecision(
            Command(Dash(((target - me)).clamped_to(max_speed))),
            Rationale.INTERCEPT)

    toward_own = ball.x < 0.0 if defends is Side.LEFT else ball.x > 0.0
    vel_toward_own = (percept.ball_vel.x < 0.0 if defends is Side.LEFT
                      else percept.ball_vel.x > 0.0)
    if toward_own or vel_toward_own:
        try:
            direction = defensive_pitch_gradient(me, GoalFrame(defends), pitch)
        except GeometryError:
            direction = Vec2(0.0, 0.0)
        if direction.length_squared() > 0.0:
            return AgentDecision(Command(Dash(direction * max_speed)),
                                 Rationale.GRADIENT_MOVE)
        if stuck_cycles < config.escape_patience:
            return AgentDecision(Command(Dash(Vec2(0.0, 0.0))),
                                 Rationale.GRADIENT_MOVE)
        # fall through: stalled long enough, go restore shape

    return AgentDecision(
        Command(Dash((home_pos - me).clamped_to(max_speed))),
        Rationale.HOLD_AREA)
