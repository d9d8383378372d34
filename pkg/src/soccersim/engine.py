"""Deterministic discrete-cycle world: 22 players, one ball.

Kinematics are intentionally simple (velocity decay for the ball, bounded
acceleration for players): the decision model only consumes positions and
angles. Every source of randomness hangs off a `SeedStream`, so a (seed,
config) pair fully determines a match.

Per-cycle order inside `Engine.step`:

1. resolve at most one successful kick (closest in-range kicker wins),
2. integrate the ball (move, then decay), reflecting at boundaries and
   detecting goals on the swept segment,
3. integrate players toward their dash targets,
4. recompute possession,
5. broadcast say messages for delivery at the start of the next cycle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Mapping, Optional, Union

import numpy as np

from .geometry import PitchGeometry, Side, Vec2
from .seeding import SeedStream

TEAMS = ("home", "away")
SHIRTS = tuple(range(1, 12))

#: Side each team attacks. Fixed convention; teams are otherwise symmetric.
ATTACK_SIDE = {"home": Side.RIGHT, "away": Side.LEFT}


class EngineError(ValueError):
    pass


@dataclass(frozen=True, slots=True)
class PlayerId:
    team: str
    shirt: int
    #: Canonical slot in WorldState.players (home 0-10, away 11-21).
    index: int = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        if self.team not in TEAMS:
            raise EngineError(f"unknown team {self.team!r}")
        if self.shirt not in SHIRTS:
            raise EngineError(f"shirt must be 1..11, got {self.shirt}")
        object.__setattr__(
            self, "index", (0 if self.team == "home" else 11) + self.shirt - 1)

    def __str__(self) -> str:
        return f"{self.team}-{self.shirt}"

    @staticmethod
    def parse(text: str) -> "PlayerId":
        team, _, shirt = text.partition("-")
        return PlayerId(team, int(shirt))


ALL_PLAYER_IDS = tuple(PlayerId(t, s) for t in TEAMS for s in SHIRTS)


@dataclass(frozen=True, slots=True)
class PlayerState:
    id: PlayerId
    pos: Vec2
    vel: Vec2
    facing: float = 0.0
    role: str = ""


@dataclass(frozen=True, slots=True)
class BallState:
    pos: Vec2
    vel: Vec2


@dataclass(frozen=True, slots=True)
class WorldState:
    """Complete, immutable simulation state for one cycle."""

    cycle: int
    players: tuple[PlayerState, ...]
    ball: BallState
    score: tuple[int, int] = (0, 0)
    possession: Optional[PlayerId] = None

    def __post_init__(self):
        if len(self.players) != 22:
            raise EngineError(f"expected 22 players, got {len(self.players)}")
        for expected, p in zip(ALL_PLAYER_IDS, self.players):
            if p.id != expected:
                raise EngineError(
                    f"players out of canonical order: slot for {expected} holds {p.id}")

    def player(self, pid: PlayerId) -> PlayerState:
        return self.players[pid.index]


# --- commands ---------------------------------------------------------------

@dataclass(frozen=True, slots=True)
class Dash:
    """Accelerate toward a world-frame target velocity (m/cycle)."""
    target_vel: Vec2


@dataclass(frozen=True, slots=True)
class Kick:
    power: float
    direction: float

    def __post_init__(self):
        if not (math.isfinite(self.power) and 0.0 <= self.power <= 1.0):
            raise EngineError(f"kick power must lie in [0, 1], got {self.power}")
        if not math.isfinite(self.direction):
            raise EngineError("kick direction must be finite")


@dataclass(frozen=True, slots=True)
class Noop:
    pass


Body = Union[Dash, Kick, Noop]


@dataclass(frozen=True, slots=True)
class Command:
    """One body action per cycle, with an optional say message riding along
    (the say channel is independent of locomotion, as on the real server)."""

    body: Body
    say: Optional["Message"] = None  # noqa: F821  (defined in comms)


NOOP = Command(Noop())


@dataclass(frozen=True, slots=True)
class Percept:
    """One agent's noise-corrupted view of a cycle.

    Own position and velocity are exact; every other coordinate carries
    per-axis uniform noise bounded by noise_factor times the true distance
    to the observed object. `heard` holds messages delivered this cycle.
    """

    observer: PlayerId
    cycle: int
    self_pos: Vec2
    self_vel: Vec2
    seen_players: tuple[tuple[PlayerId, Vec2], ...]
    ball_pos: Vec2
    ball_vel: Vec2
    heard: tuple = ()


@dataclass(frozen=True)
class EngineConfig:
    pitch: PitchGeometry = field(default_factory=PitchGeometry)
    ball_decay: float = 0.94
    player_max_speed: float = 1.0
    player_max_accel: float = 0.3
    ball_kick_speed: float = 2.7
    kickable_margin: float = 1.0
    noise_enabled: bool = True
    noise_factor: float = 0.1
    hear_range: float = 30.0
    kickoff_offset: float = 0.5


@dataclass(frozen=True)
class StepResult:
    world: WorldState
    delivery_records: tuple = ()
    inboxes: Mapping[PlayerId, tuple] = field(default_factory=dict)
    goal_team: Optional[str] = None
    kicker: Optional[PlayerId] = None


def snapshot(world: WorldState) -> WorldState:
    """Read-only per-cycle view for deciders.

    WorldState is already deeply immutable, so the snapshot is the state
    itself; derived worlds are always fresh objects.
    """
    return world


def world_to_dict(world: WorldState) -> dict:
    return {
        "cycle": world.cycle,
        "score": list(world.score),
        "possession": str(world.possession) if world.possession else None,
        "ball": {"pos": [world.ball.pos.x, world.ball.pos.y],
                 "vel": [world.ball.vel.x, world.ball.vel.y]},
        "players": [
            {"id": str(p.id), "pos": [p.pos.x, p.pos.y],
             "vel": [p.vel.x, p.vel.y], "facing": p.facing, "role": p.role}
            for p in world.players
        ],
    }


def world_from_dict(data: dict) -> WorldState:
    players = tuple(
        PlayerState(
            id=PlayerId.parse(entry["id"]),
            pos=Vec2(*entry["pos"]),
            vel=Vec2(*entry["vel"]),
            facing=entry["facing"],
            role=entry["role"],
        )
        for entry in data["players"]
    )
    possession = data["possession"]
    return WorldState(
        cycle=data["cycle"],
        players=players,
        ball=BallState(Vec2(*data["ball"]["pos"]), Vec2(*data["ball"]["vel"])),
        score=tuple(data["score"]),
        possession=PlayerId.parse(possession) if possession else None,
    )


def find_possession(players: tuple[PlayerState, ...], ball_pos: Vec2,
                    margin: float) -> Optional[PlayerId]:
    """Nearest player within the kickable margin.

    Ties break on lower shirt number, then home before away, so repeat runs
    agree bit for bit.
    """
    best = None
    for p in players:
        dist = p.pos.distance_to(ball_pos)
        if dist <= margin:
            key = (dist, p.id.shirt, 0 if p.id.team == "home" else 1)
            if best is None or key < best[0]:
                best = (key, p.id)
    return best[1] if best else None


class Engine:
    """Owns the step function and the reset geometry for one match."""

    def __init__(self, config: EngineConfig, seeds: SeedStream,
                 home_positions: Mapping[PlayerId, Vec2],
                 roles: Optional[Mapping[PlayerId, str]] = None):
        missing = [pid for pid in ALL_PLAYER_IDS if pid not in home_positions]
        if missing:
            raise EngineError(f"home positions missing for {missing[:3]}...")
        self.config = config
        self.seeds = seeds
        self.home_positions = dict(home_positions)
        self.roles = dict(roles) if roles else {pid: "" for pid in ALL_PLAYER_IDS}
        self._noise_cycle: Optional[int] = None
        self._noise: Optional[list] = None

    # -- construction ---------------------------------------------------

    def kickoff_world(self, cycle: int = 0, score: tuple[int, int] = (0, 0),
                      kicking_team: str = "home") -> WorldState:
        players = tuple(
            PlayerState(id=pid, pos=self.home_positions[pid], vel=Vec2(0.0, 0.0),
                        facing=0.0 if pid.team == "home" else math.pi,
                        role=self.roles[pid])
            for pid in ALL_PLAYER_IDS
        )
        # Nudge the ball into the kicking team's half so they reach it first.
        offset = -self.config.kickoff_offset if kicking_team == "home" else \
            self.config.kickoff_offset
        ball = BallState(Vec2(offset, 0.0), Vec2(0.0, 0.0))
        possession = find_possession(players, ball.pos, self.config.kickable_margin)
        return WorldState(cycle=cycle, players=players, ball=ball,
                          score=score, possession=possession)

    # -- stepping ---------------------------------------------------------

    def step(self, world: WorldState, commands: Mapping[PlayerId, Command]) -> StepResult:
        cfg = self.config
        if set(commands) != set(ALL_PLAYER_IDS):
            missing = set(ALL_PLAYER_IDS) - set(commands)
            extra = set(commands) - set(ALL_PLAYER_IDS)
            raise EngineError(
                f"need exactly one command per player (missing {sorted(map(str, missing))}, "
                f"unknown {sorted(map(str, extra))})")

        # 1. kicks: closest in-range kicker wins; the rest have no effect
        kicker = None
        ball_vel = world.ball.vel
        best_key = None
        for pid, cmd in commands.items():
            if isinstance(cmd.body, Kick):
                dist = world.player(pid).pos.distance_to(world.ball.pos)
                if dist <= cfg.kickable_margin:
                    key = (dist, pid.shirt, 0 if pid.team == "home" else 1)
                    if best_key is None or key < best_key:
                        best_key = key
                        kicker = pid
        if kicker is not None:
            kick = commands[kicker].body
            speed = kick.power * cfg.ball_kick_speed
            ball_vel = Vec2(speed * math.cos(kick.direction),
                            speed * math.sin(kick.direction))

        # 2. ball: move, detect goal on the swept segment, reflect, decay
        old_pos = world.ball.pos
        new_pos = old_pos + ball_vel
        goal_team = self._goal_crossed(old_pos, new_pos)
        if goal_team is not None:
            home_goals, away_goals = world.score
            if goal_team == "home":
                home_goals += 1
            else:
                away_goals += 1
            reset = self.kickoff_world(
                cycle=world.cycle + 1, score=(home_goals, away_goals),
                kicking_team="away" if goal_team == "home" else "home")
            return StepResult(world=reset, goal_team=goal_team, kicker=kicker,
                              **self._comms(world, commands))

        new_pos, ball_vel = self._reflect(new_pos, ball_vel)
        ball = BallState(new_pos, ball_vel * cfg.ball_decay)

        # 3. players: bounded acceleration toward the dash target
        players = tuple(self._move_player(p, commands[p.id]) for p in world.players)

        possession = find_possession(players, ball.pos, cfg.kickable_margin)
        new_world = WorldState(cycle=world.cycle + 1, players=players, ball=ball,
                               score=world.score, possession=possession)
        return StepResult(world=new_world, kicker=kicker,
                          **self._comms(world, commands))

    def _move_player(self, p: PlayerState, cmd: Command) -> PlayerState:
        cfg = self.config
        if isinstance(cmd.body, Dash):
            target = cmd.body.target_vel.clamped_to(cfg.player_max_speed)
        else:
            target = Vec2(0.0, 0.0)  # kicking/idle players bleed speed
        if (target.x == 0.0 and target.y == 0.0
                and p.vel.x == 0.0 and p.vel.y == 0.0):
            return p  # already at rest
        dv = (target - p.vel).clamped_to(cfg.player_max_accel)
        vel = (p.vel + dv).clamped_to(cfg.player_max_speed)
        pitch = cfg.pitch
        pos = Vec2(
            min(max(p.pos.x + vel.x, -pitch.half_length), pitch.half_length),
            min(max(p.pos.y + vel.y, -pitch.half_width), pitch.half_width),
        )
        facing = vel.angle() if vel.length_squared() > 1e-12 else p.facing
        return PlayerState(id=p.id, pos=pos, vel=vel, facing=facing, role=p.role)

    def _goal_crossed(self, old: Vec2, new: Vec2) -> Optional[str]:
        pitch = self.config.pitch
        for side, scorer in ((Side.RIGHT, "home"), (Side.LEFT, "away")):
            gx = pitch.goal_line_x(side)
            if old.x == new.x:
                continue
            s = (gx - old.x) / (new.x - old.x)
            if 0.0 < s <= 1.0:
                y_cross = old.y + s * (new.y - old.y)
                crossing_out = (new.x - old.x > 0) if side is Side.RIGHT else \
                    (new.x - old.x < 0)
                if crossing_out and abs(y_cross) < pitch.half_goal_width:
                    return scorer
        return None

    def _reflect(self, pos: Vec2, vel: Vec2) -> tuple[Vec2, Vec2]:
        # Touchlines and the goal lines outside the goal mouth bounce the
        # ball inward; keeps play continuous without throw-ins or corners.
        pitch = self.config.pitch
        x, y = pos.x, pos.y
        vx, vy = vel.x, vel.y
        if abs(x) > pitch.half_length:
            x = math.copysign(2.0 * pitch.half_length, x) - x
            vx = -vx
        if abs(y) > pitch.half_width:
            y = math.copysign(2.0 * pitch.half_width, y) - y
            vy = -vy
        return Vec2(x, y), Vec2(vx, vy)

    # -- communication -----------------------------------------------------

    def _comms(self, world: WorldState, commands: Mapping[PlayerId, Command]) -> dict:
        says = [(pid, cmd.say) for pid, cmd in commands.items() if cmd.say is not None]
        if not says:
            return {"delivery_records": (), "inboxes": {}}
        from .comms import broadcast  # local import to avoid a cycle

        says.sort(key=lambda item: item[0].index)
        records = []
        inboxes: dict[PlayerId, list] = {}
        for pid, msg in says:
            for rec in broadcast(msg, world, self.seeds, self.config.hear_range):
                records.append(rec)
                if rec.delivered:
                    inboxes.setdefault(rec.receiver, []).append(rec.message)
        return {
            "delivery_records": tuple(records),
            "inboxes": {pid: tuple(msgs) for pid, msgs in inboxes.items()},
        }

    # -- perception --------------------------------------------------------

    def _noise_tensor(self, cycle: int) -> list:
        """Relative noise for the whole cycle, shape (observer 22,
        object 24, axis 2): object slots 0-21 are players, 22 the ball
        position, 23 the ball velocity. Pure function of (seed, cycle);
        an observer's slice never depends on who else perceived.
        """
        if self._noise_cycle != cycle:
            gen = np.random.Generator(
                np.random.PCG64(self.seeds.derive("see", cycle)))
            nf = self.config.noise_factor
            # plain floats: cheaper to index and safe to serialize downstream
            self._noise = gen.uniform(-nf, nf, (22, 24, 2)).tolist()
            self._noise_cycle = cycle
        return self._noise

    def perceive(self, world: WorldState, observer: PlayerId,
                 heard: tuple = (), detail: str = "full") -> Percept:
        """Noisy view of `world` for one observer.

        Noise is uniform per axis in +-noise_factor*distance, keyed by
        (seed, cycle, observer slot), so percepts are reproducible and
        observers never share draws. `detail="ball"` skips player
        observations for policies that ignore them.
        """
        cfg = self.config
        me = world.player(observer)
        mx, my = me.pos.x, me.pos.y
        seen_players: tuple = ()
        if cfg.noise_enabled:
            noise = self._noise_tensor(world.cycle)[observer.index]
            if detail == "full":
                seen = []
                for slot, p in enumerate(world.players):
                    if p is me:
                        continue
                    pos = p.pos
                    dist = math.hypot(pos.x - mx, pos.y - my)
                    rel = noise[slot]
                    seen.append((p.id, Vec2(pos.x + rel[0] * dist,
                                            pos.y + rel[1] * dist)))
                seen_players = tuple(seen)
            bpos, bvel = world.ball.pos, world.ball.vel
            dist = math.hypot(bpos.x - mx, bpos.y - my)
            rel_pos, rel_vel = noise[22], noise[23]
            ball_pos = Vec2(bpos.x + rel_pos[0] * dist, bpos.y + rel_pos[1] * dist)
            ball_vel = Vec2(bvel.x + rel_vel[0] * dist, bvel.y + rel_vel[1] * dist)
        else:
            if detail == "full":
                seen_players = tuple((p.id, p.pos) for p in world.players
                                     if p.id != observer)
            ball_pos = world.ball.pos
            ball_vel = world.ball.vel
        return Percept(observer=observer, cycle=world.cycle, self_pos=me.pos,
                       self_vel=me.vel, seen_players=seen_players,
                       ball_pos=ball_pos, ball_vel=ball_vel, heard=heard)
