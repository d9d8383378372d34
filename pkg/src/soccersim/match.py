"""Seeded match runner: builds teams, loops cycles, collects statistics.

Trace format (one JSON object per line, sorted keys, one line per cycle):

    cycle        int, the cycle the agents acted in
    world        state at the start of the cycle (what deciders saw),
                 as produced by engine.world_to_dict
    commands     {player: {"kind": dash|kick|noop, ...command fields,
                  "say": payload dict or null, "rationale": tag}}
    deliveries   [{"sender", "receiver", "payload", "distance",
                   "delivered", "believed"}]
    goal         scoring team or null
    kicker       player whose kick succeeded, or null

A replay needs only the first world plus the command stream; identical
(config, seed) pairs produce byte-identical files.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field
from typing import Optional

from .comms import DeliveryRecord, payload_to_dict
from .decision import DecisionConfig, Rationale, load_codebook, shoot_value_at
from .engine import (
    ALL_PLAYER_IDS,
    ATTACK_SIDE,
    Command,
    Dash,
    Engine,
    EngineConfig,
    Kick,
    PlayerId,
    world_to_dict,
)
from .evaluation import AbilityParams, believe
from .formation import build_formation
from .geometry import GoalFrame, PitchGeometry, Vec2
from .policies import (
    ModelPolicy,
    RandomWalkPolicy,
    StaticFormationPolicy,
    shirt_roles,
    team_home_positions,
)
from .seeding import SeedStream

POLICY_NAMES = ("model", "random_walk", "static")


class MatchError(ValueError):
    pass


@dataclass(frozen=True)
class TeamConfig:
    policy: str = "model"
    formation: str = "4-4-2"
    ability: float = 1.0
    ability_max: float = 1.0
    decision: DecisionConfig = field(default_factory=DecisionConfig)
    codebook_path: Optional[str] = None

    def __post_init__(self):
        if self.policy not in POLICY_NAMES:
            raise MatchError(f"unknown policy {self.policy!r}; "
                             f"registered: {', '.join(POLICY_NAMES)}")


@dataclass(frozen=True)
class MatchConfig:
    seed: int = 1
    cycles: int = 6000
    home: TeamConfig = field(default_factory=TeamConfig)
    away: TeamConfig = field(default_factory=lambda: TeamConfig(policy="random_walk"))
    noise: bool = True
    trace_path: Optional[str] = None
    report_path: Optional[str] = None

    def __post_init__(self):
        if self.cycles < 1:
            raise MatchError(f"cycles must be >= 1, got {self.cycles}")


def _dataclass_from_dict(cls, data, defaults):
    unknown = set(data) - {f.name for f in dataclasses.fields(cls)}
    if unknown:
        raise MatchError(f"unknown {cls.__name__} keys: {sorted(unknown)}")
    return dataclasses.replace(defaults, **data)


def team_config_from_dict(data: dict) -> TeamConfig:
    data = dict(data)
    if "decision" in data:
        data["decision"] = _dataclass_from_dict(
            DecisionConfig, data["decision"], DecisionConfig())
    return _dataclass_from_dict(TeamConfig, data, TeamConfig())


def match_config_from_dict(data: dict) -> MatchConfig:
    data = dict(data)
    for key in ("home", "away"):
        if key in data:
            data[key] = team_config_from_dict(data[key])
    return _dataclass_from_dict(MatchConfig, data, MatchConfig())


@dataclass
class TeamStats:
    goals: int = 0
    shots: int = 0
    shots_on_target: int = 0
    pass_attempts: int = 0
    pass_completions: int = 0
    interceptions: int = 0
    messages_sent: int = 0
    messages_delivered: int = 0
    messages_believed: int = 0
    shot_value_sum: float = 0.0

    @property
    def mean_shot_value(self) -> float:
        return self.shot_value_sum / self.shots if self.shots else 0.0

    def to_dict(self) -> dict:
        return {
            "goals": self.goals,
            "shots": self.shots,
            "shots_on_target": self.shots_on_target,
            "pass_attempts": self.pass_attempts,
            "pass_completions": self.pass_completions,
            "interceptions": self.interceptions,
            "messages_sent": self.messages_sent,
            "messages_delivered": self.messages_delivered,
            "messages_believed": self.messages_believed,
            "mean_shot_value": self.mean_shot_value,
        }


@dataclass
class MatchReport:
    seed: int
    cycles: int
    score: tuple[int, int]
    home: TeamStats
    away: TeamStats
    channel_violations: int = 0

    @property
    def channel_ok(self) -> bool:
        return self.channel_violations == 0

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "cycles": self.cycles,
            "score": list(self.score),
            "home": self.home.to_dict(),
            "away": self.away.to_dict(),
            "channel_ok": self.channel_ok,
            "channel_violations": self.channel_violations,
        }


PASS_RATIONALES = (Rationale.PASS_TO_BETTER, Rationale.TACTIC_PASS)


def build_policy(team: str, team_cfg: TeamConfig, engine_cfg: EngineConfig,
                 seeds: SeedStream, debug_log: Optional[list] = None):
    formation = build_formation(team_cfg.formation, engine_cfg.pitch)
    if team_cfg.policy == "model":
        codebook = load_codebook(team_cfg.codebook_path, engine_cfg.pitch)
        return ModelPolicy(
            team, formation, team_cfg.decision, engine_cfg, codebook,
            ability=AbilityParams(team_cfg.ability, team_cfg.ability_max),
            debug_log=debug_log)
    if team_cfg.policy == "random_walk":
        return RandomWalkPolicy(team, engine_cfg, seeds)
    return StaticFormationPolicy(team, formation, engine_cfg)


def _shot_on_target(pos: Vec2, direction: float, team: str,
                    pitch: PitchGeometry) -> bool:
    frame = GoalFrame(ATTACK_SIDE[team])
    gx = frame.goal_line_x(pitch)
    cos = math.cos(direction)
    if abs(cos) < 1e-12:
        return False
    t = (gx - pos.x) / cos
    if t <= 0:
        return False
    y = pos.y + t * math.sin(direction)
    return abs(y) < pitch.half_goal_width


def _command_to_dict(cmd: Command, rationale: Optional[Rationale]) -> dict:
    body = cmd.body
    if isinstance(body, Dash):
        data = {"kind": "dash", "target_vel": [body.target_vel.x, body.target_vel.y]}
    elif isinstance(body, Kick):
        data = {"kind": "kick", "power": body.power, "direction": body.direction}
    else:
        data = {"kind": "noop"}
    data["say"] = payload_to_dict(cmd.say.payload) if cmd.say else None
    data["rationale"] = rationale.value if rationale else None
    return data


def _record_to_dict(rec: DeliveryRecord) -> dict:
    return {
        "sender": str(rec.message.sender),
        "receiver": str(rec.receiver),
        "payload": payload_to_dict(rec.message.payload),
        "distance": rec.distance,
        "delivered": rec.delivered,
        "believed": rec.believed,
    }


class MatchRunner:
    """One seeded match; use `run_match` unless you need the internals."""

    def __init__(self, config: MatchConfig, debug_log: Optional[list] = None):
        self.config = config
        engine_cfg = EngineConfig(noise_enabled=config.noise)
        self.engine_cfg = engine_cfg
        self.seeds = SeedStream(config.seed)
        self.policies = {
            "home": build_policy("home", config.home, engine_cfg, self.seeds,
                                 debug_log),
            "away": build_policy("away", config.away, engine_cfg, self.seeds,
                                 debug_log),
        }
        positions = {}
        roles = {}
        for team, team_cfg in (("home", config.home), ("away", config.away)):
            formation = build_formation(team_cfg.formation, engine_cfg.pitch)
            positions.update(team_home_positions(formation, team))
            for shirt, role in shirt_roles(formation).items():
                roles[PlayerId(team, shirt)] = role
        self.engine = Engine(engine_cfg, self.seeds, positions, roles)
        self.believe_thresholds = {
            "home": config.home.decision.believe_threshold,
            "away": config.away.decision.believe_threshold,
        }
        self.stats = {"home": TeamStats(), "away": TeamStats()}
        self.channel_violations = 0

    # -- audit ----------------------------------------------------------------

    def _audit_deliveries(self, records) -> list[DeliveryRecord]:
        """Mark believed flags and enforce believed <= delivered <= sent."""
        marked = []
        sent = delivered = believed = 0
        per_message: dict[int, tuple[int, int]] = {}
        for rec in records:
            trust = believe(rec.distance) >= self.believe_thresholds[rec.receiver.team]
            out = dataclasses.replace(rec, believed=rec.delivered and trust)
            marked.append(out)
            sender_stats = self.stats[rec.message.sender.team]
            sent += 1
            delivered += out.delivered
            believed += out.believed
            sender_stats.messages_sent += 1
            sender_stats.messages_delivered += out.delivered
            sender_stats.messages_believed += out.believed
            if out.believed and not out.delivered:
                self.channel_violations += 1
        if not believed <= delivered <= sent:
            self.channel_violations += 1
        return marked

    # -- main loop ---------------------------------------------------------------

    def run(self) -> MatchReport:
        config = self.config
        engine = self.engine
        world = engine.kickoff_world()
        inboxes: dict = {}
        pending_passer: Optional[PlayerId] = None
        last_kicker: Optional[PlayerId] = None
        trace_file = open(config.trace_path, "w") if config.trace_path else None
        try:
            for _ in range(config.cycles):
                percepts = {"home": {}, "away": {}}
                for pid in ALL_PLAYER_IDS:
                    policy = self.policies[pid.team]
                    percepts[pid.team][pid] = engine.perceive(
                        world, pid, heard=inboxes.get(pid, ()),
                        detail=policy.percept_detail)
                decisions = {}
                for team in ("home", "away"):
                    decisions.update(self.policies[team].decide(percepts[team]))
                commands = {pid: d.command for pid, d in decisions.items()}

                result = engine.step(world, commands)
                records = self._audit_deliveries(result.delivery_records)

                if result.kicker is not None:
                    rationale = decisions[result.kicker].rationale
                    self._record_kick(world, result.kicker, rationale,
                                      decisions[result.kicker].command.body)
                    last_kicker = result.kicker
                    pending_passer = (result.kicker
                                      if rationale in PASS_RATIONALES else None)

                owner = result.world.possession
                if owner is not None and owner != world.possession:
                    # the ball changed feet: settle pass/interception credit
                    if pending_passer is not None and owner != pending_passer:
                        if owner.team == pending_passer.team:
                            self.stats[owner.team].pass_completions += 1
                        pending_passer = None
                    elif pending_passer == owner:
                        pending_passer = None  # passer regained, pass dead
                    if last_kicker is not None and owner.team != last_kicker.team:
                        self.stats[owner.team].interceptions += 1
                        last_kicker = None  # one interception per kick

                if trace_file is not None:
                    row = {
                        "cycle": world.cycle,
                        "world": world_to_dict(world),
                        "commands": {
                            str(pid): _command_to_dict(
                                commands[pid], decisions[pid].rationale)
                            for pid in ALL_PLAYER_IDS
                        },
                        "deliveries": [_record_to_dict(r) for r in records],
                        "goal": result.goal_team,
                        "kicker": str(result.kicker) if result.kicker else None,
                    }
                    trace_file.write(json.dumps(row, sort_keys=True,
                                                separators=(",", ":")) + "\n")

                inboxes = result.inboxes
                world = result.world
        finally:
            if trace_file is not None:
                trace_file.close()

        report = MatchReport(
            seed=config.seed, cycles=config.cycles, score=world.score,
            home=self.stats["home"], away=self.stats["away"],
            channel_violations=self.channel_violations)
        report.home.goals, report.away.goals = world.score
        if config.report_path:
            with open(config.report_path, "w") as fh:
                json.dump(report.to_dict(), fh, indent=2, sort_keys=True)
                fh.write("\n")
        return report

    def _record_kick(self, world, kicker: PlayerId, rationale: Rationale,
                     kick) -> None:
        stats = self.stats[kicker.team]
        if rationale is Rationale.SHOOT:
            stats.shots += 1
            pos = world.player(kicker).pos
            if _shot_on_target(pos, kick.direction, kicker.team,
                               self.engine_cfg.pitch):
                stats.shots_on_target += 1
            stats.shot_value_sum += self._true_shot_value(world, kicker)
        elif rationale in PASS_RATIONALES:
            stats.pass_attempts += 1

    def _true_shot_value(self, world, kicker: PlayerId) -> float:
        team_cfg = self.config.home if kicker.team == "home" else self.config.away
        frame = GoalFrame(ATTACK_SIDE[kicker.team])
        me = world.player(kicker)
        opponents = [p.pos for p in world.players if p.id.team != kicker.team]
        return shoot_value_at(
            me.pos, opponents, AbilityParams(team_cfg.ability, team_cfg.ability_max),
            frame, self.engine_cfg.pitch, team_cfg.decision)


def run_match(config: MatchConfig, debug_log: Optional[list] = None) -> MatchReport:
    """Run one deterministic match; write trace/report files when paths set."""
    return MatchRunner(config, debug_log=debug_log).run()
