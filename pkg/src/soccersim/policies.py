"""Team policies: one decision per player per cycle, from percepts only.

`ModelPolicy` drives everything off the evaluation functions: the holder
shoots/passes/dribbles by score, supports reposition inside their action
areas and broadcast their scores, defenders intercept in their areas and
otherwise ride the defensive gradient. `RandomWalkPolicy` and
`StaticFormationPolicy` are deliberately crude controls for experiments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional, Protocol

from .comms import Message, ShootValue
from .decision import (
    CONTROL_SLACK,
    AgentDecision,
    clamp_to_pitch,
    CoupledTacticTable,
    DecisionConfig,
    Rationale,
    believed_signals,
    decide_defense,
    decide_offense,
    intercept_point,
    lead_pass,
    oriented_point,
    shoot_value_at,
    should_broadcast,
    split_seen,
    trigger_coupled_tactic,
)
from .engine import (
    ALL_PLAYER_IDS,
    ATTACK_SIDE,
    BallState,
    Command,
    Dash,
    EngineConfig,
    Kick,
    Percept,
    PlayerId,
)
from .evaluation import AbilityParams
from .formation import AreaClass, GOALKEEPER_ROLE, Formation, action_area, mirror_x
from .geometry import GeometryError, GoalFrame, Side, Vec2
from .seeding import SeedStream

#: Directions sampled by off-ball supports when hunting a better spot.
SUPPORT_SAMPLE_COUNT = 8
#: Cycles between support target refreshes (staggered by shirt).
SUPPORT_REFRESH = 3
#: Goalkeeper stand-off distance from the goal center along the ball line.
GK_DEPTH = 4.0


class TeamPolicy(Protocol):
    team: str
    percept_detail: str

    def decide(self, percepts: dict[PlayerId, Percept]) -> dict[PlayerId, AgentDecision]:
        ...


def shirt_roles(formation: Formation) -> dict[int, str]:
    """Shirt 1 keeps goal; 2..11 walk the formation lines back to front."""
    roles = {1: GOALKEEPER_ROLE}
    for shirt, role in enumerate(formation.outfield_roles(), start=2):
        roles[shirt] = role
    return roles


def team_home_positions(formation: Formation, team: str) -> dict[PlayerId, Vec2]:
    """Home spots in pitch coordinates (canonical layout defends the left
    goal, so the right-defending team is mirrored)."""
    roles = shirt_roles(formation)
    mirror = ATTACK_SIDE[team] is Side.LEFT
    out = {}
    for shirt, role in roles.items():
        home = formation.home_positions[role]
        out[PlayerId(team, shirt)] = mirror_x(home) if mirror else home
    return out


@dataclass
class DecisionTrace:
    """Optional per-decision debug row collected by ModelPolicy."""

    cycle: int
    player: PlayerId
    rationale: Rationale
    shoot_value: Optional[float] = None


class ModelPolicy:
    """The evaluation-function team."""

    percept_detail = "full"

    def __init__(self, team: str, formation: Formation, config: DecisionConfig,
                 engine_cfg: EngineConfig, codebook: CoupledTacticTable,
                 ability: AbilityParams = AbilityParams(1.0, 1.0),
                 debug_log: Optional[list] = None):
        self.team = team
        self.formation = formation
        self.config = config
        self.engine_cfg = engine_cfg
        self.codebook = codebook
        self.ability = ability
        self.debug_log = debug_log
        self.pitch = engine_cfg.pitch
        self.attacks = ATTACK_SIDE[team]
        self.defends = self.attacks.opposite
        self.attack_frame = GoalFrame(self.attacks)
        self.roles = shirt_roles(formation)
        self.homes = team_home_positions(formation, team)
        self.areas = {role: action_area(formation, role)
                      for role in formation.outfield_roles()}
        self._stuck: dict[int, int] = {}
        self._signal: dict[int, tuple[int, int]] = {}  # shirt -> (code, cycle)
        self._support: dict[int, tuple[int, Vec2]] = {}

    # -- helpers -----------------------------------------------------------

    def _log(self, percept: Percept, decision: AgentDecision,
             value: Optional[float] = None) -> None:
        if self.debug_log is not None:
            self.debug_log.append(DecisionTrace(
                cycle=percept.cycle, player=percept.observer,
                rationale=decision.rationale, shoot_value=value))

    def _controls(self, pos: Vec2, ball: Vec2) -> bool:
        return pos.distance_to(ball) <= self.engine_cfg.kickable_margin

    def _with_broadcast(self, percept: Percept, decision: AgentDecision,
                        value: float) -> AgentDecision:
        if should_broadcast(percept, self.attack_frame, self.pitch):
            msg = Message(percept.observer, percept.cycle, ShootValue(value))
            return replace(decision, command=replace(decision.command, say=msg))
        return decision

    # -- per-role branches ---------------------------------------------------

    def _decide_goalkeeper(self, percept: Percept) -> AgentDecision:
        cfg = self.engine_cfg
        me = percept.self_pos
        ball = percept.ball_pos
        canonical_ball = ball if self.defends is Side.LEFT else mirror_x(ball)
        if self._controls(me, ball):
            # clear long: meet the most advanced teammate
            teammates, _ = split_seen(percept)
            forward = 1.0 if self.attacks is Side.RIGHT else -1.0
            if teammates:
                _, target_pos = max(teammates, key=lambda tp: tp[1].x * forward)
            else:
                target_pos = self.pitch.goal_center(self.attacks)
            direction, power = lead_pass(me, target_pos, Vec2(0.0, 0.0),
                                         cfg.ball_kick_speed, cfg.ball_decay,
                                         self.config.pass_horizon)
            return AgentDecision(Command(Kick(power, direction)),
                                 Rationale.PASS_TO_BETTER)
        if self.formation.in_gk_box(canonical_ball):
            sol = intercept_point(BallState(ball, percept.ball_vel), me,
                                  cfg.player_max_speed, cfg.ball_decay,
                                  self.config.intercept_horizon,
                                  cfg.kickable_margin)
            target = sol[0] if sol else ball
            return AgentDecision(
                Command(Dash((target - me).clamped_to(cfg.player_max_speed))),
                Rationale.INTERCEPT)
        # hold the ball-to-goal line a few metres off the line
        goal = self.pitch.goal_center(self.defends)
        direction = (ball - goal).normalized()
        target = goal + direction * GK_DEPTH
        return AgentDecision(
            Command(Dash((target - me).clamped_to(cfg.player_max_speed))),
            Rationale.HOLD_AREA)

    def _decide_holder(self, percept: Percept) -> AgentDecision:
        _, opponents = split_seen(percept)
        value = shoot_value_at(percept.self_pos, opponents, self.ability,
                               self.attack_frame, self.pitch, self.config)
        if value <= self.config.shoot_threshold:
            fired = trigger_coupled_tactic(percept, self.config, self.codebook,
                                           self.attack_frame, self.pitch,
                                           self.engine_cfg)
            if fired is not None:
                _, decision = fired
                self._log(percept, decision, value)
                return decision
        decision = decide_offense(percept, self.ability, self.attack_frame,
                                  self.pitch, self.config, self.engine_cfg)
        self._log(percept, decision, value)
        return decision

    def _maybe_adopt_signal(self, percept: Percept) -> None:
        shirt = percept.observer.shirt
        for sender, entry in believed_signals(percept, self.config, self.codebook):
            run_target = oriented_point(entry.run_target, self.attacks)
            my_dist = percept.self_pos.distance_to(run_target)
            rivals = [pos.distance_to(run_target)
                      for pid, pos in percept.seen_players
                      if pid.team == self.team and pid != sender and pid.shirt != 1]
            if not rivals or my_dist <= min(rivals):
                self._signal[shirt] = (entry.code, percept.cycle)

    def _active_signal_target(self, percept: Percept) -> Optional[Vec2]:
        shirt = percept.observer.shirt
        state = self._signal.get(shirt)
        if state is None:
            return None
        code, heard_cycle = state
        if percept.cycle - heard_cycle > self.config.signal_ttl:
            del self._signal[shirt]
            return None
        entry = self.codebook.entry(code)
        if entry is None:
            return None
        return oriented_point(entry.run_target, self.attacks)

    def _decide_support(self, percept: Percept) -> AgentDecision:
        cfg = self.engine_cfg
        me = percept.self_pos
        shirt = percept.observer.shirt
        teammates, opponents = split_seen(percept)
        value = shoot_value_at(me, opponents, self.ability, self.attack_frame,
                               self.pitch, self.config)

        self._maybe_adopt_signal(percept)
        run_target = self._active_signal_target(percept)
        if run_target is not None:
            decision = AgentDecision(
                Command(Dash((run_target - me).clamped_to(cfg.player_max_speed))),
                Rationale.TACTIC_RUN)
            self._log(percept, decision, value)
            return self._with_broadcast(percept, decision, value)

        cached = self._support.get(shirt)
        if cached is None or (percept.cycle + shirt) % SUPPORT_REFRESH == 0:
            target = self._support_target(percept, value, opponents)
            self._support[shirt] = (percept.cycle, target)
        else:
            target = cached[1]
        rationale = (Rationale.MOVE_TO_BETTER
                     if target != self.homes[percept.observer]
                     else Rationale.HOLD_AREA)
        decision = AgentDecision(
            Command(Dash((target - me).clamped_to(cfg.player_max_speed))),
            rationale)
        self._log(percept, decision, value)
        return self._with_broadcast(percept, decision, value)

    def _support_target(self, percept: Percept, own_value: float,
                        opponents: list[Vec2]) -> Vec2:
        """Best nearby spot inside the own action area, by shot score."""
        me = percept.self_pos
        role = self.roles[percept.observer.shirt]
        area = self.areas[role]
        best_pos, best_val = None, own_value
        for j in range(SUPPORT_SAMPLE_COUNT):
            angle = 2.0 * math.pi * j / SUPPORT_SAMPLE_COUNT
            cand = clamp_to_pitch(
                Vec2(me.x + self.config.sample_radius * math.cos(angle),
                     me.y + self.config.sample_radius * math.sin(angle)),
                self.pitch)
            if cand.distance_to(me) < 0.25:
                continue
            canonical = cand if self.defends is Side.LEFT else mirror_x(cand)
            if area.classify(canonical) is AreaClass.OUTSIDE:
                continue
            try:
                v = shoot_value_at(cand, opponents, self.ability,
                                   self.attack_frame, self.pitch, self.config)
            except GeometryError:
                continue
            if v > best_val + 1e-12:
                best_val, best_pos = v, cand
        return best_pos if best_pos is not None else self.homes[percept.observer]

    def _decide_defender(self, percept: Percept) -> AgentDecision:
        shirt = percept.observer.shirt
        role = self.roles[shirt]
        decision = decide_defense(
            percept, self.areas[role], self.homes[percept.observer],
            self.defends, self.config, self.pitch, self.engine_cfg,
            stuck_cycles=self._stuck.get(shirt, 0))
        stalled = (decision.rationale is Rationale.GRADIENT_MOVE
                   and isinstance(decision.command.body, Dash)
                   and decision.command.body.target_vel.length_squared() == 0.0)
        self._stuck[shirt] = self._stuck.get(shirt, 0) + 1 if stalled else 0
        self._log(percept, decision)
        return decision

    # -- entry point -----------------------------------------------------------

    def decide(self, percepts: dict[PlayerId, Percept]) -> dict[PlayerId, AgentDecision]:
        out = {}
        for pid, percept in percepts.items():
            if pid.shirt == 1:
                out[pid] = self._decide_goalkeeper(percept)
                continue
            ball = percept.ball_pos
            if self._controls(percept.self_pos, ball):
                self._signal.pop(pid.shirt, None)  # arrived: play from here
                out[pid] = self._decide_holder(percept)
                continue
            slack = CONTROL_SLACK * self.engine_cfg.kickable_margin
            teammate_has_it = any(
                seen_pid.team == self.team and pos.distance_to(ball) <= slack
                for seen_pid, pos in percept.seen_players)
            if teammate_has_it:
                out[pid] = self._decide_support(percept)
            else:
                out[pid] = self._decide_defender(percept)
        return out


class RandomWalkPolicy:
    """Seeded drifting walkers that hoof the ball goalward when close."""

    percept_detail = "ball"

    def __init__(self, team: str, engine_cfg: EngineConfig, seeds: SeedStream):
        self.team = team
        self.engine_cfg = engine_cfg
        self.seeds = seeds
        self.goal = engine_cfg.pitch.goal_center(ATTACK_SIDE[team])

    def decide(self, percepts: dict[PlayerId, Percept]) -> dict[PlayerId, AgentDecision]:
        cfg = self.engine_cfg
        out = {}
        for pid, percept in percepts.items():
            me = percept.self_pos
            if me.distance_to(percept.ball_pos) <= cfg.kickable_margin:
                direction = (self.goal - me).angle()
                out[pid] = AgentDecision(Command(Kick(1.0, direction)),
                                         Rationale.SHOOT)
                continue
            block = percept.cycle // 20
            angle = 2.0 * math.pi * self.seeds.uniform(
                "walk", self.team, pid.shirt, block)
            out[pid] = AgentDecision(
                Command(Dash(Vec2.from_polar(cfg.player_max_speed, angle))),
                Rationale.HOLD_AREA)
        return out


class StaticFormationPolicy:
    """Statues on their home spots; they only kick clear."""

    percept_detail = "ball"

    def __init__(self, team: str, formation: Formation, engine_cfg: EngineConfig):
        self.team = team
        self.engine_cfg = engine_cfg
        self.homes = team_home_positions(formation, team)
        self.goal = engine_cfg.pitch.goal_center(ATTACK_SIDE[team])

    def decide(self, percepts: dict[PlayerId, Percept]) -> dict[PlayerId, AgentDecision]:
        cfg = self.engine_cfg
        out = {}
        for pid, percept in percepts.items():
            me = percept.self_pos
            if me.distance_to(percept.ball_pos) <= cfg.kickable_margin:
                out[pid] = AgentDecision(
                    Command(Kick(1.0, (self.goal - me).angle())), Rationale.SHOOT)
                continue
            out[pid] = AgentDecision(
                Command(Dash((self.homes[pid] - me).clamped_to(cfg.player_max_speed))),
                Rationale.HOLD_AREA)
        return out
