import math
import random

import pytest

from soccersim.comms import Message, ShootValue, Signal
from soccersim.decision import (
    AgentDecision,
    CodebookEntry,
    CoupledTacticTable,
    DecisionConfig,
    DecisionError,
    Rationale,
    Rect,
    Tactic,
    aim_shot,
    believed_shoot_reports,
    clamp_to_pitch,
    decide_defense,
    decide_offense,
    intercept_point,
    lead_pass,
    load_codebook,
    should_broadcast,
    stop_at_power,
    trigger_coupled_tactic,
)
from soccersim.engine import (
    BallState,
    Dash,
    EngineConfig,
    Kick,
    Percept,
    PlayerId,
)
from soccersim.evaluation import AbilityParams
from soccersim.formation import AreaClass, action_area, build_formation
from soccersim.geometry import GoalFrame, PitchGeometry, Side, Vec2

PITCH = PitchGeometry()
RIGHT = GoalFrame(Side.RIGHT)
ENGINE_CFG = EngineConfig()
CONFIG = DecisionConfig()
FULL = AbilityParams(1.0, 1.0)


def make_percept(observer=PlayerId("home", 10), self_pos=Vec2(0, 0),
                 seen=(), ball_pos=None, ball_vel=Vec2(0, 0), heard=(),
                 cycle=0):
    if ball_pos is None:
        ball_pos = self_pos  # at the observer's feet
    return Percept(observer=observer, cycle=cycle, self_pos=self_pos,
                   self_vel=Vec2(0, 0), seen_players=tuple(seen),
                   ball_pos=ball_pos, ball_vel=ball_vel, heard=tuple(heard))


class TestConfig:
    def test_defaults_valid(self):
        cfg = DecisionConfig()
        assert cfg.shoot_threshold == 0.6
        assert cfg.believe_threshold == 0.0004

    def test_threshold_range(self):
        with pytest.raises(DecisionError):
            DecisionConfig(shoot_threshold=0.0)
        with pytest.raises(DecisionError):
            DecisionConfig(shoot_threshold=1.5)
        with pytest.raises(DecisionError):
            DecisionConfig(xi_cutoff=-1.0)


class TestAgentDecision:
    def test_rationale_command_consistency(self):
        from soccersim.engine import Command
        AgentDecision(Command(Kick(1.0, 0.0)), Rationale.SHOOT)
        AgentDecision(Command(Dash(Vec2(1, 0))), Rationale.INTERCEPT)
        with pytest.raises(DecisionError):
            AgentDecision(Command(Dash(Vec2(1, 0))), Rationale.SHOOT)
        with pytest.raises(DecisionError):
            AgentDecision(Command(Kick(0.5, 0.0)), Rationale.GRADIENT_MOVE)


class TestCodebook:
    def test_default_loads_and_validates(self):
        table = load_codebook()
        assert len(table.entries) == 4
        tactics = {e.tactic for e in table.entries}
        assert tactics == {Tactic.VERTICAL_PASS_INCLINE_ARRIVE,
                           Tactic.INCLINE_PASS_VERTICAL_ARRIVE}

    def test_coupling_soundness_static_check(self):
        # every code: the passer's target and the runner's target coincide
        table = load_codebook()
        for entry in table.entries:
            assert entry.pass_target == entry.run_target
            assert PITCH.contains(entry.pass_target)

    def test_mismatched_rendezvous_rejected(self):
        table = CoupledTacticTable(entries=(
            CodebookEntry(1, Tactic.VERTICAL_PASS_INCLINE_ARRIVE,
                          Rect(0, 0, 10, 10), Vec2(40, 5), Vec2(41, 5)),))
        with pytest.raises(DecisionError):
            table.validate(PITCH)

    def test_duplicate_codes_rejected(self):
        entry = CodebookEntry(1, Tactic.VERTICAL_PASS_INCLINE_ARRIVE,
                              Rect(0, 0, 1, 1), Vec2(40, 5), Vec2(40, 5))
        with pytest.raises(DecisionError):
            CoupledTacticTable(entries=(entry, entry))

    def test_zone_lookup(self):
        table = load_codebook()
        assert table.entry_in_zone(Vec2(30.0, -20.0)).code == 1
        assert table.entry_in_zone(Vec2(30.0, 20.0)).code == 2
        assert table.entry_in_zone(Vec2(20.0, -7.0)).code == 3
        assert table.entry_in_zone(Vec2(-40.0, 0.0)) is None


class TestInterceptPoint:
    def test_stationary_ball_one_cycle(self):
        ball = BallState(Vec2(2.0, 0.0), Vec2(0.0, 0.0))
        result = intercept_point(ball, Vec2(0, 0), max_speed=1.0,
                                 ball_decay=0.94, horizon=50)
        assert result is not None
        point, t = result
        assert t == 1
        assert point == ball.pos

    def test_unreachable_runaway_ball(self):
        ball = BallState(Vec2(5.0, 0.0), Vec2(2.0, 0.0))
        result = intercept_point(ball, Vec2(0, 0), max_speed=1.0,
                                 ball_decay=1.0, horizon=40, kickable_margin=0.0)
        assert result is None

    def test_exhaustive_scan_oracle(self):
        # oracle: re-simulate the decayed path per cycle, first feasible t
        def oracle(ball, start, max_speed, decay, horizon, margin):
            feasible = []
            for t in range(1, horizon + 1):
                pos, vel = ball.pos, ball.vel
                for _ in range(t):
                    pos = pos + vel
                    vel = vel * decay
                if start.distance_to(pos) <= max_speed * t + margin:
                    feasible.append(t)
            return min(feasible) if feasible else None

        ball = BallState(Vec2(0.0, 0.0), Vec2(2.0, 0.0))
        start = Vec2(10.0, 0.0)
        got = intercept_point(ball, start, 1.0, 0.94, 50)
        want_t = oracle(ball, start, 1.0, 0.94, 50, 1.0)
        assert got is not None and got[1] == want_t

        rng = random.Random(31)
        for _ in range(200):
            ball = BallState(Vec2(rng.uniform(-30, 30), rng.uniform(-20, 20)),
                             Vec2(rng.uniform(-2.5, 2.5), rng.uniform(-2.5, 2.5)))
            start = Vec2(rng.uniform(-30, 30), rng.uniform(-20, 20))
            got = intercept_point(ball, start, 1.0, 0.94, 50)
            want = oracle(ball, start, 1.0, 0.94, 50, 1.0)
            assert (got[1] if got else None) == want

    def test_rejects_bad_horizon(self):
        with pytest.raises(DecisionError):
            intercept_point(BallState(Vec2(0, 0), Vec2(0, 0)), Vec2(1, 1),
                            1.0, 0.94, horizon=0)


class TestAimShot:
    POSTS = PITCH.goal_posts(Side.RIGHT)

    def test_empty_cone_aims_at_goal_center(self):
        shooter = Vec2(40.0, 5.0)
        want = (PITCH.goal_center(Side.RIGHT) - shooter).angle()
        assert aim_shot(shooter, self.POSTS, []) == pytest.approx(want)

    def test_opponent_outside_cone_ignored(self):
        shooter = Vec2(40.0, 5.0)
        behind = Vec2(30.0, 5.0)
        want = (PITCH.goal_center(Side.RIGHT) - shooter).angle()
        assert aim_shot(shooter, self.POSTS, [behind]) == pytest.approx(want)

    def test_central_blocker_aims_at_half_gap(self):
        shooter = Vec2(42.0, 0.0)
        blocker = Vec2(47.0, 0.0)  # dead center of the cone
        aim = aim_shot(shooter, self.POSTS, [blocker])
        # oracle: gap scan over sorted obstacle bearings within the cone
        b1 = (self.POSTS[0] - shooter).angle()
        b2 = (self.POSTS[1] - shooter).angle()
        bo = (blocker - shooter).angle()
        gaps = sorted([b1, bo, b2])
        mids = [(gaps[0] + gaps[1]) / 2, (gaps[1] + gaps[2]) / 2]
        assert min(abs(aim - m) for m in mids) < 1e-9
        assert abs(aim - bo) > 0.05  # not straight at the blocker

    def test_wider_gap_preferred(self):
        shooter = Vec2(42.0, 0.0)
        low_blocker = Vec2(48.0, -3.5)  # blocks the low half of the mouth
        aim = aim_shot(shooter, self.POSTS, [low_blocker])
        center = (PITCH.goal_center(Side.RIGHT) - shooter).angle()
        assert aim > center  # aims into the open upper half


class TestLeadPass:
    def test_stationary_receiver_direct_bearing(self):
        passer, receiver = Vec2(0, 0), Vec2(10.0, 10.0)
        direction, power = lead_pass(passer, receiver, Vec2(0, 0), 2.7, 0.94)
        assert direction == pytest.approx((receiver - passer).angle())
        assert 0.0 < power <= 1.0

    def test_moving_receiver_grid_oracle(self):
        # oracle: brute-force scan over cycles and a fine power grid
        passer = Vec2(0.0, 0.0)
        receiver = Vec2(15.0, 0.0)
        vel = Vec2(0.0, 0.5)
        kick_speed, decay, margin = 2.7, 0.94, 1.0

        def simulate(direction, power, t):
            pos = passer
            v = Vec2.from_polar(power * kick_speed, direction)
            for _ in range(t):
                pos = pos + v
                v = v * decay
            return pos

        oracle_t = None
        for t in range(1, 51):
            target = receiver + vel * t
            direction = (target - passer).angle()
            if any(simulate(direction, p / 200.0, t).distance_to(target) <= margin
                   for p in range(1, 201)):
                oracle_t = t
                break

        direction, power = lead_pass(passer, receiver, vel, kick_speed, decay)
        # the implementation lands exactly on the receiver's path
        best = min(range(1, 51), key=lambda t: simulate(direction, power, t)
                   .distance_to(receiver + vel * t))
        meet_error = simulate(direction, power, best).distance_to(receiver + vel * best)
        assert meet_error < 1e-6
        assert best <= oracle_t + 1

    def test_unreachable_falls_back_to_direct(self):
        passer = Vec2(0.0, 0.0)
        receiver = Vec2(50.0, 0.0)
        vel = Vec2(3.0, 0.0)  # runs away faster than any ball settles
        direction, power = lead_pass(passer, receiver, vel, 2.7, 0.94, horizon=30)
        assert direction == pytest.approx(0.0)
        assert power == 1.0

    def test_rejects_self_pass(self):
        with pytest.raises(DecisionError):
            lead_pass(Vec2(1, 1), Vec2(1, 1), Vec2(0, 0), 2.7, 0.94)


class TestShouldBroadcast:
    def test_opponent_in_cone(self):
        percept = make_percept(
            self_pos=Vec2(40.0, 0.0),
            seen=[(PlayerId("away", 3), Vec2(46.0, 0.0))])
        assert should_broadcast(percept, RIGHT, PITCH)

    def test_empty_view_stays_silent(self):
        percept = make_percept(self_pos=Vec2(40.0, 0.0), seen=[])
        assert not should_broadcast(percept, RIGHT, PITCH)

    def test_only_teammates_visible(self):
        percept = make_percept(
            self_pos=Vec2(40.0, 0.0),
            seen=[(PlayerId("home", 9), Vec2(46.0, 0.0))])
        assert not should_broadcast(percept, RIGHT, PITCH)

    def test_opponent_behind_not_in_cone(self):
        percept = make_percept(
            self_pos=Vec2(40.0, 0.0),
            seen=[(PlayerId("away", 3), Vec2(20.0, 0.0))])
        assert not should_broadcast(percept, RIGHT, PITCH)


class TestDecideOffense:
    def test_shoots_above_threshold(self):
        percept = make_percept(self_pos=Vec2(51.8, 0.0))
        decision = decide_offense(percept, FULL, RIGHT, PITCH, CONFIG, ENGINE_CFG)
        assert decision.rationale is Rationale.SHOOT
        assert isinstance(decision.command.body, Kick)
        assert decision.command.body.power == 1.0

    def test_passes_to_believed_better_teammate(self):
        mate = PlayerId("home", 9)
        mate_pos = Vec2(20.0, 5.0)
        percept = make_percept(
            self_pos=Vec2(0.0, 0.0),
            seen=[(mate, mate_pos)],
            heard=[Message(mate, 0, ShootValue(0.5))])
        decision = decide_offense(percept, FULL, RIGHT, PITCH, CONFIG, ENGINE_CFG)
        assert decision.rationale is Rationale.PASS_TO_BETTER
        assert decision.command.body.direction == pytest.approx(
            (mate_pos - percept.self_pos).angle())

    def test_distrusted_report_ignored(self):
        # sender report arrives but the sender stands too far to trust
        mate = PlayerId("home", 9)
        percept = make_percept(
            self_pos=Vec2(-40.0, -30.0),
            seen=[(mate, Vec2(45.0, 20.0))],  # ~98 m away, believe ~1e-4
            heard=[Message(mate, 0, ShootValue(0.9))])
        decision = decide_offense(percept, FULL, RIGHT, PITCH, CONFIG, ENGINE_CFG)
        assert decision.rationale is Rationale.MOVE_TO_BETTER

    def test_moves_toward_best_candidate(self):
        # oracle: exhaustively score the same candidate lattice
        from soccersim.decision import shoot_value_at
        me = Vec2(10.0, 3.0)
        percept = make_percept(self_pos=me)
        decision = decide_offense(percept, FULL, RIGHT, PITCH, CONFIG, ENGINE_CFG)
        assert decision.rationale is Rationale.MOVE_TO_BETTER
        assert isinstance(decision.command.body, Kick)

        best_pos, best_val = None, shoot_value_at(me, [], FULL, RIGHT, PITCH, CONFIG)
        inset = ENGINE_CFG.kickable_margin / 2.0
        for ring in range(1, CONFIG.sample_rings + 1):
            radius = CONFIG.sample_radius * ring / CONFIG.sample_rings
            for j in range(CONFIG.sample_count):
                angle = 2.0 * math.pi * j / CONFIG.sample_count
                cand = clamp_to_pitch(
                    Vec2(me.x + radius * math.cos(angle),
                         me.y + radius * math.sin(angle)), PITCH, inset)
                if cand.distance_to(me) < 0.25:
                    continue
                v = shoot_value_at(cand, [], FULL, RIGHT, PITCH, CONFIG)
                if v > best_val + 1e-12:
                    best_val, best_pos = v, cand
        want = (best_pos - percept.ball_pos).angle()
        assert decision.command.body.direction == pytest.approx(want)

    def test_shoot_iff_strictly_above_threshold(self):
        from soccersim.decision import shoot_value_at
        rng = random.Random(17)
        for _ in range(100):
            pos = Vec2(rng.uniform(30, 52), rng.uniform(-20, 20))
            percept = make_percept(self_pos=pos)
            value = shoot_value_at(pos, [], FULL, RIGHT, PITCH, CONFIG)
            decision = decide_offense(percept, FULL, RIGHT, PITCH, CONFIG,
                                      ENGINE_CFG)
            assert (decision.rationale is Rationale.SHOOT) == \
                (value > CONFIG.shoot_threshold)

    def test_exactly_one_rationale(self):
        percept = make_percept(self_pos=Vec2(25.0, -18.0))
        decision = decide_offense(percept, FULL, RIGHT, PITCH, CONFIG, ENGINE_CFG)
        assert isinstance(decision.rationale, Rationale)


class TestCoupledTactic:
    TABLE = load_codebook()

    def test_wing_zone_fires_with_runner(self):
        runner = PlayerId("home", 11)
        percept = make_percept(
            self_pos=Vec2(30.0, -20.0),  # inside zone 1
            seen=[(runner, Vec2(40.0, -10.0))])
        fired = trigger_coupled_tactic(percept, CONFIG, self.TABLE, RIGHT,
                                       PITCH, ENGINE_CFG)
        assert fired is not None
        signal, decision = fired
        assert signal.code == 1
        assert signal.tactic is Tactic.VERTICAL_PASS_INCLINE_ARRIVE
        assert decision.rationale is Rationale.TACTIC_PASS
        say = decision.command.say
        assert say is not None and isinstance(say.payload, Signal)
        assert say.payload.code == 1
        # the channel carries the bare code, never coordinates
        assert not hasattr(say.payload, "x") and not hasattr(say.payload, "y")
        want_dir = (Vec2(45.0, -22.0) - percept.self_pos).angle()
        assert decision.command.body.direction == pytest.approx(want_dir)

    def test_central_zone_uses_incline_tactic(self):
        runner = PlayerId("home", 11)
        percept = make_percept(
            self_pos=Vec2(20.0, -7.0),
            seen=[(runner, Vec2(35.0, -8.0))])
        fired = trigger_coupled_tactic(percept, CONFIG, self.TABLE, RIGHT,
                                       PITCH, ENGINE_CFG)
        assert fired is not None
        signal, _ = fired
        assert signal.tactic is Tactic.INCLINE_PASS_VERTICAL_ARRIVE

    def test_no_zone_no_tactic(self):
        percept = make_percept(
            self_pos=Vec2(-30.0, 0.0),
            seen=[(PlayerId("home", 11), Vec2(-20.0, 0.0))])
        assert trigger_coupled_tactic(percept, CONFIG, self.TABLE, RIGHT,
                                      PITCH, ENGINE_CFG) is None

    def test_no_runner_no_tactic(self):
        percept = make_percept(self_pos=Vec2(30.0, -20.0), seen=[])
        assert trigger_coupled_tactic(percept, CONFIG, self.TABLE, RIGHT,
                                      PITCH, ENGINE_CFG) is None

    def test_left_attacking_team_mirrored(self):
        runner = PlayerId("away", 11)
        percept = make_percept(
            observer=PlayerId("away", 10),
            self_pos=Vec2(-30.0, -20.0),  # mirrored zone 1
            seen=[(runner, Vec2(-40.0, -10.0))])
        fired = trigger_coupled_tactic(percept, CONFIG, self.TABLE,
                                       GoalFrame(Side.LEFT), PITCH, ENGINE_CFG)
        assert fired is not None
        _, decision = fired
        want_dir = (Vec2(-45.0, -22.0) - percept.self_pos).angle()
        assert decision.command.body.direction == pytest.approx(want_dir)


class TestDecideDefense:
    FORMATION = build_formation("4-4-2", PITCH)

    def area_and_home(self, role):
        area = action_area(self.FORMATION, role)
        return area, self.FORMATION.home_positions[role]

    def test_ball_in_main_area_intercepts(self):
        area, home = self.area_and_home("DF2")
        assert self.FORMATION.assignment["DF2"] == (1, 0)
        ball_pos = self.FORMATION.cell_center((1, 0))
        assert area.classify(ball_pos) is AreaClass.MAIN
        percept = make_percept(
            observer=PlayerId("home", 3),
            self_pos=home + Vec2(3.0, 0.0),
            seen=[(PlayerId("away", 9), ball_pos)],
            ball_pos=ball_pos)
        decision = decide_defense(percept, area, home, Side.LEFT, CONFIG,
                                  PITCH, ENGINE_CFG)
        assert decision.rationale is Rationale.INTERCEPT
        assert isinstance(decision.command.body, Dash)

    def test_distant_attack_rides_gradient(self):
        area, home = self.area_and_home("FW1")
        ball_pos = Vec2(-45.0, 30.0)  # own half, far from a forward's area
        assert area.classify(ball_pos) is AreaClass.OUTSIDE
        percept = make_percept(
            observer=PlayerId("home", 10),
            self_pos=Vec2(20.0, -10.0),
            seen=[(PlayerId("away", 9), ball_pos)],
            ball_pos=ball_pos)
        decision = decide_defense(percept, area, home, Side.LEFT, CONFIG,
                                  PITCH, ENGINE_CFG)
        assert decision.rationale is Rationale.GRADIENT_MOVE
        vel = decision.command.body.target_vel
        assert vel.x < 0  # toward the defended left goal

    def test_no_attack_holds_area(self):
        area, home = self.area_and_home("MF2")
        ball_pos = Vec2(40.0, 10.0)  # opponent half
        percept = make_percept(
            observer=PlayerId("home", 7),
            self_pos=Vec2(-5.0, 5.0),
            seen=[],
            ball_pos=ball_pos, ball_vel=Vec2(1.0, 0.0))  # rolling away
        decision = decide_defense(percept, area, home, Side.LEFT, CONFIG,
                                  PITCH, ENGINE_CFG)
        assert decision.rationale is Rationale.HOLD_AREA

    def test_stalled_gradient_falls_back_after_patience(self):
        # standing on the own goal mouth: the defensive field's global
        # maximum ridge, where the gradient vanishes
        area, home = self.area_and_home("DF1")
        ridge = Vec2(-52.5, 0.0)
        ball_pos = Vec2(-30.0, 25.0)
        assert area.classify(ball_pos) is AreaClass.OUTSIDE
        percept = make_percept(
            observer=PlayerId("home", 2), self_pos=ridge,
            seen=[(PlayerId("away", 7), ball_pos)], ball_pos=ball_pos)
        fresh = decide_defense(percept, area, home, Side.LEFT, CONFIG,
                               PITCH, ENGINE_CFG, stuck_cycles=0)
        assert fresh.rationale is Rationale.GRADIENT_MOVE
        assert fresh.command.body.target_vel == Vec2(0.0, 0.0)
        stalled = decide_defense(percept, area, home, Side.LEFT, CONFIG,
                                 PITCH, ENGINE_CFG,
                                 stuck_cycles=CONFIG.escape_patience)
        assert stalled.rationale is Rationale.HOLD_AREA

    def test_interception_outranks_stall(self):
        area, home = self.area_and_home("DF1")
        ball_pos = self.FORMATION.cell_center(self.FORMATION.assignment["DF1"])
        percept = make_percept(
            observer=PlayerId("home", 2), self_pos=Vec2(-52.5, 0.0),
            seen=[(PlayerId("away", 7), ball_pos)], ball_pos=ball_pos)
        decision = decide_defense(percept, area, home, Side.LEFT, CONFIG,
                                  PITCH, ENGINE_CFG,
                                  stuck_cycles=CONFIG.escape_patience + 3)
        assert decision.rationale is Rationale.INTERCEPT


class TestBelievedReports:
    def test_distance_cut_applies(self):
        mate_near, mate_far = PlayerId("home", 4), PlayerId("home", 5)
        percept = make_percept(
            observer=PlayerId("home", 10),
            self_pos=Vec2(0, 0),
            seen=[(mate_near, Vec2(10.0, 0.0)), (mate_far, Vec2(45.0, 30.0))],
            heard=[Message(mate_near, 0, ShootValue(0.3)),
                   Message(mate_far, 0, ShootValue(0.8))])
        threshold = 1.0 / (30.0 * 30.0)  # trust radius 30 m
        reports = believed_shoot_reports(
            percept, DecisionConfig(believe_threshold=threshold))
        assert [r[0] for r in reports] == [mate_near]

    def test_opponent_reports_ignored(self):
        opp = PlayerId("away", 4)
        percept = make_percept(
            self_pos=Vec2(0, 0),
            seen=[(opp, Vec2(5.0, 0.0))],
            heard=[Message(opp, 0, ShootValue(0.9))])
        assert believed_shoot_reports(percept, CONFIG) == []


class TestStopAtPower:
    def test_total_roll_matches_distance(self):
        power = stop_at_power(20.0, 2.7, 0.94)
        total = power * 2.7 / (1.0 - 0.94)
        assert total == pytest.approx(20.0)

    def test_capped_at_one(self):
        assert stop_at_power(500.0, 2.7, 0.94) == 1.0
