import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from soccersim.geometry import (
    EqualAngleCircle,
    GeometryError,
    GoalFrame,
    PitchGeometry,
    Side,
    Vec2,
    equal_angle_arc_points,
    equal_angle_circle,
    vertical_distance,
    visual_angle,
)

PITCH = PitchGeometry()
RIGHT = GoalFrame(Side.RIGHT)
LEFT = GoalFrame(Side.LEFT)


def arccos_visual_angle(p, p1, p2):
    """Independent oracle: the normalized-dot-product arccos form."""
    ux, uy = p1.x - p.x, p1.y - p.y
    vx, vy = p2.x - p.x, p2.y - p.y
    num = ux * vx + uy * vy
    den = math.sqrt(ux * ux + uy * uy) * math.sqrt(vx * vx + vy * vy)
    return math.acos(max(-1.0, min(1.0, num / den)))


class TestVec2:
    def test_rejects_non_finite(self):
        with pytest.raises(GeometryError):
            Vec2(float("nan"), 0.0)
        with pytest.raises(GeometryError):
            Vec2(0.0, float("inf"))

    def test_arithmetic(self):
        assert Vec2(1, 2) + Vec2(3, -1) == Vec2(4, 1)
        assert Vec2(1, 2) - Vec2(3, -1) == Vec2(-2, 3)
        assert 2 * Vec2(1, 2) == Vec2(2, 4)
        assert Vec2(3, 4).length() == 5.0
        assert Vec2(1, 0).cross(Vec2(0, 1)) == 1.0

    def test_clamped_to(self):
        assert Vec2(3, 4).clamped_to(10) == Vec2(3, 4)
        assert Vec2(3, 4).clamped_to(5) == Vec2(3, 4)
        clamped = Vec2(6, 8).clamped_to(5)
        assert clamped.length() == pytest.approx(5.0)


class TestPitchGeometry:
    def test_defaults(self):
        assert PITCH.half_length == 52.5
        assert PITCH.half_width == 34.0
        assert PITCH.half_goal_width == pytest.approx(7.01)

    def test_posts_on_goal_lines(self):
        for side in Side:
            gx = PITCH.goal_line_x(side)
            p1, p2 = PITCH.goal_posts(side)
            assert p1.x == gx and p2.x == gx
            assert p1.y == -p2.y

    def test_invalid_dimensions(self):
        with pytest.raises(GeometryError):
            PitchGeometry(length=-1)
        with pytest.raises(GeometryError):
            PitchGeometry(goal_width=70.0)


class TestVerticalDistance:
    def test_on_goal_line_is_zero(self):
        assert vertical_distance(Vec2(52.5, 3.0), RIGHT, PITCH) == 0.0

    def test_pitch_center(self):
        assert vertical_distance(Vec2(0, 0), RIGHT, PITCH) == 52.5
        assert vertical_distance(Vec2(0, 0), LEFT, PITCH) == 52.5

    def test_direct_subtraction(self):
        # oracle: |10.0 - 52.5|
        assert vertical_distance(Vec2(10.0, 3.0), RIGHT, PITCH) == 42.5

    def test_rejects_outside_pitch(self):
        with pytest.raises(GeometryError):
            vertical_distance(Vec2(60.0, 0.0), RIGHT, PITCH)

    def test_translation_parallel_to_goal_line(self):
        base = vertical_distance(Vec2(12.0, -5.0), RIGHT, PITCH)
        for y in (-30.0, -1.0, 0.0, 17.0, 33.0):
            assert vertical_distance(Vec2(12.0, y), RIGHT, PITCH) == base


class TestVisualAngle:
    def test_orthogonal_directions(self):
        assert visual_angle(Vec2(0, 0), Vec2(1, 1), Vec2(1, -1)) == pytest.approx(
            math.pi / 2, abs=1e-12)

    def test_collinear_outside_is_zero(self):
        # p on the post line, beyond the segment
        assert visual_angle(Vec2(0, 5), Vec2(0, 1), Vec2(0, -1)) == 0.0

    def test_between_posts_is_pi(self):
        assert visual_angle(Vec2(0, 0.3), Vec2(0, 1), Vec2(0, -1)) == pytest.approx(
            math.pi, abs=1e-12)

    def test_two_bearing_oracle(self):
        # oracle: difference of absolute bearings to each post
        p, p1, p2 = Vec2(-2, 0), Vec2(0, 1), Vec2(0, -1)
        b1 = math.atan2(p1.y - p.y, p1.x - p.x)
        b2 = math.atan2(p2.y - p.y, p2.x - p.x)
        expected = abs(b1 - b2)
        assert expected == pytest.approx(0.927295, abs=1e-6)
        assert visual_angle(p, p1, p2) == pytest.approx(expected, abs=1e-12)
        assert visual_angle(p, p1, p2) == pytest.approx(2 * math.atan(0.5), abs=1e-12)

    def test_on_post_rejected(self):
        with pytest.raises(GeometryError):
            visual_angle(Vec2(0, 1), Vec2(0, 1), Vec2(0, -1))

    def test_agrees_with_arccos_form(self):
        rng = random.Random(7)
        p1, p2 = PITCH.goal_posts(Side.RIGHT)
        for _ in range(2000):
            p = Vec2(rng.uniform(-52.5, 52.0), rng.uniform(-34, 34))
            assert visual_angle(p, p1, p2) == pytest.approx(
                arccos_visual_angle(p, p1, p2), abs=1e-9)

    @given(
        x=st.floats(-50, 50), y=st.floats(-33, 33),
        angle=st.floats(0, 2 * math.pi),
        tx=st.floats(-100, 100), ty=st.floats(-100, 100),
    )
    @settings(max_examples=200)
    def test_rigid_motion_invariance(self, x, y, angle, tx, ty):
        p = Vec2(x, y)
        p1, p2 = Vec2(10.0, 7.0), Vec2(10.0, -7.0)
        if p.distance_to(p1) < 1e-6 or p.distance_to(p2) < 1e-6:
            return
        base = visual_angle(p, p1, p2)

        def move(v):
            c, s = math.cos(angle), math.sin(angle)
            return Vec2(v.x * c - v.y * s + tx, v.x * s + v.y * c + ty)

        assert visual_angle(move(p), move(p1), move(p2)) == pytest.approx(
            base, abs=1e-9)

    def test_swap_symmetry(self):
        rng = random.Random(11)
        p1, p2 = PITCH.goal_posts(Side.LEFT)
        for _ in range(200):
            p = Vec2(rng.uniform(-52, 52), rng.uniform(-34, 34))
            assert visual_angle(p, p1, p2) == visual_angle(p, p2, p1)

    def test_range_over_pitch(self):
        rng = random.Random(13)
        p1, p2 = PITCH.goal_posts(Side.RIGHT)
        for _ in range(5000):
            p = Vec2(rng.uniform(-52.5, 52.5), rng.uniform(-34, 34))
            if p.distance_to(p1) < 1e-9 or p.distance_to(p2) < 1e-9:
                continue
            a = visual_angle(p, p1, p2)
            assert 0.0 <= a <= math.pi


class TestEqualAngleCircle:
    def test_thales_circle(self):
        posts = (Vec2(0, 1), Vec2(0, -1))
        circle = equal_angle_circle(math.pi / 2, posts)
        assert isinstance(circle, EqualAngleCircle)
        assert circle.radius == pytest.approx(1.0, abs=1e-12)
        assert circle.center.x == pytest.approx(0.0, abs=1e-12)
        assert circle.center.y == pytest.approx(0.0, abs=1e-12)

    def test_inscribed_angle_radius(self):
        # oracle: chord / (2 sin alpha) with goal width 2
        circle = equal_angle_circle(math.pi / 3, (Vec2(0, 1), Vec2(0, -1)))
        assert circle.radius == pytest.approx(1.0 / math.sin(math.pi / 3), abs=1e-12)
        assert circle.radius == pytest.approx(1.154701, abs=1e-6)

    def test_rejects_out_of_range_alpha(self):
        posts = (Vec2(0, 1), Vec2(0, -1))
        for alpha in (0.0, math.pi, -0.1, 3.5):
            with pytest.raises(GeometryError):
                equal_angle_circle(alpha, posts)

    def test_circle_passes_through_posts(self):
        posts = PITCH.goal_posts(Side.RIGHT)
        for alpha in (0.3, 1.0, math.pi / 2, 2.5):
            c = equal_angle_circle(alpha, posts)
            for post in posts:
                assert c.center.distance_to(post) == pytest.approx(c.radius, abs=1e-9)

    def test_arc_round_trip(self):
        posts = PITCH.goal_posts(Side.RIGHT)
        for alpha in (0.2, 0.9, math.pi / 2, 2.2, 3.0):
            for p in equal_angle_arc_points(alpha, posts, 1000):
                assert visual_angle(p, posts[0], posts[1]) == pytest.approx(
                    alpha, abs=1e-9)

    def test_arc_opens_into_field(self):
        # right-goal arcs must bulge toward negative x
        posts = PITCH.goal_posts(Side.RIGHT)
        pts = equal_angle_arc_points(1.2, posts, 51)
        assert min(p.x for p in pts) < 52.5
        assert pts[25].x < 52.5 - 1.0
