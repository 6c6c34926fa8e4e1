import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heisbcp.group import ORIGIN, Point, dilate_arr, multiply_arr, reflect_arr, rotate_z_arr
from heisbcp.metrics import (
    Ball,
    BallNorm,
    Box,
    Gauge,
    KappaGauge,
    RhoPseudo,
    a_poly,
    a_poly_arr,
    ball_contains,
    ball_slack_arr,
    derived_constants,
    distance,
    distance_by_bisection,
    distances,
    distances_by_bisection,
    model_from_json,
    r_of,
    sphere_section,
    triangle_probe,
)
from heisbcp.suites import check_a_poly, check_closed_form, check_metric_axioms

coord = st.floats(-10, 10, allow_nan=False)
points = st.builds(Point, coord, coord, coord)
alphas = st.sampled_from([0.5, 1.0, 2.0])
MODELS = [BallNorm(0.5), BallNorm(2), Gauge(1), Gauge(2), Box(), KappaGauge(1, 2), KappaGauge(0.3, 1)]


def test_distance_examples():
    assert distance(BallNorm(2), ORIGIN, Point(2, 0, 0)) == 1
    assert distance(BallNorm(2), ORIGIN, Point(0, 0, 1)) == pytest.approx(0.7071067811865476, abs=1e-15)
    assert distance(Box(), ORIGIN, Point(3, 4, 0)) == 5
    assert distance(Box(), ORIGIN, Point(0, 0, 4)) == 4
    assert distance(Gauge(2), ORIGIN, Point(0, 0, 1)) == 2
    assert distance(KappaGauge(1, 2), ORIGIN, Point(0.5, 0, 0)) == 1
    assert distance(RhoPseudo(), ORIGIN, Point(0, 0, 7)) == 0


def test_bisection_oracle_examples():
    assert distance_by_bisection(BallNorm(2), ORIGIN, Point(0, 0, 1)) == pytest.approx(1 / math.sqrt(2), abs=1e-12)
    assert distance_by_bisection(BallNorm(2), ORIGIN, Point(2, 0, 0)) == pytest.approx(1, abs=1e-12)
    assert distance_by_bisection(Gauge(2), ORIGIN, Point(0, 0, 1)) == pytest.approx(2, abs=1e-12)
    with pytest.raises(ValueError):
        distance_by_bisection(BallNorm(2), ORIGIN, ORIGIN)
    with pytest.raises(ValueError):
        distance_by_bisection(BallNorm(2), ORIGIN, Point(1, 0, 0), tol=0)


@pytest.mark.parametrize("m", MODELS[:6], ids=str)
def test_bisection_agrees_with_closed_form_for_every_model(m):
    rng = np.random.default_rng(5)
    p, q = rng.uniform(-10, 10, (2, 2000, 3))
    assert np.max(np.abs(distances(m, p, q) - distances_by_bisection(m, p, q))) <= 1e-9


def test_closed_form_suite():
    rep = check_closed_form(2.0, 10_000)
    assert rep.passed
    assert rep.details["max_abs_error"] <= 1e-9


def test_ball_contains_examples():
    unit = Ball(ORIGIN, 1.0, BallNorm(2))
    assert ball_contains(unit, Point(0, 0, 2))
    assert not ball_contains(unit, Point(0, 0, 2.0001))
    assert ball_contains(Ball(Point(2, 0, 0), 1.0, BallNorm(2)), Point(4, 0, 0))
    assert not ball_contains(unit, Point(0, 0, 2), margin=1e-9)
    with pytest.raises(ValueError):
        Ball(ORIGIN, 0.0, BallNorm(2))


def test_a_poly_examples():
    p = Point(2, 0, 0)
    assert a_poly(2, p, ORIGIN) == 0
    assert a_poly(2, p, p) == -4
    assert a_poly(2, p, Point(4, 0, 0)) == 0
    with pytest.raises(ValueError):
        a_poly(2, ORIGIN, p)


@given(points, points, alphas)
def test_a_poly_sign_matches_membership(p, q, alpha):
    if p == ORIGIN:
        return
    A = a_poly(alpha, p, q)
    if abs(A) < 1e-9:
        return
    inside = ball_slack_arr(BallNorm(alpha), p.as_array(), r_of(alpha, p.as_array()), q.as_array()) >= 0
    assert (A <= 0) == bool(inside)


def test_a_poly_suite():
    rep = check_a_poly(2.0, 100_000)
    assert rep.passed and rep.details["violations"] == 0
    assert 0 < rep.details["inside"] < 100_000


def test_derived_constants_frozen():
    k = derived_constants(2.0)
    assert k.c1 == pytest.approx(0.3535533906, abs=1e-10)
    assert k.c2 == pytest.approx(math.sqrt((2 + math.sqrt(20)) / 8), abs=1e-15)
    assert k.c2 == pytest.approx(0.8994537200, abs=1e-10)
    assert math.tan(k.theta2) == pytest.approx((math.sqrt(3) - 1) / 2, abs=1e-15)
    assert k.theta2 == pytest.approx(0.3509, abs=1e-4)
    assert abs(k.sev1_quadratic(k.theta2)) <= 1e-12
    assert k.c1 < k.c2


@given(st.floats(0.05, 20))
def test_derived_constants_invariants(alpha):
    k = derived_constants(alpha)
    assert k.c1 < k.c2
    assert abs(k.sev1_quadratic(k.theta2)) <= 1e-12
    assert k.tt_coeff(0.0) == pytest.approx(1 / alpha)


@settings(max_examples=200)
@given(points, points, points, st.sampled_from(MODELS))
def test_left_invariance_and_symmetry(g, p, q, m):
    d = distance(m, p, q)
    gp = Point.of(multiply_arr(g.as_array(), p.as_array()))
    gq = Point.of(multiply_arr(g.as_array(), q.as_array()))
    assert distance(m, gp, gq) == pytest.approx(d, rel=1e-9, abs=1e-12)
    assert distance(m, q, p) == pytest.approx(d, rel=1e-12, abs=1e-15)


@settings(max_examples=200)
@given(points, points, st.floats(1e-3, 1e3), st.sampled_from(MODELS))
def test_homogeneity(p, q, lam, m):
    d = distance(m, p, q)
    dp = Point.of(dilate_arr(lam, p.as_array()))
    dq = Point.of(dilate_arr(lam, q.as_array()))
    assert distance(m, dp, dq) == pytest.approx(lam * d, rel=1e-9, abs=1e-12)


@pytest.mark.parametrize("m", MODELS, ids=str)
def test_triangle_inequality_sampled(m):
    rep = check_metric_axioms(m, 100_000, seed=11)
    assert rep.passed, rep.details


def test_isometries_preserve_ball_norm_distance():
    m = BallNorm(2)
    rng = np.random.default_rng(7)
    p, q = rng.uniform(-10, 10, (2, 10_000, 3))
    th = rng.uniform(-math.pi, math.pi, 10_000)
    d = distances(m, p, q)
    assert np.allclose(distances(m, rotate_z_arr(th, p), rotate_z_arr(th, q)), d, rtol=1e-12, atol=0)
    assert np.allclose(distances(m, reflect_arr(p), reflect_arr(q)), d, rtol=1e-12, atol=0)


def test_balls_are_euclidean_convex():
    alpha = 2.0
    m = BallNorm(alpha)
    rng = np.random.default_rng(8)
    n = 20_000
    p = rng.uniform(-10, 10, (n, 3))
    r = np.exp(rng.uniform(-3, 3, n))

    def inside_points():
        u = rng.standard_normal((n, 3))
        u *= (alpha * rng.uniform(0, 1, n) ** (1 / 3) / np.linalg.norm(u, axis=1))[:, None]
        return multiply_arr(p, dilate_arr(r, u))

    q1, q2 = inside_points(), inside_points()
    t = rng.uniform(0, 1, (n, 1))
    slack = ball_slack_arr(m, p, r, (1 - t) * q1 + t * q2)
    assert slack.min() >= -1e-9


def test_metric_flags_and_json_round_trip():
    assert BallNorm(2).is_proven_metric and not BallNorm(2.5).is_proven_metric
    assert Gauge(2).is_proven_metric and not Gauge(3).is_proven_metric
    assert not RhoPseudo().is_metric
    for m in MODELS + [RhoPseudo()]:
        assert model_from_json(m.to_json()) == m
    with pytest.raises(ValueError):
        model_from_json({"model": "taxicab"})
    with pytest.raises(ValueError):
        BallNorm(0)
    with pytest.raises(ValueError):
        KappaGauge(-1, 2)


def test_triangle_probe_for_large_alpha_reports_evidence():
    probe = triangle_probe(BallNorm(3.0), samples=20_000, seed=3)
    assert probe.samples == 20_000
    assert math.isfinite(probe.worst_excess)
    assert probe.worst_triple is not None


def test_a_poly_arr_broadcasts():
    p = np.array([[2.0, 0, 0], [1.0, 1.0, -1.0]])
    assert a_poly_arr(2.0, p, np.zeros(3)).tolist() == [0.0, 0.0]


@pytest.mark.parametrize(
    "m, top", [(BallNorm(2), 2.0), (KappaGauge(1, 2), 0.25), (Box(), 0.25), (Gauge(2), 0.25)], ids=str
)
def test_sphere_section_poles(m, top):
    s = sphere_section(m, "xz", 201)
    mid = len(s.coord) // 2
    assert s.coord[mid] == 0
    assert s.z_plus[mid] == pytest.approx(top, abs=1e-11)
    assert s.z_minus[mid] == pytest.approx(-top, abs=1e-11)
    # every computed point lies on the unit sphere
    g = np.stack([s.coord, np.zeros_like(s.coord), s.z_plus], axis=-1)
    assert np.allclose(m.norm_arr(g), 1, atol=1e-9)


def test_sphere_section_kappa_profile_and_failures():
    m = KappaGauge(1, 2)
    s = sphere_section(m, "yz", 101)
    inner = np.abs(s.coord) < 0.5
    assert np.allclose(s.z_plus[inner], m.xz_profile(s.coord[inner]), atol=1e-11)
    flat = sphere_section(RhoPseudo(), "xz", 21)
    assert np.all(np.isnan(flat.z_plus))
    with pytest.raises(ValueError):
        sphere_section(m, "xy", 101)
    with pytest.raises(ValueError):
        sphere_section(m, "xz", 7)
