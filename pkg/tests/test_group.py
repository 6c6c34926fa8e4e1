import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from heisbcp.group import (
    ORIGIN,
    Point,
    dilate,
    dilate_arr,
    inverse,
    multiply,
    multiply_arr,
    project,
    reflect,
    reflect_arr,
    rho,
    rotate_z,
    rotate_z_arr,
    translate_to_origin,
)

coord = st.floats(-1e3, 1e3, allow_nan=False)
points = st.builds(Point, coord, coord, coord)
scales = st.floats(1e-3, 1e3)


def close(p, q, tol=1e-12):
    return all(abs(a - b) <= tol * max(1.0, abs(a), abs(b)) for a, b in zip(p, q))


def test_group_law_examples():
    assert multiply(Point(1, 0, 0), Point(0, 1, 0)) == Point(1, 1, 0.5)
    assert multiply(Point(1, 2, 3), ORIGIN) == Point(1, 2, 3)
    assert multiply(Point(1, 2, 3), Point(-1, -2, -3)) == ORIGIN


def test_inverse_dilate_examples():
    assert inverse(Point(1, 2, 3)) == Point(-1, -2, -3)
    assert inverse(ORIGIN) == ORIGIN
    assert dilate(2, Point(1, 1, 1)) == Point(2, 2, 4)
    with pytest.raises(ValueError):
        dilate(0, Point(1, 1, 1))
    with pytest.raises(ValueError):
        dilate(-1.5, Point(1, 1, 1))


def test_rotation_reflection_examples():
    assert close(rotate_z(math.pi / 2, Point(1, 0, 5)), Point(0, 1, 5))
    assert rotate_z(0.0, Point(1, 2, 3)) == Point(1, 2, 3)
    assert reflect(Point(1, 2, 3)) == Point(1, -2, -3)
    assert reflect(Point(1, 0, 0)) == Point(1, 0, 0)


def test_rho_project():
    assert rho(Point(3, 4, 7)) == 5
    assert rho(Point(0, 0, 9)) == 0
    assert project(Point(1, 2, 3)) == (1, 2)


def test_point_rejects_non_finite():
    with pytest.raises(ValueError):
        Point(math.nan, 0, 0)
    with pytest.raises(ValueError):
        Point(0, math.inf, 0)


def test_point_serializes_as_list():
    assert Point(1, 2, 3).to_list() == [1.0, 2.0, 3.0]
    assert Point.of([1, 2, 3]) == Point(1, 2, 3)


@given(points)
def test_inverse_is_involution_and_inverts(p):
    assert inverse(inverse(p)) == p
    assert close(multiply(p, inverse(p)), ORIGIN)


@given(points, scales)
def test_dilations_form_a_group(p, lam):
    assert dilate(1.0, p) == p
    assert close(dilate(1 / lam, dilate(lam, p)), p, 1e-12)


@given(points, st.floats(-10, 10))
def test_rotation_round_trip(p, theta):
    assert close(rotate_z(-theta, rotate_z(theta, p)), p, 1e-12)


@given(points)
def test_reflection_is_involution(p):
    assert reflect(reflect(p)) == p


def _z_scale(*pts):
    # size of the terms summed into a z coordinate: |z| and products of horizontal coordinates
    h = sum(np.abs(p[..., :2]).sum(axis=-1) for p in pts)
    return np.maximum(1.0, h * h + sum(np.abs(p[..., 2]) for p in pts))


def test_associativity_and_automorphism_exact_on_dyadic_grid():
    # coordinates on a 2^-8 grid in [-1e3, 1e3]: every product and sum is exact in binary64
    rng = np.random.default_rng(1)
    p, q, r = (rng.integers(-256_000, 256_001, (100_000, 3)) / 256.0 for _ in range(3))
    assert np.max(np.abs(multiply_arr(multiply_arr(p, q), r) - multiply_arr(p, multiply_arr(q, r)))) <= 1e-12
    lam = 2.0 ** rng.integers(-9, 10, 100_000)
    lhs = dilate_arr(lam, multiply_arr(p, q))
    rhs = multiply_arr(dilate_arr(lam, p), dilate_arr(lam, q))
    assert np.max(np.abs(lhs - rhs) / lam[:, None] ** 2) <= 1e-12


def test_associativity_and_automorphism_sampled():
    rng = np.random.default_rng(1)
    p, q, r = (rng.uniform(-1e3, 1e3, (100_000, 3)) for _ in range(3))
    err = np.abs(multiply_arr(multiply_arr(p, q), r) - multiply_arr(p, multiply_arr(q, r)))
    assert np.max(err[:, :2]) <= 1e-12 * 3e3
    assert np.max(err[:, 2] / _z_scale(p, q, r)) <= 1e-12
    lam = rng.uniform(1e-3, 1e3, (100_000,))
    err = np.abs(dilate_arr(lam, multiply_arr(p, q)) - multiply_arr(dilate_arr(lam, p), dilate_arr(lam, q)))
    assert np.max(err[:, 2] / (lam**2 * _z_scale(p, q))) <= 1e-12


def test_isometries_commute_with_dilations_and_group_law():
    rng = np.random.default_rng(2)
    p, q = rng.uniform(-10, 10, (2, 10_000, 3))
    lam = rng.uniform(1e-3, 1e3, 10_000)
    theta = rng.uniform(-math.pi, math.pi, 10_000)
    a = dilate_arr(lam, rotate_z_arr(theta, p))
    b = rotate_z_arr(theta, dilate_arr(lam, p))
    assert np.allclose(a, b, rtol=1e-12, atol=1e-12)
    assert np.array_equal(dilate_arr(lam, reflect_arr(p)), reflect_arr(dilate_arr(lam, p)))
    # both maps are group automorphisms
    assert np.allclose(rotate_z_arr(theta, multiply_arr(p, q)),
                       multiply_arr(rotate_z_arr(theta, p), rotate_z_arr(theta, q)), rtol=1e-12, atol=1e-10)
    assert np.allclose(reflect_arr(multiply_arr(p, q)), multiply_arr(reflect_arr(p), reflect_arr(q)),
                       rtol=0, atol=1e-12)


def test_vectorized_matches_scalar():
    rng = np.random.default_rng(3)
    p, q = rng.uniform(-5, 5, (2, 50, 3))
    for a, b in zip(p, q):
        pa, pb = Point.of(a), Point.of(b)
        assert multiply_arr(a, b).tolist() == multiply(pa, pb).to_list()
        assert translate_to_origin(a, b).tolist() == multiply(inverse(pa), pb).to_list()
