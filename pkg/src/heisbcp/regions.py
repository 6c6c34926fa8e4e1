"""Regions of the Heisenberg group and sampling-based checks of inclusions among them.

All regions are plain predicates on ``(x, y, z)``.  Inclusion checks report the
worst slack of the ball inequality (``alpha^2 - rho^2/r^2 - z^2/r^4`` evaluated
on ``p^{-1} q``), so a nonnegative slack means inclusion.  Where the region is
the convex hull of finitely many points (quadrilaterals, frusta), only the
vertices are tested: balls of the Euclidean-ball distance are Euclidean convex.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

from . import defaults
from .group import Point, as_points
from .metrics import Ball, BallNorm, ball_slack_arr, derived_constants, r_of


def _check_angle(theta: float) -> None:
    if not 0 < theta < math.pi / 2:
        raise ValueError(f"angle must lie in (0, pi/2), got {theta!r}")


def _axis(axis) -> tuple[float, float]:
    ax = (float(axis[0]), float(axis[1]))
    if ax == (0.0, 0.0):
        raise ValueError("cone axis must not be the origin")
    return ax


# -- region types ----------------------------------------------------------


@dataclass(frozen=True)
class PRegion:
    """``{x > a, |z| < b, |y| < x tan(theta)}``."""

    a: float
    b: float
    theta: float

    def __post_init__(self):
        _check_angle(self.theta)
        if not self.b > 0:
            raise ValueError("b must be positive")

    def contains_arr(self, p):
        p = as_points(p)
        x, y, z = p[..., 0], p[..., 1], p[..., 2]
        return (x > self.a) & (np.abs(z) < self.b) & (np.abs(y) < x * math.tan(self.theta))

    def sample(self, rng: np.random.Generator, n: int, spread: float = 1e3) -> np.ndarray:
        """Draw ``x`` log-uniformly in ``(a, spread * a)``; ``y``, ``z`` uniformly."""
        if not self.a > 0:
            raise ValueError("sampling P needs a > 0")
        x = self.a * np.exp(rng.uniform(0, math.log(spread), n))
        x = np.where(x > self.a, x, np.nextafter(self.a, math.inf))
        y = rng.uniform(-1, 1, n) * x * math.tan(self.theta)
        z = rng.uniform(-1, 1, n) * self.b
        return np.stack([x, y, z], axis=-1)


@dataclass(frozen=True)
class TRegion:
    """``{z < -a, rho < b}``."""

    a: float
    b: float

    def __post_init__(self):
        if not self.b > 0:
            raise ValueError("b must be positive")

    def contains_arr(self, p):
        p = as_points(p)
        return (p[..., 2] < -self.a) & (np.hypot(p[..., 0], p[..., 1]) < self.b)

    def sample(self, rng: np.random.Generator, n: int, spread: float = 1e3) -> np.ndarray:
        if not self.a > 0:
            raise ValueError("sampling T needs a > 0")
        z = -self.a * np.exp(rng.uniform(0, math.log(spread), n))
        z = np.where(z < -self.a, z, np.nextafter(-self.a, -math.inf))
        rad = self.b * np.sqrt(rng.uniform(0, 1, n))
        ang = rng.uniform(0, 2 * math.pi, n)
        return np.stack([rad * np.cos(ang), rad * np.sin(ang), z], axis=-1)


@dataclass(frozen=True)
class ConeC:
    """Open vertical wedge ``{|y| < x tan(theta)}``."""

    theta: float

    def __post_init__(self):
        _check_angle(self.theta)

    def contains_arr(self, p):
        p = as_points(p)
        return np.abs(p[..., 1]) < p[..., 0] * math.tan(self.theta)

    def sample(self, rng: np.random.Generator, n: int, rmax: float = 10.0, zmax: float = 10.0):
        ang = rng.uniform(-self.theta, self.theta, n)
        rad = rmax * np.sqrt(rng.uniform(0, 1, n))
        return np.stack([rad * np.cos(ang), rad * np.sin(ang), rng.uniform(-zmax, zmax, n)], axis=-1)


@dataclass(frozen=True)
class RSection:
    """Planar slice ``{x = t, |z| < b, |y| < t tan(theta)}``."""

    t: float
    b: float
    theta: float

    def __post_init__(self):
        _check_angle(self.theta)
        if not (self.t > 0 and self.b > 0):
            raise ValueError("R(t, b, theta) is empty unless t > 0 and b > 0")

    def contains_arr(self, p):
        p = as_points(p)
        return (
            (p[..., 0] == self.t)
            & (np.abs(p[..., 2]) < self.b)
            & (np.abs(p[..., 1]) < self.t * math.tan(self.theta))
        )

    def vertices(self) -> np.ndarray:
        """Corners of the closure."""
        w = self.t * math.tan(self.theta)
        return np.array([[self.t, sy * w, sz * self.b] for sy in (-1, 1) for sz in (-1, 1)])

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        w = self.t * math.tan(self.theta)
        return np.stack(
            [np.full(n, self.t), rng.uniform(-w, w, n), rng.uniform(-self.b, self.b, n)], axis=-1
        )


@dataclass(frozen=True)
class Disc:
    """Horizontal disc ``{z = t, rho < b}``."""

    t: float
    b: float

    def __post_init__(self):
        if not self.b > 0:
            raise ValueError("D(t, b) is empty unless b > 0")

    def contains_arr(self, p):
        p = as_points(p)
        return (p[..., 2] == self.t) & (np.hypot(p[..., 0], p[..., 1]) < self.b)

    def rim(self, k: int = 64) -> np.ndarray:
        ang = 2 * math.pi * np.arange(k) / k
        return np.stack([self.b * np.cos(ang), self.b * np.sin(ang), np.full(k, self.t)], axis=-1)

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        rad = self.b * np.sqrt(rng.uniform(0, 1, n))
        ang = rng.uniform(0, 2 * math.pi, n)
        return np.stack([rad * np.cos(ang), rad * np.sin(ang), np.full(n, self.t)], axis=-1)


@dataclass(frozen=True)
class ConeSection:
    """Closed planar half cone in ``{z = const}``: vertex ``(0, 0, z)``, axis through ``axis``, aperture ``2 theta``."""

    z: float
    axis: tuple[float, float]
    theta: float

    def __post_init__(self):
        _check_angle(self.theta)
        object.__setattr__(self, "axis", _axis(self.axis))

    def contains_arr(self, p):
        p = as_points(p)
        ux, uy = self.axis
        wx, wy = p[..., 0], p[..., 1]
        dot = ux * wx + uy * wy
        cross = ux * wy - uy * wx
        return (p[..., 2] == self.z) & (dot >= 0) & (np.abs(cross) <= math.tan(self.theta) * dot)

    def sample(self, rng: np.random.Generator, n: int, rmax: float) -> np.ndarray:
        """Area-uniform points of the cone truncated at horizontal radius ``rmax``."""
        base = math.atan2(self.axis[1], self.axis[0])
        ang = base + rng.uniform(-self.theta, self.theta, n)
        rad = rmax * np.sqrt(rng.uniform(0, 1, n))
        return np.stack([rad * np.cos(ang), rad * np.sin(ang), np.full(n, self.z)], axis=-1)


def quad_vertices(p: Point, z: float, theta: float) -> tuple[Point, Point, Point, Point]:
    """``(p_z, p_plus, p_minus, p_check)`` for the rhombus built on ``pi(p)`` at height ``z``."""
    if p.x == 0 and p.y == 0:
        raise ValueError("quadrilateral needs pi(p) != (0, 0)")
    t = math.tan(theta)
    return (
        Point(0.0, 0.0, z),
        Point(p.x - p.y * t, p.y + p.x * t, z),
        Point(p.x + p.y * t, p.y - p.x * t, z),
        Point(2 * p.x, 2 * p.y, z),
    )


def quad_vertices_arr(p, z, theta) -> np.ndarray:
    """Vectorized :func:`quad_vertices`; returns shape (..., 4, 3)."""
    p = as_points(p)
    z = np.broadcast_to(np.asarray(z, dtype=float), p.shape[:-1])
    t = np.tan(theta)
    x, y = p[..., 0], p[..., 1]
    zero = np.zeros_like(x)
    return np.stack(
        [
            np.stack([zero, zero, z], axis=-1),
            np.stack([x - y * t, y + x * t, z], axis=-1),
            np.stack([x + y * t, y - x * t, z], axis=-1),
            np.stack([2 * x, 2 * y, z], axis=-1),
        ],
        axis=-2,
    )


@dataclass(frozen=True)
class Quad:
    """Closed rhombus with vertices ``p_z, p_minus, p_check, p_plus`` (counter-clockwise)."""

    z: float
    axis: tuple[float, float]
    theta: float

    def __post_init__(self):
        _check_angle(self.theta)
        object.__setattr__(self, "axis", _axis(self.axis))

    def vertices(self) -> np.ndarray:
        pz, pp, pm, pc = quad_vertices(Point(self.axis[0], self.axis[1], 0.0), self.z, self.theta)
        return np.array([pz.to_list(), pm.to_list(), pc.to_list(), pp.to_list()])

    def contains_arr(self, p):
        p = as_points(p)
        v = self.vertices()[:, :2]
        ok = p[..., 2] == self.z
        for i in range(4):
            a, b = v[i], v[(i + 1) % 4]
            ex, ey = b[0] - a[0], b[1] - a[1]
            ok = ok & (ex * (p[..., 1] - a[1]) - ey * (p[..., 0] - a[0]) >= 0)
        return ok

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        v = self.vertices()
        s = rng.uniform(0, 1, (n, 1))
        t = rng.uniform(0, 1, (n, 1))
        return v[0] + s * (v[1] - v[0]) + t * (v[3] - v[0])


Region = Union[PRegion, TRegion, ConeC, RSection, Disc, ConeSection, Quad]


def region_contains(r: Region, p: Point) -> bool:
    return bool(r.contains_arr(p.as_array()))


# -- reports ---------------------------------------------------------------


@dataclass
class Report:
    lemma: str
    params: dict
    samples: int
    seed: int | None
    passed: bool
    worst_slack: float
    witness: list | None
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {
            "lemma": self.lemma,
            "params": self.params,
            "samples": self.samples,
            "seed": self.seed,
            "pass": self.passed,
            "worst_slack": self.worst_slack,
            "witness": self.witness,
        }
        if self.details:
            out["details"] = self.details
        return out


def _worst(slack: np.ndarray, pts: np.ndarray) -> tuple[float, list | None]:
    slack = np.ravel(slack)
    if slack.size == 0:
        return math.inf, None
    i = int(np.argmin(slack))
    return float(slack[i]), np.reshape(pts, (-1, pts.shape[-1]))[i].tolist()


Sampler = Callable[[np.random.Generator, int], np.ndarray]


def verify_inclusion(
    inner: Union[Region, Sampler],
    ball: Ball,
    samples: int = defaults.SAMPLES,
    margin: float = -defaults.INCLUSION_TOL,
    seed: int = defaults.SEED,
) -> Report:
    """Check ``inner`` is contained in ``ball``; passes iff the worst slack is ``>= margin``.

    A :class:`Quad` in a ball of the Euclidean-ball distance is checked exactly
    through its four vertices.  Any other region (or a plain sampler callable)
    is sampled uniformly.
    """
    if samples < 1:
        raise ValueError("samples must be at least 1")
    c = ball.center.as_array()
    if isinstance(inner, Quad) and isinstance(ball.model, BallNorm):
        pts = inner.vertices()
        used = 4
    else:
        rng = np.random.default_rng(seed)
        pts = inner.sample(rng, samples) if hasattr(inner, "sample") else inner(rng, samples)
        if hasattr(inner, "vertices"):
            pts = np.concatenate([pts, inner.vertices()])
        used = samples
    if len(pts) == 0:
        raise ValueError("empty region")
    slack = ball_slack_arr(ball.model, c, ball.radius, pts)
    worst, wit = _worst(slack, pts)
    return Report(
        lemma="inclusion",
        params={"region": type(inner).__name__, "center": ball.center.to_list(), "radius": ball.radius},
        samples=used,
        seed=None if used == 4 and isinstance(inner, Quad) else seed,
        passed=worst >= margin,
        worst_slack=worst,
        witness=wit,
    )


def _ball_slack(alpha: float, p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Slack of ``q in B(p, r_p)`` for the Euclidean-ball distance; broadcasts."""
    return ball_slack_arr(BallNorm(alpha), p, r_of(alpha, p), q)


# -- single-point lemmas ---------------------------------------------------


def check_x_axis(
    alpha: float, theta: float, a: float, b: float = 1.0, samples: int = defaults.SAMPLES,
    seed: int = defaults.SEED, interior: int = 4,
) -> Report:
    """Sampled check that every slice ``R(t, b, theta)``, ``1 <= t <= x_p``, lies in ``B(p, r_p)``.

    For each sampled ``p`` in ``P(a, b, theta)`` the union of the slices is a
    frustum whose closure has eight corners; those are tested exactly, together
    with ``interior`` random slice points per ``p``.
    """
    if not a >= 1:
        raise ValueError("the slices start at t = 1, so a >= 1 is required")
    rng = np.random.default_rng(seed)
    p = PRegion(a, b, theta).sample(rng, samples)
    tan = math.tan(theta)
    xp = p[:, 0]
    corners = []
    for t in (np.ones(samples), xp):
        for sy in (-1, 1):
            for sz in (-1, 1):
                corners.append(np.stack([t, sy * t * tan, np.full(samples, sz * b)], axis=-1))
    t = 1 + rng.uniform(0, 1, (samples, interior)) * (xp[:, None] - 1)
    inner = np.stack(
        [t, rng.uniform(-1, 1, t.shape) * t * tan, rng.uniform(-b, b, t.shape)], axis=-1
    )
    q = np.concatenate([np.stack(corners, axis=1), inner], axis=1)
    slack = _ball_slack(alpha, p[:, None, :], q)
    worst, wit = _worst(slack, q)
    i = int(np.argmin(slack.min(axis=1)))
    return Report(
        "x_axis", {"alpha": alpha, "theta": theta, "a": a, "b": b}, samples, seed,
        worst >= -defaults.INCLUSION_TOL, worst, wit, {"center": p[i].tolist()},
    )


def check_z_axis(
    alpha: float, a: float, b: float, samples: int = defaults.SAMPLES,
    seed: int = defaults.SEED, rim: int = 32, interior: int = 4,
) -> Report:
    """Sampled check that every disc ``D(t, b)``, ``z_p <= t <= -1``, lies in ``B(p, r_p)``.

    The union of the discs is a cylinder, the convex hull of its two rim
    circles; ``rim`` points on each circle plus random interior points are tested.
    """
    if not a >= 1:
        raise ValueError("the discs stop at t = -1, so a >= 1 is required")
    rng = np.random.default_rng(seed)
    p = TRegion(a, b).sample(rng, samples)
    zp = p[:, 2]
    ang = 2 * math.pi * np.arange(rim) / rim
    circ = np.stack([b * np.cos(ang), b * np.sin(ang)], axis=-1)
    rims = []
    for t in (np.full(samples, -1.0), zp):
        rims.append(
            np.concatenate(
                [np.broadcast_to(circ, (samples, rim, 2)), np.broadcast_to(t[:, None, None], (samples, rim, 1))],
                axis=-1,
            )
        )
    t = -1 + rng.uniform(0, 1, (samples, interior)) * (zp[:, None] + 1)
    rad = b * np.sqrt(rng.uniform(0, 1, t.shape))
    phi = rng.uniform(0, 2 * math.pi, t.shape)
    inner = np.stack([rad * np.cos(phi), rad * np.sin(phi), t], axis=-1)
    q = np.concatenate(rims + [inner], axis=1)
    slack = _ball_slack(alpha, p[:, None, :], q)
    worst, wit = _worst(slack, q)
    i = int(np.argmin(slack.min(axis=1)))
    return Report(
        "z_axis", {"alpha": alpha, "a": a, "b": b}, samples, seed,
        worst >= -defaults.INCLUSION_TOL, worst, wit, {"center": p[i].tolist()},
    )


def sample_sev1(rng: np.random.Generator, n: int, box: float = 10.0) -> tuple[np.ndarray, np.ndarray]:
    """Random ``p`` off the z-axis and heights ``z`` with ``|z - z_p| <= |z_p|``."""
    p = rng.uniform(-box, box, (n, 3))
    z = p[:, 2] * (1 + rng.uniform(-1, 1, n))
    return p, z


def check_sev1(
    alpha: float, theta: float | None = None, samples: int = defaults.SAMPLES, seed: int = defaults.SEED
) -> Report:
    """Exact vertex test of ``Q(z, pi(p), theta)`` in ``B(p, r_p)`` on random ``(p, z)``.

    ``theta`` defaults to the critical angle of :func:`derived_constants`.
    """
    if theta is None:
        theta = derived_constants(alpha).theta2
    rng = np.random.default_rng(seed)
    p, z = sample_sev1(rng, samples)
    v = quad_vertices_arr(p, z, theta)
    slack = _ball_slack(alpha, p[:, None, :], v)
    worst, wit = _worst(slack, v)
    return Report(
        "sev1", {"alpha": alpha, "theta": theta}, samples, seed,
        worst >= -defaults.INCLUSION_TOL, worst, wit,
    )


def check_pp(
    alpha: float, theta: float, a: float, b: float, samples: int = defaults.SAMPLES, seed: int = defaults.SEED
) -> Report:
    """``c1 x_p <= r_p <= c2 x_p`` on ``P(a, b, theta)``; slack is relative to ``x_p``."""
    if not (theta < math.pi / 4 and a * a >= b):
        raise ValueError("needs theta < pi/4 and a^2 >= b")
    k = derived_constants(alpha)
    p = PRegion(a, b, theta).sample(np.random.default_rng(seed), samples)
    r = r_of(alpha, p)
    x = p[:, 0]
    slack = np.minimum(r / x - k.c1, k.c2 - r / x)
    worst, wit = _worst(slack, p)
    return Report(
        "PP", {"alpha": alpha, "theta": theta, "a": a, "b": b, "c1": k.c1, "c2": k.c2},
        samples, seed, worst >= -defaults.INCLUSION_TOL, worst, wit,
    )


def check_tt(alpha: float, a: float, b: float, samples: int = defaults.SAMPLES, seed: int = defaults.SEED) -> Report:
    """``r_p^2 <= tt_coeff(b) |z_p|`` on ``T(a, b)``; slack is relative to ``|z_p|``."""
    if not a >= 1:
        raise ValueError("needs a >= 1")
    k = derived_constants(alpha)
    p = TRegion(a, b).sample(np.random.default_rng(seed), samples)
    slack = k.tt_coeff(b) - r_of(alpha, p) ** 2 / np.abs(p[:, 2])
    worst, wit = _worst(slack, p)
    return Report(
        "TT", {"alpha": alpha, "a": a, "b": b, "tt_coeff": k.tt_coeff(b)},
        samples, seed, worst >= -defaults.INCLUSION_TOL, worst, wit,
    )


# -- cone properties -------------------------------------------------------


def _count_report(name, params, samples, seed, bad, pts) -> Report:
    nbad = int(np.count_nonzero(bad))
    wit = pts[int(np.argmax(bad))].tolist() if nbad else None
    return Report(name, params, samples, seed, nbad == 0, 0.0 if nbad == 0 else -float(nbad), wit,
                  {"violations": nbad})


def check_prop1(theta: float, samples: int = defaults.SAMPLES, seed: int = defaults.SEED) -> Report:
    """For ``p, q`` in ``C(theta)``, ``q`` lies in the cone of half-aperture ``2 theta`` around ``pi(p)``."""
    if not 0 < theta < math.pi / 4:
        raise ValueError("needs 0 < theta < pi/4 so that 2 theta is a valid aperture")
    rng = np.random.default_rng(seed)
    c = ConeC(theta)
    p = c.sample(rng, samples)
    q = c.sample(rng, samples)
    inside = c.contains_arr(p) & c.contains_arr(q)
    tan2 = math.tan(2 * theta)
    dot = p[:, 0] * q[:, 0] + p[:, 1] * q[:, 1]
    cross = p[:, 0] * q[:, 1] - p[:, 1] * q[:, 0]
    ok = (dot >= 0) & (np.abs(cross) <= tan2 * dot)
    bad = inside & ~ok
    return _count_report("prop1", {"theta": theta}, samples, seed, bad, np.concatenate([p, q], axis=1))


def _random_axes(rng, n):
    ang = rng.uniform(0, 2 * math.pi, n)
    rad = rng.uniform(0.1, 10, n)
    return np.stack([rad * np.cos(ang), rad * np.sin(ang), rng.uniform(-10, 10, n)], axis=-1)


def check_prop2(theta: float, samples: int = defaults.SAMPLES, seed: int = defaults.SEED) -> Report:
    """Points of the rhombus lie in the cone of the same half-aperture."""
    _check_angle(theta)
    rng = np.random.default_rng(seed)
    p = _random_axes(rng, samples)
    v = quad_vertices_arr(p, p[:, 2], theta)
    s = rng.uniform(0, 1, (samples, 1))
    t = rng.uniform(0, 1, (samples, 1))
    q = v[:, 0] + s * (v[:, 2] - v[:, 0]) + t * (v[:, 1] - v[:, 0])
    dot = p[:, 0] * q[:, 0] + p[:, 1] * q[:, 1]
    cross = p[:, 0] * q[:, 1] - p[:, 1] * q[:, 0]
    # relative tolerance on the cone edges, which the rhombus touches
    tol = 1e-12 * (p[:, 0] ** 2 + p[:, 1] ** 2)
    ok = (dot >= -tol) & (np.abs(cross) <= math.tan(theta) * dot + tol)
    return _count_report("prop2", {"theta": theta}, samples, seed, ~ok, q)


def check_prop4(theta: float, samples: int = defaults.SAMPLES, seed: int = defaults.SEED) -> Report:
    """Cone points with ``rho_q cos(theta) <= rho_p`` lie in the rhombus (needs ``theta < pi/4``)."""
    if not 0 < theta < math.pi / 4:
        raise ValueError("needs 0 < theta < pi/4")
    rng = np.random.default_rng(seed)
    p = _random_axes(rng, samples)
    rho_p = np.hypot(p[:, 0], p[:, 1])
    base = np.arctan2(p[:, 1], p[:, 0])
    ang = base + rng.uniform(-theta, theta, samples)
    rad = rho_p / math.cos(theta) * np.sqrt(rng.uniform(0, 1, samples))
    q = np.stack([rad * np.cos(ang), rad * np.sin(ang), p[:, 2]], axis=-1)
    keep = rad * math.cos(theta) <= rho_p
    v = quad_vertices_arr(p, p[:, 2], theta)[:, [0, 2, 3, 1], :2]  # counter-clockwise
    ok = np.ones(samples, dtype=bool)
    scale = 1e-12 * rho_p**2
    for i in range(4):
        a, b = v[:, i], v[:, (i + 1) % 4]
        e = b - a
        ok &= e[:, 0] * (q[:, 1] - a[:, 1]) - e[:, 1] * (q[:, 0] - a[:, 0]) >= -scale
    return _count_report("prop4", {"theta": theta}, samples, seed, keep & ~ok, q)


# -- pair lemmas -----------------------------------------------------------


@dataclass(frozen=True)
class Comparison:
    applicable: bool
    reason: str
    z_slack: float  # 2 z_p - z_q, positive when z_q < 2 z_p
    rho_slack: float  # rho_p cos(2 theta) - rho_q
    passed: bool


def _comparison_arrays(alpha, theta, p, q, margin):
    rp = np.hypot(p[..., 0], p[..., 1])
    rq = np.hypot(q[..., 0], q[..., 1])
    tan = math.tan(theta)
    hyp_z = (p[..., 2] <= 0) & (q[..., 2] <= 0)
    hyp_rho = rq <= rp
    hyp_cone = (np.abs(p[..., 1]) < p[..., 0] * tan) & (np.abs(q[..., 1]) < q[..., 0] * tan)
    s_qp = _ball_slack(alpha, p, q)
    s_pq = _ball_slack(alpha, q, p)
    hyp_out = (s_qp < -margin) & (s_pq < -margin)
    z_slack = 2 * p[..., 2] - q[..., 2]
    rho_slack = rp * math.cos(2 * theta) - rq
    return hyp_z, hyp_rho, hyp_cone, hyp_out, z_slack, rho_slack


def verify_comparison(alpha: float, theta: float, p: Point, q: Point, margin: float = 0.0) -> Comparison:
    """Check ``z_q < 2 z_p`` and ``rho_q < rho_p cos(2 theta)`` when the hypotheses hold.

    Hypotheses: both heights nonpositive, ``rho_q <= rho_p``, both points in
    ``C(theta)``, and each point outside the other's ball with slack beyond
    ``margin``.  Violated hypotheses give a not-applicable result.
    """
    _check_angle(theta)
    hz, hr, hc, ho, zs, rs = _comparison_arrays(alpha, theta, p.as_array(), q.as_array(), margin)
    for ok, why in ((hz, "heights must be nonpositive"), (hr, "needs rho_q <= rho_p"),
                    (hc, "both points must lie in C(theta)"), (ho, "points must not lie in each other's balls")):
        if not bool(ok):
            return Comparison(False, why, float(zs), float(rs), False)
    return Comparison(True, "", float(zs), float(rs), bool(zs > 0 and rs > 0))


def sample_comparison_pairs(
    alpha: float, theta: float, rng: np.random.Generator, n: int, max_batches: int = 1000, batch: int = 50_000,
) -> tuple[np.ndarray, np.ndarray, int]:
    """Rejection-sample ``n`` pairs satisfying the comparison hypotheses.

    ``p`` is normalized by dilation onto the unit sphere (``r_p = 1``, the
    Euclidean sphere of radius alpha); ``q`` is a dilate of another unit-sphere
    point by a log-uniform factor in ``[1e-2, 1]``, then the pair is swapped if
    needed so that ``rho_q <= rho_p``.  Returns the pairs and the number drawn.
    """
    out_p, out_q = [], []
    have = drawn = 0
    for _ in range(max_batches):
        if have >= n:
            break

        def unit(k):
            ang = rng.uniform(-theta, theta, k)
            # uniform on the part of the sphere with z <= 0 over the wedge
            zc = -rng.uniform(0, 1, k)
            h = np.sqrt(1 - zc * zc)
            return alpha * np.stack([h * np.cos(ang), h * np.sin(ang), zc], axis=-1)

        p = unit(batch)
        lam = np.exp(rng.uniform(math.log(1e-2), 0, batch))
        q = unit(batch) * np.stack([lam, lam, lam * lam], axis=-1)
        swap = np.hypot(q[:, 0], q[:, 1]) > np.hypot(p[:, 0], p[:, 1])
        p, q = np.where(swap[:, None], q, p), np.where(swap[:, None], p, q)
        hz, hr, hc, ho, _, _ = _comparison_arrays(alpha, theta, p, q, 0.0)
        keep = hz & hr & hc & ho
        drawn += batch
        out_p.append(p[keep])
        out_q.append(q[keep])
        have += int(keep.sum())
    p = np.concatenate(out_p)[:n]
    q = np.concatenate(out_q)[:n]
    return p, q, drawn


def check_comparison(
    alpha: float, theta: float, samples: int = defaults.SAMPLES, seed: int = defaults.SEED
) -> Report:
    rng = np.random.default_rng(seed)
    p, q, drawn = sample_comparison_pairs(alpha, theta, rng, samples)
    _, _, _, _, zs, rs = _comparison_arrays(alpha, theta, p, q, 0.0)
    slack = np.minimum(zs / np.abs(p[:, 2]).clip(min=np.finfo(float).tiny), rs / np.hypot(p[:, 0], p[:, 1]))
    worst, _ = _worst(slack, p)
    i = int(np.argmin(slack)) if len(slack) else 0
    wit = [p[i].tolist(), q[i].tolist()] if len(slack) else None
    enough = len(p) >= samples
    return Report(
        "comparisonincone", {"alpha": alpha, "theta": theta}, len(p), seed,
        enough and worst > 0, worst, wit, {"drawn": drawn, "accepted": len(p)},
    )


def _mutual_exclusion(alpha, p, q):
    return (_ball_slack(alpha, p, q) < 0) & (_ball_slack(alpha, q, p) < 0)


def check_x_axis_pairs(
    alpha: float, theta: float, a: float, b: float = 1.0, samples: int = defaults.PAIR_SAMPLES,
    seed: int = defaults.SEED,
) -> Report:
    """No two points of ``P(a, b, theta)`` may sit outside each other's balls."""
    rng = np.random.default_rng(seed)
    reg = PRegion(a, b, theta)
    p, q = reg.sample(rng, samples), reg.sample(rng, samples)
    bad = _mutual_exclusion(alpha, p, q)
    return _count_report("x_axis0_pairs", {"alpha": alpha, "theta": theta, "a": a, "b": b}, samples, seed,
                         bad, np.concatenate([p, q], axis=1))


def check_z_axis_pairs(
    alpha: float, a: float, b: float, samples: int = defaults.PAIR_SAMPLES, seed: int = defaults.SEED,
) -> Report:
    """No two points of ``T(a, b)`` may sit outside each other's balls."""
    rng = np.random.default_rng(seed)
    reg = TRegion(a, b)
    p, q = reg.sample(rng, samples), reg.sample(rng, samples)
    bad = _mutual_exclusion(alpha, p, q)
    return _count_report("z_axis0_pairs", {"alpha": alpha, "a": a, "b": b}, samples, seed,
                         bad, np.concatenate([p, q], axis=1))


# -- threshold sweeps ------------------------------------------------------


class SweepExhausted(RuntimeError):
    def __init__(self, msg, trace):
        super().__init__(msg)
        self.trace = trace


@dataclass(frozen=True)
class Thresholds:
    lemma: str
    values: dict
    trace: list

    def to_json(self) -> dict:
        return {"lemma": self.lemma, "values": self.values, "trace": self.trace}


def threshold_search(
    alpha: float, lemma: str, samples: int = defaults.SAMPLES, seed: int = defaults.SEED,
    steps: int = defaults.SWEEP_STEPS,
) -> Thresholds:
    """Geometric sweep for the constants that the covering argument leaves implicit.

    ``x_axis``: step k uses ``theta = theta0 / 2^k`` and ``a = a0 * 2^k``.
    ``z_axis``: step k uses ``a = a0 * 2^k`` and ``b = b0 / 2^k``.
    ``comparison``: step k uses ``theta = theta0 / 2^k``.
    The first step whose sampled check passes is returned.
    """
    trace = []
    for k in range(steps):
        if lemma == "x_axis":
            theta, a = defaults.SWEEP_THETA0 / 2**k, defaults.SWEEP_A0 * 2**k
            rep = check_x_axis(alpha, theta, a, 1.0, samples, seed)
            vals = {"theta0": theta, "a0": a}
        elif lemma == "z_axis":
            a, b = defaults.SWEEP_A0 * 2**k, defaults.SWEEP_B0 / 2**k
            rep = check_z_axis(alpha, a, b, samples, seed)
            vals = {"a1": a, "b1": b}
        elif lemma == "comparison":
            theta = defaults.SWEEP_THETA0 / 2**k
            rep = check_comparison(alpha, theta, samples, seed)
            vals = {"theta1": theta}
        else:
            raise ValueError(f"unknown lemma {lemma!r}; expected x_axis, z_axis or comparison")
        trace.append({**vals, "pass": rep.passed, "worst_slack": rep.worst_slack})
        if rep.passed:
            return Thresholds(lemma, vals, trace)
    raise SweepExhausted(f"no passing configuration for {lemma} within {steps} steps", trace)
