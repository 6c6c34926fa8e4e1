"""Homogeneous distances on the Heisenberg group, balls and derived constants.

Every model is left-invariant by construction: ``d(p, q) = N(p^{-1} q)`` for a
homogeneous norm ``N``.  Models expose a vectorized ``norm_arr`` and a separate
``unit_ball_arr`` predicate; the predicate is the set-level definition of the
unit ball and is what :func:`distance_by_bisection` uses, so the closed-form
norms always have an independent check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .group import Point, as_points, translate_to_origin


@dataclass(frozen=True)
class BallNorm:
    """Distance whose unit ball at the origin is the Euclidean ball of radius alpha."""

    alpha: float
    name = "ball_norm"

    def __post_init__(self):
        _set_positive(self, "alpha")

    @property
    def is_metric(self) -> bool:
        # triangle inequality is only known for alpha <= 2
        return self.alpha <= 2

    @property
    def is_proven_metric(self) -> bool:
        return self.is_metric

    def norm_arr(self, g):
        g = np.asarray(g, dtype=float)
        r2 = g[..., 0] ** 2 + g[..., 1] ** 2
        a = self.alpha
        return np.sqrt((r2 + np.sqrt(r2 * r2 + 4 * a * a * g[..., 2] ** 2)) / (2 * a * a))

    def unit_ball_arr(self, g):
        g = np.asarray(g, dtype=float)
        return g[..., 0] ** 2 + g[..., 1] ** 2 + g[..., 2] ** 2 <= self.alpha**2

    def to_json(self) -> dict:
        return {"model": self.name, "alpha": self.alpha}


@dataclass(frozen=True)
class Gauge:
    """Cygan-Koranyi type gauge ``(rho^4 + 4 alpha^2 z^2)^(1/4)``."""

    alpha: float
    name = "gauge"

    def __post_init__(self):
        _set_positive(self, "alpha")

    @property
    def is_metric(self) -> bool:
        return self.alpha <= 2

    @property
    def is_proven_metric(self) -> bool:
        return self.is_metric

    def norm_arr(self, g):
        g = np.asarray(g, dtype=float)
        r2 = g[..., 0] ** 2 + g[..., 1] ** 2
        return np.sqrt(np.sqrt(r2 * r2 + 4 * self.alpha**2 * g[..., 2] ** 2))

    def unit_ball_arr(self, g):
        g = np.asarray(g, dtype=float)
        r2 = g[..., 0] ** 2 + g[..., 1] ** 2
        return r2 * r2 + 4 * self.alpha**2 * g[..., 2] ** 2 <= 1.0

    def to_json(self) -> dict:
        return {"model": self.name, "alpha": self.alpha}


@dataclass(frozen=True)
class Box:
    """Box distance ``max(rho, 2 |z|^(1/2))``; the unit sphere has a flat top."""

    name = "box"
    is_metric = True

    def norm_arr(self, g):
        g = np.asarray(g, dtype=float)
        return np.maximum(np.hypot(g[..., 0], g[..., 1]), 2 * np.sqrt(np.abs(g[..., 2])))

    def unit_ball_arr(self, g):
        g = np.asarray(g, dtype=float)
        return (g[..., 0] ** 2 + g[..., 1] ** 2 <= 1.0) & (4 * np.abs(g[..., 2]) <= 1.0)

    def to_json(self) -> dict:
        return {"model": self.name}


@dataclass(frozen=True)
class KappaGauge:
    """``kappa * rho + gauge``: the unit sphere has outgoing corners at the poles."""

    kappa: float
    alpha: float
    name = "kappa_gauge"

    def __post_init__(self):
        _set_positive(self, "kappa", "alpha")

    @property
    def is_metric(self) -> bool:
        # sum of the pseudo-distance d_rho and a gauge metric
        return self.alpha <= 2

    def norm_arr(self, g):
        g = np.asarray(g, dtype=float)
        r = np.hypot(g[..., 0], g[..., 1])
        return self.kappa * r + np.sqrt(np.sqrt(r**4 + 4 * self.alpha**2 * g[..., 2] ** 2))

    def unit_ball_arr(self, g):
        g = np.asarray(g, dtype=float)
        r = np.hypot(g[..., 0], g[..., 1])
        rest = 1.0 - self.kappa * r
        return (rest >= 0) & (r**4 + 4 * self.alpha**2 * g[..., 2] ** 2 <= rest**4)

    def xz_profile(self, x):
        """Height of the upper unit sphere over ``(x, 0)``; NaN outside the ball."""
        x = np.abs(np.asarray(x, dtype=float))
        inner = (1 - self.kappa * x) ** 4 - x**4
        with np.errstate(invalid="ignore"):
            out = np.sqrt(inner) / (2 * self.alpha)
        return np.where((inner >= 0) & (self.kappa * x <= 1), out, np.nan)

    def to_json(self) -> dict:
        return {"model": self.name, "kappa": self.kappa, "alpha": self.alpha}


@dataclass(frozen=True)
class RhoPseudo:
    """Horizontal pseudo-distance ``rho(p^{-1} q)``; vanishes along vertical lines."""

    name = "rho"
    is_metric = False

    def norm_arr(self, g):
        g = np.asarray(g, dtype=float)
        return np.hypot(g[..., 0], g[..., 1])

    def unit_ball_arr(self, g):
        g = np.asarray(g, dtype=float)
        return g[..., 0] ** 2 + g[..., 1] ** 2 <= 1.0

    def to_json(self) -> dict:
        return {"model": self.name}


DistanceModel = Union[BallNorm, Gauge, Box, KappaGauge, RhoPseudo]


def _check_positive(name, v):
    if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
        raise ValueError(f"{name} must be a positive finite number, got {v!r}")


def _set_positive(obj, *names):
    # validate and store as float so that equal models serialize identically
    for name in names:
        v = getattr(obj, name)
        _check_positive(name, v)
        object.__setattr__(obj, name, float(v))


def model_from_json(obj: dict) -> DistanceModel:
    tag = obj.get("model")
    if tag == "ball_norm":
        return BallNorm(float(obj["alpha"]))
    if tag == "gauge":
        return Gauge(float(obj["alpha"]))
    if tag == "box":
        return Box()
    if tag == "kappa_gauge":
        return KappaGauge(float(obj["kappa"]), float(obj["alpha"]))
    if tag == "rho":
        return RhoPseudo()
    raise ValueError(f"unknown distance model {tag!r}")


def model_to_json(m: DistanceModel) -> dict:
    return m.to_json()


# -- distances -------------------------------------------------------------


def norm(m: DistanceModel, p: Point) -> float:
    return float(m.norm_arr(p.as_array()))


def distance(m: DistanceModel, p: Point, q: Point) -> float:
    return float(m.norm_arr(translate_to_origin(p.as_array(), q.as_array())))


def distances(m: DistanceModel, p, q) -> np.ndarray:
    """Broadcasting version of :func:`distance` over (..., 3) arrays."""
    return m.norm_arr(translate_to_origin(as_points(p), as_points(q)))


# -- balls -----------------------------------------------------------------


@dataclass(frozen=True)
class Ball:
    center: Point
    radius: float
    model: DistanceModel

    def __post_init__(self):
        if not (math.isfinite(self.radius) and self.radius > 0):
            raise ValueError(f"ball radius must be positive, got {self.radius!r}")


def ball_slack_arr(m: DistanceModel, center, radius, q) -> np.ndarray:
    """Slack of the defining inequality of ``B(center, radius)`` at ``q``.

    Nonnegative iff ``q`` is in the closed ball.  For the Euclidean-ball model
    the slack is ``alpha^2 - (rho^2/r^2 + z^2/r^4)`` evaluated on ``center^{-1} q``,
    which avoids the square roots of the closed-form distance; for the other
    models it is ``radius - distance``.
    """
    g = translate_to_origin(as_points(center), as_points(q))
    radius = np.asarray(radius, dtype=float)
    if isinstance(m, BallNorm):
        r2 = radius * radius
        return m.alpha**2 - (g[..., 0] ** 2 + g[..., 1] ** 2) / r2 - g[..., 2] ** 2 / (r2 * r2)
    return radius - m.norm_arr(g)


def ball_slack(b: Ball, q: Point) -> float:
    return float(ball_slack_arr(b.model, b.center.as_array(), b.radius, q.as_array()))


def ball_contains(b: Ball, q: Point, margin: float = 0.0) -> bool:
    """Closed-ball membership; with ``margin > 0`` the slack must be at least ``margin``."""
    return ball_slack(b, q) >= margin


# -- the A_p(q) polynomial -------------------------------------------------


def r_of(alpha: float, p) -> np.ndarray:
    """``d_alpha(0, p)`` in closed form, vectorized."""
    return BallNorm(alpha).norm_arr(p)


def a_poly_arr(alpha: float, p, q) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    rp2 = r_of(alpha, p) ** 2
    xp, yp, zp = p[..., 0], p[..., 1], p[..., 2]
    xq, yq, zq = q[..., 0], q[..., 1], q[..., 2]
    w = zq - 0.5 * (xp * yq - xq * yp)
    return rp2 * (xq * xq + yq * yq - 2 * xq * xp - 2 * yq * yp) + w * w - 2 * zp * w


def a_poly(alpha: float, p: Point, q: Point) -> float:
    """``A_p(q)``: nonpositive exactly when ``q`` lies in ``B(p, d_alpha(0, p))``."""
    _check_positive("alpha", alpha)
    if p.x == 0 and p.y == 0 and p.z == 0:
        raise ValueError("A_p(q) needs p != 0 so that r_p > 0")
    return float(a_poly_arr(alpha, p.as_array(), q.as_array()))


# -- the defining infimum, as an oracle ------------------------------------

MAX_BRACKET_DOUBLINGS = 60


class BracketError(RuntimeError):
    pass


def _bisect_scale(member: Callable[[np.ndarray], np.ndarray], g: np.ndarray, tol: float) -> np.ndarray:
    """Vectorized ``inf{r > 0 : delta_{1/r}(g) in unit ball}``."""
    g = np.atleast_2d(np.asarray(g, dtype=float))
    n = g.shape[0]

    def inside(r):
        return member(np.stack([g[:, 0] / r, g[:, 1] / r, g[:, 2] / (r * r)], axis=-1))

    hi = np.ones(n)
    lo = np.ones(n)
    for _ in range(MAX_BRACKET_DOUBLINGS + 1):
        out = ~inside(hi)
        if not out.any():
            break
        hi = np.where(out, hi * 2, hi)
    else:
        raise BracketError("no upper bracket within 2^60 scaling")
    lo = hi / 2
    for _ in range(2 * MAX_BRACKET_DOUBLINGS + 1):
        ins = inside(lo)
        if not ins.any():
            break
        hi = np.where(ins, lo, hi)
        lo = np.where(ins, lo / 2, lo)
    else:
        raise BracketError("no lower bracket within 2^-120 scaling")
    while True:
        todo = (hi - lo) > tol
        if not todo.any():
            break
        mid = 0.5 * (lo + hi)
        ins = inside(mid)
        hi = np.where(todo & ins, mid, hi)
        lo = np.where(todo & ~ins, mid, lo)
        if np.all(mid[todo] == lo[todo]) and np.all(mid[todo] == hi[todo]):
            break
    return 0.5 * (lo + hi)


def distances_by_bisection(m: DistanceModel, p, q, tol: float = 1e-12) -> np.ndarray:
    if not tol > 0:
        raise ValueError("tol must be positive")
    g = translate_to_origin(as_points(p), as_points(q))
    g2 = np.atleast_2d(g)
    if np.any(np.all(g2 == 0, axis=-1)):
        raise ValueError("bisection oracle needs q != p")
    return _bisect_scale(m.unit_ball_arr, g2, tol).reshape(np.shape(g)[:-1])


def distance_by_bisection(m: DistanceModel, p: Point, q: Point, tol: float = 1e-12) -> float:
    """Realize the distance as the infimum of admissible dilation scales.

    Brackets the scale by doubling/halving and bisects the membership predicate
    of the model's unit ball; never touches the closed-form norm.
    """
    return float(distances_by_bisection(m, p.as_array(), q.as_array(), tol))


# -- constants used in the covering argument -------------------------------


@dataclass(frozen=True)
class DerivedConstants:
    alpha: float
    c1: float
    c2: float
    theta2: float

    def tt_coeff(self, b: float) -> float:
        a2 = self.alpha**2
        return (b * b + math.sqrt(b**4 + 4 * a2)) / (2 * a2)

    def sev1_quadratic(self, theta: float) -> float:
        t = math.tan(theta)
        return 1 - (1 + self.alpha**2 / 4) * t * t - self.alpha * t


def derived_constants(alpha: float) -> DerivedConstants:
    _check_positive("alpha", alpha)
    a2 = alpha * alpha
    c1 = 1 / (alpha * math.sqrt(2))
    c2 = math.sqrt((2 + math.sqrt(4 + 4 * a2)) / (2 * a2))
    # positive root of (1 + a^2/4) t^2 + a t - 1 = 0, written to avoid cancellation
    qa = 1 + a2 / 4
    t = 2 / (alpha + math.sqrt(a2 + 4 * qa))
    return DerivedConstants(alpha=alpha, c1=c1, c2=c2, theta2=math.atan(t))


# -- triangle inequality probe ---------------------------------------------


@dataclass(frozen=True)
class TriangleProbe:
    worst_excess: float
    worst_triple: tuple[list[float], list[float], list[float]] | None
    samples: int
    seed: int


def triangle_probe(
    m: DistanceModel, samples: int = 100_000, seed: int = 0, box: float = 10.0, batch: int = 200_000
) -> TriangleProbe:
    """Largest relative excess ``(d(p,r) - d(p,q) - d(q,r)) / (d(p,q) + d(q,r))``.

    Positive values are counterexamples to the triangle inequality.  Reports
    evidence only; used for alpha > 2 where nothing is claimed.
    """
    rng = np.random.default_rng(seed)
    worst = -math.inf
    triple = None
    done = 0
    while done < samples:
        k = min(batch, samples - done)
        p, q, r = (rng.uniform(-box, box, size=(k, 3)) for _ in range(3))
        dpq = distances(m, p, q)
        dqr = distances(m, q, r)
        dpr = distances(m, p, r)
        ex = (dpr - dpq - dqr) / np.maximum(dpq + dqr, np.finfo(float).tiny)
        i = int(np.argmax(ex))
        if ex[i] > worst:
            worst = float(ex[i])
            triple = (p[i].tolist(), q[i].tolist(), r[i].tolist())
        done += k
    return TriangleProbe(worst, triple, samples, seed)


# -- unit sphere cross-sections --------------------------------------------


@dataclass(frozen=True)
class SphereSection:
    plane: str
    coord: np.ndarray
    z_plus: np.ndarray  # nan where root finding failed
    z_minus: np.ndarray


def sphere_section(m: DistanceModel, plane: str = "xz", resolution: int = 201, tol: float = 1e-12) -> SphereSection:
    """Cross-section of the unit sphere at 0 with the ``xz`` or ``yz`` plane.

    The horizontal extent is ``1 / N(e)`` for the unit horizontal vector ``e``
    (homogeneity).  On a grid of ``resolution`` abscissae, widened to an odd
    count so that 0 is a node, ``z_plus`` and ``z_minus`` are found by
    bisection on ``N(., z) - 1`` along the vertical line through each node.
    Failures (no bracket, or the base point already outside) are ``nan``.
    """
    if plane not in ("xz", "yz"):
        raise ValueError("plane must be 'xz' or 'yz'")
    if resolution < 8:
        raise ValueError("resolution must be at least 8")
    if not tol > 0:
        raise ValueError("tol must be positive")
    axis = 0 if plane == "xz" else 1
    e = np.zeros(3)
    e[axis] = 1.0
    extent = 1.0 / float(m.norm_arr(e))
    n = resolution | 1
    u = np.linspace(-extent, extent, n)
    u[n // 2] = 0.0

    def pts(z):
        g = np.zeros((n, 3))
        g[:, axis] = u
        g[:, 2] = z
        return g

    def solve(sign):
        out = np.full(n, np.nan)
        ok = m.norm_arr(pts(0.0)) <= 1 + tol
        lo = np.zeros(n)
        hi = np.ones(n)
        for _ in range(MAX_BRACKET_DOUBLINGS + 1):
            grow = ok & (m.norm_arr(pts(sign * hi)) <= 1)
            if not grow.any():
                break
            lo = np.where(grow, hi, lo)
            hi = np.where(grow, 2 * hi, hi)
        else:
            ok &= ~grow
        while True:
            todo = ok & ((hi - lo) > tol * np.maximum(1.0, hi))
            if not todo.any():
                break
            mid = 0.5 * (lo + hi)
            stuck = todo & ((mid == lo) | (mid == hi))
            todo &= ~stuck
            ins = m.norm_arr(pts(sign * mid)) <= 1
            lo = np.where(todo & ins, mid, lo)
            hi = np.where(todo & ~ins, mid, hi)
            if not todo.any():
                break
        out[ok] = sign * 0.5 * (lo[ok] + hi[ok])
        return out

    return SphereSection(plane, u, solve(1.0), solve(-1.0))
