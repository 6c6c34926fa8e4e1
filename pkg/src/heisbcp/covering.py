"""Besicovitch families: verification, reduction, counterexample generators and search.

A family of Besicovitch balls is a finite set of closed balls none of whose
centers lies in another ball of the family, all sharing a common point (the
witness).  Margins are reported so that floating-point verdicts can be judged:

* ``exclusion_margin = min_{B != B'} d(x_B, x_B') - r_B'`` must be positive;
* ``witness_margin = min_B r_B - d(x_B, witness)`` must be nonnegative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from . import defaults
from .group import ORIGIN, Point, dilate_arr, reflect_arr, rotate_z_arr, translate_to_origin
from .metrics import Ball, BallNorm, Box, DistanceModel, Gauge, KappaGauge, distances, model_from_json


class InvalidFamily(ValueError):
    pass


class ConstructionError(RuntimeError):
    """A generator could not meet one of its conditions; ``condition`` names it."""

    def __init__(self, condition: str, message: str, trace: list | None = None):
        super().__init__(f"{condition}: {message}")
        self.condition = condition
        self.trace = trace or []


@dataclass(frozen=True)
class BesicovitchFamily:
    model: DistanceModel
    centers: np.ndarray  # (k, 3)
    radii: np.ndarray  # (k,)
    witness: Point = ORIGIN

    def __post_init__(self):
        c = np.array(self.centers, dtype=float).reshape(-1, 3)
        r = np.array(self.radii, dtype=float).reshape(-1)
        if len(c) != len(r):
            raise ValueError("centers and radii differ in length")
        if not (np.all(np.isfinite(c)) and np.all(np.isfinite(r))):
            raise ValueError("non-finite center or radius")
        if np.any(r <= 0):
            raise ValueError("radii must be positive")
        c.flags.writeable = False
        r.flags.writeable = False
        object.__setattr__(self, "centers", c)
        object.__setattr__(self, "radii", r)

    @classmethod
    def from_balls(cls, balls: Sequence[Ball], witness: Point = ORIGIN) -> "BesicovitchFamily":
        if not balls:
            raise ValueError("a family needs at least one ball")
        models = {b.model for b in balls}
        if len(models) != 1:
            raise InvalidFamily("balls use different distance models")
        return cls(balls[0].model, [b.center.to_list() for b in balls], [b.radius for b in balls], witness)

    def __len__(self) -> int:
        return len(self.radii)

    def balls(self) -> list[Ball]:
        return [Ball(Point.of(c), float(r), self.model) for c, r in zip(self.centers, self.radii)]

    def margin_matrix(self) -> np.ndarray:
        """``M[i, j] = d(x_i, x_j) - r_j``; the diagonal is +inf."""
        d = distances(self.model, self.centers[:, None, :], self.centers[None, :, :])
        m = d - self.radii[None, :]
        np.fill_diagonal(m, np.inf)
        return m

    @property
    def exclusion_margin(self) -> float:
        return float(self.margin_matrix().min()) if len(self) > 1 else math.inf

    @property
    def witness_margin(self) -> float:
        d = distances(self.model, self.centers, self.witness.as_array())
        return float((self.radii - d).min())

    def to_json(self) -> dict:
        return {
            "model": self.model.to_json(),
            "witness": self.witness.to_list(),
            "balls": [{"center": c.tolist(), "radius": float(r)} for c, r in zip(self.centers, self.radii)],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "BesicovitchFamily":
        model = obj["model"]
        model = model_from_json(model if isinstance(model, dict) else {"model": model, **obj})
        balls = obj["balls"]
        if not balls:
            raise ValueError("family has no balls")
        return cls(
            model,
            [b["center"] for b in balls],
            [b["radius"] for b in balls],
            Point.of(obj.get("witness", [0.0, 0.0, 0.0])),
        )


@dataclass(frozen=True)
class FamilyReport:
    valid: bool
    cardinality: int
    exclusion_margin: float
    witness_margin: float
    worst_pair: tuple[int, int] | None
    reason: str = ""

    def to_json(self) -> dict:
        return {
            "valid": self.valid,
            "cardinality": self.cardinality,
            "exclusion_margin": self.exclusion_margin,
            "witness_margin": self.witness_margin,
            "worst_pair": list(self.worst_pair) if self.worst_pair else None,
            "reason": self.reason,
        }


def verify_family(f: BesicovitchFamily, require_margin: float = 0.0) -> FamilyReport:
    """Recompute both margins; valid iff ``exclusion_margin > require_margin`` and the witness is in every ball.

    Witness containment allows rounding of ``defaults.WITNESS_TOL`` relative to
    ``max(1, r)`` for each ball.
    """
    if require_margin < 0:
        raise ValueError("require_margin must be nonnegative")
    mm = f.margin_matrix()
    if len(f) > 1:
        i, j = np.unravel_index(int(np.argmin(mm)), mm.shape)
        excl, pair = float(mm[i, j]), (int(i), int(j))
    else:
        excl, pair = math.inf, None
    wd = f.radii - distances(f.model, f.centers, f.witness.as_array())
    wit = float(wd.min())
    wit_ok = bool(np.all(wd >= -defaults.WITNESS_TOL * np.maximum(1.0, f.radii)))
    reasons = []
    if not excl > require_margin:
        reasons.append(f"center {pair[0]} lies in ball {pair[1]} (margin {excl!r})")
    if not wit_ok:
        reasons.append(f"witness outside ball {int(np.argmin(wd))} (margin {wit!r})")
    return FamilyReport(not reasons, len(f), excl, wit, pair, "; ".join(reasons))


# -- reduction -------------------------------------------------------------


@dataclass(frozen=True)
class Reduction:
    family: BesicovitchFamily | None
    log: list
    input_card: int
    output_card: int
    theta: float

    @property
    def bound(self) -> float:
        return 2 * (math.pi / self.theta + 1) * self.output_card + 2

    @property
    def holds(self) -> bool:
        return self.input_card <= self.bound

    def to_json(self) -> dict:
        return {
            "input_card": self.input_card,
            "output_card": self.output_card,
            "theta": self.theta,
            "bound": self.bound,
            "holds": self.holds,
            "log": self.log,
            "family": self.family.to_json() if self.family else None,
        }


def _in_open_wedge(p: np.ndarray, theta: float) -> np.ndarray:
    return np.abs(p[:, 1]) < p[:, 0] * math.tan(theta)


def _best_window(phi: np.ndarray, width: float) -> np.ndarray:
    """Indices of a largest subset of angles fitting in an arc of length < ``width``."""
    order = np.argsort(phi, kind="stable")
    s = phi[order]
    ext = np.concatenate([s, s + 2 * math.pi])
    n = len(s)
    best_i, best_c = 0, 0
    j = 0
    for i in range(n):
        j = max(j, i)
        while j + 1 < i + n and ext[j + 1] - ext[i] < width:
            j += 1
        if j - i + 1 > best_c:
            best_i, best_c = i, j - i + 1
    return np.sort(order[(best_i + np.arange(best_c)) % n])


def reduce_family(f: BesicovitchFamily, theta: float) -> Reduction:
    """Normalize a family so that every center has ``z <= 0`` and lies in ``C(theta)``.

    Steps: translate the witness to the origin and shrink radii to
    ``d(0, p_j)``; drop centers on the z-axis; reflect if more centers have
    ``z > 0`` than ``z < 0``; keep the largest group of centers whose angles fit
    in an arc shorter than ``2 theta`` and rotate that arc onto the x-axis.
    The result satisfies ``Card(input) <= 2 (pi/theta + 1) Card(output) + 2``.
    """
    if not 0 < theta < math.pi / 2:
        raise ValueError("theta must lie in (0, pi/2)")
    rep = verify_family(f)
    if not rep.valid:
        raise InvalidFamily(f"input is not a Besicovitch family: {rep.reason}")
    log: list = []
    idx = np.arange(len(f))
    p = np.array(f.centers)
    if f.witness != ORIGIN:
        p = translate_to_origin(f.witness.as_array(), p)
        log.append({"op": "translate", "by": [-v for v in f.witness.to_list()]})
    axial = (p[:, 0] == 0) & (p[:, 1] == 0)
    if axial.any():
        log.append({"op": "discard_axial", "indices": idx[axial].tolist()})
        p, idx = p[~axial], idx[~axial]
    if len(p) == 0:
        log.append({"op": "empty"})
        return Reduction(None, log, len(f), 0, theta)
    if np.count_nonzero(p[:, 2] >= 0) > np.count_nonzero(p[:, 2] <= 0):
        p = reflect_arr(p)
        log.append({"op": "reflect"})
    keep = p[:, 2] <= 0
    if not keep.all():
        log.append({"op": "discard_positive_z", "indices": idx[~keep].tolist()})
        p, idx = p[keep], idx[keep]
    if not _in_open_wedge(p, theta).all():
        phi = np.arctan2(p[:, 1], p[:, 0])
        sel = _best_window(phi, 2 * theta * (1 - 1e-9))
        if len(sel) < len(p):
            log.append({"op": "select", "indices": idx[sel].tolist()})
        p, idx, phi = p[sel], idx[sel], phi[sel]
        # the selected arc starts at the member that follows the largest angular gap
        srt = np.sort(np.mod(phi, 2 * math.pi))
        gaps = np.diff(np.concatenate([srt, srt[:1] + 2 * math.pi]))
        start = srt[(int(np.argmax(gaps)) + 1) % len(srt)]
        span = float(np.max(np.mod(phi - start, 2 * math.pi)))
        angle = math.remainder(-(start + span / 2), 2 * math.pi)
        p = rotate_z_arr(angle, p)
        log.append({"op": "rotate", "angle": angle})
    if not _in_open_wedge(p, theta).all():
        raise ConstructionError("wedge", "rotated centers fell outside C(theta) by rounding")
    radii = f.model.norm_arr(p)
    if not log and np.array_equal(radii, f.radii):
        out = f
    else:
        if not np.array_equal(radii, f.radii[idx]):
            log.append({"op": "set_radii", "rule": "distance to the witness"})
        out = BesicovitchFamily(f.model, p, radii, ORIGIN)
    orep = verify_family(out)
    if not orep.valid:
        raise ConstructionError("rounding", f"reduced family lost validity: {orep.reason}")
    return Reduction(out, log, len(f), len(out), theta)


# -- final cardinality bound -----------------------------------------------


@dataclass(frozen=True)
class BoundReport:
    theta: float
    a: float
    b: float
    R: float
    m: float
    M: float
    reduction_card: int
    card_bound: float
    family_bound: float

    @property
    def holds(self) -> bool:
        return self.reduction_card <= self.card_bound

    def to_json(self) -> dict:
        return {
            "theta": self.theta, "a": self.a, "b": self.b, "R": self.R, "m": self.m, "M": self.M,
            "reduction_card": self.reduction_card, "card_bound": self.card_bound,
            "family_bound": self.family_bound, "holds": self.holds,
        }


def ball_extremes(alpha: float, R: float) -> tuple[float, float]:
    """``(m, M)`` with ``-m = min z`` and ``M = max rho`` over ``B(0, R)``.

    The sphere is parametrized by the latitude ``phi`` of the Euclidean sphere
    of radius ``alpha`` dilated by ``R``; both extremes are found by bounded
    1-D minimization and checked against the closed forms ``alpha R^2`` and
    ``alpha R``.
    """
    zmin = minimize_scalar(lambda t: R * R * alpha * math.sin(t), bounds=(-math.pi / 2, math.pi / 2),
                           method="bounded", options={"xatol": 1e-12})
    rmax = minimize_scalar(lambda t: -R * alpha * math.cos(t), bounds=(-math.pi / 2, math.pi / 2),
                           method="bounded", options={"xatol": 1e-12})
    m_opt, M_opt = -float(zmin.fun), -float(rmax.fun)
    m, M = alpha * R * R, alpha * R
    if abs(m_opt - m) > 1e-9 * m or abs(M_opt - M) > 1e-9 * M:
        raise RuntimeError(f"sphere optimization disagrees with closed form: {(m_opt, M_opt)} vs {(m, M)}")
    return m, M


def bound_report(f: BesicovitchFamily, theta: float, b: float, a: float) -> BoundReport:
    """Cardinality bound for a reduced family given certified ``(theta, a, b)``.

    ``R`` is the radius beyond which the wedge slab lies in ``P(a, b, theta)``
    and the cylinder lies in ``T(a, b)``.  The family is dilated so its
    smallest radius equals ``R``; the bound only depends on ``(theta, a, b)``.
    """
    if not isinstance(f.model, BallNorm):
        raise ValueError("the bound applies to the Euclidean-ball distance only")
    if f.witness != ORIGIN or np.any(f.centers[:, 2] > 0) or not _in_open_wedge(f.centers, theta).all():
        raise InvalidFamily("family is not reduced: needs witness 0, z <= 0 and centers in C(theta)")
    if not 0 < theta < math.pi / 4:
        raise ValueError("theta must lie in (0, pi/4)")
    alpha = f.model.alpha
    nm = f.model.norm_arr
    R = max(float(nm(np.array([a, a * math.tan(theta), b]))), float(nm(np.array([b, 0.0, -a])))) * (1 + 1e-12)
    m, M = ball_extremes(alpha, R)
    card_bound = math.log2(m / b) + math.log(b / M) / math.log(math.cos(2 * theta)) + 3
    family_bound = 2 * (math.pi / theta + 1) * card_bound + 2
    return BoundReport(theta, a, b, R, m, M, len(f), card_bound, family_bound)


# -- ingoing corners -------------------------------------------------------


def ingoing_sphere_points(m: DistanceModel, eps: Sequence[float], rho: float | None = None) -> np.ndarray:
    """Unit-sphere points ``q = (lam, lam eps, -h)`` whose inverses sit near the top of the sphere.

    Box: ``h = 1/4`` (the flat top) and ``lam = rho / sqrt(1 + eps^2)`` with
    ``rho`` the horizontal radius (default: the rim, 1).
    Gauge: ``h = sqrt(1 - rho^4) / (2 alpha)``, the height of the upper sphere
    over horizontal radius ``rho`` (default 0.5).
    """
    eps = np.asarray(eps, dtype=float)
    if isinstance(m, Box):
        rho = defaults.BOX_RIM_RHO if rho is None else rho
        if not 0 < rho <= 1:
            raise ValueError("box top has horizontal radius at most 1")
        h = np.full(len(eps), 0.25)
    elif isinstance(m, Gauge):
        rho = defaults.GAUGE_RHO if rho is None else rho
        if not 0 < rho < 1:
            raise ValueError("gauge construction needs 0 < rho < 1")
        h = np.full(len(eps), math.sqrt(1 - rho**4) / (2 * m.alpha))
    else:
        raise ValueError("ingoing construction is implemented for the box and gauge distances")
    lam = rho / np.sqrt(1 + eps * eps)
    return np.stack([lam, lam * eps, -h], axis=-1)


def default_eps(N: int, span: float = defaults.INGOING_ANGLE_SPAN) -> np.ndarray:
    """Strictly decreasing slopes ``tan(phi_n)`` with ``phi_n`` evenly spaced in ``[span, -span]``."""
    if N == 1:
        return np.array([0.0])
    return np.tan(np.linspace(span, -span, N))


def ingoing_corner_family(
    m: DistanceModel, N: int, eps: Sequence[float] | None = None, rho: float | None = None,
    delta_safe: float = defaults.DELTA_SAFE, max_halvings: int = defaults.INGOING_MAX_HALVINGS,
) -> BesicovitchFamily:
    """Besicovitch family of ``N`` balls for a distance whose unit sphere is flat at the poles.

    Points ``q_n`` on the unit sphere are chosen with strictly decreasing
    horizontal slopes ``eps_n``.  Radii are found by halving the ratio
    ``r_n / r_{n-1}`` from 1 until ``d(p_k, p_n) >= r_k + delta_safe * r_n``
    for all ``k < n``, where ``p_n = delta_{r_n}(q_n)``.  The witness is 0.
    """
    if N < 1:
        raise ValueError("N must be at least 1")
    eps = default_eps(N) if eps is None else np.asarray(eps, dtype=float)
    if len(eps) != N:
        raise ValueError("need one slope per ball")
    if np.any(np.diff(eps) >= 0):
        raise ValueError("slopes must be strictly decreasing")
    q = ingoing_sphere_points(m, eps, rho)
    unit = m.norm_arr(q)
    if np.any(np.abs(unit - 1) > 1e-9):
        raise ConstructionError("sphere", f"points off the unit sphere: {unit.tolist()}")
    centers = [q[0]]
    radii = [1.0]
    trace = []
    for n in range(1, N):
        ratio = 1.0
        for h in range(max_halvings + 1):
            rn = radii[-1] * ratio
            pn = dilate_arr(rn, q[n])
            rk = np.array(radii)
            d = distances(m, np.array(centers), pn)
            slack = d - (rk + delta_safe * rn)
            if np.all(slack >= 0):
                break
            ratio /= 2
        else:
            trace.append({"n": n, "halvings": max_halvings, "worst_slack": float(slack.min())})
            raise ConstructionError("line_search", f"no admissible radius for ball {n}", trace)
        trace.append({"n": n, "halvings": h, "worst_slack": float(slack.min())})
        centers.append(pn)
        radii.append(rn)
    return BesicovitchFamily(m, np.array(centers), np.array(radii), ORIGIN)


# -- outgoing corners ------------------------------------------------------


def cap_gap(m: KappaGauge, xp: float, xm: float) -> float:
    """``z(xp) - z(xm)`` on the upper xz-profile, computed without cancellation."""
    u, v = m.kappa * abs(xp), m.kappa * abs(xm)
    A, B = 1 - u, 1 - v
    gp = A**4 - xp**4
    gm = B**4 - xm**4
    diff = (v - u) * (A + B) * (A * A + B * B) - (xp * xp - xm * xm) * (xp * xp + xm * xm)
    return diff / (2 * m.alpha * (math.sqrt(gp) + math.sqrt(gm)))


def outgoing_corner_family(
    kappa: float = defaults.OUTGOING_KAPPA, alpha: float = defaults.OUTGOING_ALPHA, N: int = 5,
    a: float = defaults.OUTGOING_A, xbar: float = defaults.OUTGOING_XBAR, x0: float = 0.25,
    delta_safe: float = defaults.DELTA_SAFE, flatness_samples: int = defaults.FLATNESS_SAMPLES,
    plus=lambda n: 1.0 / n, minus=lambda n: -1.0 / (2 * n),
) -> BesicovitchFamily:
    """Besicovitch family of ``N`` balls for ``kappa rho + gauge``, whose unit sphere has an outgoing corner.

    Works in the xz-plane, where left translations by points of the plane act
    as Euclidean translations.  Pairs ``p_n^+ = (plus(n), 0, z)``,
    ``p_n^- = (minus(n), 0, z)`` on the upper sphere drive the recursion
    ``r_{k+1} = x_k / (x_n^+ - x_n^-)``, ``q_{k+1} = delta_{r_{k+1}}(p_n^-)^{-1}``
    with ``n`` the smallest index meeting the three growth conditions with
    relative margin ``delta_safe``.  Each step also checks the slope condition
    ``z_n^+ - z_n^- < -a (x_n^+ - x_n^-)``, flatness of the sphere over
    ``[x_n^+, xbar]`` and, finally, that the new ball excludes all earlier
    centers in floating point.  The first failing condition is raised.
    """
    m = KappaGauge(kappa, alpha)
    if not m.is_metric:
        raise ValueError("needs alpha <= 2 so that the distance is a metric")
    if N < 1:
        raise ValueError("N must be at least 1")
    q0 = np.array([x0, 0.0, -float(m.xz_profile(x0))])
    if not q0[2] < 0:
        raise ValueError("x0 must lie strictly inside the cap")
    r0 = float(m.norm_arr(q0))
    xs, zs, rs = [x0], [float(q0[2])], [r0]
    trace: list = []
    # smallest usable index: x_n^+ inside (0, xbar] and the profile defined at x_n^-
    n_floor = 2
    while not (0 < plus(n_floor) <= xbar and math.isfinite(float(m.xz_profile(minus(n_floor))))):
        n_floor += 1
    for k in range(N - 1):
        xk, zk, rk = xs[-1], zs[-1], rs[-1]
        s = 1 + delta_safe
        lower = max(
            n_floor,
            # condition on r_k, growth of |z_k| and reach of xbar, each as a lower bound on n
            math.ceil(1.5 * rk / xk * s),
            math.ceil(1.5 * abs(zk) / (a * xk * xk) * s),
            math.ceil(1.5 * x0 / (xk * xbar) * s),
        )
        n = lower
        for _ in range(64):
            xp, xm = plus(n), minus(n)
            D = xp - xm
            ok1 = rk * s < xk / D
            ok2 = -a < D * zk / (xk * xk) * s and zk < 0
            ok3 = x0 * s <= xk * xbar / D
            if ok1 and ok2 and ok3:
                break
            n += max(1, n // 1_000_000)
        else:
            raise ConstructionError("growth", f"no index meets the growth conditions at step {k + 1}", trace)
        gap = cap_gap(m, xp, xm)
        step = {"k": k + 1, "n": n, "x_plus": xp, "x_minus": xm, "gap": gap}
        trace.append(step)
        if not gap <= -a * D * s:
            raise ConstructionError(
                "slope",
                f"z_n^+ - z_n^- = {gap!r} not below -a (x_n^+ - x_n^-) = {-a * D!r} at step {k + 1} "
                f"(n = {n}); the family stops at {len(xs)} balls",
                trace,
            )
        zplus = float(m.xz_profile(xp))
        grid = np.linspace(xp, xbar, flatness_samples)
        nrm = m.norm_arr(np.stack([grid, np.zeros_like(grid), np.full_like(grid, zplus)], axis=-1))
        if np.any(nrm < 1 - 1e-12):
            raise ConstructionError("flatness", f"sphere rises above z_n^+ on [x_n^+, xbar] at step {k + 1}", trace)
        R = xk / D
        zm = float(m.xz_profile(xm))
        qn = np.array([-R * xm, 0.0, -R * R * zm])
        if not (qn[2] < zk < 0 < qn[0] < xk and R > rk):
            raise ConstructionError("monotonicity", f"ordering of the new center failed at step {k + 1}", trace)
        prev = np.stack([np.array(xs), np.zeros(len(xs)), np.array(zs)], axis=-1)
        # exclusion of earlier centers from the new (largest) ball, in floating point
        excl = distances(m, prev, qn) - R
        step["exclusion"] = float(excl.min())
        if not np.all(excl > 0):
            raise ConstructionError(
                "precision",
                f"binary64 cannot separate ball {k + 1} from earlier centers (margin {float(excl.min())!r}); "
                f"the family stops at {len(xs)} balls",
                trace,
            )
        xs.append(float(qn[0]))
        zs.append(float(qn[2]))
        rs.append(R)
    centers = np.stack([np.array(xs), np.zeros(len(xs)), np.array(zs)], axis=-1)
    return BesicovitchFamily(m, centers, m.norm_arr(centers), ORIGIN)


def slope_ratio(m: KappaGauge, n: int, plus=lambda n: 1.0 / n, minus=lambda n: -1.0 / (2 * n)) -> float:
    """``(z_n^+ - z_n^-) / (x_n^+ - x_n^-)``; tends to ``-kappa/6`` for the default schedule."""
    xp, xm = plus(n), minus(n)
    return cap_gap(m, xp, xm) / (xp - xm)


# -- randomized search -----------------------------------------------------


@dataclass(frozen=True)
class SearchResult:
    family: BesicovitchFamily
    proposals: int
    accepted: int
    swaps: int
    restarts: int
    seed: int

    @property
    def cardinality(self) -> int:
        return len(self.family)

    def to_json(self) -> dict:
        return {
            "cardinality": self.cardinality,
            "proposals": self.proposals,
            "accepted": self.accepted,
            "swaps": self.swaps,
            "restarts": self.restarts,
            "seed": self.seed,
            "family": self.family.to_json(),
        }


def _unit_directions(m: DistanceModel, rng: np.random.Generator, n: int) -> np.ndarray:
    g = rng.standard_normal((n, 3))
    return dilate_arr(1.0 / m.norm_arr(g), g)


def search_max_family(
    m: DistanceModel, scale: float = defaults.SCALE, budget: int = defaults.BUDGET,
    seed: int = defaults.SEED, restarts: int = 8, swap_prob: float = 0.05, rel_margin: float = 1e-9,
    batch: int = 512,
) -> SearchResult:
    """Randomized greedy search for a large Besicovitch family with witness 0.

    Each proposal is a center at distance ``t`` in ``[scale/2, scale]`` from 0
    (a random direction pushed onto the unit sphere, then dilated), with
    radius ``t`` so that 0 lies on its sphere.  A proposal compatible with
    every ball (relative exclusion margin above ``rel_margin``) is added; one
    that conflicts with a single ball replaces it with probability
    ``swap_prob``.  The budget of proposals is split over ``restarts`` runs and
    the largest family is returned after re-verification.
    """
    if budget < 1:
        raise ValueError("budget must be at least 1")
    if not scale > 0:
        raise ValueError("scale must be positive")
    rng = np.random.default_rng(seed)
    restarts = max(1, min(restarts, budget))
    per = [budget // restarts + (1 if i < budget % restarts else 0) for i in range(restarts)]
    best_c = best_r = None
    accepted = swaps = 0
    for quota in per:
        C = np.empty((0, 3))
        Rr = np.empty(0)
        left = quota
        while left > 0:
            nb = min(batch, left)
            left -= nb
            props = dilate_arr(rng.uniform(scale / 2, scale, nb), _unit_directions(m, rng, nb))
            pr = m.norm_arr(-props)
            coin = rng.uniform(0, 1, nb)
            i = 0
            while i < nb:
                rest = props[i:]
                if len(C):
                    d = distances(m, rest[:, None, :], C[None, :, :])
                    big = np.maximum(pr[i:, None], Rr[None, :])
                    small = np.minimum(pr[i:, None], Rr[None, :])
                    conflict = (d - big) <= rel_margin * small
                    nconf = conflict.sum(axis=1)
                else:
                    nconf = np.zeros(len(rest), dtype=int)
                ev = np.flatnonzero((nconf == 0) | ((nconf == 1) & (coin[i:] < swap_prob)))
                if len(ev) == 0:
                    break
                j = i + int(ev[0])
                if nconf[ev[0]] == 0:
                    C = np.vstack([C, props[j]])
                    Rr = np.append(Rr, pr[j])
                    accepted += 1
                else:
                    c = int(np.flatnonzero(conflict[ev[0]])[0])
                    C[c] = props[j]
                    Rr[c] = pr[j]
                    swaps += 1
                i = j + 1
            if best_c is None or len(C) > len(best_c):
                best_c, best_r = C.copy(), Rr.copy()
    fam = BesicovitchFamily(m, best_c, best_r, ORIGIN)
    rep = verify_family(fam)
    if not rep.valid:
        raise RuntimeError(f"search produced an invalid family: {rep.reason}")
    return SearchResult(fam, budget, accepted, swaps, restarts, seed)
