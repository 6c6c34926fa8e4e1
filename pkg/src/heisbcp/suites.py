"""Sampled checks of the distance models, packaged as :class:`~heisbcp.regions.Report` objects.

These drive ``heisbcp verify`` alongside the region checks.
"""

from __future__ import annotations

import math

import numpy as np

from . import defaults
from .chain import ChainSpace, check_equivalence, check_isolated, check_metric
from .group import dilate_arr, multiply_arr
from .metrics import (
    BallNorm,
    DistanceModel,
    a_poly_arr,
    ball_slack_arr,
    distances,
    distances_by_bisection,
    r_of,
)
from .regions import Report

METRIC_TRIANGLE_TOL = 1e-12
METRIC_ISOMETRY_TOL = 1e-9
CLOSED_FORM_TOL = 1e-9


def _batches(total: int, size: int):
    done = 0
    while done < total:
        k = min(size, total - done)
        yield k
        done += k


def check_metric_axioms(
    m: DistanceModel, samples: int = 1_000_000, seed: int = defaults.SEED, box: float = 10.0,
    batch: int = 250_000,
) -> Report:
    """Triangle inequality, symmetry, left invariance and homogeneity on random triples in ``[-box, box]^3``.

    The triangle excess ``d(p,r) - d(p,q) - d(q,r)`` is measured relative to
    ``d(p,q) + d(q,r)`` and must stay below 1e-12.  The other three identities
    are compared with relative error 1e-9; translations are drawn from the
    same box and dilation factors are log-uniform in ``[1e-3, 1e3]``.
    ``worst_slack`` is the smallest of the four ``tolerance - error`` values.
    """
    rng = np.random.default_rng(seed)
    worst = {"triangle": -math.inf, "symmetry": 0.0, "left_invariance": 0.0, "homogeneity": 0.0}
    where = {}
    tiny = np.finfo(float).tiny
    for k in _batches(samples, batch):
        p, q, r, g = (rng.uniform(-box, box, (k, 3)) for _ in range(4))
        lam = np.exp(rng.uniform(math.log(1e-3), math.log(1e3), k))
        dpq, dqr, dpr = distances(m, p, q), distances(m, q, r), distances(m, p, r)
        errs = {
            "triangle": (dpr - dpq - dqr) / np.maximum(dpq + dqr, tiny),
            "symmetry": np.abs(distances(m, q, p) - dpq) / np.maximum(dpq, tiny),
            "left_invariance": np.abs(distances(m, multiply_arr(g, p), multiply_arr(g, q)) - dpq)
            / np.maximum(dpq, tiny),
            "homogeneity": np.abs(distances(m, dilate_arr(lam, p), dilate_arr(lam, q)) - lam * dpq)
            / np.maximum(lam * dpq, tiny),
        }
        for name, e in errs.items():
            i = int(np.argmax(e))
            if e[i] > worst[name]:
                worst[name] = float(e[i])
                where[name] = [p[i].tolist(), q[i].tolist(), r[i].tolist()]
    tols = {"triangle": METRIC_TRIANGLE_TOL, "symmetry": METRIC_ISOMETRY_TOL,
            "left_invariance": METRIC_ISOMETRY_TOL, "homogeneity": METRIC_ISOMETRY_TOL}
    slack = {k: tols[k] - worst[k] for k in worst}
    key = min(slack, key=slack.get)
    return Report(
        "metric_axioms", m.to_json(), samples, seed, all(v >= 0 for v in slack.values()),
        slack[key], where.get(key), {"worst_relative_error": worst, "binding": key},
    )


def check_closed_form(
    alpha: float = 2.0, samples: int = defaults.SAMPLES, seed: int = defaults.SEED, box: float = 10.0,
    tol: float = defaults.TOL,
) -> Report:
    """Closed-form ``d_alpha`` against the bisection infimum over dilation scales.

    Passes iff the absolute difference stays within 1e-9 on every random pair
    and at the anchor ``d(0, (0, 0, 1)) = 1/sqrt(2)`` (for ``alpha = 2``; the
    general anchor is ``1/sqrt(alpha)``).
    """
    m = BallNorm(alpha)
    rng = np.random.default_rng(seed)
    p = rng.uniform(-box, box, (samples, 3))
    q = rng.uniform(-box, box, (samples, 3))
    err = np.abs(distances(m, p, q) - distances_by_bisection(m, p, q, tol))
    anchor = float(distances_by_bisection(m, np.zeros(3), np.array([0.0, 0.0, 1.0]), tol))
    anchor_err = abs(anchor - 1 / math.sqrt(alpha))
    i = int(np.argmax(err))
    worst = CLOSED_FORM_TOL - max(float(err[i]), anchor_err)
    return Report(
        "closed_form", {"alpha": alpha, "tol": tol}, samples, seed, worst >= 0, worst,
        [p[i].tolist(), q[i].tolist()],
        {"max_abs_error": float(err[i]), "anchor": anchor, "anchor_error": anchor_err},
    )


def check_a_poly(
    alpha: float = 2.0, samples: int = defaults.PAIR_SAMPLES, seed: int = defaults.SEED, box: float = 10.0,
    band: float = defaults.BOUNDARY_BAND,
) -> Report:
    """Sign of ``A_p(q)`` against membership of ``q`` in ``B(p, r_p)``.

    Half the pairs draw ``q`` uniformly from the box; the other half draw
    ``q = p delta_{r_p}(u)`` with ``u`` uniform in the Euclidean ball of
    radius ``1.2 alpha``, so both outcomes are well represented.  Pairs with
    ``|A_p(q)| < band`` count as boundary and are excluded.
    """
    rng = np.random.default_rng(seed)
    p = rng.uniform(-box, box, (samples, 3))
    half = samples // 2
    q = rng.uniform(-box, box, (samples, 3))
    u = rng.standard_normal((samples - half, 3))
    u *= (1.2 * alpha * rng.uniform(0, 1, samples - half) ** (1 / 3) / np.linalg.norm(u, axis=1))[:, None]
    rp = r_of(alpha, p)
    q[half:] = multiply_arr(p[half:], dilate_arr(rp[half:], u))
    A = a_poly_arr(alpha, p, q)
    inside = ball_slack_arr(BallNorm(alpha), p, rp, q) >= 0
    decided = np.abs(A) >= band
    bad = decided & ((A <= 0) != inside)
    nbad = int(np.count_nonzero(bad))
    wit = [p[int(np.argmax(bad))].tolist(), q[int(np.argmax(bad))].tolist()] if nbad else None
    return Report(
        "a_poly", {"alpha": alpha, "band": band}, samples, seed, nbad == 0, float(-nbad), wit,
        {"violations": nbad, "boundary": int(samples - np.count_nonzero(decided)),
         "inside": int(np.count_nonzero(inside))},
    )


def check_chain_line(
    xn: str = "1/n", N: int = defaults.CHAIN_N, c: float = defaults.CHAIN_C,
) -> Report:
    """The three chain-metric properties on the real-line instance, plus ``dbar(x_n0, xbar)``.

    The last value is compared with ``rho_{n0} = n0/(n0+1) x_{n0}`` to 1e-15,
    since the direct edge is the shortest chain on the line.
    """
    s = ChainSpace.from_line(xn, N, c)
    dbar = s.dbar()
    equiv = check_equivalence(s, dbar)
    err = check_metric(dbar)
    checked, bad = check_isolated(s, dbar)
    first = float(dbar[s.index_of(s.n0), 0]) if len(s.seq) >= s.n0 else math.nan
    expect = float(s.rho[s.n0 - 1]) if len(s.seq) >= s.n0 else math.nan
    gap = abs(first - expect)
    ok = equiv and err is None and bad == 0 and gap <= 1e-15
    return Report(
        "chain", {"xn": xn, "N": N, "c": c}, s.size, None, ok, 1e-15 - gap, None,
        {"n0": s.n0, "equivalence": equiv, "metric_error": err, "isolated_checked": checked,
         "isolated_violations": bad, "dbar_first": first, "rho_first": expect, "dropped": list(s.dropped)},
    )
