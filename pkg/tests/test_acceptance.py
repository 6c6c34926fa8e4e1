"""Acceptance criteria, one test each, at the stated tolerances.

Every test records one ``criterion N: PASS|FAIL`` line; the lines are printed
again in the terminal summary (see conftest.py).
"""

import json
import math
import time

import numpy as np
import pytest

from families import random_families
from heisbcp import defaults
from heisbcp.chain import ChainSpace, build_chain_counterexample, verify_chain_family
from heisbcp.cli import main
from heisbcp.covering import (
    ConstructionError,
    ingoing_corner_family,
    outgoing_corner_family,
    reduce_family,
    search_max_family,
    verify_family,
)
from heisbcp.metrics import BallNorm, Box, Gauge, distance
from heisbcp.group import ORIGIN, Point
from heisbcp.regions import check_sev1
from heisbcp.suites import check_a_poly, check_chain_line, check_closed_form, check_metric_axioms

RESULTS = {}


def record(n, ok, detail):
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS[n] = line
    print(line)
    assert ok, line


def test_criterion_1_metric_axioms():
    start = time.perf_counter()
    models = [BallNorm(0.5), BallNorm(1), BallNorm(2), Gauge(1), Gauge(2)]
    reps = [check_metric_axioms(m, 1_000_000) for m in models]
    elapsed = time.perf_counter() - start
    ok = all(r.passed for r in reps) and elapsed < 60
    tri = max(r.details["worst_relative_error"]["triangle"] for r in reps)
    iso = max(max(v for k, v in r.details["worst_relative_error"].items() if k != "triangle") for r in reps)
    record(1, ok, f"5 models x 10^6 triples, triangle excess {tri:.3g}, isometry error {iso:.3g}, {elapsed:.1f} s")


def test_criterion_2_closed_form():
    rep = check_closed_form(2.0, 10_000)
    anchor = distance(BallNorm(2), ORIGIN, Point(0, 0, 1))
    ok = rep.passed and abs(anchor - 1 / math.sqrt(2)) <= 1e-9
    record(2, ok, f"max |closed form - bisection| {rep.details['max_abs_error']:.3g}, anchor {anchor!r}")


def test_criterion_3_a_poly():
    rep = check_a_poly(2.0, 100_000, band=1e-9)
    ok = rep.passed and rep.details["violations"] == 0
    record(3, ok, f"10^5 pairs, {rep.details['violations']} disagreements outside the band")


def test_criterion_4_sev1():
    rep = check_sev1(2.0, samples=10_000)
    ok = rep.passed and rep.worst_slack >= -1e-9
    record(4, ok, f"theta {rep.params['theta']:.6f}, worst slack {rep.worst_slack:.3g}")


def _attempt(build, verify):
    try:
        rep = verify(build())
    except (ConstructionError, ValueError) as exc:
        return False, f"{type(exc).__name__}: {exc}"
    return rep.valid and rep.exclusion_margin > 0, f"N={rep.cardinality} margin {rep.exclusion_margin:.3g}"


def test_criterion_5_generators():
    start = time.perf_counter()
    parts = {
        "box20": _attempt(lambda: ingoing_corner_family(Box(), 20), verify_family),
        "gauge10": _attempt(lambda: ingoing_corner_family(Gauge(2), 10), verify_family),
        "outgoing20": _attempt(lambda: outgoing_corner_family(kappa=1.0, alpha=2.0, N=20), verify_family),
        "chain10": _attempt(
            lambda: build_chain_counterexample(ChainSpace.from_line("1/n", 40, 0.9), 10), verify_chain_family
        ),
    }
    elapsed = time.perf_counter() - start
    ok = all(p[0] for p in parts.values()) and elapsed < 30
    detail = "; ".join(f"{k} {'ok' if v[0] else 'failed'} ({v[1]})" for k, v in parts.items())
    record(5, ok, f"{detail}; {elapsed:.1f} s")


def test_criterion_6_scale_plateau():
    cards = [search_max_family(BallNorm(2), scale=s, budget=100_000).cardinality for s in (1.0, 1e-2, 1e-4)]
    box = ingoing_corner_family(Box(), 20)
    rep = verify_family(box)
    ok = len(set(cards)) == 1 and rep.valid and rep.cardinality > cards[0]
    record(6, ok, f"BallNorm(2) cardinalities {cards}, Box generator {rep.cardinality}")


def test_criterion_7_chain_line():
    s = ChainSpace.from_line("1/n", 40, 0.9)
    d = s.dbar()
    rep = check_chain_line("1/n", 40, 0.9)
    exact = bool(np.all(0.9 * s.base_d <= d) and np.all(d <= s.base_d))
    gap = abs(d[s.index_of(10), 0] - 1 / 11)
    ok = rep.passed and exact and s.n0 == 10 and gap <= 1e-15
    record(7, ok, f"n0={s.n0}, c*d <= dbar <= d {exact}, |dbar(x_10, xbar) - 1/11| = {gap:.3g}")


def test_criterion_8_reduction():
    theta = math.pi / 8
    bad = []
    for i, f in enumerate(random_families(100, seed=defaults.SEED)):
        red = reduce_family(f, theta)
        g = red.family
        if g is None:
            good = red.output_card == 0 and red.holds
        else:
            c = g.centers
            good = (
                verify_family(g).valid and red.holds
                and bool(np.all(c[:, 2] <= 0))
                and bool(np.all(np.abs(c[:, 1]) < c[:, 0] * math.tan(theta)))
            )
        if not good:
            bad.append(i)
    record(8, not bad, f"100 random families, failures at {bad}")


CLI_RUNS = [
    ["verify", "metric_axioms", "--samples", "20000"],
    ["verify", "closed_form"],
    ["verify", "a_poly"],
    ["verify", "sev1"],
    ["verify", "chain"],
    ["generate", "box-ingoing", "--n", "20"],
    ["generate", "gauge-ingoing", "--n", "10"],
    ["generate", "outgoing", "--n", "4"],
    ["search", "--budget", "20000", "--scale", "0.0001"],
    ["sphere-section", "--model", "ball_norm"],
]


def test_criterion_9_determinism(capsys, tmp_path):
    differ = []
    for argv in CLI_RUNS:
        outs = []
        for _ in range(2):
            main(list(argv))
            outs.append(capsys.readouterr().out)
        if outs[0] != outs[1] or not outs[0]:
            differ.append(" ".join(argv))
    fam = tmp_path / "fam.json"
    main(["generate", "box-ingoing", "--n", "20", "--out", str(fam)])
    reduced = []
    for _ in range(2):
        main(["reduce", str(fam)])
        reduced.append(capsys.readouterr().out)
    if reduced[0] != reduced[1] or not json.loads(reduced[0]):
        differ.append("reduce")
    record(9, not differ, f"{len(CLI_RUNS) + 1} commands rerun, differing: {differ}")
