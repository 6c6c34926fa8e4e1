"""``heisbcp`` command-line entry point.

Every subcommand writes JSON or CSV to ``--out`` (default: standard output)
and exits 0 iff its checks pass.  Malformed input exits 2 with a diagnostic on
standard error; a construction that cannot be completed exits 1.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
from pathlib import Path

from . import defaults
from .chain import (
    ChainSpace,
    DepthError,
    MetricError,
    build_chain_counterexample,
    check_chain_space,
    space_from_json,
    verify_chain_family,
)
from .covering import (
    BesicovitchFamily,
    ConstructionError,
    InvalidFamily,
    bound_report,
    ingoing_corner_family,
    outgoing_corner_family,
    reduce_family,
    search_max_family,
    verify_family,
)
from .metrics import BallNorm, Box, Gauge, KappaGauge, RhoPseudo, derived_constants, sphere_section
from .regions import (
    SweepExhausted,
    check_comparison,
    check_pp,
    check_prop1,
    check_prop2,
    check_prop4,
    check_sev1,
    check_tt,
    check_x_axis,
    check_x_axis_pairs,
    check_z_axis,
    check_z_axis_pairs,
    threshold_search,
)
from .serialize import csv_rows, dumps, family_from_json
from .suites import check_a_poly, check_chain_line, check_closed_form, check_metric_axioms

MODELS = ("ball_norm", "gauge", "box", "kappa_gauge", "rho")

# certified values at alpha = 2 (see the threshold sweeps); used when a flag is omitted
CERTIFIED = {
    "x_axis": {"theta": math.pi / 16, "a": 4.0, "b": 1.0},
    "z_axis": {"a": 2.0, "b": 0.5},
    "comparison": {"theta": math.pi / 16},
    "pp": {"theta": math.pi / 8, "a": 4.0, "b": 0.5},
    "tt": {"a": 2.0, "b": 0.5},
    "prop": {"theta": math.pi / 8},
    "bound": {"theta": math.pi / 16, "a": 4.0, "b": 0.5},
}

LEMMAS = (
    "metric_axioms", "closed_form", "a_poly", "sev1", "x_axis", "z_axis", "comparison", "pp", "tt",
    "prop1", "prop2", "prop4", "x_axis_pairs", "z_axis_pairs", "thresholds", "chain",
)


class UsageError(Exception):
    """Bad input: reported on stderr with exit code 2."""


def _defaults_epilog() -> str:
    width = max(len(k) for k in defaults.TABLE)
    rows = [f"  {k.ljust(width)}  {v!r}" for k, v in defaults.TABLE.items()]
    return "numeric defaults:\n" + "\n".join(rows)


def _model(args) -> object:
    alpha = 2.0 if args.alpha is None else args.alpha
    kappa = 1.0 if args.kappa is None else args.kappa
    try:
        return {
            "ball_norm": lambda: BallNorm(alpha),
            "gauge": lambda: Gauge(alpha),
            "box": Box,
            "kappa_gauge": lambda: KappaGauge(kappa, alpha),
            "rho": RhoPseudo,
        }[args.model]()
    except ValueError as e:
        raise UsageError(str(e)) from None


def _emit(args, text: str) -> None:
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _read_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None
    except json.JSONDecodeError as e:
        raise UsageError(f"{path} is not valid JSON: {e}") from None


def _load_family(path: str):
    obj = _read_json(path)
    try:
        return family_from_json(obj)
    except (KeyError, TypeError, ValueError) as e:
        raise UsageError(f"{path} is not a valid family: {e}") from None


def _check_family(f, margin: float = 0.0):
    if isinstance(f, BesicovitchFamily):
        return verify_family(f, margin)
    return verify_chain_family(f, margin)


# -- subcommands -----------------------------------------------------------


def cmd_sphere_section(args) -> int:
    m = _model(args)
    try:
        s = sphere_section(m, args.plane, args.resolution, args.tol)
    except ValueError as e:
        raise UsageError(str(e)) from None
    col = "x" if args.plane == "xz" else "y"

    def cell(v):
        return None if math.isnan(v) else float(v)

    rows = [
        (float(u), cell(zp), cell(zm)) if not (math.isnan(zp) or math.isnan(zm)) else (float(u), None, None)
        for u, zp, zm in zip(s.coord, s.z_plus, s.z_minus)
    ]
    _emit(args, csv_rows([col, "z_plus", "z_minus"], rows))
    return 0 if all(r[1] is not None for r in rows) else 1


def _verify_one(lemma: str, args) -> list:
    alpha = 2.0 if args.alpha is None else args.alpha
    seed = args.seed

    def n(default):
        return default if args.samples is None else args.samples

    def pick(group, key):
        v = getattr(args, key)
        return CERTIFIED[group][key] if v is None else v

    if lemma == "metric_axioms":
        return [check_metric_axioms(BallNorm(alpha), n(defaults.PAIR_SAMPLES), seed),
                check_metric_axioms(Gauge(alpha), n(defaults.PAIR_SAMPLES), seed)]
    if lemma == "closed_form":
        return [check_closed_form(alpha, n(defaults.SAMPLES), seed, tol=args.tol)]
    if lemma == "a_poly":
        return [check_a_poly(alpha, n(defaults.PAIR_SAMPLES), seed)]
    if lemma == "sev1":
        return [check_sev1(alpha, args.theta, n(defaults.SAMPLES), seed)]
    if lemma == "x_axis":
        return [check_x_axis(alpha, pick("x_axis", "theta"), pick("x_axis", "a"), pick("x_axis", "b"),
                             n(defaults.SAMPLES), seed)]
    if lemma == "z_axis":
        return [check_z_axis(alpha, pick("z_axis", "a"), pick("z_axis", "b"), n(defaults.SAMPLES), seed)]
    if lemma == "comparison":
        return [check_comparison(alpha, pick("comparison", "theta"), n(defaults.SAMPLES), seed)]
    if lemma == "pp":
        return [check_pp(alpha, pick("pp", "theta"), pick("pp", "a"), pick("pp", "b"), n(defaults.SAMPLES), seed)]
    if lemma == "tt":
        return [check_tt(alpha, pick("tt", "a"), pick("tt", "b"), n(defaults.SAMPLES), seed)]
    if lemma in ("prop1", "prop2", "prop4"):
        fn = {"prop1": check_prop1, "prop2": check_prop2, "prop4": check_prop4}[lemma]
        return [fn(pick("prop", "theta"), n(defaults.SAMPLES), seed)]
    if lemma == "x_axis_pairs":
        return [check_x_axis_pairs(alpha, pick("x_axis", "theta"), pick("x_axis", "a"), pick("x_axis", "b"),
                                   n(defaults.PAIR_SAMPLES), seed)]
    if lemma == "z_axis_pairs":
        return [check_z_axis_pairs(alpha, pick("z_axis", "a"), pick("z_axis", "b"), n(defaults.PAIR_SAMPLES), seed)]
    if lemma == "thresholds":
        out = []
        for which in ("x_axis", "z_axis", "comparison"):
            try:
                t = threshold_search(alpha, which, n(defaults.SAMPLES), seed)
                out.append({**t.to_json(), "lemma": f"thresholds:{which}", "pass": True})
            except SweepExhausted as e:
                out.append({"lemma": f"thresholds:{which}", "pass": False, "reason": str(e), "trace": e.trace})
        return out
    if lemma == "chain":
        return [check_chain_line()]
    raise UsageError(f"unknown lemma {lemma!r}")


def cmd_verify(args) -> int:
    lemmas = LEMMAS if args.lemma == "all" else (args.lemma,)
    reports = []
    try:
        for lemma in lemmas:
            reports += [r if isinstance(r, dict) else r.to_json() for r in _verify_one(lemma, args)]
    except ValueError as e:
        raise UsageError(str(e)) from None
    ok = all(r["pass"] for r in reports)
    alpha = 2.0 if args.alpha is None else args.alpha
    _emit(args, dumps({"alpha": alpha, "seed": args.seed,
                       "constants": dataclasses.asdict(derived_constants(alpha)),
                       "reports": reports, "pass": ok}))
    return 0 if ok else 1


def cmd_generate(args) -> int:
    alpha = 2.0 if args.alpha is None else args.alpha
    try:
        if args.generator == "box-ingoing":
            f = ingoing_corner_family(Box(), args.n or 20)
        elif args.generator == "gauge-ingoing":
            f = ingoing_corner_family(Gauge(alpha), args.n or 10)
        elif args.generator == "outgoing":
            kappa = defaults.OUTGOING_KAPPA if args.kappa is None else args.kappa
            f = outgoing_corner_family(kappa, alpha, args.n or 4)
        else:
            if args.input:
                s = space_from_json(_read_json(args.input))
            else:
                s = ChainSpace.from_line(args.xn, args.points, args.c)
            f = build_chain_counterexample(s, args.n or 1)
    except (ConstructionError, DepthError) as e:
        print(f"heisbcp: construction failed: {e}", file=sys.stderr)
        return 1
    except (ValueError, KeyError, TypeError) as e:
        raise UsageError(str(e)) from None
    _emit(args, dumps(f.to_json()))
    return 0 if _check_family(f).valid else 1


def cmd_search(args) -> int:
    try:
        res = search_max_family(_model(args), args.scale, args.budget, args.seed)
    except ValueError as e:
        raise UsageError(str(e)) from None
    _emit(args, dumps(res.to_json()))
    return 0


def cmd_check_family(args) -> int:
    f = _load_family(args.path)
    if args.margin < 0:
        raise UsageError("margin must be nonnegative")
    rep = _check_family(f, args.margin)
    _emit(args, dumps(rep.to_json()))
    return 0 if rep.valid else 1


def cmd_reduce(args) -> int:
    f = _load_family(args.path)
    if not isinstance(f, BesicovitchFamily):
        raise UsageError("reduction applies to families in the Heisenberg group")
    try:
        red = reduce_family(f, args.theta)
    except InvalidFamily as e:
        print(f"heisbcp: {e}", file=sys.stderr)
        return 1
    except ValueError as e:
        raise UsageError(str(e)) from None
    out = {"reduction": red.to_json()}
    ok = red.holds
    if red.family is not None and isinstance(f.model, BallNorm) and args.theta < math.pi / 4:
        b = bound_report(red.family, args.theta, args.b, args.a)
        out["bound"] = b.to_json()
        ok = ok and b.holds
    _emit(args, dumps(out))
    return 0 if ok else 1


def cmd_chain(args) -> int:
    try:
        s = space_from_json(_read_json(args.input))
    except (MetricError, KeyError, TypeError, ValueError) as e:
        raise UsageError(f"{args.input}: {e}") from None
    dbar = s.dbar()
    rows = [[i] + [float(v) for v in row] for i, row in enumerate(dbar)]
    _emit(args, csv_rows(["point"] + [str(j) for j in range(s.size)], rows))
    checks = check_chain_space(s)
    if args.report:
        Path(args.report).write_text(dumps({"n0": s.n0, "sequence": list(s.seq), "dropped": list(s.dropped),
                                            **checks.to_json()}))
    return 0 if checks.passed else 1


def cmd_defaults(args) -> int:
    _emit(args, dumps(defaults.TABLE))
    return 0


# -- parser ----------------------------------------------------------------


def _seed(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--alpha", type=float, help="alpha of the ball/gauge models (default 2)")
    common.add_argument("--kappa", type=float, help="kappa of the kappa-gauge model (default 1)")
    common.add_argument("--seed", type=_seed, default=defaults.SEED, help="RNG seed (default 0xB5C0)")
    common.add_argument("--samples", type=int, help="sample count (default depends on the check)")
    common.add_argument("--tol", type=float, default=defaults.TOL, help="bisection tolerance (default 1e-12)")
    common.add_argument("--out", help="output file (default stdout)")

    p = argparse.ArgumentParser(
        prog="heisbcp",
        description="Heisenberg-group distances, covering-lemma checks and Besicovitch families.",
        epilog=_defaults_epilog(),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("sphere-section", parents=[common], help="CSV of the unit sphere cut by a vertical plane")
    s.add_argument("--model", choices=MODELS, default="kappa_gauge")
    s.add_argument("--plane", choices=("xz", "yz"), default="xz")
    s.add_argument("--resolution", type=int, default=defaults.SPHERE_RESOLUTION)
    s.set_defaults(func=cmd_sphere_section)

    s = sub.add_parser("verify", parents=[common], help="run one check or all of them")
    s.add_argument("lemma", choices=LEMMAS + ("all",))
    s.add_argument("--theta", type=float, help="aperture angle (default depends on the check)")
    s.add_argument("--a", type=float, help="region parameter a (default depends on the check)")
    s.add_argument("--b", type=float, help="region parameter b (default depends on the check)")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("generate", parents=[common], help="construct a Besicovitch family")
    s.add_argument("generator", choices=("box-ingoing", "gauge-ingoing", "outgoing", "chain"))
    s.add_argument("--n", type=int, help="family size (defaults: box 20, gauge 10, outgoing 4, chain 1)")
    s.add_argument("--input", help="chain input JSON (otherwise the real-line instance)")
    s.add_argument("--xn", choices=("1/n", "2^-n", "1/n^2"), default="1/n", help="real-line sequence")
    s.add_argument("--points", type=int, default=defaults.CHAIN_N, help="real-line sequence length")
    s.add_argument("--c", type=float, default=defaults.CHAIN_C, help="chain contraction constant")
    s.set_defaults(func=cmd_generate)

    s = sub.add_parser("search", parents=[common], help="randomized search for a large family")
    s.add_argument("--model", choices=MODELS, default="ball_norm")
    s.add_argument("--scale", type=float, default=defaults.SCALE)
    s.add_argument("--budget", type=int, default=defaults.BUDGET)
    s.set_defaults(func=cmd_search)

    s = sub.add_parser("check-family", parents=[common], help="verify a family JSON file")
    s.add_argument("path")
    s.add_argument("--margin", type=float, default=0.0, help="required exclusion margin (default 0)")
    s.set_defaults(func=cmd_check_family)

    s = sub.add_parser("reduce", parents=[common], help="reduce a family into a cone and bound its size")
    s.add_argument("path")
    s.add_argument("--theta", type=float, default=math.pi / 8, help="half-aperture (default pi/8)")
    s.add_argument("--a", type=float, default=CERTIFIED["bound"]["a"], help="certified a (default 4)")
    s.add_argument("--b", type=float, default=CERTIFIED["bound"]["b"], help="certified b (default 0.5)")
    s.set_defaults(func=cmd_reduce)

    s = sub.add_parser("chain", parents=[common], help="chain-metric matrix as CSV")
    s.add_argument("input")
    s.add_argument("--report", help="also write the property checks as JSON")
    s.set_defaults(func=cmd_chain)

    s = sub.add_parser("defaults", parents=[common], help="print the defaults table as JSON")
    s.set_defaults(func=cmd_defaults)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as e:
        print(f"heisbcp: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
