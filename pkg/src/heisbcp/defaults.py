"""Every numeric default used by the library and the CLI, in one place."""

from __future__ import annotations

import math

SEED = 0xB5C0

# strict inequalities "x > y" in constructions are enforced as x >= y + DELTA_SAFE * scale
DELTA_SAFE = 1e-6

# bisection tolerance for the distance oracle and sphere sections
TOL = 1e-12

# absolute boundary band used when comparing signs of A_p(q) against membership
BOUNDARY_BAND = 1e-9

# slack allowed below zero when reporting sampled inclusions as passing
INCLUSION_TOL = 1e-9

# witness containment allowance in verify_family
WITNESS_TOL = 1e-12

SAMPLES = 10_000
PAIR_SAMPLES = 100_000
BUDGET = 100_000
SCALE = 1.0

# ingoing-corner construction
INGOING_MAX_HALVINGS = 200
BOX_RIM_RHO = 1.0
GAUGE_RHO = 0.5
INGOING_ANGLE_SPAN = 1.4  # angles of the horizontal directions lie in [-span, span]

# outgoing-corner construction
OUTGOING_KAPPA = 1.0
OUTGOING_ALPHA = 2.0
OUTGOING_A = 1 / 8
OUTGOING_XBAR = 0.4
FLATNESS_SAMPLES = 10_000

# threshold sweeps
SWEEP_THETA0 = math.pi / 8
SWEEP_A0 = 2.0
SWEEP_B0 = 0.5
SWEEP_STEPS = 12

# chain metric
CHAIN_C = 0.9
CHAIN_N = 40

SPHERE_RESOLUTION = 201

TABLE = {
    "seed": SEED,
    "delta_safe": DELTA_SAFE,
    "tol": TOL,
    "boundary_band": BOUNDARY_BAND,
    "inclusion_tol": INCLUSION_TOL,
    "witness_tol": WITNESS_TOL,
    "samples": SAMPLES,
    "pair_samples": PAIR_SAMPLES,
    "budget": BUDGET,
    "scale": SCALE,
    "ingoing_max_halvings": INGOING_MAX_HALVINGS,
    "box_rim_rho": BOX_RIM_RHO,
    "gauge_rho": GAUGE_RHO,
    "ingoing_angle_span": INGOING_ANGLE_SPAN,
    "outgoing_kappa": OUTGOING_KAPPA,
    "outgoing_alpha": OUTGOING_ALPHA,
    "outgoing_a": OUTGOING_A,
    "outgoing_xbar": OUTGOING_XBAR,
    "flatness_samples": FLATNESS_SAMPLES,
    "sweep_theta0": SWEEP_THETA0,
    "sweep_a0": SWEEP_A0,
    "sweep_b0": SWEEP_B0,
    "sweep_steps": SWEEP_STEPS,
    "chain_c": CHAIN_C,
    "chain_n": CHAIN_N,
    "sphere_resolution": SPHERE_RESOLUTION,
}
