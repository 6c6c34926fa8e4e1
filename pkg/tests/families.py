"""Random valid Besicovitch families for the reduction tests."""

import numpy as np

from heisbcp.covering import BesicovitchFamily, search_max_family, verify_family
from heisbcp.group import Point, dilate_arr, multiply_arr, reflect_arr, rotate_z_arr
from heisbcp.metrics import BallNorm


def random_families(count, seed, sizes=(2, 8), alpha=2.0, budget=3000):
    """Subfamilies of searched families, moved by a random rotation, reflection, dilation and translation.

    Subsets of Besicovitch families are Besicovitch families, and the maps
    used are isometries or similarities, so every output is valid up to
    rounding; outputs are re-verified and invalid ones (none expected) skipped.
    """
    rng = np.random.default_rng(seed)
    m = BallNorm(alpha)
    out = []
    while len(out) < count:
        base = search_max_family(m, 1.0, budget, int(rng.integers(2**32))).family
        if len(base) < sizes[0]:
            continue
        k = int(rng.integers(sizes[0], min(sizes[1], len(base)) + 1))
        pick = rng.choice(len(base), k, replace=False)
        c, r = base.centers[pick], base.radii[pick]
        c = rotate_z_arr(rng.uniform(-np.pi, np.pi), c)
        if rng.uniform() < 0.5:
            c = reflect_arr(c)
        lam = float(np.exp(rng.uniform(-3, 3)))
        g = rng.uniform(-5, 5, 3)
        c = multiply_arr(g, dilate_arr(lam, c))
        f = BesicovitchFamily(m, c, lam * r * (1 + 1e-12), Point.of(g))
        if verify_family(f).valid:
            out.append(f)
    return out
