"""Chain remetrization of a finite metric space around an accumulation point.

Point 0 is the accumulation point ``xbar``; the sequence ``x_1, x_2, ...``
converging to it is a subset of the remaining points.  The edge weight between
``xbar`` and ``x_n`` (``n >= n0``) is lowered to ``rho_n = n/(n+1) d(x_n, xbar)``
and the new distance is the cheapest chain, i.e. all-pairs shortest paths.
Balls ``B(x_n, rho_n)`` then contain ``xbar`` but almost nothing else near it,
which yields Besicovitch families of any size the sequence depth permits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import defaults

METRIC_TOL = 1e-12


class MetricError(ValueError):
    pass


def floyd_warshall(w: np.ndarray) -> np.ndarray:
    """All-pairs shortest path lengths on a complete weighted graph."""
    d = np.array(w, dtype=float)
    for k in range(len(d)):
        np.minimum(d, d[:, k, None] + d[None, k, :], out=d)
    return d


def check_metric(d: np.ndarray, tol: float = METRIC_TOL) -> str | None:
    """Return a description of the first failed metric axiom, or None."""
    d = np.asarray(d, dtype=float)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        return "matrix is not square"
    if not np.all(np.isfinite(d)):
        return "matrix has non-finite entries"
    if np.any(np.diag(d) != 0):
        return "diagonal is not zero"
    off = ~np.eye(len(d), dtype=bool)
    if np.any(d[off] <= 0):
        return "distinct points at distance zero or negative"
    if not np.array_equal(d, d.T):
        return "matrix is not symmetric"
    scale = float(d.max()) if d.size else 0.0
    # d[i, j] <= d[i, k] + d[k, j] for all k
    excess = (d[:, None, :] - d[:, :, None] - d[None, :, :]).max() if len(d) else 0.0
    if excess > tol * max(scale, 1.0):
        return f"triangle inequality fails by {excess!r}"
    return None


def smallest_n0(c: float) -> int:
    """Smallest integer ``n0`` with ``c (n0 + 1) < n0``."""
    if not 0 < c < 1:
        raise ValueError("c must lie in (0, 1)")
    n = 1
    while not c * (n + 1) < n:
        n += 1
    return n


@dataclass(frozen=True)
class ChainSpace:
    base_d: np.ndarray
    c: float
    seq: tuple[int, ...]  # point index of x_1, x_2, ... after re-indexing
    n0: int
    rho: np.ndarray  # rho[n - 1] for x_n
    dropped: tuple[int, ...]  # sequence points discarded to keep rho decreasing

    @classmethod
    def build(cls, base_d, c: float, seq: Sequence[int] | None = None) -> "ChainSpace":
        """Validate ``base_d`` and re-index the sequence so that ``rho_n`` strictly decreases.

        ``seq`` lists candidate sequence points in order (default: 1..N).  A
        candidate is kept only if its ``rho`` under the next free index is
        below the previous one; dropped points stay in the space as ordinary
        points.
        """
        d = np.array(base_d, dtype=float)
        err = check_metric(d)
        if err:
            raise MetricError(f"base distance is not a metric: {err}")
        n0 = smallest_n0(c)
        cand = list(range(1, len(d))) if seq is None else [int(i) for i in seq]
        if any(i <= 0 or i >= len(d) for i in cand) or len(set(cand)) != len(cand):
            raise ValueError("sequence indices must be distinct and refer to points other than 0")
        kept, rho, dropped = [], [], []
        for i in cand:
            n = len(kept) + 1
            r = n / (n + 1) * d[i, 0]
            if not rho or r < rho[-1]:
                kept.append(i)
                rho.append(r)
            else:
                dropped.append(i)
        d.flags.writeable = False
        rho_arr = np.array(rho)
        rho_arr.flags.writeable = False
        return cls(d, float(c), tuple(kept), n0, rho_arr, tuple(dropped))

    @classmethod
    def from_line(cls, xn: str = "1/n", N: int = defaults.CHAIN_N, c: float = defaults.CHAIN_C) -> "ChainSpace":
        """Real-line instance: ``xbar = 0`` and ``x_n`` given by ``xn`` for ``n = 1..N``."""
        seqs = {
            "1/n": lambda n: 1.0 / n,
            "2^-n": lambda n: 2.0**-n,
            "1/n^2": lambda n: 1.0 / (n * n),
        }
        if xn not in seqs:
            raise ValueError(f"unknown sequence {xn!r}; choose from {sorted(seqs)}")
        if N < 1:
            raise ValueError("N must be at least 1")
        x = np.array([0.0] + [seqs[xn](n) for n in range(1, N + 1)])
        return cls.build(np.abs(x[:, None] - x[None, :]), c)

    @property
    def size(self) -> int:
        return len(self.base_d)

    def index_of(self, n: int) -> int:
        """Point index of ``x_n`` (1-based sequence position)."""
        return self.seq[n - 1]

    def weights(self) -> np.ndarray:
        w = np.array(self.base_d)
        for n in range(self.n0, len(self.seq) + 1):
            i = self.seq[n - 1]
            w[0, i] = w[i, 0] = self.rho[n - 1]
        return w

    def theta_weight(self, i: int, j: int) -> float:
        """Edge weight between points ``i`` and ``j``."""
        if {i, j} & {0} and i != j:
            other = j if i == 0 else i
            if other in self.seq:
                n = self.seq.index(other) + 1
                if n >= self.n0:
                    return float(self.rho[n - 1])
        return float(self.base_d[i, j])

    def dbar(self) -> np.ndarray:
        return floyd_warshall(self.weights())


def theta_weight(s: ChainSpace, i: int, j: int) -> float:
    return s.theta_weight(i, j)


def chain_distance(s: ChainSpace) -> np.ndarray:
    return s.dbar()


# -- lemma checks ----------------------------------------------------------


@dataclass(frozen=True)
class ChainChecks:
    equivalence_ok: bool
    metric_error: str | None
    isolated_checked: int
    isolated_violations: int

    @property
    def passed(self) -> bool:
        return self.equivalence_ok and self.metric_error is None and self.isolated_violations == 0

    def to_json(self) -> dict:
        return {
            "equivalence_ok": self.equivalence_ok,
            "metric_error": self.metric_error,
            "isolated_checked": self.isolated_checked,
            "isolated_violations": self.isolated_violations,
            "pass": self.passed,
        }


def check_equivalence(s: ChainSpace, dbar: np.ndarray, tol: float = METRIC_TOL) -> bool:
    """``c d <= dbar <= d`` entrywise."""
    d = s.base_d
    return bool(np.all(s.c * d <= dbar + tol * d) and np.all(dbar <= d))


def check_isolated(s: ChainSpace, dbar: np.ndarray) -> tuple[int, int]:
    """Points ``y`` with ``0 < d(xbar, y) < rho_n / (n (n+1))`` must have ``dbar(x_n, y) > rho_n``.

    Returns ``(pairs checked, violations)`` over all ``n >= n0`` in the sequence.
    """
    d0 = s.base_d[0]
    checked = bad = 0
    for n in range(s.n0, len(s.seq) + 1):
        rn = s.rho[n - 1]
        near = np.flatnonzero((d0 > 0) & (d0 < rn / (n * (n + 1))))
        checked += len(near)
        bad += int(np.count_nonzero(dbar[s.seq[n - 1], near] <= rn))
    return checked, bad


def check_chain_space(s: ChainSpace) -> ChainChecks:
    dbar = s.dbar()
    checked, bad = check_isolated(s, dbar)
    return ChainChecks(check_equivalence(s, dbar), check_metric(dbar), checked, bad)


# -- Besicovitch family in the chain metric --------------------------------


class DepthError(ValueError):
    pass


@dataclass(frozen=True)
class ChainFamily:
    matrix: np.ndarray  # dbar
    centers: tuple[int, ...]  # point indices
    radii: np.ndarray
    witness: int = 0
    seq_positions: tuple[int, ...] = ()

    def __len__(self) -> int:
        return len(self.centers)

    def to_json(self) -> dict:
        return {
            "model": "chain",
            "witness": self.witness,
            "balls": [{"center": int(c), "radius": float(r)} for c, r in zip(self.centers, self.radii)],
            "matrix": self.matrix.tolist(),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ChainFamily":
        m = np.array(obj["matrix"], dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("chain family matrix must be square")
        balls = obj["balls"]
        if not balls:
            raise ValueError("family has no balls")
        centers = tuple(int(b["center"]) for b in balls)
        if any(not 0 <= c < len(m) for c in centers) or not 0 <= int(obj.get("witness", 0)) < len(m):
            raise ValueError("ball center or witness index out of range")
        return cls(m, centers, np.array([float(b["radius"]) for b in balls]), int(obj.get("witness", 0)))


def build_chain_counterexample(s: ChainSpace, K: int) -> ChainFamily:
    """Greedily pick ``n_0 < n_1 < ...`` with ``d(xbar, x_{n_k}) < rho_{n_j} / (n_j (n_j + 1))`` for all ``j < k``.

    Starts at ``n0``; returns the balls ``B(x_{n_k}, rho_{n_k})`` in the chain
    metric with witness ``xbar``.
    """
    if K < 1:
        raise ValueError("K must be at least 1")
    depth = len(s.seq)
    if depth < s.n0:
        raise DepthError(f"sequence has {depth} terms but the construction starts at n0 = {s.n0}")
    picks = [s.n0]
    bound = s.rho[s.n0 - 1] / (s.n0 * (s.n0 + 1))
    n = s.n0
    while len(picks) < K:
        n += 1
        if n > depth:
            raise DepthError(
                f"element {len(picks)} of the family needs d(xbar, x_n) < {float(bound)!r}; "
                f"no such n up to {depth}"
            )
        if s.base_d[0, s.seq[n - 1]] < bound:
            picks.append(n)
            bound = min(bound, s.rho[n - 1] / (n * (n + 1)))
    return ChainFamily(
        s.dbar(),
        tuple(s.seq[n - 1] for n in picks),
        np.array([s.rho[n - 1] for n in picks]),
        0,
        tuple(picks),
    )


def verify_chain_family(f: ChainFamily, require_margin: float = 0.0):
    """Same contract as :func:`heisbcp.covering.verify_family`, against the stored matrix."""
    from .covering import FamilyReport

    c = np.array(f.centers)
    r = np.asarray(f.radii, dtype=float)
    if np.any(r <= 0):
        return FamilyReport(False, len(f), -math.inf, -math.inf, None, "radii must be positive")
    if len(c) > 1:
        mm = f.matrix[c[:, None], c[None, :]] - r[None, :]
        np.fill_diagonal(mm, np.inf)
        i, j = np.unravel_index(int(np.argmin(mm)), mm.shape)
        excl, pair = float(mm[i, j]), (int(i), int(j))
    else:
        excl, pair = math.inf, None
    wd = r - f.matrix[c, f.witness]
    wit = float(wd.min())
    reasons = []
    if not excl > require_margin:
        reasons.append(f"center {pair[0]} lies in ball {pair[1]} (margin {excl!r})")
    if not np.all(wd >= -defaults.WITNESS_TOL * np.maximum(1.0, r)):
        reasons.append(f"witness outside ball {int(np.argmin(wd))} (margin {wit!r})")
    return FamilyReport(not reasons, len(f), excl, wit, pair, "; ".join(reasons))


def space_from_json(obj: dict) -> ChainSpace:
    c = float(obj.get("c", defaults.CHAIN_C))
    if "line_sequence" in obj:
        ls = obj["line_sequence"]
        return ChainSpace.from_line(str(ls.get("xn", "1/n")), int(ls["N"]), c)
    if "base" in obj:
        base = obj["base"]
        m = np.array(base["matrix"], dtype=float)
        if "points" in base and int(base["points"]) != len(m):
            raise ValueError(f"declared {base['points']} points but matrix has {len(m)} rows")
        return ChainSpace.build(m, c, base.get("sequence"))
    raise ValueError('chain input needs "line_sequence" or "base"')
