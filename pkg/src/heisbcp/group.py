"""First Heisenberg group in exponential coordinates.

Scalar operations act on :class:`Point`; the ``*_arr`` variants act on numpy
arrays whose last axis holds ``(x, y, z)`` and are what the sampling-based
checks use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np


@dataclass(frozen=True, slots=True)
class Point:
    x: float
    y: float
    z: float

    def __post_init__(self) -> None:
        for name in ("x", "y", "z"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise ValueError(f"non-finite coordinate {name}={v!r}")
            object.__setattr__(self, name, v)

    def __iter__(self) -> Iterator[float]:
        yield self.x
        yield self.y
        yield self.z

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    def to_list(self) -> list[float]:
        return [self.x, self.y, self.z]

    @classmethod
    def of(cls, seq: Sequence[float]) -> "Point":
        x, y, z = seq
        return cls(x, y, z)


ORIGIN = Point(0.0, 0.0, 0.0)


def multiply(p: Point, q: Point) -> Point:
    return Point(p.x + q.x, p.y + q.y, p.z + q.z + 0.5 * (p.x * q.y - p.y * q.x))


def inverse(p: Point) -> Point:
    return Point(-p.x, -p.y, -p.z)


def dilate(lam: float, p: Point) -> Point:
    if not lam > 0:
        raise ValueError(f"dilation factor must be positive, got {lam!r}")
    return Point(lam * p.x, lam * p.y, lam * lam * p.z)


def rotate_z(theta: float, p: Point) -> Point:
    c, s = math.cos(theta), math.sin(theta)
    return Point(p.x * c - p.y * s, p.x * s + p.y * c, p.z)


def reflect(p: Point) -> Point:
    return Point(p.x, -p.y, -p.z)


def rho(p: Point) -> float:
    return math.hypot(p.x, p.y)


def project(p: Point) -> tuple[float, float]:
    return (p.x, p.y)


# -- vectorized forms ------------------------------------------------------


def as_points(a) -> np.ndarray:
    """Coerce a Point, sequence of Points or array to a float array (..., 3)."""
    if isinstance(a, Point):
        return a.as_array()
    arr = np.asarray(
        [p.to_list() for p in a] if len(a) and isinstance(a[0], Point) else a,
        dtype=float,
    )
    if arr.shape[-1] != 3:
        raise ValueError(f"expected trailing axis of length 3, got shape {arr.shape}")
    return arr


def multiply_arr(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    px, py, pz = p[..., 0], p[..., 1], p[..., 2]
    qx, qy, qz = q[..., 0], q[..., 1], q[..., 2]
    return np.stack([px + qx, py + qy, pz + qz + 0.5 * (px * qy - py * qx)], axis=-1)


def inverse_arr(p: np.ndarray) -> np.ndarray:
    return -np.asarray(p, dtype=float)


def dilate_arr(lam, p: np.ndarray) -> np.ndarray:
    lam = np.asarray(lam, dtype=float)
    if np.any(lam <= 0):
        raise ValueError("dilation factor must be positive")
    p = np.asarray(p, dtype=float)
    lam = lam[..., None] if lam.ndim else lam
    scale = np.concatenate(
        [np.broadcast_to(lam, p[..., :2].shape), np.broadcast_to(lam * lam, p[..., 2:].shape)],
        axis=-1,
    )
    return p * scale


def rotate_z_arr(theta, p: np.ndarray) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    c, s = np.cos(theta), np.sin(theta)
    return np.stack([p[..., 0] * c - p[..., 1] * s, p[..., 0] * s + p[..., 1] * c, p[..., 2]], axis=-1)


def reflect_arr(p: np.ndarray) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    return np.stack([p[..., 0], -p[..., 1], -p[..., 2]], axis=-1)


def rho_arr(p: np.ndarray) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    return np.hypot(p[..., 0], p[..., 1])


def translate_to_origin(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """``p^{-1} q`` written out so the z-coordinate avoids one rounding step."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    dx = q[..., 0] - p[..., 0]
    dy = q[..., 1] - p[..., 1]
    dz = (q[..., 2] - p[..., 2]) - 0.5 * (p[..., 0] * q[..., 1] - p[..., 1] * q[..., 0])
    return np.stack([dx, dy, dz], axis=-1)
