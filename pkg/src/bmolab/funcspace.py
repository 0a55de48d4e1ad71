"""Cubes, midpoint tensor grids, cube averages, and grid-sampled functions.

A cube is the closed axis-aligned box with the half-open membership
convention [lo, hi) per axis, so dyadic tilings partition exactly.  All
quadrature in the package is the composite midpoint rule on a
``resolution^dim`` tensor grid; it is exact on functions constant per
aligned cell and avoids endpoint singularities such as log|x| at 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import PreconditionError
from .expr import FunctionSpec

__all__ = [
    "Cube",
    "cube_average",
    "midpoint_nodes",
    "default_resolution",
    "SampledFunction",
]


@dataclass(frozen=True)
class Cube:
    """Axis-aligned box: center point and half side (side length = 2*half_side)."""

    center: tuple
    half_side: float

    def __post_init__(self):
        c = tuple(float(v) for v in np.atleast_1d(np.asarray(self.center, dtype=float)))
        object.__setattr__(self, "center", c)
        if not (self.half_side > 0 and np.isfinite(self.half_side)):
            raise PreconditionError("half_side must be positive and finite")

    @property
    def dim(self) -> int:
        return len(self.center)

    @property
    def side(self) -> float:
        return 2.0 * self.half_side

    @property
    def volume(self) -> float:
        return self.side ** self.dim

    @property
    def lo(self) -> np.ndarray:
        return np.asarray(self.center) - self.half_side

    @property
    def hi(self) -> np.ndarray:
        return np.asarray(self.center) + self.half_side

    def translate(self, shift) -> "Cube":
        shift = np.broadcast_to(np.asarray(shift, dtype=float), (self.dim,))
        return Cube(tuple(np.asarray(self.center) + shift), self.half_side)

    def contains(self, points) -> np.ndarray:
        """Half-open membership [lo, hi) per axis."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        return np.all((pts >= self.lo) & (pts < self.hi), axis=1)

    def intersects(self, other: "Cube") -> bool:
        """Open-interior overlap (touching faces do not intersect)."""
        return bool(np.all(self.lo < other.hi) and np.all(other.lo < self.hi))

    @staticmethod
    def interval(lo: float, hi: float) -> "Cube":
        if not hi > lo:
            raise PreconditionError("interval needs hi > lo")
        return Cube(((lo + hi) / 2.0,), (hi - lo) / 2.0)

    @staticmethod
    def from_volume(center, volume: float) -> "Cube":
        center = tuple(np.atleast_1d(np.asarray(center, dtype=float)))
        n = len(center)
        side = float(volume) ** (1.0 / n)
        return Cube(center, side / 2.0)

    def __repr__(self):
        c = ",".join(f"{v:g}" for v in self.center)
        return f"Cube(center=({c}), side={self.side:g})"


def default_resolution(dim: int) -> int:
    """Points per axis used when a caller does not fix one: 64 for n=1, 32 for n=2."""
    return 64 if dim <= 1 else 32


def midpoint_nodes(cube: Cube, resolution: int) -> np.ndarray:
    """Midpoint tensor grid over the cube, shape (resolution^dim, dim).

    Axis 0 varies slowest (C order); the node order is part of the
    deterministic-summation contract.
    """
    if resolution < 2:
        raise PreconditionError("resolution must be >= 2")
    n = cube.dim
    h = cube.side / resolution
    axes = [cube.lo[k] + (np.arange(resolution) + 0.5) * h for k in range(n)]
    grids = np.meshgrid(*axes, indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1)


def cube_average(f: FunctionSpec, cube: Cube, resolution: int | None = None) -> float:
    """Quadrature estimate of the cube average of ``f`` (the mean of f over Q).

    Composite midpoint rule; deterministic for fixed inputs.
    """
    if resolution is None:
        resolution = default_resolution(cube.dim)
    nodes = midpoint_nodes(cube, resolution)
    return float(np.mean(f.evaluate(nodes)))


@dataclass
class SampledFunction:
    """Values on a uniform grid with constant extension by the nearest
    boundary sample outside the sampled box."""

    values: np.ndarray
    origin: tuple
    spacing: float

    clamp_hits: int = field(default=0, compare=False)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        self.origin = tuple(float(v) for v in np.atleast_1d(np.asarray(self.origin, dtype=float)))
        if self.values.ndim != len(self.origin):
            raise PreconditionError("values rank must match origin dimension")
        if not (self.spacing > 0):
            raise PreconditionError("spacing must be positive")
        if not np.all(np.isfinite(self.values)):
            raise PreconditionError("sampled values must be finite")

    @property
    def dim(self) -> int:
        return self.values.ndim

    @property
    def support_box(self) -> Cube:
        # the box covered exactly by extent x spacing
        extent = np.asarray(self.values.shape) * self.spacing
        lo = np.asarray(self.origin)
        if not np.allclose(extent, extent[0]):
            raise PreconditionError("support_box is defined for equal axis extents")
        return Cube(tuple(lo + extent / 2.0), extent[0] / 2.0)

    def evaluate(self, points) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        idx = np.floor((pts - np.asarray(self.origin)) / self.spacing).astype(int)
        hi = np.asarray(self.values.shape) - 1
        clipped = np.clip(idx, 0, hi)
        self.clamp_hits += int(np.sum(np.any(clipped != idx, axis=1)))
        return self.values[tuple(clipped.T)]

    @staticmethod
    def from_function(f: FunctionSpec, box: Cube, resolution: int) -> "SampledFunction":
        nodes = midpoint_nodes(box, resolution)
        vals = f.evaluate(nodes).reshape((resolution,) * box.dim)
        return SampledFunction(vals, tuple(box.lo), box.side / resolution)
