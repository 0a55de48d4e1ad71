"""Mean oscillation, BMO-norm lower bounds, and the limit-condition scanners
separating the vanishing / translation / large-scale behaviours.

Everything here is a finite-scan numerical diagnostic: profiles report the
supremum of the mean oscillation over an explicitly recorded cube family,
never a proof of membership in any oscillation class.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import PreconditionError
from .expr import FunctionSpec
from .funcspace import Cube, default_resolution, midpoint_nodes

__all__ = [
    "mean_oscillation",
    "bmo_norm_estimate",
    "OscillationProfile",
    "small_scale_profile",
    "translation_profile",
    "large_scale_profile",
    "annulus_profile",
    "ScanConfig",
    "classify",
    "ClassifyResult",
]


def mean_oscillation(f: FunctionSpec, cube: Cube, resolution: int | None = None) -> float:
    """Average over the cube of |f - f_Q|, on the same midpoint grid as
    the cube average."""
    if resolution is None:
        resolution = default_resolution(cube.dim)
    vals = f.evaluate(midpoint_nodes(cube, resolution))
    return float(np.mean(np.abs(vals - np.mean(vals))))


def bmo_norm_estimate(f: FunctionSpec, cubes, resolution: int | None = None) -> float:
    """Max of the mean oscillation over the supplied family: a lower bound
    for the BMO norm."""
    cubes = list(cubes)
    if not cubes:
        raise PreconditionError("bmo_norm_estimate needs a non-empty cube family")
    return max(mean_oscillation(f, q, resolution) for q in cubes)


@dataclass
class OscillationProfile:
    """sup of the mean oscillation over a scanned cube family, per parameter.

    ``argmax_centers``/``argmax_sides`` record the winning cube at each
    parameter (lowest scan index on ties), for auditability.
    """

    kind: str
    parameters: list
    values: list
    argmax_centers: list
    argmax_sides: list
    cube_counts: list
    config: dict = field(default_factory=dict)

    def __post_init__(self):
        p = np.asarray(self.parameters, dtype=float)
        if len(p) >= 2:
            d = np.diff(p)
            if not (np.all(d > 0) or np.all(d < 0)):
                raise PreconditionError("profile parameters must be strictly monotone")
        if len(self.values) != len(self.parameters):
            raise PreconditionError("values and parameters must have equal length")
        if any(v < 0 for v in self.values):
            raise PreconditionError("oscillation values are nonnegative")

    @property
    def final_value(self) -> float:
        return self.values[-1]

    def rows(self):
        for i in range(len(self.parameters)):
            yield (
                self.parameters[i],
                self.values[i],
                self.argmax_centers[i],
                self.argmax_sides[i],
                self.cube_counts[i],
            )

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "parameters": list(map(float, self.parameters)),
            "values": list(map(float, self.values)),
            "argmax_centers": [list(map(float, np.atleast_1d(c))) for c in self.argmax_centers],
            "argmax_sides": list(map(float, self.argmax_sides)),
            "cube_counts": list(map(int, self.cube_counts)),
            "config": self.config,
        }


def _sup_over_cubes(f, cubes, resolution):
    best, best_q = -1.0, None
    for q in cubes:
        v = mean_oscillation(f, q, resolution)
        if v > best:
            best, best_q = v, q
    return best, best_q


def small_scale_profile(f: FunctionSpec, scales, centers, resolution=None) -> OscillationProfile:
    """sup over centered cubes of volume a, for each a in a decreasing list."""
    scales = [float(a) for a in scales]
    if not all(a > 0 for a in scales) or not all(
        scales[i] > scales[i + 1] for i in range(len(scales) - 1)
    ):
        raise PreconditionError("scales must be strictly decreasing and positive")
    return _scale_profile("small_scale", f, scales, centers, resolution)


def large_scale_profile(f: FunctionSpec, scales, centers, resolution=None) -> OscillationProfile:
    """Same scan with strictly increasing volumes."""
    scales = [float(a) for a in scales]
    if not all(a > 0 for a in scales) or not all(
        scales[i] < scales[i + 1] for i in range(len(scales) - 1)
    ):
        raise PreconditionError("scales must be strictly increasing and positive")
    return _scale_profile("large_scale", f, scales, centers, resolution)


def _scale_profile(kind, f, scales, centers, resolution):
    centers = [np.atleast_1d(np.asarray(c, dtype=float)) for c in centers]
    vals, amc, ams, counts = [], [], [], []
    for a in scales:
        cubes = [Cube.from_volume(c, a) for c in centers]
        v, q = _sup_over_cubes(f, cubes, resolution)
        vals.append(v)
        amc.append(q.center)
        ams.append(q.side)
        counts.append(len(cubes))
    return OscillationProfile(kind, scales, vals, amc, ams, counts,
                              config={"centers": len(centers)})


def translation_profile(f: FunctionSpec, cube: Cube, directions, radii,
                        resolution=None) -> OscillationProfile:
    """sup over unit directions of the oscillation on the translated cube
    Q + r*direction, for each radius r in an increasing list."""
    radii = [float(r) for r in radii]
    if not all(radii[i] < radii[i + 1] for i in range(len(radii) - 1)):
        raise PreconditionError("radii must be strictly increasing")
    dirs = [np.asarray(d, dtype=float) for d in directions]
    for d in dirs:
        if abs(np.linalg.norm(d) - 1.0) > 1e-9:
            raise PreconditionError("directions must be unit vectors")
    vals, amc, ams, counts = [], [], [], []
    for r in radii:
        cubes = [cube.translate(r * d) for d in dirs]
        v, q = _sup_over_cubes(f, cubes, resolution)
        vals.append(v)
        amc.append(q.center)
        ams.append(q.side)
        counts.append(len(cubes))
    return OscillationProfile("translation", radii, vals, amc, ams, counts,
                              config={"base_center": list(cube.center), "base_side": cube.side})


def annulus_probe_cubes(dim: int, R: float, side_lengths, log_intervals: int = 2):
    """Probe cubes disjoint from Q(0, R) = [-R, R]^n: per side length, one
    cube just beyond the boundary in each +/- axis direction, plus
    [e^k, e^{k+1}]-style cubes for the first ``log_intervals`` integers k
    with e^k > R."""
    gap = 1e-2
    cubes = []
    for s in side_lengths:
        for axis in range(dim):
            for sgn in (1.0, -1.0):
                c = np.zeros(dim)
                c[axis] = sgn * (R + s / 2.0 + gap)
                cubes.append(Cube(tuple(c), s / 2.0))
    k = int(np.ceil(np.log(R + gap)))
    while np.exp(k) <= R:
        k += 1
    for j in range(log_intervals):
        lo, hi = np.exp(k + j), np.exp(k + j + 1)
        c = np.full(dim, (lo + hi) / 2.0)
        cubes.append(Cube(tuple(c), (hi - lo) / 2.0))
    return cubes


def annulus_profile(f: FunctionSpec, R_list, side_lengths=(0.5, 1.0, 2.0),
                    resolution=None, log_intervals: int = 2) -> OscillationProfile:
    """sup of the oscillation over probe cubes disjoint from Q(0,R), per R.

    The probe set mixes several side lengths with log-interval cubes
    adapted to logarithmic growth; any probe intersecting Q(0,R) is a
    precondition violation.
    """
    R_list = [float(R) for R in R_list]
    if not all(R_list[i] < R_list[i + 1] for i in range(len(R_list) - 1)):
        raise PreconditionError("R_list must be strictly increasing")
    vals, amc, ams, counts = [], [], [], []
    for R in R_list:
        cubes = annulus_probe_cubes(f.dim, R, side_lengths, log_intervals)
        for q in cubes:
            if bool(np.all(q.lo < R) and np.all(q.hi > -R)):
                raise PreconditionError(f"probe {q} intersects Q(0,{R})")
        v, q = _sup_over_cubes(f, cubes, resolution)
        vals.append(v)
        amc.append(q.center)
        ams.append(q.side)
        counts.append(len(cubes))
    return OscillationProfile("annulus", R_list, vals, amc, ams, counts,
                              config={"side_lengths": list(side_lengths)})


# ---------------------------------------------------------------------------
# Classifier


def _lattice(dim, bound, step):
    axis = np.arange(-bound, bound + step / 2, step)
    grids = np.meshgrid(*([axis] * dim), indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1)


@dataclass
class ScanConfig:
    """Scan grids for :func:`classify`.  Defaults target n=1 desk scale;
    n=2 callers should coarsen the lattice."""

    center_bound: float = 50.0
    center_step: float = 1.0
    small_scales: tuple = (1.0, 2.0 ** -2, 2.0 ** -4, 2.0 ** -6, 2.0 ** -8)
    large_scales: tuple = (1.0, 4.0, 16.0, 64.0, 256.0)
    translation_radii: tuple = (2 * np.pi, 4 * np.pi, 6 * np.pi, 50.0, 200.0, 1000.0)
    translation_half_side: float = np.pi / 2
    resolution: int | None = None
    # wide cubes need finer grids to resolve narrow features (e.g. a unit
    # bump inside a side-256 cube); used by the large-scale scan only
    large_resolution: int | None = 1024

    def centers(self, dim):
        return _lattice(dim, self.center_bound, self.center_step)

    def directions(self, dim):
        dirs = []
        for axis in range(dim):
            for sgn in (1.0, -1.0):
                d = np.zeros(dim)
                d[axis] = sgn
                dirs.append(d)
        return dirs


@dataclass
class ClassifyResult:
    vmo_smallscale_ok: bool
    xmo_translation_ok: bool
    cmo_largescale_ok: bool
    tolerance: float
    small: OscillationProfile
    translation: OscillationProfile
    large: OscillationProfile
    note: str = (
        "numerical diagnostic over the recorded finite scan; "
        "not a proof of class membership"
    )

    def to_dict(self):
        return {
            "vmo_smallscale_ok": self.vmo_smallscale_ok,
            "xmo_translation_ok": self.xmo_translation_ok,
            "cmo_largescale_ok": self.cmo_largescale_ok,
            "tolerance": self.tolerance,
            "note": self.note,
            "profiles": {
                "small_scale": self.small.to_dict(),
                "translation": self.translation.to_dict(),
                "large_scale": self.large.to_dict(),
            },
        }


def classify(f: FunctionSpec, tolerance: float = 1e-2,
             scan: ScanConfig | None = None) -> ClassifyResult:
    """Run the three limit-condition scans and report whether each profile
    fell below ``tolerance`` at its finest/farthest scanned parameter."""
    scan = scan or ScanConfig()
    centers = scan.centers(f.dim)
    lattice = {"center_bound": scan.center_bound, "center_step": scan.center_step}
    small = small_scale_profile(f, scan.small_scales, centers, scan.resolution)
    small.config.update(lattice)
    base = Cube((0.0,) * f.dim, scan.translation_half_side)
    trans = translation_profile(f, base, scan.directions(f.dim),
                                scan.translation_radii, scan.resolution)
    large_res = scan.large_resolution if f.dim == 1 else (scan.resolution or 128)
    large = large_scale_profile(f, scan.large_scales, centers, large_res)
    large.config.update(lattice, resolution=large_res)
    return ClassifyResult(
        vmo_smallscale_ok=small.final_value < tolerance,
        xmo_translation_ok=trans.final_value < tolerance,
        cmo_largescale_ok=large.final_value < tolerance,
        tolerance=tolerance,
        small=small,
        translation=trans,
        large=large,
    )
