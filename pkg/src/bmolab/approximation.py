"""The constructive approximation pipeline: certified threshold selection,
the disjoint dyadic family tiling nested annuli, the piecewise-constant
projection, its mollification, and the derivative-decay probes.

The family is finite (generations up to ``k_max``); every evaluator is
restricted to the covered box and reports its coverage.  Generation k tiles
the closed annulus between the (k-1)-th and k-th threshold boxes with
half-open dyadic cubes of side 2^(j0+k-1); thresholds are chosen greedily
(largest j0, then smallest jk) subject to jk >= j0+k, which keeps every
annulus boundary aligned to the dyadic grids of both adjacent generations.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._cutoffs import bump_profile
from .errors import PreconditionError, ThresholdCertificationError
from .expr import FunctionSpec
from .funcspace import Cube, cube_average, default_resolution, midpoint_nodes
from .oscillation import mean_oscillation

__all__ = [
    "ThresholdScanConfig",
    "ThresholdSchedule",
    "select_thresholds",
    "DyadicApproximation",
    "build_family",
    "project_simple",
    "adjacency_jump",
    "mollifier_constant",
    "MollifiedApproximant",
    "mollify",
    "DecayProfile",
    "derivative_decay",
    "approximation_error",
    "step_regime_cubes",
]


# ---------------------------------------------------------------------------
# Threshold selection


@dataclass
class ThresholdScanConfig:
    """Scan grids used to certify the thresholds.

    ``center_bound`` bounds the lattice certifying the small-scale
    condition; ``region_bound`` bounds the radii certifying the translated
    condition (and hence the maximal coverage).
    """

    center_bound: float = 50.0
    center_count: int = 101
    region_bound: float = 16384.0
    shell_count: int = 16
    j0_floor: int = -12
    resolution: int | None = None

    def centers(self, dim):
        axis = np.linspace(-self.center_bound, self.center_bound, self.center_count)
        grids = np.meshgrid(*([axis] * dim), indexing="ij")
        return np.stack([g.ravel() for g in grids], axis=1)

    def directions(self, dim):
        dirs = []
        for axis in range(dim):
            for sgn in (1.0, -1.0):
                d = np.zeros(dim)
                d[axis] = sgn
                dirs.append(d)
        if dim >= 2:
            for signs in ([1, 1], [1, -1]):
                d = np.asarray(signs + [0] * (dim - 2), dtype=float)
                dirs.append(d / np.linalg.norm(d))
        return dirs


@dataclass
class ThresholdSchedule:
    """Certified thresholds: j0 < 0 controls the base cube side 2^j0, and
    the strictly increasing jk give the annulus radii 2^jk."""

    epsilon: float
    j0: int
    jk: list
    certifications: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.j0 > -1:
            raise PreconditionError("j0 must be a negative integer")
        if any(b <= a for a, b in zip(self.jk, self.jk[1:])):
            raise PreconditionError("jk must be strictly increasing")
        if self.jk and self.jk[0] <= self.j0:
            raise PreconditionError("jk[0] must exceed j0")
        for k, j in enumerate(self.jk, start=1):
            if j < self.j0 + k:
                raise PreconditionError("jk[k] >= j0 + k is required for dyadic alignment")

    @property
    def k_max(self) -> int:
        return len(self.jk)

    def to_dict(self):
        return {
            "epsilon": self.epsilon,
            "j0": self.j0,
            "jk": list(self.jk),
            "certifications": self.certifications,
        }


def select_thresholds(f: FunctionSpec, epsilon: float,
                      scan: ThresholdScanConfig | None = None,
                      k_max: int = 6) -> ThresholdSchedule:
    """Greedy certified thresholds: the largest j0 whose scanned sub-2^(j0+1)
    cubes all oscillate below epsilon, then for each k the smallest jk such
    that every scanned cube of half-side 2^(j0+k) centered beyond radius
    2^jk oscillates below 2^(k*j0) * epsilon.

    Raises :class:`ThresholdCertificationError` with the witness cube when a
    stage cannot be certified anywhere on the scanned region.
    """
    if not epsilon > 0:
        raise PreconditionError("epsilon must be positive")
    scan = scan or ThresholdScanConfig()
    n = f.dim
    res = scan.resolution or default_resolution(n)
    centers = scan.centers(n)

    j0 = None
    witness = None
    for cand in range(-1, scan.j0_floor - 1, -1):
        ok = True
        for side in (2.0 ** cand, 2.0 ** (cand - 1)):
            for c in centers:
                q = Cube(tuple(c), side / 2.0)
                if mean_oscillation(f, q, res) >= epsilon:
                    ok, witness = False, q
                    break
            if not ok:
                break
        if ok:
            j0 = cand
            break
    if j0 is None:
        raise ThresholdCertificationError(
            f"small-scale condition not met on the scanned region at epsilon={epsilon}",
            witness=witness,
        )

    dirs = scan.directions(n)
    jk: list[int] = []
    certs = {"j0": {"sides": [2.0 ** j0, 2.0 ** (j0 - 1)], "center_bound": scan.center_bound}}
    prev = j0
    for k in range(1, k_max + 1):
        need = (2.0 ** (k * j0)) * epsilon
        half = 2.0 ** (j0 + k)
        cand = max(prev + 1, j0 + k)
        found = None
        witness = None
        while 2.0 ** cand <= scan.region_bound:
            ok = True
            radii = np.geomspace(2.0 ** cand, scan.region_bound, scan.shell_count)
            for r in radii:
                for d in dirs:
                    q = Cube(tuple(r * d), half)
                    if mean_oscillation(f, q, res) >= need:
                        ok, witness = False, q
                        break
                if not ok:
                    break
            if ok:
                found = cand
                break
            cand += 1
        if found is None:
            raise ThresholdCertificationError(
                f"translated condition not met on the scanned region at stage k={k} "
                f"(bound 2^(k*j0)*eps = {need:g})",
                witness=witness,
            )
        jk.append(found)
        certs[f"j{k}"] = {"bound": need, "half_side": half, "region_bound": scan.region_bound}
        prev = found
    return ThresholdSchedule(epsilon=epsilon, j0=j0, jk=jk, certifications=certs)


# ---------------------------------------------------------------------------
# The dyadic family and the simple function


@dataclass
class _Generation:
    level: int        # cubes have side 2**level
    outer: int        # index bound from the k-th threshold box
    inner: int        # excluded index bound from the (k-1)-th box (0 for k=1)
    values: np.ndarray  # dense, NaN outside the annulus

    @property
    def side(self) -> float:
        return 2.0 ** self.level

    def index_iter(self, dim):
        rng = range(-self.outer, self.outer)
        if dim == 1:
            for i in rng:
                if self.inner == 0 or not (-self.inner <= i < self.inner):
                    yield (i,)
        else:
            def rec(prefix):
                if len(prefix) == dim:
                    if self.inner == 0 or not all(
                        -self.inner <= i < self.inner for i in prefix
                    ):
                        yield tuple(prefix)
                    return
                for i in rng:
                    yield from rec(prefix + [i])
            yield from rec([])

    def flat(self, idx_arr):
        # idx_arr: (m, dim) integer cube indices -> positions in values
        shifted = idx_arr + self.outer
        return tuple(shifted.T)


@dataclass
class DyadicApproximation:
    """The disjoint dyadic family together with the per-cube averages; once
    filled, evaluating at x returns the average over the unique cube
    containing x (half-open convention)."""

    schedule: ThresholdSchedule
    dim: int
    generations: list
    build_resolution: int | None = None

    @property
    def coverage_half_side(self) -> float:
        return 2.0 ** self.schedule.jk[-1]

    @property
    def filled(self) -> bool:
        return all(
            not np.any(np.isnan(g.values[g.flat(np.array(list(g.index_iter(self.dim))))]))
            for g in self.generations
            if g.values.size
        )

    def cubes(self):
        """Yield (generation_index, cube, index_tuple) over the family."""
        for k, g in enumerate(self.generations, start=1):
            s = g.side
            for idx in g.index_iter(self.dim):
                center = tuple((i + 0.5) * s for i in idx)
                yield k, Cube(center, s / 2.0), idx

    def cube_count(self) -> int:
        return sum(1 for _ in self.cubes())

    def locate(self, points):
        """Generation index (1-based) and dense-array flat position per point."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        gen_of = np.zeros(pts.shape[0], dtype=int)
        bounds = [2.0 ** j for j in self.schedule.jk]
        # half-open box membership: -B <= x < B per axis
        for k, B in enumerate(bounds, start=1):
            inside = np.all((pts >= -B) & (pts < B), axis=1)
            gen_of[(gen_of == 0) & inside] = k
        if np.any(gen_of == 0):
            bad = pts[gen_of == 0][0]
            raise PreconditionError(
                f"point {bad.tolist()} is outside the covered region "
                f"[-{bounds[-1]}, {bounds[-1]})^{self.dim}"
            )
        return pts, gen_of

    def evaluate(self, points) -> np.ndarray:
        pts, gen_of = self.locate(points)
        out = np.empty(pts.shape[0])
        for k in np.unique(gen_of):
            g = self.generations[k - 1]
            sel = gen_of == k
            idx = np.floor(pts[sel] / g.side).astype(int)
            out[sel] = g.values[g.flat(idx)]
        if np.any(np.isnan(out)):
            raise PreconditionError("evaluation hit an unfilled family cube")
        return out

    __call__ = evaluate

    def to_dict(self) -> dict:
        gens = []
        for g in self.generations:
            idx = list(g.index_iter(self.dim))
            vals = g.values[g.flat(np.array(idx))] if idx else np.empty(0)
            gens.append({
                "level": g.level,
                "outer": g.outer,
                "inner": g.inner,
                "indices": [list(i) for i in idx],
                "values": [None if np.isnan(v) else float(v) for v in vals],
            })
        return {
            "schedule": self.schedule.to_dict(),
            "dim": self.dim,
            "build_resolution": self.build_resolution,
            "generations": gens,
        }

    @staticmethod
    def from_dict(d: dict) -> "DyadicApproximation":
        sched = ThresholdSchedule(
            epsilon=d["schedule"]["epsilon"],
            j0=d["schedule"]["j0"],
            jk=list(d["schedule"]["jk"]),
            certifications=d["schedule"].get("certifications", {}),
        )
        dim = d["dim"]
        gens = []
        for gd in d["generations"]:
            g = _Generation(
                level=gd["level"], outer=gd["outer"], inner=gd["inner"],
                values=np.full((2 * gd["outer"],) * dim, np.nan),
            )
            if gd["indices"]:
                idx = np.asarray(gd["indices"], dtype=int)
                vals = np.array(
                    [np.nan if v is None else v for v in gd["values"]], dtype=float
                )
                g.values[g.flat(idx)] = vals
            gens.append(g)
        return DyadicApproximation(schedule=sched, dim=dim, generations=gens,
                                   build_resolution=d.get("build_resolution"))


def build_family(schedule: ThresholdSchedule, dim: int) -> DyadicApproximation:
    """Skeleton family for the schedule: generation k holds the dyadic cubes
    of side 2^(j0+k-1) tiling the annulus between the (k-1)-th and k-th
    threshold boxes (generation 1 tiles the whole first box)."""
    gens = []
    for k in range(1, schedule.k_max + 1):
        level = schedule.j0 + k - 1
        outer = 2 ** (schedule.jk[k - 1] - level)
        inner = 0 if k == 1 else 2 ** (schedule.jk[k - 2] - level)
        gens.append(_Generation(level=level, outer=outer, inner=inner,
                                values=np.full((2 * outer,) * dim, np.nan)))
    return DyadicApproximation(schedule=schedule, dim=dim, generations=gens)


def project_simple(f: FunctionSpec, approx: DyadicApproximation,
                   resolution: int | None = None) -> DyadicApproximation:
    """Fill the family with per-cube averages of f (the simple function)."""
    res = resolution or default_resolution(approx.dim)
    for k, cube, idx in approx.cubes():
        g = approx.generations[k - 1]
        g.values[g.flat(np.array([idx]))] = cube_average(f, cube, res)
    approx.build_resolution = res
    return approx


def adjacency_jump(approx: DyadicApproximation):
    """Max |g(Q) - g(Q')| over family pairs with touching closures, with the
    witness cube pair."""
    best, pair = 0.0, None
    dim = approx.dim
    gens = approx.generations

    def value(k, idx):
        g = gens[k - 1]
        return float(g.values[g.flat(np.array([idx]))][0])

    def exists(k, idx):
        g = gens[k - 1]
        if any(i < -g.outer or i >= g.outer for i in idx):
            return False
        if g.inner and all(-g.inner <= i < g.inner for i in idx):
            return False
        return True

    def cube_of(k, idx):
        s = gens[k - 1].side
        return Cube(tuple((i + 0.5) * s for i in idx), s / 2.0)

    offsets = [np.array(o) for o in np.ndindex(*(3,) * dim)]
    offsets = [o - 1 for o in offsets if not np.all(o == 1)]

    for k, cube, idx in approx.cubes():
        v = value(k, idx)
        # same-generation neighbours
        for off in offsets:
            nb = tuple(np.array(idx) + off)
            if exists(k, nb):
                d = abs(value(k, nb) - v)
                if d > best:
                    best, pair = d, (cube, cube_of(k, nb))
        # next generation across the annulus boundary
        if k < len(gens):
            g2 = gens[k]
            lo = np.floor((cube.lo - 1e-12) / g2.side).astype(int)
            hi = np.floor((cube.hi + 1e-12) / g2.side).astype(int)
            for idx2 in np.ndindex(*(hi - lo + 1)):
                nb = tuple(lo + np.array(idx2))
                if exists(k + 1, nb):
                    d = abs(value(k + 1, nb) - v)
                    if d > best:
                        best, pair = d, (cube, cube_of(k + 1, nb))
    return best, pair


# ---------------------------------------------------------------------------
# Mollification

_MOLLIFIER_NORM: dict = {}


def mollifier_constant(dim: int) -> float:
    """Normalization making the ball-supported bump integrate to one,
    computed once by fine midpoint quadrature."""
    if dim not in _MOLLIFIER_NORM:
        res = 4096 if dim == 1 else 1024
        h = 2.0 / res
        axes = [(-1.0 + (np.arange(res) + 0.5) * h) for _ in range(dim)]
        grids = np.meshgrid(*axes, indexing="ij")
        r2 = sum(g * g for g in grids)
        mass = float(np.sum(bump_profile(1.0 - r2))) * h ** dim
        _MOLLIFIER_NORM[dim] = 1.0 / mass
    return _MOLLIFIER_NORM[dim]


def mollifier_values(u, dim: int) -> np.ndarray:
    """The normalized even mollifier at points u (shape (..., dim)):
    c_n * exp(-1/(1-|u|^2)) inside the unit ball, 0 outside."""
    u = np.asarray(u, dtype=float)
    r2 = np.sum(u * u, axis=-1)
    return mollifier_constant(dim) * bump_profile(1.0 - r2)


@dataclass
class MollifiedApproximant:
    """h = g * mollifier at scale 2^j0, evaluated by lattice-aligned
    midpoint quadrature.

    The quadrature cells sit on the absolute lattice of width
    2^j0/lattice_factor, which divides every generation side, so the
    piecewise-constant g is exactly constant per cell and the quadrature
    error comes from the smooth mollifier alone.  Evaluations whose ball
    leaves the covered box use constant extension by the nearest covered
    value and are counted in ``extension_hits``.
    """

    approx: DyadicApproximation
    lattice_factor: int = 128
    extension_hits: int = 0

    def __post_init__(self):
        if not self.approx.filled:
            raise PreconditionError("mollify needs a filled approximation")
        self.scale = 2.0 ** self.approx.schedule.j0
        self.cell = self.scale / self.lattice_factor
        self._norm = mollifier_constant(self.approx.dim)

    def _g_extended(self, pts):
        R = self.approx.coverage_half_side
        eps = 1e-9 * R
        clipped = np.clip(pts, -R, R - eps)
        if np.any(clipped != pts):
            self.extension_hits += int(np.sum(np.any(clipped != pts, axis=1)))
        return self.approx.evaluate(clipped)

    def evaluate(self, points) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        n = self.approx.dim
        t, h = self.scale, self.cell
        out = np.empty(pts.shape[0])
        for i, x in enumerate(pts):
            los = np.floor((x - t) / h).astype(int)
            his = np.ceil((x + t) / h).astype(int)
            axes = [(np.arange(lo, hi) + 0.5) * h for lo, hi in zip(los, his)]
            grids = np.meshgrid(*axes, indexing="ij")
            mids = np.stack([g.ravel() for g in grids], axis=1)
            phi = mollifier_values((x - mids) / t, n) / t ** n
            live = phi > 0.0
            if not np.any(live):
                out[i] = 0.0
                continue
            gv = self._g_extended(mids[live])
            out[i] = float(np.sum(gv * phi[live])) * h ** n
        return out if pts.shape[0] > 1 else out

    __call__ = evaluate

    def mollifier_mass(self, at=None) -> float:
        """Lattice quadrature of the scaled mollifier (should be 1)."""
        n = self.approx.dim
        x = np.zeros(n) if at is None else np.asarray(at, dtype=float)
        t, h = self.scale, self.cell
        los = np.floor((x - t) / h).astype(int)
        his = np.ceil((x + t) / h).astype(int)
        axes = [(np.arange(lo, hi) + 0.5) * h for lo, hi in zip(los, his)]
        grids = np.meshgrid(*axes, indexing="ij")
        mids = np.stack([g.ravel() for g in grids], axis=1)
        phi = mollifier_values((x - mids) / t, n) / t ** n
        return float(np.sum(phi)) * h ** n


def mollify(approx: DyadicApproximation, lattice_factor: int | None = None) -> MollifiedApproximant:
    if lattice_factor is None:
        lattice_factor = 128 if approx.dim == 1 else 32
    return MollifiedApproximant(approx=approx, lattice_factor=lattice_factor)


# ---------------------------------------------------------------------------
# Derivative decay probes


@dataclass
class DecayProfile:
    alpha: tuple
    radii: list
    values: list
    argmax_points: list

    def nonincreasing(self, slack: float = 1e-8) -> bool:
        return all(
            self.values[i + 1] <= self.values[i] + slack
            for i in range(len(self.values) - 1)
        )

    def to_dict(self):
        return {
            "alpha": list(self.alpha),
            "radii": list(map(float, self.radii)),
            "values": list(map(float, self.values)),
            "argmax_points": [list(map(float, p)) for p in self.argmax_points],
        }


def _fd(h: MollifiedApproximant, x, alpha, step):
    n = len(x)
    axes = [a for a, m in enumerate(alpha) for _ in range(m)]
    if len(axes) == 1:
        e = np.zeros(n)
        e[axes[0]] = step
        v = h.evaluate(np.array([x + e, x - e]))
        return (v[0] - v[1]) / (2.0 * step)
    a, b2 = axes
    if a == b2:
        e = np.zeros(n)
        e[a] = step
        v = h.evaluate(np.array([x + e, x, x - e]))
        return (v[0] - 2.0 * v[1] + v[2]) / step ** 2
    ea = np.zeros(n)
    ea[a] = step
    eb = np.zeros(n)
    eb[b2] = step
    v = h.evaluate(np.array([x + ea + eb, x + ea - eb, x - ea + eb, x - ea - eb]))
    return (v[0] - v[1] - v[2] + v[3]) / (4.0 * step ** 2)


def derivative_decay(h: MollifiedApproximant, alpha, radii,
                     step: float | None = None, directions=None) -> DecayProfile:
    """Profile of max |D^alpha h| (central finite differences, step
    2^j0/8 by default) over sphere probe points of each radius."""
    alpha = tuple(int(a) for a in np.atleast_1d(alpha))
    n = h.approx.dim
    if len(alpha) != n or sum(alpha) not in (1, 2):
        raise PreconditionError("alpha must be a multi-index on R^n with |alpha| in {1,2}")
    radii = [float(r) for r in radii]
    if any(radii[i] >= radii[i + 1] for i in range(len(radii) - 1)):
        raise PreconditionError("radii must be strictly increasing")
    if step is None:
        step = h.scale / 8.0
    if directions is None:
        dirs = []
        for axis in range(n):
            for sgn in (1.0, -1.0):
                d = np.zeros(n)
                d[axis] = sgn
                dirs.append(d)
        if n >= 2:
            for signs in np.ndindex(*(2,) * n):
                d = np.where(np.array(signs) == 0, -1.0, 1.0)
                dirs.append(d / np.linalg.norm(d))
    else:
        dirs = [np.asarray(d, dtype=float) for d in directions]
    R = h.approx.coverage_half_side
    margin = h.scale + 2.0 * step
    vals, arg = [], []
    for r in radii:
        if r + margin > R:
            raise PreconditionError(
                f"radius {r} too close to the coverage boundary {R} "
                f"(mollification margin {margin:g})"
            )
        best, best_x = -1.0, None
        for d in dirs:
            x = r * d
            v = abs(_fd(h, x, alpha, step))
            if v > best:
                best, best_x = v, x
        vals.append(best)
        arg.append(best_x)
    return DecayProfile(alpha=alpha, radii=radii, values=vals, argmax_points=arg)


# ---------------------------------------------------------------------------
# BMO-style approximation error


def step_regime_cubes(approx: DyadicApproximation, per_regime: int = 5):
    """Scan family covering the three side regimes of the error estimate:
    below the base side, at each generation's side, and twice it, with
    positions inside each annulus and straddling its boundaries."""
    sched = approx.schedule
    dim = approx.dim
    R = approx.coverage_half_side
    cubes = []
    bounds = [0.0] + [2.0 ** j for j in sched.jk]

    def add(center_r, side):
        if side / 2.0 >= R:
            return
        c = min(center_r, R - side / 2.0)
        vec = np.zeros(dim)
        vec[0] = c
        cubes.append(Cube(tuple(vec), side / 2.0))
        cubes.append(Cube(tuple(-vec), side / 2.0))

    base = 2.0 ** sched.j0
    for side in (base / 2.0, base / 4.0):
        for r in np.linspace(0.0, min(8.0, R - side), per_regime):
            add(r, side)
    for k in range(1, sched.k_max + 1):
        s = 2.0 ** (sched.j0 + k - 1)
        lo, hi = bounds[k - 1], bounds[k]
        for side in (s / 2.0, s, 2.0 * s):
            radial = list(np.linspace(lo + side / 2.0, max(lo + side / 2.0, hi - side / 2.0),
                                      per_regime))
            radial += [lo, hi]  # boundary straddlers
            for r in radial:
                add(r, side)
    return cubes


def approximation_error(f: FunctionSpec, approx: DyadicApproximation,
                        mollified: bool = False, cubes=None,
                        resolution: int | None = None,
                        h: MollifiedApproximant | None = None) -> float:
    """Max over the cube family of the mean oscillation of f - g (or f - h
    with ``mollified``): the finite-family BMO error of the approximation."""
    if not approx.filled:
        raise PreconditionError("approximation_error needs a filled approximation")
    if cubes is None:
        cubes = step_regime_cubes(approx)
    res = resolution or default_resolution(approx.dim)
    if mollified:
        target = h or mollify(approx)
        approximant = target.evaluate
    else:
        approximant = approx.evaluate
    worst = 0.0
    for q in cubes:
        nodes = midpoint_nodes(q, res)
        vals = f.evaluate(nodes) - approximant(nodes)
        worst = max(worst, float(np.mean(np.abs(vals - np.mean(vals)))))
    return worst
