"""Quadrature realizations of the bilinear operator, its commutators, the
bilinear maximal operator, and the truncation-gap experiment.

The untruncated operator is only evaluated off the common support (its
representation domain); all on-support work goes through a truncated
kernel, so no singular quadrature is ever attempted.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _core
from ._parallel import pmap
from .errors import PreconditionError
from .expr import FunctionSpec
from .funcspace import Cube, midpoint_nodes
from .kernels import BilinearKernel, difference_kernel

__all__ = [
    "SupportedFunction",
    "OperatorOutput",
    "apply_T",
    "commutator",
    "MaximalScan",
    "bilinear_maximal",
    "gradient_sup",
    "truncation_gap",
    "default_operator_resolution",
]


def default_operator_resolution(n: int) -> int:
    """(y, z) quadrature points per axis per support box: 48 for n=1, 24 for n=2."""
    return 48 if n <= 1 else 24


@dataclass(frozen=True)
class SupportedFunction:
    """A function together with its declared compact support box; the
    quadrature integrates over exactly this box."""

    func: FunctionSpec
    support: Cube

    def label(self):
        return f"{self.func.label()}@{self.support!r}"


@dataclass
class OperatorOutput:
    """Values of a bilinear quadrature on an evaluation grid, with full
    provenance (inputs, boxes, resolution) so reports are reproducible."""

    grid: np.ndarray
    values: np.ndarray
    quadrature_box: tuple
    resolution: int
    kernel_id: str
    b_id: str
    f_id: str
    g_id: str
    consistency_gap: float | None = None

    def to_sidecar(self) -> dict:
        return {
            "kernel_id": self.kernel_id,
            "b_id": self.b_id,
            "f_id": self.f_id,
            "g_id": self.g_id,
            "resolution": self.resolution,
            "quadrature_box": [
                {"center": list(np.atleast_1d(b.center)), "half_side": b.half_side}
                for b in self.quadrature_box
            ],
            "consistency_gap": self.consistency_gap,
            "backend": _core.BACKEND,
        }


def _shape_code(kernel: BilinearKernel) -> int:
    return _core.SHAPE_SMOOTH if kernel.shape == "smooth" else _core.SHAPE_ODD


def _trunc_code(kernel: BilinearKernel):
    if kernel.truncation_eta is None:
        return _core.TRUNC_NONE, 0.0
    mode = _core.TRUNC_INNER if kernel.complement else _core.TRUNC_OUTER
    return mode, float(kernel.truncation_eta)


def _grids(f: SupportedFunction, g: SupportedFunction, resolution):
    n = f.support.dim
    if g.support.dim != n:
        raise PreconditionError("f and g supports must share a dimension")
    if resolution is None:
        resolution = default_operator_resolution(n)
    ynodes = midpoint_nodes(f.support, resolution)
    znodes = midpoint_nodes(g.support, resolution)
    hy = f.support.side / resolution
    hz = g.support.side / resolution
    cell_weight = hy ** n * hz ** n
    return resolution, ynodes, znodes, cell_weight


def _check_off_support(kernel, f, g, xs):
    if kernel.truncation_eta is not None:
        return
    common_lo = np.maximum(f.support.lo, g.support.lo)
    common_hi = np.minimum(f.support.hi, g.support.hi)
    if np.any(common_lo >= common_hi):
        return  # disjoint supports: every x is off the intersection
    inside = np.all((xs >= common_lo) & (xs < common_hi), axis=1)
    if np.any(inside):
        raise PreconditionError(
            "untruncated kernel evaluated inside supp(f) n supp(g); "
            "truncate the kernel (eta > 0) for on-support points"
        )


def _bilinear(kernel, xs, bxs, ynodes, fvals, b_at_y, znodes, gvals, b_at_z,
              cell_weight, b_mode, absolute=False, xy_factor=False,
              phi_mode=0, A=0.0, threads=1):
    trunc_mode, eta = _trunc_code(kernel)
    kw = dict(
        shape_kind=_shape_code(kernel),
        n_dim=kernel.n,
        eta=eta,
        trunc_mode=trunc_mode,
        phi_mode=phi_mode,
        A=A,
        b_mode=b_mode,
        absolute=absolute,
        xy_factor=xy_factor,
    )
    if threads <= 1 or xs.shape[0] < 2 * threads:
        return _core.bilinear_sum(xs, bxs, ynodes, fvals, b_at_y, znodes, gvals,
                                  b_at_z, cell_weight, **kw)
    chunks = np.array_split(np.arange(xs.shape[0]), threads)

    def run(idx):
        return _core.bilinear_sum(xs[idx], bxs[idx], ynodes, fvals, b_at_y,
                                  znodes, gvals, b_at_z, cell_weight, **kw)

    return np.concatenate(pmap(run, chunks, threads))


def _as_points(xs, n):
    pts = np.asarray(xs, dtype=float)
    if pts.ndim == 1:
        pts = pts.reshape(-1, 1) if n == 1 else pts.reshape(1, -1)
    if pts.shape[1] != n:
        raise PreconditionError(f"evaluation points must have dimension {n}")
    return pts


def apply_T(kernel: BilinearKernel, f: SupportedFunction, g: SupportedFunction,
            xs, resolution: int | None = None, threads: int = 1) -> OperatorOutput:
    """Tensor-midpoint quadrature of the double integral of K(x,y,z)f(y)g(z)
    over the declared support boxes.

    Untruncated kernels require every x off supp(f) n supp(g).
    """
    xs = _as_points(xs, kernel.n)
    _check_off_support(kernel, f, g, xs)
    resolution, ynodes, znodes, cw = _grids(f, g, resolution)
    fvals = f.func.evaluate(ynodes)
    gvals = g.func.evaluate(znodes)
    zero = np.zeros(1)
    vals = _bilinear(kernel, xs, np.zeros(xs.shape[0]), ynodes, fvals, zero,
                     znodes, gvals, zero, cw, b_mode=0, threads=threads)
    return OperatorOutput(
        grid=xs, values=vals, quadrature_box=(f.support, g.support),
        resolution=resolution, kernel_id=kernel.kernel_id, b_id="",
        f_id=f.func.label(), g_id=g.func.label(),
    )


def commutator(i: int, b: FunctionSpec, kernel: BilinearKernel,
               f: SupportedFunction, g: SupportedFunction, xs,
               resolution: int | None = None, check_consistency: bool = False,
               threads: int = 1) -> OperatorOutput:
    """Commutator with the symbol on the i-th entry: the quadrature of
    [b(x) - b(y or z)] K(x,y,z) f(y) g(z).

    With ``check_consistency`` the operator form b*T(f,g) - T(bf,g) (or
    T(f,bg)) is also computed and the max absolute disagreement recorded.
    """
    if i not in (1, 2):
        raise PreconditionError("commutator index must be 1 or 2")
    xs = _as_points(xs, kernel.n)
    _check_off_support(kernel, f, g, xs)
    resolution, ynodes, znodes, cw = _grids(f, g, resolution)
    fvals = f.func.evaluate(ynodes)
    gvals = g.func.evaluate(znodes)
    b_at_y = b.evaluate(ynodes)
    b_at_z = b.evaluate(znodes)
    bxs = b.evaluate(xs)
    vals = _bilinear(kernel, xs, bxs, ynodes, fvals, b_at_y, znodes, gvals,
                     b_at_z, cw, b_mode=i, threads=threads)
    gap = None
    if check_consistency:
        zero = np.zeros(1)
        t_fg = _bilinear(kernel, xs, bxs, ynodes, fvals, zero, znodes, gvals,
                         zero, cw, b_mode=0, threads=threads)
        if i == 1:
            moved = _bilinear(kernel, xs, bxs, ynodes, fvals * b_at_y, zero,
                              znodes, gvals, zero, cw, b_mode=0, threads=threads)
        else:
            moved = _bilinear(kernel, xs, bxs, ynodes, fvals, zero, znodes,
                              gvals * b_at_z, zero, cw, b_mode=0, threads=threads)
        gap = float(np.max(np.abs(bxs * t_fg - moved - vals)))
    return OperatorOutput(
        grid=xs, values=vals, quadrature_box=(f.support, g.support),
        resolution=resolution, kernel_id=kernel.kernel_id, b_id=b.label(),
        f_id=f.func.label(), g_id=g.func.label(), consistency_gap=gap,
    )


# ---------------------------------------------------------------------------
# Bilinear maximal operator


@dataclass(frozen=True)
class MaximalScan:
    """Cube scan for the maximal operator: side lengths, each in several
    alignments containing the evaluation point (lo = x - alpha * side)."""

    side_lengths: tuple
    alignments: tuple = (0.125, 0.375, 0.625, 0.875)

    @staticmethod
    def dyadic(j_min: int = -6, j_max: int = 6) -> "MaximalScan":
        return MaximalScan(tuple(2.0 ** j for j in range(j_min, j_max + 1)))


def bilinear_maximal(f: FunctionSpec, g: FunctionSpec, x,
                     scan: MaximalScan | None = None,
                     resolution: int = 64) -> float:
    """Max over the scanned cubes containing x of avg|f| * avg|g|: a lower
    bound of the maximal function at x."""
    scan = scan or MaximalScan.dyadic()
    x = np.atleast_1d(np.asarray(x, dtype=float))
    n = x.shape[0]
    if not scan.side_lengths:
        raise PreconditionError("maximal scan must be non-empty")
    best = 0.0
    for side in scan.side_lengths:
        for alpha in scan.alignments:
            lo = x - alpha * side
            cube = Cube(tuple(lo + side / 2.0), side / 2.0)
            if not bool(cube.contains(x)[0]):
                raise PreconditionError("scan produced a cube missing x")
            nodes = midpoint_nodes(cube, resolution)
            prod = float(np.mean(np.abs(f.evaluate(nodes)))) * float(
                np.mean(np.abs(g.evaluate(nodes)))
            )
            best = max(best, prod)
    return best


def gradient_sup(b: FunctionSpec, region: Cube, samples: int = 512,
                 step: float = 1e-5) -> float:
    """Finite-difference bound for sup |grad b| over the region, sampled on
    a uniform grid (a lower estimate, used as the proof-style constant)."""
    n = region.dim
    per_axis = max(2, int(round(samples ** (1.0 / n))))
    pts = midpoint_nodes(region, per_axis)
    sup = 0.0
    for axis in range(n):
        e = np.zeros(n)
        e[axis] = step
        d = (b.evaluate(pts + e) - b.evaluate(pts - e)) / (2.0 * step)
        sup = max(sup, float(np.max(np.abs(d))))
    return sup


# ---------------------------------------------------------------------------
# Truncation gap


@dataclass
class GapReport:
    """Per-eta gap measurements against the maximal-function bound."""

    etas: list
    sup_gaps: list
    constants: list  # sup_x gap(x) / (eta * ||grad b|| * M(f,g)(x))
    grad_bound: float
    resolution: int
    gaps: dict = field(default_factory=dict)

    @property
    def slope(self) -> float:
        A = np.vstack([np.log(self.etas), np.ones(len(self.etas))]).T
        return float(np.linalg.lstsq(A, np.log(self.sup_gaps), rcond=None)[0][0])

    def to_dict(self):
        return {
            "etas": list(map(float, self.etas)),
            "sup_gaps": list(map(float, self.sup_gaps)),
            "constants": list(map(float, self.constants)),
            "grad_bound": self.grad_bound,
            "resolution": self.resolution,
            "log_log_slope": self.slope,
        }


def truncation_gap(b: FunctionSpec, kernel: BilinearKernel, etas,
                   f: SupportedFunction, g: SupportedFunction, xs,
                   resolution: int | None = None,
                   maximal_scan: MaximalScan | None = None,
                   threads: int = 1) -> GapReport:
    """Gap between the commutator and its truncated version, computed via
    the difference kernel K*phi1(2s/eta) (supported on s <= eta), for each
    eta; reports sup_x gap and the normalized constants
    gap / (eta * ||grad b|| * M(f,g)).

    One fixed resolution serves every eta so the gaps are comparable; for
    singular kernels, place the evaluation points on quadrature midpoints
    so near-diagonal odd contributions cancel pairwise.
    """
    etas = [float(e) for e in etas]
    if any(e <= 0 or e > 1 for e in etas):
        raise PreconditionError("eta values must lie in (0, 1]")
    if resolution is None:
        # resolve the smallest truncation zone with >= 8 cells per eta
        resolution = int(np.ceil(8.0 * f.support.side / min(etas)))
        resolution = max(resolution, default_operator_resolution(kernel.n))
    xs = _as_points(xs, kernel.n)
    _, ynodes, znodes, cw = _grids(f, g, resolution)
    fvals = f.func.evaluate(ynodes)
    gvals = g.func.evaluate(znodes)
    b_at_y = b.evaluate(ynodes)
    bxs = b.evaluate(xs)
    scan_region = Cube(f.support.center, 2.0 * f.support.half_side)
    grad = gradient_sup(b, scan_region)
    mvals = np.array([bilinear_maximal(f.func, g.func, x, maximal_scan) for x in xs])
    sups, consts, per_eta = [], [], {}
    zero = np.zeros(1)
    for eta in etas:
        dk = difference_kernel(kernel, eta)
        gaps = np.abs(
            _bilinear(dk, xs, bxs, ynodes, fvals, b_at_y, znodes, gvals, zero,
                      cw, b_mode=1, threads=threads)
        )
        sups.append(float(np.max(gaps)))
        denom = eta * grad * mvals
        ok = denom > 0
        consts.append(float(np.max(gaps[ok] / denom[ok])) if np.any(ok) else 0.0)
        per_eta[eta] = gaps
    return GapReport(etas=etas, sup_gaps=sups, constants=consts,
                     grad_bound=grad, resolution=resolution, gaps=per_eta)
