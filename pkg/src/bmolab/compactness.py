"""Finite-family Frechet-Kolmogorov diagnostics for commutator outputs,
plus the tail (L1-L3) and translation (L4-L5) bound experiments.

A "family" here is always finite: a dictionary of normalized input pairs.
The reports are finite-scale evidence - boundedness, uniform tail decay,
and uniform translation continuity measured over a recorded grid - never a
certification of operator compactness.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import PreconditionError
from .expr import BinOp, FunctionSpec, Num
from .funcspace import Cube, default_resolution, midpoint_nodes
from .kernels import BilinearKernel, diagnostic_split_constants
from .operators import (
    OperatorOutput,
    SupportedFunction,
    _as_points,
    _bilinear,
    _grids,
    apply_T,
    commutator,
    gradient_sup,
)
from .weights import VectorWeight, weighted_lp_norm

__all__ = [
    "FamilyMember",
    "normalize_pair",
    "commutator_family",
    "FkTolerances",
    "CompactnessReport",
    "fk_check",
    "TailReport",
    "tail_decomposition",
    "TranslationReport",
    "translation_continuity",
]


@dataclass
class FamilyMember:
    """One element of a finite family: a name, an evaluator defined on all
    of the region (so translated grids can be re-evaluated exactly), and
    optionally the precomputed output on the family grid."""

    name: str
    evaluate: callable
    output: OperatorOutput | None = None

    @staticmethod
    def from_function(f: FunctionSpec, name: str = "") -> "FamilyMember":
        return FamilyMember(name=name or f.label(), evaluate=f.evaluate)


def _scaled(f: FunctionSpec, factor: float) -> FunctionSpec:
    return FunctionSpec(BinOp("*", Num(float(factor)), f.node), f.dim,
                        name=f"{factor:.6g}*{f.label()}")


def normalize_pair(f: SupportedFunction, g: SupportedFunction, vw: VectorWeight,
                   resolution: int | None = None):
    """Scale the pair to unit weighted norms (f in L^p1_w1 over its support,
    g in L^p2_w2)."""
    nf = weighted_lp_norm(f.func, vw.w1, vw.p1, f.support, resolution)
    ng = weighted_lp_norm(g.func, vw.w2, vw.p2, g.support, resolution)
    if nf <= 0 or ng <= 0:
        raise PreconditionError("cannot normalize a pair with zero norm")
    return (SupportedFunction(_scaled(f.func, 1.0 / nf), f.support),
            SupportedFunction(_scaled(g.func, 1.0 / ng), g.support))


def commutator_family(b: FunctionSpec, kernel: BilinearKernel, pairs,
                      vw: VectorWeight | None, xs,
                      resolution: int | None = None,
                      norm_tolerance: float = 1e-6,
                      threads: int = 1):
    """Commutator outputs over the pair dictionary.

    The kernel must be truncated (eta > 0); each pair must arrive with
    weighted norms <= 1 (use :func:`normalize_pair`), otherwise the pair is
    rejected.  Zero pairs are admitted as the zero member.
    """
    if kernel.truncation_eta is None:
        raise PreconditionError("commutator_family needs a truncated kernel (eta > 0)")
    xs = _as_points(xs, kernel.n)
    members = []
    for j, (f, g) in enumerate(pairs):
        if vw is not None:
            nf = weighted_lp_norm(f.func, vw.w1, vw.p1, f.support, resolution)
            ng = weighted_lp_norm(g.func, vw.w2, vw.p2, g.support, resolution)
            if nf > 1.0 + norm_tolerance or ng > 1.0 + norm_tolerance:
                raise PreconditionError(
                    f"pair {j} is not normalized (norms {nf:.4g}, {ng:.4g})"
                )
        out = commutator(1, b, kernel, f, g, xs, resolution, threads=threads)

        def make_eval(f=f, g=g):
            def ev(points):
                return commutator(1, b, kernel, f, g, points, resolution,
                                  threads=threads).values
            return ev

        members.append(FamilyMember(
            name=f"pair{j}[{f.func.label()} x {g.func.label()}]",
            evaluate=make_eval(), output=out,
        ))
    return members


# ---------------------------------------------------------------------------
# The FK harness


@dataclass
class FkTolerances:
    bound_cap: float = 1e3
    tail_rel: float = 1e-2
    modulus_rel: float = 1e-2


@dataclass
class CompactnessReport:
    """Measured FK quantities for a finite family, with one verdict per
    condition at the stated tolerances."""

    bounded_sup: float
    tail_norms: dict          # A -> sup over the family of the tail norm
    modulus: dict             # |t| -> sup over the family of the shift norm
    bounded_ok: bool
    tail_ok: bool
    modulus_ok: bool
    tolerances: FkTolerances
    member_norms: dict = field(default_factory=dict)
    config: dict = field(default_factory=dict)
    note: str = (
        "finite-family diagnostic on a recorded grid; "
        "not a compactness certification"
    )

    @property
    def all_ok(self) -> bool:
        return self.bounded_ok and self.tail_ok and self.modulus_ok

    def to_dict(self):
        return {
            "bounded_sup": self.bounded_sup,
            "tail_norms": {str(k): v for k, v in self.tail_norms.items()},
            "modulus": {str(k): v for k, v in self.modulus.items()},
            "bounded_ok": self.bounded_ok,
            "tail_ok": self.tail_ok,
            "modulus_ok": self.modulus_ok,
            "member_norms": self.member_norms,
            "tolerances": {
                "bound_cap": self.tolerances.bound_cap,
                "tail_rel": self.tolerances.tail_rel,
                "modulus_rel": self.tolerances.modulus_rel,
            },
            "config": self.config,
            "note": self.note,
        }


def _weighted_norm_on_nodes(vals, wvals, p, cell_volume):
    return float(np.sum(np.abs(vals) ** p * wvals) * cell_volume) ** (1.0 / p)


def fk_check(members, w: FunctionSpec, p: float, A_list, t_list,
             tolerances: FkTolerances | None = None,
             region: Cube | None = None,
             resolution: int | None = None) -> CompactnessReport:
    """Measure the three FK conditions over the family.

    (i) boundedness: sup of weighted norms over the region;
    (ii) tails: per A, sup of the norm restricted to |x| > A (A increasing);
    (iii) modulus: per t, sup of ||u(.+t) - u|| (|t| decreasing).
    Verdict (ii) looks at the largest A, verdict (iii) at the smallest |t|.
    """
    members = list(members)
    if not members:
        raise PreconditionError("fk_check needs a non-empty family")
    tolerances = tolerances or FkTolerances()
    A_list = [float(A) for A in A_list]
    if any(A_list[i] >= A_list[i + 1] for i in range(len(A_list) - 1)):
        raise PreconditionError("A list must be strictly increasing")
    t_list = [float(t) for t in t_list]
    if any(abs(t_list[i]) <= abs(t_list[i + 1]) for i in range(len(t_list) - 1)):
        raise PreconditionError("t list must be strictly decreasing in |t|")
    region = region or Cube((0.0,), 30.0)
    n = region.dim
    res = resolution or max(401, default_resolution(n))
    nodes = midpoint_nodes(region, res)
    cell_volume = (region.side / res) ** n
    wvals = w.evaluate(nodes)
    if np.any(wvals <= 0):
        raise PreconditionError("weight must be positive on the region")
    radii = np.sqrt(np.sum(nodes * nodes, axis=1))

    base_vals = [np.asarray(m.evaluate(nodes), dtype=float) for m in members]
    norms = {m.name: _weighted_norm_on_nodes(v, wvals, p, cell_volume)
             for m, v in zip(members, base_vals)}
    bounded_sup = max(norms.values())

    tail_norms = {}
    for A in A_list:
        if A >= region.half_side * np.sqrt(n):
            raise PreconditionError(f"tail radius {A} exceeds the region's reach")
        mask = radii > A
        tail_norms[A] = max(
            _weighted_norm_on_nodes(np.where(mask, v, 0.0), wvals, p, cell_volume)
            for v in base_vals
        )

    modulus = {}
    for t in t_list:
        shift = np.zeros(n)
        shift[0] = t
        sup = 0.0
        for m, v in zip(members, base_vals):
            vt = np.asarray(m.evaluate(nodes + shift), dtype=float)
            sup = max(sup, _weighted_norm_on_nodes(vt - v, wvals, p, cell_volume))
        modulus[t] = sup

    report = CompactnessReport(
        bounded_sup=bounded_sup,
        tail_norms=tail_norms,
        modulus=modulus,
        bounded_ok=bounded_sup <= tolerances.bound_cap,
        tail_ok=tail_norms[A_list[-1]] < tolerances.tail_rel * max(bounded_sup, 1e-300),
        modulus_ok=modulus[t_list[-1]] < tolerances.modulus_rel * max(bounded_sup, 1e-300),
        tolerances=tolerances,
        member_norms=norms,
        config={
            "region_center": list(region.center),
            "region_half_side": region.half_side,
            "resolution": res,
            "p": p,
            "A_list": A_list,
            "t_list": t_list,
            "family_size": len(members),
        },
    )
    if bounded_sup == 0.0:
        # the zero family passes everything with zeros
        report.tail_ok = True
        report.modulus_ok = True
    return report


# ---------------------------------------------------------------------------
# Tail decomposition (the phi1/phi2/phi3 split beyond radius A)


@dataclass
class TailReport:
    A: float
    xs: np.ndarray
    L1: np.ndarray
    L2: np.ndarray
    L3: np.ndarray
    commutator_abs: np.ndarray
    grad_near: float        # sup |grad b| over |xi| > A/2 (L1, L2 factor)
    grad_global: float      # sup |grad b| everywhere scanned (L3 factor)
    far_kernel_constant: float  # measured size constant of the phi3 kernel, O(1/A)

    def triangle_ok(self, slack: float = 1e-9) -> bool:
        lhs = self.L1 + self.L2 + self.L3
        return bool(np.all(lhs + slack * (1.0 + np.abs(lhs)) >= self.commutator_abs))

    def to_dict(self):
        return {
            "A": self.A,
            "xs": self.xs.tolist(),
            "L1": self.L1.tolist(),
            "L2": self.L2.tolist(),
            "L3": self.L3.tolist(),
            "commutator_abs": self.commutator_abs.tolist(),
            "grad_near": self.grad_near,
            "grad_global": self.grad_global,
            "far_kernel_constant": self.far_kernel_constant,
        }


def tail_decomposition(b: FunctionSpec, kernel: BilinearKernel,
                       f: SupportedFunction, g: SupportedFunction,
                       A: float, xs, resolution: int | None = None,
                       threads: int = 1) -> TailReport:
    """The three majorant integrals splitting the commutator beyond radius A:

        L_i(x) = G_i * int |x-y| |K_eta| phi_i(s) |f(y)| |g(z)| dy dz,

    with the gradient factored out per region (G_1 = G_2 = sup over
    |xi| > A/2, G_3 global), so L1+L2+L3 >= |commutator| pointwise.
    """
    if not A > 4:
        raise PreconditionError("tail_decomposition needs A > 4")
    if kernel.truncation_eta is None:
        raise PreconditionError("tail_decomposition works on the truncated kernel")
    xs = _as_points(xs, kernel.n)
    if np.any(np.sqrt(np.sum(xs * xs, axis=1)) <= A):
        raise PreconditionError("all evaluation points must satisfy |x| > A")
    resolution, ynodes, znodes, cw = _grids(f, g, resolution)
    fabs = np.abs(f.func.evaluate(ynodes))
    gabs = np.abs(g.func.evaluate(znodes))
    zero = np.zeros(1)
    xmax = float(np.max(np.abs(xs))) + 1.0

    half_near = (xmax - A / 2.0) / 2.0
    c_near = np.zeros(kernel.n)
    c_near[0] = A / 2.0 + half_near
    grad_near = max(
        gradient_sup(b, Cube(tuple(c_near), half_near)),
        gradient_sup(b, Cube(tuple(-c_near), half_near)),
    )
    grad_global = gradient_sup(b, Cube((0.0,) * kernel.n, xmax))

    def part(mode, grad):
        vals = _bilinear(kernel, xs, np.zeros(xs.shape[0]), ynodes, fabs, zero,
                         znodes, gabs, zero, cw, b_mode=0, absolute=True,
                         xy_factor=True, phi_mode=mode, A=A, threads=threads)
        return grad * vals

    L1 = part(1, grad_near)
    L2 = part(2, grad_near)
    L3 = part(3, grad_global)
    com = commutator(1, b, kernel, f, g, xs, resolution, threads=threads)
    return TailReport(
        A=A, xs=xs, L1=L1, L2=L2, L3=L3,
        commutator_abs=np.abs(com.values),
        grad_near=grad_near, grad_global=grad_global,
        far_kernel_constant=diagnostic_split_constants(kernel.n, A)["K3_size"],
    )


# ---------------------------------------------------------------------------
# Translation continuity (L4/L5)


@dataclass
class TranslationReport:
    """Per-shift suprema of the two translation majorants.

    L4 is |b(x)-b(x+t)| |T_eta(f,g)(x)|; L5 is the proof-style
    kernel-difference majorant ||grad b|| * |t| * int |K_eta(x,..) -
    K_eta(x+t,..)| |f| |g| (first order in t from the explicit factor and
    first order again from the kernel increment).  ``remainder_sup`` tracks
    the raw signed difference left after subtracting the L4 term from the
    commutator translation increment; its first-order behaviour in |t| is
    reported for transparency, not bounded by the second-order majorant.
    """

    eta: float
    t_list: list
    L4_sup: list
    L5_sup: list
    remainder_sup: list
    grad_bound: float

    @staticmethod
    def _slope(ts, vals):
        A = np.vstack([np.log(np.abs(ts)), np.ones(len(ts))]).T
        return float(np.linalg.lstsq(A, np.log(np.maximum(vals, 1e-300)), rcond=None)[0][0])

    @property
    def L4_slope(self) -> float:
        return self._slope(self.t_list, self.L4_sup)

    @property
    def L5_slope(self) -> float:
        return self._slope(self.t_list, self.L5_sup)

    @property
    def remainder_slope(self) -> float:
        return self._slope(self.t_list, self.remainder_sup)

    def to_dict(self):
        return {
            "eta": self.eta,
            "t_list": list(map(float, self.t_list)),
            "L4_sup": list(map(float, self.L4_sup)),
            "L5_sup": list(map(float, self.L5_sup)),
            "remainder_sup": list(map(float, self.remainder_sup)),
            "grad_bound": self.grad_bound,
            "L4_slope": self.L4_slope,
            "L5_slope": self.L5_slope,
            "remainder_slope": self.remainder_slope,
        }


def translation_continuity(b: FunctionSpec, kernel: BilinearKernel,
                           f: SupportedFunction, g: SupportedFunction,
                           t_list, xs, resolution: int | None = None,
                           threads: int = 1) -> TranslationReport:
    """Measure the translation majorants per shift t (|t| < eta/8 each)."""
    if kernel.truncation_eta is None:
        raise PreconditionError("translation_continuity works on the truncated kernel")
    eta = kernel.truncation_eta
    t_list = [float(t) for t in t_list]
    for t in t_list:
        if not 0 <= abs(t) < eta / 8.0:
            raise PreconditionError(f"|t| = {abs(t)} must be below eta/8 = {eta / 8.0}")
    xs = _as_points(xs, kernel.n)
    resolution, ynodes, znodes, cw = _grids(f, g, resolution)
    fvals = f.func.evaluate(ynodes)
    gvals = g.func.evaluate(znodes)
    fabs, gabs = np.abs(fvals), np.abs(gvals)

    T0 = apply_T(kernel, f, g, xs, resolution, threads=threads).values
    bx = b.evaluate(xs)
    grad = gradient_sup(b, Cube((0.0,) * kernel.n, float(np.max(np.abs(xs))) + 2.0))

    n = kernel.n
    e1 = np.zeros(n)
    e1[0] = 1.0
    L4s, L5s, rems = [], [], []
    # broadcast shapes for the kernel-difference integral
    Y = ynodes[:, None, :]
    Z = znodes[None, :, :]
    for t in t_list:
        shift = t * e1
        bxt = b.evaluate(xs + shift)
        L4 = np.abs(bx - bxt) * np.abs(T0)
        L4s.append(float(np.max(L4)))
        l5 = np.empty(xs.shape[0])
        for i, x in enumerate(xs):
            K0 = kernel.evaluate(x, Y, Z)
            Kt = kernel.evaluate(x + shift, Y, Z)
            l5[i] = grad * abs(t) * float(
                np.sum(np.abs(K0 - Kt) * fabs[:, None] * gabs[None, :]) * cw
            )
        L5s.append(float(np.max(l5)))
        u0 = commutator(1, b, kernel, f, g, xs, resolution, threads=threads).values
        ut = commutator(1, b, kernel, f, g, xs + shift, resolution, threads=threads).values
        rems.append(float(np.max(np.abs((u0 - ut) - (bx - bxt) * T0))))
    return TranslationReport(eta=eta, t_list=t_list, L4_sup=L4s, L5_sup=L5s,
                             remainder_sup=rems, grad_bound=grad)
