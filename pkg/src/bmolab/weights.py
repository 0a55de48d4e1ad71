"""Vector weights, the multi-cube weight constant, and weighted L^p norms."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError
from .expr import FunctionSpec, parse_function
from .funcspace import Cube, default_resolution, midpoint_nodes

__all__ = ["VectorWeight", "vector_ap_constant", "weighted_lp_norm", "power_weight"]


def power_weight(a: float, delta: float = 0.1, dim: int = 1) -> FunctionSpec:
    """Regularized power weight (delta^2 + |x|^2)^(a/2), a smooth stand-in
    for |x|^a that stays positive on grids."""
    r2 = "+".join(f"x{k + 1}*x{k + 1}" for k in range(dim))
    return parse_function(
        f"pow({delta * delta}+{r2},{a / 2.0})", dim=dim, name=f"power[a={a},delta={delta}]"
    )


@dataclass(frozen=True)
class VectorWeight:
    """A pair of positive weights with exponents p1, p2 in (1, 16]; the
    combined exponent p satisfies 1/p = 1/p1 + 1/p2 and lies in (1/2, inf)."""

    w1: FunctionSpec
    w2: FunctionSpec
    p1: float
    p2: float

    def __post_init__(self):
        for p in (self.p1, self.p2):
            if not (1.0 < p <= 16.0):
                raise PreconditionError("exponents p1, p2 must lie in (1, 16]")

    @property
    def p(self) -> float:
        return 1.0 / (1.0 / self.p1 + 1.0 / self.p2)

    @property
    def p1_conj(self) -> float:
        return self.p1 / (self.p1 - 1.0)

    @property
    def p2_conj(self) -> float:
        return self.p2 / (self.p2 - 1.0)

    def combined(self, points) -> np.ndarray:
        """w = w1^(p/p1) * w2^(p/p2), positive wherever w1 and w2 are."""
        a = self._positive(self.w1, points)
        b = self._positive(self.w2, points)
        p = self.p
        return a ** (p / self.p1) * b ** (p / self.p2)

    @staticmethod
    def _positive(w, points):
        vals = w.evaluate(points)
        if np.any(vals <= 0.0):
            raise PreconditionError(f"weight {w.label()} is not positive on the sample")
        return vals


def vector_ap_constant(vw: VectorWeight, cubes, resolution: int | None = None):
    """Max over the scan family of

        [avg_Q w] * {avg_Q w1^(1-p1')}^(p/p1') * {avg_Q w2^(1-p2')}^(p/p2'),

    a lower bound of the weight constant.  Returns (value, argmax cube).
    """
    cubes = list(cubes)
    if not cubes:
        raise PreconditionError("vector_ap_constant needs a non-empty scan family")
    p = vw.p
    best, best_q = -np.inf, None
    for q in cubes:
        res = resolution or default_resolution(q.dim)
        nodes = midpoint_nodes(q, res)
        w = vw.combined(nodes)
        w1 = VectorWeight._positive(vw.w1, nodes)
        w2 = VectorWeight._positive(vw.w2, nodes)
        val = (
            float(np.mean(w))
            * float(np.mean(w1 ** (1.0 - vw.p1_conj))) ** (p / vw.p1_conj)
            * float(np.mean(w2 ** (1.0 - vw.p2_conj))) ** (p / vw.p2_conj)
        )
        if val > best:
            best, best_q = val, q
    return best, best_q


def _values_on(h, points) -> np.ndarray:
    if isinstance(h, FunctionSpec):
        return h.evaluate(points)
    if callable(h):
        return np.asarray(h(points), dtype=float)
    raise PreconditionError("weighted_lp_norm needs a FunctionSpec or a callable")


def weighted_lp_norm(h, w: FunctionSpec, p: float, region: Cube,
                     resolution: int | None = None) -> float:
    """[ integral over the region of |h|^p w ]^(1/p) by midpoint quadrature."""
    if not p > 0:
        raise PreconditionError("p must be positive")
    res = resolution or default_resolution(region.dim)
    nodes = midpoint_nodes(region, res)
    wv = VectorWeight._positive(w, nodes)
    hv = np.abs(_values_on(h, nodes))
    integral = float(np.mean(hv ** p * wv)) * region.volume
    return integral ** (1.0 / p)
