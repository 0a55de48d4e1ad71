"""Smooth cutoff building blocks shared by the kernels module and the
pure-python quadrature backend.  The compiled backend carries C copies of
the same formulas; parity is pinned by tests."""

from __future__ import annotations

import numpy as np

__all__ = ["bump_profile", "smooth_step", "phi1", "phi2", "phi3"]


def bump_profile(u):
    """exp(-1/u) for u > 0, else 0 (the standard mollifier building block)."""
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    m = u > 0
    with np.errstate(over="ignore"):
        out[m] = np.exp(-1.0 / u[m])
    return out


def smooth_step(u):
    """C-infinity step: 0 for u <= 0, 1 for u >= 1, symmetric (S(1/2) = 1/2)."""
    u = np.asarray(u, dtype=float)
    a = bump_profile(u)
    b = bump_profile(1.0 - u)
    return a / (a + b)


def phi1(t):
    """1 on [0,1], 0 on [2,inf), smooth monotone transition on (1,2)."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("phi1 is defined on [0, inf)")
    return smooth_step(2.0 - t)


def phi2(t, A: float):
    """1 on [2, A/2], 0 on [0,1] and [A/2+1, inf); phi1+phi2+phi3 = 1."""
    t = np.asarray(t, dtype=float)
    return (1.0 - phi1(t)) * (1.0 - smooth_step(t - A / 2.0))


def phi3(t, A: float):
    """0 on [0, A/2], 1 on [A/2+1, inf)."""
    t = np.asarray(t, dtype=float)
    return (1.0 - phi1(t)) * smooth_step(t - A / 2.0)
