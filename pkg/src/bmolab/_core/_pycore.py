"""Pure-python (numpy) implementation of the hot bilinear quadrature loop.

Same contract as the compiled twin in ``_quadcore.pyx``; selected at import
time by :mod:`bmolab._core` when the extension is unavailable (or when
``BMOLAB_BACKEND=python`` is set).
"""

from __future__ import annotations

import numpy as np

from .._cutoffs import phi1, phi2, phi3

BACKEND_NAME = "python"

SHAPE_SMOOTH = 0
SHAPE_ODD = 1

TRUNC_NONE = 0
TRUNC_OUTER = 1  # multiply 1 - phi1(2s/eta)   (the truncated kernel K_eta)
TRUNC_INNER = 2  # multiply phi1(2s/eta)       (the difference K - K_eta)


def bilinear_sum(
    xs,
    bxs,
    ynodes,
    fvals,
    b_at_y,
    znodes,
    gvals,
    b_at_z,
    cell_weight,
    shape_kind,
    n_dim,
    eta,
    trunc_mode,
    phi_mode,
    A,
    b_mode,
    absolute,
    xy_factor,
):
    """Tensor-quadrature sums over the (y, z) grid for each evaluation point.

    Returns the per-point sums times ``cell_weight``; the term order is
    (y outer, z inner) with a plain accumulating sum.
    """
    xs = np.atleast_2d(np.asarray(xs, dtype=float))
    m, nd = xs.shape
    ynodes = np.asarray(ynodes, dtype=float).reshape(-1, nd)
    znodes = np.asarray(znodes, dtype=float).reshape(-1, nd)
    fvals = np.asarray(fvals, dtype=float)
    gvals = np.asarray(gvals, dtype=float)
    out = np.empty(m)
    power = n_dim + 1.0
    odd_pow = (2.0 * n_dim + 1.0) / 2.0
    for i in range(m):
        x = xs[i]
        u = x - ynodes
        v = x - znodes
        du = np.sqrt(np.sum(u * u, axis=1))
        dv = np.sqrt(np.sum(v * v, axis=1))
        qu = du * du
        qv = dv * dv
        s = du[:, None] + dv[None, :]
        q = qu[:, None] + qv[None, :]
        if shape_kind == SHAPE_SMOOTH:
            K = (1.0 + q) ** (-power)
        else:
            qs = np.where(q == 0.0, 1.0, q)
            K = np.where(q == 0.0, 0.0, u[:, 0][:, None] * qs ** (-odd_pow) / (1.0 + qs))
        if trunc_mode != TRUNC_NONE:
            cut = phi1(2.0 * s / eta)
            K = K * (cut if trunc_mode == TRUNC_INNER else (1.0 - cut))
        if phi_mode == 1:
            K = K * phi1(s)
        elif phi_mode == 2:
            K = K * phi2(s, A)
        elif phi_mode == 3:
            K = K * phi3(s, A)
        term = K * fvals[:, None] * gvals[None, :]
        if b_mode == 1:
            term = term * (bxs[i] - np.asarray(b_at_y, dtype=float))[:, None]
        elif b_mode == 2:
            term = term * (bxs[i] - np.asarray(b_at_z, dtype=float))[None, :]
        if xy_factor:
            term = term * du[:, None]
        if absolute:
            term = np.abs(term)
        out[i] = np.sum(term) * cell_weight
    return out
