# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled twin of ``_pycore.bilinear_sum``: the (y, z) tensor-quadrature
inner loop with the structured kernel family, smooth truncations, and the
phi split factors evaluated in C."""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp, fabs, sqrt

cnp.import_array()

BACKEND_NAME = "cython"

cdef enum:
    C_SHAPE_SMOOTH = 0
    C_SHAPE_ODD = 1
    C_TRUNC_NONE = 0
    C_TRUNC_INNER = 2

SHAPE_SMOOTH = C_SHAPE_SMOOTH
SHAPE_ODD = C_SHAPE_ODD

TRUNC_NONE = C_TRUNC_NONE
TRUNC_OUTER = 1
TRUNC_INNER = C_TRUNC_INNER


cdef inline double _bump_profile(double u) nogil:
    if u <= 0.0:
        return 0.0
    return exp(-1.0 / u)


cdef inline double _smooth_step(double u) nogil:
    cdef double a = _bump_profile(u)
    cdef double b = _bump_profile(1.0 - u)
    return a / (a + b)


cdef inline double _phi1(double t) nogil:
    if t <= 1.0:
        return 1.0
    if t >= 2.0:
        return 0.0
    return _smooth_step(2.0 - t)


cdef inline double _phi2(double t, double A) nogil:
    return (1.0 - _phi1(t)) * (1.0 - _smooth_step(t - 0.5 * A))


cdef inline double _phi3(double t, double A) nogil:
    return (1.0 - _phi1(t)) * _smooth_step(t - 0.5 * A)


cdef inline double _ipow(double base, int n) nogil:
    # n is small and positive (the dimension-derived exponents)
    cdef double out = base
    cdef int i
    for i in range(n - 1):
        out *= base
    return out


def bilinear_sum(
    object xs,
    object bxs,
    object ynodes,
    object fvals,
    object b_at_y,
    object znodes,
    object gvals,
    object b_at_z,
    double cell_weight,
    int shape_kind,
    int n_dim,
    double eta,
    int trunc_mode,
    int phi_mode,
    double A,
    int b_mode,
    bint absolute,
    bint xy_factor,
):
    xs_a = np.ascontiguousarray(np.atleast_2d(np.asarray(xs, dtype=np.float64)))
    cdef Py_ssize_t m = xs_a.shape[0]
    cdef Py_ssize_t nd = xs_a.shape[1]
    yn_a = np.ascontiguousarray(np.asarray(ynodes, dtype=np.float64).reshape(-1, nd))
    zn_a = np.ascontiguousarray(np.asarray(znodes, dtype=np.float64).reshape(-1, nd))
    f_a = np.ascontiguousarray(np.asarray(fvals, dtype=np.float64))
    g_a = np.ascontiguousarray(np.asarray(gvals, dtype=np.float64))
    bx_a = np.ascontiguousarray(np.asarray(bxs, dtype=np.float64).reshape(-1))
    by_a = np.ascontiguousarray(np.asarray(b_at_y, dtype=np.float64).reshape(-1))
    bz_a = np.ascontiguousarray(np.asarray(b_at_z, dtype=np.float64).reshape(-1))

    cdef double[:, ::1] X = xs_a
    cdef double[:, ::1] Y = yn_a
    cdef double[:, ::1] Z = zn_a
    cdef double[::1] F = f_a
    cdef double[::1] G = g_a
    cdef double[::1] BX = bx_a
    cdef double[::1] BY = by_a
    cdef double[::1] BZ = bz_a
    cdef Py_ssize_t ny = Y.shape[0]
    cdef Py_ssize_t nz = Z.shape[0]

    out_a = np.empty(m, dtype=np.float64)
    cdef double[::1] out = out_a

    # per-y precomputations, reused across the z loop
    du_a = np.empty(ny, dtype=np.float64)
    u1_a = np.empty(ny, dtype=np.float64)
    cdef double[::1] DU = du_a
    cdef double[::1] U1 = u1_a
    dv_a = np.empty(nz, dtype=np.float64)
    cdef double[::1] DV = dv_a

    cdef Py_ssize_t i, iy, iz, k
    cdef double acc, d, q, s, K, term, bfac_y, cut
    cdef int ipower = n_dim + 1
    cdef double qu, qv

    with nogil:
        for i in range(m):
            for iy in range(ny):
                q = 0.0
                for k in range(nd):
                    d = X[i, k] - Y[iy, k]
                    q += d * d
                DU[iy] = sqrt(q)
                U1[iy] = X[i, 0] - Y[iy, 0]
            for iz in range(nz):
                q = 0.0
                for k in range(nd):
                    d = X[i, k] - Z[iz, k]
                    q += d * d
                DV[iz] = sqrt(q)
            acc = 0.0
            for iy in range(ny):
                qu = DU[iy] * DU[iy]
                if b_mode == 1:
                    bfac_y = BX[i] - BY[iy]
                else:
                    bfac_y = 1.0
                for iz in range(nz):
                    qv = DV[iz] * DV[iz]
                    q = qu + qv
                    s = DU[iy] + DV[iz]
                    if shape_kind == C_SHAPE_SMOOTH:
                        K = 1.0 / _ipow(1.0 + q, ipower)
                    else:
                        if q == 0.0:
                            K = 0.0
                        else:
                            # q^((2n+1)/2) = q^n * sqrt(q)
                            K = U1[iy] / (_ipow(q, n_dim) * sqrt(q) * (1.0 + q))
                    if trunc_mode != C_TRUNC_NONE:
                        cut = _phi1(2.0 * s / eta)
                        if trunc_mode == C_TRUNC_INNER:
                            K *= cut
                        else:
                            K *= 1.0 - cut
                    if phi_mode == 1:
                        K *= _phi1(s)
                    elif phi_mode == 2:
                        K *= _phi2(s, A)
                    elif phi_mode == 3:
                        K *= _phi3(s, A)
                    term = K * F[iy] * G[iz]
                    if b_mode == 1:
                        term *= bfac_y
                    elif b_mode == 2:
                        term *= BX[i] - BZ[iz]
                    if xy_factor:
                        term *= DU[iy]
                    if absolute:
                        term = fabs(term)
                    acc += term
            out[i] = acc * cell_weight
    return out_a
