"""Deliberately naive brute-force integrators, independent of the package's
quadrature paths: plain Python loops, scalar math, no numpy reductions.
Used to freeze expected values and for the oracle-equivalence gate."""

import math


def brute_average(f, lo, hi, res):
    """1-d midpoint average with a scalar accumulation loop."""
    h = (hi - lo) / res
    total = 0.0
    for k in range(res):
        total += float(f([[lo + (k + 0.5) * h]])[0])
    return total / res


def brute_average_nd(f, lo, hi, res, dim):
    """Tensor midpoint average via nested index loops."""
    h = [(hi[d] - lo[d]) / res for d in range(dim)]

    def rec(prefix):
        if len(prefix) == dim:
            return float(f([prefix])[0])
        d = len(prefix)
        total = 0.0
        for k in range(res):
            total += rec(prefix + [lo[d] + (k + 0.5) * h[d]])
        return total
    return rec([]) / res ** dim


def brute_mean_oscillation(f, lo, hi, res):
    h = (hi - lo) / res
    vals = [float(f([[lo + (k + 0.5) * h]])[0]) for k in range(res)]
    mean = sum(vals) / res
    return sum(abs(v - mean) for v in vals) / res


def brute_double_integral(integrand, ylo, yhi, zlo, zhi, res):
    """Nested double Riemann (midpoint) sum of integrand(y, z), scalars."""
    hy = (yhi - ylo) / res
    hz = (zhi - zlo) / res
    total = 0.0
    for iy in range(res):
        y = ylo + (iy + 0.5) * hy
        for iz in range(res):
            z = zlo + (iz + 0.5) * hz
            total += integrand(y, z)
    return total * hy * hz


def brute_weighted_lp(hfun, wfun, p, lo, hi, res):
    h = (hi - lo) / res
    total = 0.0
    for k in range(res):
        x = lo + (k + 0.5) * h
        total += abs(float(hfun([[x]])[0])) ** p * float(wfun([[x]])[0])
    return (total * h) ** (1.0 / p)


def brute_vector_ap(w1, w2, p1, p2, lo, hi, res):
    """The displayed three-average product on one interval, scalar loops."""
    p = 1.0 / (1.0 / p1 + 1.0 / p2)
    p1c = p1 / (p1 - 1.0)
    p2c = p2 / (p2 - 1.0)
    h = (hi - lo) / res
    s_w = s_1 = s_2 = 0.0
    for k in range(res):
        x = lo + (k + 0.5) * h
        a = float(w1([[x]])[0])
        b = float(w2([[x]])[0])
        s_w += a ** (p / p1) * b ** (p / p2)
        s_1 += a ** (1.0 - p1c)
        s_2 += b ** (1.0 - p2c)
    return (s_w / res) * (s_1 / res) ** (p / p1c) * (s_2 / res) ** (p / p2c)


def brute_maximal(f, g, x, r_grid, res=2048):
    """Dense scan over centered radii of avg|f| * avg|g|."""
    best = 0.0
    for r in r_grid:
        lo, hi = x - r, x + r
        h = (hi - lo) / res
        sf = sg = 0.0
        for k in range(res):
            y = lo + (k + 0.5) * h
            sf += abs(float(f([[y]])[0]))
            sg += abs(float(g([[y]])[0]))
        best = max(best, (sf / res) * (sg / res))
    return best


def logspace_slope(xs, ys):
    """Least-squares slope of log(y) against log(x), scalar arithmetic."""
    lx = [math.log(v) for v in xs]
    ly = [math.log(v) for v in ys]
    n = len(lx)
    mx = sum(lx) / n
    my = sum(ly) / n
    num = sum((a - mx) * (b - my) for a, b in zip(lx, ly))
    den = sum((a - mx) ** 2 for a in lx)
    return num / den
