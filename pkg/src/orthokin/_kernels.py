"""Scalar hot kernels, jitted when numba is importable.

These are the per-cell inner loops of the workspace census and the polyline
crossing search.  A pure-numpy vectorized twin of each lives in _vectorized;
the active implementation is chosen by the ORTHOKIN_BACKEND env flag (see
_backend).  The code here stays numba-compatible: plain scalars, preallocated
arrays, no Python objects.
"""

from __future__ import annotations

import math

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def wrap(f):
            return f

        return wrap

LEAD_EPS = 1e-12
VALUE_EPS = 1e-9


@njit(cache=True)
def _eval4(a4, a3, a2, a1, a0, x):
    return (((a4 * x + a3) * x + a2) * x + a1) * x + a0


@njit(cache=True)
def _mag4(a4, a3, a2, a1, a0, x):
    ax = abs(x)
    return (((abs(a4) * ax + abs(a3)) * ax + abs(a2)) * ax + abs(a1)) * ax + abs(a0)


@njit(cache=True)
def _bisect4(a4, a3, a2, a1, a0, lo, hi, flo):
    for _ in range(90):
        mid = 0.5 * (lo + hi)
        fm = _eval4(a4, a3, a2, a1, a0, mid)
        if (fm < 0.0) == (flo < 0.0):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@njit(cache=True)
def _count_parity(values, zeroed, nnodes):
    count = 0
    last = 0.0
    for k in range(nnodes):
        if zeroed[k]:
            count += 2
            continue
        v = values[k]
        if last != 0.0 and (v < 0.0) != (last < 0.0):
            count += 1
        last = v
    if count % 2 == 1:
        count += 1
    if count > 4:
        count = 4
    return count


@njit(cache=True)
def _count_roots_cubic(b3, b2, b1, b0, vtol):
    """Real roots (with multiplicity parity) of a cubic with |b3| bounded away from 0."""
    bound = 1.0 + max(abs(b2), abs(b1), abs(b0)) / abs(b3)
    qa, qb, qc = 3.0 * b3, 2.0 * b2, b1
    disc = qb * qb - 4.0 * qa * qc
    nodes = np.empty(4)
    nn = 0
    nodes[nn] = -bound
    nn += 1
    if disc > 0.0:
        s = math.sqrt(disc)
        r1 = (-qb - s) / (2.0 * qa)
        r2 = (-qb + s) / (2.0 * qa)
        lo = min(r1, r2)
        hi = max(r1, r2)
        if -bound < lo < bound:
            nodes[nn] = lo
            nn += 1
        if -bound < hi < bound:
            nodes[nn] = hi
            nn += 1
    nodes[nn] = bound
    nn += 1
    values = np.empty(4)
    zeroed = np.empty(4, np.bool_)
    for k in range(nn):
        x = nodes[k]
        v = (((0.0 * x + b3) * x + b2) * x + b1) * x + b0
        values[k] = v
        m = ((abs(b3) * abs(x) + abs(b2)) * abs(x) + abs(b1)) * abs(x) + abs(b0)
        zeroed[k] = (k != 0 and k != nn - 1 and abs(v) <= vtol * (m + 1e-300))
    cnt = 0
    last = 0.0
    for k in range(nn):
        if zeroed[k]:
            cnt += 2
            continue
        v = values[k]
        if last != 0.0 and (v < 0.0) != (last < 0.0):
            cnt += 1
        last = v
    if cnt % 2 == 0:
        cnt += 1  # odd degree has odd real-root count with multiplicity
    if cnt > 3:
        cnt = 3
    return cnt


@njit(cache=True)
def _count_roots_quartic(a4, a3, a2, a1, a0, vtol):
    """Real roots with multiplicity (even, clamped to 0/2/4) of a quartic."""
    bound = 1.0 + max(abs(a3), abs(a2), abs(a1), abs(a0)) / abs(a4)
    # critical points: real roots of the cubic derivative
    d3c, d2c, d1c, d0c = 4.0 * a4, 3.0 * a3, 2.0 * a2, a1
    qa, qb, qc = 3.0 * d3c, 2.0 * d2c, d1c
    disc = qb * qb - 4.0 * qa * qc
    inner = np.empty(2)
    ni = 0
    if disc > 0.0:
        s = math.sqrt(disc)
        r1 = (-qb - s) / (2.0 * qa)
        r2 = (-qb + s) / (2.0 * qa)
        inner[0] = min(r1, r2)
        inner[1] = max(r1, r2)
        ni = 2
    elif disc == 0.0:
        inner[0] = -qb / (2.0 * qa)
        ni = 1

    dn = np.empty(4)
    nd = 0
    dn[nd] = -bound
    nd += 1
    for k in range(ni):
        if -bound < inner[k] < bound:
            dn[nd] = inner[k]
            nd += 1
    dn[nd] = bound
    nd += 1

    crit = np.empty(3)
    nc = 0
    fprev = _eval4(0.0, d3c, d2c, d1c, d0c, dn[0])
    for k in range(nd - 1):
        fnext = _eval4(0.0, d3c, d2c, d1c, d0c, dn[k + 1])
        if (fprev < 0.0) != (fnext < 0.0):
            crit[nc] = _bisect4(0.0, d3c, d2c, d1c, d0c, dn[k], dn[k + 1], fprev)
            nc += 1
        fprev = fnext

    nodes = np.empty(5)
    nn = 0
    nodes[nn] = -bound
    nn += 1
    for k in range(nc):
        nodes[nn] = crit[k]
        nn += 1
    nodes[nn] = bound
    nn += 1

    values = np.empty(5)
    zeroed = np.empty(5, np.bool_)
    for k in range(nn):
        x = nodes[k]
        values[k] = _eval4(a4, a3, a2, a1, a0, x)
        zeroed[k] = (k != 0 and k != nn - 1
                     and abs(values[k]) <= vtol * (_mag4(a4, a3, a2, a1, a0, x) + 1e-300))
    return _count_parity(values, zeroed, nn)


@njit(cache=True)
def census_counts(rho_ax, z_ax, d3, d4, r2, vtol):
    """Solution-count grid (0/2/4) over a (rho, z) sampling of the half section."""
    n1 = rho_ax.size
    n2 = z_ax.size
    out = np.zeros((n1, n2), np.int8)
    base = -1.0 - d3 * d3 - d4 * d4 - r2 * r2
    for i in range(n1):
        rho = rho_ax[i]
        for j in range(n2):
            z = z_ax[j]
            K = rho * rho + z * z + base
            w2 = K + 2.0 * d3 * d4
            w1 = -4.0 * d4 * r2
            w0 = K - 2.0 * d3 * d4
            zd = 4.0 * (z * z - d3 * d3)
            a4 = w2 * w2 + zd + 8.0 * d3 * d4 - 4.0 * d4 * d4
            a3 = 2.0 * w2 * w1
            a2 = w1 * w1 + 2.0 * w2 * w0 + 2.0 * zd + 8.0 * d4 * d4
            a1 = 2.0 * w1 * w0
            a0 = w0 * w0 + zd - 8.0 * d3 * d4 - 4.0 * d4 * d4
            m = max(abs(a4), abs(a3), abs(a2), abs(a1), abs(a0))
            if m == 0.0:
                out[i, j] = 0
                continue
            a4 /= m
            a3 /= m
            a2 /= m
            a1 /= m
            a0 /= m
            if abs(a4) <= LEAD_EPS:
                # theta3 = pi is a solution; remaining candidates solve the cubic
                cnt = 1 + _count_roots_cubic(a3, a2, a1, a0, vtol)
                if cnt > 4:
                    cnt = 4
            else:
                cnt = _count_roots_quartic(a4, a3, a2, a1, a0, vtol)
            out[i, j] = cnt
    return out


@njit(cache=True)
def segment_crossings(x0, y0, x1, y1, bid, idx, nseg, cap):
    """Transversal crossings among polyline segments, excluding neighbours.

    Segments i of branch b are adjacent to i+-1 (mod nseg[b]); those pairs and
    parallel pairs are skipped.  Returns the number found plus index/point
    arrays of size cap (caller slices).
    """
    n = x0.size
    oi = np.empty(cap, np.int64)
    oj = np.empty(cap, np.int64)
    ox = np.empty(cap)
    oy = np.empty(cap)
    m = 0
    for i in range(n):
        axl = min(x0[i], x1[i])
        axh = max(x0[i], x1[i])
        ayl = min(y0[i], y1[i])
        ayh = max(y0[i], y1[i])
        d1x = x1[i] - x0[i]
        d1y = y1[i] - y0[i]
        for j in range(i + 1, n):
            if bid[i] == bid[j]:
                d = idx[j] - idx[i]
                if d < 0:
                    d = -d
                if d <= 1 or d == nseg[bid[i]] - 1:
                    continue
            if min(x0[j], x1[j]) > axh or max(x0[j], x1[j]) < axl:
                continue
            if min(y0[j], y1[j]) > ayh or max(y0[j], y1[j]) < ayl:
                continue
            d2x = x1[j] - x0[j]
            d2y = y1[j] - y0[j]
            denom = d1x * d2y - d1y * d2x
            if denom == 0.0:
                continue
            rx = x0[j] - x0[i]
            ry = y0[j] - y0[i]
            t = (rx * d2y - ry * d2x) / denom
            s = (rx * d1y - ry * d1x) / denom
            if 0.0 <= t < 1.0 and 0.0 <= s < 1.0:
                if m < cap:
                    oi[m] = i
                    oj[m] = j
                    ox[m] = x0[i] + t * d1x
                    oy[m] = y0[i] + t * d1y
                m += 1
    return m, oi, oj, ox, oy
