"""Pure-numpy vectorized twins of the scalar hot kernels.

Same contracts as _kernels.census_counts / segment_crossings, implemented as
whole-grid array operations (masked fixed-iteration bisection instead of
per-cell loops) so they stay fast without numba.
"""

from __future__ import annotations

import numpy as np

from ._kernels import LEAD_EPS

_BISECT_ITERS = 90


def _masked_bisect(coeffs, lo, hi, flo, active):
    """Vectorized bisection per row of `coeffs` (descending, shape (k, m))."""
    lo = lo.copy()
    hi = hi.copy()
    for _ in range(_BISECT_ITERS):
        mid = 0.5 * (lo + hi)
        fm = np.zeros_like(mid)
        for c in coeffs:
            fm = fm * mid + c
        same = (fm < 0.0) == (flo < 0.0)
        lo = np.where(active & same, mid, lo)
        hi = np.where(active & ~same, mid, hi)
    return 0.5 * (lo + hi)


def _poly(coeffs, x):
    y = np.zeros_like(x)
    for c in coeffs:
        y = y * x + c
    return y


def _polymag(coeffs, x):
    ax = np.abs(x)
    y = np.zeros_like(ax)
    for c in coeffs:
        y = y * ax + np.abs(c)
    return y


def _count_quartic_grid(a4, a3, a2, a1, a0, vtol):
    """Vectorized root count (0/2/4) for non-degenerate quartics."""
    bound = 1.0 + np.maximum.reduce([np.abs(a3), np.abs(a2), np.abs(a1), np.abs(a0)]) / np.abs(a4)
    d = [4.0 * a4, 3.0 * a3, 2.0 * a2, a1]
    qa, qb, qc = 3.0 * d[0], 2.0 * d[1], d[2]
    disc = qb * qb - 4.0 * qa * qc
    has_q = disc > 0.0
    sq = np.sqrt(np.where(has_q, disc, 0.0))
    r1 = (-qb - sq) / (2.0 * qa)
    r2 = (-qb + sq) / (2.0 * qa)
    q_lo = np.where(has_q, np.minimum(r1, r2), -bound)
    q_hi = np.where(has_q, np.maximum(r1, r2), -bound)
    q_lo = np.clip(q_lo, -bound, bound)
    q_hi = np.clip(q_hi, -bound, bound)

    # derivative roots bracketed by [-B, q_lo, q_hi, B]
    dnodes = np.stack([-bound, q_lo, q_hi, bound])
    dvals = _poly(d, dnodes)
    crit = np.full((3,) + a4.shape, np.nan)
    for k in range(3):
        lo, hi = dnodes[k], dnodes[k + 1]
        flo, fhi = dvals[k], dvals[k + 1]
        act = (hi > lo) & ((flo < 0.0) != (fhi < 0.0))
        root = _masked_bisect(d, lo, hi, flo, act)
        crit[k] = np.where(act, root, np.nan)

    crit_sorted = np.sort(np.where(np.isnan(crit), bound, crit), axis=0)
    nodes = np.concatenate([
        -bound[None], crit_sorted, bound[None]], axis=0)
    coeffs = [a4, a3, a2, a1, a0]
    vals = _poly(coeffs, nodes)
    mags = _polymag(coeffs, nodes)
    interior = np.zeros(nodes.shape, dtype=bool)
    interior[1:-1] = nodes[1:-1] < bound  # padded slots collapse onto +B
    zeroed = interior & (np.abs(vals) <= vtol * (mags + 1e-300))

    # Collapsed padding nodes (== +B) repeat the final value: no spurious flip.
    count = 2 * zeroed.sum(axis=0)
    last = vals[0]
    for k in range(1, nodes.shape[0]):
        flip = ~zeroed[k] & ((vals[k] < 0.0) != (last < 0.0))
        count = count + flip.astype(np.int64)
        last = np.where(zeroed[k], last, vals[k])
    count = count + (count % 2)
    return np.minimum(count, 4)


def census_counts(rho_ax, z_ax, d3, d4, r2, vtol):
    """Vectorized solution-count grid; follows _kernels.census_counts."""
    rho = rho_ax[:, None]
    z = z_ax[None, :]
    K = rho * rho + z * z - 1.0 - d3 * d3 - d4 * d4 - r2 * r2
    w2 = K + 2.0 * d3 * d4
    w1 = -4.0 * d4 * r2 * np.ones_like(K)
    w0 = K - 2.0 * d3 * d4
    zd = 4.0 * (z * z - d3 * d3) * np.ones_like(K)
    a4 = w2 * w2 + zd + 8.0 * d3 * d4 - 4.0 * d4 * d4
    a3 = 2.0 * w2 * w1
    a2 = w1 * w1 + 2.0 * w2 * w0 + 2.0 * zd + 8.0 * d4 * d4
    a1 = 2.0 * w1 * w0
    a0 = w0 * w0 + zd - 8.0 * d3 * d4 - 4.0 * d4 * d4
    m = np.maximum.reduce([np.abs(a4), np.abs(a3), np.abs(a2), np.abs(a1), np.abs(a0)])
    m = np.where(m == 0.0, 1.0, m)
    a4, a3, a2, a1, a0 = a4 / m, a3 / m, a2 / m, a1 / m, a0 / m

    out = np.zeros(a4.shape, dtype=np.int8)
    good = np.abs(a4) > LEAD_EPS
    if np.any(good):
        # clamp degenerate rows to a harmless quartic; results overwritten below
        a4g = np.where(good, a4, 1.0)
        counts = _count_quartic_grid(a4g, a3, a2, a1, a0, vtol)
        out[good] = counts[good].astype(np.int8)
    if np.any(~good):
        from ._kernels import _count_roots_cubic

        ii, jj = np.nonzero(~good)
        for i, j in zip(ii, jj):
            cnt = 1 + _count_roots_cubic(a3[i, j], a2[i, j], a1[i, j], a0[i, j], vtol)
            out[i, j] = min(cnt, 4)
    return out


def segment_crossings(x0, y0, x1, y1, bid, idx, nseg, cap):
    """Chunked all-pairs crossing search; same output contract as the kernel."""
    n = x0.size
    axl = np.minimum(x0, x1)
    axh = np.maximum(x0, x1)
    ayl = np.minimum(y0, y1)
    ayh = np.maximum(y0, y1)
    d1x, d1y = x1 - x0, y1 - y0
    oi, oj, ox, oy = [], [], [], []
    chunk = max(1, 2_000_000 // max(n, 1))
    for s in range(0, n, chunk):
        e = min(n, s + chunk)
        rows = np.arange(s, e)[:, None]
        cols = np.arange(n)[None, :]
        upper = cols > rows
        same = bid[s:e][:, None] == bid[None, :]
        d = np.abs(idx[s:e][:, None] - idx[None, :])
        adj = same & ((d <= 1) | (d == nseg[bid[s:e]][:, None] - 1))
        box = ((axl[None, :] <= axh[s:e][:, None]) & (axh[None, :] >= axl[s:e][:, None])
               & (ayl[None, :] <= ayh[s:e][:, None]) & (ayh[None, :] >= ayl[s:e][:, None]))
        cand = upper & ~adj & box
        ri, rj = np.nonzero(cand)
        if ri.size == 0:
            continue
        i = ri + s
        j = rj
        denom = d1x[i] * d1y[j] - d1y[i] * d1x[j]
        ok = denom != 0.0
        i, j, denom = i[ok], j[ok], denom[ok]
        rx = x0[j] - x0[i]
        ry = y0[j] - y0[i]
        t = (rx * d1y[j] - ry * d1x[j]) / denom
        u = (rx * d1y[i] - ry * d1x[i]) / denom
        hit = (t >= 0.0) & (t < 1.0) & (u >= 0.0) & (u < 1.0)
        for a, b, tt in zip(i[hit], j[hit], t[hit]):
            oi.append(int(a))
            oj.append(int(b))
            ox.append(float(x0[a] + tt * d1x[a]))
            oy.append(float(y0[a] + tt * d1y[a]))
    m = len(oi)
    pad = max(cap, m)
    out_i = np.zeros(pad, np.int64)
    out_j = np.zeros(pad, np.int64)
    out_x = np.zeros(pad)
    out_y = np.zeros(pad)
    out_i[:m] = oi
    out_j[:m] = oj
    out_x[:m] = ox
    out_y[:m] = oy
    return m, out_i, out_j, out_x, out_y
