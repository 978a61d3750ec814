"""Real-root isolation and complex root solving for low-degree polynomials.

The inverse-kinematics quartic is solved companion-free: real roots are
bracketed between the critical points of the derivative (found recursively,
ending in the quadratic formula) and polished with bisection-safeguarded
Newton steps.  This stays reliable near the multiple roots that occur on
singular boundaries, where eigenvalue-based solvers lose accuracy.

For root-multiplicity certificates the full complex root set of a quartic is
computed with a Durand-Kerner fixed-point iteration; near-multiple roots come
out as tight clusters (possibly conjugate pairs), which is exactly what the
certificates need to measure.
"""

from __future__ import annotations

import numpy as np

# Relative size below which a leading coefficient is treated as zero.
LEAD_TOL = 1e-12
# |p(c)| <= VALUE_TOL * (magnitude of evaluation) marks a critical point c
# as a multiple root.
VALUE_TOL = 1e-10


def polyval(coeffs, x):
    """Horner evaluation; `coeffs` in descending order."""
    y = 0.0
    for a in coeffs:
        y = y * x + a
    return y


def polyder(coeffs):
    n = len(coeffs) - 1
    return [coeffs[i] * (n - i) for i in range(n)]


def _eval_magnitude(coeffs, x):
    ax = abs(x)
    m = 0.0
    for a in coeffs:
        m = m * ax + abs(a)
    return m


def _refine_bracket(coeffs, dcoeffs, lo, hi, flo, fhi):
    """Newton with bisection fallback on a sign-change bracket."""
    x = 0.5 * (lo + hi)
    for _ in range(140):
        fx = polyval(coeffs, x)
        if fx == 0.0:
            return x
        if (fx < 0.0) == (flo < 0.0):
            lo, flo = x, fx
        else:
            hi, fhi = x, fx
        d = polyval(dcoeffs, x)
        if d != 0.0:
            xn = x - fx / d
            if not (lo < xn < hi):
                xn = 0.5 * (lo + hi)
        else:
            xn = 0.5 * (lo + hi)
        if xn == x:
            break
        x = xn
        if hi - lo <= 4e-16 * (abs(x) + 1e-30):
            break
    return x


def real_roots(coeffs, value_tol=VALUE_TOL, lead_tol=LEAD_TOL):
    """All real roots of a degree <= 4 polynomial, with multiplicities.

    Returns (roots, mults): ascending distinct roots and integer multiplicity
    estimates.  A critical point c of p with |p(c)| below the scaled value
    tolerance is reported as a multiple root (its multiplicity is one more
    than its multiplicity as a root of p').
    """
    c = [float(v) for v in coeffs]
    top = max(abs(v) for v in c) if c else 0.0
    if top == 0.0:
        raise ValueError("zero polynomial")
    c = [v / top for v in c]
    while len(c) > 1 and abs(c[0]) <= lead_tol:
        c = c[1:]
    n = len(c) - 1
    if n <= 0:
        return np.empty(0), np.empty(0, dtype=int)
    if n == 1:
        return np.array([-c[1] / c[0]]), np.array([1])
    if n == 2:
        a, b, cc = c
        disc = b * b - 4.0 * a * cc
        if disc < 0.0:
            return np.empty(0), np.empty(0, dtype=int)
        if disc == 0.0:
            return np.array([-b / (2.0 * a)]), np.array([2])
        q = -0.5 * (b + np.copysign(np.sqrt(disc), b))
        r1 = q / a
        r2 = cc / q if q != 0.0 else -b / a - r1
        lo, hi = (r1, r2) if r1 <= r2 else (r2, r1)
        return np.array([lo, hi]), np.array([1, 1])

    dc = polyder(c)
    crit, crit_mult = real_roots(dc, value_tol=value_tol, lead_tol=0.0)

    bound = 1.0 + max(abs(v) for v in c[1:]) / abs(c[0])
    nodes = [-bound] + [x for x in crit if -bound < x < bound] + [bound]
    node_mult = [0] + [int(m) for x, m in zip(crit, crit_mult) if -bound < x < bound] + [0]

    vals = [polyval(c, x) for x in nodes]
    # Zero out node values that are numerically roots.
    zeroed = [abs(v) <= value_tol * (_eval_magnitude(c, x) + 1e-300)
              for v, x in zip(vals, nodes)]

    roots: list[float] = []
    mults: list[int] = []
    for i in range(1, len(nodes) - 1):
        if zeroed[i]:
            roots.append(nodes[i])
            mults.append(node_mult[i] + 1)
    for i in range(len(nodes) - 1):
        if zeroed[i] or zeroed[i + 1]:
            continue
        if (vals[i] < 0.0) != (vals[i + 1] < 0.0):
            roots.append(_refine_bracket(c, dc, nodes[i], nodes[i + 1],
                                         vals[i], vals[i + 1]))
            mults.append(1)

    order = np.argsort(roots)
    return np.asarray(roots)[order], np.asarray(mults, dtype=int)[order]


def quartic_complex_roots(coeffs, max_iter=160, tol=1e-14):
    """All complex roots of a (near-)quartic via Durand-Kerner iteration.

    Degenerate leading coefficients reduce the degree; the returned array has
    one entry per finite root.  Multiple roots converge to clusters of radius
    about eps**(1/m), which is the resolution limit of any double-precision
    solver and sufficient for the cluster-width certificates.
    """
    c = np.asarray(coeffs, dtype=float)
    top = np.max(np.abs(c))
    if top == 0.0:
        raise ValueError("zero polynomial")
    c = c / top
    while len(c) > 1 and abs(c[0]) <= LEAD_TOL:
        c = c[1:]
    n = len(c) - 1
    if n <= 0:
        return np.empty(0, dtype=complex)
    mon = c / c[0]
    radius = 1.0 + np.max(np.abs(mon[1:]))
    seed = 0.4 + 0.9j
    z = radius * seed ** np.arange(1, n + 1)
    for _ in range(max_iter):
        pz = np.polyval(mon, z)
        denom = np.ones(n, dtype=complex)
        for k in range(n):
            diff = z[k] - np.delete(z, k)
            denom[k] = np.prod(diff)
        step = pz / denom
        z = z - step
        if np.max(np.abs(step)) < tol * (1.0 + np.max(np.abs(z))):
            break
    return z[np.argsort(z.real, kind="stable")]
