"""Independent oracles used only by the test suite.

These deliberately avoid the code paths they check: solution counts come from
sign changes of the trigonometric constraint (no tangent-half-angle quartic,
no root isolation), and zero-curve samples come from marching squares on a
determinant grid (no solved-form tracing).
"""

import numpy as np


def ik_count_bruteforce(d3, d4, r2, rho, z, n=100000):
    """Count inverse solutions by sign changes of the reach constraint in theta3."""
    t3 = np.linspace(-np.pi, np.pi, n, endpoint=False)
    c3, s3 = np.cos(t3), np.sin(t3)
    R2 = rho * rho + z * z
    K = R2 - 1 - d3 * d3 - d4 * d4 - r2 * r2
    G = ((K - 2 * d4 * (d3 * c3 + r2 * s3)) ** 2 + 4 * z * z
         - 4 * (d3 * d3 + 2 * d3 * d4 * c3 + d4 * d4 * c3 * c3))
    s = np.sign(G)
    wrapped = np.concatenate([s, s[:1]])
    return int(np.sum(wrapped[:-1] * wrapped[1:] < 0))


def marching_squares_points(f, xlim, ylim, n=256):
    """Midpoints of zero-crossing cell edges of f on a grid (crude contour)."""
    xs = np.linspace(*xlim, n)
    ys = np.linspace(*ylim, n)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    V = f(X, Y)
    pts = []
    sx = V[:-1, :] * V[1:, :] < 0
    ii, jj = np.nonzero(sx)
    for i, j in zip(ii, jj):
        t = V[i, j] / (V[i, j] - V[i + 1, j])
        pts.append((xs[i] + t * (xs[i + 1] - xs[i]), ys[j]))
    sy = V[:, :-1] * V[:, 1:] < 0
    ii, jj = np.nonzero(sy)
    for i, j in zip(ii, jj):
        t = V[i, j] / (V[i, j] - V[i, j + 1])
        pts.append((xs[i], ys[j] + t * (ys[j + 1] - ys[j])))
    return np.array(pts) if pts else np.empty((0, 2))
