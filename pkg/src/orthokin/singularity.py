"""Singularity sets on the joint torus and their workspace images.

The determinant factors as u * f with u = d3 + c3*d4 and
f = s3 + c2*(s3*d3 - c3*r2).  The f = 0 set solves to
c2 = -s3/(s3*d3 - c3*r2) =: c2*(theta3) and is admissible where
|c2*| <= 1, i.e. where the product

    f1 * f2 <= 0,   f1 = s3*(1 - d3) + c3*r2,   f2 = s3*(1 + d3) - c3*r2

is nonpositive.  f1 and f2 are sinusoids whose zeros are closed-form atan2
expressions, so the circle always splits into exactly two admissible arcs
(one containing theta3 = 0, one containing theta3 = pi); each carries a
closed loop assembled from the two arccos branches, joined at the arc ends
where |c2*| = 1.  The loop through theta3 = 0 holds the maximum-reach point
and maps to the external boundary; the other maps to the internal boundary.

The u = 0 set contributes horizontal lines theta3 = +/-arccos(-d3/d4) when
d3 <= d4; each line maps to a single workspace point on the z = 0 axis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .errors import AspectInstabilityError, InvalidParameterError
from .kinematics import (
    CrossSectionPoint,
    DesignParams,
    jacobian_det_arrays,
    reduced_fk_arrays,
    wrap_angle,
)

LINE_GENERIC_TOL = 1e-9
CROSSING_TOL = 1e-9


@dataclass
class SingularBranch:
    """One connected singular set: a traced loop or a horizontal line."""

    kind: str  # "S2_curve" | "S1_line_plus" | "S1_line_minus"
    joint_polyline: np.ndarray      # (N, 2) columns theta2, theta3
    workspace_polyline: np.ndarray  # (N, 2) columns rho, z
    nongeneric: bool = False
    theta3_interval: tuple | None = None  # admissible arc for S2 loops
    is_external: bool = False

    # Per-vertex tracing metadata for refinement (S2 loops only).
    vertex_theta3: np.ndarray | None = None
    vertex_sigma: np.ndarray | None = None

    @property
    def closed(self):
        return self.kind == "S2_curve"


@dataclass(frozen=True)
class IsolatedPoint:
    point: CrossSectionPoint
    theta3: float
    coincides_with_node: bool


@dataclass
class AspectCount:
    count: int
    component_seeds: list = field(default_factory=list)  # one (theta2, theta3) per component
    threshold: float = 0.0


def c2_star(theta3, d3, r2):
    """Solved curve form c2 = -s3/(s3*d3 - c3*r2); inf where the denominator dies."""
    s3, c3 = np.sin(theta3), np.cos(theta3)
    den = s3 * d3 - c3 * r2
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(den != 0.0, -s3 / den, np.inf)


def admissible_intervals(d3, r2):
    """The two theta3 arcs carrying the curve, as (lo, hi) with hi > lo.

    Arc ends are the closed-form zeros of f1 and f2; the arc containing
    theta3 = 0 comes first.  hi may exceed pi (unwrapped representation).
    """
    psi1 = math.atan2(r2, 1.0 - d3)
    psi2 = math.atan2(r2, 1.0 + d3)
    zeros = sorted(wrap_angle(z) for z in (-psi1, math.pi - psi1, psi2, psi2 - math.pi))
    arcs = []
    for i in range(4):
        lo = zeros[i]
        hi = zeros[(i + 1) % 4] + (2.0 * math.pi if i == 3 else 0.0)
        mid = 0.5 * (lo + hi)
        v = c2_star(mid, d3, r2)
        if np.isfinite(v) and abs(v) <= 1.0:
            arcs.append((lo, hi))
    if len(arcs) != 2:
        raise InvalidParameterError(
            f"expected two admissible arcs, found {len(arcs)} at (d3={d3}, r2={r2})")
    # Order: arc containing 0 first (external loop).
    arcs.sort(key=lambda ab: not (ab[0] < 0.0 < ab[1]))
    return arcs


def _contains(lo, hi, x):
    """Is angle x inside (lo, hi) on the circle (interval may be unwrapped)?"""
    for cand in (x, x + 2.0 * math.pi, x - 2.0 * math.pi):
        if lo < cand < hi:
            return cand
    return None


def _arc_samples(lo, hi, n_total, extra=()):
    """Graded sample of (lo, hi): uniform interior + geometric endpoint refinement."""
    width = hi - lo
    n = max(24, int(round(n_total * width / (2.0 * math.pi))))
    ts = list(np.linspace(lo, hi, n))
    for frac in (1e-7, 1e-6, 1e-5, 1e-4, 1e-3, 4e-3):
        ts.append(lo + frac * width)
        ts.append(hi - frac * width)
    for x in extra:
        c = _contains(lo, hi, x)
        if c is not None:
            for off in (-1e-4, -1e-5, 0.0, 1e-5, 1e-4):
                if lo < c + off * width < hi:
                    ts.append(c + off * width)
    return np.unique(np.asarray(ts))


def trace_s2(p: DesignParams, n_samples: int = 2048):
    """Trace the curve component(s) of the singular set as closed polylines.

    Each admissible theta3 arc yields one loop: the +arccos branch swept
    forward, the -arccos branch swept back, joined at the arc ends where
    |c2*| = 1 (theta2 = 0 or pi).  Workspace images are attached via the
    reduced map.
    """
    if n_samples < 256:
        raise InvalidParameterError(f"n_samples must be >= 256, got {n_samples}")
    d3, d4, r2 = p.d3, p.d4, p.r2
    extra = []
    if d3 < d4:
        t3u = math.acos(-d3 / d4)
        extra = [t3u, -t3u]
    branches = []
    for lo, hi in admissible_intervals(d3, r2):
        ts = _arc_samples(lo, hi, n_samples, extra)
        c2v = np.asarray(c2_star(ts, d3, r2), dtype=float)
        # Arc ends sit exactly on |c2*| = 1; clamp interior rounding spill.
        c2v = np.clip(c2v, -1.0, 1.0)
        c2v[0] = np.sign(c2v[1]) if abs(c2v[0]) > 0.5 else c2v[0]
        c2v[-1] = np.sign(c2v[-2]) if abs(c2v[-1]) > 0.5 else c2v[-1]
        th2 = np.arccos(c2v)

        m = len(ts)
        theta3 = np.concatenate([ts, ts[-2:0:-1]])
        sigma = np.concatenate([np.ones(m), -np.ones(m - 2)])
        theta2 = np.concatenate([th2, -th2[-2:0:-1]])
        joint = np.column_stack([wrap_angle(theta2), wrap_angle(theta3)])
        rho, z = reduced_fk_arrays(p, theta2, theta3)
        work = np.column_stack([rho, z])
        contains_zero = lo < 0.0 < hi
        branches.append(SingularBranch(
            kind="S2_curve",
            joint_polyline=joint,
            workspace_polyline=work,
            theta3_interval=(lo, hi),
            is_external=contains_zero,
            vertex_theta3=theta3,
            vertex_sigma=sigma,
        ))
    return branches


def branch_point(p: DesignParams, branch: SingularBranch, theta3, sigma):
    """Evaluate the loop point at parameter theta3 on branch side sigma."""
    v = float(np.clip(c2_star(theta3, p.d3, p.r2), -1.0, 1.0))
    th2 = sigma * math.acos(v)
    rho, z = reduced_fk_arrays(p, th2, theta3)
    return float(rho), float(z)


def s1_lines(p: DesignParams, generic_tol: float = LINE_GENERIC_TOL):
    """Horizontal singular lines theta3 = +/-arccos(-d3/d4) (0, 1, or 2)."""
    d3, d4 = p.d3, p.d4
    scale = max(d3, d4)
    th2 = np.linspace(-math.pi, math.pi, 65)
    if d3 - d4 > generic_tol * scale:
        return []
    if abs(d3 - d4) <= generic_tol * scale:
        rho = math.hypot(1.0, p.r2)  # s3 = 0 at theta3 = pi
        joint = np.column_stack([th2, np.full_like(th2, math.pi)])
        work = np.tile([rho, 0.0], (len(th2), 1))
        return [SingularBranch("S1_line_plus", joint, work, nongeneric=True)]
    out = []
    t3 = math.acos(-d3 / d4)
    for kind, t in (("S1_line_plus", t3), ("S1_line_minus", -t3)):
        v = math.sin(t) * d4 + p.r2
        rho = math.hypot(1.0, v)
        joint = np.column_stack([th2, np.full_like(th2, t)])
        work = np.tile([rho, 0.0], (len(th2), 1))
        out.append(SingularBranch(kind, joint, work))
    return out


def line_curve_crossings(p: DesignParams, theta3_line: float, tol: float = CROSSING_TOL):
    """Joint-space intersections of a horizontal line with the curve set.

    Returns (count, theta2 values): 0, 1 (tangency), or 2; the transition
    count jumps exactly at the tangency surfaces.
    """
    v = float(c2_star(theta3_line, p.d3, p.r2))
    if not np.isfinite(v) or abs(v) > 1.0 + tol:
        return 0, []
    if abs(v) >= 1.0 - tol:
        return 1, [math.copysign(math.acos(max(-1.0, min(1.0, v))), 1.0)]
    a = math.acos(v)
    return 2, [a, -a]


def isolated_points(p: DesignParams, generic_tol: float = LINE_GENERIC_TOL):
    """Workspace images of the horizontal lines (z = 0 axis points).

    coincides_with_node is the exact line-curve crossing test: the image sits
    on a boundary self-intersection iff the line actually crosses the curve.
    """
    pts = []
    for line in s1_lines(p, generic_tol):
        t3 = float(line.joint_polyline[0, 1])
        n, _ = line_curve_crossings(p, t3)
        pts.append(IsolatedPoint(
            point=CrossSectionPoint(float(line.workspace_polyline[0, 0]), 0.0),
            theta3=t3,
            coincides_with_node=(n == 2),
        ))
    return pts


def _torus_components(free):
    """4-connected components of a boolean grid with wraparound on both axes."""
    labels, n = ndimage.label(free)
    if n == 0:
        return labels, 0
    parent = list(range(n + 1))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[rb] = ra

    for a, b in ((labels[0, :], labels[-1, :]), (labels[:, 0], labels[:, -1])):
        both = (a > 0) & (b > 0)
        for x, y in zip(a[both], b[both]):
            union(int(x), int(y))
    roots = {find(i) for i in range(1, n + 1)}
    remap = {r: k + 1 for k, r in enumerate(sorted(roots))}
    flat = np.array([0] + [remap[find(i)] for i in range(1, n + 1)])
    return flat[labels], len(roots)


def _sign_grid(values, tol):
    s = np.sign(values)
    s[np.abs(values) < tol] = 0.0
    return s


def _aspect_count_once(p: DesignParams, grid: int):
    ax = -math.pi + 2.0 * math.pi * np.arange(grid + 1) / grid
    T2, T3 = np.meshgrid(ax, ax, indexing="ij")
    # Wall test runs on the two determinant factors separately: where the
    # line (u = 0) and the curve (f = 0) cross inside one cell, their product
    # flips sign twice and a det-only corner test would miss the wall.
    c3, s3 = np.cos(T3), np.sin(T3)
    u = p.d3 + c3 * p.d4
    f = s3 + np.cos(T2) * (s3 * p.d3 - c3 * p.r2)
    det = u * f
    free = np.ones((grid, grid), dtype=bool)
    for g, tol in ((u, 1e-12 * p.d4), (f, 1e-12 * (1.0 + p.d3 + p.r2))):
        sgn = _sign_grid(g, tol)
        c = sgn[:-1, :-1]
        free &= ((c == sgn[1:, :-1]) & (c == sgn[:-1, 1:])
                 & (c == sgn[1:, 1:]) & (c != 0.0))
    labels, count = _torus_components(free)

    centers = ax[:-1] + math.pi / grid
    C2, C3 = np.meshgrid(centers, centers, indexing="ij")
    cdet = np.abs(jacobian_det_arrays(p, C2, C3))
    seeds = []
    for k in range(1, count + 1):
        mask = labels == k
        vals = np.where(mask, cdet, -1.0)
        i, j = np.unravel_index(np.argmax(vals), vals.shape)
        seeds.append((float(centers[i]), float(centers[j])))
    threshold = 1e-3 * float(np.max(np.abs(det)))
    return count, seeds, threshold


def count_aspects(p: DesignParams, grid: int = 256, check_stability: bool = True):
    """Count singularity-free connected open sets on the joint torus.

    Cells whose corner determinants change sign are walls; remaining cells are
    flood-filled with wraparound in both axes.  The count must agree with the
    doubled grid, otherwise the resolution is insufficient for this design.
    """
    if grid < 256:
        raise InvalidParameterError(f"grid must be >= 256, got {grid}")
    count, seeds, threshold = _aspect_count_once(p, grid)
    if check_stability:
        count2, _, _ = _aspect_count_once(p, 2 * grid)
        if count2 != count:
            raise AspectInstabilityError(
                f"aspect count changed {count} -> {count2} when doubling grid {grid}")
    return AspectCount(count=count, component_seeds=seeds, threshold=threshold)
