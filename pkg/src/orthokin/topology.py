"""Numeric workspace-topology signature: cusps, nodes, regions, holes.

Cusps are located geometrically (vanishing image speed along the traced
boundary, refined by golden-section search; the position is second-order
accurate in the parameter) and certified by the root structure of the
inverse-kinematics quartic: a triple root cluster at a cusp, two separated
double-root clusters at an ordinary node.

Nodes split in two kinds.  Ordinary nodes are transversal polyline crossings
refined by a four-unknown Newton solve on (singularity, singularity, image
match); nodes that coincide with an isolated singular point (the horizontal
line crossing the curve) are taken analytically at the exact image point --
there the quartic provably carries a single double root plus two simple ones,
so the double-pair certificate applies only to the ordinary kind.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from ._backend import census_counts, segment_crossings
from .errors import CuspVerificationError, InvalidParameterError, TangentialContactError
from .kinematics import (
    CrossSectionPoint,
    DesignParams,
    reduced_fk_arrays,
    ik_polynomial,
)
from .polyroots import quartic_complex_roots
from .singularity import (
    AspectCount,
    IsolatedPoint,
    SingularBranch,
    branch_point,
    count_aspects,
    isolated_points,
    s1_lines,
    trace_s2,
)

CLUSTER_TOL = 1e-6
CUSP_EXCLUSION = 1e-4
TRIPLE_WIDTH = 1e-4
RESIDUAL_SEP = 1e-2
PAIR_WIDTH = 1e-4
PAIR_SEP = 1e-3
TANGENT_ANGLE_TOL = 1e-3


@dataclass(frozen=True)
class RegionInfo:
    iks: int
    representative: CrossSectionPoint
    area: float
    cells: int


@dataclass
class TopologySignature:
    cusps: list = field(default_factory=list)
    nodes: list = field(default_factory=list)
    isolated: list = field(default_factory=list)
    aspect_count: int | None = None
    has_hole: bool | None = None
    region_census: list | None = None
    branches: list = field(default_factory=list)
    lines: list = field(default_factory=list)
    issues: list = field(default_factory=list)


def _sorted_points(pts):
    return sorted(pts, key=lambda c: (c.rho, c.z))


def _cluster_points(points, tol):
    out = []
    for pt in points:
        for k, (q, n) in enumerate(out):
            if math.hypot(pt[0] - q[0], pt[1] - q[1]) < tol * (n + 1):
                out[k] = (((q[0] * n + pt[0]) / (n + 1), (q[1] * n + pt[1]) / (n + 1)), n + 1)
                break
        else:
            out.append((pt, 1))
    return [q for q, _n in out]


def _quartic_roots_at(p, rho, z):
    coeffs = ik_polynomial(p, CrossSectionPoint(max(rho, 0.0), z))
    return quartic_complex_roots(coeffs)


def _chordal(a, b):
    """Scale-free distance between tangent-half-angle roots.

    Equals |theta3_a - theta3_b| for nearby real roots; stays well-conditioned
    as |t| grows (plain |a - b| blows up near theta3 = pi, where the noise
    floor of any double-precision root exceeds the certificate thresholds).
    """
    return 2.0 * abs(a - b) / math.sqrt((1.0 + abs(a) ** 2) * (1.0 + abs(b) ** 2))


def _chordal_to_inf(a):
    return 2.0 / math.sqrt(1.0 + abs(a) ** 2)


def triple_root_cluster(roots):
    """(width, residual_distance) of the best 3-subset cluster of the roots.

    A degree drop (vanishing leading coefficient) means one root escaped to
    theta3 = pi; it acts as the residual root at infinity.
    """
    n = len(roots)
    if n < 3:
        return math.inf, 0.0
    best = (math.inf, 0.0)
    if n == 3:
        width = max(_chordal(a, b) for a in roots for b in roots)
        center = sum(roots) / 3.0
        return width, _chordal_to_inf(center)
    for skip in range(n):
        sub = [roots[k] for k in range(n) if k != skip]
        width = max(_chordal(a, b) for a in sub for b in sub)
        if width < best[0]:
            center = sum(sub) / len(sub)
            best = (width, _chordal(roots[skip], center))
    return best


def double_pair_clusters(roots):
    """(max pair width, pair separation) grouping 4 roots into two pairs."""
    if len(roots) != 4:
        return math.inf, 0.0
    z = sorted(roots, key=lambda c: c.real)
    best = (math.inf, 0.0)
    # pairings of 4 elements: (01)(23), (02)(13), (03)(12)
    for (a, b), (c, d) in (((0, 1), (2, 3)), ((0, 2), (1, 3)), ((0, 3), (1, 2))):
        width = max(_chordal(z[a], z[b]), _chordal(z[c], z[d]))
        sep = _chordal((z[a] + z[b]) / 2, (z[c] + z[d]) / 2)
        if width < best[0]:
            best = (width, sep)
    return best


def _speed(p, branch, sigma, theta3, h):
    r0, z0 = branch_point(p, branch, theta3 - h, sigma)
    r1, z1 = branch_point(p, branch, theta3 + h, sigma)
    return math.hypot(r1 - r0, z1 - z0) / (2.0 * h)


def _golden_min(fn, lo, hi, iters=70):
    g = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    x1 = b - g * (b - a)
    x2 = a + g * (b - a)
    f1, f2 = fn(x1), fn(x2)
    for _ in range(iters):
        if f1 < f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - g * (b - a)
            f1 = fn(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + g * (b - a)
            f2 = fn(x2)
    return 0.5 * (a + b)


def find_cusps(p: DesignParams, branches=None, *, trace_n=2048,
               cluster_tol=CLUSTER_TOL, cert_width=TRIPLE_WIDTH,
               residual_sep=RESIDUAL_SEP, speed_h=1e-5):
    """Verified cusp points on the traced singular boundaries."""
    if branches is None:
        branches = trace_s2(p, trace_n)
    scale = p.reach
    candidates = []
    for br in branches:
        W = br.workspace_polyline
        n = len(W)
        segs = np.roll(W, -1, axis=0) - W
        for i in range(n):
            t_prev = segs[(i - 1) % n]
            t_here = segs[i]
            if float(np.dot(t_prev, t_here)) >= 0.0:
                continue
            # candidate at vertex i; skip the branch-join vertices, where the
            # polyline reverses sweep direction but the image is smooth
            lo_int, hi_int = br.theta3_interval
            t3 = float(br.vertex_theta3[i])
            sigma = float(br.vertex_sigma[i])
            neigh = [float(br.vertex_theta3[(i - 1) % n]),
                     t3,
                     float(br.vertex_theta3[(i + 1) % n])]
            wlo = max(min(neigh), lo_int + 2.0 * speed_h)
            whi = min(max(neigh), hi_int - 2.0 * speed_h)
            if not wlo < whi:
                continue
            t3_star = _golden_min(lambda t: _speed(p, br, sigma, t, speed_h), wlo, whi)
            if _speed(p, br, sigma, t3_star, speed_h) > 1e-4 * scale:
                continue  # sampling artifact, not a vanishing-speed point
            candidates.append((branch_point(p, br, t3_star, sigma), _speed(p, br, sigma, t3_star, speed_h)))

    verified = []
    for (rho, z), speed in _dedup_candidates(candidates, cluster_tol):
        roots = _quartic_roots_at(p, rho, z)
        width, resid = triple_root_cluster(roots)
        if width < cert_width and resid > residual_sep:
            verified.append(CrossSectionPoint(rho, z))
        elif width > 0.1 and speed < 1e-8 * scale:
            raise CuspVerificationError(
                f"vanishing-speed point ({rho:.6g}, {z:.6g}) has root cluster "
                f"width {width:.3g}; trace resolution too low")
    return _sorted_points(verified)


def _dedup_candidates(candidates, tol):
    kept = []
    for (pt, speed) in candidates:
        for k, ((q, s), _n) in enumerate(kept):
            if math.hypot(pt[0] - q[0], pt[1] - q[1]) < max(tol, 1e-5):
                if speed < s:
                    kept[k] = ((pt, speed), _n + 1)
                break
        else:
            kept.append(((pt, speed), 1))
    return [entry for entry, _n in kept]


def _newton_node(p, guess, scale, iters=60):
    """Solve det(a)=det(b)=0, image(a)=image(b) for a transversal crossing."""
    d3, d4, r2 = p.d3, p.d4, p.r2

    def fk_parts(t2, t3):
        c2, s2 = math.cos(t2), math.sin(t2)
        c3, s3 = math.cos(t3), math.sin(t3)
        u = d3 + c3 * d4
        up = -s3 * d4
        v = s3 * d4 + r2
        f = s3 + c2 * (s3 * d3 - c3 * r2)
        fp = c3 + c2 * (c3 * d3 + s3 * r2)
        px = 1.0 + c2 * u
        rho = math.hypot(px, v)
        z = -s2 * u
        det = u * f
        ddet_d2 = -s2 * u * (s3 * d3 - c3 * r2)
        ddet_d3 = up * f + u * fp
        drho_d2 = -px * s2 * u / rho
        drho_d3 = (px * c2 * up + v * c3 * d4) / rho
        dz_d2 = -c2 * u
        dz_d3 = -s2 * up
        return det, rho, z, ddet_d2, ddet_d3, drho_d2, drho_d3, dz_d2, dz_d3

    x = np.asarray(guess, dtype=float)

    def residual(xv):
        da, ra, za, *ja = fk_parts(xv[0], xv[1])
        db, rb, zb, *jb = fk_parts(xv[2], xv[3])
        F = np.array([da, db, ra - rb, za - zb])
        J = np.array([
            [ja[0], ja[1], 0.0, 0.0],
            [0.0, 0.0, jb[0], jb[1]],
            [ja[2], ja[3], -jb[2], -jb[3]],
            [ja[4], ja[5], -jb[4], -jb[5]],
        ])
        return F, J

    F, J = residual(x)
    fnorm = float(np.max(np.abs(F)))
    for _ in range(iters):
        if fnorm < 1e-12 * scale:
            break
        try:
            step = np.linalg.solve(J, F)
        except np.linalg.LinAlgError:
            return None
        lam = 1.0
        for _damp in range(12):
            xn = x - lam * step
            Fn, Jn = residual(xn)
            fn = float(np.max(np.abs(Fn)))
            if fn < fnorm:
                x, F, J, fnorm = xn, Fn, Jn, fn
                break
            lam *= 0.5
        else:
            return None
    if fnorm >= 1e-10 * scale:
        return None
    rho, z = reduced_fk_arrays(p, x[0], x[1])
    return float(rho), float(z)


def find_nodes(p: DesignParams, branches=None, isolated=None, cusps=None, *,
               trace_n=2048, cluster_tol=CLUSTER_TOL, cusp_exclusion=CUSP_EXCLUSION,
               angle_tol=TANGENT_ANGLE_TOL, backend=None):
    """Distinct node points (transversal boundary intersections)."""
    if branches is None:
        branches = trace_s2(p, trace_n)
    if isolated is None:
        isolated = isolated_points(p)
    if cusps is None:
        cusps = find_cusps(p, branches)
    scale = p.reach
    snap_r = 3e-3 * scale

    coincident = [ip.point for ip in isolated if ip.coincides_with_node]
    iso_xy = [(ip.point.rho, ip.point.z) for ip in isolated]

    # concatenated segment arrays over all loop polylines (closed: wrap segment)
    cols = {k: [] for k in ("x0", "y0", "x1", "y1", "bid", "idx",
                            "t2a", "t3a", "t2b", "t3b")}
    nsegl = []
    for b, br in enumerate(branches):
        W = br.workspace_polyline
        J = br.joint_polyline
        n = len(W)
        nxt = np.roll(np.arange(n), -1)
        cols["x0"].append(W[:, 0])
        cols["y0"].append(W[:, 1])
        cols["x1"].append(W[nxt, 0])
        cols["y1"].append(W[nxt, 1])
        cols["t2a"].append(J[:, 0])
        cols["t3a"].append(J[:, 1])
        cols["t2b"].append(J[nxt, 0])
        cols["t3b"].append(J[nxt, 1])
        cols["bid"].append(np.full(n, b))
        cols["idx"].append(np.arange(n))
        nsegl.append(n)
    arr = {k: np.concatenate(v) for k, v in cols.items()}
    nseg = np.asarray(nsegl)

    oi, oj, ox, oy = segment_crossings(
        arr["x0"], arr["y0"], arr["x1"], arr["y1"],
        arr["bid"], arr["idx"], nseg, backend=backend)

    def circ_mid(a, b):
        return a + 0.5 * ((b - a + math.pi) % (2.0 * math.pi) - math.pi)

    refined = []
    for i, j, cx, cy in zip(oi, oj, ox, oy):
        if any(math.hypot(cx - qx, cy - qy) < snap_r for qx, qy in iso_xy):
            continue  # analytic coincident-node territory
        if any(math.hypot(cx - c.rho, cy - c.z) < cusp_exclusion for c in cusps):
            continue
        d1 = (arr["x1"][i] - arr["x0"][i], arr["y1"][i] - arr["y0"][i])
        d2 = (arr["x1"][j] - arr["x0"][j], arr["y1"][j] - arr["y0"][j])
        denom = math.hypot(*d1) * math.hypot(*d2)
        if denom > 0.0:
            sin_angle = abs(d1[0] * d2[1] - d1[1] * d2[0]) / denom
            if sin_angle < angle_tol:
                raise TangentialContactError(
                    f"near-tangential boundary contact at ({cx:.6g}, {cy:.6g})")
        guess = (circ_mid(arr["t2a"][i], arr["t2b"][i]),
                 circ_mid(arr["t3a"][i], arr["t3b"][i]),
                 circ_mid(arr["t2a"][j], arr["t2b"][j]),
                 circ_mid(arr["t3a"][j], arr["t3b"][j]))
        res = _newton_node(p, guess, scale)
        if res is None:
            raise TangentialContactError(
                f"node refinement failed to converge near ({cx:.6g}, {cy:.6g})")
        refined.append(res)

    ordinary = []
    for rho, z in _cluster_points(refined, cluster_tol):
        roots = _quartic_roots_at(p, rho, z)
        width, sep = double_pair_clusters(roots)
        if width < PAIR_WIDTH and sep > PAIR_SEP:
            ordinary.append(CrossSectionPoint(rho, z))

    nodes = list(coincident)
    for c in ordinary:
        if not any(math.hypot(c.rho - q.rho, c.z - q.z) < snap_r for q in coincident):
            nodes.append(c)
    return _sorted_points(nodes)


def region_census(p: DesignParams, grid: int = 400, *, branches=None,
                  trace_n=2048, band_cells: int = 2, min_cells: int = 3,
                  backend=None):
    """Grid census of solution counts with region components and hole flag.

    Cells within `band_cells` of a traced boundary (or of an isolated point)
    are excluded from component analysis; a hole is a bounded 0-count
    component that never touches the bounding box.
    """
    if grid < 16:
        raise InvalidParameterError(f"census grid must be >= 16, got {grid}")
    if branches is None:
        branches = trace_s2(p, trace_n)
    # Bounding box: the boundary radius sweep fixes the margin.
    t3 = np.linspace(-math.pi, math.pi, 4096)
    u = p.d3 + np.cos(t3) * p.d4
    v = np.sin(t3) * p.d4 + p.r2
    rho_max = float(np.max(np.hypot(1.0 + np.abs(u), v)))
    M = 1.05 * max(p.reach, rho_max)

    rho_ax = M * (np.arange(grid) + 0.5) / grid
    z_ax = -M + 2.0 * M * (np.arange(grid) + 0.5) / grid
    counts = census_counts(rho_ax, z_ax, p.d3, p.d4, p.r2, backend=backend)

    cw = M / grid
    ch = 2.0 * M / grid
    excluded = np.zeros((grid, grid), dtype=bool)
    for br in branches:
        W = br.workspace_polyline
        nxt = np.roll(np.arange(len(W)), -1)
        for t in np.linspace(0.0, 1.0, 6):
            px = (1 - t) * W[:, 0] + t * W[nxt, 0]
            py = (1 - t) * W[:, 1] + t * W[nxt, 1]
            ii = np.clip((px / cw - 0.5).round().astype(int), 0, grid - 1)
            jj = np.clip(((py + M) / ch - 0.5).round().astype(int), 0, grid - 1)
            excluded[ii, jj] = True
    for ip in isolated_points(p):
        i0 = int(round(ip.point.rho / cw - 0.5))
        j0 = int(round((ip.point.z + M) / ch - 0.5))
        r = band_cells + 1
        excluded[max(0, i0 - r):i0 + r + 1, max(0, j0 - r):j0 + r + 1] = True
    if band_cells > 0:
        excluded = ndimage.binary_dilation(excluded, iterations=band_cells)

    regions = []
    has_hole = False
    cell_area = cw * ch
    for value in (0, 2, 4):
        mask = (counts == value) & ~excluded
        labels, n = ndimage.label(mask)
        for k in range(1, n + 1):
            cells = labels == k
            ncells = int(cells.sum())
            if ncells < min_cells:
                continue
            touches = (cells[0, :].any() or cells[-1, :].any()
                       or cells[:, 0].any() or cells[:, -1].any())
            if value == 0:
                if not touches:
                    has_hole = True
                else:
                    continue  # unreachable exterior, not a region
            ii, jj = np.nonzero(cells)
            ci, cj = ii.mean(), jj.mean()
            kbest = int(np.argmin((ii - ci) ** 2 + (jj - cj) ** 2))
            rep = CrossSectionPoint(float(rho_ax[ii[kbest]]), float(z_ax[jj[kbest]]))
            regions.append(RegionInfo(iks=value, representative=rep,
                                      area=ncells * cell_area, cells=ncells))
    regions.sort(key=lambda r: (r.iks, r.representative.rho, r.representative.z))
    return regions, has_hole


def numeric_signature(p: DesignParams, *, trace_n=2048, aspect_grid=256,
                      census_grid=400, with_census=True, backend=None,
                      strict=True) -> TopologySignature:
    """Compose tracing, counting, and census into one numeric signature."""
    sig = TopologySignature()
    sig.branches = trace_s2(p, trace_n)
    sig.lines = s1_lines(p)
    sig.isolated = isolated_points(p)

    def run(name, fn):
        try:
            return fn()
        except Exception as exc:
            if strict:
                raise
            sig.issues.append(f"{name}: {exc}")
            return None

    sig.cusps = run("cusps", lambda: find_cusps(p, sig.branches)) or []
    nodes = run("nodes", lambda: find_nodes(
        p, sig.branches, sig.isolated, sig.cusps, backend=backend))
    sig.nodes = nodes if nodes is not None else []
    aspects = run("aspects", lambda: count_aspects(p, aspect_grid))
    sig.aspect_count = aspects.count if isinstance(aspects, AspectCount) else None
    if with_census:
        res = run("census", lambda: region_census(
            p, census_grid, branches=sig.branches, backend=backend))
        if res is not None:
            sig.region_census, sig.has_hole = res
    return sig
