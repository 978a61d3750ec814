"""Kinematics of the 3R orthogonal family with zero last-joint offset.

The family is parameterized by four DH lengths (d2, d3, d4, r2) with twist
angles fixed at -90/+90 degrees; everything here works with lengths
normalized so d2 = 1.  The position map used throughout is

    px = 1 + c2*u,  py = s3*d4 + r2,  u = d3 + c3*d4
    x = c1*px - s1*py,  y = s1*px + c1*py,  z = -s2*u

whose Jacobian determinant is a constant multiple of the factored form
(d3 + c3*d4) * (s3 + c2*(s3*d3 - c3*r2)); the constancy of that multiple is
enforced by tests (see numeric_jacobian_det).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateQuarticError, InvalidParameterError
from .polyroots import real_roots

# Fixed twist angles of the family (radians).
ALPHA2 = -0.5 * math.pi
ALPHA3 = +0.5 * math.pi

TWO_PI = 2.0 * math.pi

# Default tolerances; every operation taking them accepts overrides.
ANGLE_DEDUP_TOL = 1e-7
CONSISTENCY_TOL = 1e-8
U_ZERO_TOL = 1e-10
ISOLATED_TOL = 1e-8
LEADING_COEFF_TOL = 1e-9


def wrap_angle(x):
    """Map an angle (scalar or array) to [-pi, pi)."""
    return (x + math.pi) % TWO_PI - math.pi


@dataclass(frozen=True)
class DesignParams:
    """Normalized design: d2 = 1 implicitly, all lengths strictly positive."""

    d3: float
    d4: float
    r2: float

    def __post_init__(self):
        for name in ("d3", "d4", "r2"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0.0):
                raise InvalidParameterError(f"{name} must be finite and > 0, got {v}")

    @classmethod
    def from_raw(cls, d2, d3, d4, r2):
        if not (math.isfinite(d2) and d2 > 0.0):
            raise InvalidParameterError(f"d2 must be finite and > 0, got {d2}")
        return cls(d3 / d2, d4 / d2, r2 / d2)

    @property
    def reach(self):
        """Loose workspace radius bound 1 + d3 + d4."""
        return 1.0 + self.d3 + self.d4


@dataclass(frozen=True)
class JointConfig:
    theta1: float
    theta2: float
    theta3: float

    def __post_init__(self):
        for name in ("theta1", "theta2", "theta3"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise InvalidParameterError(f"{name} must be finite, got {v}")
            object.__setattr__(self, name, wrap_angle(v))

    def as_array(self):
        return np.array([self.theta1, self.theta2, self.theta3])


@dataclass(frozen=True)
class SpatialPoint:
    x: float
    y: float
    z: float

    def as_array(self):
        return np.array([self.x, self.y, self.z])


@dataclass(frozen=True)
class CrossSectionPoint:
    rho: float
    z: float

    def as_array(self):
        return np.array([self.rho, self.z])


@dataclass(frozen=True)
class IkSolutionSet:
    solutions: tuple = field(default_factory=tuple)
    multiplicity_flag: str = "generic"  # "generic" | "infinite"

    def __len__(self):
        return len(self.solutions)


def forward_kinematics(p: DesignParams, q: JointConfig) -> SpatialPoint:
    """Operation-point position in the base frame."""
    c1, s1 = math.cos(q.theta1), math.sin(q.theta1)
    c2, s2 = math.cos(q.theta2), math.sin(q.theta2)
    c3, s3 = math.cos(q.theta3), math.sin(q.theta3)
    u = p.d3 + c3 * p.d4
    px = 1.0 + c2 * u
    py = s3 * p.d4 + p.r2
    return SpatialPoint(c1 * px - s1 * py, s1 * px + c1 * py, -s2 * u)


def reduced_fk_arrays(p: DesignParams, theta2, theta3):
    """Vectorized half-section map (theta2, theta3) -> (rho, z)."""
    c2, s2 = np.cos(theta2), np.sin(theta2)
    c3, s3 = np.cos(theta3), np.sin(theta3)
    u = p.d3 + c3 * p.d4
    rho = np.hypot(1.0 + c2 * u, s3 * p.d4 + p.r2)
    return rho, -s2 * u


def reduced_fk(p: DesignParams, theta2: float, theta3: float) -> CrossSectionPoint:
    """Half cross-section image; rho >= 0, invariant under theta1."""
    rho, z = reduced_fk_arrays(p, theta2, theta3)
    return CrossSectionPoint(float(rho), float(z))


def jacobian_det_arrays(p: DesignParams, theta2, theta3):
    """Vectorized factored Jacobian determinant (d2 = 1)."""
    c2 = np.cos(theta2)
    c3, s3 = np.cos(theta3), np.sin(theta3)
    return (p.d3 + c3 * p.d4) * (s3 + c2 * (s3 * p.d3 - c3 * p.r2))


def jacobian_det(p: DesignParams, q: JointConfig) -> float:
    return float(jacobian_det_arrays(p, q.theta2, q.theta3))


def numeric_jacobian_det(p: DesignParams, q: JointConfig, h: float = 1e-6) -> float:
    """Central-difference determinant of d(x,y,z)/d(theta1,theta2,theta3).

    Test oracle for the factored form; the ratio of the two is a
    configuration-independent constant.
    """
    if h <= 0.0:
        raise InvalidParameterError(f"step h must be > 0, got {h}")
    base = q.as_array()
    J = np.empty((3, 3))
    for j in range(3):
        qp, qm = base.copy(), base.copy()
        qp[j] += h
        qm[j] -= h
        fp = forward_kinematics(p, JointConfig(*qp)).as_array()
        fm = forward_kinematics(p, JointConfig(*qm)).as_array()
        J[:, j] = (fp - fm) / (2.0 * h)
    return float(np.linalg.det(J))


def ik_polynomial(p: DesignParams, target: CrossSectionPoint) -> np.ndarray:
    """Coefficients (descending, degree 4) of the tangent-half-angle polynomial.

    With t = tan(theta3/2), real roots of the returned polynomial are the
    candidate theta3 values for reaching (rho, z); theta3 = pi corresponds to
    t -> inf and shows up as a vanishing leading coefficient.
    """
    if target.rho < 0.0:
        raise InvalidParameterError(f"rho must be >= 0, got {target.rho}")
    d3, d4, r2 = p.d3, p.d4, p.r2
    R2 = target.rho * target.rho + target.z * target.z
    K = R2 - 1.0 - d3 * d3 - d4 * d4 - r2 * r2
    w2 = K + 2.0 * d3 * d4
    w1 = -4.0 * d4 * r2
    w0 = K - 2.0 * d3 * d4
    zd = 4.0 * (target.z * target.z - d3 * d3)
    return np.array([
        w2 * w2 + zd + 8.0 * d3 * d4 - 4.0 * d4 * d4,
        2.0 * w2 * w1,
        w1 * w1 + 2.0 * w2 * w0 + 2.0 * zd + 8.0 * d4 * d4,
        2.0 * w1 * w0,
        w0 * w0 + zd - 8.0 * d3 * d4 - 4.0 * d4 * d4,
    ])


def _dedup_angles(pairs, tol):
    out = []
    for t2, t3 in pairs:
        dup = False
        for u2, u3 in out:
            if abs(wrap_angle(t2 - u2)) < tol and abs(wrap_angle(t3 - u3)) < tol:
                dup = True
                break
        if not dup:
            out.append((t2, t3))
    return out


def cross_section_solutions(p: DesignParams, target: CrossSectionPoint, *,
                            consistency_tol=CONSISTENCY_TOL,
                            u_tol=U_ZERO_TOL,
                            isolated_tol=ISOLATED_TOL,
                            dedup_tol=ANGLE_DEDUP_TOL):
    """(theta2, theta3) solutions of the half-section inverse problem.

    Returns (pairs, infinite): `infinite` is True when the target coincides
    (within tolerance) with an isolated singular point, where theta2 is free.
    """
    coeffs = ik_polynomial(p, target)
    scale = float(np.max(np.abs(coeffs)))
    if scale == 0.0 or not np.isfinite(scale):
        raise DegenerateQuarticError(
            "all quartic coefficients vanished: infinite solution set")
    norm = coeffs / scale

    theta3_cands = [2.0 * math.atan(t) for t in real_roots(norm)[0]]
    if abs(norm[0]) < LEADING_COEFF_TOL:
        theta3_cands.append(math.pi)

    d3, d4, r2 = p.d3, p.d4, p.r2
    R2 = target.rho * target.rho + target.z * target.z
    pairs = []
    infinite = False
    for t3 in theta3_cands:
        c3, s3 = math.cos(t3), math.sin(t3)
        u = d3 + c3 * d4
        v = s3 * d4 + r2
        if abs(u) > u_tol:
            c2 = (R2 - 1.0 - u * u - v * v) / (2.0 * u)
            s2 = -target.z / u
            if abs(c2 * c2 + s2 * s2 - 1.0) < consistency_tol:
                pairs.append((math.atan2(s2, c2), wrap_angle(t3)))
        else:
            # Operation point meets the second joint axis: theta2 is free iff
            # the target actually sits on the isolated point's image.
            if (abs(target.z) <= isolated_tol
                    and abs(R2 - (1.0 + v * v)) <= isolated_tol * (1.0 + v * v)):
                infinite = True
    return _dedup_angles(pairs, dedup_tol), infinite


def inverse_kinematics(p: DesignParams, target: SpatialPoint, **tols) -> IkSolutionSet:
    """All joint configurations reaching `target`; empty set = unreachable."""
    rho = math.hypot(target.x, target.y)
    pairs, infinite = cross_section_solutions(
        p, CrossSectionPoint(rho, target.z), **tols)
    sols = []
    for t2, t3 in pairs:
        c2 = math.cos(t2)
        c3, s3 = math.cos(t3), math.sin(t3)
        px = 1.0 + c2 * (p.d3 + c3 * p.d4)
        py = s3 * p.d4 + p.r2
        if px == 0.0 and py == 0.0:
            t1 = 0.0  # on-axis target: theta1 undetermined, fixed by continuity
        else:
            t1 = math.atan2(target.y, target.x) - math.atan2(py, px)
        sols.append(JointConfig(t1, t2, t3))
    flag = "infinite" if infinite else "generic"
    return IkSolutionSet(tuple(sols), flag)
