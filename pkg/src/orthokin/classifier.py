"""Closed-form workspace-topology classification from (d3, d4, r2).

Seven surface levels partition the design space (d2 = 1).  Four control the
cusp count (quaternary transition c1, line/curve tangencies c2, c3, c4) and
three control the node count (lateral tangency e1, the u = 0 onset e2 = d3,
boundary-boundary tangency e3).  All are graphs d4 = f(d3, r2), so genericity
is decided by relative vertical distance of d4 to each applicable level.

The legacy polynomial residuals from the earlier algebraic study are kept for
numeric equivalence checks: their quadratic-in-d4 (or d4^2) branches must
reproduce c1/c2/c3/c4, while the remaining two polynomials separate nothing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParameterError, SurfaceDomainError
from .kinematics import DesignParams

GENERIC_EPS = 1e-7

WT_LABELS = tuple(f"WT{i}" for i in range(1, 10))

# Domain (cusp-count cell) per label.
LABEL_DOMAIN = {
    "WT1": 1, "WT2": 2, "WT3": 2, "WT4": 2,
    "WT5": 3, "WT6": 3, "WT7": 4, "WT8": 5, "WT9": 5,
}


@dataclass(frozen=True)
class SurfaceValues:
    """Evaluated separating-surface levels at one (d3, r2)."""

    d3: float
    r2: float
    a: float
    b: float
    c1: float
    c2: float
    c3: float | None  # defined iff d3 > 1
    c4: float | None  # defined iff d3 < 1
    e1: float
    e2: float
    e3: float

    def levels(self):
        """Applicable (name, level) pairs, fixed order."""
        out = [("C1", self.c1), ("C2", self.c2)]
        if self.c3 is not None:
            out.append(("C3", self.c3))
        if self.c4 is not None:
            out.append(("C4", self.c4))
        out += [("E1", self.e1), ("E2", self.e2), ("E3", self.e3)]
        return out

    def stack_violations(self):
        """Names of broken orderings in the expected stack C1 < E1 < E2 < C2."""
        bad = []
        stack = [("C1", self.c1), ("E1", self.e1), ("E2", self.e2), ("C2", self.c2)]
        for (na, va), (nb, vb) in zip(stack, stack[1:]):
            if not va < vb:
                bad.append(f"order:{na}<{nb}")
        return bad


@dataclass(frozen=True)
class TopologyLabel:
    label: str  # WT1..WT9 or NonGeneric
    near_surfaces: tuple = field(default_factory=tuple)
    domain: int | None = None

    @property
    def generic(self):
        return self.label != "NonGeneric"


def _ab(d3, r2):
    a = math.hypot(d3 + 1.0, r2)
    b = math.hypot(d3 - 1.0, r2)
    return a, b


def quaternary_onset_level(d3, r2, radicand_tol=1e-12):
    """Level c1: the inverse-kinematics polynomial acquires four equal roots."""
    a, b = _ab(d3, r2)
    s = d3 * d3 + r2 * r2
    rad = 0.5 * (s - (s * s - d3 * d3 + r2 * r2) / (a * b))
    if rad < 0.0:
        if rad < -radicand_tol * max(1.0, s):
            raise SurfaceDomainError(
                f"negative radicand {rad} at (d3={d3}, r2={r2})")
        rad = 0.0
    return math.sqrt(rad)


def legacy_quartic_root_branches(d3, r2):
    """(smaller, larger) positive d4 roots of the degree-8 legacy polynomial.

    The polynomial is quadratic in d4^2; its smaller branch must agree with
    the closed-form c1 level, which classify() verifies on every call.
    """
    qa = (-d3**4 + 2.0 * d3**2 - 2.0 * d3**2 * r2**2
          - 2.0 * r2**2 - r2**4 - 1.0)
    qb = (d3**6 + 3.0 * d3**4 * r2**2 - 2.0 * d3**4 + d3**2
          + 3.0 * d3**2 * r2**4 + r2**6 + r2**2 + 2.0 * r2**4)
    qc = -d3**2 * r2**2
    disc = qb * qb - 4.0 * qa * qc
    if disc < 0.0:
        raise SurfaceDomainError(f"negative discriminant at (d3={d3}, r2={r2})")
    sq = math.sqrt(disc)
    x1 = (-qb + sq) / (2.0 * qa)
    x2 = (-qb - sq) / (2.0 * qa)
    lo, hi = sorted((x1, x2))
    if lo < 0.0:
        raise SurfaceDomainError(f"negative d4^2 branch at (d3={d3}, r2={r2})")
    return math.sqrt(lo), math.sqrt(hi)


def surface_values(d3: float, r2: float) -> SurfaceValues:
    """Evaluate every separating-surface level at (d3, r2)."""
    if not (d3 > 0.0 and r2 > 0.0):
        raise InvalidParameterError(f"d3, r2 must be > 0, got ({d3}, {r2})")
    a, b = _ab(d3, r2)
    c1 = quaternary_onset_level(d3, r2)
    # Transcription safeguard: the legacy polynomial's smaller branch is the
    # same surface; prefer it if the closed form ever disagrees.
    c1_poly = legacy_quartic_root_branches(d3, r2)[0]
    if abs(c1 - c1_poly) > 1e-9 * max(c1, c1_poly):
        c1 = c1_poly
    c2 = d3 * a / (1.0 + d3)
    c3 = d3 * b / (d3 - 1.0) if d3 > 1.0 else None
    c4 = d3 * b / (1.0 - d3) if d3 < 1.0 else None
    return SurfaceValues(
        d3=d3, r2=r2, a=a, b=b, c1=c1, c2=c2, c3=c3, c4=c4,
        e1=0.5 * (a - b), e2=d3, e3=0.5 * (a + b),
    )


def legacy_surfaces(d3: float, d4: float, r2: float) -> np.ndarray:
    """Residuals of the five legacy classification polynomials (zero on-surface)."""
    if not (d3 > 0.0 and d4 > 0.0 and r2 > 0.0):
        raise InvalidParameterError("lengths must be > 0")
    r7 = -d3 + d4 * r2**2 + d4
    r8 = d3**2 - d4**2 + r2**2
    r9 = (d4**2 * d3**6 - d4**4 * d3**4 + 3.0 * d4**2 * d3**4 * r2**2
          - 2.0 * d4**2 * d3**4 + 2.0 * d4**4 * d3**2
          - 2.0 * d4**4 * d3**2 * r2**2 + d4**2 * d3**2
          + 3.0 * d4**2 * d3**2 * r2**4 - d3**2 * r2**2
          - 2.0 * d4**4 * r2**2 - d4**4 * r2**4 - d4**4
          + d4**2 * r2**6 + d4**2 * r2**2 + 2.0 * d4**2 * r2**4)
    r10 = (d3**2 * r2**2 + d3**2 - 2.0 * d3**3 + d3**4
           - d4**2 + 2.0 * d3 * d4**2 - d3**2 * d4**2)
    r11 = (d3**2 * r2**2 + d3**2 + 2.0 * d3**3 + d3**4
           - d4**2 - 2.0 * d3 * d4**2 - d3**2 * d4**2)
    return np.array([r7, r8, r9, r10, r11])


def classify(p: DesignParams, eps: float = GENERIC_EPS) -> TopologyLabel:
    """Assign WT1..WT9 (or NonGeneric with the offending surfaces listed)."""
    d3, d4 = p.d3, p.d4
    near = []
    if abs(d3 - 1.0) <= eps:
        near.append("d3=1")
        return TopologyLabel("NonGeneric", tuple(near), None)
    sv = surface_values(d3, p.r2)
    for name, level in sv.levels():
        if abs(d4 - level) <= eps * level:
            near.append(name)
    if near:
        return TopologyLabel("NonGeneric", tuple(near), None)
    bad = sv.stack_violations()
    if bad:
        return TopologyLabel("NonGeneric", tuple(bad), None)

    if d4 < sv.c1:
        label = "WT1"
    elif d4 < sv.e1:
        label = "WT2"
    elif d4 < sv.e2:
        label = "WT3"
    elif d4 < sv.c2:
        label = "WT4"
    elif d3 > 1.0:
        if d4 < sv.c3:
            label = "WT5" if d4 < sv.e3 else "WT6"
        else:
            label = "WT7"
    else:
        if d4 < sv.c4:
            label = "WT5" if d4 < sv.e3 else "WT6"
        else:
            label = "WT8" if d4 < sv.e3 else "WT9"
    return TopologyLabel(label, (), LABEL_DOMAIN[label])


# Per-type feature counts implied by the classification tree.  Node counts
# for the two no-cusp quaternary types are not pinned anywhere (only their
# difference of 2 is); the WT4 aspect count is implied rather than stated, so
# it is recorded but not gated.
IMPLIED_FEATURES = {
    "WT1": {"cusps": 0, "nodes": 0, "aspects": 2, "aspects_gated": True, "hole": True},
    "WT2": {"cusps": 4, "nodes": 2, "aspects": 2, "aspects_gated": True, "hole": True},
    "WT3": {"cusps": 4, "nodes": 0, "aspects": 2, "aspects_gated": True, "hole": False},
    "WT4": {"cusps": 4, "nodes": 2, "aspects": 6, "aspects_gated": False, "hole": False},
    "WT5": {"cusps": 2, "nodes": 1, "aspects": 5, "aspects_gated": True, "hole": False},
    "WT6": {"cusps": 2, "nodes": 3, "aspects": 5, "aspects_gated": True, "hole": False},
    "WT7": {"cusps": 4, "nodes": 4, "aspects": 6, "aspects_gated": True, "hole": False},
    "WT8": {"cusps": 0, "nodes": None, "aspects": 4, "aspects_gated": True, "hole": False},
    "WT9": {"cusps": 0, "nodes": None, "aspects": 4, "aspects_gated": True, "hole": False},
}


def implied_features(label: str):
    """Expected (cusps, nodes, aspects, hole) for a generic type label."""
    return IMPLIED_FEATURES[label]


def decision_path(p: DesignParams, sv: SurfaceValues, label: TopologyLabel):
    """Human-readable branch trail through the classification tree."""
    if not label.generic:
        return [f"within tolerance of: {', '.join(label.near_surfaces)}"]
    d3, d4 = p.d3, p.d4
    path = []
    if d3 > d4:
        path.append(f"d3 > d4: two aspects, binary/quaternary split at C1={sv.c1:.6g}")
        path.append("d4 > C1: quaternary, 4 cusps" if d4 > sv.c1
                    else "d4 < C1: binary, no cusp, hole")
    else:
        path.append("d3 < d4: quaternary, no hole; horizontal singular lines present")
    dom = label.domain
    path.append(f"cusp-count domain {dom}")
    if dom == 2:
        if d4 < sv.e1:
            path.append(f"d4 < E1={sv.e1:.6g}: lateral segments cross (2 nodes)")
        elif d4 < sv.e2:
            path.append(f"E1 < d4 < E2={sv.e2:.6g}: no node")
        else:
            path.append(f"E2 < d4 < C2={sv.c2:.6g}: nodes on the isolated points")
    elif dom in (3, 5):
        path.append(f"d4 {'<' if d4 < sv.e3 else '>'} E3={sv.e3:.6g}: "
                    f"internal/external boundaries {'disjoint' if d4 < sv.e3 else 'crossing (2 extra nodes)'}")
    path.append(f"label {label.label}")
    return path
