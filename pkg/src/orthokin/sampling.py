"""Seeded design samplers for the verification suites.

Designs are drawn per target label by sampling (d3, r2), computing the
surface stack, and placing d4 well inside the label's interval (at least 25%
of the interval width from each end, re-checked through classify).  All
randomness flows from the caller's Generator, so suites are reproducible.
"""

from __future__ import annotations

import math

import numpy as np

from .classifier import classify, surface_values
from .kinematics import DesignParams

# (d3 range, needs d3 above/below 1) per label; domain-3+ labels keep d3 away
# from 1 where the tangency levels blow up.
_D3_RANGES = {
    "WT1": (0.3, 3.0), "WT2": (0.3, 3.0), "WT3": (0.3, 3.0), "WT4": (0.3, 3.0),
    "WT5": (1.15, 3.0), "WT6": (1.15, 3.0), "WT7": (1.15, 3.0),
    "WT8": (0.25, 0.87), "WT9": (0.25, 0.87),
}


def _interval_for(label, sv):
    if label == "WT1":
        return 0.15 * sv.c1, sv.c1
    if label == "WT2":
        return sv.c1, sv.e1
    if label == "WT3":
        return sv.e1, sv.e2
    if label == "WT4":
        return sv.e2, sv.c2
    cap = sv.c3 if sv.d3 > 1.0 else sv.c4
    if label == "WT5":
        return sv.c2, min(sv.e3, cap)
    if label == "WT6":
        return (sv.e3, cap) if sv.e3 < cap else None
    if label == "WT7":
        return sv.c3, 1.6 * sv.c3 + 0.5
    if label == "WT8":
        return (sv.c4, sv.e3) if sv.c4 < sv.e3 else None
    if label == "WT9":
        lo = max(sv.c4, sv.e3)
        return lo, 1.6 * lo + 0.5
    raise ValueError(label)


def design_for_label(label, rng, *, r2_range=(0.3, 2.5), max_tries=400):
    """One generic design classified as `label`, drawn from `rng`."""
    d3_lo, d3_hi = _D3_RANGES[label]
    for _ in range(max_tries):
        d3 = rng.uniform(d3_lo, d3_hi)
        if abs(d3 - 1.0) < 0.08:
            continue
        r2 = rng.uniform(*r2_range)
        sv = surface_values(d3, r2)
        iv = _interval_for(label, sv)
        if iv is None:
            continue
        lo, hi = iv
        if not (hi > lo and (hi - lo) > 1e-3 * hi):
            continue
        d4 = lo + (0.25 + 0.5 * rng.uniform()) * (hi - lo)
        p = DesignParams(d3, d4, r2)
        if classify(p).label == label:
            return p
    raise RuntimeError(f"could not sample a generic {label} design")


def matched_pair_no_cusp(rng, *, max_tries=400):
    """(WT8, WT9) designs sharing (d3, r2), for the node-difference check."""
    for _ in range(max_tries):
        d3 = rng.uniform(*_D3_RANGES["WT8"])
        r2 = rng.uniform(0.3, 2.5)
        sv = surface_values(d3, r2)
        if not sv.c4 < sv.e3:
            continue
        lo8, hi8 = sv.c4, sv.e3
        d4_8 = lo8 + (0.25 + 0.5 * rng.uniform()) * (hi8 - lo8)
        d4_9 = sv.e3 * (1.15 + 0.5 * rng.uniform())
        p8 = DesignParams(d3, d4_8, r2)
        p9 = DesignParams(d3, d4_9, r2)
        if classify(p8).label == "WT8" and classify(p9).label == "WT9":
            return p8, p9
    raise RuntimeError("could not sample a matched WT8/WT9 pair")


def straddle_pair(which, rng, *, eps=1e-7, rel_offset=1e-5, max_tries=2000):
    """Two designs straddling one of the two non-separating surfaces.

    Both sides are generic, at least 10*eps from every separating level, and
    no separating level lies between them; returns (below, above).
    """
    if which not in ("ratio", "circle"):
        raise ValueError(which)
    for _ in range(max_tries):
        d3 = rng.uniform(0.3, 3.0)
        r2 = rng.uniform(0.3, 2.5)
        base = d3 / (1.0 + r2 * r2) if which == "ratio" else math.hypot(d3, r2)
        lo = base * (1.0 - rel_offset)
        hi = base * (1.0 + rel_offset)
        sv = surface_values(d3, r2)
        levels = [lvl for _n, lvl in sv.levels()]
        if any(lo <= lvl <= hi or abs(base - lvl) <= 10.0 * eps * lvl for lvl in levels):
            continue
        pa, pb = DesignParams(d3, lo, r2), DesignParams(d3, hi, r2)
        if classify(pa, eps).generic and classify(pb, eps).generic:
            return pa, pb
    raise RuntimeError(f"could not sample a straddle pair for {which}")


def random_generic_design(rng, *, eps=1e-7, max_tries=200):
    """Any generic design, uniform-ish over the sampling box."""
    for _ in range(max_tries):
        p = DesignParams(rng.uniform(0.25, 3.0), rng.uniform(0.1, 4.0),
                         rng.uniform(0.3, 2.5))
        if classify(p, eps).generic:
            return p
    raise RuntimeError("could not sample a generic design")
