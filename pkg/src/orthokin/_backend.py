"""Backend selection for the hot kernels.

ORTHOKIN_BACKEND chooses the implementation of the census root-count grid and
the polyline crossing search:

    auto   -- numba-jitted scalar kernels when numba imports, else numpy (default)
    numba  -- force the jitted kernels (falls back with a warning if missing)
    numpy  -- force the vectorized pure-numpy path

Both paths are exact (same counting rules); equivalence is covered by tests
and timed by benchmarks/bench_backends.py.
"""

from __future__ import annotations

import os
import warnings

import numpy as np

from . import _kernels, _vectorized
from ._kernels import HAVE_NUMBA, VALUE_EPS

ENV_BACKEND = "ORTHOKIN_BACKEND"
ENV_THREADS = "ORTHOKIN_THREADS"


def get_backend(override: str | None = None) -> str:
    choice = (override or os.environ.get(ENV_BACKEND, "auto")).lower()
    if choice not in ("auto", "numba", "numpy"):
        raise ValueError(f"unknown backend {choice!r}")
    if choice == "auto":
        return "numba" if HAVE_NUMBA else "numpy"
    if choice == "numba" and not HAVE_NUMBA:
        warnings.warn("numba not importable; using numpy backend")
        return "numpy"
    return choice


def apply_thread_cap() -> None:
    """Honor ORTHOKIN_THREADS (0 or unset = automatic)."""
    raw = os.environ.get(ENV_THREADS, "0")
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"{ENV_THREADS} must be an integer, got {raw!r}")
    if n > 0 and HAVE_NUMBA:
        import numba

        numba.set_num_threads(min(n, numba.config.NUMBA_NUM_THREADS))


def census_counts(rho_ax, z_ax, d3, d4, r2, vtol=VALUE_EPS, backend=None):
    mod = _kernels if get_backend(backend) == "numba" else _vectorized
    return mod.census_counts(np.ascontiguousarray(rho_ax, dtype=float),
                             np.ascontiguousarray(z_ax, dtype=float),
                             float(d3), float(d4), float(r2), float(vtol))


def segment_crossings(x0, y0, x1, y1, bid, idx, nseg, cap=8192, backend=None):
    mod = _kernels if get_backend(backend) == "numba" else _vectorized
    m, oi, oj, ox, oy = mod.segment_crossings(
        np.ascontiguousarray(x0, dtype=float), np.ascontiguousarray(y0, dtype=float),
        np.ascontiguousarray(x1, dtype=float), np.ascontiguousarray(y1, dtype=float),
        np.ascontiguousarray(bid, dtype=np.int64), np.ascontiguousarray(idx, dtype=np.int64),
        np.ascontiguousarray(nseg, dtype=np.int64), cap)
    if m > cap:
        raise RuntimeError(f"crossing capacity exceeded: {m} > {cap}")
    return oi[:m], oj[:m], ox[:m], oy[:m]
