import math

import numpy as np
import pytest

from orthokin.classifier import (
    classify,
    decision_path,
    legacy_quartic_root_branches,
    legacy_surfaces,
    surface_values,
)
from orthokin.errors import InvalidParameterError
from orthokin.kinematics import DesignParams


class TestSurfaceValues:
    def test_reference_stack_at_d3_2_r2_1(self):
        sv = surface_values(2.0, 1.0)
        assert sv.a == pytest.approx(math.sqrt(10.0), rel=1e-12)
        assert sv.b == pytest.approx(math.sqrt(2.0), rel=1e-12)
        assert sv.c1 == pytest.approx(0.20081, abs=1e-5)
        assert sv.c2 == pytest.approx(2.10819, abs=1e-5)
        assert sv.c3 == pytest.approx(2.82843, abs=1e-5)
        assert sv.c4 is None
        assert sv.e1 == pytest.approx(0.87403, abs=1e-5)
        assert sv.e2 == 2.0
        assert sv.e3 == pytest.approx(2.28825, abs=1e-5)

    def test_reference_stack_at_d3_3_r2_2(self):
        sv = surface_values(3.0, 2.0)
        assert sv.c2 == pytest.approx(3.35410, abs=1e-5)
        assert sv.c3 == pytest.approx(4.24264, abs=1e-5)
        assert sv.e3 == pytest.approx(3.65028, abs=1e-5)
        assert sv.e3 < 4.0 < sv.c3

    def test_algebraic_identities(self):
        rng = np.random.default_rng(21)
        for _ in range(200):
            d3, r2 = rng.uniform(0.1, 4.0, 2)
            sv = surface_values(d3, r2)
            assert sv.a > sv.b > 0.0
            assert sv.e2 == d3
            assert sv.e1 * sv.e3 == pytest.approx(d3, rel=1e-12)
            assert sv.a ** 2 - sv.b ** 2 == pytest.approx(4.0 * d3, rel=1e-12)
            assert sv.e1 < sv.e3
            assert not sv.stack_violations()

    def test_levels_satisfy_their_defining_polynomials(self):
        # c1 solves the degree-8 polynomial; c2 and c3/c4 solve the quadratics.
        rng = np.random.default_rng(22)
        for _ in range(100):
            d3, r2 = rng.uniform(0.15, 4.0, 2)
            if abs(d3 - 1.0) < 1e-3:
                continue
            sv = surface_values(d3, r2)
            scale = max(1.0, d3, r2) ** 8
            r7, r8, r9, r10, r11 = legacy_surfaces(d3, sv.c1, r2)
            assert abs(r9) / scale < 1e-9
            r = legacy_surfaces(d3, sv.c2, r2)[4]
            assert abs(r) / scale < 1e-9
            cx = sv.c3 if d3 > 1.0 else sv.c4
            r = legacy_surfaces(d3, cx, r2)[3]
            assert abs(r) / scale < 1e-9

    def test_rejects_nonpositive(self):
        with pytest.raises(InvalidParameterError):
            surface_values(-1.0, 1.0)
        with pytest.raises(InvalidParameterError):
            surface_values(1.0, 0.0)


class TestLegacyBranches:
    def test_branch_equivalence_grid(self):
        d3s = np.linspace(0.1, 4.0, 12)
        r2s = np.linspace(0.1, 4.0, 12)
        for d3 in d3s:
            for r2 in r2s:
                sv = surface_values(d3, r2)
                lo, _hi = legacy_quartic_root_branches(d3, r2)
                assert abs(lo - sv.c1) <= 1e-9 * max(lo, sv.c1)

    def test_eq7_zero_iff_ratio(self):
        rng = np.random.default_rng(23)
        for _ in range(50):
            d3, r2 = rng.uniform(0.2, 3.0, 2)
            d4 = d3 / (1.0 + r2 * r2)
            assert abs(legacy_surfaces(d3, d4, r2)[0]) < 1e-12
            assert abs(legacy_surfaces(d3, d4 * 1.1, r2)[0]) > 1e-6


KNOWN_LABELS = [
    ((2.0, 1.5, 1.0), "WT3"),
    ((3.0, 4.0, 2.0), "WT6"),
    ((2.0, 0.1, 1.0), "WT1"),
    ((2.0, 0.5, 1.0), "WT2"),
    ((2.0, 2.05, 1.0), "WT4"),
    ((2.0, 2.2, 1.0), "WT5"),
    ((2.0, 3.0, 1.0), "WT7"),
    ((0.5, 1.2, 1.0), "WT8"),
    ((0.5, 1.6, 1.0), "WT9"),
]


class TestClassify:
    @pytest.mark.parametrize("params,expected", KNOWN_LABELS)
    def test_known_labels(self, params, expected):
        lab = classify(DesignParams(*params))
        assert lab.label == expected
        assert lab.generic and lab.near_surfaces == ()

    def test_domains(self):
        assert classify(DesignParams(2.0, 0.1, 1.0)).domain == 1
        assert classify(DesignParams(2.0, 1.5, 1.0)).domain == 2
        assert classify(DesignParams(2.0, 2.2, 1.0)).domain == 3
        assert classify(DesignParams(2.0, 3.0, 1.0)).domain == 4
        assert classify(DesignParams(0.5, 1.6, 1.0)).domain == 5

    def test_d3_equal_one_nongeneric(self):
        lab = classify(DesignParams(1.0, 2.0, 1.0))
        assert lab.label == "NonGeneric" and "d3=1" in lab.near_surfaces

    def test_near_surface_nongeneric(self):
        sv = surface_values(2.0, 1.0)
        lab = classify(DesignParams(2.0, sv.e2 * (1.0 + 1e-9), 1.0))
        assert lab.label == "NonGeneric" and "E2" in lab.near_surfaces
        lab = classify(DesignParams(2.0, sv.c1, 1.0))
        assert lab.label == "NonGeneric" and "C1" in lab.near_surfaces

    def test_nongeneric_iff_near_surfaces(self):
        rng = np.random.default_rng(24)
        for _ in range(200):
            p = DesignParams(*rng.uniform(0.2, 3.5, 3))
            lab = classify(p)
            assert (lab.label == "NonGeneric") == (len(lab.near_surfaces) > 0)

    def test_scale_invariance(self):
        rng = np.random.default_rng(25)
        for _ in range(100):
            d2, d3, d4, r2 = rng.uniform(0.2, 3.0, 4)
            k = rng.uniform(0.1, 10.0)
            a = classify(DesignParams.from_raw(d2, d3, d4, r2))
            b = classify(DesignParams.from_raw(k * d2, k * d3, k * d4, k * r2))
            assert a.label == b.label

    def test_straddling_non_separating_surfaces_keeps_label(self):
        rng = np.random.default_rng(26)
        kept = 0
        tried = 0
        while kept < 40 and tried < 4000:
            tried += 1
            d3, r2 = rng.uniform(0.3, 3.0, 2)
            base = d3 / (1.0 + r2 * r2) if tried % 2 else math.hypot(d3, r2)
            delta = 1e-5 * base
            sv = surface_values(d3, r2)
            lo, hi = base - delta, base + delta
            if any(lo <= lvl <= hi or abs(base - lvl) < 10e-7 * lvl
                   for _n, lvl in sv.levels()):
                continue
            la = classify(DesignParams(d3, lo, r2))
            lb = classify(DesignParams(d3, hi, r2))
            if not (la.generic and lb.generic):
                continue
            assert la.label == lb.label
            kept += 1
        assert kept == 40

    def test_decision_path_mentions_label(self):
        p = DesignParams(2.0, 1.5, 1.0)
        lab = classify(p)
        path = decision_path(p, surface_values(2.0, 1.0), lab)
        assert any("WT3" in s for s in path)
