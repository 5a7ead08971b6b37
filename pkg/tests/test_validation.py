import math

import pytest

from vdwbem import (
    GOLD,
    london_c6,
    make_frequency_grid,
    sphere_spectrum_check,
    two_sphere_far_field_check,
)
from vdwbem.errors import CoarseMeshError, VdwBemError
from vdwbem.validation import OracleReport

# gold Drude defaults, a = 1 nm; frozen after the dual-quadrature agreement
# asserted in test_dual_quadrature_agreement
GOLD_C6_EV_NM6 = 3.8804691013


class TestSphereSpectrum:
    def test_desk_ladder_passes(self):
        report = sphere_spectrum_check((6, 8, 10))
        assert report.passed
        assert report.details["raw_errors_monotone"]
        # collocation bias is first order in panel size
        assert report.details["convergence_order"] == pytest.approx(1.0, abs=0.35)
        # corrected l=1 cluster is dramatically closer than the raw one
        finest = report.details["per_resolution"][-1]
        assert finest["l1_corr_err"] < 0.02
        assert finest["l2_corr_err"] < 0.03
        assert finest["l1_raw_err"] > finest["l1_corr_err"]

    def test_cluster_degeneracies_resolved(self):
        report = sphere_spectrum_check((6, 8, 10), lmax=3)
        finest = report.details["per_resolution"][-1]
        assert finest["l3_corr_err"] < 0.05

    def test_needs_three_resolutions(self):
        with pytest.raises(VdwBemError):
            sphere_spectrum_check((6, 8))

    def test_coarse_mesh_ambiguity(self):
        with pytest.raises(CoarseMeshError):
            sphere_spectrum_check((2, 3, 4), lmax=5)


class TestLondonC6:
    def test_dual_quadrature_agreement(self):
        c6_quad = london_c6(GOLD, 1.0)
        c6_grid = london_c6(GOLD, 1.0, make_frequency_grid(9.0, 64))
        assert abs(c6_grid - c6_quad) <= 1e-8 * c6_quad
        assert c6_quad == pytest.approx(GOLD_C6_EV_NM6, rel=1e-9)

    def test_radius_sixth_power(self):
        assert london_c6(GOLD, 2.0) == pytest.approx(64.0 * london_c6(GOLD, 1.0), rel=1e-10)

    def test_positive(self):
        assert london_c6(GOLD, 1.0) > 0.0


class TestFarField:
    def test_default_gate_passes(self, grid48):
        report = two_sphere_far_field_check(
            GOLD, 1.0, distances=(10.0,), tolerances=(0.05,), resolution=10, grid=grid48
        )
        assert report.passed
        assert report.rel_err <= 0.05
        assert all(e < 0.0 for e in report.computed)

    def test_distance_precondition(self):
        with pytest.raises(VdwBemError):
            two_sphere_far_field_check(GOLD, 1.0, distances=(5.0,), tolerances=(0.05,))

    def test_mismatched_tolerances(self):
        with pytest.raises(VdwBemError):
            two_sphere_far_field_check(GOLD, 1.0, distances=(10.0, 20.0), tolerances=(0.05,))


class TestOracleReport:
    def test_pass_iff_within_tolerance(self):
        r = OracleReport("x", (1.0,), (1.01,), rel_err=0.0099, tolerance=0.01, passed=True)
        assert r.passed == (r.rel_err <= r.tolerance)

    def test_csv_row_shape(self):
        r = OracleReport("name", (1.5, 2.5), (1.0, 2.0), 0.5, 0.1, False)
        row = r.to_csv_row()
        assert row.startswith("name,1.5|2.5,1|2,")
        assert row.endswith(",false")

    def test_reproducible(self):
        a = sphere_spectrum_check((4, 5, 6), lmax=1)
        b = sphere_spectrum_check((4, 5, 6), lmax=1)
        assert a.to_csv_row() == b.to_csv_row()
        assert a.details["per_resolution"] == b.details["per_resolution"]
