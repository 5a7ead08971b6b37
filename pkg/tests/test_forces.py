import math

import numpy as np
import pytest

from vdwbem import (
    HalfSpacePair,
    MeshResolution,
    ScanSpec,
    central_difference,
    lateral_scan,
    make_frequency_grid,
    normal_scan,
    pfa_normal_force,
    run_scan,
    scan_result_to_csv,
    torque_scan,
)
from vdwbem.errors import InsufficientDataError, VdwBemError


@pytest.fixture(scope="module")
def grid24():
    return make_frequency_grid(9.0, 24)


def small_spec(**overrides):
    base = dict(
        scenario="normal",
        cross_section="square",
        length_nm=1.0,
        height_nm=1.0,
        samples=(0.3, 0.5, 0.75, 1.0),
        resolution=MeshResolution(3),
        grid=make_frequency_grid(9.0, 24),
    )
    base.update(overrides)
    return ScanSpec(**base)


class TestCentralDifference:
    def test_quadratic_exact(self):
        x = np.arange(0.0, 2.0001, 0.1)
        d = central_difference(x**2, 0.1)
        assert np.abs(d - 2.0 * x).max() <= 1e-12

    def test_constant_zero(self):
        d = central_difference(np.full(7, 3.25), 0.05)
        assert np.all(d == 0.0)

    def test_sine_error_bound(self):
        x = np.arange(0.0, math.pi + 1e-12, 1e-2)
        d = central_difference(np.sin(x), 1e-2)
        assert np.abs(d - np.cos(x)).max() <= 2e-5

    def test_richardson_improves_interior(self):
        x = np.arange(0.0, math.pi + 1e-12, 1e-2)
        plain = central_difference(np.sin(x), 1e-2)
        rich = central_difference(np.sin(x), 1e-2, richardson=True)
        inner = slice(2, -2)
        err_plain = np.abs(plain[inner] - np.cos(x)[inner]).max()
        err_rich = np.abs(rich[inner] - np.cos(x)[inner]).max()
        assert err_rich < err_plain / 100.0

    def test_three_point_minimum(self):
        d = central_difference([0.0, 1.0, 4.0], 1.0)  # f = x^2 at 0,1,2
        assert d[1] == pytest.approx(2.0)
        with pytest.raises(InsufficientDataError):
            central_difference([0.0, 1.0], 1.0)

    def test_needs_positive_step(self):
        with pytest.raises(VdwBemError):
            central_difference([0.0, 1.0, 2.0], 0.0)


class TestScanSpec:
    def test_validation(self):
        with pytest.raises(VdwBemError):
            small_spec(scenario="sideways")
        with pytest.raises(VdwBemError):
            small_spec(cross_section="hexagonal")
        with pytest.raises(VdwBemError):
            small_spec(samples=(0.5, 0.4))
        with pytest.raises(VdwBemError):
            small_spec(samples=())
        with pytest.raises(VdwBemError):
            small_spec(scenario="lateral", gap_nm=-1.0)

    def test_normal_samples_must_clear_stencil(self):
        with pytest.raises(VdwBemError):
            small_spec(samples=(1e-4, 0.5))

    def test_default_steps(self):
        assert small_spec().stencil_step() == pytest.approx(1e-3)
        tor = small_spec(scenario="torque", samples=(0.0, 0.5), gap_nm=0.5)
        assert tor.stencil_step() == pytest.approx(1e-3)
        assert small_spec(length_nm=4.0, samples=(1.0, 2.0)).stencil_step() == pytest.approx(4e-3)

    def test_base_area(self):
        assert small_spec().base_area() == 1.0
        assert small_spec(cross_section="circular").base_area() == pytest.approx(math.pi / 4)
        assert small_spec(cross_section="rectangular").base_area() == 2.0

    def test_auto_refine_targets_half_gap(self):
        spec = small_spec(samples=(0.1, 0.5), resolution=MeshResolution(3))
        res = spec.effective_resolution()
        cell = spec.length_nm / (res.divisions * res.cap_refine)
        assert cell <= 0.5 * spec.min_gap()
        coarse = small_spec(samples=(0.1, 0.5), resolution=MeshResolution(3), auto_refine=False)
        assert coarse.effective_resolution() == MeshResolution(3)


class TestNormalScan:
    def test_attractive_and_decaying(self, grid24):
        spec = small_spec(cross_section="circular", grid=grid24, include_pfa=True)
        result = normal_scan(spec)
        assert np.all(result.force < 0.0)
        assert np.all(np.diff(np.abs(result.force)) < 0.0)
        # PFA column matches the half-space baseline at gap 2z
        for z, f in zip(result.coords, result.pfa_force):
            expected = 2.0 * pfa_normal_force(
                spec.base_area(), HalfSpacePair(spec.material, 2.0 * z), spec.grid
            )
            assert f == pytest.approx(expected, rel=1e-12)
        assert np.all(result.rel_diff == (result.force - result.pfa_force) / result.pfa_force)

    def test_pfa_column_independent_of_height(self, grid24):
        r1 = normal_scan(small_spec(height_nm=0.5, grid=grid24, include_pfa=True))
        r2 = normal_scan(small_spec(height_nm=1.5, grid=grid24, include_pfa=True))
        assert np.array_equal(r1.pfa_force, r2.pfa_force)

    def test_trapezoid_consistency(self, grid24):
        # grid dense enough that the trapezoid rule resolves the z^-4 force
        spec = small_spec(samples=tuple(np.linspace(0.6, 1.2, 25)), grid=grid24)
        result = normal_scan(spec)
        work = np.trapezoid(result.force, result.coords)
        delta_e = result.energies[-1] - result.energies[0]
        assert work == pytest.approx(-delta_e, rel=5e-3)

    def test_scenario_guard(self, grid24):
        with pytest.raises(VdwBemError):
            normal_scan(small_spec(scenario="lateral", samples=(-0.2, 0.0, 0.2), grid=grid24))

    def test_step_halving_diagnostic(self, grid24):
        spec = small_spec(samples=(0.5,), grid=grid24, check_step_halving=True)
        result = normal_scan(spec)
        assert result.diagnostics[0]["step_halving_rel_diff"] <= 1e-4

    def test_close_gap_warning_attached(self, grid24):
        spec = small_spec(samples=(0.12, 0.5), auto_refine=False, grid=grid24)
        result = normal_scan(spec)
        assert any("refine" in w for w in result.diagnostics[0]["warnings"])


class TestLateralScan:
    def test_symmetry_nulls(self, grid24):
        spec = small_spec(
            scenario="lateral",
            samples=tuple(np.linspace(-0.4, 0.4, 9)),
            gap_nm=0.5,
            grid=grid24,
        )
        result = lateral_scan(spec)
        peak = np.abs(result.force).max()
        mid = len(result.coords) // 2
        assert abs(result.force[mid]) <= 1e-6 * peak
        # odd symmetry
        assert np.abs(result.force + result.force[::-1]).max() <= 1e-3 * peak
        # restoring near the origin
        assert result.force[mid + 1] < 0.0 < result.force[mid - 1]

    def test_energy_even(self, grid24):
        spec = small_spec(
            scenario="lateral",
            samples=(-0.3, 0.0, 0.3),
            gap_nm=0.5,
            grid=grid24,
        )
        result = lateral_scan(spec)
        assert result.energies[0] == pytest.approx(result.energies[2], rel=1e-9)


class TestTorqueScan:
    def test_nulls_and_minimum(self, grid24):
        spec = small_spec(
            scenario="torque",
            cross_section="rectangular",
            samples=(0.0, 0.4, 0.8, 1.2, math.pi / 2.0),
            gap_nm=0.5,
            grid=grid24,
        )
        result = torque_scan(spec)
        peak = np.abs(result.force).max()
        assert abs(result.force[0]) <= 1e-6 * peak
        assert result.energies[0] < result.energies[-1]
        # restoring toward alignment on the interior
        assert np.all(result.force[1:-1] <= 0.0)


class TestScanInfrastructure:
    def test_worker_determinism(self, grid24):
        spec = small_spec(samples=(0.4, 0.7, 1.0), grid=grid24, workers=1)
        csv1 = scan_result_to_csv(run_scan(spec))
        spec2 = small_spec(samples=(0.4, 0.7, 1.0), grid=grid24, workers=2)
        csv2 = scan_result_to_csv(run_scan(spec2))
        assert csv1.replace("workers = 1", "workers = 2") == csv2

    def test_csv_shape(self, grid24):
        result = normal_scan(small_spec(grid=grid24, include_pfa=True))
        text = scan_result_to_csv(result)
        lines = [l for l in text.strip().split("\n") if not l.startswith("#")]
        assert lines[0] == "coord,energy_ev,force,pfa_force,rel_diff"
        assert len(lines) == 1 + len(result.coords)

    def test_diagnostics_recompute_force(self, grid24):
        result = normal_scan(small_spec(grid=grid24))
        for i, diag in enumerate(result.diagnostics):
            recon = -(diag["e_plus"] - diag["e_minus"]) / (2.0 * diag["fd_step"])
            assert result.force[i] == pytest.approx(recon, rel=1e-12)
