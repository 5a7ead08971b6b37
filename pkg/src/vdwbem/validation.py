"""Independent analytic oracles that gate the solver.

Three oracles, none of which share numerical kernels with the solver path
they check:

* sphere spectrum: the double-layer operator of a sphere has eigenvalues
  -2 pi / (2l + 1) with degeneracy 2l + 1 (l = 0 gives the simple -2 pi
  anchor). Zero-diagonal point collocation carries a known near-uniform
  positive spectral shift from the omitted self-panel neighborhood (first
  order in panel size, identical for every cluster); the check therefore
  reports both the raw cluster errors and the errors after removing the
  shift measured on the exactly-known l = 0 anchor, and gates on the
  latter. Raw errors must still decrease monotonically along the ladder.
* London far field: two spheres at large center distance d obey
  E = -C6 / d^6 with C6 = (3 / pi) integral d(hbar xi) [a^3 (eps - 1) /
  (eps + 2)]^2, evaluated here by adaptive quadrature independent of the
  solver's frequency grid.
* dual quadrature: the same C6 from the solver-style Gauss-Legendre grid
  must agree with the adaptive route to 1e-8.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.integrate

from .bem_core import FrequencyGrid, assemble_kernel, make_frequency_grid, interaction_energy
from .errors import CoarseMeshError, VdwBemError
from .geometry import MeshResolution, RigidMotion, apply_motion, make_sphere
from .material import GOLD, DrudeModel, eps_imaginary

__all__ = [
    "OracleReport",
    "sphere_spectrum_check",
    "london_c6",
    "two_sphere_far_field_check",
    "run_default_oracles",
]

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class OracleReport:
    """One oracle outcome: computed vs reference values and the gate verdict."""

    name: str
    computed: tuple[float, ...]
    reference: tuple[float, ...]
    rel_err: float
    tolerance: float
    passed: bool
    details: dict = field(default_factory=dict)

    def to_csv_row(self) -> str:
        comp = "|".join(f"{v:.10g}" for v in self.computed)
        ref = "|".join(f"{v:.10g}" for v in self.reference)
        return f"{self.name},{comp},{ref},{self.rel_err:.6e},{str(self.passed).lower()}"


def _cluster(eigs_real: np.ndarray, center: float, count: int):
    """The ``count`` eigenvalues nearest ``center``, checked for separation."""
    order = np.argsort(np.abs(eigs_real - center))
    sel = np.sort(eigs_real[order[:count]])
    rest = eigs_real[order[count:]]
    width = float(sel.max() - sel.min())
    gap = float(np.abs(rest - center).min()) - float(np.abs(sel - center).max())
    if gap <= 0.0 or (width > 0 and gap < width):
        raise CoarseMeshError(
            f"cluster at {center:.4f} not separated (width {width:.3g}, gap {gap:.3g})"
        )
    return sel


def sphere_spectrum_check(
    resolutions=(8, 11, 14),
    radius: float = 1.0,
    lmax: int = 3,
    tol_l1: float = 0.02,
    tol_l2: float = 0.03,
) -> OracleReport:
    """Compare sphere kernel eigenvalue clusters against -2 pi / (2l + 1).

    Needs at least 3 resolutions. Reports, per resolution, the raw and
    anchor-corrected cluster errors for l = 1..lmax plus the convergence
    order of the raw l = 1 error; the gate is the corrected l = 1 (l = 2)
    cluster error at the finest rung against ``tol_l1`` (``tol_l2``),
    together with raw errors decreasing along the ladder.
    """
    resolutions = tuple(int(r) for r in resolutions)
    if len(resolutions) < 3:
        raise VdwBemError("sphere_spectrum_check needs >= 3 resolutions")
    per_res = []
    for res in resolutions:
        mesh = make_sphere(radius, MeshResolution(res))
        eigs = np.linalg.eigvals(assemble_kernel([mesh]).matrix).real
        anchor = _cluster(eigs, -TWO_PI, 1)[0]
        shift = float(anchor + TWO_PI)
        entry = {"resolution": res, "n_panels": mesh.n_panels, "shift": shift}
        for l in range(1, lmax + 1):
            target = -TWO_PI / (2 * l + 1)
            # Clusters are searched around target + shift: the collocation
            # shift moves every cluster in lockstep, and at desk resolutions
            # the raw targets would otherwise mix neighboring l groups.
            sel = _cluster(eigs, target + shift, 2 * l + 1)
            entry[f"l{l}_raw_err"] = float(np.abs(sel - target).max() / abs(target))
            entry[f"l{l}_corr_err"] = float(
                np.abs(sel - shift - target).max() / abs(target)
            )
            entry[f"l{l}_cluster_mean"] = float(sel.mean())
        per_res.append(entry)

    raw1 = [e["l1_raw_err"] for e in per_res]
    monotone = all(b < a for a, b in zip(raw1, raw1[1:]))
    hs = [1.0 / e["resolution"] for e in per_res]
    order = float(
        np.polyfit(np.log(hs), np.log(raw1), 1)[0]
    )
    finest = per_res[-1]
    err1 = finest["l1_corr_err"]
    err2 = finest["l2_corr_err"] if lmax >= 2 else 0.0
    passed = monotone and err1 <= tol_l1 and err2 <= tol_l2
    computed = [finest["l1_cluster_mean"] - finest["shift"]]
    reference = [-TWO_PI / 3.0]
    if lmax >= 2:
        computed.append(finest["l2_cluster_mean"] - finest["shift"])
        reference.append(-TWO_PI / 5.0)
    return OracleReport(
        name="sphere_spectrum",
        computed=tuple(computed),
        reference=tuple(reference),
        rel_err=max(err1, err2),
        tolerance=max(tol_l1, tol_l2),
        passed=passed,
        details={
            "per_resolution": per_res,
            "raw_l1_errors": raw1,
            "raw_errors_monotone": monotone,
            "convergence_order": order,
            "tol_l1": tol_l1,
            "tol_l2": tol_l2,
        },
    )


def _polarizability(material: DrudeModel, radius: float, xi):
    e = eps_imaginary(material, xi)
    return radius**3 * (e - 1.0) / (e + 2.0)


def london_c6(material: DrudeModel, radius: float, grid: FrequencyGrid | None = None) -> float:
    """London coefficient C6 (eV nm^6) of two identical spheres.

    C6 = (3 / pi) integral_0^inf d(hbar xi) alpha(i xi)^2 with
    alpha = a^3 (eps - 1) / (eps + 2). Without a grid the integral is done
    by adaptive quadrature (independent of the solver); with a grid it uses
    that grid's nodes and weights.
    """
    if grid is None:
        val, _ = scipy.integrate.quad(
            lambda x: _polarizability(material, radius, x) ** 2, 0.0, np.inf, limit=200
        )
        return 3.0 / math.pi * val
    return 3.0 / math.pi * grid.integrate(
        _polarizability(material, radius, grid.nodes) ** 2
    )


def two_sphere_far_field_check(
    material: DrudeModel = GOLD,
    radius: float = 1.0,
    distances=(10.0,),
    tolerances=(0.05,),
    resolution: int = 10,
    grid: FrequencyGrid | None = None,
) -> OracleReport:
    """Compare solver energies for two spheres against the dipolar far field.

    Center distances must be at least 8 radii so the -C6/d^6 reference is
    meaningful. Reports per-distance relative errors; passes when each is
    within its stated tolerance.
    """
    distances = tuple(float(d) for d in distances)
    tolerances = tuple(float(t) for t in tolerances)
    if len(distances) != len(tolerances):
        raise VdwBemError("need one tolerance per distance")
    if any(d < 8.0 * radius for d in distances):
        raise VdwBemError("far-field check needs center distances >= 8 radii")
    grid = grid or make_frequency_grid()
    c6 = london_c6(material, radius)
    sphere = make_sphere(radius, MeshResolution(resolution))
    energies, refs, errs = [], [], []
    for d in distances:
        other = apply_motion(sphere, RigidMotion.translate(0.0, 0.0, d))
        e = interaction_energy([sphere, other], material, grid).energy_ev
        ref = -c6 / d**6
        energies.append(e)
        refs.append(ref)
        errs.append(abs(e - ref) / abs(ref))
    passed = all(e <= t for e, t in zip(errs, tolerances))
    return OracleReport(
        name="two_sphere_far_field",
        computed=tuple(energies),
        reference=tuple(refs),
        rel_err=max(errs),
        tolerance=max(tolerances),
        passed=passed,
        details={
            "distances": distances,
            "relative_errors": tuple(errs),
            "tolerances": tolerances,
            "c6": c6,
            "resolution": resolution,
        },
    )


def run_default_oracles(
    material: DrudeModel = GOLD,
    sphere_resolutions=(8, 11, 14),
    sphere_radius: float = 1.0,
    far_field_resolution: int = 10,
    far_field_distances=(10.0,),
    far_field_tolerances=(0.05,),
    grid: FrequencyGrid | None = None,
) -> list[OracleReport]:
    """The release-gating oracle battery used by the `validate` subcommand."""
    grid = grid or make_frequency_grid()
    reports = [
        sphere_spectrum_check(sphere_resolutions, sphere_radius),
    ]

    c6_quad = london_c6(material, sphere_radius)
    c6_grid = london_c6(material, sphere_radius, make_frequency_grid(grid.scale_ev, 64))
    dual_err = abs(c6_grid - c6_quad) / abs(c6_quad)
    reports.append(
        OracleReport(
            name="london_c6_dual_quadrature",
            computed=(c6_grid,),
            reference=(c6_quad,),
            rel_err=dual_err,
            tolerance=1e-8,
            passed=dual_err <= 1e-8,
            details={"radius": sphere_radius},
        )
    )

    reports.append(
        two_sphere_far_field_check(
            material,
            sphere_radius,
            far_field_distances,
            far_field_tolerances,
            far_field_resolution,
            grid,
        )
    )
    return reports
