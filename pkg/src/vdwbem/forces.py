"""Energy scans and numerically differentiated forces and torques.

Scans reproduce the three experiment designs: a cylinder above a substrate
(mirror image across z = 0), two stacked cylinders displaced laterally, and
two stacked rectangular cylinders rotated against each other. Each scan
point is an independent configuration (fresh kernel); the force at a point
comes from a symmetric stencil E(x +- delta) with a small documented step,
not from differencing the coarse scan grid.

Sign conventions: normal force F = -dE/dz (negative = attraction toward
the substrate), lateral force F = -dE/dx (negative = restoring for x > 0),
torque tau = -dE/dtheta (negative = restoring toward alignment).
"""

from __future__ import annotations

import concurrent.futures
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .baselines import HalfSpacePair, pfa_normal_force
from .bem_core import FrequencyGrid, interaction_energy, make_frequency_grid
from .errors import InsufficientDataError, VdwBemError
from .geometry import (
    MeshResolution,
    RigidMotion,
    apply_motion,
    make_box_cylinder,
    make_circular_cylinder,
    mirror_across_plane,
)
from .material import GOLD, DrudeModel

__all__ = [
    "ScanSpec",
    "ScanResult",
    "central_difference",
    "normal_scan",
    "lateral_scan",
    "torque_scan",
    "run_scan",
    "scan_result_to_csv",
]

SCENARIOS = ("normal", "lateral", "torque")
CROSS_SECTIONS = ("circular", "square", "rectangular")


def central_difference(values, step: float, richardson: bool = False) -> np.ndarray:
    """Differentiate uniformly sampled values.

    Interior points use the second-order central stencil; the endpoints use
    one-sided stencils (4-point third-order when enough samples exist,
    3-point second-order otherwise) so the worst-case error stays at the
    interior O(step^2) level. With ``richardson=True`` interior points away
    from the edges get one Richardson pass combining the step and
    double-step central estimates.
    """
    f = np.asarray(values, dtype=float)
    n = f.shape[0]
    if n < 3:
        raise InsufficientDataError("central_difference needs at least 3 samples")
    if step <= 0.0:
        raise VdwBemError("step must be positive")

    d = np.empty(n)
    d[1:-1] = (f[2:] - f[:-2]) / (2.0 * step)
    if n >= 4:
        d[0] = (-11.0 * f[0] + 18.0 * f[1] - 9.0 * f[2] + 2.0 * f[3]) / (6.0 * step)
        d[-1] = (11.0 * f[-1] - 18.0 * f[-2] + 9.0 * f[-3] - 2.0 * f[-4]) / (6.0 * step)
    else:
        d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * step)
        d[-1] = (3.0 * f[-1] - 4.0 * f[-2] + f[-3]) / (2.0 * step)

    if richardson and n >= 5:
        inner = slice(2, n - 2)
        d2h = (f[4:] - f[:-4]) / (4.0 * step)
        d[inner] = (4.0 * d[inner] - d2h) / 3.0
    return d


@dataclass(frozen=True)
class ScanSpec:
    """One scan: scenario, body shape, sampling, mesh and solver settings.

    ``samples`` is the strictly increasing scan coordinate: base-to-plane
    distance z (nm) for ``normal``, lateral offset (nm) for ``lateral``,
    rotation angle (rad) for ``torque``. ``gap_nm`` is the fixed vertical
    face-to-face distance of the pair scans. ``fd_step = 0`` selects the
    default stencil step (1e-3 * L for translations, 1e-3 rad for
    rotations). With ``auto_refine`` the cap refinement is raised until the
    facing panel size is at most half the smallest gap in the scan.
    """

    scenario: str
    cross_section: str = "square"
    length_nm: float = 1.0
    height_nm: float = 1.0
    gap_nm: float = 0.5
    samples: tuple[float, ...] = ()
    resolution: MeshResolution = field(default_factory=MeshResolution)
    grid: FrequencyGrid = field(default_factory=make_frequency_grid)
    material: DrudeModel = GOLD
    fd_step: float = 0.0
    include_pfa: bool = False
    check_step_halving: bool = False
    auto_refine: bool = True
    workers: int = 1

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise VdwBemError(f"unknown scenario {self.scenario!r}")
        if self.cross_section not in CROSS_SECTIONS:
            raise VdwBemError(f"unknown cross section {self.cross_section!r}")
        if self.length_nm <= 0 or self.height_nm <= 0:
            raise VdwBemError("body dimensions must be positive")
        if self.scenario != "normal" and self.gap_nm <= 0:
            raise VdwBemError("pair scans need gap_nm > 0")
        s = np.asarray(self.samples, dtype=float)
        if s.size == 0:
            raise VdwBemError("scan needs at least one sample")
        if np.any(np.diff(s) <= 0):
            raise VdwBemError("scan samples must be strictly increasing")
        object.__setattr__(self, "samples", tuple(float(v) for v in s))
        if self.scenario == "normal" and s[0] - self.stencil_step() <= 0:
            raise VdwBemError("normal scan samples must stay positive at stencil ends")

    def stencil_step(self) -> float:
        if self.fd_step > 0:
            return self.fd_step
        return 1e-3 if self.scenario == "torque" else 1e-3 * self.length_nm

    def base_area(self) -> float:
        l = self.length_nm
        if self.cross_section == "circular":
            return math.pi * l * l / 4.0
        if self.cross_section == "square":
            return l * l
        return 2.0 * l * l

    def min_gap(self) -> float:
        """Smallest facing-surface gap reached anywhere in the scan."""
        if self.scenario == "normal":
            return 2.0 * (min(self.samples) - self.stencil_step())
        return self.gap_nm

    def effective_resolution(self) -> MeshResolution:
        """Resolution with cap refinement raised to meet panel <= gap/2."""
        res = self.resolution
        if not self.auto_refine:
            return res
        cap_cell = self.length_nm / (res.divisions * res.cap_refine)
        target = 0.5 * self.min_gap()
        if cap_cell <= target:
            return res
        needed = math.ceil(self.length_nm / (target * res.divisions))
        return MeshResolution(res.divisions, max(res.cap_refine, needed))

    def canonical_body(self):
        res = self.effective_resolution()
        l, h = self.length_nm, self.height_nm
        if self.cross_section == "circular":
            return make_circular_cylinder(l, h, res)
        if self.cross_section == "square":
            return make_box_cylinder(l, l, h, res)
        return make_box_cylinder(l, 2.0 * l, h, res)

    def configuration(self, coord: float):
        """The two meshes of this scenario at scan coordinate ``coord``."""
        body = self.canonical_body()
        if self.scenario == "normal":
            moved = apply_motion(body, RigidMotion.translate(0.0, 0.0, coord))
            return [moved, mirror_across_plane(moved, 0.0)]
        lower = apply_motion(body, RigidMotion.translate(0.0, 0.0, -self.height_nm))
        if self.scenario == "lateral":
            upper = apply_motion(body, RigidMotion.translate(coord, 0.0, self.gap_nm))
        else:
            upper = apply_motion(
                apply_motion(body, RigidMotion.rotate_z(coord)),
                RigidMotion.translate(0.0, 0.0, self.gap_nm),
            )
        return [lower, upper]


@dataclass(frozen=True)
class ScanResult:
    """Tabulated scan: coordinates, energies, derived force/torque column.

    ``force`` is in eV/nm for translation scans and eV/rad for the torque
    scan. ``diagnostics`` holds one dict per point with the stencil
    energies, panel counts and any solver warnings; ``pfa_force`` and
    ``rel_diff`` are attached for normal scans when requested.
    """

    spec: ScanSpec
    coords: np.ndarray
    energies: np.ndarray
    force: np.ndarray
    diagnostics: tuple[dict, ...]
    pfa_force: np.ndarray | None = None
    rel_diff: np.ndarray | None = None


def _energy(spec: ScanSpec, coord: float):
    r = interaction_energy(spec.configuration(coord), spec.material, spec.grid)
    return r.energy_ev, r.n_panels, r.warnings


def _scan_point(args):
    """One scan point: stencil energies and the local central difference."""
    spec, coord = args
    h = spec.stencil_step()
    e_minus, n_panels, w_minus = _energy(spec, coord - h)
    e_center, _, w_center = _energy(spec, coord)
    e_plus, _, w_plus = _energy(spec, coord + h)
    force = -central_difference([e_minus, e_center, e_plus], h)[1]
    diag = {
        "coord": coord,
        "e_minus": e_minus,
        "e_plus": e_plus,
        "fd_step": h,
        "n_panels": n_panels,
        "warnings": tuple(dict.fromkeys(w_minus + w_center + w_plus)),
    }
    if spec.check_step_halving:
        h2 = 0.5 * h
        em2 = _energy(spec, coord - h2)[0]
        ep2 = _energy(spec, coord + h2)[0]
        force_h2 = -central_difference([em2, e_center, ep2], h2)[1]
        scale = max(abs(force), abs(force_h2), 1e-300)
        diag["step_halving_rel_diff"] = abs(force - force_h2) / scale
    return e_center, force, diag


def run_scan(spec: ScanSpec) -> ScanResult:
    """Evaluate a scan point by point (optionally in parallel workers).

    Points are independent tasks; results are assembled in point order so
    the output is identical for any worker count.
    """
    tasks = [(spec, c) for c in spec.samples]
    if spec.workers > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=spec.workers) as pool:
            rows = list(pool.map(_scan_point, tasks))
    else:
        rows = [_scan_point(t) for t in tasks]

    coords = np.asarray(spec.samples)
    energies = np.array([r[0] for r in rows])
    force = np.array([r[1] for r in rows])
    diags = tuple(r[2] for r in rows)

    pfa = rel = None
    if spec.scenario == "normal" and spec.include_pfa:
        # PFA of the mirror pair: facing half spaces at gap 2z, differentiated
        # with respect to the scan coordinate z (chain-rule factor 2).
        area = spec.base_area()
        pfa = np.array(
            [
                2.0 * pfa_normal_force(
                    area, HalfSpacePair(spec.material, 2.0 * z), spec.grid
                )
                for z in coords
            ]
        )
        rel = (force - pfa) / pfa
    return ScanResult(spec, coords, energies, force, diags, pfa, rel)


def normal_scan(spec: ScanSpec) -> ScanResult:
    """Normal force between a cylinder at height z and its substrate mirror."""
    if spec.scenario != "normal":
        raise VdwBemError("normal_scan needs scenario='normal'")
    return run_scan(spec)


def lateral_scan(spec: ScanSpec) -> ScanResult:
    """Lateral force between two stacked identical cylinders at fixed gap."""
    if spec.scenario != "lateral":
        raise VdwBemError("lateral_scan needs scenario='lateral'")
    return run_scan(spec)


def torque_scan(spec: ScanSpec) -> ScanResult:
    """Torque between two stacked rectangular cylinders versus rotation angle."""
    if spec.scenario != "torque":
        raise VdwBemError("torque_scan needs scenario='torque'")
    return run_scan(spec)


def scan_result_to_csv(result: ScanResult) -> str:
    """Render a scan as CSV with a `#` header echoing the full ScanSpec."""
    spec = result.spec
    res = spec.effective_resolution()
    header = {
        "scenario": spec.scenario,
        "cross_section": spec.cross_section,
        "length_nm": spec.length_nm,
        "height_nm": spec.height_nm,
        "gap_nm": spec.gap_nm,
        "mesh_divisions": res.divisions,
        "mesh_cap_refine": res.cap_refine,
        "material_plasma_energy_ev": spec.material.plasma_energy_ev,
        "material_damping_energy_ev": spec.material.damping_energy_ev,
        "frequency_scale_ev": spec.grid.scale_ev,
        "frequency_nodes": spec.grid.n,
        "fd_step": spec.stencil_step(),
        "workers": spec.workers,
        "units": "coord nm|rad, energy eV, force eV/nm|eV/rad",
    }
    lines = [f"# {k} = {v}" for k, v in header.items()]
    for diag in result.diagnostics:
        for w in diag["warnings"]:
            lines.append(f"# warning[coord={diag['coord']:.17g}]: {w}")
    cols = ["coord", "energy_ev", "force"]
    if result.pfa_force is not None:
        cols += ["pfa_force", "rel_diff"]
    lines.append(",".join(cols))
    for i in range(result.coords.shape[0]):
        row = [result.coords[i], result.energies[i], result.force[i]]
        if result.pfa_force is not None:
            row += [result.pfa_force[i], result.rel_diff[i]]
        lines.append(",".join(f"{v:.17g}" for v in row))
    return "\n".join(lines) + "\n"
