"""Command-line interface: scenario orchestration and CSV emission.

Subcommands: ``mesh``, ``energy``, ``scan``, ``baseline``, ``validate``,
``convergence``. All artifacts are comma-separated CSV with `#` header
lines embedding the full effective configuration; identical inputs produce
byte-identical artifacts regardless of the worker count.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .baselines import (
    HalfSpacePair,
    hamaker_constant,
    lifshitz_energy_per_area,
    lj_pairwise_energy,
    pfa_normal_force,
    voxelize,
)
from .bem_core import interaction_energy, make_frequency_grid
from .config import RunConfig, parse_config
from .errors import VdwBemError
from .forces import ScanSpec, run_scan, scan_result_to_csv
from .geometry import MeshResolution, save_mesh
from .material import DrudeModel
from .validation import run_default_oracles

__all__ = ["main", "run"]


def _material(cfg: RunConfig) -> DrudeModel:
    return DrudeModel(cfg.plasma_energy_ev, cfg.damping_energy_ev)


def _samples(cfg: RunConfig) -> tuple[float, ...]:
    if cfg.scan_count == 1:
        return (cfg.scan_start,)
    return tuple(np.linspace(cfg.scan_start, cfg.scan_stop, cfg.scan_count))


def _scan_spec(cfg: RunConfig, workers: int) -> ScanSpec:
    return ScanSpec(
        scenario=cfg.scenario,
        cross_section=cfg.cross_section,
        length_nm=cfg.l_nm,
        height_nm=cfg.h_nm,
        gap_nm=cfg.gap_nm,
        samples=_samples(cfg),
        resolution=MeshResolution(cfg.divisions, cfg.cap_refine),
        grid=make_frequency_grid(cfg.scale_ev, cfg.nodes),
        material=_material(cfg),
        fd_step=cfg.fd_step,
        include_pfa=cfg.include_pfa,
        check_step_halving=cfg.check_step_halving,
        auto_refine=cfg.auto_refine,
        workers=workers,
    )


def _write(path: Path, cfg: RunConfig, body_lines: list[str]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    text = "\n".join(cfg.header_lines() + body_lines) + "\n"
    path.write_text(text, encoding="utf-8")


def _cmd_mesh(cfg: RunConfig, out: Path, workers: int, emit_integrand: bool) -> str:
    spec = _scan_spec(cfg, workers)
    body = spec.canonical_body()
    path = out / f"mesh_{cfg.cross_section}.txt"
    path.parent.mkdir(parents=True, exist_ok=True)
    params = {line[2:].split(" = ")[0]: line[2:].split(" = ")[1]
              for line in cfg.header_lines()[1:]}
    save_mesh(body, path, params)
    return f"mesh: wrote {path} ({body.n_panels} panels)"


def _cmd_energy(cfg: RunConfig, out: Path, workers: int, emit_integrand: bool) -> str:
    spec = _scan_spec(cfg, workers)
    coord = cfg.scan_start
    result = interaction_energy(spec.configuration(coord), spec.material, spec.grid)
    lines = [f"# warning: {w}" for w in result.warnings]
    lines += [
        f"# n_panels = {result.n_panels}",
        f"# method = {result.method}",
        "coord,energy_ev",
        f"{coord:.17g},{result.energy_ev:.17g}",
    ]
    _write(out / "energy.csv", cfg, lines)
    if emit_integrand:
        rows = ["xi_ev,integrand"]
        rows += [
            f"{x:.17g},{v:.17g}"
            for x, v in zip(result.grid.nodes, result.integrand)
        ]
        _write(out / "integrand.csv", cfg, rows)
    return (
        f"energy: {result.energy_ev:.6e} eV at coord {coord} "
        f"(N={result.n_panels}, nodes={result.node_count}, method={result.method})"
    )


def _cmd_scan(cfg: RunConfig, out: Path, workers: int, emit_integrand: bool) -> str:
    spec = _scan_spec(cfg, workers)
    result = run_scan(spec)
    path = out / f"scan_{cfg.scenario}.csv"
    body = scan_result_to_csv(result).rstrip("\n").split("\n")
    _write(path, cfg, body)
    return f"scan: wrote {path} ({len(result.coords)} points, scenario {cfg.scenario})"


def _cmd_baseline(cfg: RunConfig, out: Path, workers: int, emit_integrand: bool) -> str:
    grid = make_frequency_grid(cfg.scale_ev, cfg.nodes)
    material = _material(cfg)
    if cfg.baseline_kind == "pfa":
        spec = _scan_spec(cfg, workers)
        area = spec.base_area()
        lines = ["d,energy_per_area,pfa_force"]
        for d in _samples(cfg):
            pair = HalfSpacePair(material, d)
            ea = lifshitz_energy_per_area(pair, grid)
            f = pfa_normal_force(area, pair, grid)
            lines.append(f"{d:.17g},{ea:.17g},{f:.17g}")
        path = out / "baseline_pfa.csv"
        _write(path, cfg, lines)
        return f"baseline: wrote {path} ({cfg.scan_count} gaps, pfa)"

    a_h = hamaker_constant(material, grid)
    kind = "cylinder" if cfg.cross_section == "circular" else "box"
    dims = (
        (cfg.l_nm, cfg.h_nm)
        if kind == "cylinder"
        else (cfg.l_nm, cfg.l_nm if cfg.cross_section == "square" else 2 * cfg.l_nm, cfg.h_nm)
    )
    body = voxelize(kind, dims, cfg.voxel_resolution)
    lines = [f"# hamaker_ev = {a_h:.17g}", "offset,lj_energy"]
    for offset in _samples(cfg):
        lower = body.translated(0.0, 0.0, -(cfg.h_nm + offset) / 2.0)
        upper = body.translated(0.0, 0.0, (cfg.h_nm + offset) / 2.0)
        u = lj_pairwise_energy(lower, upper, a_h)
        lines.append(f"{offset:.17g},{u:.17g}")
    path = out / "baseline_lj.csv"
    _write(path, cfg, lines)
    return f"baseline: wrote {path} ({cfg.scan_count} offsets, lj)"


def _cmd_validate(cfg: RunConfig, out: Path, workers: int, emit_integrand: bool) -> str:
    reports = run_default_oracles(
        material=_material(cfg),
        sphere_resolutions=cfg.sphere_resolutions,
        sphere_radius=cfg.sphere_radius_nm,
        far_field_resolution=cfg.far_field_resolution,
        far_field_distances=cfg.far_field_distances,
        far_field_tolerances=cfg.far_field_tolerances,
        grid=make_frequency_grid(cfg.scale_ev, cfg.nodes),
    )
    lines = ["oracle,computed,reference,rel_err,pass"]
    lines += [r.to_csv_row() for r in reports]
    _write(out / "validate.csv", cfg, lines)
    n_pass = sum(r.passed for r in reports)
    summary = f"validate: {n_pass}/{len(reports)} oracles passed"
    if n_pass != len(reports):
        failed = ", ".join(r.name for r in reports if not r.passed)
        raise VdwBemError(f"{summary} (failed: {failed})")
    return summary


def _cmd_convergence(cfg: RunConfig, out: Path, workers: int, emit_integrand: bool) -> str:
    lines = ["divisions,n_panels,energy_ev,delta_pct"]
    previous = None
    for step in range(cfg.convergence_steps):
        divisions = cfg.divisions + step
        spec = ScanSpec(
            scenario=cfg.scenario,
            cross_section=cfg.cross_section,
            length_nm=cfg.l_nm,
            height_nm=cfg.h_nm,
            gap_nm=cfg.gap_nm,
            samples=(cfg.scan_start,),
            resolution=MeshResolution(divisions, cfg.cap_refine),
            grid=make_frequency_grid(cfg.scale_ev, cfg.nodes),
            material=_material(cfg),
            auto_refine=cfg.auto_refine,
        )
        result = interaction_energy(
            spec.configuration(cfg.scan_start), spec.material, spec.grid
        )
        if previous is None:
            delta = ""
        else:
            delta = f"{100.0 * abs(result.energy_ev - previous) / abs(previous):.6g}"
        lines.append(
            f"{divisions},{result.n_panels},{result.energy_ev:.17g},{delta}"
        )
        previous = result.energy_ev
    path = out / "convergence.csv"
    _write(path, cfg, lines)
    return f"convergence: wrote {path} ({cfg.convergence_steps} rungs)"


_COMMANDS = {
    "mesh": _cmd_mesh,
    "energy": _cmd_energy,
    "scan": _cmd_scan,
    "baseline": _cmd_baseline,
    "validate": _cmd_validate,
    "convergence": _cmd_convergence,
}


def run(
    subcommand: str,
    config: RunConfig,
    out_dir=".",
    workers: int = 1,
    emit_integrand: bool = False,
) -> int:
    """Execute one subcommand; returns the process exit status."""
    if subcommand not in _COMMANDS:
        print(f"error: unknown subcommand {subcommand!r}", file=sys.stderr)
        return 2
    try:
        summary = _COMMANDS[subcommand](config, Path(out_dir), workers, emit_integrand)
    except VdwBemError as exc:
        print(f"error [{subcommand}]: {exc}", file=sys.stderr)
        return 1
    print(summary)
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="vdwbem",
        description="Boundary-element van der Waals forces between finite bodies",
    )
    parser.add_argument("subcommand", choices=sorted(_COMMANDS))
    parser.add_argument("--config", help="config file (flat key = value lines)")
    parser.add_argument("--out", default=".", help="output directory for artifacts")
    parser.add_argument("--workers", type=int, default=1, help="parallel worker budget")
    parser.add_argument(
        "--emit-integrand",
        action="store_true",
        help="also write the per-node integrand CSV (energy subcommand)",
    )
    args = parser.parse_args(argv)

    try:
        text = Path(args.config).read_text(encoding="utf-8") if args.config else ""
        config = parse_config(text)
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return 2
    except VdwBemError as exc:
        print(f"error [config]: {exc}", file=sys.stderr)
        return 2

    return run(args.subcommand, config, args.out, args.workers, args.emit_integrand)


if __name__ == "__main__":
    sys.exit(main())
