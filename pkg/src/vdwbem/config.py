"""Flat key-value run configuration.

The config text format is one `dotted.key = value` assignment per line,
with `#` comments (full-line or trailing) and blank lines ignored. Every
key is validated against the schema below before any computation starts;
unknown keys, bad types, duplicate assignments and constraint violations
raise :class:`ConfigError` naming the key and line. The canonical echo
(:meth:`RunConfig.to_text`) lists every effective key including defaults
and re-parses to an identical configuration.
"""

from __future__ import annotations

from dataclasses import dataclass, fields

from .errors import ConfigError

__all__ = ["RunConfig", "parse_config", "CONFIG_SCHEMA"]


def _positive(v):
    return v > 0


def _non_negative(v):
    return v >= 0


def _at_least(n):
    return lambda v: v >= n


def _choice(*options):
    return lambda v: v in options


def _int_list(text: str):
    return tuple(int(tok.strip()) for tok in text.split(",") if tok.strip())


def _float_list(text: str):
    return tuple(float(tok.strip()) for tok in text.split(",") if tok.strip())


def _parse_bool(text: str):
    low = text.strip().lower()
    if low in ("true", "yes", "1", "on"):
        return True
    if low in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


# key -> (attribute, parser, default, constraint, constraint description)
CONFIG_SCHEMA = {
    "scenario": ("scenario", str, "normal", _choice("normal", "lateral", "torque"),
                 "one of normal|lateral|torque"),
    "geometry.cross_section": ("cross_section", str, "square",
                               _choice("circular", "square", "rectangular"),
                               "one of circular|square|rectangular"),
    "geometry.l_nm": ("l_nm", float, 1.0, _positive, "> 0"),
    "geometry.h_nm": ("h_nm", float, 1.0, _positive, "> 0"),
    "geometry.gap_nm": ("gap_nm", float, 0.5, _positive, "> 0"),
    "mesh.divisions": ("divisions", int, 8, _at_least(2), ">= 2"),
    "mesh.cap_refine": ("cap_refine", int, 1, _at_least(1), ">= 1"),
    "material.plasma_energy_ev": ("plasma_energy_ev", float, 9.0, _positive, "> 0"),
    "material.damping_energy_ev": ("damping_energy_ev", float, 0.035, _non_negative, ">= 0"),
    "frequency.scale_ev": ("scale_ev", float, 9.0, _positive, "> 0"),
    "frequency.nodes": ("nodes", int, 48, _at_least(4), ">= 4"),
    "scan.start": ("scan_start", float, 0.1, None, ""),
    "scan.stop": ("scan_stop", float, 1.0, None, ""),
    "scan.count": ("scan_count", int, 8, _at_least(1), ">= 1"),
    "scan.fd_step": ("fd_step", float, 0.0, _non_negative, ">= 0 (0 = auto)"),
    "scan.include_pfa": ("include_pfa", _parse_bool, False, None, ""),
    "scan.check_step_halving": ("check_step_halving", _parse_bool, False, None, ""),
    "scan.auto_refine": ("auto_refine", _parse_bool, True, None, ""),
    "baseline.kind": ("baseline_kind", str, "pfa", _choice("pfa", "lj"), "one of pfa|lj"),
    "baseline.voxel_resolution": ("voxel_resolution", int, 8, _at_least(2), ">= 2"),
    "validate.sphere_resolutions": ("sphere_resolutions", _int_list, (8, 11, 14),
                                    lambda v: len(v) >= 3 and all(r >= 2 for r in v),
                                    "comma list of >= 3 integers, each >= 2"),
    "validate.sphere_radius_nm": ("sphere_radius_nm", float, 1.0, _positive, "> 0"),
    "validate.far_field_resolution": ("far_field_resolution", int, 10, _at_least(2), ">= 2"),
    "validate.far_field_distances": ("far_field_distances", _float_list, (10.0,),
                                     lambda v: len(v) >= 1 and all(d > 0 for d in v),
                                     "comma list of positive distances (nm)"),
    "validate.far_field_tolerances": ("far_field_tolerances", _float_list, (0.05,),
                                      lambda v: len(v) >= 1 and all(t > 0 for t in v),
                                      "comma list of positive tolerances"),
    "convergence.steps": ("convergence_steps", int, 2, _at_least(2), ">= 2"),
}

_ATTR_TO_KEY = {spec[0]: key for key, spec in CONFIG_SCHEMA.items()}


def _format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, tuple):
        return ",".join(_format_value(v) for v in value)
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


@dataclass(frozen=True)
class RunConfig:
    """Validated run configuration; one attribute per schema key."""

    scenario: str = "normal"
    cross_section: str = "square"
    l_nm: float = 1.0
    h_nm: float = 1.0
    gap_nm: float = 0.5
    divisions: int = 8
    cap_refine: int = 1
    plasma_energy_ev: float = 9.0
    damping_energy_ev: float = 0.035
    scale_ev: float = 9.0
    nodes: int = 48
    scan_start: float = 0.1
    scan_stop: float = 1.0
    scan_count: int = 8
    fd_step: float = 0.0
    include_pfa: bool = False
    check_step_halving: bool = False
    auto_refine: bool = True
    baseline_kind: str = "pfa"
    voxel_resolution: int = 8
    sphere_resolutions: tuple = (8, 11, 14)
    sphere_radius_nm: float = 1.0
    far_field_resolution: int = 10
    far_field_distances: tuple = (10.0,)
    far_field_tolerances: tuple = (0.05,)
    convergence_steps: int = 2

    def __post_init__(self):
        for f in fields(self):
            key = _ATTR_TO_KEY[f.name]
            _, _, _, constraint, desc = CONFIG_SCHEMA[key]
            if constraint is not None and not constraint(getattr(self, f.name)):
                raise ConfigError(f"constraint violated: must be {desc}", key=key)
        if self.scan_count > 1 and self.scan_stop <= self.scan_start:
            raise ConfigError(
                "constraint violated: must exceed scan.start for multi-point scans",
                key="scan.stop",
            )
        if len(self.far_field_distances) != len(self.far_field_tolerances):
            raise ConfigError(
                "constraint violated: must match validate.far_field_distances length",
                key="validate.far_field_tolerances",
            )

    def to_text(self) -> str:
        """Canonical echo of every effective key (defaults included)."""
        lines = ["# vdwbem run configuration (effective values)"]
        for key in sorted(CONFIG_SCHEMA):
            attr = CONFIG_SCHEMA[key][0]
            lines.append(f"{key} = {_format_value(getattr(self, attr))}")
        return "\n".join(lines) + "\n"

    def header_lines(self) -> list[str]:
        return [f"# {line}" if not line.startswith("#") else line
                for line in self.to_text().strip().split("\n")]


def parse_config(text: str) -> RunConfig:
    """Parse config text into a validated :class:`RunConfig`.

    Unknown keys, duplicates, type mismatches and constraint violations
    raise :class:`ConfigError` naming the key and the line number.
    """
    values = {}
    seen = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {line!r}", line=lineno)
        key, _, val = line.partition("=")
        key = key.strip()
        val = val.strip()
        if key not in CONFIG_SCHEMA:
            raise ConfigError("unknown key", key=key, line=lineno)
        if key in seen:
            raise ConfigError(
                f"duplicate key (first set on line {seen[key]})", key=key, line=lineno
            )
        seen[key] = lineno
        attr, parser, _, constraint, desc = CONFIG_SCHEMA[key]
        try:
            parsed = parser(val)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad value {val!r}: {exc}", key=key, line=lineno) from None
        if constraint is not None and not constraint(parsed):
            raise ConfigError(
                f"constraint violated: must be {desc}", key=key, line=lineno
            )
        values[attr] = parsed
    return RunConfig(**values)
