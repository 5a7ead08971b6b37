"""Boundary-element van der Waals dispersion forces between finite 3D bodies."""

from .baselines import (
    HalfSpacePair,
    VoxelBody,
    hamaker_constant,
    li3,
    lifshitz_energy_per_area,
    lj_pairwise_energy,
    pfa_normal_force,
    voxelize,
)
from .bem_core import (
    EnergyResult,
    FrequencyGrid,
    KernelMatrix,
    Spectrum,
    assemble_kernel,
    interaction_energy,
    interaction_logdet,
    logdet_lu,
    logdet_spectral,
    make_frequency_grid,
    spectrum,
)
from .geometry import (
    MeshResolution,
    Panel,
    RigidMotion,
    SurfaceMesh,
    apply_motion,
    load_mesh,
    make_box_cylinder,
    make_circular_cylinder,
    make_sphere,
    mirror_across_plane,
    save_mesh,
)
from .config import RunConfig, parse_config
from .forces import (
    ScanResult,
    ScanSpec,
    central_difference,
    lateral_scan,
    normal_scan,
    run_scan,
    scan_result_to_csv,
    torque_scan,
)
from .material import (
    GOLD,
    DrudeModel,
    eps_imaginary,
    half_space_reflection,
    lambda_of_eps,
)
from .validation import (
    OracleReport,
    london_c6,
    run_default_oracles,
    sphere_spectrum_check,
    two_sphere_far_field_check,
)

__version__ = "0.1.0"

__all__ = [
    "DrudeModel",
    "EnergyResult",
    "FrequencyGrid",
    "GOLD",
    "HalfSpacePair",
    "KernelMatrix",
    "MeshResolution",
    "OracleReport",
    "Panel",
    "RigidMotion",
    "RunConfig",
    "ScanResult",
    "ScanSpec",
    "Spectrum",
    "SurfaceMesh",
    "VoxelBody",
    "apply_motion",
    "assemble_kernel",
    "central_difference",
    "eps_imaginary",
    "half_space_reflection",
    "hamaker_constant",
    "interaction_energy",
    "interaction_logdet",
    "lambda_of_eps",
    "lateral_scan",
    "li3",
    "lifshitz_energy_per_area",
    "lj_pairwise_energy",
    "load_mesh",
    "logdet_lu",
    "logdet_spectral",
    "london_c6",
    "make_box_cylinder",
    "make_circular_cylinder",
    "make_frequency_grid",
    "make_sphere",
    "mirror_across_plane",
    "normal_scan",
    "parse_config",
    "pfa_normal_force",
    "run_default_oracles",
    "run_scan",
    "save_mesh",
    "scan_result_to_csv",
    "sphere_spectrum_check",
    "spectrum",
    "torque_scan",
    "two_sphere_far_field_check",
    "voxelize",
]
