"""Kernel assembly and imaginary-frequency energy integration.

The coupled-panel system is ``R(xi) = lambda(xi) I + K`` where ``K`` is the
frequency-independent double-layer matrix

    K[i, j] = n_j . (r_i - r_j) / |r_i - r_j|^3 * A_j   (i != j),  K[i, i] = 0

and ``lambda = 2 pi (eps + 1) / (eps - 1)`` carries the whole material and
frequency dependence on the diagonal. The interaction energy is

    E = (1 / 2 pi) * integral_0^inf d(hbar xi) [ logdet R_full - sum_b logdet R_bb ]

with the sign fixed so two like-material bodies attract (E < 0); the far
field of this expression is validated against the dipolar-limit oracle in
the validation module.

Because only the diagonal of R depends on frequency, K (and its diagonal
body blocks) are eigendecomposed once per configuration; every frequency
node then costs O(N). An LU path over ``lambda I + K`` is kept as an
independent cross-check and as the fallback for large N.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import (
    GeometryOverlapError,
    NumericalError,
    SingularDeterminantError,
    VdwBemError,
)
from .geometry import SurfaceMesh
from .material import DrudeModel, eps_imaginary, lambda_of_eps

__all__ = [
    "KernelMatrix",
    "Spectrum",
    "FrequencyGrid",
    "EnergyResult",
    "assemble_kernel",
    "spectrum",
    "logdet_spectral",
    "logdet_lu",
    "interaction_logdet",
    "make_frequency_grid",
    "interaction_energy",
]

TWO_PI = 2.0 * math.pi

# Below this centroid separation (nm) two panels of different bodies are
# treated as coincident geometry rather than a converging configuration.
MIN_CROSS_DISTANCE_NM = 1e-9

_ASSEMBLY_ROW_CHUNK = 256


@dataclass(frozen=True)
class KernelMatrix:
    """Dense frequency-independent kernel with per-body block ranges.

    ``blocks[b] = (start, stop)`` maps body ``b`` to contiguous rows/columns.
    ``min_cross_distance`` / ``facing_panel_size`` are assembly diagnostics
    for the panel-size <= gap/2 meshing rule (sizes as sqrt(area), nm).
    """

    matrix: np.ndarray
    blocks: tuple[tuple[int, int], ...]
    labels: tuple[str, ...]
    min_cross_distance: float = math.inf
    facing_panel_size: float = 0.0

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def body_block(self, b: int) -> np.ndarray:
        i0, i1 = self.blocks[b]
        return self.matrix[i0:i1, i0:i1]

    def cross_blocks_all_zero(self) -> bool:
        mask = np.ones_like(self.matrix, dtype=bool)
        for i0, i1 in self.blocks:
            mask[i0:i1, i0:i1] = False
        return not np.any(self.matrix[mask])


@dataclass(frozen=True)
class Spectrum:
    """All eigenvalues of a (real, nonsymmetric) kernel matrix."""

    eigenvalues: np.ndarray

    @property
    def n(self) -> int:
        return self.eigenvalues.shape[0]

    def trace(self) -> complex:
        return complex(self.eigenvalues.sum())


def assemble_kernel(meshes) -> KernelMatrix:
    """Assemble the N x N double-layer collocation matrix for one or more bodies.

    O(N^2) in time and memory; rows are processed in fixed-size chunks so the
    temporary pairwise-difference tensors stay small. Raises
    :class:`GeometryOverlapError` when centroids of different bodies come
    closer than ``MIN_CROSS_DISTANCE_NM``.
    """
    meshes = list(meshes)
    if not meshes:
        raise VdwBemError("assemble_kernel needs at least one mesh")
    cents = np.vstack([m.centroids for m in meshes])
    norms = np.vstack([m.normals for m in meshes])
    areas = np.concatenate([m.areas for m in meshes])
    n = cents.shape[0]
    if n < 2:
        raise VdwBemError("assemble_kernel needs at least 2 panels")

    blocks = []
    labels = []
    start = 0
    for m in meshes:
        blocks.append((start, start + m.n_panels))
        labels.append(m.body_label)
        start += m.n_panels
    body_of = np.concatenate(
        [np.full(m.n_panels, b) for b, m in enumerate(meshes)]
    )

    k = np.empty((n, n))
    min_cross = math.inf
    min_pair = (0, 0)
    for i0 in range(0, n, _ASSEMBLY_ROW_CHUNK):
        i1 = min(i0 + _ASSEMBLY_ROW_CHUNK, n)
        diff = cents[i0:i1, None, :] - cents[None, :, :]
        r2 = np.einsum("ijk,ijk->ij", diff, diff)
        dot = np.einsum("ijk,jk->ij", diff, norms)

        rows = np.arange(i0, i1)
        r2[rows - i0, rows] = 1.0  # diagonal placeholder, zeroed below
        if len(meshes) > 1:
            cross = body_of[i0:i1, None] != body_of[None, :]
            if np.any(cross):
                r2_cross = np.where(cross, r2, np.inf)
                flat = int(np.argmin(r2_cross))
                ci, cj = divmod(flat, n)
                if r2_cross[ci, cj] < min_cross**2:
                    min_cross = math.sqrt(r2_cross[ci, cj])
                    min_pair = (i0 + ci, cj)
        if min_cross < MIN_CROSS_DISTANCE_NM:
            raise GeometryOverlapError(
                f"panel centroids of different bodies {min_cross:.3e} nm apart "
                f"(guard {MIN_CROSS_DISTANCE_NM} nm)"
            )

        k[i0:i1] = dot * areas[None, :] / (r2 * np.sqrt(r2))
        k[rows, rows] = 0.0
    facing = 0.0
    if len(meshes) > 1 and math.isfinite(min_cross):
        i, j = min_pair
        facing = math.sqrt(max(areas[i], areas[j]))
    return KernelMatrix(k, tuple(blocks), tuple(labels), min_cross, facing)


def _eigvals(matrix: np.ndarray) -> np.ndarray:
    try:
        return np.linalg.eigvals(matrix)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(
            f"eigenvalue solver failed for N = {matrix.shape[0]}: {exc}",
            n=matrix.shape[0],
        ) from exc


def spectrum(kernel: KernelMatrix) -> Spectrum:
    """Eigenvalues of the full kernel matrix (conjugate-paired, trace ~ 0)."""
    return Spectrum(_eigvals(kernel.matrix))


def _sum_log(eigenvalues: np.ndarray, lam: float) -> float:
    shifted = lam + eigenvalues
    small = np.abs(shifted)
    if np.any(small < 1e-14):
        raise SingularDeterminantError(
            f"lambda = {lam} hits an eigenvalue within 1e-14"
        )
    return float(np.log(shifted.astype(complex)).sum().real)


def logdet_spectral(spec: Spectrum, lam: float) -> float:
    """log |det(lambda I + K)| from the spectrum; imaginary parts cancel in pairs."""
    return _sum_log(spec.eigenvalues, lam)


def logdet_lu(kernel: KernelMatrix, lam: float) -> float:
    """log |det(lambda I + K)| via LU with partial pivoting (sign tracked).

    Independent evaluation path; must match :func:`logdet_spectral` to 1e-8
    relative for any assembled kernel.
    """
    return _logdet_lu_matrix(kernel.matrix, lam)


def _logdet_lu_matrix(matrix: np.ndarray, lam: float) -> float:
    a = matrix.copy()
    idx = np.arange(a.shape[0])
    a[idx, idx] += lam
    lu, piv = scipy.linalg.lu_factor(a, check_finite=False)
    diag = np.diag(lu)
    if np.any(diag == 0.0):
        raise SingularDeterminantError(f"zero pivot in LU at lambda = {lam}")
    return float(np.log(np.abs(diag)).sum())


def interaction_logdet(kernel: KernelMatrix, lam: float, method: str = "lu") -> float:
    """Subtracted log-determinant Delta = logdet(full) - sum_b logdet(body b).

    When every cross-body block is exactly zero the determinant factorizes,
    so the difference is returned as exact 0.0 without touching the solver.
    """
    if len(kernel.blocks) < 2:
        raise VdwBemError("interaction_logdet needs at least 2 body blocks")
    if kernel.cross_blocks_all_zero():
        return 0.0
    if method == "lu":
        full = _logdet_lu_matrix(kernel.matrix, lam)
        bodies = sum(_logdet_lu_matrix(kernel.body_block(b), lam)
                     for b in range(len(kernel.blocks)))
    elif method == "spectral":
        full = _sum_log(_eigvals(kernel.matrix), lam)
        bodies = sum(_sum_log(_eigvals(kernel.body_block(b)), lam)
                     for b in range(len(kernel.blocks)))
    else:
        raise VdwBemError(f"unknown log-det method {method!r}")
    return full - bodies


@dataclass(frozen=True)
class FrequencyGrid:
    """Quadrature nodes/weights for integral_0^inf d(hbar xi), energies in eV."""

    nodes: np.ndarray
    weights: np.ndarray
    scale_ev: float

    @property
    def n(self) -> int:
        return self.nodes.shape[0]

    def integrate(self, values) -> float:
        return float(np.dot(self.weights, np.asarray(values, dtype=float)))


def make_frequency_grid(scale_ev: float = 9.0, n_nodes: int = 48) -> FrequencyGrid:
    """Gauss-Legendre nodes mapped from (-1, 1) to (0, inf).

    Rational map xi = scale (1 + t) / (1 - t), dxi = 2 scale / (1 - t)^2 dt.
    The default scale equals the gold plasma energy, where the log-det
    integrand decays.
    """
    if scale_ev <= 0.0:
        raise VdwBemError("frequency grid scale must be positive")
    if n_nodes < 4:
        raise VdwBemError("frequency grid needs at least 4 nodes")
    t, w = np.polynomial.legendre.leggauss(int(n_nodes))
    nodes = scale_ev * (1.0 + t) / (1.0 - t)
    weights = w * 2.0 * scale_ev / (1.0 - t) ** 2
    return FrequencyGrid(nodes, weights, float(scale_ev))


@dataclass(frozen=True)
class EnergyResult:
    """Interaction energy plus the per-node integrand samples it was summed from."""

    energy_ev: float
    integrand: np.ndarray
    grid: FrequencyGrid
    n_panels: int
    method: str
    warnings: tuple[str, ...] = ()

    @property
    def node_count(self) -> int:
        return self.grid.n


def _delta_from_spectra(full_sorted, blocks_sorted, lam: float) -> float:
    """Delta(lam) from pre-sorted full and concatenated-block spectra.

    Evaluated as sum of log((lam + kappa_full_i) / (lam + kappa_blocks_i))
    over sort-matched eigenvalue pairs. This is algebraically the plain
    log-det difference (the products telescope for any pairing) but avoids
    the N*log(lam)-sized cancellation of subtracting two large sums, which
    matters at the large-xi quadrature nodes where lam grows like xi^2.
    """
    zf = lam + full_sorted
    zb = lam + blocks_sorted
    if min(np.abs(zf).min(), np.abs(zb).min()) < 1e-14:
        raise SingularDeterminantError(
            f"lambda = {lam} hits an eigenvalue within 1e-14"
        )
    return float(np.log(zf / zb).sum().real)


def interaction_energy(
    meshes,
    material: DrudeModel,
    grid: FrequencyGrid,
    method: str = "auto",
    lu_threshold: int = 3000,
) -> EnergyResult:
    """Interaction energy (eV) of two or more bodies.

    ``E = (1 / 2 pi) sum_k w_k Delta(lambda(eps(i xi_k)))`` with
    ``Delta = logdet(lambda I + K) - sum_b logdet(lambda I + K_bb)``. K and
    the spectra are computed once and reused across all frequency nodes.
    ``method`` is ``spectral`` (eigendecompose once, O(N) per node), ``lu``
    (one factorization per node) or ``auto`` (spectral up to
    ``lu_threshold`` panels).
    """
    kernel = assemble_kernel(meshes)
    if len(kernel.blocks) < 2:
        raise VdwBemError("interaction_energy needs at least 2 bodies")

    lam = lambda_of_eps(eps_imaginary(material, grid.nodes))
    if method == "auto":
        method = "spectral" if kernel.n <= lu_threshold else "lu"

    if method == "spectral":
        full_sorted = np.sort_complex(_eigvals(kernel.matrix))
        blocks_sorted = np.sort_complex(
            np.concatenate(
                [_eigvals(kernel.body_block(b)) for b in range(len(kernel.blocks))]
            )
        )
        delta = np.array(
            [_delta_from_spectra(full_sorted, blocks_sorted, lk) for lk in lam]
        )
    elif method == "lu":
        delta = np.array([interaction_logdet(kernel, lk, method="lu") for lk in lam])
    else:
        raise VdwBemError(f"unknown interaction_energy method {method!r}")

    energy = grid.integrate(delta) / TWO_PI

    warns = []
    if kernel.facing_panel_size > 0.5 * kernel.min_cross_distance:
        warns.append(
            f"facing panel size {kernel.facing_panel_size:.3g} nm exceeds half "
            f"the gap {kernel.min_cross_distance:.3g} nm; refine facing faces"
        )
    if energy > 0.0:
        warns.append(
            f"non-negative interaction energy {energy:.3e} eV for a "
            "like-material pair; check mesh orientation and sign conventions"
        )
    return EnergyResult(energy, delta, grid, kernel.n, method, tuple(warns))
