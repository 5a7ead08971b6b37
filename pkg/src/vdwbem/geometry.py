"""Closed quad-panel surface meshes for finite bodies.

All bodies are generated in a canonical frame: base centered on the z-axis
at z = 0, body extending to z = h. Positioning is done exclusively through
:class:`RigidMotion` so every scan shares one placement code path.

Lengths are in nanometers, areas in nm^2. A mesh is a flat collection of
panels (centroid, outward normal, area); panel connectivity is never needed
because the solver collocates at centroids only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, GeometryError

__all__ = [
    "Panel",
    "SurfaceMesh",
    "RigidMotion",
    "MeshResolution",
    "make_box_cylinder",
    "make_circular_cylinder",
    "make_sphere",
    "apply_motion",
    "mirror_across_plane",
    "save_mesh",
    "load_mesh",
]

_MIRROR_SUFFIX = ".mirror"


@dataclass(frozen=True)
class Panel:
    """One flat surface element: centroid (nm), outward unit normal, area (nm^2)."""

    centroid: tuple[float, float, float]
    normal: tuple[float, float, float]
    area: float


@dataclass(frozen=True)
class SurfaceMesh:
    """Discretized closed surface of one body.

    Stored as dense arrays: ``centroids`` (N,3), ``normals`` (N,3) with unit
    rows, ``areas`` (N,). Panel order is fixed by the generator (documented
    there) so mesh files are reproducible byte-for-byte.
    """

    centroids: np.ndarray
    normals: np.ndarray
    areas: np.ndarray
    body_label: str = "body"

    def __post_init__(self):
        c = np.ascontiguousarray(np.atleast_2d(np.asarray(self.centroids, dtype=float)))
        n = np.ascontiguousarray(np.atleast_2d(np.asarray(self.normals, dtype=float)))
        a = np.ascontiguousarray(np.asarray(self.areas, dtype=float).ravel())
        if c.shape != n.shape or c.shape[0] != a.shape[0] or c.shape[1] != 3:
            raise GeometryError("inconsistent mesh arrays")
        if np.any(a <= 0.0):
            raise GeometryError("panel areas must be positive")
        norms = np.linalg.norm(n, axis=1)
        if np.any(np.abs(norms - 1.0) > 1e-12):
            raise GeometryError("panel normals must have unit norm (within 1e-12)")
        object.__setattr__(self, "centroids", c)
        object.__setattr__(self, "normals", n)
        object.__setattr__(self, "areas", a)

    @property
    def n_panels(self) -> int:
        return self.areas.shape[0]

    @property
    def panels(self) -> list[Panel]:
        return [
            Panel(tuple(self.centroids[i]), tuple(self.normals[i]), float(self.areas[i]))
            for i in range(self.n_panels)
        ]

    def total_area(self) -> float:
        return float(self.areas.sum())

    def closure_vector(self) -> np.ndarray:
        """Discrete closed-surface identity: sum of area * normal (zero when closed)."""
        return self.normals.T @ self.areas

    def is_closed(self, rel_tol: float = 1e-9) -> bool:
        return bool(np.linalg.norm(self.closure_vector()) <= rel_tol * self.total_area())


@dataclass(frozen=True)
class RigidMotion:
    """Proper rigid motion: rotation (3x3, det +1) followed by translation (nm)."""

    rotation: np.ndarray = field(default_factory=lambda: np.eye(3))
    translation: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        r = np.asarray(self.rotation, dtype=float).reshape(3, 3)
        t = np.asarray(self.translation, dtype=float).ravel()
        if t.shape != (3,):
            raise GeometryError("translation must be a 3-vector")
        if np.max(np.abs(r @ r.T - np.eye(3))) > 1e-12 or abs(np.linalg.det(r) - 1.0) > 1e-12:
            raise GeometryError("rotation must be proper orthogonal (within 1e-12)")
        object.__setattr__(self, "rotation", r)
        object.__setattr__(self, "translation", t)

    @staticmethod
    def identity() -> "RigidMotion":
        return RigidMotion()

    @staticmethod
    def translate(dx: float, dy: float, dz: float) -> "RigidMotion":
        return RigidMotion(np.eye(3), np.array([dx, dy, dz], dtype=float))

    @staticmethod
    def rotate_z(angle_rad: float) -> "RigidMotion":
        """Rotation about the z-axis through the origin."""
        c, s = math.cos(angle_rad), math.sin(angle_rad)
        return RigidMotion(np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]]))


@dataclass(frozen=True)
class MeshResolution:
    """Mesh density control.

    ``divisions`` is the number of subdivisions per characteristic edge
    (shortest box edge, cylinder diameter, cube-face edge of the sphere).
    ``cap_refine`` multiplies the divisions on the designated faces (the end
    caps of box/circular cylinders) so facing surfaces can satisfy the
    panel-size <= gap/2 rule without refining the whole body.
    """

    divisions: int = 8
    cap_refine: int = 1

    def __post_init__(self):
        if int(self.divisions) != self.divisions or self.divisions < 2:
            raise GeometryError("divisions must be an integer >= 2")
        if int(self.cap_refine) != self.cap_refine or self.cap_refine < 1:
            raise GeometryError("cap_refine must be an integer >= 1")


def _edge_divisions(edge: float, char: float, divisions: int) -> int:
    return max(1, round(divisions * edge / char))


def _rect_face(center, u_axis, v_axis, lu, lv, nu, nv, normal):
    """Uniform nu x nv grid of planar rectangle panels; row-major over (v, u)."""
    du, dv = lu / nu, lv / nv
    iu = (np.arange(nu) + 0.5) * du - lu / 2.0
    iv = (np.arange(nv) + 0.5) * dv - lv / 2.0
    vv, uu = np.meshgrid(iv, iu, indexing="ij")
    cent = (
        np.asarray(center)[None, :]
        + uu.ravel()[:, None] * np.asarray(u_axis)[None, :]
        + vv.ravel()[:, None] * np.asarray(v_axis)[None, :]
    )
    n = np.tile(np.asarray(normal, dtype=float), (nu * nv, 1))
    a = np.full(nu * nv, du * dv)
    return cent, n, a


def make_box_cylinder(lx: float, ly: float, h: float, res: MeshResolution,
                      label: str = "box") -> SurfaceMesh:
    """Closed box surface, cross section lx x ly, base at z = 0, top at z = h.

    Each edge gets ``n(edge) = max(1, round(divisions * edge / min_edge))``
    subdivisions; the two end caps (z = 0 and z = h) are refined by
    ``cap_refine`` in both directions. Panel count::

        N = 2 * (f*n_x) * (f*n_y) + 2 * n_y * n_z + 2 * n_x * n_z

    Panel order: bottom cap, top cap, -x wall, +x wall, -y wall, +y wall;
    row-major within each face.
    """
    if lx <= 0 or ly <= 0 or h <= 0:
        raise GeometryError("box dimensions must be positive")
    char = min(lx, ly, h)
    n_x = _edge_divisions(lx, char, res.divisions)
    n_y = _edge_divisions(ly, char, res.divisions)
    n_z = _edge_divisions(h, char, res.divisions)
    f = res.cap_refine

    parts = [
        _rect_face((0, 0, 0.0), (1, 0, 0), (0, 1, 0), lx, ly, f * n_x, f * n_y, (0, 0, -1)),
        _rect_face((0, 0, h), (1, 0, 0), (0, 1, 0), lx, ly, f * n_x, f * n_y, (0, 0, 1)),
        _rect_face((-lx / 2, 0, h / 2), (0, 1, 0), (0, 0, 1), ly, h, n_y, n_z, (-1, 0, 0)),
        _rect_face((lx / 2, 0, h / 2), (0, 1, 0), (0, 0, 1), ly, h, n_y, n_z, (1, 0, 0)),
        _rect_face((0, -ly / 2, h / 2), (1, 0, 0), (0, 0, 1), lx, h, n_x, n_z, (0, -1, 0)),
        _rect_face((0, ly / 2, h / 2), (1, 0, 0), (0, 0, 1), lx, h, n_x, n_z, (0, 1, 0)),
    ]
    cent = np.vstack([p[0] for p in parts])
    norm = np.vstack([p[1] for p in parts])
    area = np.concatenate([p[2] for p in parts])
    return SurfaceMesh(cent, norm, area, label)


def _disk_grid(radius: float, n: int):
    """Cubed-disk cap mesh: square [-1,1]^2 grid mapped onto the disk.

    Uses the elliptical square-to-disk map
    ``(x, y) -> (x*sqrt(1 - y^2/2), y*sqrt(1 - x^2/2))`` which sends the
    square boundary onto the circle with no degenerate pole cells. Returns
    2-D centroids and exact polygon areas of the n x n mapped quads.
    """
    t = np.linspace(-1.0, 1.0, n + 1)
    xg, yg = np.meshgrid(t, t, indexing="ij")
    px = xg * np.sqrt(1.0 - 0.5 * yg**2) * radius
    py = yg * np.sqrt(1.0 - 0.5 * xg**2) * radius

    # Quad corners per cell, counter-clockwise in the (x, y) plane.
    corners = [
        (px[:-1, :-1], py[:-1, :-1]),
        (px[1:, :-1], py[1:, :-1]),
        (px[1:, 1:], py[1:, 1:]),
        (px[:-1, 1:], py[:-1, 1:]),
    ]
    area = np.zeros((n, n))
    cx = np.zeros((n, n))
    cy = np.zeros((n, n))
    for k in range(4):
        x0, y0 = corners[k]
        x1, y1 = corners[(k + 1) % 4]
        cross = x0 * y1 - x1 * y0
        area += cross
        cx += (x0 + x1) * cross
        cy += (y0 + y1) * cross
    area *= 0.5
    cx /= 6.0 * area
    cy /= 6.0 * area
    return cx.ravel(), cy.ravel(), np.abs(area).ravel()


def make_circular_cylinder(diameter: float, h: float, res: MeshResolution,
                           label: str = "cylinder") -> SurfaceMesh:
    """Closed circular cylinder, diameter ``diameter``, base at z = 0, top at z = h.

    The lateral wall is an ``n_phi x n_z`` grid of cells with exact lateral
    areas ``R * dphi * dz`` and centroids on the surface; the caps are
    cubed-disk grids (see :func:`_disk_grid`). With ``d = divisions`` and
    ``f = cap_refine``::

        n_s = d * f  (cap grid),  n_phi = 4 * d,  n_z = max(1, round(d * h / diameter))
        N = 2 * n_s^2 + n_phi * n_z

    Panel order: bottom cap, top cap, wall (z-major, then azimuth).
    """
    if diameter <= 0 or h <= 0:
        raise GeometryError("cylinder dimensions must be positive")
    radius = diameter / 2.0
    n_s = res.divisions * res.cap_refine
    n_phi = 4 * res.divisions
    n_z = max(1, round(res.divisions * h / diameter))

    cx, cy, ca = _disk_grid(radius, n_s)
    n_cap = cx.shape[0]
    zeros = np.zeros(n_cap)
    bot_c = np.column_stack([cx, cy, zeros])
    top_c = np.column_stack([cx, cy, np.full(n_cap, h)])
    bot_n = np.tile([0.0, 0.0, -1.0], (n_cap, 1))
    top_n = np.tile([0.0, 0.0, 1.0], (n_cap, 1))

    dphi = 2.0 * math.pi / n_phi
    dz = h / n_z
    phi = (np.arange(n_phi) + 0.5) * dphi
    zc = (np.arange(n_z) + 0.5) * dz
    zz, pp = np.meshgrid(zc, phi, indexing="ij")
    wall_c = np.column_stack(
        [radius * np.cos(pp).ravel(), radius * np.sin(pp).ravel(), zz.ravel()]
    )
    wall_n = np.column_stack(
        [np.cos(pp).ravel(), np.sin(pp).ravel(), np.zeros(n_phi * n_z)]
    )
    wall_a = np.full(n_phi * n_z, radius * dphi * dz)

    cent = np.vstack([bot_c, top_c, wall_c])
    norm = np.vstack([bot_n, top_n, wall_n])
    area = np.concatenate([ca, ca, wall_a])
    return SurfaceMesh(cent, norm, area, label)


_CUBE_FACES = (
    ((1, 0, 0), (0, 1, 0), (0, 0, 1)),
    ((-1, 0, 0), (0, 1, 0), (0, 0, 1)),
    ((0, 1, 0), (0, 0, 1), (1, 0, 0)),
    ((0, -1, 0), (0, 0, 1), (1, 0, 0)),
    ((0, 0, 1), (1, 0, 0), (0, 1, 0)),
    ((0, 0, -1), (1, 0, 0), (0, 1, 0)),
)


def _spherical_quad_area(a, b, c, d):
    """Solid angle of the spherical quad with unit-vector corners a,b,c,d."""

    def tri(u, v, w):
        num = np.abs(np.einsum("ij,ij->i", u, np.cross(v, w)))
        den = (
            1.0
            + np.einsum("ij,ij->i", u, v)
            + np.einsum("ij,ij->i", v, w)
            + np.einsum("ij,ij->i", u, w)
        )
        return 2.0 * np.arctan2(num, den)

    return tri(a, b, c) + tri(a, c, d)


def make_sphere(radius: float, res: MeshResolution, label: str = "sphere") -> SurfaceMesh:
    """Near-uniform cubed-sphere quad mesh of a sphere centered at the origin.

    Equiangular projection: each of the 6 cube faces carries a uniform
    ``divisions x divisions`` grid in the angles (alpha, beta) in
    [-pi/4, pi/4]; grid vertices map to ``normalize(n + tan(alpha) u +
    tan(beta) v)``. Panel areas are exact spherical cell areas (the mesh
    tiles the full sphere, so they sum to 4 pi R^2), centroids sit exactly
    at radius R, normals are radial. ``N = 6 * divisions**2``;
    ``cap_refine`` is ignored (a sphere has no designated faces).

    Panel order: faces +x, -x, +y, -y, +z, -z; row-major within each face.
    """
    if radius <= 0:
        raise GeometryError("sphere radius must be positive")
    n = res.divisions
    ang = np.linspace(-math.pi / 4.0, math.pi / 4.0, n + 1)
    tg = np.tan(ang)
    tc = np.tan(0.5 * (ang[:-1] + ang[1:]))

    cents, norms, areas = [], [], []
    for face_n, face_u, face_v in _CUBE_FACES:
        fn = np.asarray(face_n, dtype=float)
        fu = np.asarray(face_u, dtype=float)
        fv = np.asarray(face_v, dtype=float)

        def to_sphere(ta, tb):
            vec = fn[None, :] + ta.ravel()[:, None] * fu[None, :] + tb.ravel()[:, None] * fv[None, :]
            return vec / np.linalg.norm(vec, axis=1, keepdims=True)

        ta, tb = np.meshgrid(tg, tg, indexing="ij")
        vert = to_sphere(ta, tb).reshape(n + 1, n + 1, 3)
        c00 = vert[:-1, :-1].reshape(-1, 3)
        c10 = vert[1:, :-1].reshape(-1, 3)
        c11 = vert[1:, 1:].reshape(-1, 3)
        c01 = vert[:-1, 1:].reshape(-1, 3)
        omega = _spherical_quad_area(c00, c10, c11, c01)

        tac, tbc = np.meshgrid(tc, tc, indexing="ij")
        mid = to_sphere(tac, tbc)

        cents.append(mid * radius)
        norms.append(mid)
        areas.append(omega * radius**2)

    return SurfaceMesh(np.vstack(cents), np.vstack(norms), np.concatenate(areas), label)


def apply_motion(mesh: SurfaceMesh, motion: RigidMotion) -> SurfaceMesh:
    """Rigidly move a mesh: centroids map affinely, normals rotate, areas keep."""
    cent = mesh.centroids @ motion.rotation.T + motion.translation[None, :]
    norm = mesh.normals @ motion.rotation.T
    return SurfaceMesh(cent, norm, mesh.areas.copy(), mesh.body_label)


def mirror_across_plane(mesh: SurfaceMesh, z0: float) -> SurfaceMesh:
    """Mirror image of a mesh across the plane z = z0.

    The mesh must lie strictly on one side of the plane. Centroids reflect
    (z -> 2 z0 - z), normal z-components flip, areas are unchanged; the
    result is again a valid outward-oriented closed mesh. Applying the
    mirror twice restores the original mesh.
    """
    dz = mesh.centroids[:, 2] - z0
    if not (np.all(dz > 0.0) or np.all(dz < 0.0)):
        raise ConfigurationError(
            f"mesh {mesh.body_label!r} intersects the mirror plane z = {z0}"
        )
    cent = mesh.centroids.copy()
    cent[:, 2] = 2.0 * z0 - cent[:, 2]
    norm = mesh.normals.copy()
    norm[:, 2] = -norm[:, 2]
    if mesh.body_label.endswith(_MIRROR_SUFFIX):
        label = mesh.body_label[: -len(_MIRROR_SUFFIX)]
    else:
        label = mesh.body_label + _MIRROR_SUFFIX
    return SurfaceMesh(cent, norm, mesh.areas.copy(), label)


def save_mesh(mesh: SurfaceMesh, path, params: dict | None = None) -> None:
    """Write the mesh text format: one `cx cy cz nx ny nz area` line per panel.

    Header `#` lines record the body label and any generator parameters, so
    files regenerate byte-for-byte for a given configuration.
    """
    lines = [f"# body_label = {mesh.body_label}"]
    for key in sorted(params or {}):
        lines.append(f"# {key} = {params[key]}")
    lines.append("# columns: cx cy cz nx ny nz area  (nm, unit, nm^2)")
    for i in range(mesh.n_panels):
        c = mesh.centroids[i]
        n = mesh.normals[i]
        lines.append(
            f"{c[0]:.17g} {c[1]:.17g} {c[2]:.17g} "
            f"{n[0]:.17g} {n[1]:.17g} {n[2]:.17g} {mesh.areas[i]:.17g}"
        )
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def load_mesh(path) -> SurfaceMesh:
    """Read a mesh written by :func:`save_mesh`."""
    label = "body"
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for raw in fh:
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if body.startswith("body_label"):
                    _, _, val = body.partition("=")
                    label = val.strip()
                continue
            vals = [float(tok) for tok in line.split()]
            if len(vals) != 7:
                raise GeometryError(f"bad mesh line in {path}: {line!r}")
            rows.append(vals)
    if not rows:
        raise GeometryError(f"no panels in mesh file {path}")
    data = np.asarray(rows)
    return SurfaceMesh(data[:, 0:3], data[:, 3:6], data[:, 6], label)
