import math

import numpy as np
import pytest

from vdwbem import (
    MeshResolution,
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
from vdwbem.errors import ConfigurationError, GeometryError


def closure_ok(mesh):
    return np.linalg.norm(mesh.closure_vector()) <= 1e-9 * mesh.total_area()


class TestBox:
    def test_unit_cube_res2(self):
        cube = make_box_cylinder(1.0, 1.0, 1.0, MeshResolution(2))
        assert cube.n_panels == 24
        assert cube.total_area() == pytest.approx(6.0, abs=1e-14)
        assert np.linalg.norm(cube.closure_vector()) <= 1e-12

    def test_box_surface_area(self):
        box = make_box_cylinder(1.0, 2.0, 0.8, MeshResolution(2))
        assert box.total_area() == pytest.approx(8.8, rel=1e-14)

    def test_panel_count_formula(self):
        lx, ly, h = 1.0, 2.0, 0.8
        res = MeshResolution(3, cap_refine=2)
        box = make_box_cylinder(lx, ly, h, res)
        char = min(lx, ly, h)
        n_x = max(1, round(res.divisions * lx / char))
        n_y = max(1, round(res.divisions * ly / char))
        n_z = max(1, round(res.divisions * h / char))
        f = res.cap_refine
        expected = 2 * (f * n_x) * (f * n_y) + 2 * n_y * n_z + 2 * n_x * n_z
        assert box.n_panels == expected

    def test_mirror_involution(self):
        box = make_box_cylinder(1.0, 2.0, 0.8, MeshResolution(2))
        back = mirror_across_plane(mirror_across_plane(box, -0.5), -0.5)
        assert np.allclose(back.centroids, box.centroids, atol=1e-12)
        assert np.allclose(back.normals, box.normals, atol=1e-12)
        assert np.array_equal(back.areas, box.areas)
        assert back.body_label == box.body_label

    def test_invalid_dimensions(self):
        with pytest.raises(GeometryError):
            make_box_cylinder(-1.0, 1.0, 1.0, MeshResolution(2))
        with pytest.raises(GeometryError):
            make_box_cylinder(1.0, 0.0, 1.0, MeshResolution(2))


class TestCircularCylinder:
    def test_total_area(self):
        # diameter 2, h 1: wall 2 pi + caps 2 pi = 4 pi
        cyl = make_circular_cylinder(2.0, 1.0, MeshResolution(8))
        assert cyl.total_area() == pytest.approx(4.0 * math.pi, rel=0.01)

    def test_closure(self):
        cyl = make_circular_cylinder(2.0, 1.0, MeshResolution(6))
        assert closure_ok(cyl)

    def test_panel_count_formula(self):
        res = MeshResolution(5, cap_refine=2)
        cyl = make_circular_cylinder(1.0, 0.7, res)
        n_s = res.divisions * res.cap_refine
        n_phi = 4 * res.divisions
        n_z = max(1, round(res.divisions * 0.7 / 1.0))
        assert cyl.n_panels == 2 * n_s**2 + n_phi * n_z

    def test_cap_area_second_order_convergence(self):
        # Caps carry the only area discretization error (inscribed rim).
        def cap_error(res):
            cyl = make_circular_cylinder(2.0, 1.0, MeshResolution(res))
            return abs(cyl.total_area() - 4.0 * math.pi)

        ratio = cap_error(6) / cap_error(12)
        assert 3.0 < ratio < 5.0

    def test_invalid(self):
        with pytest.raises(GeometryError):
            make_circular_cylinder(0.0, 1.0, MeshResolution(4))


class TestSphere:
    def test_area_and_closure(self):
        sph = make_sphere(1.0, MeshResolution(10))
        assert sph.total_area() == pytest.approx(4.0 * math.pi, rel=0.01)
        assert closure_ok(sph)

    def test_panel_count(self):
        assert make_sphere(2.0, MeshResolution(7)).n_panels == 6 * 49

    def test_centroids_on_sphere_and_symmetric(self):
        sph = make_sphere(1.5, MeshResolution(6))
        radii = np.linalg.norm(sph.centroids, axis=1)
        assert np.allclose(radii, 1.5, atol=1e-12)
        assert np.abs(sph.centroids.mean(axis=0)).max() <= 1e-9

    def test_invalid(self):
        with pytest.raises(GeometryError):
            make_sphere(-2.0, MeshResolution(4))


class TestRigidMotion:
    def test_identity_is_bitwise(self, sphere_res6):
        moved = apply_motion(sphere_res6, RigidMotion.identity())
        assert np.array_equal(moved.centroids, sphere_res6.centroids)
        assert np.array_equal(moved.normals, sphere_res6.normals)
        assert np.array_equal(moved.areas, sphere_res6.areas)

    def test_translation_keeps_closure(self, sphere_res6):
        moved = apply_motion(sphere_res6, RigidMotion.translate(3.0, -2.0, 7.0))
        assert np.array_equal(moved.closure_vector(), sphere_res6.closure_vector())

    def test_rotation_twice_is_identity(self):
        box = make_box_cylinder(1.0, 2.0, 0.5, MeshResolution(2))
        rot = RigidMotion.rotate_z(math.pi)
        back = apply_motion(apply_motion(box, rot), rot)
        assert np.allclose(back.centroids, box.centroids, atol=1e-12)
        assert np.allclose(back.normals, box.normals, atol=1e-12)

    def test_areas_and_distances_preserved(self, sphere_res6, rng):
        angle = rng.uniform(0, 2 * math.pi)
        motion = RigidMotion.rotate_z(angle)
        moved = apply_motion(sphere_res6, motion)
        assert np.array_equal(moved.areas, sphere_res6.areas)
        idx = rng.integers(0, sphere_res6.n_panels, size=(40, 2))
        d0 = np.linalg.norm(
            sphere_res6.centroids[idx[:, 0]] - sphere_res6.centroids[idx[:, 1]], axis=1
        )
        d1 = np.linalg.norm(
            moved.centroids[idx[:, 0]] - moved.centroids[idx[:, 1]], axis=1
        )
        assert np.abs(d0 - d1).max() <= 1e-12

    def test_rejects_improper_rotation(self):
        with pytest.raises(GeometryError):
            RigidMotion(np.diag([1.0, 1.0, -1.0]))


class TestMirror:
    def test_reflection_example(self):
        mesh = SurfaceMesh([[0.0, 0.0, 1.0]], [[0.0, 0.0, 1.0]], [0.5], "p")
        mirrored = mirror_across_plane(mesh, 0.0)
        assert np.allclose(mirrored.centroids[0], [0.0, 0.0, -1.0])
        assert np.allclose(mirrored.normals[0], [0.0, 0.0, -1.0])
        assert mirrored.areas[0] == 0.5

    def test_mirrored_mesh_closed(self):
        cyl = make_circular_cylinder(1.0, 1.0, MeshResolution(5))
        lifted = apply_motion(cyl, RigidMotion.translate(0, 0, 0.3))
        assert closure_ok(mirror_across_plane(lifted, 0.0))

    def test_area_preserved(self, sphere_res6):
        lifted = apply_motion(sphere_res6, RigidMotion.translate(0, 0, 5.0))
        assert mirror_across_plane(lifted, 0.0).total_area() == lifted.total_area()

    def test_intersecting_plane_rejected(self):
        box = make_box_cylinder(1.0, 1.0, 1.0, MeshResolution(2))
        with pytest.raises(ConfigurationError):
            mirror_across_plane(box, 0.5)


class TestMeshIO:
    def test_round_trip_exact(self, tmp_path, sphere_res6):
        path = tmp_path / "mesh.txt"
        save_mesh(sphere_res6, path, {"radius_nm": 1.0, "divisions": 6})
        back = load_mesh(path)
        assert back.body_label == sphere_res6.body_label
        assert np.array_equal(back.centroids, sphere_res6.centroids)
        assert np.array_equal(back.normals, sphere_res6.normals)
        assert np.array_equal(back.areas, sphere_res6.areas)

    def test_reproducible_bytes(self, tmp_path):
        mesh = make_circular_cylinder(1.0, 2.0, MeshResolution(4))
        p1, p2 = tmp_path / "a.txt", tmp_path / "b.txt"
        save_mesh(mesh, p1, {"h_nm": 2.0})
        save_mesh(mesh, p2, {"h_nm": 2.0})
        assert p1.read_bytes() == p2.read_bytes()

    def test_bad_file(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("1 2 3 4\n")
        with pytest.raises(GeometryError):
            load_mesh(path)


class TestValidation:
    def test_resolution_constraints(self):
        with pytest.raises(GeometryError):
            MeshResolution(1)
        with pytest.raises(GeometryError):
            MeshResolution(4, cap_refine=0)

    def test_unit_normals_enforced(self):
        with pytest.raises(GeometryError):
            SurfaceMesh([[0, 0, 0]], [[0.0, 0.0, 2.0]], [1.0])

    def test_positive_areas_enforced(self):
        with pytest.raises(GeometryError):
            SurfaceMesh([[0, 0, 0]], [[0.0, 0.0, 1.0]], [0.0])
