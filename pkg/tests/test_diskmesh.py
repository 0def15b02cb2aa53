"""Disk meshing, energy and area of PL maps, harmonic extension."""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from minhomotopy.diskmesh import (
    DiskMap,
    DiskMesh,
    build_disk_mesh,
    conformality_residual,
    dirichlet_energy,
    export_mesh,
    harmonic_extend,
    interpolate_map,
    map_area,
    max_principle_defect,
    mesh_document,
)
from minhomotopy.errors import ConfigurationError, MeshQualityError

TWO_PI = 2.0 * np.pi

MESH = build_disk_mesh(6, 12)  # small shared mesh for property tests
DESK = build_disk_mesh(24, 48)  # the reference desk-scale mesh


def polygon_area(m: int) -> float:
    # area of the regular m-gon inscribed in the unit circle; the mesh
    # triangulates exactly this polygon
    return 0.5 * m * np.sin(TWO_PI / m)


def identity_map(mesh: DiskMesh) -> DiskMap:
    return DiskMap(mesh, mesh.vertices.copy())


class TestBuild:
    def test_single_ring_fan(self):
        mesh = build_disk_mesh(1, 12)
        assert mesh.vertex_count == 13
        assert mesh.triangle_count == 12
        assert mesh.boundary_count == 12

    def test_desk_scale_counts(self):
        assert DESK.vertex_count == 1 + 24 * 48
        assert DESK.triangle_count == 48 * (2 * 24 - 1)

    def test_boundary_angles_uniform(self):
        assert np.allclose(DESK.boundary_angles, TWO_PI * np.arange(48) / 48)

    def test_boundary_on_unit_circle(self):
        v = DESK.vertices[DESK.boundary_loop]
        assert np.abs(np.hypot(v[:, 0], v[:, 1]) - 1.0).max() <= 1e-12

    def test_divisibility_required(self):
        with pytest.raises(ConfigurationError):
            build_disk_mesh(3, 10)
        with pytest.raises(ConfigurationError):
            build_disk_mesh(3, 16)
        with pytest.raises(ConfigurationError):
            build_disk_mesh(0, 12)

    def test_triangles_positively_oriented(self):
        assert DESK.triangle_areas.min() > 1e-14

    def test_degenerate_triangle_rejected(self):
        with pytest.raises(MeshQualityError):
            DiskMesh(
                np.array([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]]),
                np.array([[0, 1, 2]]),
                np.array([0, 1, 2]),
            )

    def test_misoriented_triangle_rejected(self):
        t = TWO_PI * np.arange(3) / 3
        verts = np.column_stack([np.cos(t), np.sin(t)])
        with pytest.raises(MeshQualityError):
            DiskMesh(verts, np.array([[0, 2, 1]]), np.array([0, 1, 2]))


class TestEnergyAndArea:
    def test_constant_map_energy_zero(self):
        dmap = DiskMap(DESK, np.full((DESK.vertex_count, 3), 2.5))
        assert dirichlet_energy(dmap) <= 1e-12
        assert map_area(dmap) <= 1e-12
        assert abs(conformality_residual(dmap)) <= 1e-12

    def test_identity_energy_is_mesh_area(self):
        # the identity is linear, so PL interpolation is exact and the
        # energy equals the inscribed polygon area
        e = dirichlet_energy(identity_map(DESK))
        assert e == pytest.approx(polygon_area(48), rel=1e-12)
        assert e == pytest.approx(np.pi, rel=0.02)

    def test_doubling_scales_energy_by_four(self):
        e1 = dirichlet_energy(identity_map(DESK))
        e4 = dirichlet_energy(DiskMap(DESK, 2.0 * DESK.vertices))
        assert e4 == pytest.approx(4.0 * e1, rel=1e-12)
        assert e4 == pytest.approx(4.0 * np.pi, rel=0.02)

    def test_identity_area(self):
        a = map_area(identity_map(DESK))
        assert a == pytest.approx(polygon_area(48), rel=1e-12)
        assert a == pytest.approx(np.pi, rel=0.02)

    def test_anisotropic_stretch(self):
        values = DESK.vertices * np.array([2.0, 1.0])
        dmap = DiskMap(DESK, values)
        assert map_area(dmap) == pytest.approx(2.0 * np.pi, rel=0.02)
        # energy (5/2) pi, area 2 pi, residual pi/2
        assert conformality_residual(dmap) == pytest.approx(np.pi / 2, rel=0.03)

    def test_identity_is_conformal(self):
        assert abs(conformality_residual(identity_map(DESK))) <= 1e-10

    def test_energy_matches_stiffness_form(self):
        rng = np.random.default_rng(7)
        values = rng.normal(size=(MESH.vertex_count, 4))
        dmap = DiskMap(MESH, values)
        k = MESH.stiffness
        quad = 0.5 * sum(values[:, c] @ (k @ values[:, c]) for c in range(4))
        assert dirichlet_energy(dmap) == pytest.approx(quad, rel=1e-11)

    @given(st.integers(min_value=0, max_value=2**31 - 1))
    def test_energy_dominates_area(self, seed):
        # pointwise AM-GM: |Dv|^2 / 2 >= sqrt(det(Dv^T Dv)) per triangle
        rng = np.random.default_rng(seed)
        k = int(rng.integers(1, 5))
        values = rng.normal(size=(MESH.vertex_count, k))
        dmap = DiskMap(MESH, values)
        assert dirichlet_energy(dmap) >= map_area(dmap) - 1e-10

    @given(
        st.integers(min_value=0, max_value=2**31 - 1),
        st.floats(min_value=0.1, max_value=10.0),
    )
    def test_quadratic_scaling(self, seed, lam):
        rng = np.random.default_rng(seed)
        values = rng.normal(size=(MESH.vertex_count, 2))
        e = dirichlet_energy(DiskMap(MESH, values))
        e_scaled = dirichlet_energy(DiskMap(MESH, lam * values))
        assert e_scaled == pytest.approx(lam**2 * e, rel=1e-12)


class TestHarmonic:
    def test_constant_boundary(self):
        g = np.full((DESK.boundary_count, 2), 3.25)
        dmap = harmonic_extend(DESK, g)
        assert np.allclose(dmap.values, 3.25, atol=1e-12)

    def test_identity_boundary_reproduces_identity(self):
        theta = DESK.boundary_angles
        g = np.column_stack([np.cos(theta), np.sin(theta)])
        dmap = harmonic_extend(DESK, g)
        # coordinates are harmonic, so the interior solve returns the
        # vertex positions themselves
        assert np.abs(dmap.values - DESK.vertices).max() <= 1e-10
        assert dirichlet_energy(dmap) == pytest.approx(np.pi, rel=0.02)

    def test_lift_graph_energy(self):
        eps = 0.1
        theta = DESK.boundary_angles
        g = np.column_stack(
            [np.cos(theta), np.sin(theta), eps * np.cos(theta), eps * np.sin(theta)]
        )
        dmap = harmonic_extend(DESK, g)
        assert dirichlet_energy(dmap) == pytest.approx((1 + eps**2) * np.pi, rel=0.02)

    def test_boundary_count_mismatch(self):
        with pytest.raises(ValueError):
            harmonic_extend(DESK, np.zeros((10, 2)))

    def test_nonfinite_boundary(self):
        g = np.zeros((DESK.boundary_count, 1))
        g[3] = np.nan
        with pytest.raises(ValueError):
            harmonic_extend(DESK, g)

    @given(st.integers(min_value=0, max_value=2**31 - 1))
    def test_maximum_principle(self, seed):
        rng = np.random.default_rng(seed)
        g = rng.normal(size=(MESH.boundary_count, 3)) * rng.uniform(0.1, 10)
        dmap = harmonic_extend(MESH, g)
        assert max_principle_defect(dmap) <= 1e-10

    def test_maximum_principle_desk_scale(self):
        rng = np.random.default_rng(11)
        g = rng.normal(size=(DESK.boundary_count, 4))
        assert max_principle_defect(harmonic_extend(DESK, g)) <= 1e-10

    def test_harmonic_minimizes_energy(self):
        rng = np.random.default_rng(3)
        g = rng.normal(size=(MESH.boundary_count, 2))
        dmap = harmonic_extend(MESH, g)
        e = dirichlet_energy(dmap)
        for _ in range(5):
            noise = rng.normal(size=(MESH.vertex_count, 2)) * 0.1
            noise[MESH.boundary_loop] = 0.0
            assert dirichlet_energy(DiskMap(MESH, dmap.values + noise)) >= e

    def test_refinement_tightens_identity_energy(self):
        errors = []
        for rings in (6, 12, 24, 48):
            mesh = build_disk_mesh(rings, 2 * rings)
            theta = mesh.boundary_angles
            g = np.column_stack([np.cos(theta), np.sin(theta)])
            errors.append(abs(dirichlet_energy(harmonic_extend(mesh, g)) - np.pi))
        assert all(a > b for a, b in zip(errors, errors[1:]))


class TestInterpolation:
    def test_identity_reproduced_at_interior_points(self):
        dmap = identity_map(DESK)
        rng = np.random.default_rng(5)
        r = np.sqrt(rng.uniform(0.0, 0.9, size=200))
        a = rng.uniform(0.0, TWO_PI, size=200)
        pts = np.column_stack([r * np.cos(a), r * np.sin(a)])
        out = interpolate_map(dmap, pts)
        assert np.abs(out - pts).max() <= 1e-12

    def test_center_value(self):
        values = np.zeros((MESH.vertex_count, 1))
        values[0] = 7.0
        out = interpolate_map(DiskMap(MESH, values), np.array([[0.0, 0.0]]))
        assert out[0, 0] == pytest.approx(7.0, abs=1e-12)


class TestExport:
    def test_document_layout(self):
        doc = mesh_document(identity_map(MESH))
        lines = doc.strip().split("\n")
        head = lines[0].split()
        assert head[0] == "vertices" and int(head[1]) == MESH.vertex_count
        assert int(head[3]) == MESH.triangle_count
        assert int(head[5]) == 2
        assert len(lines) == 1 + MESH.vertex_count + MESH.triangle_count

    def test_deterministic(self, tmp_path):
        p1, p2 = tmp_path / "a.txt", tmp_path / "b.txt"
        export_mesh(identity_map(MESH), p1)
        export_mesh(identity_map(MESH), p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_bare_mesh_export(self):
        doc = mesh_document(MESH)
        assert "image_dim 0" in doc.split("\n")[0]
