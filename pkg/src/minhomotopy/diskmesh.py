"""Triangulated unit disks and piecewise-linear maps defined on them.

The mesh is a concentric-ring triangulation: a center vertex, rings at
radii j/rings each carrying boundary_count vertices, quads between rings
split along a diagonal.  Every quad is an isoceles trapezoid and hence
cyclic, so the diagonal split is Delaunay up to roundoff and the cotangent
stiffness matrix has no negative edge weights of any consequence: discrete
harmonic extensions obey the maximum principle to solver accuracy.

A map assigns an R^k value to every vertex and is interpolated linearly
over triangles.  Energy is the integrated squared gradient over the flat
domain, area the integrated Jacobian factor sqrt(det(Dv^T Dv)).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu
from scipy.spatial import cKDTree

from .errors import ConfigurationError, MeshQualityError, OutputError

TWO_PI = 2.0 * np.pi
DEGENERATE_AREA = 1e-14


def _freeze(arr: np.ndarray, dtype=float) -> np.ndarray:
    arr = np.ascontiguousarray(arr, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class DiskMesh:
    """Immutable triangulation of the closed unit disk.

    vertices      : (V, 2) positions
    triangles     : (T, 3) vertex indices, positively oriented
    boundary_loop : (m,) indices of the unit-circle vertices in angular order
    """

    vertices: np.ndarray
    triangles: np.ndarray
    boundary_loop: np.ndarray

    def __post_init__(self):
        verts = np.asarray(self.vertices, dtype=float)
        tris = np.asarray(self.triangles, dtype=np.int64)
        loop = np.asarray(self.boundary_loop, dtype=np.int64)
        if verts.ndim != 2 or verts.shape[1] != 2 or not np.isfinite(verts).all():
            raise MeshQualityError("vertices must be a finite (V, 2) array")
        if tris.ndim != 2 or tris.shape[1] != 3:
            raise MeshQualityError("triangles must be a (T, 3) index array")
        if tris.min() < 0 or tris.max() >= len(verts):
            raise MeshQualityError("triangle index out of range")
        p = verts[tris]
        signed = 0.5 * (
            (p[:, 1, 0] - p[:, 0, 0]) * (p[:, 2, 1] - p[:, 0, 1])
            - (p[:, 1, 1] - p[:, 0, 1]) * (p[:, 2, 0] - p[:, 0, 0])
        )
        if (signed <= DEGENERATE_AREA).any():
            t = int(np.argmax(signed <= DEGENERATE_AREA))
            raise MeshQualityError(
                f"triangle {t} is degenerate or misoriented (signed area {signed[t]:.3e})"
            )
        radii = np.hypot(verts[loop, 0], verts[loop, 1])
        if np.abs(radii - 1.0).max() > 1e-12:
            raise MeshQualityError("boundary vertices must lie on the unit circle")
        angles = np.mod(np.arctan2(verts[loop, 1], verts[loop, 0]), TWO_PI)
        unwrapped = angles - angles[0]
        unwrapped = np.mod(unwrapped, TWO_PI)
        if (np.diff(unwrapped) <= 0).any():
            raise MeshQualityError("boundary loop must advance in angle")
        edges = np.sort(
            np.concatenate([tris[:, [0, 1]], tris[:, [1, 2]], tris[:, [2, 0]]]), axis=1
        )
        n_edges = len(np.unique(edges, axis=0))
        euler = len(verts) - n_edges + len(tris)
        if euler != 1:
            raise MeshQualityError(f"Euler characteristic {euler}, expected 1 for a disk")
        object.__setattr__(self, "vertices", _freeze(verts))
        object.__setattr__(self, "triangles", _freeze(tris, dtype=np.int64))
        object.__setattr__(self, "boundary_loop", _freeze(loop, dtype=np.int64))

    @property
    def vertex_count(self) -> int:
        return self.vertices.shape[0]

    @property
    def triangle_count(self) -> int:
        return self.triangles.shape[0]

    @property
    def boundary_count(self) -> int:
        return self.boundary_loop.shape[0]

    @cached_property
    def boundary_angles(self) -> np.ndarray:
        v = self.vertices[self.boundary_loop]
        return _freeze(np.mod(np.arctan2(v[:, 1], v[:, 0]), TWO_PI))

    @cached_property
    def interior_indices(self) -> np.ndarray:
        mask = np.ones(self.vertex_count, dtype=bool)
        mask[self.boundary_loop] = False
        return _freeze(np.flatnonzero(mask), dtype=np.int64)

    @cached_property
    def triangle_areas(self) -> np.ndarray:
        p = self.vertices[self.triangles]
        a = 0.5 * (
            (p[:, 1, 0] - p[:, 0, 0]) * (p[:, 2, 1] - p[:, 0, 1])
            - (p[:, 1, 1] - p[:, 0, 1]) * (p[:, 2, 0] - p[:, 0, 0])
        )
        return _freeze(a)

    @cached_property
    def _jacobian_inverses(self) -> np.ndarray:
        # J maps the reference triangle to the physical one, columns are
        # the two edge vectors out of vertex 0
        p = self.vertices[self.triangles]
        j = np.stack([p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]], axis=2)
        det = j[:, 0, 0] * j[:, 1, 1] - j[:, 0, 1] * j[:, 1, 0]
        inv = np.empty_like(j)
        inv[:, 0, 0] = j[:, 1, 1] / det
        inv[:, 0, 1] = -j[:, 0, 1] / det
        inv[:, 1, 0] = -j[:, 1, 0] / det
        inv[:, 1, 1] = j[:, 0, 0] / det
        return inv

    @cached_property
    def stiffness(self) -> sp.csr_matrix:
        """Cotangent (PL Dirichlet) stiffness matrix, row sums zero."""
        tris = self.triangles
        p = self.vertices[tris]
        # edge opposite each local vertex, cyclic so the three sum to zero
        e = np.stack(
            [p[:, 2] - p[:, 1], p[:, 0] - p[:, 2], p[:, 1] - p[:, 0]], axis=1
        )
        area = self.triangle_areas
        local = np.einsum("tid,tjd->tij", e, e) / (4.0 * area)[:, None, None]
        rows = np.repeat(tris, 3, axis=1).reshape(-1)
        cols = np.tile(tris, (1, 3)).reshape(-1)
        mat = sp.coo_matrix(
            (local.reshape(-1), (rows, cols)),
            shape=(self.vertex_count, self.vertex_count),
        )
        return mat.tocsr()

    @cached_property
    def _interior_solver(self):
        k = self.stiffness.tocsc()
        ii = self.interior_indices
        bb = self.boundary_loop
        k_ii = k[ii][:, ii]
        k_ib = k[ii][:, bb]
        return splu(k_ii.tocsc()), k_ib.tocsr()

    @cached_property
    def _centroid_tree(self) -> cKDTree:
        centroids = self.vertices[self.triangles].mean(axis=1)
        return cKDTree(centroids)


def build_disk_mesh(rings: int, boundary_count: int) -> DiskMesh:
    """Concentric-ring disk mesh with ring radii j/rings.

    boundary_count must be a multiple of 3 (the three-point normalization
    pins boundary vertices at angles 2*pi*k/3) and at least 12.
    """
    if not isinstance(rings, (int, np.integer)) or rings < 1:
        raise ConfigurationError(f"rings must be a positive integer, got {rings}")
    if (
        not isinstance(boundary_count, (int, np.integer))
        or boundary_count < 12
        or boundary_count % 3 != 0
    ):
        raise ConfigurationError(
            f"boundary_count must be a multiple of 3 and at least 12, got {boundary_count}"
        )
    m = int(boundary_count)
    rings = int(rings)
    angles = TWO_PI * np.arange(m) / m
    cos, sin = np.cos(angles), np.sin(angles)
    verts = [np.zeros((1, 2))]
    for j in range(1, rings + 1):
        r = j / rings
        verts.append(np.column_stack([r * cos, r * sin]))
    vertices = np.vstack(verts)

    tris = []
    first = 1  # ring 1 starts after the center vertex
    k = np.arange(m)
    kn = (k + 1) % m
    tris.append(np.column_stack([np.zeros(m, dtype=int), first + k, first + kn]))
    for j in range(1, rings):
        inner = 1 + (j - 1) * m
        outer = 1 + j * m
        # quad (inner k, inner k+1, outer k+1, outer k) split along the
        # diagonal from inner k to outer k+1
        tris.append(np.column_stack([inner + k, outer + k, outer + kn]))
        tris.append(np.column_stack([inner + k, outer + kn, inner + kn]))
    triangles = np.vstack(tris)
    boundary = 1 + (rings - 1) * m + k
    return DiskMesh(vertices, triangles, boundary)


@dataclass(frozen=True)
class DiskMap:
    """Vertexwise R^k values on a disk mesh, linear over each triangle."""

    mesh: DiskMesh
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 2 or vals.shape[0] != self.mesh.vertex_count:
            raise ValueError(
                f"values must be (V, k) with V={self.mesh.vertex_count}, got {vals.shape}"
            )
        if not np.isfinite(vals).all():
            raise ValueError("map values must be finite")
        object.__setattr__(self, "values", _freeze(vals))

    @property
    def dim(self) -> int:
        return self.values.shape[1]

    @cached_property
    def boundary_values(self) -> np.ndarray:
        return self.values[self.mesh.boundary_loop]

    @cached_property
    def differentials(self) -> np.ndarray:
        """Per-triangle k x 2 differential of the linear map."""
        tris = self.mesh.triangles
        v = self.values
        d_ref = np.stack(
            [v[tris[:, 1]] - v[tris[:, 0]], v[tris[:, 2]] - v[tris[:, 0]]], axis=2
        )
        return d_ref @ self.mesh._jacobian_inverses


def dirichlet_energy(dmap: DiskMap) -> float:
    """(1/2) integral of |grad v|^2 over the meshed disk."""
    d = dmap.differentials
    dens = np.einsum("tkd,tkd->t", d, d)
    return float(0.5 * (dens * dmap.mesh.triangle_areas).sum())


def map_area(dmap: DiskMap) -> float:
    """Integral of sqrt(det(Dv^T Dv)), the unsigned swept area of the map."""
    d = dmap.differentials
    g11 = np.einsum("tk,tk->t", d[:, :, 0], d[:, :, 0])
    g22 = np.einsum("tk,tk->t", d[:, :, 1], d[:, :, 1])
    g12 = np.einsum("tk,tk->t", d[:, :, 0], d[:, :, 1])
    det = np.maximum(g11 * g22 - g12 * g12, 0.0)
    return float((np.sqrt(det) * dmap.mesh.triangle_areas).sum())


def conformality_residual(dmap: DiskMap) -> float:
    """Energy minus area; nonnegative, zero exactly for conformal maps."""
    return dirichlet_energy(dmap) - map_area(dmap)


def harmonic_extend(mesh: DiskMesh, boundary_values: np.ndarray) -> DiskMap:
    """Discrete harmonic map with the given boundary vertex values.

    boundary_values is (m, k) ordered like mesh.boundary_loop.  Solves the
    interior Laplace system with the cached sparse factorization, so
    repeated extensions on one mesh cost one triangular solve each.
    """
    g = np.asarray(boundary_values, dtype=float)
    if g.ndim == 1:
        g = g[:, None]
    if g.shape[0] != mesh.boundary_count:
        raise ValueError(
            f"expected {mesh.boundary_count} boundary values, got {g.shape[0]}"
        )
    if not np.isfinite(g).all():
        raise ValueError("boundary values must be finite")
    solver, k_ib = mesh._interior_solver
    interior = solver.solve(-(k_ib @ g))
    values = np.empty((mesh.vertex_count, g.shape[1]))
    values[mesh.boundary_loop] = g
    values[mesh.interior_indices] = interior
    return DiskMap(mesh, values)


def max_principle_defect(dmap: DiskMap) -> float:
    """How far any coordinate exceeds its boundary range; 0 when the
    discrete maximum principle holds exactly."""
    all_max = dmap.values.max(axis=0)
    all_min = dmap.values.min(axis=0)
    b = dmap.boundary_values
    over = all_max - b.max(axis=0)
    under = b.min(axis=0) - all_min
    return float(max(over.max(), under.max(), 0.0))


def _barycentric_pick(mesh: DiskMesh, pts: np.ndarray, cand: np.ndarray):
    """Best candidate triangle per point by least barycentric violation."""
    tris = mesh.triangles
    inv = mesh._jacobian_inverses
    anchors = mesh.vertices[tris[:, 0]]
    rel = pts[:, None, :] - anchors[cand]  # (P, Q, 2)
    st = np.einsum("pqed,pqd->pqe", inv[cand], rel)
    s, t = st[..., 0], st[..., 1]
    minbary = np.minimum(np.minimum(s, t), 1.0 - s - t)
    best = np.argmax(minbary, axis=1)
    rows = np.arange(len(pts))
    return (
        cand[rows, best],
        s[rows, best],
        t[rows, best],
        minbary[rows, best],
    )


def interpolate_map(dmap: DiskMap, points) -> np.ndarray:
    """Evaluate the PL map at points of the closed unit disk.

    Candidate triangles come from a KD-tree over centroids; queries that
    miss every candidate (deep in a thin triangle, boundary roundoff)
    fall back to a full scan and take the least-violated triangle.
    """
    mesh = dmap.mesh
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    kq = min(16, mesh.triangle_count)
    _, cand = mesh._centroid_tree.query(pts, k=kq)
    cand = np.asarray(cand, dtype=np.int64).reshape(len(pts), -1)
    chosen, lam_s, lam_t, minbary = _barycentric_pick(mesh, pts, cand)
    miss = minbary < -1e-9
    if miss.any():
        everything = np.broadcast_to(
            np.arange(mesh.triangle_count), (int(miss.sum()), mesh.triangle_count)
        )
        ch, ls, lt, _ = _barycentric_pick(mesh, pts[miss], everything)
        chosen[miss], lam_s[miss], lam_t[miss] = ch, ls, lt
    tris = mesh.triangles
    v = dmap.values
    lam0 = 1.0 - lam_s - lam_t
    return (
        lam0[:, None] * v[tris[chosen, 0]]
        + lam_s[:, None] * v[tris[chosen, 1]]
        + lam_t[:, None] * v[tris[chosen, 2]]
    )


def mesh_document(dmap: DiskMap | DiskMesh) -> str:
    """Text export: header, vertex lines (domain then image), triangles.

    Line 1: ``vertices V triangles T image_dim k``
    Then V lines ``x y [image components]`` and T lines ``a b c``.
    """
    if isinstance(dmap, DiskMesh):
        mesh, values = dmap, None
        k = 0
    else:
        mesh, values = dmap.mesh, dmap.values
        k = values.shape[1]
    lines = [f"vertices {mesh.vertex_count} triangles {mesh.triangle_count} image_dim {k}"]
    for i, (x, y) in enumerate(mesh.vertices):
        fields = [f"{x:.12g}", f"{y:.12g}"]
        if values is not None:
            fields += [f"{c:.12g}" for c in values[i]]
        lines.append(" ".join(fields))
    for a, b, c in mesh.triangles:
        lines.append(f"{a} {b} {c}")
    return "\n".join(lines) + "\n"


def export_mesh(dmap: DiskMap | DiskMesh, path) -> None:
    try:
        Path(path).write_text(mesh_document(dmap))
    except OSError as exc:
        raise OutputError(f"cannot write mesh export to {path}: {exc}") from exc
