"""Structured triangulations of the rotationally symmetric benchmark domains.

The mesh lives in the polar chart: a geodesic disk of radius equal to the
inradius, with vertices placed on concentric rings.  Ring spacing is uniform
in the radial coordinate; the number of vertices on each ring tracks the
intrinsic circumference 2 pi J(r), so spherical caps coarsen toward the pole
and hyperbolic disks refine toward the rim.  Adjacent rings with different
vertex counts are stitched by an angular two-pointer sweep, which keeps the
triangulation conforming by construction.

Generation is pure arithmetic on the inputs, so identical inputs produce
byte-identical meshes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import BenchmarkGeometry

__all__ = ["MeshError", "TriMesh", "disk_mesh", "MAX_VERTICES"]

# guards against accidentally requesting an enormous dense eigenproblem
MAX_VERTICES = 200_000


class MeshError(ValueError):
    """Mesh generation failed or produced an invalid triangulation."""


@dataclass(frozen=True)
class TriMesh:
    """Conforming P1 triangulation of a disk chart.

    vertices are chart coordinates (the polar radius of a vertex is its
    euclidean norm in the chart), triangles are CCW vertex triples,
    boundary_vertices walk the rim once in CCW order, and boundary_edges
    are the consecutive rim pairs.
    """

    vertices: np.ndarray
    triangles: np.ndarray
    boundary_vertices: np.ndarray
    boundary_edges: np.ndarray
    h: float
    radius: float

    @property
    def n_vertices(self) -> int:
        return int(self.vertices.shape[0])

    @property
    def n_triangles(self) -> int:
        return int(self.triangles.shape[0])

    def vertex_radii(self) -> np.ndarray:
        return np.hypot(self.vertices[:, 0], self.vertices[:, 1])

    def signed_areas(self) -> np.ndarray:
        p = self.vertices[self.triangles]
        e1 = p[:, 1] - p[:, 0]
        e2 = p[:, 2] - p[:, 0]
        return 0.5 * (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])

    def edge_counts(self):
        """Unique undirected edges and the number of triangles touching each."""
        t = self.triangles
        pairs = np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]])
        pairs = np.sort(pairs, axis=1)
        edges, counts = np.unique(pairs, axis=0, return_counts=True)
        return edges, counts

    def validate(self) -> None:
        """Check the structural invariants; raises MeshError on violation."""
        areas = self.signed_areas()
        if np.any(areas <= 0.0):
            raise MeshError(f"{int(np.sum(areas <= 0.0))} non-CCW or degenerate triangles")
        edges, counts = self.edge_counts()
        if np.any(counts > 2):
            raise MeshError("non-conforming mesh: an edge belongs to more than two triangles")
        n_e = edges.shape[0]
        euler = self.n_vertices - n_e + self.n_triangles
        if euler != 1:
            raise MeshError(f"Euler characteristic {euler} != 1 for a disk")
        rim = edges[counts == 1]
        declared = np.sort(self.boundary_edges, axis=1)
        rim_set = {tuple(e) for e in rim.tolist()}
        declared_set = {tuple(e) for e in declared.tolist()}
        if rim_set != declared_set:
            raise MeshError("boundary edges do not match the triangulation rim")
        radii = self.vertex_radii()[self.boundary_vertices]
        if np.any(np.abs(radii - self.radius) > 1e-12 * max(1.0, self.radius)):
            raise MeshError("boundary vertices are not on the rim circle")


def _ring_vertices(radius: float, count: int) -> np.ndarray:
    angles = 2.0 * math.pi * np.arange(count) / count
    return np.column_stack([radius * np.cos(angles), radius * np.sin(angles)])


def _stitch_rings(inner: np.ndarray, outer: np.ndarray) -> list:
    """Triangulate the annulus between two vertex rings by an angular sweep.

    Both rings are uniformly spaced starting at angle 0.  At each step the
    pointer with the smaller next angle advances, emitting one CCW triangle.
    """
    m_a, m_b = inner.size, outer.size
    tris = []
    ia = ib = 0
    for _ in range(m_a + m_b):
        next_a = (ia + 1) / m_a
        next_b = (ib + 1) / m_b
        if next_a <= next_b:
            tris.append((inner[ia % m_a], outer[ib % m_b], inner[(ia + 1) % m_a]))
            ia += 1
        else:
            tris.append((inner[ia % m_a], outer[ib % m_b], outer[(ib + 1) % m_b]))
            ib += 1
    return tris


def disk_mesh(geometry: BenchmarkGeometry, h: float) -> TriMesh:
    """Ring mesh of the benchmark domain with target edge length h.

    Radial layers are spaced h apart (at least two); ring i carries
    max(6, round(2 pi J(r_i)/h)) vertices.  The result is validated before
    it is returned.
    """
    if not (h > 0.0 and math.isfinite(h)):
        raise MeshError(f"mesh size h = {h} must be positive and finite")
    r_max = geometry.inradius
    n_r = max(2, round(r_max / h))
    ring_counts = []
    ring_starts = []
    verts = [np.zeros((1, 2))]
    n = 1
    for i in range(1, n_r + 1):
        r_i = r_max * i / n_r
        m_i = max(6, round(2.0 * math.pi * float(geometry.jacobian(r_i)) / h))
        ring_counts.append(m_i)
        ring_starts.append(n)
        verts.append(_ring_vertices(r_i, m_i))
        n += m_i
    if n > MAX_VERTICES:
        raise MeshError(f"mesh with {n} vertices exceeds the cap of {MAX_VERTICES}")
    vertices = np.concatenate(verts)

    tris = []
    first = np.arange(ring_starts[0], ring_starts[0] + ring_counts[0])
    for k in range(ring_counts[0]):
        tris.append((0, first[k], first[(k + 1) % ring_counts[0]]))
    for i in range(1, n_r):
        inner = np.arange(ring_starts[i - 1], ring_starts[i - 1] + ring_counts[i - 1])
        outer = np.arange(ring_starts[i], ring_starts[i] + ring_counts[i])
        tris.extend(_stitch_rings(inner, outer))
    triangles = np.array(tris, dtype=np.int64)

    b0 = ring_starts[-1]
    m_b = ring_counts[-1]
    boundary_vertices = np.arange(b0, b0 + m_b, dtype=np.int64)
    boundary_edges = np.column_stack(
        [boundary_vertices, np.roll(boundary_vertices, -1)]
    ).astype(np.int64)

    mesh = TriMesh(
        vertices=vertices,
        triangles=triangles,
        boundary_vertices=boundary_vertices,
        boundary_edges=boundary_edges,
        h=float(h),
        radius=float(r_max),
    )
    mesh.validate()
    return mesh
