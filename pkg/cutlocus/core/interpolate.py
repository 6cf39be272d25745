"""
Piecewise-linear evaluation of vertex fields at arbitrary points.

Points are located by taking the nearest vertex from a KD-tree, testing its
incident faces, and walking across edges towards the point when none of
them contains it. Flat-torus meshes are searched in periodic parameter
space and sphere meshes by radial projection onto the faces.
"""

from typing import Optional
import logging

import numpy as np
from scipy.spatial import cKDTree

from .mesh import TriangleMesh
from .surfaces import FLAT_UNIT_TORUS, UNIT_SPHERE

logger = logging.getLogger(__name__)

# Barycentric slack for point-in-triangle tests
INSIDE_TOL = 1e-10

# Face-walk step limit per point
MAX_WALK_STEPS = 256

# Points processed per vectorized batch
CHUNK = 20000


def _pad_incident_faces(mesh: TriangleMesh) -> np.ndarray:
    incidence = mesh.vertex_faces.tocsr()
    valence = np.diff(incidence.indptr)
    table = np.full((mesh.vertex_count, max(1, int(valence.max()))), -1, dtype=np.int64)
    for v in range(mesh.vertex_count):
        row = incidence.indices[incidence.indptr[v]:incidence.indptr[v + 1]]
        table[v, :len(row)] = row
    return table


class MeshInterpolator:
    """Barycentric interpolation of a vertex field on a mesh."""

    def __init__(self, mesh: TriangleMesh, values: Optional[np.ndarray] = None):
        """
        Initialize the interpolator.

        Args:
            mesh: Planar, sphere, flat-torus or embedded mesh
            values: Vertex field to evaluate (can be replaced via ``bind``)

        Raises:
            ValueError: If the mesh has no coordinates to locate points in
        """
        self.mesh = mesh
        if mesh.surface == FLAT_UNIT_TORUS and mesh.params is not None:
            self.mode = "periodic"
            self.coords = mesh.params
            self.tree = cKDTree(np.mod(mesh.params, 1.0), boxsize=1.0)
        elif mesh.vertices is None:
            raise ValueError("intrinsic mesh without parameters cannot be interpolated")
        elif mesh.vertices.shape[1] == 2 or np.allclose(mesh.vertices[:, 2], 0.0):
            self.mode = "planar"
            self.coords = mesh.vertices[:, :2]
            self.tree = cKDTree(self.coords)
        else:
            self.mode = "radial" if mesh.surface == UNIT_SPHERE else "projected"
            self.coords = mesh.vertices
            self.tree = cKDTree(self.coords)
        self.incident = _pad_incident_faces(mesh)
        self.neighbors = mesh.face_neighbors
        self.min_chord = 2.0 * mesh.max_edge_length
        self.values = None if values is None else self._check(values)

    def _check(self, values) -> np.ndarray:
        values = np.asarray(values, dtype=float).reshape(-1)
        if values.shape != (self.mesh.vertex_count,):
            raise ValueError("field length does not match the mesh")
        return values

    def bind(self, values) -> "MeshInterpolator":
        """Return an interpolator of another field on the same mesh."""
        other = object.__new__(MeshInterpolator)
        other.__dict__.update(self.__dict__)
        other.values = self._check(values)
        return other

    def barycentric(self, faces: np.ndarray, points: np.ndarray) -> np.ndarray:
        """Barycentric coordinates of points with respect to faces, shape (N, 3)."""
        corners = self.coords[self.mesh.faces[faces]]
        if self.mode == "periodic":
            base = corners[:, 0]
            corners = base[:, None, :] + self._wrap(corners - base[:, None, :])
            points = base + self._wrap(points - base)
            return self._planar_bary(corners, points)
        if self.mode == "planar":
            return self._planar_bary(corners, points)

        p0, p1, p2 = corners[:, 0], corners[:, 1], corners[:, 2]
        e1, e2 = p1 - p0, p2 - p0
        if self.mode == "radial":
            normal = np.cross(e1, e2)
            denom = np.einsum("ij,ij->i", normal, points)
            scale = np.einsum("ij,ij->i", normal, p0) / np.where(np.abs(denom) > 0, denom, np.nan)
            points = points * scale[:, None]
            behind = ~(scale > 0)
        else:
            behind = np.zeros(len(points), dtype=bool)
        rel = points - p0
        d00 = np.einsum("ij,ij->i", e1, e1)
        d01 = np.einsum("ij,ij->i", e1, e2)
        d11 = np.einsum("ij,ij->i", e2, e2)
        d20 = np.einsum("ij,ij->i", rel, e1)
        d21 = np.einsum("ij,ij->i", rel, e2)
        det = d00 * d11 - d01 * d01
        b1 = (d11 * d20 - d01 * d21) / det
        b2 = (d00 * d21 - d01 * d20) / det
        bary = np.stack([1.0 - b1 - b2, b1, b2], axis=1)
        bary[behind] = -np.inf
        return bary

    @staticmethod
    def _wrap(delta: np.ndarray) -> np.ndarray:
        return delta - np.round(delta)

    @staticmethod
    def _planar_bary(corners: np.ndarray, points: np.ndarray) -> np.ndarray:
        p0, p1, p2 = corners[:, 0], corners[:, 1], corners[:, 2]
        det = (p1[:, 0] - p0[:, 0]) * (p2[:, 1] - p0[:, 1]) - (p2[:, 0] - p0[:, 0]) * (p1[:, 1] - p0[:, 1])
        b1 = ((points[:, 0] - p0[:, 0]) * (p2[:, 1] - p0[:, 1])
              - (p2[:, 0] - p0[:, 0]) * (points[:, 1] - p0[:, 1])) / det
        b2 = ((p1[:, 0] - p0[:, 0]) * (points[:, 1] - p0[:, 1])
              - (points[:, 0] - p0[:, 0]) * (p1[:, 1] - p0[:, 1])) / det
        return np.stack([1.0 - b1 - b2, b1, b2], axis=1)

    def _query_points(self, points: np.ndarray) -> np.ndarray:
        points = np.asarray(points, dtype=float)
        if points.ndim == 1:
            points = points[None, :]
        if self.mode == "periodic":
            return np.mod(points[:, :2], 1.0)
        if self.mode == "planar":
            return points[:, :2]
        return points

    def locate(self, points) -> tuple:
        """
        Containing face and barycentric coordinates for each point.

        Returns:
            Tuple (faces, bary); faces is -1 where the point lies outside the mesh
        """
        points = self._query_points(points)
        faces = np.full(len(points), -1, dtype=np.int64)
        bary = np.full((len(points), 3), np.nan)
        for start in range(0, len(points), CHUNK):
            chunk = points[start:start + CHUNK]
            f, b = self._locate_chunk(chunk)
            faces[start:start + CHUNK] = f
            bary[start:start + CHUNK] = b
        return faces, bary

    def _locate_chunk(self, points: np.ndarray):
        _, nearest = self.tree.query(points)
        candidates = self.incident[nearest]
        k = candidates.shape[1]
        flat_faces = np.where(candidates >= 0, candidates, 0).reshape(-1)
        flat_points = np.repeat(points, k, axis=0)
        bary = self.barycentric(flat_faces, flat_points).reshape(len(points), k, 3)
        score = np.where(candidates >= 0, np.nan_to_num(bary.min(axis=2), nan=-np.inf), -np.inf)
        pick = np.argmax(score, axis=1)
        rows = np.arange(len(points))
        faces = candidates[rows, pick]
        best_bary = bary[rows, pick]
        inside = score[rows, pick] >= -INSIDE_TOL

        for i in np.flatnonzero(~inside):
            faces[i], best_bary[i] = self._walk(int(faces[i]), points[i])
        return faces, best_bary

    def _walk(self, face: int, point: np.ndarray):
        """Step across the edge opposite the most negative coordinate."""
        visited = set()
        for _ in range(MAX_WALK_STEPS):
            b = self.barycentric(np.array([face]), point[None, :])[0]
            if np.all(b >= -INSIDE_TOL):
                return face, b
            visited.add(face)
            order = np.argsort(b)
            moved = False
            for corner in order:
                if b[corner] >= -INSIDE_TOL:
                    break
                nxt = int(self.neighbors[face, corner])
                if nxt >= 0 and nxt not in visited:
                    face = nxt
                    moved = True
                    break
            if not moved:
                break
        return -1, np.full(3, np.nan)

    def __call__(self, points) -> np.ndarray:
        """
        Evaluate the bound field at points.

        Returns:
            Values, NaN for points outside a bounded mesh
        """
        if self.values is None:
            raise ValueError("no field bound to the interpolator")
        faces, bary = self.locate(points)
        out = np.full(len(faces), np.nan)
        ok = faces >= 0
        out[ok] = np.einsum("ij,ij->i", self.values[self.mesh.faces[faces[ok]]], bary[ok])
        return out
