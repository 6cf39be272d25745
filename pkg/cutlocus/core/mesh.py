"""
Triangle meshes and piecewise-linear finite-element operators.

A mesh carries its geometry either as embedded vertex coordinates or as
intrinsic edge lengths. Every operator in this module is computed from the
edge lengths alone, so intrinsic meshes (the flat torus) and embedded meshes
are treated identically.
"""

from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Tuple
import logging

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

logger = logging.getLogger(__name__)

# Angle above which a triangle is reported as badly shaped
MAX_ANGLE_WARNING = np.deg2rad(170.0)

# Relative tolerance for intrinsic/embedded edge length agreement
LENGTH_AGREEMENT_RTOL = 1e-12

# Absolute tolerance of the Gauss-Bonnet identity check
GAUSS_BONNET_TOL = 1e-8


def edge_table(faces: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Build the unique undirected edge table of a face list.

    Local edge ``k`` of a face is the edge opposite its corner ``k``.

    Args:
        faces: Integer array of shape (nf, 3)

    Returns:
        Tuple ``(edges, face_edges, counts)``: sorted vertex pairs (ne, 2),
        the edge index of each local edge (nf, 3), and how many faces share
        each edge (ne,)
    """
    nf = len(faces)
    half = np.concatenate([faces[:, [1, 2]], faces[:, [2, 0]], faces[:, [0, 1]]])
    key = np.sort(half, axis=1)
    edges, inverse, counts = np.unique(key, axis=0, return_inverse=True, return_counts=True)
    face_edges = np.asarray(inverse).reshape(-1).reshape(3, nf).T.copy()
    return edges, face_edges, counts


def _triangle_areas(lengths: np.ndarray) -> np.ndarray:
    """Numerically stable Heron formula on rows of side lengths."""
    srt = -np.sort(-lengths, axis=1)
    a, b, c = srt[:, 0], srt[:, 1], srt[:, 2]
    prod = (a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c))
    return 0.25 * np.sqrt(np.maximum(prod, 0.0))


class TriangleMesh:
    """Triangulated surface with embedded or intrinsic geometry."""

    def __init__(self, faces, vertices=None, edge_lengths=None, vertex_count: Optional[int] = None,
                 boundary=None, basepoint: Optional[int] = None, params=None,
                 surface: Optional[str] = None):
        """
        Initialize and validate a mesh.

        Args:
            faces: Vertex index triples, shape (nf, 3)
            vertices: Optional embedded coordinates, shape (nv, 2) or (nv, 3)
            edge_lengths: Optional lengths aligned with ``edge_table(faces)[0]``
            vertex_count: Number of vertices (required for intrinsic meshes)
            boundary: Optional per-vertex boundary flags
            basepoint: Optional basepoint vertex index
            params: Optional parameter coordinates (nv, 2), e.g. torus coordinates
            surface: Optional model surface id ("unit_sphere", "flat_unit_torus", "planar")

        Raises:
            ValueError: If any mesh invariant is violated
        """
        self.faces = np.ascontiguousarray(np.asarray(faces, dtype=np.int64))
        if self.faces.ndim != 2 or self.faces.shape[1] != 3 or len(self.faces) == 0:
            raise ValueError("faces must be a non-empty array of shape (nf, 3)")

        if vertices is None and edge_lengths is None:
            raise ValueError("mesh needs vertex coordinates or edge lengths")

        self.vertices = None if vertices is None else np.asarray(vertices, dtype=float)
        if self.vertices is not None:
            if self.vertices.ndim != 2 or self.vertices.shape[1] not in (2, 3):
                raise ValueError("vertices must have shape (nv, 2) or (nv, 3)")
            if vertex_count is not None and vertex_count != len(self.vertices):
                raise ValueError("vertex_count disagrees with the vertex array")
            vertex_count = len(self.vertices)
        if vertex_count is None:
            vertex_count = int(self.faces.max()) + 1
        self.vertex_count = int(vertex_count)

        self._check_faces()
        self.edges, self.face_edges, edge_counts = edge_table(self.faces)
        self._check_manifold(edge_counts)
        self.boundary_edge_mask = edge_counts == 1

        embedded = None
        if self.vertices is not None:
            i, j = self.edges[:, 0], self.edges[:, 1]
            embedded = np.linalg.norm(self.vertices[j] - self.vertices[i], axis=1)
        if edge_lengths is not None:
            lengths = np.asarray(edge_lengths, dtype=float).reshape(-1)
            if lengths.shape != (len(self.edges),):
                raise ValueError(
                    f"expected {len(self.edges)} edge lengths, got {lengths.shape[0]}")
            if embedded is not None:
                rel = np.abs(lengths - embedded) / np.maximum(embedded, np.finfo(float).tiny)
                worst = int(np.argmax(rel))
                if rel[worst] > LENGTH_AGREEMENT_RTOL:
                    a, b = self.edges[worst]
                    raise ValueError(
                        f"edge ({a}, {b}): intrinsic length {lengths[worst]!r} "
                        f"disagrees with embedded length {embedded[worst]!r}")
        else:
            lengths = embedded
        invalid = np.flatnonzero(~(np.isfinite(lengths) & (lengths > 0)))
        if len(invalid):
            bad = int(invalid[0])
            raise ValueError(f"edge {tuple(self.edges[bad])} has non-positive length")
        self.edge_lengths = lengths

        # Side lengths opposite each corner
        self.face_lengths = self.edge_lengths[self.face_edges]
        self._check_triangle_inequality()
        self.face_areas = _triangle_areas(self.face_lengths)
        degenerate = np.flatnonzero(self.face_areas <= 0)
        if len(degenerate):
            raise ValueError(f"face {int(degenerate[0])} is degenerate (zero area)")

        if boundary is None:
            flags = np.zeros(self.vertex_count, dtype=bool)
            flags[self.edges[self.boundary_edge_mask].reshape(-1)] = True
        else:
            flags = np.asarray(boundary, dtype=bool)
            if flags.shape != (self.vertex_count,):
                raise ValueError("boundary flags must have one entry per vertex")
        self.boundary = flags

        if basepoint is not None and not 0 <= int(basepoint) < self.vertex_count:
            raise ValueError(f"basepoint {basepoint} is not a vertex index")
        self.basepoint = None if basepoint is None else int(basepoint)

        self.params = None if params is None else np.asarray(params, dtype=float)
        if self.params is not None and self.params.shape != (self.vertex_count, 2):
            raise ValueError("params must have shape (nv, 2)")
        self.surface = surface

        self._vertex_faces = None
        self._face_neighbors = None

    @classmethod
    def from_vertices(cls, vertices, faces, **kwargs) -> "TriangleMesh":
        """Build an embedded mesh."""
        return cls(faces, vertices=vertices, **kwargs)

    @classmethod
    def from_edge_lengths(cls, faces, lengths: Dict[Tuple[int, int], float],
                          vertex_count: Optional[int] = None, **kwargs) -> "TriangleMesh":
        """
        Build an intrinsic mesh from a map of vertex pairs to lengths.

        Args:
            faces: Vertex index triples
            lengths: Mapping ``(i, j) -> length``; either orientation accepted
            vertex_count: Number of vertices

        Returns:
            Intrinsic TriangleMesh

        Raises:
            ValueError: If an edge has no length or two conflicting lengths
        """
        faces = np.asarray(faces, dtype=np.int64)
        edges, _, _ = edge_table(faces)
        table = {}
        for (i, j), value in lengths.items():
            key = (min(i, j), max(i, j))
            if key in table and table[key] != value:
                raise ValueError(f"edge {key} has conflicting lengths")
            table[key] = float(value)
        try:
            values = np.array([table[(int(i), int(j))] for i, j in edges])
        except KeyError as e:
            raise ValueError(f"missing length for edge {e.args[0]}") from e
        return cls(faces, edge_lengths=values, vertex_count=vertex_count, **kwargs)

    def _check_faces(self) -> None:
        f = self.faces
        bad = np.flatnonzero((f < 0).any(axis=1) | (f >= self.vertex_count).any(axis=1))
        if len(bad):
            raise ValueError(f"face {int(bad[0])} references an invalid vertex index")
        bad = np.flatnonzero((f[:, 0] == f[:, 1]) | (f[:, 1] == f[:, 2]) | (f[:, 0] == f[:, 2]))
        if len(bad):
            raise ValueError(f"face {int(bad[0])} repeats a vertex")

    def _check_manifold(self, counts: np.ndarray) -> None:
        over = np.flatnonzero(counts > 2)
        if len(over):
            a, b = self.edges[over[0]]
            raise ValueError(f"edge ({a}, {b}) is shared by {counts[over[0]]} faces")
        half = np.concatenate([self.faces[:, [1, 2]], self.faces[:, [2, 0]], self.faces[:, [0, 1]]])
        _, directed_counts = np.unique(half, axis=0, return_counts=True)
        if np.any(directed_counts > 1):
            raise ValueError("face orientation is inconsistent across a shared edge")

    def _check_triangle_inequality(self) -> None:
        l = self.face_lengths
        slack = l.sum(axis=1, keepdims=True) - 2.0 * l
        bad = np.flatnonzero((slack <= 0).any(axis=1))
        if len(bad):
            raise ValueError(f"face {int(bad[0])} violates the strict triangle inequality")

    @property
    def face_count(self) -> int:
        return len(self.faces)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @property
    def is_closed(self) -> bool:
        return not bool(self.boundary_edge_mask.any())

    @property
    def euler_characteristic(self) -> int:
        return self.vertex_count - self.edge_count + self.face_count

    @property
    def max_edge_length(self) -> float:
        return float(self.edge_lengths.max())

    @property
    def mean_edge_length(self) -> float:
        return float(self.edge_lengths.mean())

    @property
    def boundary_vertices(self) -> np.ndarray:
        return np.flatnonzero(self.boundary)

    @property
    def vertex_faces(self) -> sparse.csr_matrix:
        """Vertex-by-face incidence matrix (nv, nf)."""
        if self._vertex_faces is None:
            rows = self.faces.reshape(-1)
            cols = np.repeat(np.arange(self.face_count), 3)
            data = np.ones(len(rows))
            self._vertex_faces = sparse.csr_matrix(
                (data, (rows, cols)), shape=(self.vertex_count, self.face_count))
        return self._vertex_faces

    @property
    def face_neighbors(self) -> np.ndarray:
        """Face across the edge opposite each corner, -1 on the boundary."""
        if self._face_neighbors is None:
            ne = self.edge_count
            owners = np.full((ne, 2), -1, dtype=np.int64)
            flat_edges = self.face_edges.reshape(-1)
            flat_faces = np.repeat(np.arange(self.face_count), 3)
            order = np.argsort(flat_edges, kind="stable")
            sorted_edges = flat_edges[order]
            first = np.ones(len(order), dtype=bool)
            first[1:] = sorted_edges[1:] != sorted_edges[:-1]
            owners[sorted_edges[first], 0] = flat_faces[order][first]
            owners[sorted_edges[~first], 1] = flat_faces[order][~first]
            other = np.where(owners[self.face_edges, 0] == np.arange(self.face_count)[:, None],
                             owners[self.face_edges, 1], owners[self.face_edges, 0])
            self._face_neighbors = other
        return self._face_neighbors

    def adjacency(self) -> sparse.csr_matrix:
        """Symmetric edge-length weighted adjacency matrix."""
        i, j = self.edges[:, 0], self.edges[:, 1]
        w = self.edge_lengths
        return sparse.csr_matrix(
            (np.concatenate([w, w]), (np.concatenate([i, j]), np.concatenate([j, i]))),
            shape=(self.vertex_count, self.vertex_count))

    def face_angles(self) -> np.ndarray:
        """Interior angle at each corner, shape (nf, 3)."""
        l = self.face_lengths
        a = l
        b = np.roll(l, -1, axis=1)
        c = np.roll(l, -2, axis=1)
        cos = (b * b + c * c - a * a) / (2.0 * b * c)
        return np.arccos(np.clip(cos, -1.0, 1.0))

    def boundary_loops(self) -> List[List[int]]:
        """
        Ordered boundary loops following the face orientation.

        Returns:
            List of vertex index lists, one per closed boundary loop
        """
        if self.is_closed:
            return []
        half = np.concatenate([self.faces[:, [1, 2]], self.faces[:, [2, 0]], self.faces[:, [0, 1]]])
        on_boundary = self.boundary_edge_mask[self.face_edges.T.reshape(-1)]
        successor = {int(a): int(b) for a, b in half[on_boundary]}
        loops = []
        while successor:
            start = next(iter(successor))
            loop = [start]
            nxt = successor.pop(start)
            while nxt != start:
                loop.append(nxt)
                if nxt not in successor:
                    raise ValueError(f"boundary loop through vertex {nxt} is not closed")
                nxt = successor.pop(nxt)
            loops.append(loop)
        return loops

    def connected_components(self) -> int:
        n, _ = csgraph.connected_components(self.adjacency(), directed=False)
        return int(n)

    def __repr__(self) -> str:
        kind = "embedded" if self.vertices is not None else "intrinsic"
        return (f"TriangleMesh({kind}, nv={self.vertex_count}, nf={self.face_count}, "
                f"closed={self.is_closed})")


@dataclass(frozen=True)
class Operators:
    """Cotangent stiffness and lumped mass of a mesh."""
    stiffness: sparse.csr_matrix
    lumped_area: np.ndarray
    total_area: float


@dataclass(frozen=True)
class CurvatureInfo:
    """Discrete curvature summary of a mesh."""
    gauss_per_vertex: np.ndarray
    ricci_lower_bound: float
    diameter_estimate: float
    angle_defect: np.ndarray
    gauss_bonnet_error: Optional[float] = None


def cotangents(mesh: TriangleMesh) -> np.ndarray:
    """
    Cotangent of each corner angle from side lengths (law of cosines).

    Returns:
        Array (nf, 3); entry k is the cotangent of the angle at corner k
    """
    l = mesh.face_lengths
    a = l
    b = np.roll(l, -1, axis=1)
    c = np.roll(l, -2, axis=1)
    return (b * b + c * c - a * a) / (4.0 * mesh.face_areas[:, None])


def build_operators(mesh: TriangleMesh) -> Operators:
    """
    Assemble the P1 stiffness matrix and lumped vertex areas.

    ``u @ S @ u`` equals the Dirichlet energy of the linear interpolant of u.

    Args:
        mesh: Validated mesh

    Returns:
        Operators with symmetric, zero-row-sum stiffness

    Raises:
        ValueError: If a triangle is degenerate
    """
    degenerate = np.flatnonzero(mesh.face_areas <= 0)
    if len(degenerate):
        raise ValueError(f"face {int(degenerate[0])} is degenerate (zero area)")

    angles = mesh.face_angles()
    near_degenerate = int((angles > MAX_ANGLE_WARNING).any(axis=1).sum())
    if near_degenerate:
        logger.warning(f"{near_degenerate} triangles have an angle above 170 degrees")

    cot = cotangents(mesh)
    # Edge opposite corner k collects half the cotangent of that corner
    weights = 0.5 * np.bincount(mesh.face_edges.reshape(-1), weights=cot.reshape(-1),
                                minlength=mesh.edge_count)
    i, j = mesh.edges[:, 0], mesh.edges[:, 1]
    n = mesh.vertex_count
    off = sparse.csr_matrix(
        (np.concatenate([-weights, -weights]), (np.concatenate([i, j]), np.concatenate([j, i]))),
        shape=(n, n))
    diagonal = -np.asarray(off.sum(axis=1)).reshape(-1)
    stiffness = (off + sparse.diags(diagonal)).tocsr()
    stiffness.sort_indices()

    lumped = np.bincount(mesh.faces.reshape(-1), weights=np.repeat(mesh.face_areas / 3.0, 3),
                         minlength=n)
    total = float(mesh.face_areas.sum())
    logger.debug(f"Assembled operators: nv={n}, nnz={stiffness.nnz}, area={total:.6g}")
    return Operators(stiffness=stiffness, lumped_area=lumped, total_area=total)


def _local_frames(mesh: TriangleMesh) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Corner positions of each face in its own 2D frame: p0=(0,0), p1=(c,0), p2=(x,y)."""
    l = mesh.face_lengths
    a, b, c = l[:, 0], l[:, 1], l[:, 2]
    x = (b * b + c * c - a * a) / (2.0 * c)
    y = 2.0 * mesh.face_areas / c
    return c, x, y


def gradient_operator(mesh: TriangleMesh) -> sparse.csr_matrix:
    """
    Sparse map from vertex values to per-face gradients in local frames.

    Row ``2f + k`` gives component k of the gradient on face f. With A the
    face areas, ``G.T @ diag(A repeated) @ G`` equals the stiffness matrix.

    Returns:
        Matrix of shape (2 * nf, nv)
    """
    c, x, y = _local_frames(mesh)
    two_area = 2.0 * mesh.face_areas
    zeros = np.zeros_like(c)
    # grad phi_i = perp(p_{i+2} - p_{i+1}) / 2A with perp(v) = (-v_y, v_x)
    px = np.stack([zeros, c, x], axis=1)
    py = np.stack([zeros, zeros, y], axis=1)
    gx = np.empty_like(px)
    gy = np.empty_like(py)
    for k in range(3):
        k1, k2 = (k + 1) % 3, (k + 2) % 3
        gx[:, k] = -(py[:, k2] - py[:, k1]) / two_area
        gy[:, k] = (px[:, k2] - px[:, k1]) / two_area
    nf = mesh.face_count
    rows = np.concatenate([np.repeat(2 * np.arange(nf), 3), np.repeat(2 * np.arange(nf) + 1, 3)])
    cols = np.concatenate([mesh.faces.reshape(-1), mesh.faces.reshape(-1)])
    data = np.concatenate([gx.reshape(-1), gy.reshape(-1)])
    return sparse.csr_matrix((data, (rows, cols)), shape=(2 * nf, mesh.vertex_count))


def face_gradients(mesh: TriangleMesh, u) -> np.ndarray:
    """
    Gradient of the linear interpolant of u on every face.

    Embedded meshes return gradients in ambient coordinates (2- or
    3-vectors); intrinsic meshes return 2-vectors in each face's local frame.

    Args:
        mesh: Mesh
        u: Vertex field

    Returns:
        Array of shape (nf, 2) or (nf, 3)
    """
    u = _vertex_field(mesh, u)
    local = (gradient_operator(mesh) @ u).reshape(-1, 2)
    if mesh.vertices is None:
        return local
    c, x, y = _local_frames(mesh)
    v = mesh.vertices[mesh.faces]
    e1 = (v[:, 1] - v[:, 0]) / c[:, None]
    e2 = (v[:, 2] - v[:, 0] - x[:, None] * e1) / y[:, None]
    return local[:, :1] * e1 + local[:, 1:] * e2


def face_gradient_norms(mesh: TriangleMesh, u) -> np.ndarray:
    """Per-face gradient norm of the linear interpolant."""
    u = _vertex_field(mesh, u)
    local = (gradient_operator(mesh) @ u).reshape(-1, 2)
    return np.linalg.norm(local, axis=1)


def vertex_gradient_norm(mesh: TriangleMesh, u) -> np.ndarray:
    """
    Area-weighted average of incident face-gradient norms at each vertex.

    Args:
        mesh: Mesh
        u: Vertex field

    Returns:
        Nonnegative vertex field

    Raises:
        ValueError: If a vertex has no incident face
    """
    norms = face_gradient_norms(mesh, u)
    incidence = mesh.vertex_faces
    weight = incidence @ mesh.face_areas
    isolated = np.flatnonzero(weight <= 0)
    if len(isolated):
        raise ValueError(f"vertex {int(isolated[0])} is isolated (no incident face)")
    return (incidence @ (mesh.face_areas * norms)) / weight


def _vertex_field(mesh: TriangleMesh, u) -> np.ndarray:
    u = np.asarray(u, dtype=float).reshape(-1)
    if u.shape != (mesh.vertex_count,):
        raise ValueError(f"field has {u.shape[0]} values for {mesh.vertex_count} vertices")
    return u


def _double_sweep_diameter(mesh: TriangleMesh) -> float:
    graph = mesh.adjacency()
    start = 0
    dist = csgraph.dijkstra(graph, directed=False, indices=start)
    far = int(np.argmax(np.where(np.isfinite(dist), dist, -1.0)))
    dist = csgraph.dijkstra(graph, directed=False, indices=far)
    return float(np.max(dist[np.isfinite(dist)]))


def curvature_info(mesh: TriangleMesh) -> CurvatureInfo:
    """
    Angle-defect curvature, its lower bound K and a diameter estimate.

    Boundary vertices use the boundary defect ``pi - sum(angles)``; the
    Gauss-Bonnet check only runs on closed meshes.

    Returns:
        CurvatureInfo
    """
    angles = mesh.face_angles()
    angle_sum = np.bincount(mesh.faces.reshape(-1), weights=angles.reshape(-1),
                            minlength=mesh.vertex_count)
    full = np.where(mesh.boundary, np.pi, 2.0 * np.pi)
    defect = full - angle_sum
    area = build_operators(mesh).lumped_area
    density = defect / area
    K = max(0.0, -float(density.min()))

    gb_error = None
    if mesh.is_closed:
        gb_error = abs(float(defect.sum()) - 2.0 * np.pi * mesh.euler_characteristic)
        if gb_error > GAUSS_BONNET_TOL:
            logger.warning(f"Gauss-Bonnet mismatch {gb_error:.3e} (chi={mesh.euler_characteristic})")
    else:
        logger.debug("Mesh has boundary, skipping Gauss-Bonnet check")

    diameter = max(_double_sweep_diameter(mesh), mesh.max_edge_length)
    return CurvatureInfo(gauss_per_vertex=density, ricci_lower_bound=K,
                         diameter_estimate=diameter, angle_defect=defect,
                         gauss_bonnet_error=gb_error)


def sufficient_m(K: float, diam: float, n: int = 2) -> float:
    """
    Smallest m for which obstacle and gradient constraints are equivalent.

    Returns ``0.5 * max(sqrt(n K (1 + K diam^2)), n K diam)``.

    Raises:
        ValueError: On negative curvature bound, non-positive diameter or n < 2
    """
    if K < 0:
        raise ValueError(f"K must be nonnegative, got {K}")
    if diam <= 0:
        raise ValueError(f"diam must be positive, got {diam}")
    if n < 2:
        raise ValueError(f"dimension n must be at least 2, got {n}")
    return 0.5 * max(np.sqrt(n * K * (1.0 + K * diam * diam)), n * K * diam)


def as_vertex_indices(mesh: TriangleMesh, vertex_set: Iterable) -> np.ndarray:
    """Normalize a boolean mask or an index collection to sorted unique indices."""
    arr = np.asarray(list(vertex_set) if not isinstance(vertex_set, np.ndarray) else vertex_set)
    if arr.dtype == bool:
        if arr.shape != (mesh.vertex_count,):
            raise ValueError("vertex mask must have one entry per vertex")
        return np.flatnonzero(arr)
    arr = np.unique(arr.astype(np.int64).reshape(-1))
    if len(arr) and (arr[0] < 0 or arr[-1] >= mesh.vertex_count):
        raise ValueError("vertex index out of range")
    return arr
