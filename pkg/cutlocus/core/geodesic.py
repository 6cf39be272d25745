"""
Geodesic distances on triangle meshes and on the built-in model surfaces.

Mesh distances come from fast marching: a priority-queue wavefront with the
planar-unfolding update across each triangle and a Dijkstra edge update
where the unfolded ray misses the triangle.
"""

from dataclasses import dataclass, field
from typing import Iterable, Optional, Tuple
import heapq
import logging
import math

import numpy as np

from .mesh import TriangleMesh, as_vertex_indices
from .surfaces import FLAT_UNIT_TORUS, UNIT_SPHERE

logger = logging.getLogger(__name__)

# Slack allowed in the edge Lipschitz check
LIPSCHITZ_SLACK = 1e-9


@dataclass
class DistanceField:
    """Distance values at every vertex and the sources they were measured from."""
    values: np.ndarray
    sources: np.ndarray
    fallback_updates: int = 0
    unreachable: int = 0

    def lipschitz_violation(self, mesh: TriangleMesh) -> float:
        """Largest excess of |d(i) - d(j)| over the edge length."""
        i, j = mesh.edges[:, 0], mesh.edges[:, 1]
        finite = np.isfinite(self.values[i]) & np.isfinite(self.values[j])
        excess = np.abs(self.values[i] - self.values[j]) - mesh.edge_lengths
        return float(max(0.0, excess[finite].max(initial=0.0)))

    def is_consistent(self, mesh: TriangleMesh) -> bool:
        return self.lipschitz_violation(mesh) <= LIPSCHITZ_SLACK


def _two_point_update(di: float, dj: float, a: float, b: float, c: float) -> Optional[float]:
    """
    Distance at k from known values at i and j by unfolding the triangle.

    i sits at (0, 0), j at (c, 0) and k above the edge; a = |jk|, b = |ik|.
    Returns None when the straight ray from the virtual source misses edge ij.
    """
    xk = (b * b + c * c - a * a) / (2.0 * c)
    yk2 = b * b - xk * xk
    if yk2 <= 0.0:
        return None
    yk = math.sqrt(yk2)
    sx = (di * di - dj * dj + c * c) / (2.0 * c)
    sy2 = di * di - sx * sx
    if sy2 < 0.0:
        return None
    sy = -math.sqrt(sy2)
    t = -sy / (yk - sy)
    cross = sx + t * (xk - sx)
    if cross < 0.0 or cross > c:
        return None
    return math.hypot(xk - sx, yk - sy)


def fast_march(mesh: TriangleMesh, sources: Iterable) -> DistanceField:
    """
    Geodesic distance from a vertex set by fast marching.

    Args:
        mesh: Mesh
        sources: Source vertices (index collection or boolean mask)

    Returns:
        DistanceField; unreachable vertices hold +inf

    Raises:
        ValueError: If the source set is empty
    """
    src = as_vertex_indices(mesh, sources)
    if len(src) == 0:
        raise ValueError("fast marching needs at least one source vertex")

    n = mesh.vertex_count
    dist = [math.inf] * n
    accepted = [False] * n
    faces = mesh.faces.tolist()
    lengths = mesh.face_lengths.tolist()
    incidence = mesh.vertex_faces.tocsr()
    indptr, indices = incidence.indptr.tolist(), incidence.indices.tolist()

    heap = []
    for s in src.tolist():
        dist[s] = 0.0
        heap.append((0.0, s))
    heapq.heapify(heap)

    fallbacks = 0
    while heap:
        dv, v = heapq.heappop(heap)
        if accepted[v] or dv > dist[v]:
            continue
        accepted[v] = True
        for f in indices[indptr[v]:indptr[v + 1]]:
            tri = faces[f]
            side = lengths[f]
            corner = tri.index(v)
            for step in (1, 2):
                k = (corner + step) % 3
                target = tri[k]
                if accepted[target]:
                    continue
                other = 3 - corner - k
                w = tri[other]
                # side[x] is the length opposite corner x
                len_vk = side[other]
                candidate = dv + len_vk
                if accepted[w]:
                    len_wk = side[corner]
                    len_vw = side[k]
                    unfolded = _two_point_update(dv, dist[w], len_wk, len_vk, len_vw)
                    if unfolded is None:
                        fallbacks += 1
                        candidate = min(candidate, dist[w] + len_wk)
                    else:
                        candidate = min(candidate, unfolded, dist[w] + len_wk)
                if candidate < dist[target]:
                    dist[target] = candidate
                    heapq.heappush(heap, (candidate, target))

    values = np.array(dist)
    unreachable = int(np.sum(~np.isfinite(values)))
    if unreachable:
        logger.warning(f"{unreachable} vertices are unreachable from the sources; set to +inf")
    if fallbacks:
        logger.debug(f"Fast marching used {fallbacks} edge fallback updates")
    return DistanceField(values=values, sources=src, fallback_updates=fallbacks,
                         unreachable=unreachable)


def multi_source_distance(mesh: TriangleMesh, vertex_set: Iterable) -> DistanceField:
    """Distance to the nearest vertex of a set."""
    return fast_march(mesh, vertex_set)


def analytic_distance(surface: str, base, query):
    """
    Exact geodesic distance on a model surface.

    Args:
        surface: "unit_sphere" (points as 3-vectors) or "flat_unit_torus"
            (points as parameters in the unit square)
        base: Base point
        query: Query point or array of points

    Returns:
        Scalar for a single query, array otherwise

    Raises:
        ValueError: If the surface id is unknown
    """
    base = np.asarray(base, dtype=float)
    query = np.asarray(query, dtype=float)
    if surface == UNIT_SPHERE:
        p = base / np.linalg.norm(base)
        q = query / np.linalg.norm(query, axis=-1, keepdims=True)
        result = np.arccos(np.clip(q @ p, -1.0, 1.0))
    elif surface == FLAT_UNIT_TORUS:
        delta = query - base
        best = None
        for i in (-1, 0, 1):
            for j in (-1, 0, 1):
                d = np.linalg.norm(delta + np.array([i, j], dtype=float), axis=-1)
                best = d if best is None else np.minimum(best, d)
        # Queries outside the unit square still need the nearest translate
        delta = delta - np.round(delta)
        result = np.minimum(best, np.linalg.norm(delta, axis=-1))
    else:
        raise ValueError(f"unknown surface id {surface!r}")
    return float(result) if np.ndim(result) == 0 else result


def snap_to_vertex(mesh: TriangleMesh, point) -> Tuple[int, float]:
    """
    Nearest vertex to a point given in mesh coordinates.

    Flat-torus meshes take parameter coordinates and use the periodic metric.

    Returns:
        Tuple (vertex index, snap distance)
    """
    point = np.asarray(point, dtype=float)
    if mesh.surface == FLAT_UNIT_TORUS and mesh.params is not None:
        delta = mesh.params - point
        delta -= np.round(delta)
        dist = np.linalg.norm(delta, axis=1)
    elif mesh.vertices is not None:
        coords = mesh.vertices[:, :len(point)]
        dist = np.linalg.norm(coords - point, axis=1)
    else:
        raise ValueError("intrinsic mesh without parameters cannot locate points")
    idx = int(np.argmin(dist))
    logger.debug(f"Snapped {point.tolist()} to vertex {idx} (distance {dist[idx]:.3e})")
    return idx, float(dist[idx])
