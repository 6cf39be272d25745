"""
Built-in closed model surfaces with known cut loci.
"""

from typing import Dict, Tuple
import logging

import numpy as np

from .mesh import TriangleMesh, edge_table

logger = logging.getLogger(__name__)

UNIT_SPHERE = "unit_sphere"
FLAT_UNIT_TORUS = "flat_unit_torus"
PLANAR = "planar"

SURFACES = (UNIT_SPHERE, FLAT_UNIT_TORUS)

# Icosphere pole vertices survive every subdivision at these indices
NORTH_POLE = 0
SOUTH_POLE = 11


def _icosahedron() -> Tuple[np.ndarray, np.ndarray]:
    """Icosahedron with vertices at both poles, faces oriented outward."""
    z = 1.0 / np.sqrt(5.0)
    rho = 2.0 / np.sqrt(5.0)
    upper = [(rho * np.cos(2 * np.pi * k / 5), rho * np.sin(2 * np.pi * k / 5), z) for k in range(5)]
    lower = [(rho * np.cos(2 * np.pi * k / 5 + np.pi / 5), rho * np.sin(2 * np.pi * k / 5 + np.pi / 5), -z)
             for k in range(5)]
    vertices = np.array([(0.0, 0.0, 1.0)] + upper + lower + [(0.0, 0.0, -1.0)])

    faces = []
    for k in range(5):
        u0, u1 = 1 + k, 1 + (k + 1) % 5
        l0, l1 = 6 + k, 6 + (k + 1) % 5
        faces.append((NORTH_POLE, u0, u1))
        faces.append((u0, l0, u1))
        faces.append((u1, l0, l1))
        faces.append((SOUTH_POLE, l1, l0))
    return vertices, np.array(faces, dtype=np.int64)


def icosphere(subdivisions: int = 4, radius: float = 1.0) -> TriangleMesh:
    """
    Subdivided icosahedron projected onto a sphere.

    The basepoint is the north pole (vertex 0); the south pole is vertex 11.

    Args:
        subdivisions: Number of 1-to-4 midpoint subdivisions
        radius: Sphere radius

    Returns:
        Embedded TriangleMesh tagged as the unit sphere when radius is 1
    """
    if subdivisions < 0:
        raise ValueError(f"subdivisions must be nonnegative, got {subdivisions}")
    vertices, faces = _icosahedron()
    points = [tuple(v) for v in vertices]

    for _ in range(subdivisions):
        cache: Dict[Tuple[int, int], int] = {}

        def midpoint(a: int, b: int) -> int:
            key = (a, b) if a < b else (b, a)
            idx = cache.get(key)
            if idx is None:
                p = np.add(points[a], points[b])
                p = p / np.linalg.norm(p)
                points.append(tuple(p))
                idx = len(points) - 1
                cache[key] = idx
            return idx

        refined = []
        for a, b, c in faces.tolist():
            ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
            refined.extend([(a, ab, ca), (ab, b, bc), (ca, bc, c), (ab, bc, ca)])
        faces = np.array(refined, dtype=np.int64)

    coords = radius * np.array(points)
    logger.debug(f"Icosphere level {subdivisions}: {len(coords)} vertices, {len(faces)} faces")
    surface = UNIT_SPHERE if radius == 1.0 else None
    return TriangleMesh(faces, vertices=coords, basepoint=NORTH_POLE, surface=surface)


def flat_torus(n: int = 64) -> TriangleMesh:
    """
    Intrinsic n-by-n grid of the flat unit torus.

    Cell diagonals alternate with the parity of the cell, so n must be even.
    Vertex ``i * n + j`` carries parameters ``(i / n, j / n)``; the basepoint
    is the vertex at the origin.

    Args:
        n: Grid resolution per direction

    Returns:
        Intrinsic TriangleMesh with ``params``
    """
    if n < 4 or n % 2:
        raise ValueError(f"torus resolution must be an even integer >= 4, got {n}")
    idx = np.arange(n)
    I, J = np.meshgrid(idx, idx, indexing="ij")
    I, J = I.reshape(-1), J.reshape(-1)

    def vid(i, j):
        return (i % n) * n + (j % n)

    v00, v10, v01, v11 = vid(I, J), vid(I + 1, J), vid(I, J + 1), vid(I + 1, J + 1)
    even = (I + J) % 2 == 0
    faces = np.concatenate([
        np.stack([v00[even], v10[even], v11[even]], axis=1),
        np.stack([v00[even], v11[even], v01[even]], axis=1),
        np.stack([v00[~even], v10[~even], v01[~even]], axis=1),
        np.stack([v10[~even], v11[~even], v01[~even]], axis=1),
    ])
    params = np.stack([np.arange(n * n) // n, np.arange(n * n) % n], axis=1) / n

    edges, _, _ = edge_table(faces)
    delta = params[edges[:, 1]] - params[edges[:, 0]]
    delta -= np.round(delta)
    lengths = np.linalg.norm(delta, axis=1)
    return TriangleMesh(faces, edge_lengths=lengths, vertex_count=n * n, basepoint=0,
                        params=params, surface=FLAT_UNIT_TORUS)


def torus_vertex(n: int, x: float, y: float) -> int:
    """Index of the flat-torus grid vertex nearest to parameters (x, y)."""
    i = int(round(x * n)) % n
    j = int(round(y * n)) % n
    return i * n + j
