"""
Planar domains: structured triangulations, exact boundary distance, torsion
solves with zero boundary values and medial-axis ground truths.
"""

from dataclasses import dataclass, field
from itertools import combinations
from typing import Any, Dict, List, Optional, Union
import logging
import math

import numpy as np

from ..core.geodesic import DistanceField
from ..core.gradient import GradientConfig, GradientProblem, GradientSolver
from ..core.mesh import TriangleMesh
from ..core.obstacle import ObstacleConfig, ObstacleProblem, ObstacleSolver, SolveReport
from ..core.surfaces import PLANAR
from .sets import RegionLabeling, gen_grad_from_directions

logger = logging.getLogger(__name__)

SHAPES = ("disk", "rectangle")

MIN_BOUNDARY_VERTICES = 8

# Nearest-boundary ties closer than this count as separate projections
TIE_TOL = 1e-9

# Points processed per batch in the boundary distance
CHUNK = 4096


@dataclass
class PlanarDomain:
    """Triangulated planar domain with its boundary loops."""
    mesh: TriangleMesh
    loops: List[np.ndarray]
    shape: Optional[str] = None
    params: Dict[str, float] = field(default_factory=dict)
    h: float = 0.0

    @property
    def segments(self) -> np.ndarray:
        """Boundary segments as endpoint pairs, shape (k, 2, 2)."""
        coords = self.mesh.vertices[:, :2]
        parts = [np.stack([coords[loop], coords[np.roll(loop, -1)]], axis=1) for loop in self.loops]
        return np.concatenate(parts, axis=0)

    @property
    def area(self) -> float:
        return float(self.mesh.face_areas.sum())

    @property
    def center(self) -> np.ndarray:
        if self.shape == "disk":
            return np.zeros(2)
        if self.shape == "rectangle":
            return np.array([0.5 * self.params["L"], 0.5 * self.params["W"]])
        return self.mesh.vertices[:, :2].mean(axis=0)


def _ring(radius: float, count: int) -> np.ndarray:
    angles = 2.0 * np.pi * np.arange(count) / count
    return radius * np.stack([np.cos(angles), np.sin(angles)], axis=1)


def _zipper(inner: np.ndarray, outer: np.ndarray, coords: np.ndarray) -> List[tuple]:
    """Triangulate the band between two concentric rings by the shorter diagonal."""
    n_in, n_out = len(inner), len(outer)
    faces = []
    i = o = 0
    while i < n_in or o < n_out:
        a, b = inner[i % n_in], outer[o % n_out]
        next_in, next_out = inner[(i + 1) % n_in], outer[(o + 1) % n_out]
        if i == n_in:
            advance_outer = True
        elif o == n_out:
            advance_outer = False
        else:
            advance_outer = (np.linalg.norm(coords[a] - coords[next_out])
                             <= np.linalg.norm(coords[next_in] - coords[b]))
        if advance_outer:
            faces.append((a, b, next_out))
            o += 1
        else:
            faces.append((a, b, next_in))
            i += 1
    return faces


def _disk_mesh(R: float, h: float) -> TriangleMesh:
    rings = max(1, math.ceil(1.5 * R / h))
    while True:
        if 6 * rings < MIN_BOUNDARY_VERTICES:
            raise ValueError(f"h={h} is too large for a disk of radius {R}: "
                             f"{6 * rings} boundary vertices, need {MIN_BOUNDARY_VERTICES}")
        coords = [np.zeros((1, 2))]
        for k in range(1, rings + 1):
            coords.append(_ring(k * R / rings, 6 * k))
        coords = np.concatenate(coords)
        faces = []
        offset = 1
        for o in range(6):
            faces.append((0, 1 + o, 1 + (o + 1) % 6))
        for k in range(2, rings + 1):
            inner = np.arange(offset, offset + 6 * (k - 1))
            outer = np.arange(offset + 6 * (k - 1), offset + 6 * (k - 1) + 6 * k)
            faces.extend(_zipper(inner, outer, coords))
            offset += 6 * (k - 1)
        mesh = TriangleMesh.from_vertices(coords, np.array(faces), surface=PLANAR)
        if mesh.max_edge_length <= h:
            return mesh
        rings += 1


def _rectangle_mesh(L: float, W: float, h: float) -> TriangleMesh:
    step = h / math.sqrt(2.0)
    ny = math.ceil(W / step)
    ny += ny % 2
    nx = math.ceil(L * ny / W - 1e-9)
    nx += nx % 2
    if 2 * (nx + ny) < MIN_BOUNDARY_VERTICES:
        raise ValueError(f"h={h} is too large for a {L} x {W} rectangle")
    xs = np.linspace(0.0, L, nx + 1)
    ys = np.linspace(0.0, W, ny + 1)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    coords = np.stack([X.reshape(-1), Y.reshape(-1)], axis=1)

    def vid(i, j):
        return i * (ny + 1) + j

    faces = []
    for i in range(nx):
        for j in range(ny):
            v00, v10, v01, v11 = vid(i, j), vid(i + 1, j), vid(i, j + 1), vid(i + 1, j + 1)
            # Diagonals follow the 45-degree lines through the corners
            if (i + j) % 2 == 0:
                faces.extend([(v00, v10, v11), (v00, v11, v01)])
            else:
                faces.extend([(v00, v10, v01), (v10, v11, v01)])
    return TriangleMesh.from_vertices(coords, np.array(faces), surface=PLANAR)


def build_domain(shape: Union[str, TriangleMesh], **params) -> PlanarDomain:
    """
    Build a planar domain.

    Args:
        shape: "disk" (R, h), "rectangle" (L, W, h) or an external planar TriangleMesh
        **params: Shape parameters

    Returns:
        PlanarDomain

    Raises:
        ValueError: On invalid parameters or an unusable external mesh
    """
    if isinstance(shape, TriangleMesh):
        mesh = shape
        if mesh.vertices is None or (mesh.vertices.shape[1] == 3 and not np.allclose(mesh.vertices[:, 2], 0.0)):
            raise ValueError("external domains must be planar meshes")
        if mesh.is_closed:
            raise ValueError("external domain mesh has no boundary")
        loops = [np.asarray(loop) for loop in mesh.boundary_loops()]
        return PlanarDomain(mesh, loops, None, {}, mesh.max_edge_length)

    if shape == "disk":
        R, h = float(params.get("R", 1.0)), float(params["h"])
        if R <= 0 or h <= 0:
            raise ValueError("disk needs R > 0 and h > 0")
        mesh = _disk_mesh(R, h)
        values = {"R": R, "h": h}
    elif shape == "rectangle":
        L, W, h = float(params["L"]), float(params["W"]), float(params["h"])
        if L <= 0 or W <= 0 or h <= 0:
            raise ValueError("rectangle needs L, W, h > 0")
        mesh = _rectangle_mesh(L, W, h)
        values = {"L": L, "W": W, "h": h}
    else:
        raise ValueError(f"unknown domain shape {shape!r}")

    loops = [np.asarray(loop) for loop in mesh.boundary_loops()]
    logger.info(f"Built {shape} domain: {mesh.vertex_count} vertices, h={mesh.max_edge_length:.4f}")
    return PlanarDomain(mesh, loops, shape, values, mesh.max_edge_length)


def _segment_distances(points: np.ndarray, segments: np.ndarray) -> np.ndarray:
    """Distances from every point to every segment, shape (points, segments)."""
    a = segments[None, :, 0, :]
    ab = segments[None, :, 1, :] - a
    ap = points[:, None, :] - a
    denom = np.maximum(np.einsum("...i,...i->...", ab, ab), np.finfo(float).tiny)
    t = np.clip(np.einsum("...i,...i->...", ap, ab) / denom, 0.0, 1.0)
    return np.linalg.norm(ap - t[..., None] * ab, axis=-1)


def boundary_distance(domain: PlanarDomain) -> DistanceField:
    """
    Exact distance from every vertex to the boundary polyline.

    Returns:
        DistanceField with zeros on boundary vertices
    """
    segments = domain.segments
    if not len(segments):
        raise ValueError("domain has no boundary")
    points = domain.mesh.vertices[:, :2]
    values = np.empty(len(points))
    for start in range(0, len(points), CHUNK):
        values[start:start + CHUNK] = _segment_distances(points[start:start + CHUNK], segments).min(axis=1)
    values[domain.mesh.boundary] = 0.0
    return DistanceField(values=values, sources=domain.mesh.boundary_vertices)


def solve_torsion(domain: PlanarDomain, m: float, mode: str = "obstacle",
                  config: Optional[Union[ObstacleConfig, GradientConfig]] = None,
                  initial: Optional[np.ndarray] = None) -> SolveReport:
    """
    Elastic-plastic torsion with zero boundary values.

    Args:
        domain: Planar domain
        m: Load parameter
        mode: "obstacle" (v <= d) or "gradient" (|grad v| <= 1)
        config: Solver configuration of the matching type
        initial: Optional warm start

    Returns:
        SolveReport
    """
    if m <= 0:
        raise ValueError(f"m must be positive, got {m}")
    if mode == "obstacle":
        d = boundary_distance(domain).values
        problem = ObstacleProblem.from_mesh(domain.mesh, d, m, boundary_condition="zero")
        return ObstacleSolver(config).solve(problem, initial=initial)
    if mode == "gradient":
        problem = GradientProblem.from_mesh(domain.mesh, m, zero_on_boundary=True)
        return GradientSolver(config).solve(problem, initial=initial)
    raise ValueError(f"unknown torsion mode {mode!r}")


def disk_torsion(R: float, m: float, r) -> np.ndarray:
    """
    Radial torsion solution on a disk of radius R.

    Elastic core of radius ``a = 4 / m`` where ``v = R - a + m (a^2 - r^2) / 8``
    and ``v = R - r`` outside; for ``a >= R`` the constraint is slack.
    """
    r = np.asarray(r, dtype=float)
    a = 4.0 / m
    if a >= R:
        return m * (R * R - r * r) / 8.0
    return np.where(r <= a, R - a + m * (a * a - r * r) / 8.0, R - r)


def _rectangle_projections(L: float, W: float, p: np.ndarray):
    x, y = p
    sides = np.array([x, L - x, y, W - y])
    feet = np.array([[0.0, y], [L, y], [x, 0.0], [x, W]])
    d = float(sides.min())
    near = sides - d <= TIE_TOL
    return feet[near], d


def _disk_projections(R: float, p: np.ndarray, count: int = 64):
    rho = float(np.linalg.norm(p))
    if rho <= TIE_TOL:
        return _ring(R, count), R
    return (R * p / rho)[None, :], R - rho


def _projections(domain_or_shape, p: np.ndarray):
    shape, params = _shape_of(domain_or_shape)
    if shape == "disk":
        return _disk_projections(params["R"], p)
    return _rectangle_projections(params["L"], params["W"], p)


def _shape_of(domain_or_shape):
    if isinstance(domain_or_shape, PlanarDomain):
        shape, params = domain_or_shape.shape, domain_or_shape.params
    else:
        shape, params = domain_or_shape
    if shape not in SHAPES:
        raise ValueError(f"no medial-axis ground truth for shape {shape!r}")
    if shape == "rectangle" and params["L"] < params["W"]:
        raise ValueError("rectangle ground truth expects L >= W")
    return shape, params


def _sample_points(domain_or_shape, points) -> np.ndarray:
    if points is None:
        if not isinstance(domain_or_shape, PlanarDomain):
            raise ValueError("give sample points or a domain")
        points = domain_or_shape.mesh.vertices
    return np.atleast_2d(np.asarray(points, dtype=float))[:, :2]


def medial_ground_truth(domain_or_shape, lam: float = 0.0, points=None) -> RegionLabeling:
    """
    Exact (lambda-)medial axis membership of a disk or rectangle.

    ``lam = 0`` gives the closed medial axis (rectangle corners included);
    ``lam > 0`` keeps points with two or more nearest boundary points whose
    generalized gradient g satisfies ``g^2 <= 1 - lam^2 / d^2``.

    Args:
        domain_or_shape: PlanarDomain of a built-in shape, or a (shape, params) pair
        lam: Lambda, nonnegative
        points: Sample points; defaults to the domain vertices

    Returns:
        RegionLabeling with the "ground_truth" tag

    Raises:
        ValueError: For external domains or a negative lambda
    """
    if lam < 0:
        raise ValueError("lambda must be nonnegative")
    shape, params = _shape_of(domain_or_shape)
    pts = _sample_points(domain_or_shape, points)
    member = np.zeros(len(pts), dtype=bool)
    for i, p in enumerate(pts):
        feet, d = _projections((shape, params), p)
        if d <= TIE_TOL:
            # Corners belong to the closure of the rectangle's medial axis
            member[i] = lam == 0.0 and shape == "rectangle" and _is_corner(params, p)
            continue
        if len(feet) < 2:
            continue
        if lam == 0.0:
            member[i] = True
            continue
        dirs = (feet - p) / np.linalg.norm(feet - p, axis=1, keepdims=True)
        g = gen_grad_from_directions(dirs)
        member[i] = g * g <= 1.0 - lam * lam / (d * d) + TIE_TOL
    return RegionLabeling(member, "ground_truth", {"shape": shape, "lambda": lam})


def _is_corner(params: Dict[str, Any], p: np.ndarray) -> bool:
    x, y = p
    on_x = min(abs(x), abs(params["L"] - x)) <= TIE_TOL
    on_y = min(abs(y), abs(params["W"] - y)) <= TIE_TOL
    return on_x and on_y


def _enclosing_radius(points: np.ndarray) -> float:
    """Radius of the smallest disk containing a few points."""
    if len(points) == 1:
        return 0.0
    best = np.inf
    for a, b in combinations(points, 2):
        center = 0.5 * (a + b)
        radius = 0.5 * float(np.linalg.norm(a - b))
        if np.all(np.linalg.norm(points - center, axis=1) <= radius + TIE_TOL):
            best = min(best, radius)
    for a, b, c in combinations(points, 3):
        d = 2.0 * (a[0] * (b[1] - c[1]) + b[0] * (c[1] - a[1]) + c[0] * (a[1] - b[1]))
        if abs(d) < 1e-15:
            continue
        sa, sb, sc = a @ a, b @ b, c @ c
        center = np.array([sa * (b[1] - c[1]) + sb * (c[1] - a[1]) + sc * (a[1] - b[1]),
                           sa * (c[0] - b[0]) + sb * (a[0] - c[0]) + sc * (b[0] - a[0])]) / d
        radius = float(np.linalg.norm(a - center))
        if np.all(np.linalg.norm(points - center, axis=1) <= radius + TIE_TOL):
            best = min(best, radius)
    return float(best)


def projection_radius(domain_or_shape, points=None) -> np.ndarray:
    """
    Radius of the smallest disk containing the nearest boundary points.

    The lambda-medial axis in this form is ``{x : radius(x) >= lam}``.

    Returns:
        One radius per point (0 where the projection is unique)
    """
    shape, params = _shape_of(domain_or_shape)
    pts = _sample_points(domain_or_shape, points)
    out = np.zeros(len(pts))
    for i, p in enumerate(pts):
        feet, _ = _projections((shape, params), p)
        if shape == "disk" and len(feet) > 1:
            out[i] = params["R"]
        else:
            out[i] = _enclosing_radius(feet)
    return out
