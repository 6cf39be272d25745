"""
Elastic sets, lambda-elastic sets, cut-locus ground truths and Hausdorff reports.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple
import logging

import numpy as np

from ..core.geodesic import multi_source_distance
from ..core.mesh import TriangleMesh, vertex_gradient_norm
from ..core.surfaces import FLAT_UNIT_TORUS, UNIT_SPHERE

logger = logging.getLogger(__name__)

DEFINITIONS = ("contact_gap", "gradient_threshold", "lambda_set", "ground_truth")

# Angle-grid resolution of the generalized-gradient search
ANGLE_SAMPLES = 4096

# Ternary refinement stops at this bracket width
REFINE_TOL = 1e-10

# Unit-norm tolerance of direction vectors
UNIT_TOL = 1e-12

# Directions sampled at the sphere's antipode (every meridian minimizes)
ANTIPODE_DIRECTIONS = 64

# Distance ties closer than this count as two minimizing geodesics
TIE_TOL = 1e-9


@dataclass
class RegionLabeling:
    """Per-vertex (or per-sample) membership in a region."""
    member: np.ndarray
    definition: str
    parameters: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        self.member = np.asarray(self.member, dtype=bool).reshape(-1)
        if self.definition not in DEFINITIONS:
            raise ValueError(f"unknown region definition {self.definition!r}")

    @property
    def indices(self) -> np.ndarray:
        return np.flatnonzero(self.member)

    @property
    def count(self) -> int:
        return int(self.member.sum())

    @property
    def is_empty(self) -> bool:
        return not self.member.any()

    def to_rows(self) -> List[Tuple[int, int]]:
        """(vertex_id, 0/1) rows."""
        return [(i, int(flag)) for i, flag in enumerate(self.member)]


@dataclass
class HausdorffReport:
    """One-sided and symmetric set distances."""
    sup_A_to_B: float
    sup_B_to_A: float
    symmetric: float
    a_empty: bool = False
    b_empty: bool = False

    def to_dict(self) -> Dict[str, Any]:
        return {"sup_A_to_B": self.sup_A_to_B, "sup_B_to_A": self.sup_B_to_A,
                "symmetric": self.symmetric, "a_empty": self.a_empty, "b_empty": self.b_empty}


def default_contact_epsilon(mesh: TriangleMesh, m: Optional[float]) -> float:
    h = mesh.max_edge_length
    return max(1e-6, h * h * m / 8.0) if m else 1e-6


def default_gradient_epsilon(mesh: TriangleMesh) -> float:
    return max(0.02, 2.0 * mesh.max_edge_length)


def elastic_set(u, d, mesh: TriangleMesh, mode: str = "contact_gap", epsilon: Optional[float] = None,
                m: Optional[float] = None) -> RegionLabeling:
    """
    Elastic (non-contact) set of a solution.

    Args:
        u: Solution field
        d: Obstacle field
        mesh: Mesh
        mode: "contact_gap" (d - u > eps) or "gradient_threshold" (|grad u| < 1 - eps)
        epsilon: Threshold; defaults to max(1e-6, h^2 m / 8) or max(0.02, 2h)
        m: Load parameter, used for the default contact threshold

    Returns:
        RegionLabeling
    """
    u = np.asarray(u, dtype=float)
    if mode == "contact_gap":
        eps = default_contact_epsilon(mesh, m) if epsilon is None else epsilon
        member = (np.asarray(d, dtype=float) - u) > eps
    elif mode == "gradient_threshold":
        eps = default_gradient_epsilon(mesh) if epsilon is None else epsilon
        member = vertex_gradient_norm(mesh, u) < 1.0 - eps
    else:
        raise ValueError(f"unknown elastic-set mode {mode!r}")
    logger.debug(f"Elastic set ({mode}, eps={eps:.3g}): {int(member.sum())} vertices")
    return RegionLabeling(member, mode, {"m": m, "epsilon": eps})


def lambda_elastic_set(u, mesh: TriangleMesh, lam: float, epsilon: Optional[float] = None,
                       m: Optional[float] = None) -> RegionLabeling:
    """
    Lambda-elastic set ``{|grad u|^2 <= 1 - lam^2 / u^2}``.

    Vertices with ``u <= lam`` are never members.

    Raises:
        ValueError: If lam is not positive
    """
    if lam <= 0:
        raise ValueError("lambda must be positive; use elastic_set for the plain elastic set")
    u = np.asarray(u, dtype=float)
    eps = default_gradient_epsilon(mesh) if epsilon is None else epsilon
    grad = vertex_gradient_norm(mesh, u)
    above = u > lam * (1.0 + 1e-9)
    safe = np.where(above, u, 1.0)
    member = above & (grad * grad <= 1.0 - lam * lam / (safe * safe) + eps)
    return RegionLabeling(member, "lambda_set", {"m": m, "lambda": lam, "epsilon": eps})


def gen_grad_from_directions(dirs) -> float:
    """
    Generalized gradient ``max(0, max_v min_i -dir_i . v)`` over unit v.

    Args:
        dirs: Unit 2-vectors, shape (k, 2)

    Returns:
        Generalized gradient norm in [0, 1]

    Raises:
        ValueError: On an empty set or non-unit vectors
    """
    dirs = np.atleast_2d(np.asarray(dirs, dtype=float))
    if dirs.size == 0:
        raise ValueError("direction set is empty")
    if dirs.shape[1] != 2:
        raise ValueError("directions must be 2-vectors")
    if np.any(np.abs(np.linalg.norm(dirs, axis=1) - 1.0) > UNIT_TOL):
        raise ValueError("directions must have unit norm")

    def objective(theta):
        v = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
        return np.min(-(np.atleast_2d(v) @ dirs.T), axis=1)

    grid = np.linspace(0.0, 2.0 * np.pi, ANGLE_SAMPLES, endpoint=False)
    values = objective(grid)
    best = int(np.argmax(values))
    step = grid[1] - grid[0]
    lo, hi = grid[best] - step, grid[best] + step
    while hi - lo > REFINE_TOL:
        m1 = lo + (hi - lo) / 3.0
        m2 = hi - (hi - lo) / 3.0
        f1, f2 = objective(np.array([m1, m2]))
        if f1 < f2:
            lo = m1
        else:
            hi = m2
    refined = float(objective(np.array([0.5 * (lo + hi)]))[0])
    return max(0.0, refined, float(values[best]))


def _sphere_points(points) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    return pts / np.linalg.norm(pts, axis=1, keepdims=True)


def cut_directions(surface: str, point) -> Tuple[List[np.ndarray], float]:
    """
    Initial velocities of the minimizing geodesics from a point to the basepoint.

    Basepoints: north pole on the unit sphere, origin on the flat torus.

    Returns:
        Tuple (directions as unit 2-vectors in a tangent frame, distance)
    """
    if surface == UNIT_SPHERE:
        p = np.asarray(point, dtype=float)
        p = p / np.linalg.norm(p)
        dist = float(np.arccos(np.clip(p[2], -1.0, 1.0)))
        if np.pi - dist <= TIE_TOL:
            angles = np.linspace(0.0, 2.0 * np.pi, ANTIPODE_DIRECTIONS, endpoint=False)
            return [np.array([np.cos(a), np.sin(a)]) for a in angles], np.pi
        # Single meridian, direction towards the north pole
        return [np.array([0.0, 1.0])], dist
    if surface == FLAT_UNIT_TORUS:
        p = np.mod(np.asarray(point, dtype=float)[:2], 1.0)
        translates = np.array([(i, j) for i in (-1, 0, 1, 2) for j in (-1, 0, 1, 2)], dtype=float)
        vectors = translates - p
        dists = np.linalg.norm(vectors, axis=1)
        dmin = float(dists.min())
        if dmin == 0.0:
            return [], 0.0
        close = dists - dmin <= TIE_TOL
        return [v / n for v, n in zip(vectors[close], dists[close])], dmin
    raise ValueError(f"unknown surface id {surface!r}")


def ground_truth_cut(surface: str, lam: float = 0.0, samples=None, mesh: Optional[TriangleMesh] = None) -> RegionLabeling:
    """
    Exact (lambda-)cut locus membership on a model surface.

    ``lam = 0`` labels the cut locus itself; ``lam > 0`` keeps cut points
    whose generalized gradient g satisfies ``g^2 <= 1 - lam^2 / d^2``.

    Args:
        surface: "unit_sphere" or "flat_unit_torus"
        lam: Lambda, nonnegative
        samples: Points (3-vectors on the sphere, parameters on the torus)
        mesh: Mesh whose vertices (or torus params) are labeled when samples is None

    Returns:
        RegionLabeling with the "ground_truth" tag

    Raises:
        ValueError: On an unknown surface or negative lambda
    """
    if surface not in (UNIT_SPHERE, FLAT_UNIT_TORUS):
        raise ValueError(f"unknown surface id {surface!r}")
    if lam < 0:
        raise ValueError("lambda must be nonnegative")
    if samples is None:
        if mesh is None:
            raise ValueError("give sample points or a mesh")
        samples = mesh.params if surface == FLAT_UNIT_TORUS else mesh.vertices
    points = np.asarray(samples, dtype=float)
    if surface == UNIT_SPHERE:
        points = _sphere_points(points)

    member = np.zeros(len(points), dtype=bool)
    for i, p in enumerate(points):
        dirs, dist = cut_directions(surface, p)
        if len(dirs) < 2:
            continue
        if lam == 0.0:
            member[i] = True
            continue
        g = gen_grad_from_directions(np.array(dirs))
        member[i] = g * g <= 1.0 - lam * lam / (dist * dist)
    return RegionLabeling(member, "ground_truth", {"surface": surface, "lambda": lam})


def hausdorff(mesh: TriangleMesh, A: RegionLabeling, B: RegionLabeling) -> HausdorffReport:
    """
    Geodesic Hausdorff distances between two vertex sets.

    A one-sided value measured towards an empty set is +inf, one measured
    from an empty set is 0, and the symmetric value is then NaN.

    Raises:
        ValueError: If both sets are empty or the labelings do not fit the mesh
    """
    for label in (A, B):
        if label.member.shape != (mesh.vertex_count,):
            raise ValueError("labeling does not match the mesh vertex count")
    a_empty, b_empty = A.is_empty, B.is_empty
    if a_empty and b_empty:
        raise ValueError("both sets are empty")
    if a_empty or b_empty:
        logger.warning("Hausdorff distance with an empty set is undefined")
        to_b = np.inf if b_empty else 0.0
        to_a = np.inf if a_empty else 0.0
        return HausdorffReport(sup_A_to_B=to_b, sup_B_to_A=to_a, symmetric=float("nan"),
                               a_empty=a_empty, b_empty=b_empty)

    dist_to_b = multi_source_distance(mesh, B.member).values
    dist_to_a = multi_source_distance(mesh, A.member).values
    sup_ab = float(dist_to_b[A.member].max())
    sup_ba = float(dist_to_a[B.member].max())
    return HausdorffReport(sup_A_to_B=sup_ab, sup_B_to_A=sup_ba, symmetric=max(sup_ab, sup_ba))
