"""
Discrete obstacle problem solver.

Minimizes ``F(u) = u'Su - m a'u`` subject to ``lb <= u <= d`` with optional
vertices fixed at zero. Projected SOR sweeps bring the iterate close to the
contact set, then a primal-dual active-set iteration solves the reduced
linear systems exactly.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple
import logging

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import spsolve

from .mesh import TriangleMesh, build_operators

logger = logging.getLogger(__name__)

# Active-set classification: d_i - u_i <= ACTIVE_RTOL * (1 + |d_i|)
ACTIVE_RTOL = 1e-10

# Penalty parameter of the primal-dual active-set update
ACTIVE_SET_C = 1.0

# Sweeps between convergence checks when the active-set phase fails
CHECK_INTERVAL = 10


@dataclass
class ObstacleProblem:
    """Quadratic energy with an upper obstacle and optional zero-fixed vertices."""
    stiffness: sparse.csr_matrix
    weights: np.ndarray
    obstacle: np.ndarray
    m: float
    fixed: Optional[np.ndarray] = None
    lower_bound: Optional[float] = None
    mesh: Optional[TriangleMesh] = None

    def __post_init__(self):
        self.stiffness = sparse.csr_matrix(self.stiffness)
        self.weights = np.asarray(self.weights, dtype=float).reshape(-1)
        self.obstacle = np.asarray(self.obstacle, dtype=float).reshape(-1)
        n = self.stiffness.shape[0]
        if self.stiffness.shape != (n, n):
            raise ValueError("stiffness must be square")
        if self.weights.shape != (n,) or self.obstacle.shape != (n,):
            raise ValueError("weights and obstacle must have one entry per vertex")
        if not np.isfinite(self.m) or self.m <= 0:
            raise ValueError(f"m must be positive and finite, got {self.m}")
        if np.any(self.weights < 0):
            raise ValueError("lumped weights must be nonnegative")
        if np.any(np.isnan(self.obstacle)):
            raise ValueError("obstacle contains NaN")
        self.fixed = (np.zeros(n, dtype=bool) if self.fixed is None
                      else np.asarray(self.fixed, dtype=bool).reshape(-1))
        if self.fixed.shape != (n,):
            raise ValueError("fixed mask must have one entry per vertex")
        if np.any(self.obstacle[self.fixed] < 0):
            raise ValueError("a zero-fixed vertex lies above its obstacle")
        if self.lower_bound is not None and np.any(self.obstacle < self.lower_bound):
            bad = int(np.flatnonzero(self.obstacle < self.lower_bound)[0])
            raise ValueError(f"obstacle below the lower bound at vertex {bad}: empty feasible set")

    @property
    def size(self) -> int:
        return self.stiffness.shape[0]

    @classmethod
    def from_mesh(cls, mesh: TriangleMesh, obstacle, m: float, boundary_condition: str = "none",
                  nonnegative: Optional[bool] = None) -> "ObstacleProblem":
        """
        Obstacle problem on a mesh with cotangent stiffness and lumped areas.

        Args:
            mesh: Mesh
            obstacle: Upper obstacle per vertex, typically the distance to b
            m: Load parameter
            boundary_condition: "none" or "zero" (zero on boundary vertices)
            nonnegative: Impose u >= 0; defaults to on for closed meshes

        Returns:
            ObstacleProblem
        """
        if boundary_condition not in ("none", "zero"):
            raise ValueError(f"unknown boundary condition {boundary_condition!r}")
        fixed = None
        if boundary_condition == "zero":
            if not mesh.boundary.any():
                raise ValueError("zero-on-boundary requires a mesh with boundary vertices")
            fixed = mesh.boundary.copy()
        if nonnegative is None:
            nonnegative = mesh.is_closed
        ops = build_operators(mesh)
        return cls(stiffness=ops.stiffness, weights=ops.lumped_area, obstacle=obstacle, m=m,
                   fixed=fixed, lower_bound=0.0 if nonnegative else None, mesh=mesh)

    def energy(self, u: np.ndarray) -> float:
        return float(u @ (self.stiffness @ u) - self.m * (self.weights @ u))


@dataclass
class ObstacleConfig:
    """Configuration of the obstacle solver."""

    # Tolerance on all three KKT measures
    tol: float = 1e-8

    # Sweep budget, None means 200 * vertex count
    max_iter: Optional[int] = None

    # SOR relaxation, 0 < omega < 2
    omega: float = 1.5

    # Projected SOR sweeps before the active-set phase
    presweeps: int = 5

    # Active-set refinement, None means max(100, vertex count)
    active_set: bool = True
    max_active_set_iter: Optional[int] = None


@dataclass
class SolveReport:
    """Solution and certificates of a constrained solve."""
    u: np.ndarray
    iterations: int
    energy: float
    converged: bool
    kkt_infeasibility: float = 0.0
    kkt_stationarity: float = 0.0
    kkt_complementarity: float = 0.0
    active: Optional[np.ndarray] = None
    method: str = "obstacle"
    m: float = 0.0
    energy_history: List[float] = field(default_factory=list)
    max_grad: Optional[float] = None
    feasibility: Optional[float] = None
    duality_gap: Optional[float] = None
    relative_gap: Optional[float] = None
    dual: Optional[np.ndarray] = None

    def to_dict(self) -> Dict[str, Any]:
        """Scalars of the report, suitable for JSON."""
        out = {
            "method": self.method,
            "m": self.m,
            "iterations": self.iterations,
            "energy": self.energy,
            "converged": self.converged,
            "kkt_infeasibility": self.kkt_infeasibility,
            "kkt_stationarity": self.kkt_stationarity,
            "kkt_complementarity": self.kkt_complementarity,
        }
        if self.active is not None:
            out["active_count"] = int(np.sum(self.active))
        for key in ("max_grad", "feasibility", "duality_gap", "relative_gap"):
            value = getattr(self, key)
            if value is not None:
                out[key] = value
        return out


def _active_masks(problem: ObstacleProblem, u: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    d = problem.obstacle
    upper = (d - u) <= ACTIVE_RTOL * (1.0 + np.abs(d))
    if problem.lower_bound is None:
        lower = np.zeros_like(upper)
    else:
        lb = problem.lower_bound
        lower = (u - lb) <= ACTIVE_RTOL * (1.0 + abs(lb))
        lower &= ~upper
    return upper & ~problem.fixed, lower & ~problem.fixed


def kkt_residual(problem: ObstacleProblem, u) -> Tuple[float, float, float]:
    """
    Infeasibility, stationarity and complementarity of a candidate solution.

    With ``r = 2Su - m a`` and multiplier ``mu = -r`` on the contact set,
    stationarity is ``max |r_i| / a_i`` over free inactive vertices together
    with multiplier sign violations on active vertices.

    Returns:
        Tuple (infeasibility, stationarity, complementarity)
    """
    u = np.asarray(u, dtype=float)
    d = problem.obstacle
    infeasibility = max(0.0, float(np.max(u - d)))
    if problem.lower_bound is not None:
        infeasibility = max(infeasibility, float(np.max(problem.lower_bound - u)))
    fixed = problem.fixed
    if np.any(fixed):
        infeasibility = max(infeasibility, float(np.max(np.abs(u[fixed]))))

    r = 2.0 * (problem.stiffness @ u) - problem.m * problem.weights
    scale = np.where(problem.weights > 0, problem.weights, 1.0)
    upper, lower = _active_masks(problem, u)
    inactive = ~(upper | lower | fixed)

    stationarity = 0.0
    if np.any(inactive):
        stationarity = float(np.max(np.abs(r[inactive]) / scale[inactive]))
    if np.any(upper):
        stationarity = max(stationarity, float(np.max(np.maximum(0.0, r[upper]) / scale[upper])))
    if np.any(lower):
        stationarity = max(stationarity, float(np.max(np.maximum(0.0, -r[lower]) / scale[lower])))

    complementarity = 0.0
    if np.any(upper):
        mu = -r[upper]
        gap = d[upper] - u[upper]
        complementarity = float(np.max(np.minimum(gap, np.maximum(0.0, -mu))))
    return infeasibility, stationarity, complementarity


class ObstacleSolver:
    """Projected SOR with primal-dual active-set refinement."""

    def __init__(self, config: Optional[ObstacleConfig] = None):
        """
        Initialize the solver.

        Args:
            config: Solver configuration (uses defaults if not provided)
        """
        self.config = config or ObstacleConfig()
        if not 0.0 < self.config.omega < 2.0:
            raise ValueError(f"omega must lie in (0, 2), got {self.config.omega}")
        if self.config.tol <= 0:
            raise ValueError("tol must be positive")

    def solve(self, problem: ObstacleProblem, initial: Optional[np.ndarray] = None) -> SolveReport:
        """
        Solve an obstacle problem.

        Args:
            problem: Problem to solve
            initial: Optional warm start (clipped to the feasible set)

        Returns:
            SolveReport; ``converged`` is False if the sweep budget ran out

        Raises:
            ValueError: If the problem is a pure-Neumann problem with no obstacle
        """
        d = problem.obstacle
        if not np.all(np.isfinite(d)):
            if np.all(np.isinf(d)) and not problem.fixed.any():
                raise ValueError(
                    "singular system: without a finite obstacle or fixed vertices the "
                    "closed-mesh energy is a pure-Neumann problem with no unique minimizer")
            raise ValueError("obstacle must be finite")

        n = problem.size
        max_iter = self.config.max_iter or 200 * n
        lb = problem.lower_bound
        low = np.full(n, -np.inf) if lb is None else np.full(n, float(lb))
        low[problem.fixed] = 0.0
        high = d.copy()
        high[problem.fixed] = 0.0

        u = d.copy() if initial is None else np.asarray(initial, dtype=float).copy()
        u = np.minimum(np.maximum(u, low), high)
        logger.info(f"Solving obstacle problem: n={n}, m={problem.m:g}")

        history = [problem.energy(u)]
        pinned = high <= low
        if np.all(pinned):
            return self._report(problem, np.where(pinned, high, u), 0, history)

        sweeps = 0
        presweeps = min(self.config.presweeps, max_iter) if self.config.active_set else 0
        for _ in range(presweeps):
            self._sweep(problem, u, low, high)
            sweeps += 1
            history.append(problem.energy(u))

        refine_iter = 0
        if self.config.active_set:
            refined, refine_iter = self._active_set(problem, u, low, high)
            if refined is not None:
                u = refined
                history.append(problem.energy(u))
                if max(kkt_residual(problem, u)) <= self.config.tol:
                    return self._report(problem, u, sweeps + refine_iter, history)
            logger.warning("Active-set refinement did not certify; continuing projected SOR")

        while sweeps < max_iter:
            self._sweep(problem, u, low, high)
            sweeps += 1
            history.append(problem.energy(u))
            if sweeps % CHECK_INTERVAL == 0 and max(kkt_residual(problem, u)) <= self.config.tol:
                return self._report(problem, u, sweeps + refine_iter, history)

        report = self._report(problem, u, sweeps + refine_iter, history)
        logger.warning(f"Obstacle solve did not converge in {max_iter} sweeps")
        return report

    def _sweep(self, problem: ObstacleProblem, u: np.ndarray, low: np.ndarray, high: np.ndarray) -> None:
        """One projected SOR sweep in place."""
        S = problem.stiffness
        indptr, indices, data = S.indptr, S.indices, S.data
        half_load = 0.5 * problem.m * problem.weights
        omega = self.config.omega
        fixed = problem.fixed
        for i in range(problem.size):
            if fixed[i]:
                continue
            diag = 0.0
            acc = half_load[i]
            for p in range(indptr[i], indptr[i + 1]):
                j = indices[p]
                if j == i:
                    diag = data[p]
                else:
                    acc -= data[p] * u[j]
            if diag <= 0.0:
                continue
            value = u[i] + omega * (acc / diag - u[i])
            if value > high[i]:
                value = high[i]
            elif value < low[i]:
                value = low[i]
            u[i] = value

    def _active_set(self, problem: ObstacleProblem, u: np.ndarray, low: np.ndarray,
                    high: np.ndarray) -> Tuple[Optional[np.ndarray], int]:
        """Primal-dual active-set iteration started from the current iterate."""
        S = problem.stiffness.tocsr()
        a = problem.weights
        scale = np.where(a > 0, a, 1.0)
        fixed = problem.fixed | (high <= low)
        has_lower = problem.lower_bound is not None

        upper = ((high - u) <= ACTIVE_RTOL * (1.0 + np.abs(high))) & ~fixed
        lower = ((u - low) <= ACTIVE_RTOL * (1.0 + np.abs(low))) & ~fixed & ~upper if has_lower \
            else np.zeros(problem.size, dtype=bool)
        mu = np.zeros(problem.size)
        nu = np.zeros(problem.size)

        limit = self.config.max_active_set_iter or max(100, problem.size)
        for it in range(1, limit + 1):
            if not (upper | lower | fixed).any():
                gap = np.where(fixed, np.inf, high - u)
                upper[int(np.argmin(gap))] = True

            x = np.where(fixed, high, u)
            x[upper] = high[upper]
            x[lower] = low[lower]
            free = ~(upper | lower | fixed)
            if free.any():
                bound = ~free
                rhs = problem.m * a[free] - 2.0 * (S[free][:, bound] @ x[bound])
                block = 2.0 * S[free][:, free]
                x[free] = spsolve(block.tocsc(), rhs)
            if not np.all(np.isfinite(x)):
                logger.warning("Reduced system is singular; abandoning active-set refinement")
                return None, it

            r = 2.0 * (S @ x) - problem.m * a
            mu = np.where(upper, -r, 0.0)
            nu = np.where(lower, r, 0.0)

            new_upper = (mu / scale + ACTIVE_SET_C * (x - high) > 0) & ~fixed
            new_lower = ((nu / scale - ACTIVE_SET_C * (x - low) > 0) & ~fixed & ~new_upper) if has_lower \
                else np.zeros_like(new_upper)
            u = x
            if np.array_equal(new_upper, upper) and np.array_equal(new_lower, lower):
                logger.debug(f"Active set settled after {it} iterations "
                             f"({int(upper.sum())} upper, {int(lower.sum())} lower)")
                return u, it
            upper, lower = new_upper, new_lower
        logger.debug(f"Active set still moving after {limit} iterations")
        return None, limit

    def _report(self, problem: ObstacleProblem, u: np.ndarray, iterations: int,
                history: List[float]) -> SolveReport:
        infeasibility, stationarity, complementarity = kkt_residual(problem, u)
        converged = max(infeasibility, stationarity, complementarity) <= self.config.tol
        upper, _ = _active_masks(problem, u)
        energy = problem.energy(u)
        if not history or history[-1] != energy:
            history.append(energy)
        logger.info(f"Obstacle solve m={problem.m:g}: iterations={iterations}, "
                    f"kkt=({infeasibility:.2e}, {stationarity:.2e}, {complementarity:.2e}), "
                    f"converged={converged}")
        return SolveReport(u=u, iterations=iterations, energy=energy, converged=converged,
                           kkt_infeasibility=infeasibility, kkt_stationarity=stationarity,
                           kkt_complementarity=complementarity, active=upper | problem.fixed,
                           method="obstacle", m=problem.m, energy_history=history)


def solve_obstacle(problem: ObstacleProblem, config: Optional[ObstacleConfig] = None,
                   initial: Optional[np.ndarray] = None) -> SolveReport:
    """
    Convenience function to solve an obstacle problem.

    Args:
        problem: Obstacle problem
        config: Solver configuration
        initial: Optional warm start

    Returns:
        SolveReport
    """
    return ObstacleSolver(config).solve(problem, initial=initial)
