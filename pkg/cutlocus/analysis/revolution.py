"""
Rotation-invariant reduction on surfaces of revolution.

A surface of revolution with unit-speed profile ``t -> (r(t), h(t))`` and its
basepoint at the pole ``t = 0`` has ``d_b = t``, so rotation-invariant
solutions reduce to weighted one-dimensional problems in ``rho(t)``:

    E(rho) = sum r_mid (d rho)^2 / dt - m sum w_i rho_i

with midpoint radii on intervals and trapezoidal weights at nodes. Both the
obstacle (``rho <= t``) and gradient (``|rho'| <= 1``) versions reuse the
generic solvers.
"""

from dataclasses import dataclass, field
from itertools import product
from typing import Dict, Iterable, List, Optional, Sequence, Tuple
import logging
import math

import numpy as np
from scipy import sparse
from tqdm import tqdm

from ..core.gradient import GradientConfig, GradientProblem, GradientSolver
from ..core.mesh import sufficient_m
from ..core.obstacle import ObstacleConfig, ObstacleProblem, ObstacleSolver, SolveReport

logger = logging.getLogger(__name__)

SLOPE_TOL = 1e-9

# Witness threshold above the unit gradient bound
DEFAULT_MARGIN = 0.05

# Smallest sup-norm obstacle/gradient gap that counts as a witness
WITNESS_GAP = 1e-2

DEFAULT_DUMBBELL_GRID = {
    "neck_r": (1e-2, 1e-3),
    "neck_len": (0.5, 1.0),
    "bulb_len": (2.0, 8.0),
}
DEFAULT_M_GRID = (1e-2, 1e-1, 1.0)

# Witness gaps only need a few digits
SEARCH_GRADIENT_CONFIG = GradientConfig(tol_feas=1e-6, tol_gap=1e-5, max_iter=20000)


@dataclass
class RevolutionProfile:
    """Sampled profile radius r(t) of a surface of revolution."""
    t: np.ndarray
    r: np.ndarray
    name: str = "profile"
    params: Dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=float).reshape(-1)
        self.r = np.asarray(self.r, dtype=float).reshape(-1)
        if self.t.shape != self.r.shape or len(self.t) < 3:
            raise ValueError("profile needs matching t and r arrays with at least 3 nodes")
        dt = np.diff(self.t)
        if np.any(dt <= 0):
            raise ValueError("profile t grid must be strictly increasing")
        if abs(self.r[0]) > 1e-12:
            raise ValueError("profile must start at a pole, r(0) = 0")
        if np.any(self.r[1:-1] <= 0):
            raise ValueError("profile radius must be positive in the interior")
        if np.any(self.r < 0):
            raise ValueError("profile radius must be nonnegative")
        slope = np.abs(np.diff(self.r)) / dt
        if slope.max() > 1.0 + SLOPE_TOL:
            k = int(np.argmax(slope))
            raise ValueError(f"profile slope {slope[k]:.6g} exceeds 1 on [{self.t[k]:.6g}, {self.t[k + 1]:.6g}]")

    @property
    def length(self) -> float:
        return float(self.t[-1] - self.t[0])

    @property
    def node_weights(self) -> np.ndarray:
        """Trapezoidal weights of the measure r dt."""
        dt = np.diff(self.t)
        w = np.zeros_like(self.r)
        w[:-1] += 0.5 * dt * self.r[:-1]
        w[1:] += 0.5 * dt * self.r[1:]
        return w

    @property
    def interval_weights(self) -> np.ndarray:
        """Midpoint radius times interval length."""
        return 0.5 * (self.r[:-1] + self.r[1:]) * np.diff(self.t)


@dataclass
class Solve1DReport:
    """Result of a one-dimensional solve."""
    rho: np.ndarray
    sup_gradient: float
    energy: float
    converged: bool
    mode: str
    m: float
    iterations: int = 0
    kkt_infeasibility: float = 0.0
    kkt_stationarity: float = 0.0
    kkt_complementarity: float = 0.0
    relative_gap: Optional[float] = None

    def to_dict(self) -> dict:
        out = {"mode": self.mode, "m": self.m, "sup_gradient": self.sup_gradient, "energy": self.energy,
               "converged": self.converged, "iterations": self.iterations,
               "kkt_infeasibility": self.kkt_infeasibility, "kkt_stationarity": self.kkt_stationarity,
               "kkt_complementarity": self.kkt_complementarity}
        if self.relative_gap is not None:
            out["relative_gap"] = self.relative_gap
        return out


@dataclass
class Witness:
    """A (profile, m) pair where the obstacle solution breaks the gradient bound and differs
    from the gradient-constrained solution."""
    profile: str
    params: Dict[str, float]
    m: float
    sup_gradient: float
    equivalence_gap: float


@dataclass
class SearchResult:
    """Outcome of a counterexample search."""
    witnesses: List[Witness]
    records: List[dict]

    @property
    def found(self) -> bool:
        return bool(self.witnesses)


def _sphere_profile(nt: int) -> RevolutionProfile:
    if nt < 3:
        raise ValueError("nt must be at least 3")
    t = np.linspace(0.0, np.pi, nt)
    r = np.sin(t)
    r[0] = 0.0
    r[-1] = 0.0
    return RevolutionProfile(t, r, name="sphere", params={"nt": nt})


def _dumbbell_profile(neck_r: float, neck_len: float, bulb_r: float = 1.0, bulb_len: float = 2.0,
                      nt: int = 4001, ramp_len: Optional[float] = None) -> RevolutionProfile:
    """
    Two bulbs joined by a thin neck, closed by caps at both poles.

    Segments: cap, bulb plateau, cosine ramp down, neck plateau, ramp up,
    bulb plateau, cap. The ramps need length at least pi (bulb_r - neck_r) / 2
    to keep |r'| <= 1.
    """
    if neck_r <= 0 or bulb_r <= 0 or neck_len < 0 or bulb_len < 0:
        raise ValueError("dumbbell radii must be positive and lengths nonnegative")
    if neck_r >= bulb_r:
        raise ValueError(f"neck radius {neck_r} must be smaller than bulb radius {bulb_r}")
    cap = 0.5 * np.pi * bulb_r
    min_ramp = 0.5 * np.pi * (bulb_r - neck_r)
    if ramp_len is None:
        ramp_len = min_ramp
    elif ramp_len < min_ramp:
        raise ValueError(f"bulb-to-neck ramp of length {ramp_len} needs slope above 1; "
                         f"minimum length is {min_ramp:.6g}")

    knots = np.cumsum([0.0, cap, bulb_len, ramp_len, neck_len, ramp_len, bulb_len, cap])
    T = knots[-1]
    t = np.linspace(0.0, T, nt)
    drop = bulb_r - neck_r

    def radius(s: float) -> float:
        if s <= knots[1]:
            return bulb_r * math.sin(s / bulb_r)
        if s <= knots[2]:
            return bulb_r
        if s <= knots[3]:
            return neck_r + drop * 0.5 * (1.0 + math.cos(math.pi * (s - knots[2]) / ramp_len))
        if s <= knots[4]:
            return neck_r
        if s <= knots[5]:
            return neck_r + drop * 0.5 * (1.0 - math.cos(math.pi * (s - knots[4]) / ramp_len))
        if s <= knots[6]:
            return bulb_r
        return bulb_r * math.cos((s - knots[6]) / bulb_r)

    r = np.array([radius(s) for s in t])
    r[0] = 0.0
    r[-1] = 0.0
    r = np.maximum(r, 0.0)
    params = {"neck_r": neck_r, "neck_len": neck_len, "bulb_r": bulb_r, "bulb_len": bulb_len,
              "nt": nt, "ramp_len": ramp_len}
    return RevolutionProfile(t, r, name="dumbbell", params=params)


def builtin_profiles(name: str, **params) -> RevolutionProfile:
    """
    Built-in profile by name.

    Args:
        name: "sphere" (nt) or "dumbbell" (neck_r, neck_len, bulb_r, bulb_len, nt, ramp_len)

    Returns:
        RevolutionProfile
    """
    if name == "sphere":
        return _sphere_profile(int(params.get("nt", 2001)))
    if name == "dumbbell":
        return _dumbbell_profile(**params)
    raise ValueError(f"unknown profile {name!r}")


def _gradient_matrix(profile: RevolutionProfile) -> sparse.csr_matrix:
    dt = np.diff(profile.t)
    n = len(profile.t)
    rows = np.repeat(np.arange(n - 1), 2)
    cols = np.stack([np.arange(n - 1), np.arange(1, n)], axis=1).reshape(-1)
    data = np.stack([-1.0 / dt, 1.0 / dt], axis=1).reshape(-1)
    return sparse.csr_matrix((data, (rows, cols)), shape=(n - 1, n))


def _stiffness(profile: RevolutionProfile, G: sparse.csr_matrix) -> sparse.csr_matrix:
    return (G.T @ sparse.diags(profile.interval_weights) @ G).tocsr()


def _pole_mask(profile: RevolutionProfile) -> np.ndarray:
    pinned = np.zeros(len(profile.t), dtype=bool)
    pinned[0] = True
    return pinned


def _sup_gradient(profile: RevolutionProfile, rho: np.ndarray) -> float:
    return float(np.max(np.abs(np.diff(rho)) / np.diff(profile.t)))


def solve_obstacle_1d(profile: RevolutionProfile, m: float,
                      config: Optional[ObstacleConfig] = None) -> Solve1DReport:
    """
    Weighted one-dimensional obstacle problem ``rho <= t``, ``rho(0) = 0``.

    Raises:
        ValueError: If m is not positive
    """
    G = _gradient_matrix(profile)
    problem = ObstacleProblem(stiffness=_stiffness(profile, G), weights=profile.node_weights,
                              obstacle=profile.t - profile.t[0], m=m, fixed=_pole_mask(profile))
    report = ObstacleSolver(config).solve(problem)
    return _to_1d(profile, report, "obstacle")


def solve_gradient_1d(profile: RevolutionProfile, m: float,
                      config: Optional[GradientConfig] = None) -> Solve1DReport:
    """Weighted one-dimensional problem with ``|rho'| <= 1`` and ``rho(0) = 0``."""
    G = _gradient_matrix(profile)
    problem = GradientProblem(stiffness=_stiffness(profile, G), weights=profile.node_weights,
                              grad_op=G, face_weights=profile.interval_weights,
                              pinned=_pole_mask(profile), m=m, dim=1)
    report = GradientSolver(config).solve(problem)
    return _to_1d(profile, report, "gradient")


def _to_1d(profile: RevolutionProfile, report: SolveReport, mode: str) -> Solve1DReport:
    return Solve1DReport(rho=report.u, sup_gradient=_sup_gradient(profile, report.u), energy=report.energy,
                         converged=report.converged, mode=mode, m=report.m, iterations=report.iterations,
                         kkt_infeasibility=report.kkt_infeasibility,
                         kkt_stationarity=report.kkt_stationarity,
                         kkt_complementarity=report.kkt_complementarity,
                         relative_gap=report.relative_gap)


def meridian_values(evaluator, t) -> np.ndarray:
    """
    Values of a unit-sphere field along the meridian ``(sin t, 0, cos t)``.

    Used to compare a surface solve with the one-dimensional reduction.
    """
    t = np.asarray(t, dtype=float)
    points = np.stack([np.sin(t), np.zeros_like(t), np.cos(t)], axis=1)
    return np.asarray(evaluator(points), dtype=float)


def sphere_closed_form(m: float, t) -> np.ndarray:
    """
    Exact obstacle solution on the unit sphere profile.

    Contact ``rho = t`` up to ``t* = 2 arctan(m / 2)``, then
    ``rho' = (m / 2) cot(t / 2)``.
    """
    t = np.asarray(t, dtype=float)
    t_star = 2.0 * np.arctan(0.5 * m)
    with np.errstate(divide="ignore"):
        elastic = t_star + m * (np.log(np.sin(0.5 * t)) - np.log(np.sin(0.5 * t_star)))
    return np.where(t <= t_star, t, elastic)


def profile_curvature_bound(profile: RevolutionProfile) -> Tuple[float, float]:
    """
    Curvature lower bound K and diameter estimate of a surface of revolution.

    The Gauss curvature is ``-r'' / r``; the diameter is bounded by
    ``T + pi max r`` (meridian plus half a parallel).
    """
    t, r = profile.t, profile.r
    dt = np.diff(t)
    second = 2.0 * ((r[2:] - r[1:-1]) / dt[1:] - (r[1:-1] - r[:-2]) / dt[:-1]) / (dt[1:] + dt[:-1])
    gauss = -second / r[1:-1]
    K = max(0.0, -float(gauss.min()))
    return K, profile.length + np.pi * float(r.max())


def profile_sufficient_m(profile: RevolutionProfile) -> float:
    K, diam = profile_curvature_bound(profile)
    return sufficient_m(K, diam, 2)


def dumbbell_family(grid: Optional[Dict[str, Sequence[float]]] = None, bulb_r: float = 1.0,
                    nt: int = 4001) -> List[RevolutionProfile]:
    """All dumbbell profiles of a parameter grid."""
    grid = grid or DEFAULT_DUMBBELL_GRID
    profiles = []
    for neck_r, neck_len, bulb_len in product(grid["neck_r"], grid["neck_len"], grid["bulb_len"]):
        profiles.append(_dumbbell_profile(neck_r, neck_len, bulb_r, bulb_len, nt))
    return profiles


def counterexample_search(profiles: Iterable[RevolutionProfile], m_grid: Iterable[float] = DEFAULT_M_GRID,
                          margin: float = DEFAULT_MARGIN, min_gap: float = WITNESS_GAP,
                          obstacle_config: Optional[ObstacleConfig] = None,
                          gradient_config: Optional[GradientConfig] = None,
                          progress: bool = False) -> SearchResult:
    """
    Search (profile, m) pairs whose obstacle solution has slope above 1 + margin.

    A pair whose slope exceeds the bound is also solved with the gradient
    constraint; it is a witness only if the sup-norm gap between the two
    solutions is at least ``min_gap``. Pairs that exceed the slope but not the
    gap are recorded with ``slope_exceeded`` set. An empty witness list is a
    valid (negative) outcome.

    Returns:
        SearchResult with witnesses and a record of every evaluated pair
    """
    pairs = list(product(list(profiles), list(m_grid)))
    witnesses, records = [], []
    for profile, m in tqdm(pairs, desc="counterexample search", disable=not progress):
        obstacle = solve_obstacle_1d(profile, m, obstacle_config)
        record = {"profile": profile.name, **profile.params, "m": m,
                  "sup_gradient": obstacle.sup_gradient, "converged": obstacle.converged,
                  "slope_exceeded": False, "witness": False, "equivalence_gap": None}
        if obstacle.sup_gradient > 1.0 + margin:
            gradient = solve_gradient_1d(profile, m, gradient_config or SEARCH_GRADIENT_CONFIG)
            gap = float(np.max(np.abs(obstacle.rho - gradient.rho)))
            record.update(slope_exceeded=True, equivalence_gap=gap)
            if gap >= min_gap:
                record["witness"] = True
                witnesses.append(Witness(profile.name, dict(profile.params), m, obstacle.sup_gradient, gap))
                logger.info(f"Witness: {profile.name} {profile.params} m={m:g} "
                            f"sup|rho'|={obstacle.sup_gradient:.3f} gap={gap:.3g}")
            else:
                logger.info(f"Slope above bound but gap {gap:.3g} < {min_gap:g}: "
                            f"{profile.name} {profile.params} m={m:g}")
        records.append(record)
    if not witnesses:
        logger.warning("Counterexample search found no witness on this grid")
    return SearchResult(witnesses=witnesses, records=records)
