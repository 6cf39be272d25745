"""
Sampling-based semiconcavity estimates along geodesic chords.

For a chord [a, b] of a unit-speed geodesic and a weight lam in (0, 1), the
quotient

    ((1 - lam) u(a) + lam u(b) - u((1 - lam) a + lam b)) / (lam (1 - lam) (b - a)^2)

is bounded by C for a C-semiconcave function. The estimate is the largest
quotient over sampled chords.
"""

from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence
import logging

import numpy as np

from ..core.geodesic import analytic_distance
from ..core.surfaces import FLAT_UNIT_TORUS, PLANAR, UNIT_SPHERE

logger = logging.getLogger(__name__)

DEFAULT_LAMBDAS = tuple(np.round(np.arange(1, 10) * 0.1, 10))

# Offsets tried around the best lambda after the grid pass
REFINE_OFFSETS = (-0.05, -0.025, 0.025, 0.05)

# Dyadic chord levels below the full span
DEFAULT_LEVELS = 5

# Parameter step used when clipping curves at the exclusion ball
CLIP_STEP = 1e-3

MAX_ATTEMPTS_PER_SAMPLE = 1000

NORTH = np.array([0.0, 0.0, 1.0])


@dataclass
class GeodesicSample:
    """Arclength-parameterized geodesic segment on a model surface or the plane."""
    surface: str
    origin: np.ndarray
    direction: np.ndarray
    start: float
    stop: float
    rho: float = 0.0
    basepoint: Optional[np.ndarray] = None

    def at(self, t) -> np.ndarray:
        """Points of the curve at parameters t."""
        t = np.atleast_1d(np.asarray(t, dtype=float))[:, None]
        if self.surface == UNIT_SPHERE:
            return np.cos(t) * self.origin + np.sin(t) * self.direction
        points = self.origin + t * self.direction
        if self.surface == FLAT_UNIT_TORUS:
            return np.mod(points, 1.0)
        return points

    @property
    def length(self) -> float:
        return self.stop - self.start

    def points(self, count: int = 65) -> np.ndarray:
        return self.at(np.linspace(self.start, self.stop, count))

    def distance_to_base(self, points: np.ndarray) -> np.ndarray:
        return _surface_distance(self.surface, self._base(), points)

    def _base(self) -> np.ndarray:
        if self.basepoint is not None:
            return self.basepoint
        return NORTH if self.surface == UNIT_SPHERE else np.zeros(2)

    def check_unit_speed(self, count: int = 65) -> float:
        """Largest mismatch between consecutive chord distances and parameter steps."""
        t = np.linspace(self.start, self.stop, count)
        pts = self.at(t)
        steps = np.array([_surface_distance(self.surface, pts[k], pts[k + 1:k + 2])[0]
                          for k in range(count - 1)])
        return float(np.max(np.abs(steps - np.diff(t)), initial=0.0))


@dataclass
class SemiconcavityReport:
    """Best semiconcavity constant over a chord sample."""
    C_hat: float
    worst_sample: int
    worst_a: float
    worst_b: float
    worst_lambda: float
    samples_evaluated: int

    def to_dict(self) -> dict:
        return {"C_hat": self.C_hat, "worst_sample": self.worst_sample, "worst_a": self.worst_a,
                "worst_b": self.worst_b, "worst_lambda": self.worst_lambda,
                "samples_evaluated": self.samples_evaluated}


def _surface_distance(surface: str, base, points) -> np.ndarray:
    points = np.atleast_2d(points)
    if surface == PLANAR:
        return np.linalg.norm(points - np.asarray(base), axis=1)
    return np.atleast_1d(analytic_distance(surface, base, points))


def _random_unit(rng: np.random.Generator, dim: int) -> np.ndarray:
    v = rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def sample_geodesics(surface: str, count: int, max_length: float, rho: float = 0.0, seed: int = 0,
                     box: Sequence[float] = (0.0, 1.0, 0.0, 1.0),
                     basepoint: Optional[Sequence[float]] = None) -> List[GeodesicSample]:
    """
    Random unit-speed geodesic segments avoiding the ball of radius rho at the basepoint.

    Great circles on the unit sphere, straight lines mod 1 on the flat torus,
    and straight segments in the plane (starting points drawn from ``box``).
    Each segment starts outside the ball and is cut at its first entry.

    Args:
        surface: "unit_sphere", "flat_unit_torus" or "planar"
        count: Number of segments
        max_length: Segment length before clipping
        rho: Exclusion radius around the basepoint
        seed: Random seed
        box: (xmin, xmax, ymin, ymax) for planar starting points
        basepoint: Planar basepoint; defaults to none (no exclusion in the plane)

    Returns:
        List of GeodesicSample

    Raises:
        ValueError: On an unsupported surface
    """
    if surface not in (UNIT_SPHERE, FLAT_UNIT_TORUS, PLANAR):
        raise ValueError(f"geodesic sampling is not supported on {surface!r}")
    if max_length <= 0 or count <= 0:
        raise ValueError("count and max_length must be positive")
    rng = np.random.default_rng(seed)
    base = None if basepoint is None else np.asarray(basepoint, dtype=float)
    exclude = rho > 0 and (surface != PLANAR or base is not None)

    samples = []
    attempts = 0
    while len(samples) < count:
        attempts += 1
        if attempts > MAX_ATTEMPTS_PER_SAMPLE * count:
            raise ValueError(f"could not place {count} geodesics outside the ball of radius {rho}")
        if surface == UNIT_SPHERE:
            origin = _random_unit(rng, 3)
            tangent = _random_unit(rng, 3)
            tangent -= (tangent @ origin) * origin
            tangent /= np.linalg.norm(tangent)
            sample = GeodesicSample(surface, origin, tangent, 0.0, max_length, rho)
        elif surface == FLAT_UNIT_TORUS:
            origin = rng.uniform(0.0, 1.0, 2)
            sample = GeodesicSample(surface, origin, _random_unit(rng, 2), 0.0, max_length, rho)
        else:
            origin = np.array([rng.uniform(box[0], box[1]), rng.uniform(box[2], box[3])])
            sample = GeodesicSample(surface, origin, _random_unit(rng, 2), 0.0, max_length, rho, base)

        if exclude:
            if sample.distance_to_base(sample.at(0.0))[0] < rho:
                continue
            t = np.arange(0.0, max_length + CLIP_STEP, CLIP_STEP)
            t[-1] = min(t[-1], max_length)
            inside = np.flatnonzero(sample.distance_to_base(sample.at(t)) < rho)
            if len(inside):
                sample.stop = float(t[inside[0] - 1]) if inside[0] > 0 else 0.0
            if sample.length <= 0:
                continue
        samples.append(sample)
    logger.debug(f"Sampled {len(samples)} geodesics on {surface}")
    return samples


def _dyadic_chords(start: float, stop: float, levels: int, min_chord: float) -> List[tuple]:
    chords = []
    for level in range(levels + 1):
        pieces = 2 ** level
        width = (stop - start) / pieces
        if width < min_chord or width <= 0:
            break
        for k in range(pieces):
            chords.append((start + k * width, start + (k + 1) * width))
    return chords


def _quotients(evaluator: Callable, sample: GeodesicSample, chords: List[tuple],
               lambdas: np.ndarray) -> np.ndarray:
    a = np.array([c[0] for c in chords])[:, None]
    b = np.array([c[1] for c in chords])[:, None]
    lam = lambdas[None, :]
    mid = (1.0 - lam) * a + lam * b
    ua = np.asarray(evaluator(sample.at(a[:, 0])), dtype=float)[:, None]
    ub = np.asarray(evaluator(sample.at(b[:, 0])), dtype=float)[:, None]
    um = np.asarray(evaluator(sample.at(mid.reshape(-1))), dtype=float).reshape(mid.shape)
    excess = (1.0 - lam) * ua + lam * ub - um
    return excess / (lam * (1.0 - lam) * (b - a) ** 2)


def estimate_semiconcavity(evaluator: Callable, samples: Sequence[GeodesicSample],
                           lambdas: Optional[Sequence[float]] = None, min_chord: Optional[float] = None,
                           levels: int = DEFAULT_LEVELS) -> SemiconcavityReport:
    """
    Largest chord quotient over the samples.

    Args:
        evaluator: Vectorized field evaluator on sample points (NaN outside its domain)
        samples: Geodesic samples
        lambdas: Lambda grid, defaults to 0.1 ... 0.9
        min_chord: Chords shorter than this are skipped; defaults to the
            evaluator's ``min_chord`` attribute (2h for mesh fields) or 0
        levels: Number of dyadic sub-chord levels

    Returns:
        SemiconcavityReport

    Raises:
        ValueError: If the sample set is empty
    """
    if not samples:
        raise ValueError("semiconcavity estimate needs at least one sample")
    grid = np.asarray(DEFAULT_LAMBDAS if lambdas is None else lambdas, dtype=float)
    if min_chord is None:
        min_chord = float(getattr(evaluator, "min_chord", 0.0))

    best = (-np.inf, -1, np.nan, np.nan, np.nan)
    evaluated = 0
    for index, sample in enumerate(samples):
        chords = _dyadic_chords(sample.start, sample.stop, levels, min_chord)
        if not chords:
            continue
        q = _quotients(evaluator, sample, chords, grid)
        evaluated += int(np.isfinite(q).sum())
        if not np.isfinite(q).any():
            continue
        flat = int(np.nanargmax(q))
        ci, li = divmod(flat, len(grid))
        if q[ci, li] > best[0]:
            best = (float(q[ci, li]), index, chords[ci][0], chords[ci][1], float(grid[li]))

        # Refine lambda around the running maximum of this sample
        lam0 = float(grid[li])
        local = np.array([lam0 + off for off in REFINE_OFFSETS])
        local = local[(local > 0.0) & (local < 1.0)]
        if len(local):
            qr = _quotients(evaluator, sample, [chords[ci]], local)[0]
            evaluated += int(np.isfinite(qr).sum())
            if np.isfinite(qr).any():
                k = int(np.nanargmax(qr))
                if qr[k] > best[0]:
                    best = (float(qr[k]), index, chords[ci][0], chords[ci][1], float(local[k]))

    if best[1] < 0:
        logger.warning("No chord could be evaluated")
        return SemiconcavityReport(float("nan"), -1, np.nan, np.nan, np.nan, evaluated)
    logger.info(f"Semiconcavity estimate C_hat={best[0]:.4f} over {len(samples)} samples")
    return SemiconcavityReport(C_hat=best[0], worst_sample=best[1], worst_a=best[2], worst_b=best[3],
                               worst_lambda=best[4], samples_evaluated=evaluated)


def distance_evaluator(surface: str, basepoint=None) -> Callable:
    """Exact distance to the basepoint as a vectorized evaluator."""
    base = NORTH if surface == UNIT_SPHERE else np.zeros(2)
    if basepoint is not None:
        base = np.asarray(basepoint, dtype=float)

    def evaluate(points):
        return _surface_distance(surface, base, points)
    return evaluate
