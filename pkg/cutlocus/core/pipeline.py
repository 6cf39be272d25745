"""
Sweep pipeline.

Solves the obstacle problem for an increasing list of m on one surface or
planar domain, extracts elastic and lambda-elastic sets, compares them with
the exact cut locus or medial axis where one is known, and writes the sweep
table, per-m fields and the run report.
"""

from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional
import logging
import math

import numpy as np

from ..analysis.planar import PlanarDomain, boundary_distance, build_domain, medial_ground_truth
from ..analysis.semiconcavity import estimate_semiconcavity, sample_geodesics
from ..analysis.sets import (RegionLabeling, elastic_set, ground_truth_cut, hausdorff,
                             lambda_elastic_set)
from ..utils.io import load_mesh, write_field_csv, write_sweep_csv, write_vtk
from ..utils.logging import RunLogger
from .geodesic import analytic_distance, fast_march, snap_to_vertex
from .gradient import GradientConfig, GradientProblem, GradientSolver
from .interpolate import MeshInterpolator
from .mesh import TriangleMesh, face_gradient_norms
from .obstacle import ObstacleConfig, ObstacleProblem, ObstacleSolver, SolveReport
from .queue import SweepJob, SweepQueue
from .surfaces import FLAT_UNIT_TORUS, NORTH_POLE, PLANAR, UNIT_SPHERE, flat_torus, icosphere

logger = logging.getLogger(__name__)

# Default semiconcavity exclusion radius and curve length per surface
SEMICONCAVITY_DEFAULTS = {
    UNIT_SPHERE: (math.pi / 4.0, math.pi),
    FLAT_UNIT_TORUS: (0.1, 0.5),
    PLANAR: (0.0, None),
}


@dataclass
class RunConfig:
    """Configuration of a sweep run."""

    # Surface: "sphere:<subdivisions>", "torus:<n>", "disk:<R>:<h>",
    # "rectangle:<L>:<W>:<h>" or a mesh file path
    surface: str = "sphere:4"
    basepoint: Optional[int] = None
    basepoint_coords: Optional[List[float]] = None

    # Sweep
    m: List[float] = field(default_factory=lambda: [8.0, 16.0, 32.0])
    lambdas: List[float] = field(default_factory=list)
    compare_gradient: bool = False
    parallel: bool = False
    workers: int = 2

    # Solvers
    tol: float = 1e-8
    omega: float = 1.5
    max_iter: Optional[int] = None
    tol_feas: float = 1e-6
    tol_gap: float = 1e-7
    gradient_max_iter: Optional[int] = None

    # Thresholds (None selects the mesh-dependent defaults)
    contact_epsilon: Optional[float] = None
    gradient_epsilon: Optional[float] = None
    semiconcavity_samples: int = 0
    semiconcavity_rho: Optional[float] = None
    # Lambda rows are also checked against the exact set at lambda + shift
    lambda_shift: float = 0.05

    # Output
    directory: str = "cutlocus_out"
    seed: int = 0
    write_fields: bool = True

    def __post_init__(self):
        self.m = [float(x) for x in self.m]
        self.lambdas = [float(x) for x in self.lambdas]
        if not self.m:
            raise ValueError("the m list is empty")
        if any(x <= 0 or not math.isfinite(x) for x in self.m):
            raise ValueError("every m must be positive and finite")
        if any(b <= a for a, b in zip(self.m, self.m[1:])):
            raise ValueError("the m list must be strictly increasing")
        if any(x <= 0 for x in self.lambdas):
            raise ValueError("every lambda must be positive")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")
        if self.semiconcavity_samples < 0:
            raise ValueError("semiconcavity_samples must be nonnegative")
        if self.lambda_shift <= 0:
            raise ValueError("lambda_shift must be positive")

    @classmethod
    def from_mapping(cls, data: Dict[str, Dict[str, Any]]) -> "RunConfig":
        """
        Build a RunConfig from configuration sections.

        Keys of ``[surface]``, ``[sweep]``, ``[solver]``, ``[thresholds]`` and
        ``[output]`` are flattened onto the dataclass fields.
        """
        flat = {}
        for section, values in data.items():
            for key, value in values.items():
                flat[key] = value
        if "spec" in flat:
            flat["surface"] = flat.pop("spec")
        known = set(cls.__dataclass_fields__)
        unknown = set(flat) - known
        if unknown:
            raise ValueError(f"unknown configuration key(s): {', '.join(sorted(unknown))}")
        return cls(**flat)

    def obstacle_config(self) -> ObstacleConfig:
        return ObstacleConfig(tol=self.tol, omega=self.omega, max_iter=self.max_iter)

    def gradient_config(self) -> GradientConfig:
        return GradientConfig(tol_feas=self.tol_feas, tol_gap=self.tol_gap, max_iter=self.gradient_max_iter)


@dataclass
class SurfaceSetup:
    """Mesh, obstacle and ground-truth access for one run."""
    mesh: TriangleMesh
    distance: np.ndarray
    label: str
    surface: Optional[str] = None
    basepoint: Optional[int] = None
    domain: Optional[PlanarDomain] = None

    @property
    def is_planar(self) -> bool:
        return self.domain is not None

    @property
    def has_ground_truth(self) -> bool:
        if self.domain is not None:
            return self.domain.shape is not None
        default = NORTH_POLE if self.surface == UNIT_SPHERE else 0
        return self.surface in (UNIT_SPHERE, FLAT_UNIT_TORUS) and self.basepoint == default

    def ground_truth(self, lam: float) -> Optional[RegionLabeling]:
        if not self.has_ground_truth:
            return None
        if self.domain is not None:
            return medial_ground_truth(self.domain, lam)
        return ground_truth_cut(self.surface, lam, mesh=self.mesh)


def _parse_numbers(parts: List[str], names: List[str], spec: str) -> List[float]:
    if len(parts) != len(names):
        raise ValueError(f"surface spec {spec!r} needs {':'.join(names)}")
    try:
        return [float(p) for p in parts]
    except ValueError as e:
        raise ValueError(f"surface spec {spec!r} has a non-numeric parameter") from e


def load_surface(spec: str) -> Any:
    """
    Resolve a surface spec to a TriangleMesh or PlanarDomain.

    Raises:
        ValueError: On an unknown spec
        FileNotFoundError: If a mesh path does not exist
    """
    kind, _, rest = spec.partition(":")
    parts = rest.split(":") if rest else []
    if kind == "sphere":
        return icosphere(int(parts[0]) if parts else 4)
    if kind == "torus":
        return flat_torus(int(parts[0]) if parts else 64)
    if kind == "disk":
        R, h = _parse_numbers(parts, ["R", "h"], spec)
        return build_domain("disk", R=R, h=h)
    if kind == "rectangle":
        L, W, h = _parse_numbers(parts, ["L", "W", "h"], spec)
        return build_domain("rectangle", L=L, W=W, h=h)
    if Path(spec).suffix:
        mesh = load_mesh(spec)
        return mesh if mesh.is_closed else build_domain(mesh)
    raise ValueError(f"unknown surface spec {spec!r}")


def setup_surface(spec: str, basepoint: Optional[int] = None,
                  basepoint_coords: Optional[List[float]] = None) -> SurfaceSetup:
    """
    Mesh and obstacle for a surface spec.

    Closed model surfaces use the exact distance to the basepoint; other
    closed meshes use fast marching; planar domains use the exact boundary
    distance.
    """
    loaded = load_surface(spec)
    if isinstance(loaded, PlanarDomain):
        d = boundary_distance(loaded).values
        return SurfaceSetup(loaded.mesh, d, spec, PLANAR, None, loaded)

    mesh = loaded
    if basepoint_coords is not None:
        basepoint, snap = snap_to_vertex(mesh, basepoint_coords)
        logger.info(f"Basepoint snapped to vertex {basepoint} ({snap:.3g} away)")
    if basepoint is None:
        basepoint = mesh.basepoint if mesh.basepoint is not None else 0
    if not 0 <= basepoint < mesh.vertex_count:
        raise ValueError(f"basepoint {basepoint} is not a vertex index")

    if mesh.surface == UNIT_SPHERE:
        d = analytic_distance(UNIT_SPHERE, mesh.vertices[basepoint], mesh.vertices)
    elif mesh.surface == FLAT_UNIT_TORUS and mesh.params is not None:
        d = analytic_distance(FLAT_UNIT_TORUS, mesh.params[basepoint], mesh.params)
    else:
        d = fast_march(mesh, [basepoint]).values
    d = np.asarray(d, dtype=float)
    d[basepoint] = 0.0
    return SurfaceSetup(mesh, d, spec, mesh.surface, basepoint, None)


@dataclass
class SweepResult:
    """Rows, per-m reports and overall status of a sweep."""
    rows: List[Dict[str, Any]]
    reports: List[Dict[str, Any]]
    converged: bool
    output_dir: Path
    artifacts: List[str] = field(default_factory=list)


class SweepPipeline:
    """Obstacle sweep over m with set extraction and ground-truth comparison."""

    def __init__(self, config: Optional[RunConfig] = None):
        """
        Initialize the pipeline.

        Args:
            config: Run configuration (uses defaults if not provided)
        """
        self.config = config or RunConfig()

    def solve_one(self, setup: SurfaceSetup, m: float, initial: Optional[np.ndarray] = None) -> Dict[str, Any]:
        """Obstacle solve (plus the optional gradient solve) for one m."""
        cfg = self.config
        if setup.is_planar:
            problem = ObstacleProblem.from_mesh(setup.mesh, setup.distance, m, boundary_condition="zero")
        else:
            # u >= 0 and u <= d_b pin the basepoint at zero
            problem = ObstacleProblem.from_mesh(setup.mesh, setup.distance, m, nonnegative=True)
        report = ObstacleSolver(cfg.obstacle_config()).solve(problem, initial=initial)
        result = {"m": m, "obstacle": report, "gradient": None}
        if cfg.compare_gradient:
            if setup.is_planar:
                gproblem = GradientProblem.from_mesh(setup.mesh, m, zero_on_boundary=True)
            else:
                gproblem = GradientProblem.from_mesh(setup.mesh, m, basepoint=setup.basepoint)
            result["gradient"] = GradientSolver(cfg.gradient_config()).solve(gproblem)
        return result

    def run(self, progress_callback: Optional[Callable[[str, float], None]] = None) -> SweepResult:
        """
        Run the sweep.

        Args:
            progress_callback: Optional callback taking (message, percent)

        Returns:
            SweepResult

        Raises:
            ValueError: On invalid input; rows finished so far stay on disk
        """
        cfg = self.config
        out = Path(cfg.directory)
        out.mkdir(parents=True, exist_ok=True)
        run_log = RunLogger(str(out))
        run_log.log_start(asdict(cfg))

        rows, reports = [], []
        converged = True
        previous = None
        sweep_path = out / "sweep.csv"
        try:
            if progress_callback:
                progress_callback("Preparing surface", 0)
            setup = setup_surface(cfg.surface, cfg.basepoint, cfg.basepoint_coords)
            logger.info(f"Sweep on {setup.label}: {setup.mesh}, m={cfg.m}, lambdas={cfg.lambdas}")
            truths = self._ground_truths(setup)
            jobs = self._solve_parallel(setup) if cfg.parallel else None

            for k, m in enumerate(cfg.m):
                if progress_callback:
                    progress_callback(f"Solving m={m:g}", 100.0 * k / len(cfg.m))
                if jobs is not None:
                    if jobs[k].error is not None:
                        raise ValueError(f"solve for m={m:g} failed: {jobs[k].error}")
                    result = jobs[k].result
                else:
                    result = self.solve_one(setup, m, initial=previous)
                report = result["obstacle"]
                new_rows, summary = self._measure(setup, truths, result, previous)
                rows.extend(new_rows)
                reports.append(summary)
                converged &= summary["converged"]
                run_log.log_solve(m, summary)
                if cfg.write_fields:
                    for path in self._write_fields(out, setup, m, report.u, new_rows):
                        run_log.log_artifact(path)
                write_sweep_csv(sweep_path, rows)
                previous = report.u
        except (ValueError, FileNotFoundError) as e:
            run_log.log_error(str(e))
            raise
        run_log.log_artifact(sweep_path)
        run_log.log_complete({"converged": converged, "rows": len(rows), "reports": reports})
        if progress_callback:
            progress_callback("Complete", 100)
        return SweepResult(rows=rows, reports=reports, converged=converged, output_dir=out,
                           artifacts=list(run_log.artifacts))

    def _solve_parallel(self, setup: SurfaceSetup) -> List[SweepJob]:
        """Cold-start solves of every m on worker threads, returned in m order."""
        queue = SweepQueue(lambda m: self.solve_one(setup, m), num_workers=self.config.workers)
        for m in self.config.m:
            queue.add_job(m)
        queue.start()
        queue.wait()
        queue.stop()
        return queue.get_all_jobs()

    def _ground_truths(self, setup: SurfaceSetup) -> Dict[float, Optional[RegionLabeling]]:
        truths = {0.0: setup.ground_truth(0.0)}
        for lam in self.config.lambdas:
            truths[lam] = setup.ground_truth(lam)
            truths[lam + self.config.lambda_shift] = setup.ground_truth(lam + self.config.lambda_shift)
        return truths

    def _semiconcavity(self, setup: SurfaceSetup, u: np.ndarray) -> Optional[float]:
        cfg = self.config
        if cfg.semiconcavity_samples == 0 or setup.surface not in SEMICONCAVITY_DEFAULTS:
            return None
        if not setup.is_planar and not setup.has_ground_truth:
            return None
        rho, length = SEMICONCAVITY_DEFAULTS[setup.surface]
        if cfg.semiconcavity_rho is not None:
            rho = cfg.semiconcavity_rho
        box = (0.0, 1.0, 0.0, 1.0)
        if setup.is_planar:
            coords = setup.mesh.vertices[:, :2]
            lo, hi = coords.min(axis=0), coords.max(axis=0)
            box = (lo[0], hi[0], lo[1], hi[1])
            length = 0.5 * float(np.linalg.norm(hi - lo))
        samples = sample_geodesics(setup.surface, cfg.semiconcavity_samples, length, rho=rho,
                                   seed=cfg.seed, box=box)
        return estimate_semiconcavity(MeshInterpolator(setup.mesh, u), samples).C_hat

    def _measure(self, setup: SurfaceSetup, truths: Dict[float, Optional[RegionLabeling]],
                 result: Dict[str, Any], previous: Optional[np.ndarray]):
        cfg = self.config
        mesh = setup.mesh
        report: SolveReport = result["obstacle"]
        m = result["m"]
        u = report.u
        sup_gap = float(np.max(setup.distance - u))
        max_grad = float(face_gradient_norms(mesh, u).max())
        c_hat = self._semiconcavity(setup, u)

        base = {"m": m, "sup_gap": sup_gap, "max_grad": max_grad, "C_hat": c_hat,
                "iters": report.iterations, "converged": report.converged}
        labelings = [(0.0, elastic_set(u, setup.distance, mesh, "contact_gap", cfg.contact_epsilon, m))]
        for lam in cfg.lambdas:
            labelings.append((lam, lambda_elastic_set(u, mesh, lam, cfg.gradient_epsilon, m)))

        rows = []
        for lam, labeling in labelings:
            row = dict(base, **{"lambda": lam, "hausdorff_sym": None, "hausdorff_E_to_GT": None,
                                "hausdorff_GT_to_E": None, "hausdorff_shifted": None})
            truth = truths.get(lam)
            if truth is not None:
                row.update(self._hausdorff_columns(mesh, labeling, truth))
            shifted = truths.get(lam + cfg.lambda_shift) if lam > 0 else None
            if shifted is not None:
                row["hausdorff_shifted"] = self._covering_distance(mesh, shifted, labeling)
            row["_labeling"] = labeling
            rows.append(row)

        summary = dict(report.to_dict(), sup_gap=sup_gap, max_grad=max_grad, C_hat=c_hat,
                       elastic_count=labelings[0][1].count)
        if previous is not None:
            summary["monotonicity_violation"] = float(max(0.0, np.max(previous - u)))
        gradient = result["gradient"]
        converged = report.converged
        if gradient is not None:
            summary["gradient"] = gradient.to_dict()
            summary["equivalence_gap"] = float(np.max(np.abs(u - gradient.u)))
            converged = converged and gradient.converged
        summary["converged"] = converged
        logger.info(f"m={m:g}: sup_gap={sup_gap:.4g}, max_grad={max_grad:.4f}, "
                    f"|E_m|={labelings[0][1].count}, converged={converged}")
        return rows, summary

    @staticmethod
    def _hausdorff_columns(mesh: TriangleMesh, labeling: RegionLabeling, truth: RegionLabeling) -> Dict[str, float]:
        if labeling.is_empty and truth.is_empty:
            return {"hausdorff_sym": 0.0, "hausdorff_E_to_GT": 0.0, "hausdorff_GT_to_E": 0.0}
        report = hausdorff(mesh, labeling, truth)
        return {"hausdorff_sym": report.symmetric, "hausdorff_E_to_GT": report.sup_A_to_B,
                "hausdorff_GT_to_E": report.sup_B_to_A}

    @staticmethod
    def _covering_distance(mesh: TriangleMesh, truth: RegionLabeling, labeling: RegionLabeling) -> float:
        """sup over the truth of the distance to the extracted set (0 for an empty truth)."""
        if truth.is_empty:
            return 0.0
        if labeling.is_empty:
            return math.inf
        return hausdorff(mesh, truth, labeling).sup_A_to_B

    @staticmethod
    def _write_fields(out: Path, setup: SurfaceSetup, m: float, u: np.ndarray,
                      rows: List[Dict[str, Any]]) -> List[Path]:
        tag = f"m{m:g}"
        point_data = {"u": u, "d": setup.distance, "gap": setup.distance - u}
        for row in rows:
            name = "E" if row["lambda"] == 0.0 else f"E_lambda{row['lambda']:g}"
            point_data[name] = row["_labeling"].member.astype(float)
        paths = [write_vtk(out / f"fields_{tag}.vtk", setup.mesh, point_data),
                 write_field_csv(out / f"u_{tag}.csv", u),
                 write_field_csv(out / f"elastic_{tag}.csv", rows[0]["_labeling"].member)]
        return paths


def run_sweep(config: RunConfig,
              progress_callback: Optional[Callable[[str, float], None]] = None) -> SweepResult:
    """
    Convenience function to run a sweep.

    Args:
        config: Run configuration
        progress_callback: Optional progress callback

    Returns:
        SweepResult
    """
    return SweepPipeline(config).run(progress_callback)
