"""
Command-line interface for cutlocus.
"""

from dataclasses import asdict
from pathlib import Path
import functools
import logging
import sys

import click
import numpy as np
from rich.console import Console
from rich.logging import RichHandler
from rich.progress import BarColumn, Progress, SpinnerColumn, TaskProgressColumn, TextColumn

from . import __version__
from .analysis import planar, revolution
from .analysis.semiconcavity import distance_evaluator, estimate_semiconcavity, sample_geodesics
from .analysis.sets import elastic_set, hausdorff, lambda_elastic_set
from .core.geodesic import fast_march
from .core.gradient import GradientConfig, GradientProblem, GradientSolver
from .core.interpolate import MeshInterpolator
from .core.mesh import curvature_info, face_gradient_norms, sufficient_m
from .core.obstacle import ObstacleConfig, ObstacleProblem, ObstacleSolver
from .core.pipeline import SEMICONCAVITY_DEFAULTS, RunConfig, SweepPipeline, load_surface, setup_surface
from .core.surfaces import FLAT_UNIT_TORUS, UNIT_SPHERE
from .utils.config import load_config, merge_overrides
from .utils.io import (read_field_csv, read_profile_csv, write_field_csv, write_json, write_off,
                       write_profile_csv, write_table_csv, write_vtk)

console = Console()
logger = logging.getLogger(__name__)

EXIT_NOT_CONVERGED = 2
EXIT_INVALID_INPUT = 3
EXIT_NO_WITNESS = 4


def setup_logging(verbose: bool = False):
    """Set up logging configuration."""
    level = logging.DEBUG if verbose else logging.INFO
    logging.basicConfig(
        level=level,
        format="%(message)s",
        handlers=[RichHandler(console=console, rich_tracebacks=True)]
    )


def reports_errors(command):
    """Map invalid input to exit code 3 with a red error line."""
    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except (ValueError, FileNotFoundError) as e:
            console.print(f"[red]✗[/red] Error: {e}", style="bold red")
            sys.exit(EXIT_INVALID_INPUT)
    return wrapper


def _output_dir(output: str) -> Path:
    path = Path(output)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _parse_point(text: str):
    try:
        return [float(x) for x in text.split(",")]
    except ValueError as e:
        raise ValueError(f"point must be comma-separated numbers, got {text!r}") from e


def _finish(converged: bool, message: str) -> None:
    if converged:
        console.print(f"[green]✓[/green] {message}")
        return
    console.print(f"[yellow]![/yellow] {message} [yellow](not converged)[/yellow]")
    sys.exit(EXIT_NOT_CONVERGED)


verbose_option = click.option("--verbose", "-v", is_flag=True, help="Enable verbose logging")
output_option = click.option("--output", "-o", default="cutlocus_out", show_default=True,
                             help="Output directory")


@click.group()
@click.version_option(version=__version__)
def cli():
    """cutlocus - cut loci and medial axes from obstacle problems."""
    pass


@cli.command("mesh-info")
@click.argument("surface")
@output_option
@verbose_option
@reports_errors
def mesh_info(surface, output, verbose):
    """Print mesh statistics and the curvature-based sufficient m."""
    setup_logging(verbose)
    loaded = load_surface(surface)
    mesh = loaded.mesh if isinstance(loaded, planar.PlanarDomain) else loaded
    info = {
        "vertices": mesh.vertex_count,
        "faces": mesh.face_count,
        "edges": mesh.edge_count,
        "closed": mesh.is_closed,
        "euler_characteristic": mesh.euler_characteristic,
        "components": mesh.connected_components(),
        "max_edge_length": mesh.max_edge_length,
        "area": float(mesh.face_areas.sum()),
    }
    if mesh.is_closed:
        curv = curvature_info(mesh)
        info.update(ricci_lower_bound=curv.ricci_lower_bound, diameter_estimate=curv.diameter_estimate,
                    gauss_bonnet_error=curv.gauss_bonnet_error,
                    sufficient_m=sufficient_m(curv.ricci_lower_bound, curv.diameter_estimate))
    write_json(_output_dir(output) / "mesh_info.json", info)
    console.print(f"\n[bold]Mesh:[/bold] {surface}\n")
    for key, value in info.items():
        console.print(f"  {key.replace('_', ' ').capitalize():24s} {value}")


@cli.command()
@click.argument("surface")
@click.option("--basepoint", type=int, default=None, help="Basepoint vertex index")
@click.option("--point", default=None, help="Basepoint coordinates, e.g. 0,0,1")
@output_option
@verbose_option
@reports_errors
def distance(surface, basepoint, point, output, verbose):
    """Fast-marched distance to the basepoint (boundary distance for domains)."""
    setup_logging(verbose)
    setup = setup_surface(surface, basepoint, _parse_point(point) if point else None)
    out = _output_dir(output)
    if setup.is_planar:
        values = setup.distance
        message = f"Boundary distance on {setup.mesh.vertex_count} vertices, max {values.max():.6f}"
    else:
        field = fast_march(setup.mesh, [setup.basepoint])
        values = field.values
        error = float(np.max(np.abs(values - setup.distance))) if setup.surface in (
            UNIT_SPHERE, FLAT_UNIT_TORUS) else None
        message = (f"Distance from vertex {setup.basepoint}: max {np.max(values):.6f}, "
                   f"{field.fallback_updates} fallback updates")
        if not field.is_consistent(setup.mesh):
            logger.warning(
                f"Distance exceeds edge lengths by up to {field.lipschitz_violation(setup.mesh):.3e}")
        if error is not None:
            message += f", max error vs exact {error:.3e}"
    write_vtk(out / "distance.vtk", setup.mesh, {"distance": values})
    write_field_csv(out / "distance.csv", values)
    console.print(f"[green]✓[/green] {message}")


def _obstacle_problem(setup, m):
    if setup.is_planar:
        return ObstacleProblem.from_mesh(setup.mesh, setup.distance, m, boundary_condition="zero")
    return ObstacleProblem.from_mesh(setup.mesh, setup.distance, m, nonnegative=True)


@cli.command("solve-obstacle")
@click.argument("surface")
@click.option("--m", "m", type=float, required=True, help="Load parameter")
@click.option("--basepoint", type=int, default=None, help="Basepoint vertex index")
@click.option("--tol", type=float, default=1e-8, show_default=True, help="KKT tolerance")
@click.option("--omega", type=float, default=1.5, show_default=True, help="SOR relaxation")
@click.option("--max-iter", type=int, default=None, help="Sweep budget")
@output_option
@verbose_option
@reports_errors
def solve_obstacle_command(surface, m, basepoint, tol, omega, max_iter, output, verbose):
    """Solve the obstacle problem u <= d for one m."""
    setup_logging(verbose)
    setup = setup_surface(surface, basepoint)
    out = _output_dir(output)
    report = ObstacleSolver(ObstacleConfig(tol=tol, omega=omega, max_iter=max_iter)).solve(
        _obstacle_problem(setup, m))
    write_vtk(out / "obstacle.vtk", setup.mesh, {"u": report.u, "d": setup.distance,
                                                 "gap": setup.distance - report.u})
    write_field_csv(out / "obstacle.csv", report.u)
    write_json(out / "obstacle_report.json", dict(report.to_dict(), surface=surface,
                                                  sup_gap=float(np.max(setup.distance - report.u))))
    _finish(report.converged, f"Obstacle m={m:g}: {report.iterations} iterations, "
                              f"KKT max {max(report.kkt_infeasibility, report.kkt_stationarity, report.kkt_complementarity):.2e}")


@cli.command("solve-gradient")
@click.argument("surface")
@click.option("--m", "m", type=float, required=True, help="Load parameter")
@click.option("--basepoint", type=int, default=None, help="Basepoint vertex index")
@click.option("--tol-feas", type=float, default=1e-6, show_default=True, help="Feasibility tolerance")
@click.option("--tol-gap", type=float, default=1e-7, show_default=True, help="Relative duality gap")
@click.option("--max-iter", type=int, default=None, help="Iteration budget")
@output_option
@verbose_option
@reports_errors
def solve_gradient_command(surface, m, basepoint, tol_feas, tol_gap, max_iter, output, verbose):
    """Solve the gradient-constrained problem |grad u| <= 1 for one m."""
    setup_logging(verbose)
    setup = setup_surface(surface, basepoint)
    out = _output_dir(output)
    if setup.is_planar:
        problem = GradientProblem.from_mesh(setup.mesh, m, zero_on_boundary=True)
    else:
        problem = GradientProblem.from_mesh(setup.mesh, m, basepoint=setup.basepoint)
    config = GradientConfig(tol_feas=tol_feas, tol_gap=tol_gap, max_iter=max_iter)
    report = GradientSolver(config).solve(problem)
    norms = face_gradient_norms(setup.mesh, report.u)
    write_vtk(out / "gradient.vtk", setup.mesh, {"u": report.u}, {"grad_norm": norms})
    write_field_csv(out / "gradient.csv", report.u)
    write_field_csv(out / "gradient_faces.csv", norms, id_column="face_id")
    write_json(out / "gradient_report.json", dict(report.to_dict(), surface=surface))
    _finish(report.converged, f"Gradient m={m:g}: {report.iterations} iterations, "
                              f"relative gap {report.relative_gap:.2e}, max |grad u| {report.max_grad:.6f}")


@cli.command()
@click.argument("surface")
@click.argument("field_csv")
@click.option("--m", "m", type=float, default=None, help="Load parameter of the field")
@click.option("--lambda", "lambdas", type=float, multiple=True, help="Lambda values (repeatable)")
@click.option("--mode", type=click.Choice(["contact_gap", "gradient_threshold"]), default="contact_gap",
              show_default=True, help="Elastic-set definition")
@click.option("--epsilon", type=float, default=None, help="Threshold (default: mesh-dependent)")
@click.option("--basepoint", type=int, default=None, help="Basepoint vertex index")
@output_option
@verbose_option
@reports_errors
def extract(surface, field_csv, m, lambdas, mode, epsilon, basepoint, output, verbose):
    """Extract elastic and lambda-elastic sets of a solution field."""
    setup_logging(verbose)
    setup = setup_surface(surface, basepoint)
    u = read_field_csv(field_csv)
    out = _output_dir(output)
    rows = []
    sets = [(0.0, elastic_set(u, setup.distance, setup.mesh, mode, epsilon, m))]
    sets += [(lam, lambda_elastic_set(u, setup.mesh, lam, epsilon, m)) for lam in lambdas]
    for lam, labeling in sets:
        name = "elastic" if lam == 0.0 else f"elastic_lambda{lam:g}"
        write_field_csv(out / f"{name}.csv", labeling.member)
        row = {"lambda": lam, "count": labeling.count}
        truth = setup.ground_truth(lam)
        if truth is not None and not (truth.is_empty and labeling.is_empty):
            row.update(hausdorff(setup.mesh, labeling, truth).to_dict())
        rows.append(row)
        console.print(f"  lambda={lam:g}: {labeling.count} vertices"
                      + (f", Hausdorff {row['symmetric']:.4f}" if "symmetric" in row else ""))
    write_table_csv(out / "extract.csv", rows, ["lambda", "count", "sup_A_to_B", "sup_B_to_A", "symmetric"])
    console.print(f"[green]✓[/green] Extracted {len(rows)} sets")


@cli.command()
@click.option("--config", "config_path", default=None, help="TOML or YAML configuration file")
@click.option("--surface", default=None, help="Surface spec, e.g. sphere:5 or disk:1:0.02")
@click.option("--m", "ms", type=float, multiple=True, help="m values (repeatable)")
@click.option("--lambda", "lambdas", type=float, multiple=True, help="Lambda values (repeatable)")
@click.option("--basepoint", type=int, default=None, help="Basepoint vertex index")
@click.option("--compare-gradient", is_flag=True, help="Also solve the gradient problem")
@click.option("--parallel", is_flag=True, help="Solve m values independently on workers")
@click.option("--workers", type=int, default=None, help="Number of workers for --parallel")
@click.option("--semiconcavity-samples", type=int, default=None, help="Geodesic samples for C_hat")
@click.option("--seed", type=int, default=None, help="Random seed")
@click.option("--output", "-o", default=None, help="Output directory")
@verbose_option
@reports_errors
def sweep(config_path, surface, ms, lambdas, basepoint, compare_gradient, parallel, workers,
          semiconcavity_samples, seed, output, verbose):
    """Run an m-sweep and write sweep.csv plus run_report.json."""
    setup_logging(verbose)
    data = load_config(config_path) if config_path else {}
    overrides = {
        "surface": {"spec": surface, "basepoint": basepoint},
        "sweep": {"m": list(ms) or None, "lambdas": list(lambdas) or None,
                  "compare_gradient": compare_gradient or None, "parallel": parallel or None,
                  "workers": workers},
        "thresholds": {"semiconcavity_samples": semiconcavity_samples},
        "output": {"directory": output, "seed": seed},
    }
    config = RunConfig.from_mapping(merge_overrides(data, overrides))
    console.print(f"[bold]Sweep:[/bold] {config.surface}, m={config.m}, lambdas={config.lambdas}")

    with Progress(
        SpinnerColumn(),
        TextColumn("[progress.description]{task.description}"),
        BarColumn(),
        TaskProgressColumn(),
        console=console
    ) as progress:
        task = progress.add_task("Sweeping...", total=100)

        def progress_callback(message, percent):
            progress.update(task, completed=percent, description=message)

        result = SweepPipeline(config).run(progress_callback)

    _finish(result.converged, f"{len(result.rows)} rows written to {result.output_dir / 'sweep.csv'}")


@cli.command()
@click.argument("surface")
@click.option("--field", "field_csv", default=None, help="Field CSV (default: exact distance to b)")
@click.option("--samples", type=int, default=500, show_default=True, help="Number of geodesics")
@click.option("--rho", type=float, default=None, help="Exclusion radius around the basepoint")
@click.option("--max-length", type=float, default=None, help="Geodesic length")
@click.option("--seed", type=int, default=0, show_default=True, help="Random seed")
@output_option
@verbose_option
@reports_errors
def semiconcavity(surface, field_csv, samples, rho, max_length, seed, output, verbose):
    """Estimate the semiconcavity constant along sampled geodesics."""
    setup_logging(verbose)
    setup = setup_surface(surface)
    if setup.surface not in SEMICONCAVITY_DEFAULTS:
        raise ValueError(f"geodesic sampling is not available on {surface!r}")
    default_rho, default_length = SEMICONCAVITY_DEFAULTS[setup.surface]
    box = (0.0, 1.0, 0.0, 1.0)
    if setup.is_planar:
        coords = setup.mesh.vertices[:, :2]
        lo, hi = coords.min(axis=0), coords.max(axis=0)
        box = (lo[0], hi[0], lo[1], hi[1])
        default_length = 0.5 * float(np.linalg.norm(hi - lo))
    curves = sample_geodesics(setup.surface, samples, max_length or default_length,
                              rho=default_rho if rho is None else rho, seed=seed, box=box)
    if field_csv:
        evaluator = MeshInterpolator(setup.mesh, read_field_csv(field_csv))
    elif setup.is_planar:
        raise ValueError("planar domains need --field")
    else:
        evaluator = distance_evaluator(setup.surface)
    report = estimate_semiconcavity(evaluator, curves)
    write_json(_output_dir(output) / "semiconcavity.json", report.to_dict())
    console.print(f"[green]✓[/green] C_hat = {report.C_hat:.6f} over {len(curves)} geodesics")


def profile_options(command):
    """Options selecting a built-in or CSV revolution profile."""
    options = [
        click.option("--name", type=click.Choice(["sphere", "dumbbell"]), default="sphere",
                     show_default=True, help="Built-in profile"),
        click.option("--profile-csv", default=None, help="Profile CSV with columns t,r"),
        click.option("--nt", type=int, default=2001, show_default=True, help="Grid nodes"),
        click.option("--neck-r", type=float, default=1e-2, show_default=True, help="Dumbbell neck radius"),
        click.option("--neck-len", type=float, default=1.0, show_default=True, help="Dumbbell neck length"),
        click.option("--bulb-r", type=float, default=1.0, show_default=True, help="Dumbbell bulb radius"),
        click.option("--bulb-len", type=float, default=2.0, show_default=True, help="Dumbbell bulb length"),
    ]
    for option in reversed(options):
        command = option(command)
    return command


def _profile(name, profile_csv, nt, neck_r, neck_len, bulb_r, bulb_len):
    if profile_csv:
        t, r = read_profile_csv(profile_csv)
        return revolution.RevolutionProfile(t, r, name=Path(profile_csv).stem)
    if name == "sphere":
        return revolution.builtin_profiles("sphere", nt=nt)
    return revolution.builtin_profiles("dumbbell", neck_r=neck_r, neck_len=neck_len, bulb_r=bulb_r,
                                       bulb_len=bulb_len, nt=nt)


@cli.group()
def revsurf():
    """Rotation-invariant problems on surfaces of revolution."""
    pass


@revsurf.command("profile")
@profile_options
@output_option
@verbose_option
@reports_errors
def revsurf_profile(name, profile_csv, nt, neck_r, neck_len, bulb_r, bulb_len, output, verbose):
    """Write a profile and its curvature bound."""
    setup_logging(verbose)
    profile = _profile(name, profile_csv, nt, neck_r, neck_len, bulb_r, bulb_len)
    out = _output_dir(output)
    K, diam = revolution.profile_curvature_bound(profile)
    write_profile_csv(out / f"profile_{profile.name}.csv", profile.t, profile.r)
    write_json(out / f"profile_{profile.name}.json",
               {"name": profile.name, "params": profile.params, "length": profile.length,
                "K": K, "diameter": diam, "sufficient_m": sufficient_m(K, diam)})
    console.print(f"[green]✓[/green] Profile {profile.name}: T={profile.length:.4f}, K={K:.4g}, "
                  f"sufficient m={sufficient_m(K, diam):.4g}")


def _write_1d(out: Path, profile, report, stem: str) -> None:
    write_table_csv(out / f"{stem}.csv", [{"t": t, "rho": rho} for t, rho in zip(profile.t, report.rho)],
                    ["t", "rho"])
    write_json(out / f"{stem}.json", dict(report.to_dict(), profile=profile.name, params=profile.params))


@revsurf.command("obstacle")
@profile_options
@click.option("--m", "m", type=float, required=True, help="Load parameter")
@output_option
@verbose_option
@reports_errors
def revsurf_obstacle(name, profile_csv, nt, neck_r, neck_len, bulb_r, bulb_len, m, output, verbose):
    """Solve the one-dimensional obstacle problem rho <= t."""
    setup_logging(verbose)
    profile = _profile(name, profile_csv, nt, neck_r, neck_len, bulb_r, bulb_len)
    report = revolution.solve_obstacle_1d(profile, m)
    _write_1d(_output_dir(output), profile, report, f"obstacle_1d_m{m:g}")
    _finish(report.converged, f"rho(T) = {report.rho[-1]:.6f}, sup |rho'| = {report.sup_gradient:.4f}")


@revsurf.command("gradient")
@profile_options
@click.option("--m", "m", type=float, required=True, help="Load parameter")
@click.option("--max-iter", type=int, default=None, help="Iteration budget")
@output_option
@verbose_option
@reports_errors
def revsurf_gradient(name, profile_csv, nt, neck_r, neck_len, bulb_r, bulb_len, m, max_iter, output, verbose):
    """Solve the one-dimensional problem with |rho'| <= 1."""
    setup_logging(verbose)
    profile = _profile(name, profile_csv, nt, neck_r, neck_len, bulb_r, bulb_len)
    report = revolution.solve_gradient_1d(profile, m, GradientConfig(max_iter=max_iter))
    _write_1d(_output_dir(output), profile, report, f"gradient_1d_m{m:g}")
    _finish(report.converged, f"rho(T) = {report.rho[-1]:.6f}, sup |rho'| = {report.sup_gradient:.4f}")


@revsurf.command("search")
@click.option("--neck-r", "neck_rs", type=float, multiple=True, help="Neck radii (repeatable)")
@click.option("--neck-len", "neck_lens", type=float, multiple=True, help="Neck lengths (repeatable)")
@click.option("--bulb-len", "bulb_lens", type=float, multiple=True, help="Bulb lengths (repeatable)")
@click.option("--m", "ms", type=float, multiple=True, help="m values (repeatable)")
@click.option("--nt", type=int, default=4001, show_default=True, help="Grid nodes per profile")
@click.option("--margin", type=float, default=revolution.DEFAULT_MARGIN, show_default=True,
              help="Witness threshold above slope 1")
@click.option("--min-gap", type=float, default=revolution.WITNESS_GAP, show_default=True,
              help="Smallest obstacle/gradient sup gap of a witness")
@click.option("--sphere-only", is_flag=True, help="Search the sphere profile instead of dumbbells")
@click.option("--require-witness", is_flag=True, help="Exit with code 4 when nothing is found")
@output_option
@verbose_option
@reports_errors
def revsurf_search(neck_rs, neck_lens, bulb_lens, ms, nt, margin, min_gap, sphere_only, require_witness,
                   output, verbose):
    """Search for profiles where the obstacle and gradient problems differ."""
    setup_logging(verbose)
    if sphere_only:
        profiles = [revolution.builtin_profiles("sphere", nt=nt)]
    else:
        grid = dict(revolution.DEFAULT_DUMBBELL_GRID)
        for key, values in (("neck_r", neck_rs), ("neck_len", neck_lens), ("bulb_len", bulb_lens)):
            if values:
                grid[key] = values
        profiles = revolution.dumbbell_family(grid, nt=nt)
    result = revolution.counterexample_search(profiles, ms or revolution.DEFAULT_M_GRID, margin=margin,
                                              min_gap=min_gap, progress=True)
    out = _output_dir(output)
    columns = ["profile", "neck_r", "neck_len", "bulb_r", "bulb_len", "nt", "m", "sup_gradient",
               "converged", "slope_exceeded", "witness", "equivalence_gap"]
    write_table_csv(out / "search.csv", result.records, columns)
    write_json(out / "search.json", {"witnesses": [asdict(w) for w in result.witnesses],
                                     "evaluated": len(result.records)})
    if result.found:
        best = max(result.witnesses, key=lambda w: w.sup_gradient)
        console.print(f"[green]✓[/green] {len(result.witnesses)} witness(es); largest sup |rho'| = "
                      f"{best.sup_gradient:.3f} (m={best.m:g}, gap {best.equivalence_gap:.3g})")
        return
    console.print(f"[yellow]No witness among {len(result.records)} (profile, m) pairs[/yellow]")
    if require_witness:
        sys.exit(EXIT_NO_WITNESS)


@cli.group()
def euclid():
    """Planar domains: torsion solves and medial axes."""
    pass


@euclid.command("build")
@click.argument("shape")
@output_option
@verbose_option
@reports_errors
def euclid_build(shape, output, verbose):
    """Build a disk:R:h or rectangle:L:W:h domain and write it as OFF."""
    setup_logging(verbose)
    domain = load_surface(shape)
    if not isinstance(domain, planar.PlanarDomain):
        raise ValueError(f"{shape!r} is not a planar domain")
    write_off(_output_dir(output) / "domain.off", domain.mesh)
    console.print(f"[green]✓[/green] {domain.mesh.vertex_count} vertices, area {domain.area:.6f}, "
                  f"h={domain.h:.4f}")


@euclid.command("solve")
@click.argument("shape")
@click.option("--m", "m", type=float, required=True, help="Load parameter")
@click.option("--mode", type=click.Choice(["obstacle", "gradient"]), default="obstacle", show_default=True)
@output_option
@verbose_option
@reports_errors
def euclid_solve(shape, m, mode, output, verbose):
    """Solve the torsion problem with zero boundary values."""
    setup_logging(verbose)
    domain = load_surface(shape)
    if not isinstance(domain, planar.PlanarDomain):
        raise ValueError(f"{shape!r} is not a planar domain")
    report = planar.solve_torsion(domain, m, mode)
    out = _output_dir(output)
    d = planar.boundary_distance(domain).values
    write_vtk(out / f"torsion_{mode}.vtk", domain.mesh, {"v": report.u, "d": d})
    write_field_csv(out / f"torsion_{mode}.csv", report.u)
    write_json(out / f"torsion_{mode}.json", dict(report.to_dict(), shape=shape,
                                                  sup_gap=float(np.max(d - report.u))))
    center = int(np.argmin(np.linalg.norm(domain.mesh.vertices[:, :2] - domain.center, axis=1)))
    _finish(report.converged, f"v(center) = {report.u[center]:.6f}, sup gap {np.max(d - report.u):.4g}")


@euclid.command("medial")
@click.argument("shape")
@click.option("--lambda", "lam", type=float, default=0.0, show_default=True, help="Lambda")
@output_option
@verbose_option
@reports_errors
def euclid_medial(shape, lam, output, verbose):
    """Label the exact (lambda-)medial axis on the domain vertices."""
    setup_logging(verbose)
    domain = load_surface(shape)
    if not isinstance(domain, planar.PlanarDomain):
        raise ValueError(f"{shape!r} is not a planar domain")
    labeling = planar.medial_ground_truth(domain, lam)
    radius = planar.projection_radius(domain)
    out = _output_dir(output)
    write_field_csv(out / f"medial_lambda{lam:g}.csv", labeling.member)
    write_vtk(out / f"medial_lambda{lam:g}.vtk", domain.mesh,
              {"medial": labeling.member.astype(float), "projection_radius": radius})
    console.print(f"[green]✓[/green] {labeling.count} vertices on the lambda={lam:g} medial axis")


def main():
    """Entry point for CLI."""
    cli()


if __name__ == "__main__":
    main()
