"""
Example usage of the cutlocus library.
"""

from cutlocus import GradientProblem, GradientSolver, ObstacleProblem, ObstacleSolver, RunConfig, SweepPipeline
from cutlocus.analysis import planar, revolution
from cutlocus.analysis.sets import elastic_set, ground_truth_cut, hausdorff
from cutlocus.core.pipeline import setup_surface


# Example 1: Cut locus of the north pole on the sphere
def example_sphere():
    """Solve once and compare the elastic set with the south pole."""
    setup = setup_surface("sphere:4")
    problem = ObstacleProblem.from_mesh(setup.mesh, setup.distance, m=64.0, nonnegative=True)
    report = ObstacleSolver().solve(problem)

    elastic = elastic_set(report.u, setup.distance, setup.mesh, m=64.0)
    truth = ground_truth_cut(setup.surface, 0.0, mesh=setup.mesh)
    print(f"Converged: {report.converged}, |E| = {elastic.count}")
    print(f"Hausdorff to the cut locus: {hausdorff(setup.mesh, elastic, truth).symmetric:.4f}")

# Example 2: Obstacle and gradient problems side by side
def example_equivalence():
    """Solve both problems on the flat torus."""
    setup = setup_surface("torus:32")
    obstacle = ObstacleSolver().solve(
        ObstacleProblem.from_mesh(setup.mesh, setup.distance, m=20.0, nonnegative=True))
    gradient = GradientSolver().solve(GradientProblem.from_mesh(setup.mesh, m=20.0, basepoint=setup.basepoint))
    print(f"sup |u_obstacle - u_gradient| = {abs(obstacle.u - gradient.u).max():.2e}")

# Example 3: Medial axis sweep of a rectangle
def example_sweep():
    """Run a sweep with lambda rows and write the outputs."""
    config = RunConfig(surface="rectangle:2:1:0.05", m=[10.0, 40.0, 160.0], lambdas=[0.25],
                       directory="rectangle_out")
    result = SweepPipeline(config).run(lambda message, percent: print(f"{percent:5.1f}% {message}"))
    for row in result.rows:
        print(f"m={row['m']:g} lambda={row['lambda']:g} d_H={row['hausdorff_sym']}")

# Example 4: Elastic-plastic torsion of the disk
def example_torsion():
    """Compare the computed torsion function with the closed form."""
    domain = planar.build_domain("disk", R=1.0, h=0.05)
    report = planar.solve_torsion(domain, m=20.0)
    r = abs(domain.mesh.vertices[:, 0] + 1j * domain.mesh.vertices[:, 1])
    exact = planar.disk_torsion(1.0, 20.0, r)
    print(f"max error: {abs(report.u - exact).max():.4f}")

# Example 5: Search surfaces of revolution
def example_search():
    """Look for dumbbells whose obstacle solution is steeper than 1."""
    profiles = revolution.dumbbell_family({"neck_r": [1e-2, 1e-3], "neck_len": [1.0], "bulb_len": [2.0]})
    result = revolution.counterexample_search(profiles, [1e-2, 1e-1, 1.0])
    for witness in result.witnesses:
        print(f"{witness.profile} m={witness.m:g}: sup |rho'| = {witness.sup_gradient:.3f}")


if __name__ == "__main__":
    # Uncomment the example you want to run
    # example_sphere()
    # example_equivalence()
    # example_sweep()
    # example_torsion()
    # example_search()
    pass
