"""
Tests for the sweep pipeline and its configuration.
"""

import json
import tempfile
import unittest
from pathlib import Path
from unittest.mock import patch

import numpy as np

from cutlocus.analysis.planar import PlanarDomain
from cutlocus.core.pipeline import RunConfig, SweepPipeline, load_surface, run_sweep, setup_surface
from cutlocus.core.surfaces import FLAT_UNIT_TORUS, PLANAR, UNIT_SPHERE
from cutlocus.utils.io import read_sweep_csv, write_off
from tests.test_mesh import unit_square


class TestRunConfig(unittest.TestCase):
    """Test RunConfig dataclass."""

    def test_default_config(self):
        """Test default configuration values."""
        config = RunConfig()

        self.assertEqual(config.surface, "sphere:4")
        self.assertEqual(config.m, [8.0, 16.0, 32.0])
        self.assertEqual(config.lambdas, [])
        self.assertFalse(config.compare_gradient)
        self.assertEqual(config.obstacle_config().omega, 1.5)
        self.assertEqual(config.gradient_config().tol_gap, 1e-7)

    def test_invalid_values(self):
        """Test rejected configurations."""
        for kwargs in ({"m": []}, {"m": [2.0, 1.0]}, {"m": [0.0, 1.0]}, {"m": [1.0, float("inf")]},
                       {"lambdas": [-0.1]}, {"workers": 0}, {"semiconcavity_samples": -1},
                       {"lambda_shift": 0.0}):
            with self.subTest(kwargs=kwargs):
                with self.assertRaises(ValueError):
                    RunConfig(**kwargs)

    def test_from_mapping(self):
        """Test building from configuration sections."""
        config = RunConfig.from_mapping({"surface": {"spec": "torus:8"}, "sweep": {"m": [1, 2], "lambdas": [0.2]},
                                         "output": {"seed": 4}})

        self.assertEqual(config.surface, "torus:8")
        self.assertEqual(config.m, [1.0, 2.0])
        self.assertEqual(config.lambdas, [0.2])
        self.assertEqual(config.seed, 4)

    def test_from_mapping_unknown_key(self):
        """Test that unknown keys are rejected."""
        with self.assertRaises(ValueError):
            RunConfig.from_mapping({"sweep": {"speed": 2}})


class TestSurfaces(unittest.TestCase):
    """Test surface specs."""

    def test_load_specs(self):
        """Test the built-in surface specs."""
        self.assertEqual(load_surface("sphere:1").vertex_count, 42)
        self.assertEqual(load_surface("torus:8").vertex_count, 64)
        self.assertIsInstance(load_surface("rectangle:2:1:0.25"), PlanarDomain)
        self.assertIsInstance(load_surface("disk:1:0.25"), PlanarDomain)

    def test_bad_specs(self):
        """Test unknown and malformed specs."""
        for spec in ("cube", "disk:1", "rectangle:a:1:0.1"):
            with self.subTest(spec=spec):
                with self.assertRaises(ValueError):
                    load_surface(spec)
        with self.assertRaises(FileNotFoundError):
            load_surface("missing.off")

    def test_setup_torus(self):
        """Test the exact torus obstacle."""
        setup = setup_surface("torus:8")

        self.assertEqual(setup.surface, FLAT_UNIT_TORUS)
        self.assertEqual(setup.basepoint, 0)
        self.assertEqual(setup.distance[0], 0.0)
        self.assertAlmostEqual(setup.distance.max(), np.sqrt(0.5))
        self.assertTrue(setup.has_ground_truth)
        self.assertFalse(setup.is_planar)

    def test_setup_sphere_basepoint(self):
        """Test basepoint selection on the sphere."""
        setup = setup_surface("sphere:1", basepoint_coords=[0.0, 0.0, -1.0])

        self.assertEqual(setup.surface, UNIT_SPHERE)
        self.assertEqual(setup.basepoint, 11)
        self.assertAlmostEqual(setup.distance[0], np.pi)
        self.assertFalse(setup.has_ground_truth)
        with self.assertRaises(ValueError):
            setup_surface("sphere:1", basepoint=500)

    def test_setup_planar(self):
        """Test the boundary distance obstacle."""
        setup = setup_surface("rectangle:2:1:0.25")

        self.assertEqual(setup.surface, PLANAR)
        self.assertTrue(setup.is_planar)
        self.assertAlmostEqual(setup.distance.max(), 0.5)
        self.assertEqual(setup.distance.min(), 0.0)


class TestSweepPipeline(unittest.TestCase):
    """Test SweepPipeline runs."""

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.dir = Path(self.tmp.name)

    def tearDown(self):
        self.tmp.cleanup()

    def test_pipeline_initialization(self):
        """Test pipeline initialization."""
        self.assertEqual(SweepPipeline().config.surface, "sphere:4")

    def test_rectangle_sweep(self):
        """Test a planar sweep with lambda rows and outputs."""
        config = RunConfig(surface="rectangle:2:1:0.25", m=[10.0, 40.0], lambdas=[0.1],
                           semiconcavity_samples=3, directory=str(self.dir))
        messages = []
        result = run_sweep(config, lambda message, percent: messages.append((message, percent)))

        self.assertTrue(result.converged)
        self.assertEqual(len(result.rows), 4)
        self.assertEqual([row["lambda"] for row in result.rows], [0.0, 0.1, 0.0, 0.1])
        self.assertTrue(all(row["hausdorff_sym"] is not None for row in result.rows))
        self.assertEqual([row["hausdorff_shifted"] is None for row in result.rows], [True, False, True, False])
        self.assertIsNotNone(result.rows[0]["C_hat"])
        self.assertLessEqual(result.reports[1]["monotonicity_violation"], 1e-6)
        self.assertEqual(messages[-1], ("Complete", 100))

        rows = read_sweep_csv(self.dir / "sweep.csv")
        self.assertEqual(len(rows), 4)
        self.assertEqual(rows[2]["m"], 40.0)
        self.assertTrue(rows[0]["converged"])
        for name in ("fields_m10.vtk", "u_m10.csv", "elastic_m40.csv"):
            self.assertTrue((self.dir / name).exists(), name)

        report = json.loads((self.dir / "run_report.json").read_text())
        self.assertEqual(report["events"][-1]["event"], "complete")
        self.assertIn("sweep.csv", report["artifacts"])
        for artifact in report["artifacts"]:
            self.assertTrue((self.dir / artifact).exists(), artifact)

    def test_sweep_deterministic(self):
        """Test that a repeated run writes an identical table."""
        tables = []
        for name in ("first", "second"):
            out = self.dir / name
            run_sweep(RunConfig(surface="rectangle:2:1:0.25", m=[10.0, 20.0], lambdas=[0.2],
                                semiconcavity_samples=4, seed=7, write_fields=False, directory=str(out)))
            tables.append((out / "sweep.csv").read_text())

        self.assertEqual(tables[0], tables[1])

    def test_sphere_sweep_gap_shrinks(self):
        """Test that the obstacle gap falls as m grows."""
        config = RunConfig(surface="sphere:1", m=[4.0, 64.0], write_fields=False, directory=str(self.dir))
        result = SweepPipeline(config).run()

        self.assertTrue(result.converged)
        self.assertLess(result.rows[1]["sup_gap"], result.rows[0]["sup_gap"])
        self.assertIsNotNone(result.rows[0]["hausdorff_sym"])
        self.assertFalse((self.dir / "u_m4.csv").exists())

    def test_sphere_hausdorff_decreases(self):
        """Test that the elastic set closes in on the antipode as m grows."""
        config = RunConfig(surface="sphere:3", m=[4.0, 8.0, 16.0, 32.0], contact_epsilon=1e-6,
                           write_fields=False, directory=str(self.dir))
        result = run_sweep(config)
        h = load_surface("sphere:3").max_edge_length
        distances = [row["hausdorff_sym"] for row in result.rows]

        self.assertTrue(result.converged)
        for earlier, later in zip(distances, distances[1:]):
            self.assertLessEqual(later, earlier + h)
        self.assertLess(distances[-1], distances[0])
        self.assertLessEqual(distances[-1], 0.125 + 2.0 * h)
        self.assertTrue(all(row["hausdorff_GT_to_E"] == 0.0 for row in result.rows))

    def test_rectangle_lambda_medial_axis(self):
        """Test both one-sided distances and the shifted check at lambda = 0.2."""
        config = RunConfig(surface="rectangle:2:1:0.1", m=[128.0], lambdas=[0.2], write_fields=False,
                           directory=str(self.dir))
        result = run_sweep(config)
        h = load_surface("rectangle:2:1:0.1").mesh.max_edge_length
        row = result.rows[1]

        self.assertEqual(row["lambda"], 0.2)
        self.assertLessEqual(row["hausdorff_E_to_GT"], 4.0 * h)
        self.assertLessEqual(row["hausdorff_GT_to_E"], 4.0 * h)
        self.assertLessEqual(row["hausdorff_shifted"], 4.0 * h)
        self.assertLessEqual(row["hausdorff_shifted"], row["hausdorff_GT_to_E"] + 1e-12)
        self.assertEqual(read_sweep_csv(self.dir / "sweep.csv")[1]["hausdorff_shifted"], row["hausdorff_shifted"])

    def test_parallel_matches_serial(self):
        """Test that worker solves agree with warm-started serial solves."""
        serial = run_sweep(RunConfig(surface="rectangle:2:1:0.25", m=[5.0, 20.0], write_fields=False,
                                     directory=str(self.dir / "serial")))
        parallel = run_sweep(RunConfig(surface="rectangle:2:1:0.25", m=[5.0, 20.0], write_fields=False,
                                       parallel=True, workers=2, directory=str(self.dir / "parallel")))

        for a, b in zip(serial.rows, parallel.rows):
            self.assertEqual(a["m"], b["m"])
            self.assertAlmostEqual(a["sup_gap"], b["sup_gap"], places=5)

    def test_failed_solve_keeps_finished_rows(self):
        """Test that a failing m leaves the earlier rows and an error event on disk."""
        for parallel in (False, True):
            with self.subTest(parallel=parallel):
                out = self.dir / ("parallel" if parallel else "serial")
                pipeline = SweepPipeline(RunConfig(surface="rectangle:2:1:0.25", m=[5.0, 20.0], parallel=parallel,
                                                   write_fields=False, directory=str(out)))
                solve_one = pipeline.solve_one

                def failing(setup, m, initial=None):
                    if m == 20.0:
                        raise ValueError("reduced system is singular")
                    return solve_one(setup, m, initial=initial)

                with patch.object(pipeline, "solve_one", side_effect=failing):
                    with self.assertRaises(ValueError):
                        pipeline.run()

                self.assertEqual([row["m"] for row in read_sweep_csv(out / "sweep.csv")], [5.0])
                report = json.loads((out / "run_report.json").read_text())
                self.assertEqual(report["events"][-1]["event"], "error")
                self.assertIn("singular", report["events"][-1]["error"])

    def test_compare_gradient(self):
        """Test the gradient comparison columns of the report."""
        config = RunConfig(surface="rectangle:2:1:0.25", m=[10.0], compare_gradient=True, tol_feas=1e-3,
                           tol_gap=1e-3, write_fields=False, directory=str(self.dir))
        result = run_sweep(config)

        self.assertIn("gradient", result.reports[0])
        self.assertTrue(np.isfinite(result.reports[0]["equivalence_gap"]))

    def test_external_domain_has_no_ground_truth(self):
        """Test a planar mesh file without a known medial axis."""
        path = write_off(self.dir / "square.off", unit_square(4))
        config = RunConfig(surface=str(path), m=[10.0], write_fields=False, directory=str(self.dir / "out"))
        result = run_sweep(config)

        self.assertIsNone(result.rows[0]["hausdorff_sym"])
        self.assertEqual(result.rows[0]["lambda"], 0.0)


if __name__ == '__main__':
    unittest.main()
