"""
Tests for elastic sets, generalized gradients and cut-locus ground truth.
"""

import unittest

import numpy as np

from cutlocus.analysis.sets import (RegionLabeling, cut_directions, elastic_set, gen_grad_from_directions,
                                    ground_truth_cut, hausdorff, lambda_elastic_set)
from cutlocus.core.geodesic import analytic_distance
from cutlocus.core.obstacle import ObstacleProblem, solve_obstacle
from cutlocus.core.surfaces import FLAT_UNIT_TORUS, SOUTH_POLE, UNIT_SPHERE, flat_torus, icosphere, torus_vertex
from tests.test_mesh import unit_square


class TestGeneralizedGradient(unittest.TestCase):
    """Test the generalized gradient of direction sets."""

    def test_single_direction(self):
        """Test that a single direction gives norm one."""
        self.assertAlmostEqual(gen_grad_from_directions([[1.0, 0.0]]), 1.0, places=9)

    def test_opposite_directions(self):
        """Test that opposite directions cancel."""
        self.assertAlmostEqual(gen_grad_from_directions([[1.0, 0.0], [-1.0, 0.0]]), 0.0, places=9)

    def test_right_angle(self):
        """Test two orthogonal directions."""
        self.assertAlmostEqual(gen_grad_from_directions([[1.0, 0.0], [0.0, 1.0]]), np.sqrt(0.5), places=8)

    def test_balanced_triple(self):
        """Test three directions at 120 degrees."""
        angles = np.array([0.0, 2.0, 4.0]) * np.pi / 3.0
        dirs = np.stack([np.cos(angles), np.sin(angles)], axis=1)

        self.assertAlmostEqual(gen_grad_from_directions(dirs), 0.0, places=9)

    def test_random_pairs(self):
        """Test two directions at angle theta against sqrt((1 + cos theta) / 2)."""
        rng = np.random.default_rng(11)
        for a, b in rng.uniform(0.0, 2.0 * np.pi, size=(100, 2)):
            dirs = np.array([[np.cos(a), np.sin(a)], [np.cos(b), np.sin(b)]])
            expected = np.sqrt(max(0.0, (1.0 + float(dirs[0] @ dirs[1])) / 2.0))

            self.assertAlmostEqual(gen_grad_from_directions(dirs), expected, delta=1e-6)

    def test_added_direction_never_increases(self):
        """Test that enlarging a direction set never raises the value."""
        rng = np.random.default_rng(12)
        for _ in range(1000):
            angles = rng.uniform(0.0, 2.0 * np.pi, size=rng.integers(1, 5) + 1)
            dirs = np.stack([np.cos(angles), np.sin(angles)], axis=1)

            self.assertLessEqual(gen_grad_from_directions(dirs), gen_grad_from_directions(dirs[:-1]) + 1e-9)

    def test_invalid_input(self):
        """Test input validation."""
        with self.assertRaises(ValueError):
            gen_grad_from_directions(np.zeros((0, 2)))
        with self.assertRaises(ValueError):
            gen_grad_from_directions([[2.0, 0.0]])


class TestCutDirections(unittest.TestCase):
    """Test minimizing geodesic directions on the model surfaces."""

    def test_sphere(self):
        """Test the antipode and a regular point."""
        dirs, dist = cut_directions(UNIT_SPHERE, [0.0, 0.0, -1.0])
        self.assertEqual(len(dirs), 64)
        self.assertAlmostEqual(dist, np.pi)

        dirs, dist = cut_directions(UNIT_SPHERE, [1.0, 0.0, 0.0])
        self.assertEqual(len(dirs), 1)
        self.assertAlmostEqual(dist, np.pi / 2)

    def test_torus(self):
        """Test the torus cut points."""
        dirs, dist = cut_directions(FLAT_UNIT_TORUS, [0.5, 0.5])
        self.assertEqual(len(dirs), 4)
        self.assertAlmostEqual(dist, np.sqrt(0.5))

        self.assertEqual(len(cut_directions(FLAT_UNIT_TORUS, [0.5, 0.25])[0]), 2)
        self.assertEqual(len(cut_directions(FLAT_UNIT_TORUS, [0.25, 0.375])[0]), 1)

    def test_unknown_surface(self):
        """Test surface validation."""
        with self.assertRaises(ValueError):
            cut_directions("planar", [0.0, 0.0])


class TestGroundTruth(unittest.TestCase):
    """Test exact cut-locus labeling."""

    def test_sphere_cut_locus(self):
        """Test that the cut locus of the north pole is the south pole."""
        mesh = icosphere(2)
        truth = ground_truth_cut(UNIT_SPHERE, 0.0, mesh=mesh)

        self.assertEqual(truth.indices.tolist(), [SOUTH_POLE])
        self.assertEqual(ground_truth_cut(UNIT_SPHERE, 1.0, mesh=mesh).indices.tolist(), [SOUTH_POLE])

    def test_torus_cut_locus(self):
        """Test the torus cut locus and its lambda-subsets."""
        mesh = flat_torus(8)
        truth = ground_truth_cut(FLAT_UNIT_TORUS, 0.0, mesh=mesh)
        i, j = (mesh.params * 8).round().astype(int).T

        np.testing.assert_array_equal(truth.member, (i == 4) | (j == 4))
        self.assertEqual(truth.count, 15)
        self.assertEqual(ground_truth_cut(FLAT_UNIT_TORUS, 0.4, mesh=mesh).count, 15)
        self.assertEqual(ground_truth_cut(FLAT_UNIT_TORUS, 0.6, mesh=mesh).indices.tolist(), [36])

    def test_validation(self):
        """Test argument validation."""
        with self.assertRaises(ValueError):
            ground_truth_cut(UNIT_SPHERE, -0.1, mesh=icosphere(1))
        with self.assertRaises(ValueError):
            ground_truth_cut(UNIT_SPHERE, 0.0)
        with self.assertRaises(ValueError):
            RegionLabeling(np.zeros(3), "unknown")


class TestElasticSets(unittest.TestCase):
    """Test elastic-set extraction."""

    def setUp(self):
        self.mesh = unit_square(4)
        self.x = self.mesh.vertices[:, 0]

    def test_contact_gap(self):
        """Test the contact-gap definition."""
        d = np.ones(self.mesh.vertex_count)
        u = d.copy()
        u[7] = 0.5
        labeling = elastic_set(u, d, self.mesh, "contact_gap", epsilon=0.1)

        self.assertEqual(labeling.indices.tolist(), [7])
        self.assertEqual(labeling.definition, "contact_gap")

    def test_gradient_threshold(self):
        """Test the gradient-threshold definition."""
        labeling = elastic_set(0.5 * self.x, self.x, self.mesh, "gradient_threshold", epsilon=0.1)
        self.assertEqual(labeling.count, self.mesh.vertex_count)

        labeling = elastic_set(self.x, self.x, self.mesh, "gradient_threshold", epsilon=0.1)
        self.assertTrue(labeling.is_empty)

    def test_unknown_mode(self):
        """Test mode validation."""
        with self.assertRaises(ValueError):
            elastic_set(self.x, self.x, self.mesh, "curvature")

    def test_lambda_set(self):
        """Test the lambda-elastic set."""
        labeling = lambda_elastic_set(0.5 * self.x + 1.0, self.mesh, 0.1, epsilon=0.0)
        self.assertEqual(labeling.count, self.mesh.vertex_count)
        self.assertEqual(labeling.definition, "lambda_set")

        below = lambda_elastic_set(np.full(self.mesh.vertex_count, 0.05), self.mesh, 0.1)
        self.assertTrue(below.is_empty)

        with self.assertRaises(ValueError):
            lambda_elastic_set(self.x, self.mesh, 0.0)

    def test_torus_lambda_sets_track_cut_locus(self):
        """Test lambda sets of a torus solve against the cross and the corner."""
        mesh = flat_torus(32)
        d = analytic_distance(FLAT_UNIT_TORUS, mesh.params[0], mesh.params)
        u = solve_obstacle(ObstacleProblem.from_mesh(mesh, d, 64.0, nonnegative=True)).u
        h = mesh.max_edge_length

        truth = ground_truth_cut(FLAT_UNIT_TORUS, 0.3, mesh=mesh)
        cross = hausdorff(mesh, lambda_elastic_set(u, mesh, 0.3, m=64.0), truth)
        self.assertLessEqual(cross.sup_A_to_B, 2.5 * h)
        self.assertLessEqual(cross.sup_B_to_A, 2.5 * h)

        corner = ground_truth_cut(FLAT_UNIT_TORUS, 0.6, mesh=mesh)
        self.assertEqual(corner.indices.tolist(), [torus_vertex(32, 0.5, 0.5)])
        labeling = lambda_elastic_set(u, mesh, 0.6, m=64.0)
        self.assertTrue(labeling.member[torus_vertex(32, 0.5, 0.5)])
        self.assertLessEqual(hausdorff(mesh, labeling, corner).sup_A_to_B, 3.5 * h)

    def test_rows(self):
        """Test the vertex_id/value rows of a labeling."""
        labeling = RegionLabeling(np.array([True, False, True]), "ground_truth")

        self.assertEqual(labeling.to_rows(), [(0, 1), (1, 0), (2, 1)])
        self.assertEqual(labeling.indices.tolist(), [0, 2])


class TestHausdorff(unittest.TestCase):
    """Test geodesic Hausdorff distances."""

    def setUp(self):
        self.mesh = flat_torus(8)

    def label(self, indices):
        member = np.zeros(self.mesh.vertex_count, dtype=bool)
        member[indices] = True
        return RegionLabeling(member, "ground_truth")

    def test_nested_sets(self):
        """Test one-sided distances of nested sets."""
        report = hausdorff(self.mesh, self.label([0]), self.label([0, 36]))

        self.assertEqual(report.sup_A_to_B, 0.0)
        self.assertAlmostEqual(report.sup_B_to_A, np.sqrt(0.5), delta=0.05)
        self.assertEqual(report.symmetric, report.sup_B_to_A)

    def test_lambda_plus_epsilon_nested(self):
        """Test that the exact set at lambda + 0.05 lies inside the set at lambda."""
        for lam in (0.4, 0.55):
            truth = ground_truth_cut(FLAT_UNIT_TORUS, lam, mesh=self.mesh)
            shifted = ground_truth_cut(FLAT_UNIT_TORUS, lam + 0.05, mesh=self.mesh)

            self.assertTrue(np.all(truth.member[shifted.member]))
            self.assertEqual(hausdorff(self.mesh, shifted, truth).sup_A_to_B, 0.0)

    def test_empty_sets(self):
        """Test the conventions for empty sets."""
        report = hausdorff(self.mesh, self.label([]), self.label([0]))
        self.assertEqual(report.sup_A_to_B, 0.0)
        self.assertEqual(report.sup_B_to_A, np.inf)
        self.assertTrue(np.isnan(report.symmetric))

        with self.assertRaises(ValueError):
            hausdorff(self.mesh, self.label([]), self.label([]))


if __name__ == '__main__':
    unittest.main()
