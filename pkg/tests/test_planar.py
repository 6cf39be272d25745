"""
Tests for planar domains, torsion solves and medial-axis ground truth.
"""

import unittest

import numpy as np

from cutlocus.analysis.planar import (boundary_distance, build_domain, disk_torsion, medial_ground_truth,
                                      projection_radius, solve_torsion)
from cutlocus.core.gradient import GradientConfig
from tests.test_mesh import unit_square


class TestBuildDomain(unittest.TestCase):
    """Test domain construction."""

    def test_disk(self):
        """Test the disk mesh."""
        domain = build_domain("disk", R=1.0, h=0.2)
        mesh = domain.mesh

        self.assertLessEqual(mesh.max_edge_length, 0.2)
        self.assertEqual(len(domain.loops), 1)
        self.assertAlmostEqual(domain.area, np.pi, delta=0.05 * np.pi)
        np.testing.assert_allclose(mesh.vertices[0], [0.0, 0.0])
        radii = np.linalg.norm(mesh.vertices[mesh.boundary], axis=1)
        np.testing.assert_allclose(radii, 1.0)
        self.assertEqual(mesh.euler_characteristic, 1)

    def test_disk_too_coarse(self):
        """Test that fewer than eight boundary vertices are rejected."""
        with self.assertRaises(ValueError):
            build_domain("disk", R=1.0, h=10.0)

    def test_rectangle(self):
        """Test the rectangle grid."""
        domain = build_domain("rectangle", L=2.0, W=1.0, h=0.2)
        mesh = domain.mesh

        self.assertEqual(mesh.vertex_count, 17 * 9)
        self.assertEqual(len(mesh.boundary_vertices), 48)
        self.assertAlmostEqual(domain.area, 2.0)
        np.testing.assert_allclose(domain.center, [1.0, 0.5])
        self.assertLessEqual(mesh.max_edge_length, 0.2)

    def test_invalid(self):
        """Test parameter validation."""
        with self.assertRaises(ValueError):
            build_domain("ellipse", h=0.1)
        with self.assertRaises(ValueError):
            build_domain("rectangle", L=-1.0, W=1.0, h=0.1)

    def test_external_mesh(self):
        """Test wrapping an external planar mesh."""
        domain = build_domain(unit_square(4))

        self.assertIsNone(domain.shape)
        self.assertEqual(len(domain.loops), 1)
        with self.assertRaises(ValueError):
            medial_ground_truth(domain)


class TestBoundaryDistance(unittest.TestCase):
    """Test the exact boundary distance."""

    def test_rectangle(self):
        """Test that the rectangle distance is the nearest side."""
        domain = build_domain("rectangle", L=2.0, W=1.0, h=0.2)
        x, y = domain.mesh.vertices[:, 0], domain.mesh.vertices[:, 1]
        field = boundary_distance(domain)

        expected = np.minimum(np.minimum(x, 2.0 - x), np.minimum(y, 1.0 - y))
        np.testing.assert_allclose(field.values, expected, atol=1e-12)

    def test_disk(self):
        """Test the disk distance against R - r."""
        domain = build_domain("disk", R=1.0, h=0.1)
        r = np.linalg.norm(domain.mesh.vertices, axis=1)
        field = boundary_distance(domain)

        np.testing.assert_allclose(field.values, 1.0 - r, atol=0.01)
        np.testing.assert_array_equal(field.values[domain.mesh.boundary], 0.0)


class TestTorsion(unittest.TestCase):
    """Test the elastic-plastic torsion problem."""

    def test_disk_closed_form(self):
        """Test the closed-form radial solution."""
        self.assertAlmostEqual(float(disk_torsion(1.0, 2.0, 0.0)), 0.25)
        self.assertAlmostEqual(float(disk_torsion(1.0, 20.0, 0.0)), 0.9)
        self.assertAlmostEqual(1.0 - float(disk_torsion(1.0, 20.0, 0.0)), 2.0 / 20.0)
        np.testing.assert_allclose(disk_torsion(1.0, 20.0, [0.5, 1.0]), [0.5, 0.0])

    def test_disk_obstacle_solve(self):
        """Test the discrete solve against the closed form."""
        domain = build_domain("disk", R=1.0, h=0.1)
        report = solve_torsion(domain, 20.0)

        self.assertTrue(report.converged)
        r = np.linalg.norm(domain.mesh.vertices, axis=1)
        np.testing.assert_allclose(report.u, disk_torsion(1.0, 20.0, r), atol=0.05)
        np.testing.assert_allclose(report.u[domain.mesh.boundary], 0.0)

    def test_disk_gap_rate(self):
        """Test that the sup gap to the boundary distance is 2 / m."""
        domain = build_domain("disk", R=1.0, h=0.05)
        d = boundary_distance(domain).values
        gaps = []
        for m in (8.0, 16.0):
            report = solve_torsion(domain, m)
            self.assertTrue(report.converged)
            gaps.append(float(np.max(d - report.u)))

        for m, gap in zip((8.0, 16.0), gaps):
            self.assertGreaterEqual(gap * m, 1.8)
            self.assertLessEqual(gap * m, 2.2)
        self.assertAlmostEqual(np.log(gaps[1] / gaps[0]) / np.log(2.0), -1.0, delta=0.15)

    def test_disk_gradient_solve(self):
        """Test the gradient mode on a coarse disk."""
        domain = build_domain("disk", R=1.0, h=0.25)
        config = GradientConfig(tol_feas=1e-3, tol_gap=1e-3, max_iter=20000)
        report = solve_torsion(domain, 20.0, "gradient", config)

        self.assertLessEqual(report.max_grad, 1.0 + 1e-9)
        self.assertAlmostEqual(float(report.u[0]), 0.9, delta=0.15)

    def test_invalid(self):
        """Test argument validation."""
        domain = build_domain("disk", R=1.0, h=0.5)
        with self.assertRaises(ValueError):
            solve_torsion(domain, 0.0)
        with self.assertRaises(ValueError):
            solve_torsion(domain, 1.0, "penalty")


class TestMedialGroundTruth(unittest.TestCase):
    """Test the exact medial axis of the built-in shapes."""

    def setUp(self):
        self.shape = ("rectangle", {"L": 2.0, "W": 1.0})

    def test_rectangle_mesh_vertices(self):
        """Test the medial axis on the rectangle grid."""
        domain = build_domain("rectangle", L=2.0, W=1.0, h=0.2)
        truth = medial_ground_truth(domain)

        self.assertEqual(truth.count, 25)
        vertices = domain.mesh.vertices
        self.assertTrue(np.all(truth.member[(np.abs(vertices[:, 1] - 0.5) < 1e-12)
                                            & (vertices[:, 0] >= 0.5) & (vertices[:, 0] <= 1.5)]))

    def test_central_segment_lambda(self):
        """Test that the central segment survives up to lambda = W / 2."""
        point = [[1.0, 0.5]]

        self.assertTrue(medial_ground_truth(self.shape, 0.4, point).member[0])
        self.assertTrue(medial_ground_truth(self.shape, 0.5, point).member[0])
        self.assertFalse(medial_ground_truth(self.shape, 0.6, point).member[0])

    def test_corner_branch_lambda(self):
        """Test the lambda threshold on a corner branch."""
        points = [[0.2, 0.2], [0.125, 0.125]]
        truth = medial_ground_truth(self.shape, 0.1, points)

        self.assertEqual(truth.member.tolist(), [True, False])

    def test_corners_only_without_lambda(self):
        """Test that corners belong to the closed medial axis only."""
        corner = [[0.0, 0.0]]

        self.assertTrue(medial_ground_truth(self.shape, 0.0, corner).member[0])
        self.assertFalse(medial_ground_truth(self.shape, 0.1, corner).member[0])
        self.assertFalse(medial_ground_truth(self.shape, 0.0, [[1.0, 0.0]]).member[0])

    def test_disk_center(self):
        """Test that the disk medial axis is its center."""
        domain = build_domain("disk", R=1.0, h=0.2)
        truth = medial_ground_truth(domain, 0.5)

        self.assertEqual(truth.indices.tolist(), [0])

    def test_validation(self):
        """Test argument validation."""
        with self.assertRaises(ValueError):
            medial_ground_truth(self.shape, -0.1, [[1.0, 0.5]])
        with self.assertRaises(ValueError):
            medial_ground_truth(("rectangle", {"L": 1.0, "W": 2.0}), 0.0, [[0.5, 0.5]])
        with self.assertRaises(ValueError):
            medial_ground_truth(self.shape)


class TestProjectionRadius(unittest.TestCase):
    """Test the radius of the projection set."""

    def test_rectangle(self):
        """Test radii on the rectangle."""
        points = [[0.5, 0.5], [1.0, 0.5], [0.2, 0.2], [1.0, 0.2]]
        radii = projection_radius(("rectangle", {"L": 2.0, "W": 1.0}), points)

        np.testing.assert_allclose(radii, [0.5, 0.5, 0.2 / np.sqrt(2.0), 0.0], atol=1e-12)

    def test_disk_center(self):
        """Test that the disk center has radius R."""
        radii = projection_radius(("disk", {"R": 2.0}), [[0.0, 0.0], [1.0, 0.0]])

        np.testing.assert_allclose(radii, [2.0, 0.0])


if __name__ == '__main__':
    unittest.main()
