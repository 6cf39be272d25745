"""
Tests for piecewise-linear interpolation.
"""

import unittest

import numpy as np

from cutlocus.core.interpolate import MeshInterpolator
from cutlocus.core.surfaces import flat_torus, icosphere
from tests.test_mesh import unit_square


class TestPlanarInterpolation(unittest.TestCase):
    """Test interpolation on planar meshes."""

    def setUp(self):
        self.mesh = unit_square(5)
        x, y = self.mesh.vertices[:, 0], self.mesh.vertices[:, 1]
        self.interp = MeshInterpolator(self.mesh, 2.0 * x + 3.0 * y)

    def test_linear_field_exact(self):
        """Test that linear fields are reproduced."""
        rng = np.random.default_rng(1)
        points = rng.uniform(0.0, 1.0, (200, 2))

        np.testing.assert_allclose(self.interp(points), 2.0 * points[:, 0] + 3.0 * points[:, 1], atol=1e-10)

    def test_vertices(self):
        """Test evaluation at the vertices."""
        np.testing.assert_allclose(self.interp(self.mesh.vertices), self.interp.values, atol=1e-12)

    def test_outside_is_nan(self):
        """Test that points outside the domain are NaN."""
        values = self.interp(np.array([[1.5, 0.5], [0.5, 0.5]]))

        self.assertTrue(np.isnan(values[0]))
        self.assertAlmostEqual(float(values[1]), 2.5)

    def test_min_chord(self):
        """Test the chord length floor."""
        self.assertAlmostEqual(self.interp.min_chord, 2.0 * self.mesh.max_edge_length)

    def test_bind(self):
        """Test binding a second field."""
        other = self.interp.bind(np.ones(self.mesh.vertex_count))

        self.assertAlmostEqual(float(other(np.array([0.3, 0.7]))[0]), 1.0)
        self.assertAlmostEqual(float(self.interp(np.array([0.3, 0.7]))[0]), 2.7)

    def test_field_checks(self):
        """Test field validation."""
        with self.assertRaises(ValueError):
            MeshInterpolator(self.mesh, np.zeros(3))
        with self.assertRaises(ValueError):
            MeshInterpolator(self.mesh)(np.array([[0.5, 0.5]]))


class TestSurfaceInterpolation(unittest.TestCase):
    """Test interpolation on closed model surfaces."""

    def test_torus_wraps(self):
        """Test periodic lookup on the flat torus."""
        mesh = flat_torus(16)
        interp = MeshInterpolator(mesh, mesh.params[:, 0])
        values = interp(np.array([[0.3, 0.4], [1.3, -0.6]]))

        np.testing.assert_allclose(values, [0.3, 0.3], atol=1e-10)

    def test_sphere_height(self):
        """Test interpolation of the height function on the sphere."""
        mesh = icosphere(3)
        interp = MeshInterpolator(mesh, mesh.vertices[:, 2])
        rng = np.random.default_rng(2)
        points = rng.standard_normal((100, 3))
        points /= np.linalg.norm(points, axis=1, keepdims=True)

        values = interp(points)
        self.assertFalse(np.any(np.isnan(values)))
        self.assertLess(float(np.max(np.abs(values - points[:, 2]))), 0.05)


if __name__ == '__main__':
    unittest.main()
