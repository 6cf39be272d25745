"""
Tests for geodesic sampling and semiconcavity estimates.
"""

import math
import unittest

import numpy as np

from cutlocus.analysis.semiconcavity import (GeodesicSample, distance_evaluator, estimate_semiconcavity,
                                             sample_geodesics)
from cutlocus.core.surfaces import FLAT_UNIT_TORUS, PLANAR, UNIT_SPHERE


def squared_norm(points):
    return np.sum(np.atleast_2d(points) ** 2, axis=1)


class TestSampleGeodesics(unittest.TestCase):
    """Test geodesic sampling."""

    def test_sphere_samples_avoid_ball(self):
        """Test that sphere samples stay outside the exclusion ball."""
        rho = math.pi / 4
        samples = sample_geodesics(UNIT_SPHERE, 20, math.pi, rho=rho, seed=3)

        self.assertEqual(len(samples), 20)
        for sample in samples:
            self.assertLessEqual(sample.length, math.pi)
            self.assertGreater(sample.length, 0.0)
            self.assertGreaterEqual(float(sample.distance_to_base(sample.points()).min()), rho - 2e-3)
            self.assertLess(sample.check_unit_speed(), 1e-6)

    def test_seed_reproducible(self):
        """Test that the seed fixes the sample."""
        first = sample_geodesics(FLAT_UNIT_TORUS, 5, 0.5, rho=0.1, seed=7)
        second = sample_geodesics(FLAT_UNIT_TORUS, 5, 0.5, rho=0.1, seed=7)

        for a, b in zip(first, second):
            np.testing.assert_array_equal(a.origin, b.origin)
            self.assertEqual(a.stop, b.stop)

    def test_torus_points_wrap(self):
        """Test that torus curves stay in the unit square."""
        sample = GeodesicSample(FLAT_UNIT_TORUS, np.array([0.9, 0.5]), np.array([1.0, 0.0]), 0.0, 0.5)

        points = sample.points(11)
        self.assertTrue(np.all((points >= 0.0) & (points < 1.0)))
        self.assertAlmostEqual(float(points[-1, 0]), 0.4)

    def test_planar_box(self):
        """Test that planar samples start in the box."""
        samples = sample_geodesics(PLANAR, 10, 0.2, seed=1, box=(2.0, 3.0, -1.0, 0.0))

        for sample in samples:
            self.assertTrue(2.0 <= sample.origin[0] <= 3.0)
            self.assertTrue(-1.0 <= sample.origin[1] <= 0.0)

    def test_invalid_arguments(self):
        """Test argument validation."""
        with self.assertRaises(ValueError):
            sample_geodesics("hyperbolic", 5, 1.0)
        with self.assertRaises(ValueError):
            sample_geodesics(UNIT_SPHERE, 0, 1.0)
        with self.assertRaises(ValueError):
            sample_geodesics(FLAT_UNIT_TORUS, 2, 0.5, rho=1.0)


class TestEstimate(unittest.TestCase):
    """Test the chord-quotient estimate."""

    def test_quadratic_in_plane(self):
        """Test that |x|^2 has constant one."""
        samples = sample_geodesics(PLANAR, 10, 1.0, seed=2)
        report = estimate_semiconcavity(squared_norm, samples)

        self.assertAlmostEqual(report.C_hat, 1.0, places=8)
        self.assertGreater(report.samples_evaluated, 0)

    def test_linear_and_concave(self):
        """Test linear and concave fields."""
        samples = sample_geodesics(PLANAR, 10, 1.0, seed=2)

        linear = estimate_semiconcavity(lambda p: np.atleast_2d(p) @ np.array([1.0, -2.0]), samples)
        self.assertAlmostEqual(linear.C_hat, 0.0, places=8)
        concave = estimate_semiconcavity(lambda p: -squared_norm(p), samples)
        self.assertAlmostEqual(concave.C_hat, -1.0, places=8)

    def test_sphere_distance_bound(self):
        """Test the distance from the pole outside a quarter-circle ball."""
        samples = sample_geodesics(UNIT_SPHERE, 50, math.pi, rho=math.pi / 4, seed=0)
        report = estimate_semiconcavity(distance_evaluator(UNIT_SPHERE), samples)

        self.assertLessEqual(report.C_hat, 1.0 + 1e-6)
        self.assertGreater(report.C_hat, 0.0)

    def test_torus_distance_bound(self):
        """Test the torus distance outside a ball of radius 0.1."""
        samples = sample_geodesics(FLAT_UNIT_TORUS, 50, 0.5, rho=0.1, seed=0)
        report = estimate_semiconcavity(distance_evaluator(FLAT_UNIT_TORUS), samples)

        self.assertLessEqual(report.C_hat, 10.0 + 1e-6)

    def test_chords_below_floor(self):
        """Test that chords shorter than the floor are skipped."""
        samples = sample_geodesics(PLANAR, 3, 0.1, seed=0)
        report = estimate_semiconcavity(squared_norm, samples, min_chord=1.0)

        self.assertTrue(math.isnan(report.C_hat))
        self.assertEqual(report.worst_sample, -1)

    def test_empty_samples(self):
        """Test that an empty sample is rejected."""
        with self.assertRaises(ValueError):
            estimate_semiconcavity(squared_norm, [])


if __name__ == '__main__':
    unittest.main()
