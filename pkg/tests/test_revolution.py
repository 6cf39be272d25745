"""
Tests for surfaces of revolution and the one-dimensional reduction.
"""

import unittest

import numpy as np

from cutlocus.analysis import revolution
from cutlocus.analysis.revolution import (RevolutionProfile, builtin_profiles, counterexample_search,
                                          meridian_values, profile_curvature_bound, profile_sufficient_m,
                                          solve_gradient_1d, solve_obstacle_1d, sphere_closed_form)
from cutlocus.analysis.semiconcavity import distance_evaluator
from cutlocus.core.geodesic import analytic_distance
from cutlocus.core.gradient import GradientConfig
from cutlocus.core.interpolate import MeshInterpolator
from cutlocus.core.obstacle import ObstacleProblem, solve_obstacle
from cutlocus.core.surfaces import NORTH_POLE, UNIT_SPHERE, icosphere


class TestRevolutionProfile(unittest.TestCase):
    """Test profile validation and weights."""

    def test_sphere_profile(self):
        """Test the built-in sphere profile."""
        profile = builtin_profiles("sphere", nt=1001)

        self.assertAlmostEqual(profile.length, np.pi)
        self.assertAlmostEqual(float(profile.node_weights.sum()), 2.0, places=4)
        self.assertAlmostEqual(float(profile.interval_weights.sum()), 2.0, places=4)

    def test_validation(self):
        """Test the profile checks."""
        with self.assertRaises(ValueError):
            RevolutionProfile([0.0, 1.0, 2.0], [0.5, 0.5, 0.0])
        with self.assertRaises(ValueError):
            RevolutionProfile([0.0, 1.0, 2.0], [0.0, 2.0, 0.0])
        with self.assertRaises(ValueError):
            RevolutionProfile([0.0, 1.0, 1.0], [0.0, 0.5, 0.0])
        with self.assertRaises(ValueError):
            RevolutionProfile([0.0, 1.0], [0.0, 0.5])
        with self.assertRaises(ValueError):
            RevolutionProfile([0.0, 1.0, 2.0, 3.0], [0.0, 0.5, 0.0, 0.5])

    def test_dumbbell(self):
        """Test the dumbbell profile and its ramp check."""
        profile = builtin_profiles("dumbbell", neck_r=0.01, neck_len=1.0, nt=2001)

        self.assertEqual(profile.r[0], 0.0)
        self.assertEqual(profile.r[-1], 0.0)
        self.assertAlmostEqual(float(profile.r.max()), 1.0)
        self.assertAlmostEqual(float(profile.r[1000]), 0.01)
        with self.assertRaises(ValueError):
            builtin_profiles("dumbbell", neck_r=0.01, neck_len=1.0, ramp_len=0.5)
        with self.assertRaises(ValueError):
            builtin_profiles("dumbbell", neck_r=2.0, neck_len=1.0)
        with self.assertRaises(ValueError):
            builtin_profiles("torus")

    def test_curvature_bound(self):
        """Test that only the dumbbell has negative curvature."""
        K_sphere, diam = profile_curvature_bound(builtin_profiles("sphere", nt=1001))
        self.assertEqual(K_sphere, 0.0)
        self.assertAlmostEqual(diam, 2.0 * np.pi)
        self.assertEqual(profile_sufficient_m(builtin_profiles("sphere", nt=1001)), 0.0)

        K_dumbbell, _ = profile_curvature_bound(builtin_profiles("dumbbell", neck_r=0.01, neck_len=1.0, nt=2001))
        self.assertGreater(K_dumbbell, 0.0)


class TestOneDimensionalSolves(unittest.TestCase):
    """Test the reduced obstacle and gradient problems."""

    def test_sphere_closed_form(self):
        """Test the obstacle solve against the closed form."""
        profile = builtin_profiles("sphere", nt=2001)
        report = solve_obstacle_1d(profile, 10.0)

        self.assertTrue(report.converged)
        np.testing.assert_allclose(report.rho, sphere_closed_form(10.0, profile.t), atol=5e-3)
        self.assertAlmostEqual(float(report.rho[-1]), 2.943, delta=5e-3)
        self.assertLessEqual(report.sup_gradient, 1.0 + 1e-6)
        self.assertEqual(report.mode, "obstacle")

    def test_closed_form_contact(self):
        """Test the contact region of the closed form."""
        t = np.linspace(0.0, np.pi, 101)
        rho = sphere_closed_form(2.0, t)
        t_star = 2.0 * np.arctan(1.0)

        np.testing.assert_allclose(rho[t <= t_star], t[t <= t_star])
        self.assertTrue(np.all(rho[t > t_star] < t[t > t_star]))

    def test_gradient_agrees_on_sphere(self):
        """Test that both reduced problems agree on the sphere."""
        profile = builtin_profiles("sphere", nt=201)
        obstacle = solve_obstacle_1d(profile, 4.0)
        gradient = solve_gradient_1d(profile, 4.0, GradientConfig(tol_feas=1e-4, tol_gap=1e-5, max_iter=50000))

        self.assertLessEqual(gradient.sup_gradient, 1.0 + 1e-9)
        self.assertLess(float(np.max(np.abs(obstacle.rho - gradient.rho))), 0.05)
        self.assertEqual(float(gradient.rho[0]), 0.0)

    def test_dumbbell_obstacle_certified(self):
        """Test that the active-set phase certifies a dumbbell solve with a moving free boundary."""
        profile = builtin_profiles("dumbbell", neck_r=0.01, neck_len=0.5, bulb_len=2.0, nt=801)
        report = solve_obstacle_1d(profile, 1e-2)

        self.assertTrue(report.converged)
        self.assertLess(report.iterations, 801)
        self.assertGreater(report.sup_gradient, 1.05)
        self.assertLessEqual(float(np.max(report.rho - profile.t)), 1e-9)

    def test_meridian_values(self):
        """Test that the distance field restricts to t along the meridian."""
        t = np.linspace(0.0, np.pi, 17)

        np.testing.assert_allclose(meridian_values(distance_evaluator(UNIT_SPHERE), t), t, atol=1e-7)

    def test_surface_solve_matches_reduction(self):
        """Test the icosphere solve along a meridian against the one-dimensional solve."""
        mesh = icosphere(3)
        d = analytic_distance(UNIT_SPHERE, mesh.vertices[NORTH_POLE], mesh.vertices)
        profile = builtin_profiles("sphere", nt=1001)
        t = profile.t[::40]
        tol = max(0.02 * np.pi, 3.0 * mesh.max_edge_length)

        for m in (10.0, 50.0):
            with self.subTest(m=m):
                surface = solve_obstacle(ObstacleProblem.from_mesh(mesh, d, m, nonnegative=True))
                reduced = solve_obstacle_1d(profile, m)
                along = meridian_values(MeshInterpolator(mesh, surface.u), t)

                self.assertTrue(surface.converged)
                self.assertLessEqual(float(np.max(np.abs(along - reduced.rho[::40]))), tol)

class TestCounterexampleSearch(unittest.TestCase):
    """Test the witness search."""

    def test_sphere_has_no_witness(self):
        """Test that the sphere never breaks the gradient bound."""
        profile = builtin_profiles("sphere", nt=401)
        result = counterexample_search([profile], [1.0, 10.0])

        self.assertFalse(result.found)
        self.assertEqual(len(result.records), 2)
        self.assertTrue(all(not r["witness"] for r in result.records))
        self.assertEqual(result.records[0]["profile"], "sphere")

    def test_slope_without_gap(self):
        """Test that a slope above the bound alone is not a witness."""
        profile = builtin_profiles("sphere", nt=401)
        config = GradientConfig(tol_feas=1e-3, tol_gap=1e-3, max_iter=2000)
        result = counterexample_search([profile], [10.0], margin=-0.5, min_gap=np.inf, gradient_config=config)

        self.assertFalse(result.found)
        record = result.records[0]
        self.assertTrue(record["slope_exceeded"])
        self.assertFalse(record["witness"])
        self.assertTrue(np.isfinite(record["equivalence_gap"]))

        result = counterexample_search([profile], [10.0], margin=-0.5, min_gap=0.0, gradient_config=config)
        self.assertTrue(result.found)
        self.assertEqual(result.witnesses[0].profile, "sphere")
        self.assertEqual(result.witnesses[0].m, 10.0)

    def test_dumbbell_witness(self):
        """Test that a thin-necked dumbbell breaks the gradient bound with a visible gap."""
        grid = {"neck_r": (0.01,), "neck_len": (0.5,), "bulb_len": (2.0,)}
        result = counterexample_search(revolution.dumbbell_family(grid, nt=801), [1e-2])

        self.assertTrue(result.found)
        witness = result.witnesses[0]
        self.assertGreater(witness.sup_gradient, 1.0 + revolution.DEFAULT_MARGIN)
        self.assertGreaterEqual(witness.equivalence_gap, revolution.WITNESS_GAP)
        self.assertTrue(result.records[0]["converged"])

    def test_dumbbell_family(self):
        """Test the parameter grid expansion."""
        grid = {"neck_r": (0.01,), "neck_len": (0.5, 1.0), "bulb_len": (2.0,)}
        profiles = revolution.dumbbell_family(grid, nt=501)

        self.assertEqual(len(profiles), 2)
        self.assertEqual(profiles[1].params["neck_len"], 1.0)


if __name__ == '__main__':
    unittest.main()
