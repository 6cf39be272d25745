"""
cutlocus - cut loci and medial axes from obstacle problems
"""

__version__ = "0.1.0"
__author__ = "cutlocus Contributors"

from .core.obstacle import ObstacleProblem, ObstacleSolver
from .core.gradient import GradientProblem, GradientSolver
from .core.pipeline import RunConfig, SweepPipeline

__all__ = ["ObstacleProblem", "ObstacleSolver", "GradientProblem", "GradientSolver",
           "RunConfig", "SweepPipeline"]
