"""Bi-level UAV hazard monitoring.

Routes visit known hazards (plus CVT-placed pseudo-nodes) under per-vehicle
distance caps; each route edge is then flown along a B-spline path that
minimizes the mean posterior probability of undiscovered hazards in the
edge's Voronoi cell.
"""

from .budget import SegmentVoronoi, allocate_budget, build_segment_voronoi, edge_budgets
from .cvt import CvtConfig, GeneratorSet, generate_pseudo_nodes, run_cvt
from .geometry import RectDomain, Segment, UniformGrid
from .hazard import HazardField, HazardParams, posterior
from .metrics import CoverageReport, edge_coverage
from .optimizer import (EdgePlanningProblem, InfeasibleInit, KinematicBounds, PlannedTrajectory,
                        PlannerConfig, gradient_gamma, objective_gamma, plan_edge)
from .routing import FleetSpec, InfeasibleInstance, NodeSet, Route, solve_vrp, solve_vrp_exact
from .sim import Scenario, ScenarioSpec, TrialResult, generate_scenario, run_pipeline
from .spline import SplinePath

__version__ = "0.1.0"
