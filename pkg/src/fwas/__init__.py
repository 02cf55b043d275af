"""Polytope condition measures and the away-step Frank-Wolfe method.

The facial distance of an atom set (the smallest distance between a proper
face and the hull of the remaining atoms) governs how fast the away-step
method converges on strongly convex problems; this package computes the
measure and its localized and scaled variants exactly at desk scale, runs
the solver, and verifies the decay bounds on recorded traces.
"""

from .atoms import (AtomMatrix, FaceDescriptor, SimplexPoint, WitnessPair, combine, diameter,
                    enumerate_proper_faces, is_vertex_set, support)
from .estimators import FrankWolfeAway, PolytopeAnalyzer
from .linprog import LinearProgram, LPNumericalError, LPSolution, linear_program, solve_lp
from .measures import (PhiReport, ScaledInstance, bar_phi_bounds, bar_phi_pair, facial_distance,
                       local_phi_lower_bound, norm_g, pdirw, phi_pair, phi_pair_dual,
                       scaled_instance, smallest_containing_face)
from .minnorm import min_norm_point, polytope_distance
from .objectives import CompositeObjective, GenericSmoothObjective, QuadraticObjective
from .solver import (IterateRecord, RateBound, RunTrace, SolverConfig, drop_step_audit,
                     rate_bound_composite, rate_bound_generic, rate_bound_quadratic, run,
                     select_direction, step_composite, step_exact_quadratic, step_lipschitz,
                     verify_linear_rate)

__version__ = "0.1.0"

__all__ = [
    "AtomMatrix", "SimplexPoint", "FaceDescriptor", "WitnessPair", "PhiReport",
    "ScaledInstance", "LinearProgram", "LPSolution", "LPNumericalError",
    "QuadraticObjective", "CompositeObjective", "GenericSmoothObjective",
    "IterateRecord", "RunTrace", "SolverConfig", "RateBound",
    "FrankWolfeAway", "PolytopeAnalyzer",
    "support", "combine", "diameter", "enumerate_proper_faces", "is_vertex_set",
    "linear_program", "solve_lp", "min_norm_point", "polytope_distance",
    "phi_pair", "phi_pair_dual", "facial_distance", "local_phi_lower_bound",
    "smallest_containing_face", "pdirw", "scaled_instance", "norm_g",
    "bar_phi_pair", "bar_phi_bounds",
    "select_direction", "step_lipschitz", "step_exact_quadratic", "step_composite",
    "run", "rate_bound_generic", "rate_bound_quadratic", "rate_bound_composite",
    "verify_linear_rate", "drop_step_audit",
]
