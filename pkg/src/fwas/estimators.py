"""Estimator-style front ends so the solver and the condition analysis
compose with scikit-learn tooling (get_params/set_params, clone, pipelines).

Atoms are passed the sklearn way: one row per atom, ``X`` of shape
(n_atoms, ambient_dim).
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError
from sklearn.utils.validation import check_array

from .atoms import AtomMatrix, SimplexPoint, diameter
from .measures import facial_distance, local_phi_lower_bound
from .objectives import Objective
from .solver import SolverConfig, certified_f_star, drop_step_audit, run


def _atoms_from_x(x) -> AtomMatrix:
    arr = check_array(x, dtype=float, ensure_2d=True, ensure_min_samples=1)
    return AtomMatrix.from_rows(arr)


class FrankWolfeAway(BaseEstimator):
    """Minimize a smooth convex objective over the convex hull of the rows of X.

    Parameters
    ----------
    objective : objective instance with value/gradient (see fwas.objectives)
    x0_index : index of the starting vertex (an atom row)
    step_rule : "auto", "exact", "lipschitz", or "composite"
    gap_tol : stopping tolerance on the Frank-Wolfe gap
    max_iter : iteration cap

    Attributes (after fit)
    ----------------------
    solution_ : minimizer in ambient space
    weights_ : barycentric weights over the atom rows
    fun_ : objective value at the solution
    trace_ : full per-iteration record
    converged_ : True when the gap tolerance was reached
    n_iter_ : number of steps taken
    """

    def __init__(self, objective: Objective | None = None, x0_index: int = 0,
                 step_rule: str = "auto", gap_tol: float = 1e-12, max_iter: int = 1000):
        self.objective = objective
        self.x0_index = x0_index
        self.step_rule = step_rule
        self.gap_tol = gap_tol
        self.max_iter = max_iter

    def fit(self, X, y=None):
        if self.objective is None:
            raise ValueError("an objective is required")
        atoms = _atoms_from_x(X)
        if not 0 <= self.x0_index < atoms.n:
            raise ValueError(f"x0_index {self.x0_index} out of range for {atoms.n} atoms")
        config = SolverConfig(step_rule=self.step_rule, gap_tol=self.gap_tol,
                              max_iter=self.max_iter)
        trace = run(atoms, self.objective, SimplexPoint.vertex(atoms.n, self.x0_index), config)
        final = trace.final
        self.atoms_ = atoms
        self.trace_ = trace
        self.solution_ = final.u
        self.weights_ = np.array(final.x.weights)
        self.fun_ = final.f_value
        self.converged_ = trace.converged
        self.n_iter_ = len(trace.steps())
        self.f_star_bound_ = certified_f_star(trace)
        return self

    def _check_fitted(self):
        if not hasattr(self, "trace_"):
            raise NotFittedError("call fit first")

    def score(self, X=None, y=None) -> float:
        """Negative final objective value (higher is better, sklearn-style)."""
        self._check_fitted()
        return -self.fun_

    def audit(self):
        """Support-accounting audit of the fitted trace."""
        self._check_fitted()
        return drop_step_audit(self.trace_)


class PolytopeAnalyzer(BaseEstimator):
    """Condition analysis of the polytope spanned by the rows of X.

    Attributes (after fit)
    ----------------------
    facial_distance_ : minimum face-to-complement distance
    diameter_ : largest pairwise atom distance
    report_ : full certificate (minimizing face, witnesses, per-face table)
    n_faces_ : number of proper faces
    """

    def __init__(self, zface: tuple[int, ...] | None = None):
        self.zface = zface

    def fit(self, X, y=None):
        atoms = _atoms_from_x(X)
        report = facial_distance(atoms)
        self.atoms_ = atoms
        self.report_ = report
        self.facial_distance_ = report.value
        self.diameter_ = diameter(atoms)
        self.n_faces_ = len(report.face_distances)
        if self.zface is not None:
            anchors = [SimplexPoint.vertex(atoms.n, int(i)) for i in self.zface]
            self.local_lower_bound_ = local_phi_lower_bound(atoms, anchors)
        return self

    def condition_number(self) -> float:
        """diam(A) / facial distance; large values mean hard instances."""
        if not hasattr(self, "report_"):
            raise NotFittedError("call fit first")
        return self.diameter_ / self.facial_distance_
