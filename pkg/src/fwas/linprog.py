"""Dense linear programming via the two-phase primal simplex method.

Every condition-measure computation in this package reduces to small dense
LPs (a few dozen rows), so the solver favors robustness over speed: Bland's
anti-cycling rule, row equilibration, and explicit status reporting.  Duals
are recovered from the final basis, which gives the witness multipliers used
by the facial-distance machinery.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Entry-eligibility threshold for pivots.  Module-level on purpose: the
# self-test negative control corrupts it to demonstrate that the duality
# suite catches a broken kernel.
DEFAULT_PIVOT_TOL = 1e-9

_RCOST_TOL = 1e-9
_DEFAULT_MAX_PIVOTS = 50_000


class LPError(Exception):
    """Malformed linear program."""


class LPNumericalError(LPError):
    """Numerical breakdown (pivot budget exhausted); distinct from infeasibility."""


@dataclass(frozen=True)
class LinearProgram:
    """min/max  c.x  subject to  a_eq x = b_eq,  a_ge x >= b_ge, and sign bounds.

    ``nonneg[j]`` is True when variable j is constrained to be >= 0 and False
    when it is free.
    """

    sense: str
    c: np.ndarray
    a_eq: np.ndarray
    b_eq: np.ndarray
    a_ge: np.ndarray
    b_ge: np.ndarray
    nonneg: np.ndarray

    def __post_init__(self) -> None:
        if self.sense not in ("min", "max"):
            raise LPError(f"unknown sense {self.sense!r}")
        nvar = self.c.shape[0]
        for name, mat, rhs in (("a_eq", self.a_eq, self.b_eq), ("a_ge", self.a_ge, self.b_ge)):
            if mat.ndim != 2 or mat.shape[1] != nvar or mat.shape[0] != rhs.shape[0]:
                raise LPError(f"inconsistent dimensions in {name}")
        if self.nonneg.shape != (nvar,):
            raise LPError("nonneg mask has wrong length")
        for arr in (self.c, self.a_eq, self.b_eq, self.a_ge, self.b_ge):
            if arr.size and not np.all(np.isfinite(arr)):
                raise LPError("non-finite coefficient")


def linear_program(c, *, sense="min", a_eq=None, b_eq=None, a_ge=None, b_ge=None,
                   nonneg=True) -> LinearProgram:
    """Convenience constructor that fills in empty constraint blocks."""
    c = np.asarray(c, dtype=float).ravel()
    nvar = c.shape[0]

    def block(a, b):
        if a is None:
            return np.zeros((0, nvar)), np.zeros(0)
        a = np.atleast_2d(np.asarray(a, dtype=float))
        b = np.asarray(b, dtype=float).ravel()
        return a, b

    a_eq, b_eq = block(a_eq, b_eq)
    a_ge, b_ge = block(a_ge, b_ge)
    if isinstance(nonneg, bool):
        mask = np.full(nvar, nonneg)
    else:
        mask = np.asarray(nonneg, dtype=bool).ravel()
    return LinearProgram(sense, c, a_eq, b_eq, a_ge, b_ge, mask)


@dataclass(frozen=True)
class LPSolution:
    """Outcome of a solve.

    ``status`` is one of "optimal", "infeasible", "unbounded".  For optimal
    solves, ``value = c.x`` in the original sense, ``y_eq``/``y_ge`` are row
    duals satisfying ``b_eq.y_eq + b_ge.y_ge = value`` (for min problems the
    inequality duals are >= 0, for max problems <= 0), and the residual
    fields report primal feasibility and complementary slackness.
    """

    status: str
    x: np.ndarray | None = None
    y_eq: np.ndarray | None = None
    y_ge: np.ndarray | None = None
    value: float | None = None
    feas_residual: float = np.nan
    cs_residual: float = np.nan
    n_pivots: int = 0


def _pivot(tab, obj, basis, row, col):
    tab[row] /= tab[row, col]
    colvals = tab[:, col].copy()
    colvals[row] = 0.0
    tab -= np.outer(colvals, tab[row])
    obj -= obj[col] * tab[row]
    basis[row] = col
    rhs = tab[:, -1]
    rhs[(rhs < 0.0) & (rhs > -1e-12)] = 0.0


def _simplex(tab, obj, basis, n_enterable, pivot_tol, max_pivots, used):
    """Run pivots until optimal/unbounded; columns >= n_enterable may not enter."""
    pivots = used
    while True:
        rc = obj[:n_enterable]
        candidates = np.nonzero(rc < -_RCOST_TOL)[0]
        if candidates.size == 0:
            return "optimal", pivots
        enter = int(candidates[0])  # Bland: smallest index
        col = tab[:, enter]
        rows = np.nonzero(col > pivot_tol)[0]
        if rows.size == 0:
            return "unbounded", pivots
        ratios = np.maximum(tab[rows, -1], 0.0) / col[rows]
        best = ratios.min()
        ties = rows[ratios <= best + 1e-12]
        leave = int(ties[np.argmin([basis[r] for r in ties])])  # Bland on ties
        _pivot(tab, obj, basis, leave, enter)
        pivots += 1
        if pivots > max_pivots:
            raise LPNumericalError("pivot budget exhausted; numerical breakdown")


def solve_lp(lp: LinearProgram, *, pivot_tol=None, feas_tol=1e-9,
             max_pivots=_DEFAULT_MAX_PIVOTS) -> LPSolution:
    """Solve a dense LP; returns status, primal/dual values, and residuals.

    Raises LPNumericalError when the pivot budget is exhausted, which is
    reported distinctly from infeasibility.
    """
    if pivot_tol is None:
        pivot_tol = DEFAULT_PIVOT_TOL

    sense_mul = 1.0 if lp.sense == "min" else -1.0
    nvar = lp.c.shape[0]
    n_eq, n_ge = lp.a_eq.shape[0], lp.a_ge.shape[0]
    n_rows = n_eq + n_ge

    # Standard form: split free variables, add surplus columns for >= rows.
    pos_col = np.zeros(nvar, dtype=int)
    neg_col = np.full(nvar, -1, dtype=int)
    cols = 0
    for j in range(nvar):
        pos_col[j] = cols
        cols += 1
        if not lp.nonneg[j]:
            neg_col[j] = cols
            cols += 1
    n_split = cols
    n_std = n_split + n_ge

    a = np.zeros((n_rows, n_std))
    rows_orig = np.vstack([lp.a_eq, lp.a_ge]) if n_rows else np.zeros((0, nvar))
    a[:, pos_col] = rows_orig
    free = np.nonzero(~lp.nonneg)[0]
    if free.size:
        a[:, neg_col[free]] = -rows_orig[:, free]
    for i in range(n_ge):
        a[n_eq + i, n_split + i] = -1.0

    b = np.concatenate([lp.b_eq, lp.b_ge]).astype(float)
    c_std = np.zeros(n_std)
    c_std[pos_col] = sense_mul * lp.c
    if free.size:
        c_std[neg_col[free]] = -sense_mul * lp.c[free]

    # Row equilibration, then flip rows so b >= 0.
    scale = np.ones(n_rows)
    if n_rows:
        scale = np.maximum(np.abs(a).max(axis=1), np.abs(b))
        scale[scale < 1e-300] = 1.0
        a /= scale[:, None]
        b /= scale
    flip = np.where(b < 0.0, -1.0, 1.0)
    a *= flip[:, None]
    b *= flip

    n_total = n_std + n_rows
    tab = np.zeros((n_rows, n_total + 1))
    tab[:, :n_std] = a
    tab[:, n_std:n_total] = np.eye(n_rows)
    tab[:, -1] = b
    basis = [n_std + i for i in range(n_rows)]

    pivots = 0
    if n_rows:
        # Phase 1: minimize the sum of artificials.
        obj = np.zeros(n_total + 1)
        obj[n_std:n_total] = 1.0
        for r in range(n_rows):
            obj -= tab[r]
        status, pivots = _simplex(tab, obj, basis, n_total, pivot_tol, max_pivots, pivots)
        phase1 = -obj[-1]
        if status != "optimal" or phase1 > feas_tol:
            return LPSolution(status="infeasible", n_pivots=pivots)
        # Drive basic artificials out where a structural pivot exists.
        for r in range(n_rows):
            if basis[r] >= n_std:
                structural = np.nonzero(np.abs(tab[r, :n_std]) > pivot_tol)[0]
                if structural.size:
                    dummy = np.zeros(n_total + 1)
                    _pivot(tab, dummy, basis, r, int(structural[0]))
                    pivots += 1

    # Phase 2 on the true objective; artificial columns may not enter.
    obj = np.zeros(n_total + 1)
    obj[:n_std] = c_std
    for r in range(n_rows):
        if obj[basis[r]] != 0.0:
            obj -= obj[basis[r]] * tab[r]
    status, pivots = _simplex(tab, obj, basis, n_std, pivot_tol, max_pivots, pivots)
    if status == "unbounded":
        return LPSolution(status="unbounded", n_pivots=pivots)

    x_std = np.zeros(n_std)
    for r, col in enumerate(basis):
        if col < n_std:
            x_std[col] = tab[r, -1]
    x = x_std[pos_col].copy()
    if free.size:
        x[free] -= x_std[neg_col[free]]

    # Duals from the final basis: solve B^T y = c_B on the pristine columns.
    y_eq = np.zeros(n_eq)
    y_ge = np.zeros(n_ge)
    if n_rows:
        a_full = np.hstack([a, np.eye(n_rows)])
        c_full = np.concatenate([c_std, np.zeros(n_rows)])
        bmat = a_full[:, basis]
        try:
            y_hat = np.linalg.solve(bmat.T, c_full[basis])
        except np.linalg.LinAlgError:
            y_hat = np.linalg.lstsq(bmat.T, c_full[basis], rcond=None)[0]
        y = sense_mul * flip * y_hat / scale
        y_eq, y_ge = y[:n_eq], y[n_eq:]

    value = float(lp.c @ x)
    feas = 0.0
    if n_eq:
        feas = max(feas, float(np.abs(lp.a_eq @ x - lp.b_eq).max()))
    if n_ge:
        feas = max(feas, float(np.maximum(lp.b_ge - lp.a_ge @ x, 0.0).max()))
    if np.any(lp.nonneg):
        feas = max(feas, float(np.maximum(-x[lp.nonneg], 0.0).max()))
    cs = abs(value - float(lp.b_eq @ y_eq) - float(lp.b_ge @ y_ge))
    if n_ge:
        cs = max(cs, float(np.abs(y_ge * (lp.a_ge @ x - lp.b_ge)).max()))
    return LPSolution(status="optimal", x=x, y_eq=y_eq, y_ge=y_ge, value=value,
                      feas_residual=feas, cs_residual=cs, n_pivots=pivots)


def feasible(lp: LinearProgram, **kwargs) -> bool:
    """True when the constraint system admits a feasible point."""
    probe = LinearProgram(lp.sense, np.zeros_like(lp.c), lp.a_eq, lp.b_eq,
                          lp.a_ge, lp.b_ge, lp.nonneg)
    return solve_lp(probe, **kwargs).status == "optimal"
