"""Away-step Frank-Wolfe over an atom hull, with trace recording.

Each iteration compares the regular step toward the best atom with the away
step off the worst active atom and takes whichever promises more first-order
progress (ties go to the away branch; a singleton support forces the regular
branch).  Away steps cap the steplength at x_l / (1 - x_l) so iterates stay
in the simplex; hitting that cap removes the atom from the support, which is
what the drop-step audit counts.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .atoms import AtomMatrix, PolytopeError, SimplexPoint, SUPPORT_THRESHOLD, combine
from .objectives import (CompositeObjective, GenericSmoothObjective, Objective,
                         ObjectiveError, QuadraticObjective)

TIE_BREAK_POLICY = "lowest-index-v1"

REGULAR, AWAY = "regular", "away"


@dataclass(frozen=True)
class Direction:
    """Branch decision for one iteration."""

    step_kind: str
    v: np.ndarray            # movement in ambient space
    w: np.ndarray            # movement in simplex coordinates
    gamma_max: float
    j: int                   # best atom overall
    l: int                   # worst atom in the support
    toward_gap: float        # <grad, a_j - u>
    away_gap: float          # <grad, u - a_l>


def select_direction(a: AtomMatrix, x: SimplexPoint, grad: np.ndarray) -> Direction:
    """Branch logic of one iteration, including the singleton-support override."""
    grad = np.asarray(grad, dtype=float).ravel()
    if not np.all(np.isfinite(grad)):
        raise PolytopeError("non-finite gradient")
    u = combine(a, x)
    scores = grad @ a.columns
    j = int(np.argmin(scores))  # lowest index wins ties
    sup = list(x.support)
    l = sup[int(np.argmin([-scores[i] for i in sup]))]
    toward = float(scores[j] - grad @ u)
    away = float(grad @ u - scores[l])
    if toward < away or len(sup) == 1:
        v = a.atom(j) - u
        w = -x.weights.copy()
        w[j] += 1.0
        return Direction(REGULAR, v, w, 1.0, j, l, toward, away)
    xl = float(x.weights[l])
    assert xl < 1.0, "away branch with full weight cannot occur"
    v = u - a.atom(l)
    w = x.weights.copy()
    w[l] -= 1.0
    return Direction(AWAY, v, w, xl / (1.0 - xl), j, l, toward, away)


def step_lipschitz(grad, v, lipschitz: float, gamma_max: float) -> float:
    """Minimizer of the quadratic upper model <grad, gv> + L g^2 |v|^2 / 2."""
    v = np.asarray(v, dtype=float)
    nrm2 = float(v @ v)
    if nrm2 <= 0.0:
        raise ObjectiveError("zero direction")
    if lipschitz <= 0.0:
        raise ObjectiveError("Lipschitz bound must be positive")
    gamma = -float(np.asarray(grad) @ v) / (lipschitz * nrm2)
    return float(min(max(gamma, 0.0), gamma_max))


def step_exact_quadratic(q, b, u, v, gamma_max: float) -> float:
    """Exact line search for a convex quadratic along u + gamma v."""
    q = np.atleast_2d(np.asarray(q, dtype=float))
    v = np.asarray(v, dtype=float)
    curv = float(v @ (q @ v))
    if curv <= 0.0:
        return float(gamma_max)
    gamma = -float((q @ np.asarray(u, dtype=float) + np.asarray(b, dtype=float)) @ v) / curv
    return float(min(max(gamma, 0.0), gamma_max))


def step_composite(e, lipschitz: float, grad, v, gamma_max: float) -> float:
    """Model step for composites: curvature lives in the image space Ev."""
    if lipschitz <= 0.0:
        raise ObjectiveError("Lipschitz bound must be positive")
    ev = np.atleast_2d(np.asarray(e, dtype=float)) @ np.asarray(v, dtype=float)
    nrm2 = float(ev @ ev)
    if nrm2 <= 0.0:
        return float(gamma_max)
    gamma = -float(np.asarray(grad) @ np.asarray(v)) / (lipschitz * nrm2)
    return float(min(max(gamma, 0.0), gamma_max))


@dataclass(frozen=True)
class IterateRecord:
    """State at iteration k plus the step taken from it (None once stopped)."""

    k: int
    x: SimplexPoint
    u: np.ndarray
    f_value: float
    step_kind: str | None
    gamma: float | None
    gamma_max: float | None
    toward_gap: float
    away_gap: float
    support_size: int

    @property
    def fw_gap(self) -> float:
        return -self.toward_gap


@dataclass(frozen=True)
class SolverConfig:
    step_rule: str = "auto"      # auto | exact | lipschitz | composite
    gap_tol: float = 1e-12
    max_iter: int = 1000
    f_floor: float | None = None  # optional absolute stop on the objective

    def __post_init__(self) -> None:
        if self.step_rule not in ("auto", "exact", "lipschitz", "composite"):
            raise ObjectiveError(f"unknown step rule {self.step_rule!r}")
        if self.max_iter < 0 or self.gap_tol < 0:
            raise ObjectiveError("invalid stopping configuration")


@dataclass(frozen=True)
class RunTrace:
    records: tuple[IterateRecord, ...]
    converged: bool
    config: SolverConfig
    x0_index: int

    @property
    def final(self) -> IterateRecord:
        return self.records[-1]

    def f_values(self) -> np.ndarray:
        return np.array([r.f_value for r in self.records])

    def decrease_ratios(self) -> np.ndarray:
        """ratio_k = 1 - f_{k+1}/f_k for consecutive recorded iterates."""
        f = self.f_values()
        return 1.0 - f[1:] / f[:-1]

    def steps(self) -> tuple[IterateRecord, ...]:
        return tuple(r for r in self.records if r.step_kind is not None)


def _resolve_step_rule(objective: Objective, rule: str) -> str:
    if rule != "auto":
        if rule == "exact" and objective.kind != "quadratic":
            raise ObjectiveError("exact line search needs a quadratic objective")
        if rule == "composite" and objective.kind != "composite":
            raise ObjectiveError("the composite step rule needs a composite objective")
        return rule
    return {"quadratic": "exact", "composite": "composite", "generic": "lipschitz"}[objective.kind]


def run(a: AtomMatrix, objective: Objective, x0: SimplexPoint,
        config: SolverConfig | None = None) -> RunTrace:
    """Run the away-step method from a vertex of the simplex.

    Records every iterate; stops when the Frank-Wolfe gap drops to
    ``gap_tol``, when ``max_iter`` steps were taken, or at the optional
    objective floor.  Weights that fall below the support threshold are
    snapped to zero and the rest renormalized so support counting is exact.
    """
    config = config or SolverConfig()
    if not x0.is_vertex():
        raise PolytopeError("the start point must be a vertex of the simplex")
    if x0.n != a.n:
        raise PolytopeError("start point does not match the atom count")
    probe = combine(a, x0)
    grad0 = objective.gradient(probe)
    if np.asarray(grad0).shape != probe.shape:
        raise ObjectiveError("objective dimension does not match the atoms")
    rule = _resolve_step_rule(objective, config.step_rule)

    records: list[IterateRecord] = []
    x = x0
    converged = False
    for k in range(config.max_iter + 1):
        u = combine(a, x)
        f_val = objective.value(u)
        grad = objective.gradient(u)
        d = select_direction(a, x, grad)
        stop = (-d.toward_gap <= config.gap_tol) or (k >= config.max_iter) \
            or (config.f_floor is not None and f_val <= config.f_floor)
        if stop:
            records.append(IterateRecord(k, x, u, f_val, None, None, None,
                                         d.toward_gap, d.away_gap, len(x.support)))
            converged = -d.toward_gap <= config.gap_tol
            break

        if rule == "exact":
            gamma = step_exact_quadratic(objective.q, objective.b, u, d.v, d.gamma_max)
        elif rule == "composite":
            gamma = step_composite(objective.e, objective.lipschitz, grad, d.v, d.gamma_max)
        else:
            gamma = step_lipschitz(grad, d.v, objective.lipschitz, d.gamma_max)

        records.append(IterateRecord(k, x, u, f_val, d.step_kind, gamma, d.gamma_max,
                                     d.toward_gap, d.away_gap, len(x.support)))
        w = x.weights + gamma * d.w
        w[w < SUPPORT_THRESHOLD] = 0.0
        total = w.sum()
        if not (abs(total - 1.0) < 1e-8):
            raise PolytopeError("weight drift exceeded tolerance")  # pragma: no cover
        x = SimplexPoint(w / total)
    return RunTrace(tuple(records), converged, config, x0.support[0])


@dataclass(frozen=True)
class RateBound:
    """Per-iteration contraction bound r with its ingredients.

    ``raw`` is the pre-clamp value; theorems cap usable rates at 1/2.
    """

    r: float
    raw: float
    ingredients: dict
    theorem: str

    def __post_init__(self) -> None:
        if not (0.0 < self.r <= 0.5):
            raise ObjectiveError("rate must lie in (0, 1/2]")


def rate_bound_generic(mu: float, lipschitz: float, c: float, diam: float) -> RateBound:
    """r = min(mu c^2 / (L diam^2), 1/2) for alignment constant c."""
    if min(mu, lipschitz, c, diam) <= 0.0:
        raise ObjectiveError("rate ingredients must be positive")
    if mu > lipschitz + 1e-12:
        raise ObjectiveError("strong convexity exceeds the Lipschitz bound")
    raw = mu * c * c / (lipschitz * diam * diam)
    return RateBound(min(raw, 0.5), raw,
                     {"mu": mu, "lipschitz": lipschitz, "c": c, "diam": diam}, "thm4")


def rate_bound_quadratic(bar_phi: float, diam_scaled: float) -> RateBound:
    """r = min(bar_phi^2 / (8 diam^2), 1/2) for the scaled-polytope measure."""
    if min(bar_phi, diam_scaled) <= 0.0:
        raise ObjectiveError("rate ingredients must be positive")
    raw = bar_phi * bar_phi / (8.0 * diam_scaled * diam_scaled)
    return RateBound(min(raw, 0.5), raw,
                     {"bar_phi": bar_phi, "diam_scaled": diam_scaled}, "thm5")


def rate_bound_composite(mu: float, lipschitz: float, bar_phi: float, diam_ea: float) -> RateBound:
    """r = min((mu/L) bar_phi^2 / (8 diam^2), 1/2) for composite objectives."""
    if min(mu, lipschitz, bar_phi, diam_ea) <= 0.0:
        raise ObjectiveError("rate ingredients must be positive")
    if mu > lipschitz + 1e-12:
        raise ObjectiveError("strong convexity exceeds the Lipschitz bound")
    raw = (mu / lipschitz) * bar_phi * bar_phi / (8.0 * diam_ea * diam_ea)
    return RateBound(min(raw, 0.5), raw,
                     {"mu": mu, "lipschitz": lipschitz, "bar_phi": bar_phi,
                      "diam_ea": diam_ea}, "thm6")


@dataclass(frozen=True)
class RateReport:
    passed: bool
    first_violation: int | None
    max_excess: float
    margins: tuple[float, ...]


def verify_linear_rate(trace: RunTrace, r: float, f_star: float, *,
                       rtol: float = 1e-9, atol: float = 1e-12) -> RateReport:
    """Check f_k - f* <= (1-r)^(k/2) (f_0 - f*) along the whole trace."""
    f = trace.f_values()
    if f_star > float(f.min()) + 1e-9:
        raise ObjectiveError("f_star exceeds the best objective value on the trace")
    gap0 = float(f[0]) - f_star
    margins = []
    first = None
    worst = -np.inf
    for k, fk in enumerate(f):
        bound = (1.0 - r) ** (k / 2.0) * gap0
        excess = (float(fk) - f_star) - bound
        margins.append(bound - (float(fk) - f_star))
        allowance = atol + rtol * max(abs(bound), gap0, 1.0)
        if excess > allowance and first is None:
            first = k
        worst = max(worst, excess)
    return RateReport(first is None, first, float(worst), tuple(margins))


@dataclass(frozen=True)
class DropStepReport:
    n_steps: int
    n_drop: int
    passed: bool
    violations: tuple[str, ...]


def drop_step_audit(trace: RunTrace) -> DropStepReport:
    """Support accounting: drop steps are away steps that hit a cap below 1;
    they are at most half of all steps when the run starts at a vertex, and
    support sizes move by at most +1 / -1 / 0 per step kind."""
    steps = trace.steps()
    violations: list[str] = []
    n_drop = 0
    for rec, nxt in zip(trace.records[:-1], trace.records[1:]):
        delta = nxt.support_size - rec.support_size
        if rec.step_kind == REGULAR:
            if delta > 1:
                violations.append(f"k={rec.k}: regular step grew support by {delta}")
        elif rec.gamma is not None and rec.gamma_max is not None:
            is_drop = rec.gamma >= rec.gamma_max and rec.gamma_max < 1.0
            if is_drop:
                n_drop += 1
                if delta > -1:
                    violations.append(f"k={rec.k}: drop step did not shrink the support")
            elif delta > 0:
                violations.append(f"k={rec.k}: away step grew the support")
    if trace.records and trace.records[0].support_size == 1:
        if n_drop > len(steps) / 2.0:
            violations.append(f"drop steps {n_drop} exceed half of {len(steps)} steps")
    return DropStepReport(len(steps), n_drop, not violations, tuple(violations))


def certified_f_star(trace: RunTrace) -> float:
    """Lower bound on the optimal value from the final Frank-Wolfe gap."""
    last = trace.final
    return last.f_value - last.fw_gap
