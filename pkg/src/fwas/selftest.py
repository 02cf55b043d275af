"""Invariant suites behind the ``selftest`` CLI command.

Each suite re-derives a family of identities on fresh random or canonical
instances and reports pass/fail with timing.  A deliberately corrupted LP
pivot tolerance (debug flag) must make the duality suite fail; that negative
control guards against a silently broken kernel.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from . import linprog
from .atoms import AtomMatrix, SimplexPoint, diameter, enumerate_proper_faces
from .experiments import (localized_gap_instance, scaled_wedge_instance, strong_instance,
                          strong_ratio_bound)
from .measures import (DirectionError, bar_phi_pair, bar_phi_pair_dual, facial_distance,
                       hat_matrix, local_phi_lower_bound, pdirw, phi_pair, phi_pair_dual,
                       scaled_instance)
from .objectives import QuadraticObjective
from .solver import SolverConfig, drop_step_audit, run


@dataclass(frozen=True)
class SuiteResult:
    name: str
    passed: bool
    seconds: float
    detail: str


def _random_atoms(rng, m_max=4, n_max=6, n_min=2) -> AtomMatrix:
    m = int(rng.integers(1, m_max + 1))
    n = int(rng.integers(max(n_min, 2), n_max + 1))
    return AtomMatrix(rng.normal(size=(m, n)))


def _random_pair(rng, n):
    return SimplexPoint(rng.dirichlet(np.ones(n))), SimplexPoint(rng.dirichlet(np.ones(n)))


def suite_duality(trials: int = 60) -> tuple[bool, str]:
    rng = np.random.default_rng(202)
    worst = 0.0
    checked = 0
    for _ in range(trials):
        a = _random_atoms(rng)
        x, z = _random_pair(rng, a.n)
        try:
            rep = phi_pair(a, x, z)
            dual = phi_pair_dual(a, x, z)
        except DirectionError:
            continue
        checked += 1
        worst = max(worst, abs(rep.value - dual))
        witness_gap = abs(rep.value - float(np.linalg.norm(rep.witness.u - rep.witness.v)))
        worst = max(worst, witness_gap)
    return worst <= 1e-7 and checked > trials // 2, \
        f"{checked} instances, worst two-route/witness gap {worst:.2e}"


def suite_faces() -> tuple[bool, str]:
    import itertools
    tri = AtomMatrix(np.array([[0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]))
    square = AtomMatrix(np.array([[0.0, 1.0, 1.0, 0.0], [0.0, 0.0, 1.0, 1.0]]))
    cube = AtomMatrix(np.array(list(itertools.product([0.0, 1.0], repeat=3))).T)
    counts = []
    for atoms, expect in ((tri, 6), (square, 8), (cube, 26)):
        faces = enumerate_proper_faces(atoms)
        for f in faces:
            f.check(atoms)
            if not 0 < len(f.atom_indices) < atoms.n:
                return False, "face with empty or full atom set"
        counts.append((len(faces), expect))
    ok = all(got == expect for got, expect in counts)
    rng = np.random.default_rng(7)
    perm = rng.permutation(8)
    ok = ok and abs(diameter(cube) - diameter(AtomMatrix(cube.columns[:, perm]))) < 1e-15
    return ok, f"face counts {counts}, diameter permutation-invariant"


def suite_theorem1(samples: int = 40) -> tuple[bool, str]:
    ok = abs(facial_distance(AtomMatrix(np.array(
        [[0.0, 1.0, 0.0, 1.0], [0.0, 0.0, 1.0, 1.0]]))).value - 1.0 / np.sqrt(2)) <= 1e-8
    ok = ok and abs(facial_distance(AtomMatrix(np.eye(4))).value - 1.0) <= 1e-8
    rng = np.random.default_rng(11)
    worst = 0.0
    for _ in range(4):
        a = AtomMatrix(rng.normal(size=(2, int(rng.integers(3, 7)))))
        rep = facial_distance(a)
        for _ in range(samples // 4):
            x, z = _random_pair(rng, a.n)
            try:
                worst = max(worst, rep.value - phi_pair(a, x, z).value)
            except DirectionError:
                continue
        worst = max(worst, abs(phi_pair(a, rep.witness.w, rep.witness.y).value - rep.value))
    return ok and worst <= 1e-7, f"closed forms ok={ok}, worst consistency gap {worst:.2e}"


def suite_theorem2(samples: int = 40) -> tuple[bool, str]:
    rng = np.random.default_rng(13)
    worst_lo, worst_eq = 0.0, 0.0
    for _ in range(4):
        a = AtomMatrix(rng.normal(size=(2, int(rng.integers(3, 7)))))
        rep = facial_distance(a)
        for _ in range(samples // 4):
            x, z = _random_pair(rng, a.n)
            u, v = a.columns @ x.weights, a.columns @ z.weights
            if float(np.linalg.norm(u - v)) < 1e-8:
                continue
            worst_lo = max(worst_lo, rep.value - pdirw(a, v - u, u))
        wit = rep.witness
        worst_eq = max(worst_eq, abs(pdirw(a, wit.v - wit.u, wit.u) - rep.value))
    return worst_lo <= 1e-7 and worst_eq <= 1e-6, \
        f"worst lower-bound gap {worst_lo:.2e}, worst witness equality gap {worst_eq:.2e}"


def suite_theorem3() -> tuple[bool, str]:
    atoms = localized_gap_instance(100.0, 5)
    local = local_phi_lower_bound(atoms, [SimplexPoint.vertex(5, 0)])
    global_phi = facial_distance(atoms).value
    ok = local >= 100.0 - 1e-9 and abs(global_phi - 0.05) <= 1e-5
    full = [SimplexPoint.vertex(5, j) for j in range(5)]
    ok = ok and abs(local_phi_lower_bound(atoms, full) - global_phi) <= 1e-9
    return ok, f"anchored bound {local:.6g} vs global {global_phi:.6g}"


def suite_prop7(trials: int = 30) -> tuple[bool, str]:
    rng = np.random.default_rng(17)
    worst_eq, worst_dom, worst_id = 0.0, 0.0, 0.0
    for _ in range(trials):
        m = int(rng.integers(1, 4))
        n = int(rng.integers(2, 6))
        g = rng.normal(size=m)
        base = rng.normal(size=(m, n))
        abar0 = AtomMatrix(np.vstack([base, rng.normal() - g @ base]))
        x, z = _random_pair(rng, n)
        try:
            worst_eq = max(worst_eq, abs(bar_phi_pair(abar0, g, x, z)
                                         - phi_pair(AtomMatrix(base), x, z).value))
        except DirectionError:
            pass
        abar = AtomMatrix(rng.normal(size=(m + 1, n)))
        si = scaled_instance(abar, g)
        if si.delta_g <= 1e-6:
            continue
        zw = np.zeros(n)
        zw[list(si.zg_face)] = rng.dirichlet(np.ones(len(si.zg_face)))
        z2 = SimplexPoint(zw)
        try:
            vbar = bar_phi_pair(abar, g, x, z2)
            worst_dom = max(worst_dom, phi_pair(hat_matrix(abar, g), x, z2).value - vbar)
            worst_id = max(worst_id, abs(bar_phi_pair_dual(abar, g, x, z2)[0] - vbar))
        except DirectionError:
            pass
    ok = worst_eq <= 1e-7 and worst_dom <= 1e-7 and worst_id <= 1e-7
    return ok, (f"zero-spread equality {worst_eq:.2e}, domination slack {worst_dom:.2e}, "
                f"two-route gap {worst_id:.2e}")


def suite_dropstep() -> tuple[bool, str]:
    details = []
    ok = True
    for atoms, objective in (strong_instance(np.pi / 10), scaled_wedge_instance(50.0)):
        trace = run(atoms, objective, SimplexPoint.vertex(atoms.n, 0),
                    SolverConfig(step_rule="exact", gap_tol=0.0, max_iter=300))
        report = drop_step_audit(trace)
        ok = ok and report.passed
        details.append(f"{report.n_drop}/{report.n_steps}")
    rng = np.random.default_rng(23)
    for _ in range(5):
        n = int(rng.integers(3, 7))
        atoms = AtomMatrix(rng.normal(size=(2, n)))
        root = rng.normal(size=(2, 2))
        objective = QuadraticObjective(root @ root.T + 0.2 * np.eye(2), rng.normal(size=2))
        trace = run(atoms, objective, SimplexPoint.vertex(n, 0),
                    SolverConfig(max_iter=400))
        report = drop_step_audit(trace)
        ok = ok and report.passed
        f = trace.f_values()
        scale = max(1.0, float(np.abs(f).max()))
        ok = ok and bool((np.diff(f) <= 1e-12 * scale).all())
        details.append(f"{report.n_drop}/{report.n_steps}")
    return ok, "drop/steps: " + ", ".join(details)


def suite_bounds() -> tuple[bool, str]:
    theta = np.pi / 100
    atoms, objective = strong_instance(theta)
    trace = run(atoms, objective, SimplexPoint.vertex(3, 0),
                SolverConfig(step_rule="exact", gap_tol=0.0, max_iter=400))
    ratios = trace.decrease_ratios()[1:]
    ok = bool((ratios > 0).all() and (ratios <= strong_ratio_bound(theta)).all())
    return ok, f"ratio window max {ratios.max():.3e} vs bound {strong_ratio_bound(theta):.3e}"


SUITES = {
    "duality": suite_duality,
    "faces": suite_faces,
    "theorem1": suite_theorem1,
    "theorem2": suite_theorem2,
    "theorem3": suite_theorem3,
    "prop7": suite_prop7,
    "dropstep": suite_dropstep,
    "bounds": suite_bounds,
}


def run_selftest(suite: str | None = None, corrupt_lp_pivot_tol: float | None = None):
    """Run the invariant suites; returns a list of SuiteResult.

    ``corrupt_lp_pivot_tol`` is a debug flag that deliberately breaks the LP
    kernel to prove the duality checks can fail.
    """
    names = [suite] if suite else list(SUITES)
    for name in names:
        if name not in SUITES:
            raise KeyError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    saved = linprog.DEFAULT_PIVOT_TOL
    if corrupt_lp_pivot_tol is not None:
        linprog.DEFAULT_PIVOT_TOL = corrupt_lp_pivot_tol
    results = []
    try:
        for name in names:
            start = time.perf_counter()
            try:
                passed, detail = SUITES[name]()
            except Exception as exc:  # a corrupted kernel may throw anywhere
                passed, detail = False, f"exception: {exc}"
            results.append(SuiteResult(name, passed, time.perf_counter() - start, detail))
    finally:
        linprog.DEFAULT_PIVOT_TOL = saved
    return results
