"""Core polytope data types: atom matrices, simplex points, exposed faces.

Atoms are the columns of an m x n matrix A; the polytope is conv(A).  Points
of the polytope are carried as barycentric weights on the standard simplex
together with their support, which the away-step solver needs to track
exactly.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .linprog import linear_program, solve_lp

# Weights at or below this threshold count as zero when computing supports.
# The mathematical definition uses strict positivity; a fixed cutoff far
# below any step-induced weight keeps support bookkeeping exact in floats.
SUPPORT_THRESHOLD = 1e-12

# Exposed-face enumeration scans the face lattice; cap the instance size.
FACE_ENUM_LIMIT = 20

_FACE_MARGIN_TOL = 1e-8


class PolytopeError(Exception):
    pass


class InstanceTooLargeError(PolytopeError):
    pass


class DegeneratePolytopeError(PolytopeError):
    """All atoms coincide; the polytope is a single point."""


def worker_count() -> int:
    """Parallelism cap from FWAS_THREADS (default 1 = sequential)."""
    try:
        return max(1, int(os.environ.get("FWAS_THREADS", "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class AtomMatrix:
    """The atom set as an m x n column matrix."""

    columns: np.ndarray

    def __post_init__(self) -> None:
        cols = np.atleast_2d(np.asarray(self.columns, dtype=float))
        if cols.ndim != 2 or cols.shape[1] < 1:
            raise PolytopeError("atom matrix needs at least one column")
        if not np.all(np.isfinite(cols)):
            raise PolytopeError("atom coordinates must be finite")
        cols = cols.copy()
        cols.setflags(write=False)
        object.__setattr__(self, "columns", cols)

    @property
    def m(self) -> int:
        return self.columns.shape[0]

    @property
    def n(self) -> int:
        return self.columns.shape[1]

    @property
    def has_two_distinct_columns(self) -> bool:
        first = self.columns[:, :1]
        return bool(np.any(np.abs(self.columns - first) > 0))

    def atom(self, j: int) -> np.ndarray:
        return self.columns[:, j]

    @staticmethod
    def from_rows(rows) -> "AtomMatrix":
        """Build from an array whose rows are atoms (the file/estimator layout)."""
        return AtomMatrix(np.atleast_2d(np.asarray(rows, dtype=float)).T)

    def subset(self, indices: Iterable[int]) -> np.ndarray:
        idx = list(indices)
        return self.columns[:, idx]


@dataclass(frozen=True)
class SimplexPoint:
    """Barycentric weights on the standard simplex plus their support."""

    weights: np.ndarray
    support: tuple[int, ...] = field(init=False)

    def __post_init__(self) -> None:
        w = np.asarray(self.weights, dtype=float).ravel().copy()
        if w.size < 1:
            raise PolytopeError("empty weight vector")
        if np.any(w < 0.0):
            raise PolytopeError("negative simplex weight")
        if abs(float(w.sum()) - 1.0) > 1e-12:
            raise PolytopeError("simplex weights must sum to 1 within 1e-12")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "support",
                           tuple(int(i) for i in np.nonzero(w > SUPPORT_THRESHOLD)[0]))

    @property
    def n(self) -> int:
        return self.weights.shape[0]

    @staticmethod
    def vertex(n: int, i: int) -> "SimplexPoint":
        w = np.zeros(n)
        w[i] = 1.0
        return SimplexPoint(w)

    def is_vertex(self) -> bool:
        return len(self.support) == 1 and abs(self.weights[self.support[0]] - 1.0) <= 1e-12


def support(x: SimplexPoint) -> tuple[int, ...]:
    """Indices of the strictly positive weights of x."""
    return x.support


def combine(a: AtomMatrix, x: SimplexPoint) -> np.ndarray:
    """The hull point represented by x, i.e. the weighted atom combination."""
    if x.n != a.n:
        raise PolytopeError(f"dimension mismatch: {x.n} weights for {a.n} atoms")
    return a.columns @ x.weights


def diameter(a: AtomMatrix) -> float:
    """Largest pairwise Euclidean distance between atoms."""
    cols = a.columns
    sq = np.sum(cols * cols, axis=0)
    dist2 = sq[:, None] + sq[None, :] - 2.0 * (cols.T @ cols)
    return float(np.sqrt(max(float(dist2.max()), 0.0)))


@dataclass(frozen=True)
class FaceDescriptor:
    """An exposed face: its atom index set plus a supporting functional.

    The functional attains ``offset`` exactly on the face atoms and strictly
    more on every other atom.
    """

    atom_indices: tuple[int, ...]
    functional: np.ndarray
    offset: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "atom_indices", tuple(sorted(int(i) for i in self.atom_indices)))
        p = np.asarray(self.functional, dtype=float).ravel().copy()
        p.setflags(write=False)
        object.__setattr__(self, "functional", p)

    def check(self, a: AtomMatrix, tol: float = _FACE_MARGIN_TOL) -> None:
        vals = self.functional @ a.columns
        scale = max(1.0, float(np.abs(vals).max()), abs(self.offset))
        inside = np.zeros(a.n, dtype=bool)
        inside[list(self.atom_indices)] = True
        if np.any(np.abs(vals[inside] - self.offset) > tol * scale):
            raise PolytopeError("face functional not constant on the face atoms")
        if np.any(vals[~inside] - self.offset <= tol * scale):
            raise PolytopeError("face atom set is not maximal for its functional")


@dataclass(frozen=True)
class WitnessPair:
    """Two hull points with simplex representations (a.w = u, a.y = v)."""

    u: np.ndarray
    v: np.ndarray
    w: SimplexPoint
    y: SimplexPoint


def hull_membership_gap(points: np.ndarray, target: np.ndarray) -> float:
    """Phase-1 residual of writing target as a convex combination of columns.

    Zero (up to solver tolerance) means the point lies in the hull.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    target = np.asarray(target, dtype=float).ravel()
    m, k = points.shape
    a_eq = np.vstack([points, np.ones((1, k))])
    b_eq = np.concatenate([target, [1.0]])
    lp = linear_program(np.zeros(k), a_eq=a_eq, b_eq=b_eq, nonneg=True)
    sol = solve_lp(lp)
    if sol.status != "optimal":
        return np.inf
    return sol.feas_residual


def hull_contains(points: np.ndarray, target: np.ndarray, tol: float = 1e-8) -> bool:
    scale = max(1.0, float(np.abs(points).max()))
    return hull_membership_gap(points, target) <= tol * scale


def hull_coefficients(points: np.ndarray, target: np.ndarray) -> np.ndarray | None:
    """Convex coefficients writing target over the columns, or None."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    m, k = points.shape
    a_eq = np.vstack([points, np.ones((1, k))])
    b_eq = np.concatenate([np.asarray(target, dtype=float).ravel(), [1.0]])
    lp = linear_program(np.zeros(k), a_eq=a_eq, b_eq=b_eq, nonneg=True)
    sol = solve_lp(lp)
    scale = max(1.0, float(np.abs(points).max()))
    if sol.status != "optimal" or sol.feas_residual > 1e-8 * scale:
        return None
    lam = np.maximum(sol.x, 0.0)
    return lam / lam.sum()


def _closure(a: AtomMatrix, seed: frozenset[int]) -> tuple[frozenset[int], np.ndarray, float]:
    """Smallest exposed-face atom set containing ``seed``, with a witness.

    One LP: over functionals vanishing on the seed atoms, jointly maximize
    capped margins on the remaining atoms.  Atoms whose margin cannot be made
    positive belong to the closure; all others reach the cap of 1, so the
    optimal functional separates the closure with margin >= 1.
    """
    n, m = a.n, a.m
    outside = [j for j in range(n) if j not in seed]
    k = len(outside)
    nvar = m + 1 + k  # p, c, mu
    cost = np.zeros(nvar)
    cost[m + 1:] = 1.0

    inside = sorted(seed)
    a_eq = np.zeros((len(inside), nvar))
    for r, i in enumerate(inside):
        a_eq[r, :m] = a.atom(i)
        a_eq[r, m] = -1.0
    b_eq = np.zeros(len(inside))

    a_ge = np.zeros((2 * k, nvar))
    b_ge = np.zeros(2 * k)
    for r, j in enumerate(outside):
        a_ge[r, :m] = a.atom(j)
        a_ge[r, m] = -1.0
        a_ge[r, m + 1 + r] = -1.0  # margin_j >= mu_j
        a_ge[k + r, m + 1 + r] = -1.0  # mu_j <= 1
        b_ge[k + r] = -1.0

    nonneg = np.zeros(nvar, dtype=bool)
    nonneg[m + 1:] = True
    lp = linear_program(cost, sense="max", a_eq=a_eq, b_eq=b_eq, a_ge=a_ge,
                        b_ge=b_ge, nonneg=nonneg)
    sol = solve_lp(lp)
    if sol.status != "optimal":
        raise PolytopeError("face-closure subproblem failed")  # pragma: no cover
    p = sol.x[:m]
    c = float(sol.x[m])
    mu = sol.x[m + 1:]
    members = set(seed)
    members.update(j for j, v in zip(outside, mu) if v < 0.5)
    return frozenset(members), p, c


def enumerate_proper_faces(a: AtomMatrix) -> list[FaceDescriptor]:
    """All proper nonempty exposed faces of conv(A), as maximal atom sets.

    Walks the face lattice upward from singleton closures, joining one atom
    at a time; every face of a polytope is exposed, so this enumerates all
    proper faces.  Output is deterministic: sorted by atom index set.
    """
    if a.n > FACE_ENUM_LIMIT:
        raise InstanceTooLargeError(f"{a.n} atoms exceeds the enumeration limit {FACE_ENUM_LIMIT}")
    if not a.has_two_distinct_columns:
        raise DegeneratePolytopeError("all atoms coincide")

    everything = frozenset(range(a.n))
    cache: dict[frozenset[int], tuple[frozenset[int], np.ndarray, float]] = {}

    def closure(seed: frozenset[int]):
        if seed not in cache:
            cache[seed] = _closure(a, seed)
        return cache[seed]

    faces: dict[frozenset[int], tuple[np.ndarray, float]] = {}
    frontier: list[frozenset[int]] = []
    for i in range(a.n):
        members, p, c = closure(frozenset([i]))
        if members != everything and members not in faces:
            faces[members] = (p, c)
            frontier.append(members)
    while frontier:
        nxt: list[frozenset[int]] = []
        for face in frontier:
            for extra in range(a.n):
                if extra in face:
                    continue
                members, p, c = closure(face | {extra})
                if members != everything and members not in faces:
                    faces[members] = (p, c)
                    nxt.append(members)
        frontier = nxt

    if not faces:
        raise DegeneratePolytopeError("no proper face found")
    out = [FaceDescriptor(tuple(sorted(s)), p, c) for s, (p, c) in faces.items()]
    out.sort(key=lambda f: f.atom_indices)
    for f in out:
        f.check(a)
    return out


def is_vertex_set(a: AtomMatrix) -> np.ndarray:
    """Boolean per atom: True when the atom is not in the hull of the others."""
    flags = np.zeros(a.n, dtype=bool)
    for i in range(a.n):
        others = [j for j in range(a.n) if j != i]
        flags[i] = not hull_contains(a.subset(others), a.atom(i))
    return flags
