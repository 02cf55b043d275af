"""Polytope condition measures.

The pair measure phi(A, x, z) is the min-max alignment value over normalized
functionals; by LP duality it equals the length of the longest segment in
conv(A) parallel to A(x-z) with one endpoint in the hull of the support of x.
Its global minimum over pairs is the facial distance: the smallest distance
between a proper face and the hull of the remaining atoms.  The scaled
variants replace the Euclidean normalization with a mixed norm driven by an
anchor functional g.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .atoms import (AtomMatrix, DegeneratePolytopeError, FaceDescriptor, PolytopeError,
                    SimplexPoint, combine, enumerate_proper_faces, hull_contains,
                    WitnessPair, worker_count)
from .linprog import linear_program, solve_lp
from .minnorm import polytope_distance

_DIRECTION_TOL = 1e-10
_ZFACE_TOL = 1e-9


class DirectionError(PolytopeError):
    """The two simplex points map to the same hull point."""


@dataclass(frozen=True)
class PhiReport:
    """Value of a condition measure with its optimality certificates."""

    value: float
    minimizing_face: FaceDescriptor | None = None
    witness: WitnessPair | None = None
    optimal_p: np.ndarray | None = None
    face_distances: tuple[tuple[FaceDescriptor, float], ...] | None = None

    def to_json_dict(self, measure: str) -> dict:
        out = {"measure": measure, "value": float(self.value)}
        out["face_atoms"] = list(self.minimizing_face.atom_indices) if self.minimizing_face else None
        if self.witness is not None:
            out["witness_u"] = [float(t) for t in self.witness.u]
            out["witness_v"] = [float(t) for t in self.witness.v]
        else:
            out["witness_u"] = out["witness_v"] = None
        out["p"] = [float(t) for t in self.optimal_p] if self.optimal_p is not None else None
        return out


def _embed(weights: np.ndarray, indices, n: int) -> SimplexPoint:
    full = np.zeros(n)
    for idx, w in zip(indices, weights):
        full[idx] += w
    full = np.maximum(full, 0.0)
    return SimplexPoint(full / full.sum())


def _pair_direction(cols: np.ndarray, x: SimplexPoint, z: SimplexPoint) -> np.ndarray:
    if x.n != cols.shape[1] or z.n != cols.shape[1]:
        raise PolytopeError("simplex points do not match the atom count")
    return cols @ (x.weights - z.weights)


def _minmax_lp(cols: np.ndarray, support_idx, d_unit: np.ndarray):
    """Solve min {t + tau : A_I'p <= t 1, A'p >= -tau 1, <d,p> = 1}.

    Returns (value, p, w, y, lam): the optimal functional plus the dual
    segment witnesses with A_I w - A y = lam d and weight sums 1.
    """
    m, n = cols.shape
    idx = list(support_idx)
    nvar = m + 2  # p, t, tau
    cost = np.zeros(nvar)
    cost[m] = cost[m + 1] = 1.0

    a_ge = np.zeros((len(idx) + n, nvar))
    for r, i in enumerate(idx):
        a_ge[r, :m] = -cols[:, i]
        a_ge[r, m] = 1.0
    for j in range(n):
        a_ge[len(idx) + j, :m] = cols[:, j]
        a_ge[len(idx) + j, m + 1] = 1.0
    b_ge = np.zeros(len(idx) + n)
    a_eq = np.zeros((1, nvar))
    a_eq[0, :m] = d_unit
    lp = linear_program(cost, a_eq=a_eq, b_eq=[1.0], a_ge=a_ge, b_ge=b_ge, nonneg=False)
    sol = solve_lp(lp)
    if sol.status != "optimal":
        raise PolytopeError(f"alignment LP ended with status {sol.status}")
    p = sol.x[:m]
    w = np.maximum(sol.y_ge[:len(idx)], 0.0)
    y = np.maximum(sol.y_ge[len(idx):], 0.0)
    lam = float(sol.y_eq[0])
    return float(sol.value), p, w, y, lam


def _segment_lp(cols: np.ndarray, support_idx, d_unit: np.ndarray):
    """Solve max {lam : A_I w - A y = lam d, 1'w = 1'y = 1, w, y, lam >= 0}."""
    m, n = cols.shape
    idx = list(support_idx)
    k = len(idx)
    nvar = k + n + 1
    cost = np.zeros(nvar)
    cost[-1] = 1.0
    a_eq = np.zeros((m + 2, nvar))
    for r in range(m):
        a_eq[r, :k] = cols[r, idx]
        a_eq[r, k:k + n] = -cols[r, :]
        a_eq[r, -1] = -d_unit[r]
    a_eq[m, :k] = 1.0
    a_eq[m + 1, k:k + n] = 1.0
    b_eq = np.zeros(m + 2)
    b_eq[m] = b_eq[m + 1] = 1.0
    lp = linear_program(cost, sense="max", a_eq=a_eq, b_eq=b_eq, nonneg=True)
    sol = solve_lp(lp)
    if sol.status != "optimal":
        raise PolytopeError(f"segment LP ended with status {sol.status}")
    return float(sol.value), np.maximum(sol.x[:k], 0.0), np.maximum(sol.x[k:k + n], 0.0)


def phi_pair(a: AtomMatrix, x: SimplexPoint, z: SimplexPoint) -> PhiReport:
    """Pair condition measure with optimal functional and segment witnesses."""
    direction = _pair_direction(a.columns, x, z)
    nrm = float(np.linalg.norm(direction))
    if nrm <= _DIRECTION_TOL:
        raise DirectionError("A(x - z) vanishes; the pair measure is undefined")
    d_unit = direction / nrm
    value, p, w_sup, y_vec, _ = _minmax_lp(a.columns, x.support, d_unit)
    w = _embed(w_sup, x.support, a.n)
    y = _embed(y_vec, range(a.n), a.n)
    return PhiReport(value=value, witness=WitnessPair(u=combine(a, w), v=combine(a, y), w=w, y=y),
                     optimal_p=p)


def phi_pair_dual(a: AtomMatrix, x: SimplexPoint, z: SimplexPoint) -> float:
    """Longest-segment value; equals phi_pair by LP duality (cross-check route)."""
    direction = _pair_direction(a.columns, x, z)
    nrm = float(np.linalg.norm(direction))
    if nrm <= _DIRECTION_TOL:
        raise DirectionError("A(x - z) vanishes; the pair measure is undefined")
    value, _, _ = _segment_lp(a.columns, x.support, direction / nrm)
    return value


def facial_distance(a: AtomMatrix) -> PhiReport:
    """Minimum distance between a proper face and the hull of the other atoms.

    Returns the minimizing face, the closest-point witnesses (u on the
    complement side, v on the face), and the per-face distance table.
    """
    faces = enumerate_proper_faces(a)
    all_idx = set(range(a.n))

    def face_distance(face: FaceDescriptor):
        comp = sorted(all_idx - set(face.atom_indices))
        res = polytope_distance(a.subset(face.atom_indices).T, a.subset(comp).T)
        return face, comp, res

    workers = worker_count()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(face_distance, faces))
    else:
        results = [face_distance(f) for f in faces]

    best = min(results, key=lambda item: item[2].distance)
    face, comp, res = best
    v_point, u_point = res.u, res.v  # res.u lies on the face, res.v on the complement
    y = _embed(res.coeff_s, face.atom_indices, a.n)
    w = _embed(res.coeff_t, comp, a.n)
    dist = res.distance
    if dist <= 0.0:
        raise DegeneratePolytopeError("facial distance vanished; inconsistent atom set")
    p = (u_point - v_point) / dist
    table = tuple((f, r.distance) for f, _, r in results)
    return PhiReport(value=dist, minimizing_face=face,
                     witness=WitnessPair(u=u_point, v=v_point, w=w, y=y),
                     optimal_p=p, face_distances=table)


def smallest_containing_face(a: AtomMatrix, points) -> FaceDescriptor | None:
    """Smallest face of conv(A) containing every point; None means the whole
    polytope is the smallest such face."""
    pts = [np.asarray(p, dtype=float).ravel() for p in points]
    if not pts:
        raise PolytopeError("no points given")
    for p in pts:
        if not hull_contains(a.columns, p):
            raise PolytopeError("point outside the polytope")
    faces = enumerate_proper_faces(a)
    candidates = []
    for face in faces:
        vals_atoms = face.functional @ a.columns
        scale = max(1.0, float(np.abs(vals_atoms).max()), abs(face.offset))
        if all(abs(float(face.functional @ p) - face.offset) <= _ZFACE_TOL * scale for p in pts):
            candidates.append(face)
    if not candidates:
        return None
    meet = set(candidates[0].atom_indices)
    for face in candidates[1:]:
        meet &= set(face.atom_indices)
    target = tuple(sorted(meet))
    for face in faces:
        if face.atom_indices == target:
            return face
    raise PolytopeError("face lattice inconsistency")  # pragma: no cover


def local_phi_lower_bound(a: AtomMatrix, zpoints) -> float:
    """Lower bound on the localized measure for anchors in ``zpoints``:
    the minimum face-to-complement distance over faces of the smallest face
    containing the anchor image."""
    zlist = list(zpoints)
    if not zlist:
        raise PolytopeError("empty anchor set")
    images = [combine(a, z) for z in zlist]
    host = smallest_containing_face(a, images)
    faces = enumerate_proper_faces(a)
    if host is not None:
        allowed = set(host.atom_indices)
        faces = [f for f in faces if set(f.atom_indices) <= allowed]
    all_idx = set(range(a.n))
    best = np.inf
    for face in faces:
        comp = sorted(all_idx - set(face.atom_indices))
        res = polytope_distance(a.subset(face.atom_indices).T, a.subset(comp).T)
        best = min(best, res.distance)
    return float(best)


def pdirw(a: AtomMatrix, r, u) -> float:
    """Pyramidal directional width of the atom set at base point u along r.

    Equals min over atom subsets S with u in conv(S) of
    max_{atom, s in S} <r/|r|, atom - s>.  The subset minimum reduces to a
    threshold scan: only the largest attainable min-dot over S matters, and
    for each candidate level the superlevel atom set is the easiest to
    contain u.
    """
    r = np.asarray(r, dtype=float).ravel()
    nrm = float(np.linalg.norm(r))
    if nrm <= _DIRECTION_TOL:
        raise PolytopeError("zero direction")
    u = np.asarray(u, dtype=float).ravel()
    if not hull_contains(a.columns, u):
        raise PolytopeError("base point outside the polytope")
    dots = (r / nrm) @ a.columns
    scale = max(1.0, float(np.abs(dots).max()))
    levels = np.unique(dots)[::-1]
    top = float(dots.max())
    for level in levels:
        members = np.nonzero(dots >= level - 1e-12 * scale)[0]
        if hull_contains(a.columns[:, members], u):
            return top - float(level)
    raise PolytopeError("unreachable: full atom set must contain u")  # pragma: no cover


@dataclass(frozen=True)
class ScaledInstance:
    """Anchor face and functional spread of a row-extended atom matrix."""

    abar: AtomMatrix
    g: np.ndarray
    zg_face: tuple[int, ...]
    delta_g: float


def scaled_instance(abar: AtomMatrix, g) -> ScaledInstance:
    """Anchor data for the scaled measure: the atoms minimizing <(g,1), col>
    (ties within 1e-9) and the spread of that functional across atoms."""
    g = np.asarray(g, dtype=float).ravel()
    if abar.m != g.shape[0] + 1:
        raise PolytopeError("g must have one entry fewer than the matrix has rows")
    dots = g @ abar.columns[:-1, :] + abar.columns[-1, :]
    lo, hi = float(dots.min()), float(dots.max())
    tol = _ZFACE_TOL * max(1.0, float(np.abs(dots).max()))
    face = tuple(int(j) for j in np.nonzero(dots <= lo + tol)[0])
    return ScaledInstance(abar=abar, g=np.array(g), zg_face=face, delta_g=hi - lo)


def norm_g(vbar, g) -> float:
    """Mixed norm sqrt(|v|^2 + |g.v + v_last|) on row-extended vectors."""
    vbar = np.asarray(vbar, dtype=float).ravel()
    g = np.asarray(g, dtype=float).ravel()
    v = vbar[:-1]
    return float(np.sqrt(v @ v + abs(float(g @ v) + float(vbar[-1]))))


def _project_to_anchor_face(z: SimplexPoint, si: ScaledInstance) -> SimplexPoint:
    dots = si.g @ si.abar.columns[:-1, :] + si.abar.columns[-1, :]
    lo = float(dots.min())
    tol = _ZFACE_TOL * max(1.0, float(np.abs(dots).max()))
    gap = float(z.weights @ (dots - lo))
    if gap > tol * max(1.0, si.delta_g):
        raise PolytopeError("anchor point is not on the minimizing face")
    w = z.weights.copy()
    mask = np.ones(z.n, dtype=bool)
    mask[list(si.zg_face)] = False
    w[mask] = 0.0
    total = w.sum()
    if total <= 0.0:
        raise PolytopeError("anchor point has no weight on the minimizing face")
    return SimplexPoint(w / total)


def bar_phi_pair(abar: AtomMatrix, g, x: SimplexPoint, z: SimplexPoint) -> float:
    """Scaled pair measure: the min-max alignment LP normalized by the mixed
    norm, with the anchor projected onto the minimizing face."""
    si = scaled_instance(abar, g)
    z = _project_to_anchor_face(z, si)
    direction = _pair_direction(abar.columns, x, z)
    nrm = norm_g(direction, si.g)
    if nrm <= _DIRECTION_TOL or float(np.linalg.norm(direction)) <= _DIRECTION_TOL:
        raise DirectionError("scaled direction vanishes")
    value, _, _, _, _ = _minmax_lp(abar.columns, x.support, direction / nrm)
    return value


def bar_phi_pair_dual(abar: AtomMatrix, g, x: SimplexPoint, z: SimplexPoint):
    """Longest-segment form of the scaled pair measure; returns the value and
    the witness points (in the extended space) whose mixed-norm gap equals it."""
    si = scaled_instance(abar, g)
    z = _project_to_anchor_face(z, si)
    direction = _pair_direction(abar.columns, x, z)
    nrm = norm_g(direction, si.g)
    if nrm <= _DIRECTION_TOL or float(np.linalg.norm(direction)) <= _DIRECTION_TOL:
        raise DirectionError("scaled direction vanishes")
    value, w_sup, y_vec = _segment_lp(abar.columns, x.support, direction / nrm)
    w = _embed(w_sup, x.support, abar.n)
    y = _embed(y_vec, range(abar.n), abar.n)
    return value, combine(abar, w), combine(abar, y)


def hat_matrix(abar: AtomMatrix, g) -> AtomMatrix:
    """Rescaled matrix whose plain pair measure lower-bounds the scaled one
    when the anchor functional has positive spread."""
    si = scaled_instance(abar, g)
    if si.delta_g <= 0.0:
        raise PolytopeError("hat matrix requires positive functional spread")
    top = abar.columns[:-1, :]
    last = (si.g @ top + abar.columns[-1, :]) / np.sqrt(si.delta_g)
    return AtomMatrix(np.vstack([top, last[None, :]]))


def bar_phi_bounds(abar: AtomMatrix, g, samples: int = 64, seed: int = 0):
    """Certified bracket for the global scaled measure.

    The lower bound goes through the reduction to a plain pair measure (the
    first-rows matrix when the anchor spread vanishes, the hat matrix
    otherwise) followed by the localized face bound.  The upper bound is the
    minimum of the scaled pair measure over all vertex anchor pairs plus
    random sampled pairs; any finite minimization upper-bounds the infimum.
    """
    si = scaled_instance(abar, g)
    if si.delta_g <= 0.0:
        reduced = AtomMatrix(abar.columns[:-1, :])
    else:
        reduced = hat_matrix(abar, g)
    if not reduced.has_two_distinct_columns:
        raise DegeneratePolytopeError("reduced matrix has no two distinct columns")
    anchors = [SimplexPoint.vertex(abar.n, j) for j in si.zg_face]
    lower = local_phi_lower_bound(reduced, anchors)

    rng = np.random.default_rng(seed)
    upper = np.inf
    candidates: list[tuple[SimplexPoint, SimplexPoint]] = []
    for i in range(abar.n):
        for j in si.zg_face:
            candidates.append((SimplexPoint.vertex(abar.n, i), SimplexPoint.vertex(abar.n, j)))
    for _ in range(samples):
        x = SimplexPoint(rng.dirichlet(np.ones(abar.n)))
        zw = np.zeros(abar.n)
        zw[list(si.zg_face)] = rng.dirichlet(np.ones(len(si.zg_face)))
        candidates.append((x, SimplexPoint(zw)))
    for x, z in candidates:
        try:
            upper = min(upper, bar_phi_pair(abar, g, x, z))
        except DirectionError:
            continue
    if not np.isfinite(upper):
        raise DegeneratePolytopeError("no valid anchor pair found")
    return float(lower), float(upper)
