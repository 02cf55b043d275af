"""Minimum-norm point in a polytope (Wolfe's method) and hull distances.

The distance between two convex hulls is the norm of the minimum-norm point
of their Minkowski difference, which is again a polytope spanned by pairwise
generator differences; witnesses are recovered from the difference
coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_CERT_TOL = 1e-10
_MINOR_ZERO = 1e-12


class MinNormError(Exception):
    pass


def _affine_minimizer(pts: np.ndarray) -> np.ndarray:
    """Coefficients (summing to 1, possibly negative) of the least-norm
    point in the affine hull of the rows of ``pts``."""
    k = pts.shape[0]
    gram = pts @ pts.T
    sys = np.zeros((k + 1, k + 1))
    sys[:k, :k] = gram
    sys[:k, k] = 1.0
    sys[k, :k] = 1.0
    rhs = np.zeros(k + 1)
    rhs[k] = 1.0
    sol = np.linalg.lstsq(sys, rhs, rcond=None)[0]
    return sol[:k]


def min_norm_point(points, *, cert_tol=_CERT_TOL, max_major=None):
    """Euclidean-norm minimizer over the convex hull of ``points``.

    Returns ``(x, coeffs)`` where ``coeffs`` are convex coefficients over the
    input list with ``points.T @ coeffs = x``.  Optimality is certified by
    <x, p - x> >= -tol for every input point p.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[0] == 0:
        raise MinNormError("empty point list")
    k = pts.shape[0]
    scale = max(1.0, float(np.max(np.sum(pts * pts, axis=1))))
    tol = cert_tol * scale
    if max_major is None:
        max_major = 16 * k + 64

    norms = np.sum(pts * pts, axis=1)
    active = [int(np.argmin(norms))]
    lam = np.array([1.0])
    x = pts[active[0]].copy()

    for _ in range(max_major):
        dots = pts @ x
        j = int(np.argmin(dots))
        if float(x @ x) - float(dots[j]) <= tol:
            break
        if j in active:
            break  # no further progress available at this precision
        active.append(j)
        lam = np.append(lam, 0.0)
        # Minor cycle: move to the affine minimizer of the active set,
        # shrinking back onto the simplex and dropping atoms as needed.
        while True:
            sub = pts[active]
            alpha = _affine_minimizer(sub)
            if np.all(alpha > _MINOR_ZERO):
                lam = alpha
                x = sub.T @ lam
                break
            shrink = np.inf
            for i in range(len(active)):
                if alpha[i] < _MINOR_ZERO:
                    denom = lam[i] - alpha[i]
                    if denom > 1e-300:
                        shrink = min(shrink, lam[i] / denom)
            shrink = min(max(shrink, 0.0), 1.0)
            lam = (1.0 - shrink) * lam + shrink * alpha
            keep = lam > _MINOR_ZERO
            if keep.all():
                lam[np.argmin(lam)] = 0.0
                keep = lam > 0.0
            active = [a for a, k_ in zip(active, keep) if k_]
            lam = lam[keep]
            lam /= lam.sum()
            x = pts[active].T @ lam

    coeffs = np.zeros(k)
    for a, l in zip(active, lam):
        coeffs[a] += l
    coeffs = np.maximum(coeffs, 0.0)
    coeffs /= coeffs.sum()
    return pts.T @ coeffs, coeffs


@dataclass(frozen=True)
class DistanceResult:
    """Distance between conv(S) and conv(T) with closest points and their
    convex coefficients over the generator lists."""

    distance: float
    u: np.ndarray
    v: np.ndarray
    coeff_s: np.ndarray
    coeff_t: np.ndarray


def polytope_distance(gens_s, gens_t) -> DistanceResult:
    """Minimum distance between the hulls of two generator lists.

    Computed as the minimum-norm point of the pairwise difference set
    {s_i - t_j}; the two closest points are read off the difference
    coefficients.  Touching hulls report a shared witness point.
    """
    s = np.atleast_2d(np.asarray(gens_s, dtype=float))
    t = np.atleast_2d(np.asarray(gens_t, dtype=float))
    if s.shape[0] == 0 or t.shape[0] == 0:
        raise MinNormError("empty generator list")
    ks, kt = s.shape[0], t.shape[0]
    diffs = (s[:, None, :] - t[None, :, :]).reshape(ks * kt, -1)
    x, coeffs = min_norm_point(diffs)
    cmat = coeffs.reshape(ks, kt)
    w = cmat.sum(axis=1)
    y = cmat.sum(axis=0)
    u = s.T @ w
    v = t.T @ y
    dist = float(np.linalg.norm(u - v))
    if dist <= 1e-12 * max(1.0, float(np.abs(diffs).max())):
        mid = 0.5 * (u + v)
        return DistanceResult(0.0, mid, mid, w, y)
    return DistanceResult(dist, u, v, w, y)
