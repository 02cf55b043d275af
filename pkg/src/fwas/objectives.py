"""Objective functions for minimization over an atom hull.

Three variants: convex quadratics (with exact line search available),
composites h(Eu) + <b,u> with strongly convex h, and generic smooth convex
functions given by callbacks plus curvature constants.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np


class ObjectiveError(Exception):
    pass


def _check_mu_le_l(mu, lip):
    if mu is not None and lip is not None and mu > lip + 1e-12:
        raise ObjectiveError(f"strong convexity {mu} exceeds the gradient Lipschitz bound {lip}")


@dataclass(frozen=True)
class QuadraticObjective:
    """f(u) = 0.5 u'Qu + b'u with Q symmetric positive semidefinite."""

    q: np.ndarray
    b: np.ndarray
    kind: str = field(default="quadratic", init=False)

    def __post_init__(self) -> None:
        q = np.atleast_2d(np.asarray(self.q, dtype=float))
        b = np.asarray(self.b, dtype=float).ravel()
        if q.shape[0] != q.shape[1] or q.shape[0] != b.shape[0]:
            raise ObjectiveError("Q must be square and match b")
        if float(np.abs(q - q.T).max()) > 1e-10 * max(1.0, float(np.abs(q).max())):
            raise ObjectiveError("Q must be symmetric within 1e-10")
        q = 0.5 * (q + q.T)
        eigvals = np.linalg.eigvalsh(q)
        if eigvals.min() < -1e-10 * max(1.0, float(eigvals.max()), 1.0):
            raise ObjectiveError("Q must be positive semidefinite")
        q.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "b", b)

    @property
    def dim(self) -> int:
        return self.b.shape[0]

    def value(self, u: np.ndarray) -> float:
        return 0.5 * float(u @ (self.q @ u)) + float(self.b @ u)

    def gradient(self, u: np.ndarray) -> np.ndarray:
        return self.q @ u + self.b

    @property
    def lipschitz(self) -> float:
        return max(float(np.linalg.eigvalsh(self.q).max()), 0.0)

    @property
    def strong_convexity(self) -> float:
        return max(float(np.linalg.eigvalsh(self.q).min()), 0.0)

    def sqrt_q(self) -> np.ndarray:
        """Symmetric square root; eigenvalues below 1e-10 are clipped to 0."""
        vals, vecs = np.linalg.eigh(self.q)
        vals = np.where(vals < 1e-10, 0.0, vals)
        return (vecs * np.sqrt(vals)) @ vecs.T


_BUILTIN_H = {
    "half-squared-norm": {
        "value": lambda w: 0.5 * float(w @ w),
        "gradient": lambda w: np.asarray(w, dtype=float),
        "mu": 1.0,
        "lipschitz": 1.0,
    },
}


def builtin_h(name: str) -> dict:
    if name not in _BUILTIN_H:
        raise ObjectiveError(f"unknown builtin inner function {name!r}")
    return _BUILTIN_H[name]


@dataclass(frozen=True)
class CompositeObjective:
    """f(u) = h(Eu) + <b, u> with mu-strongly convex h and Lipschitz grad h."""

    e: np.ndarray
    b: np.ndarray
    h_value: Callable[[np.ndarray], float]
    h_gradient: Callable[[np.ndarray], np.ndarray]
    mu: float
    lipschitz: float
    h_name: str | None = None
    kind: str = field(default="composite", init=False)

    def __post_init__(self) -> None:
        e = np.atleast_2d(np.asarray(self.e, dtype=float))
        b = np.asarray(self.b, dtype=float).ravel()
        if e.shape[1] != b.shape[0]:
            raise ObjectiveError("E and b disagree on the ambient dimension")
        if self.mu <= 0 or self.lipschitz <= 0:
            raise ObjectiveError("composite objectives need positive mu and L")
        _check_mu_le_l(self.mu, self.lipschitz)
        e.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "e", e)
        object.__setattr__(self, "b", b)

    @property
    def dim(self) -> int:
        return self.b.shape[0]

    def value(self, u: np.ndarray) -> float:
        return float(self.h_value(self.e @ u)) + float(self.b @ u)

    def gradient(self, u: np.ndarray) -> np.ndarray:
        return self.e.T @ np.asarray(self.h_gradient(self.e @ u), dtype=float) + self.b

    @staticmethod
    def with_builtin(e, b, name: str, mu: float | None = None,
                     lipschitz: float | None = None) -> "CompositeObjective":
        spec = builtin_h(name)
        return CompositeObjective(e=e, b=b, h_value=spec["value"], h_gradient=spec["gradient"],
                                  mu=spec["mu"] if mu is None else mu,
                                  lipschitz=spec["lipschitz"] if lipschitz is None else lipschitz,
                                  h_name=name)


@dataclass(frozen=True)
class GenericSmoothObjective:
    """Smooth convex f given by callbacks plus a gradient Lipschitz bound."""

    f_value: Callable[[np.ndarray], float]
    f_gradient: Callable[[np.ndarray], np.ndarray]
    lipschitz: float
    mu: float | None = None
    kind: str = field(default="generic", init=False)

    def __post_init__(self) -> None:
        if self.lipschitz <= 0:
            raise ObjectiveError("generic objectives need a positive Lipschitz bound")
        if self.mu is not None and self.mu < 0:
            raise ObjectiveError("strong convexity constant must be nonnegative")
        _check_mu_le_l(self.mu, self.lipschitz)

    def value(self, u: np.ndarray) -> float:
        return float(self.f_value(u))

    def gradient(self, u: np.ndarray) -> np.ndarray:
        return np.asarray(self.f_gradient(u), dtype=float)


Objective = QuadraticObjective | CompositeObjective | GenericSmoothObjective
