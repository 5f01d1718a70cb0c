"""Stability classification, the delta-transform, and convergence orders.

When ``alpha != beta`` the substitution ``v(x) = delta*u(x) + u(1-x)`` maps
the problem onto one with equal proportionality and flux parameters, for
which the energy estimate applies directly. The helpers here pick ``delta``,
transform the parameters, data and discrete fields, and report which
sufficient stability condition (if any) holds.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .core import ProblemSpec

__all__ = [
    "StabilityCase",
    "StabilityVerdict",
    "NoRealRoots",
    "DegenerateParameters",
    "DegenerateDelta",
    "classify_stability",
    "delta_roots",
    "transform_params",
    "transform_field",
    "inverse_transform_field",
    "transform_problem",
    "convergence_order",
]

_POLE_SEP = 1e-9


class StabilityCase(str, enum.Enum):
    DIRECT = "Direct"
    CASE1 = "Case1"
    CASE2 = "Case2"
    NO_GUARANTEE = "NoGuarantee"


class NoRealRoots(ValueError):
    pass


class DegenerateParameters(ValueError):
    pass


class DegenerateDelta(ValueError):
    pass


@dataclass(frozen=True)
class StabilityVerdict:
    case: StabilityCase
    delta: Optional[float] = None
    transformed: Optional[tuple[float, float, float]] = None

    @property
    def guaranteed(self) -> bool:
        return self.case is not StabilityCase.NO_GUARANTEE

    def to_dict(self) -> dict:
        a1, b1, g1 = self.transformed if self.transformed else (None, None, None)
        return {
            "case": self.case.value,
            "delta": self.delta,
            "alpha1": a1,
            "beta1": b1,
            "gamma1": g1,
        }

    @classmethod
    def from_dict(cls, d: dict) -> StabilityVerdict:
        tr = None
        if d.get("alpha1") is not None:
            tr = (d["alpha1"], d["beta1"], d["gamma1"])
        return cls(StabilityCase(d["case"]), d.get("delta"), tr)


def delta_roots(alpha: float, beta: float) -> tuple[float, float]:
    """Roots of ``d^2 - 2 (alpha*beta - 1)/(alpha - beta) d + 1 = 0``.

    Returns ``(delta1, delta2)`` with the minus and plus branch of the square
    root respectively.
    """
    if alpha == beta:
        raise DegenerateParameters("alpha == beta: no transform is needed or defined")
    disc = (alpha * alpha - 1.0) * (beta * beta - 1.0)
    if not disc > 0.0:
        raise NoRealRoots(f"(alpha^2-1)(beta^2-1) = {disc:.3g} <= 0")
    root = math.sqrt(disc)
    num = alpha * beta - 1.0
    d1 = (num - root) / (alpha - beta)
    d2 = (num + root) / (alpha - beta)
    # recover the small-magnitude root through the product to avoid cancellation
    if abs(d1) < abs(d2):
        d1 = 1.0 / d2
    else:
        d2 = 1.0 / d1
    return d1, d2


def _check_poles(alpha, beta, delta):
    for pole, name in ((-alpha, "-alpha"), (beta, "beta"), (1.0, "1"), (-1.0, "-1")):
        if abs(delta - pole) < _POLE_SEP * max(1.0, abs(pole)):
            raise DegenerateDelta(f"delta = {delta!r} collides with {name} = {pole!r}")


def transform_params(alpha, beta, gamma, delta):
    """Parameters of the transformed problem.

    Returns
    -------
    alpha1, beta1, gamma1, mu_factor : float
        ``mu_factor`` scales the boundary datum: ``mu1 = mu_factor * mu``.
    """
    _check_poles(alpha, beta, delta)
    alpha1 = (delta * alpha + 1.0) / (delta + alpha)
    beta1 = (delta * beta - 1.0) / (delta - beta)
    gamma1 = gamma * (delta * delta - 1.0) / ((delta + alpha) * (delta - beta))
    mu_factor = (delta * delta - 1.0) / (delta - beta)
    return alpha1, beta1, gamma1, mu_factor


def classify_stability(alpha: float, beta: float, gamma: float) -> StabilityVerdict:
    """Which sufficient stability condition holds for ``(alpha, beta, gamma)``."""
    if alpha == beta:
        if alpha != 1.0 and gamma <= 0.0:
            return StabilityVerdict(StabilityCase.DIRECT)
        return StabilityVerdict(StabilityCase.NO_GUARANTEE)

    if abs(alpha) < 1.0 and abs(beta) < 1.0 and gamma <= 0.0:
        case, pick = StabilityCase.CASE1, 0
    elif abs(alpha) > 1.0 and abs(beta) > 1.0 and alpha * beta * gamma <= 0.0:
        case, pick = StabilityCase.CASE2, 1
    else:
        return StabilityVerdict(StabilityCase.NO_GUARANTEE)

    delta = delta_roots(alpha, beta)[pick]
    a1, b1, g1, _ = transform_params(alpha, beta, gamma, delta)
    return StabilityVerdict(case, delta, (a1, b1, g1))


def transform_field(y, delta: float) -> np.ndarray:
    """``v_i = delta * y_i + y_{N-i}``; works on the last axis."""
    y = np.asarray(y, dtype=float)
    return delta * y + y[..., ::-1]


def inverse_transform_field(v, delta: float) -> np.ndarray:
    """Inverse of :func:`transform_field`: ``(delta v_i - v_{N-i}) / (delta^2 - 1)``."""
    v = np.asarray(v, dtype=float)
    return (delta * v - v[..., ::-1]) / (delta * delta - 1.0)


def transform_problem(problem: ProblemSpec, delta: float) -> ProblemSpec:
    """The problem solved by ``v(x, t) = delta u(x, t) + u(1 - x, t)``.

    Requires a mirror-symmetric coefficient.
    """
    a1, b1, g1, mf = transform_params(problem.alpha, problem.beta, problem.gamma, delta)
    f, mu, u0 = problem.f, problem.mu, problem.u0

    def f1(x, t):
        x = np.asarray(x, dtype=float)
        return delta * np.asarray(f(x, t)) + np.asarray(f(1.0 - x, t))

    def mu1(t):
        return mf * mu(t)

    def v0(x):
        x = np.asarray(x, dtype=float)
        return delta * np.asarray(u0(x)) + np.asarray(u0(1.0 - x))

    return ProblemSpec(
        nu=problem.nu, alpha=a1, beta=b1, gamma=g1,
        k=problem.k, f=f1, mu=mu1, u0=v0, T=problem.T,
        k_symmetric=problem.k_symmetric,
    )


def convergence_order(errors: Sequence[tuple[float, float]]) -> list[float]:
    """Observed orders ``log(e_j/e_{j+1}) / log(h_j/h_{j+1})`` between consecutive grids."""
    if len(errors) < 2:
        raise ValueError("need at least two (h, error) pairs")
    hs = [float(h) for h, _ in errors]
    es = [float(e) for _, e in errors]
    if any(not e > 0.0 for e in es):
        raise ValueError("errors must be positive")
    if any(not h2 < h1 for h1, h2 in zip(hs, hs[1:])) or any(not h > 0.0 for h in hs):
        raise ValueError("mesh sizes must be positive and strictly decreasing")
    return [
        math.log(e1 / e2) / math.log(h1 / h2)
        for (h1, e1), (h2, e2) in zip(zip(hs, es), zip(hs[1:], es[1:]))
    ]
