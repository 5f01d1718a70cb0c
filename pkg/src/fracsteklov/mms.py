"""Manufactured test problem with a closed-form exact solution.

``u(x, t) = X(x) * P(t)`` with ``X(x) = (alpha+1) + sin(pi x) + (alpha-1) cos(pi x)``,
``P(t) = t^2 + t + 1`` and coefficient ``k(x) = 2 - sin(pi x)``. Source,
boundary datum and initial data are derived analytically so the measured
error is purely the discretization error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import GridSpec, ProblemSpec

__all__ = [
    "ManufacturedProblem",
    "make_problem",
    "exact_layer",
    "time_factor",
    "caputo_time_factor",
    "coefficient",
]

PI = math.pi


def time_factor(t):
    return t * t + t + 1.0


def caputo_time_factor(t, nu: float):
    """Caputo derivative of order ``nu`` of ``t^2 + t + 1`` (the constant drops out)."""
    t = np.asarray(t, dtype=float)
    return 2.0 * t ** (2.0 - nu) / math.gamma(3.0 - nu) + t ** (1.0 - nu) / math.gamma(2.0 - nu)


def coefficient(x, t=None):
    return 2.0 - np.sin(PI * np.asarray(x, dtype=float))


def coefficient_dx(x):
    return -PI * np.cos(PI * np.asarray(x, dtype=float))


def space_factor(x, alpha, deriv=0):
    """``X(x)`` or its first/second derivative."""
    s, c = np.sin(PI * np.asarray(x, dtype=float)), np.cos(PI * np.asarray(x, dtype=float))
    if deriv == 0:
        return (alpha + 1.0) + s + (alpha - 1.0) * c
    if deriv == 1:
        return PI * c - (alpha - 1.0) * PI * s
    if deriv == 2:
        return -PI * PI * s - (alpha - 1.0) * PI * PI * c
    raise ValueError(f"deriv must be 0, 1 or 2, got {deriv}")


@dataclass(frozen=True)
class ManufacturedProblem:
    nu: float
    alpha: float
    beta: float
    gamma: float
    spec: ProblemSpec
    exact: Callable

    def exact_dx(self, x, t):
        return space_factor(x, self.alpha, 1) * time_factor(t)


def make_problem(nu, alpha, beta, gamma, T_horizon=1.0) -> ManufacturedProblem:
    """Manufactured problem for order ``nu`` and boundary parameters ``alpha, beta, gamma``."""
    nu, alpha, beta, gamma = float(nu), float(alpha), float(beta), float(gamma)

    def exact(x, t):
        return space_factor(x, alpha) * time_factor(t)

    def f(x, t):
        # (k X')' = k' X' + k X''
        flux_div = coefficient_dx(x) * space_factor(x, alpha, 1) + coefficient(x) * space_factor(x, alpha, 2)
        return space_factor(x, alpha) * caputo_time_factor(t, nu) - time_factor(t) * flux_div

    def mu(t):
        # k(1) = k(0) = 2, X'(0) = pi, X'(1) = -pi, X(1) = 2
        return -2.0 * (PI * (1.0 + beta) + gamma) * time_factor(t)

    def u0(x):
        return space_factor(x, alpha)

    spec = ProblemSpec(
        nu=nu, alpha=alpha, beta=beta, gamma=gamma,
        k=coefficient, f=f, mu=mu, u0=u0, T=float(T_horizon),
    )
    return ManufacturedProblem(nu=nu, alpha=alpha, beta=beta, gamma=gamma, spec=spec, exact=exact)


def exact_layer(problem: ManufacturedProblem, grid: GridSpec, n: int) -> np.ndarray:
    if not 0 <= n <= grid.N_T:
        raise IndexError(f"level {n} outside 0..{grid.N_T}")
    return problem.exact(grid.x, grid.t(n))
