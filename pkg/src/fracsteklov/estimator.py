"""Estimator-style front end for the solver.

``fit`` takes a :class:`~fracsteklov.core.ProblemSpec` (or a manufactured
problem) in place of a design matrix and runs the scheme; ``predict`` then
evaluates the discrete solution at arbitrary ``(x, t)`` points by bilinear
interpolation. Hyper-parameters follow the usual ``get_params``/``set_params``
protocol, so the solver can be cloned and grid-searched over mesh sizes.
"""

from __future__ import annotations

import numpy as np
from scipy.interpolate import RegularGridInterpolator
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .analysis import classify_stability
from .core import ProblemSpec, build_grid, l2_norm
from .mms import ManufacturedProblem
from .stepper import advance

__all__ = ["FractionalDiffusionSolver", "check_problem"]


def check_problem(problem) -> ProblemSpec:
    """Accept a ``ProblemSpec`` or ``ManufacturedProblem``; return the spec."""
    if isinstance(problem, ManufacturedProblem):
        return problem.spec
    if isinstance(problem, ProblemSpec):
        return problem
    raise TypeError(
        f"expected ProblemSpec or ManufacturedProblem, got {type(problem).__name__}"
    )


class FractionalDiffusionSolver(RegressorMixin, BaseEstimator):
    """Solve a nonlocal time-fractional diffusion problem on a uniform mesh.

    Parameters
    ----------
    n_space : int, default=160
        Number of space intervals ``N``.
    n_time : int or None, default=None
        Number of time steps ``N_T``; ``None`` uses ``n_space`` (``h = tau``
        when ``T = 1``).
    strict : bool, default=False
        Raise instead of warn when no sufficient stability condition holds.

    Attributes
    ----------
    grid_ : GridSpec
    solution_ : ndarray of shape (n_time + 1, n_space + 1)
        Layer ``n`` is row ``n``.
    stability_ : StabilityVerdict
    warnings_ : list of str
    """

    def __init__(self, n_space=160, n_time=None, strict=False):
        self.n_space = n_space
        self.n_time = n_time
        self.strict = strict

    def fit(self, problem, y=None):
        spec = check_problem(problem)
        n_time = self.n_space if self.n_time is None else self.n_time
        self.grid_ = build_grid(spec, self.n_space, n_time)
        self.stability_ = classify_stability(spec.alpha, spec.beta, spec.gamma)
        self.warnings_ = list(spec.warnings)
        if not self.stability_.guaranteed:
            msg = f"no stability guarantee for (alpha, beta, gamma) = ({spec.alpha}, {spec.beta}, {spec.gamma})"
            if self.strict:
                raise ValueError(msg)
            self.warnings_.append(msg)
        self.solution_ = advance(spec, self.grid_).layers.copy()
        t = np.arange(self.grid_.N_T + 1) * self.grid_.tau
        self._interp = RegularGridInterpolator((t, self.grid_.x), self.solution_)
        return self

    def predict(self, X):
        """Interpolated solution at points ``X[:, 0] = x``, ``X[:, 1] = t``."""
        check_is_fitted(self, "solution_")
        X = check_array(X, ensure_min_features=2)
        if X.shape[1] != 2:
            raise ValueError(f"X must have two columns (x, t), got {X.shape[1]}")
        x, t = X[:, 0], X[:, 1]
        if np.any((x < 0) | (x > 1)) or np.any((t < 0) | (t > self.grid_.T)):
            raise ValueError("points must lie in [0, 1] x [0, T]")
        return self._interp(np.column_stack([t, x]))

    def errors(self, exact):
        """``(max_n l2_norm(z^n), max |z|)`` against ``exact(x, t)``."""
        check_is_fitted(self, "solution_")
        g = self.grid_
        z = self.solution_ - np.array([exact(g.x, g.t(n)) for n in range(g.N_T + 1)])
        return max(l2_norm(row, g) for row in z), float(np.max(np.abs(z)))
