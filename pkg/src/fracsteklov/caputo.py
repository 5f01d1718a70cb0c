r"""L2-1\ :sub:`sigma` weights and the discrete Caputo derivative.

For the step from ``t_n`` to ``t_{n+1}`` the Caputo derivative at the
off-grid point ``t_{n+sigma}``, ``sigma = 1 - nu/2``, is approximated by

.. math::

    \Delta^\nu y = \frac{\tau^{-\nu}}{\Gamma(2-\nu)}
        \sum_{s=0}^{n} c_{n-s} (y^{s+1} - y^s).

The weights ``c_s`` are built from two sequences ``a_l`` and ``b_l`` that
depend only on ``l``, so they are computed once per run and sliced per level.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import SolutionHistory

__all__ = ["WeightTable", "ab_coefficients", "compute_weights", "weights_from_ab", "caputo_apply"]


@dataclass(frozen=True)
class WeightTable:
    """Convolution weights serving the step ``t_n -> t_{n+1}``."""

    n: int
    c: np.ndarray
    scale: float  # tau^(1-nu) / Gamma(2-nu)
    tau: float

    @property
    def kappa(self) -> float:
        """Coefficient of the unknown layer, ``c_0 / (tau^nu Gamma(2-nu))``."""
        return self.c[0] * self.scale / self.tau


def _check_order(nu: float) -> None:
    if not 0.0 < nu < 1.0:
        raise ValueError(f"nu must lie in (0, 1), got {nu}")


def ab_coefficients(nu: float, sigma: float, m: int) -> tuple[np.ndarray, np.ndarray]:
    """Return ``a_l`` for ``l = 0..m`` and ``b_l`` for ``l = 0..m``.

    ``b_0`` is unused and set to zero so that ``b[l]`` indexes naturally.
    """
    _check_order(nu)
    l = np.arange(m + 1, dtype=float)
    p1 = np.exp((1.0 - nu) * np.log(l + sigma))
    p2 = np.exp((2.0 - nu) * np.log(l + sigma))

    a = np.empty(m + 1)
    a[0] = p1[0]
    a[1:] = p1[1:] - p1[:-1]

    b = np.zeros(m + 1)
    b[1:] = (p2[1:] - p2[:-1]) / (2.0 - nu) - 0.5 * (p1[1:] + p1[:-1])
    return a, b


def weights_from_ab(a: np.ndarray, b: np.ndarray, n: int) -> np.ndarray:
    """Assemble ``c_0..c_n`` from precomputed ``a``/``b`` (length >= n + 1)."""
    if n == 0:
        return a[:1].copy()
    c = np.empty(n + 1)
    c[0] = a[0] + b[1]
    c[1:n] = a[1:n] + b[2 : n + 1] - b[1:n]
    c[n] = a[n] - b[n]
    return c


def compute_weights(nu: float, sigma: float, n: int, tau: float) -> WeightTable:
    """Weights ``c_s^{(nu, sigma)}``, ``s = 0..n``, for time level ``n``.

    Parameters
    ----------
    nu : float
        Derivative order in (0, 1).
    sigma : float
        Evaluation offset, normally ``1 - nu/2``.
    n : int
        Time level; the table serves the step ``t_n -> t_{n+1}``.
    tau : float
        Time step.

    Returns
    -------
    WeightTable
    """
    _check_order(nu)
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    if tau <= 0.0:
        raise ValueError(f"tau must be positive, got {tau}")
    a, b = ab_coefficients(nu, sigma, max(n, 1))
    scale = tau ** (1.0 - nu) / math.gamma(2.0 - nu)
    return WeightTable(n=n, c=weights_from_ab(a, b, n), scale=scale, tau=tau)


def caputo_apply(history, weights: WeightTable, i=None):
    """Discrete Caputo derivative at ``t_{n+sigma}`` from layers ``0..n+1``.

    ``history`` is a :class:`SolutionHistory` or an array of shape
    ``(n + 2, ...)``. With ``i=None`` the derivative is returned for every
    node; otherwise only for node ``i``.
    """
    layers = history.layers if isinstance(history, SolutionHistory) else np.asarray(history, dtype=float)
    n = weights.n
    if layers.shape[0] != n + 2:
        raise ValueError(
            f"weights for level {n} need {n + 2} layers, history holds {layers.shape[0]}"
        )
    if i is not None:
        layers = layers[:, i]
    diffs = np.diff(layers, axis=0)  # row s is y^{s+1} - y^s
    return weights.scale / weights.tau * np.tensordot(weights.c[::-1], diffs, axes=(0, 0))
