"""Problem and grid data model, plus the discrete norms used throughout.

Grid functions are plain 1-D ``numpy`` arrays of length ``N + 1``; a
:class:`SolutionHistory` stacks them row-wise, one row per time level.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

__all__ = [
    "NonSymmetricCoefficientWarning",
    "ProblemSpec",
    "GridSpec",
    "SolutionHistory",
    "build_grid",
    "l2_norm",
    "c_norm",
    "error_field",
]

Fn2 = Callable[[float, float], float]

_PROBE_POINTS = 65
_SYMMETRY_TOL = 1e-12


class NonSymmetricCoefficientWarning(UserWarning):
    """Coefficient k(x, t) is not mirror-symmetric about x = 1/2."""


@dataclass(frozen=True)
class ProblemSpec:
    """Continuous nonlocal boundary value problem.

    ``k``, ``f`` take ``(x, t)``; ``mu`` takes ``t``; ``u0`` takes ``x``.
    All callables must accept numpy arrays for ``x``.
    """

    nu: float
    alpha: float
    beta: float
    gamma: float
    k: Fn2
    f: Fn2
    mu: Callable[[float], float]
    u0: Callable[[np.ndarray], np.ndarray]
    T: float = 1.0
    k_symmetric: bool = True
    warnings: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        if not 0.0 < self.nu < 1.0:
            raise ValueError(f"nu must lie in (0, 1), got {self.nu}")
        if not self.T > 0.0:
            raise ValueError(f"T must be positive, got {self.T}")

        # nodes and midpoints of a 64-cell probe mesh, a few time slices
        x = np.linspace(0.0, 1.0, 2 * _PROBE_POINTS - 1)
        notes = list(self.warnings)
        for t in np.linspace(0.0, self.T, 5):
            kx = np.asarray(self.k(x, t), dtype=float) * np.ones_like(x)
            if not np.all(kx > 0.0):
                raise ValueError(
                    f"coefficient k must be bounded below by a positive constant "
                    f"(min k = {kx.min():.3g} at t = {t:.3g})"
                )
            if self.k_symmetric:
                gap = np.max(np.abs(kx - kx[::-1]))
                if gap > _SYMMETRY_TOL:
                    msg = (
                        f"k(x,t) != k(1-x,t) (max gap {gap:.3e} at t={t:.3g}); "
                        "stability and convergence are not guaranteed"
                    )
                    warnings.warn(msg, NonSymmetricCoefficientWarning, stacklevel=3)
                    notes.append(msg)
                    break
        object.__setattr__(self, "warnings", tuple(notes))


@dataclass(frozen=True)
class GridSpec:
    """Uniform space-time mesh on [0, 1] x [0, T]."""

    N: int
    N_T: int
    T: float
    nu: float

    @property
    def h(self) -> float:
        return 1.0 / self.N

    @property
    def tau(self) -> float:
        return self.T / self.N_T

    @property
    def sigma(self) -> float:
        return 1.0 - 0.5 * self.nu

    @property
    def x(self) -> np.ndarray:
        return np.arange(self.N + 1) * self.h

    def t(self, n: int) -> float:
        return n * self.tau

    def t_sigma(self, n: int) -> float:
        """Off-grid evaluation time ``(n + sigma) * tau`` for the step n -> n+1."""
        return (n + self.sigma) * self.tau


def build_grid(spec: ProblemSpec, N: int, N_T: int) -> GridSpec:
    if int(N) != N or N < 2:
        raise ValueError(f"N must be an integer >= 2, got {N}")
    if int(N_T) != N_T or N_T < 1:
        raise ValueError(f"N_T must be an integer >= 1, got {N_T}")
    return GridSpec(N=int(N), N_T=int(N_T), T=float(spec.T), nu=float(spec.nu))


class SolutionHistory:
    """All computed time layers ``y^0 ... y^n`` on one grid.

    Storage is preallocated for ``N_T + 1`` levels; :attr:`layers` is a view
    onto the filled part only.
    """

    def __init__(self, grid: GridSpec, y0: np.ndarray):
        y0 = np.asarray(y0, dtype=float)
        if y0.shape != (grid.N + 1,):
            raise ValueError(f"layer 0 must have {grid.N + 1} values, got {y0.shape}")
        self.grid = grid
        self._data = np.empty((grid.N_T + 1, grid.N + 1))
        self._data[0] = y0
        self._count = 1

    @classmethod
    def from_layers(cls, grid: GridSpec, layers) -> SolutionHistory:
        layers = np.asarray(layers, dtype=float)
        hist = cls(grid, layers[0])
        for row in layers[1:]:
            hist.append(row)
        return hist

    def append(self, y: np.ndarray) -> None:
        if self._count > self.grid.N_T:
            raise IndexError("history already holds N_T + 1 layers")
        self._data[self._count] = y
        self._count += 1

    @property
    def layers(self) -> np.ndarray:
        return self._data[: self._count]

    @property
    def n(self) -> int:
        """Index of the newest stored level."""
        return self._count - 1

    def __len__(self) -> int:
        return self._count

    def __getitem__(self, n):
        return self.layers[n]


def l2_norm(y, grid: GridSpec, trapezoid: bool = False) -> float:
    """``sqrt(sum_i y_i^2 h)`` over all nodes ``i = 0..N``.

    With ``trapezoid=True`` the two end nodes get weight ``h/2`` instead.
    """
    y = np.asarray(y, dtype=float)
    s = float(np.dot(y, y))
    if trapezoid:
        s -= 0.5 * (y[0] * y[0] + y[-1] * y[-1])
    return math.sqrt(s * grid.h)


def c_norm(y) -> float:
    y = np.asarray(y, dtype=float)
    return float(np.max(np.abs(y))) if y.size else 0.0


def error_field(y, exact: Callable, grid: GridSpec, t: float) -> np.ndarray:
    """Pointwise error ``y_i - exact(x_i, t)``."""
    x = grid.x
    u = np.broadcast_to(np.asarray(exact(x, t), dtype=float), x.shape)
    return np.asarray(y, dtype=float) - u
