"""Per-step assembly and solution of the nonlocal difference scheme.

Each time step yields an (N+1) x (N+1) system: a tridiagonal block for the
interior nodes, the proportionality row ``y_0 = alpha * y_N``, and a flux row
coupling ``y_0, y_1, y_{N-1}, y_N``. The interior is solved twice with the
Thomas algorithm (once for the load, once for the coupling to ``y_N``) and the
flux row closes the system with a single scalar equation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .caputo import WeightTable, ab_coefficients, weights_from_ab
from .core import GridSpec, ProblemSpec, SolutionHistory

__all__ = [
    "DegenerateSystem",
    "StepSystem",
    "assemble_step",
    "solve_step",
    "thomas",
    "advance",
]

_DEGENERATE_RTOL = 1e-14


class DegenerateSystem(ArithmeticError):
    """The flux-row closure has a (numerically) vanishing denominator."""

    def __init__(self, message, level=None, grid=None):
        prefix = ""
        if grid is not None:
            prefix += f"grid N={grid[0]}, N_T={grid[1]}: "
        if level is not None:
            prefix += f"level n={level}: "
        super().__init__(prefix + message)
        self.message = message
        self.level = level
        self.grid = grid


@dataclass
class StepSystem:
    """Linear system for the layer ``y^{n+1}``.

    ``sub``, ``diag``, ``sup`` and ``rhs`` hold interior rows ``i = 1..N-1``
    (``sub[0]`` multiplies ``y_0``, ``sup[-1]`` multiplies ``y_N``).
    ``row0`` is ``(coef y_0, coef y_N)`` with zero right-hand side.
    ``flux`` is the coefficients at ``(y_0, y_1, y_{N-1}, y_N)``.
    """

    sub: np.ndarray
    diag: np.ndarray
    sup: np.ndarray
    rhs: np.ndarray
    row0: tuple[float, float]
    flux: tuple[float, float, float, float]
    flux_rhs: float

    @property
    def N(self) -> int:
        return self.diag.size + 1

    def to_dense(self) -> tuple[np.ndarray, np.ndarray]:
        """Full matrix and right-hand side, rows ordered 0, 1..N-1, N."""
        N = self.N
        A = np.zeros((N + 1, N + 1))
        b = np.zeros(N + 1)
        A[0, 0], A[0, N] = self.row0
        for j, i in enumerate(range(1, N)):
            A[i, i - 1] = self.sub[j]
            A[i, i] = self.diag[j]
            A[i, i + 1] = self.sup[j]
            b[i] = self.rhs[j]
        for col, v in zip((0, 1, N - 1, N), self.flux):
            A[N, col] += v  # N = 2 folds y_1 and y_{N-1} together
        b[N] = self.flux_rhs
        return A, b

    def residual(self, y: np.ndarray) -> np.ndarray:
        """Row residuals scaled by the magnitude of each row's terms."""
        A, b = self.to_dense()
        terms = np.abs(A) @ np.abs(y) + np.abs(b)
        return (A @ y - b) / np.where(terms > 0.0, terms, 1.0)


def thomas(sub, diag, sup, rhs):
    """Solve a tridiagonal system without pivoting.

    ``sub[0]`` and ``sup[-1]`` are ignored. ``rhs`` may be 2-D, one column per
    right-hand side.
    """
    n = len(diag)
    rhs = np.array(rhs, dtype=float)
    cp = np.empty(n)
    dp = np.empty_like(rhs)
    cp[0] = sup[0] / diag[0] if n > 1 else 0.0
    dp[0] = rhs[0] / diag[0]
    for i in range(1, n):
        m = diag[i] - sub[i] * cp[i - 1]
        if i < n - 1:
            cp[i] = sup[i] / m
        dp[i] = (rhs[i] - sub[i] * dp[i - 1]) / m
    for i in range(n - 2, -1, -1):
        dp[i] -= cp[i] * dp[i + 1]
    return dp


def _history_term(layers: np.ndarray, c: np.ndarray, n: int) -> np.ndarray:
    """``-c_0 y^n + sum_{s<n} c_{n-s} (y^{s+1} - y^s)``, unscaled."""
    H = -c[0] * layers[n]
    if n > 0:
        diffs = np.diff(layers[: n + 1], axis=0)
        H = H + c[n:0:-1] @ diffs
    return H


def assemble_step(
    problem: ProblemSpec,
    grid: GridSpec,
    history: SolutionHistory,
    weights: WeightTable,
) -> StepSystem:
    """Build the system for ``y^{n+1}`` given layers ``0..n``."""
    n = weights.n
    layers = history.layers if isinstance(history, SolutionHistory) else np.asarray(history)
    if layers.shape[0] != n + 1:
        raise ValueError(f"weights for level {n} need {n + 1} layers, got {layers.shape[0]}")

    N, h, sigma = grid.N, grid.h, grid.sigma
    x = grid.x
    ts = grid.t_sigma(n)
    inv = weights.scale / weights.tau  # 1 / (tau^nu Gamma(2-nu))
    kappa = weights.c[0] * inv
    H = inv * _history_term(layers, weights.c, n)
    y = layers[n]

    # a[i] = k(x_i - h/2), i = 1..N; a[0] is padding
    a = np.empty(N + 1)
    a[1:] = np.broadcast_to(np.asarray(problem.k(x[1:] - 0.5 * h, ts), dtype=float), (N,))
    a[0] = np.nan
    phi = np.broadcast_to(np.asarray(problem.f(x, ts), dtype=float), (N + 1,))
    A = a[1:] / (h * h)  # A[i-1] = a_i / h^2

    Al, Ar = A[:-1], A[1:]  # a_i, a_{i+1} for interior i
    diag = kappa + sigma * (Al + Ar)
    sub = -sigma * Al
    sup = -sigma * Ar
    if not np.all(np.abs(diag) > np.abs(sub) + np.abs(sup)):
        raise ArithmeticError("interior block lost diagonal dominance; is k > 0?")

    flux_explicit = Ar * (y[2:] - y[1:-1]) - Al * (y[1:-1] - y[:-2])
    rhs = phi[1:-1] - H[1:-1] + (1.0 - sigma) * flux_explicit

    beta, gamma = problem.beta, problem.gamma
    a1, aN = a[1], a[N]
    s2 = 2.0 * sigma / (h * h)
    flux = (
        beta * kappa + s2 * beta * a1,
        -s2 * beta * a1,
        -s2 * aN,
        kappa + s2 * aN - 2.0 * sigma * gamma / h,
    )
    flux_rhs = (
        2.0 / h * float(problem.mu(ts))
        + phi[N]
        + beta * phi[0]
        - beta * H[0]
        - H[N]
        - 2.0 * (1.0 - sigma) / (h * h) * (aN * (y[N] - y[N - 1]) - beta * a1 * (y[1] - y[0]))
        + 2.0 * (1.0 - sigma) * gamma / h * y[N]
    )
    return StepSystem(
        sub=sub,
        diag=diag,
        sup=sup,
        rhs=rhs,
        row0=(1.0, -problem.alpha),
        flux=flux,
        flux_rhs=float(flux_rhs),
    )


def solve_step(system: StepSystem, alpha: float) -> np.ndarray:
    """Solve an assembled step system; returns the full layer ``y^{n+1}``."""
    N = system.N
    # interior unknowns: y_int = p + q * y_N
    load = np.zeros((N - 1, 2))
    load[:, 0] = system.rhs
    load[0, 1] -= system.sub[0] * alpha
    load[-1, 1] -= system.sup[-1]
    pq = thomas(system.sub, system.diag, system.sup, load)
    p, q = pq[:, 0], pq[:, 1]

    f0, f1, fm, fN = system.flux
    terms = (f0 * alpha, f1 * q[0], fm * q[-1], fN)
    denom = sum(terms)
    scale = max(abs(v) for v in terms)
    if not math.isfinite(denom) or abs(denom) <= _DEGENERATE_RTOL * scale:
        raise DegenerateSystem(
            f"flux-row closure denominator {denom:.3e} vanishes relative to {scale:.3e}"
        )
    yN = (system.flux_rhs - f1 * p[0] - fm * p[-1]) / denom

    y = np.empty(N + 1)
    y[1:N] = p + q * yN
    y[N] = yN
    y[0] = alpha * yN
    return y


def advance(problem: ProblemSpec, grid: GridSpec) -> SolutionHistory:
    """Run the scheme from ``u0`` through all ``N_T`` time levels."""
    y0 = np.broadcast_to(np.asarray(problem.u0(grid.x), dtype=float), (grid.N + 1,))
    history = SolutionHistory(grid, y0)
    a, b = ab_coefficients(grid.nu, grid.sigma, max(grid.N_T, 1))
    scale = grid.tau ** (1.0 - grid.nu) / math.gamma(2.0 - grid.nu)
    for n in range(grid.N_T):
        weights = WeightTable(n=n, c=weights_from_ab(a, b, n), scale=scale, tau=grid.tau)
        system = assemble_step(problem, grid, history, weights)
        try:
            y = solve_step(system, problem.alpha)
        except DegenerateSystem as exc:
            raise DegenerateSystem(exc.message, level=n) from None
        history.append(y)
    return history
