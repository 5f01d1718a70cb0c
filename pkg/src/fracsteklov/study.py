"""Convergence studies: run the scheme on a sequence of grids and tabulate errors."""

from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from . import mms
from .analysis import StabilityVerdict, classify_stability, convergence_order
from .core import ProblemSpec, build_grid
from .stepper import DegenerateSystem, advance

__all__ = [
    "ConfigError",
    "StudyConfig",
    "GridRow",
    "StudyReport",
    "load_problem_file",
    "build_problem",
    "run_study",
    "emit_report",
    "parse_report",
]

NORMS = ("l2", "c")
FORMATS = ("table", "csv", "json")
PROBLEMS = ("mms", "custom")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class StudyConfig:
    nu: float = 0.5
    alpha: float = 3.0
    beta: float = 2.0
    gamma: float = -5.0
    T: float = 1.0
    grids: tuple[tuple[int, int], ...] = ((160, 160), (320, 320), (640, 640))
    equal_steps: bool = True
    norms: tuple[str, ...] = NORMS
    output: str = "table"
    problem: str = "mms"
    spec_file: Optional[str] = None
    jobs: int = 1

    def __post_init__(self):
        grids = tuple((int(n), int(nt)) for n, nt in self.grids)
        object.__setattr__(self, "grids", grids)
        object.__setattr__(self, "norms", tuple(self.norms))
        if not grids:
            raise ConfigError("at least one grid is required")
        if self.equal_steps:
            bad = [g for g in grids if g[0] != g[1]]
            if bad:
                raise ConfigError(f"equal-steps mode requires N == N_T, got {bad}")
        if not set(self.norms) <= set(NORMS) or not self.norms:
            raise ConfigError(f"norms must be a nonempty subset of {NORMS}, got {self.norms}")
        if self.output not in FORMATS:
            raise ConfigError(f"output must be one of {FORMATS}, got {self.output!r}")
        if self.problem not in PROBLEMS:
            raise ConfigError(f"problem must be one of {PROBLEMS}, got {self.problem!r}")
        if self.problem == "custom" and not self.spec_file:
            raise ConfigError("problem 'custom' needs a spec file")
        if self.problem == "mms" and not 0.0 < self.nu < 1.0:
            raise ConfigError(f"nu must lie in (0, 1), got {self.nu}")
        if self.jobs < 1:
            raise ConfigError("jobs must be >= 1")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["grids"] = [list(g) for g in self.grids]
        d["norms"] = list(self.norms)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> StudyConfig:
        d = dict(d)
        if "grids" in d:
            d["grids"] = tuple(tuple(g) for g in d["grids"])
        if "norms" in d:
            d["norms"] = tuple(d["norms"])
        return cls(**d)


@dataclass(frozen=True)
class GridRow:
    N: int
    Nt: int
    h: float
    tau: float
    err_l2: float
    err_c: float


@dataclass
class StudyReport:
    config: dict
    rows: list[GridRow]
    co_l2: list[float]
    co_c: list[float]
    stability: StabilityVerdict
    warnings: list[str] = field(default_factory=list)
    timing: dict = field(default_factory=dict, compare=False)

    def to_dict(self, timing: bool = True) -> dict:
        d = {
            "config": self.config,
            "rows": [asdict(r) for r in self.rows],
            "co_l2": list(self.co_l2),
            "co_c": list(self.co_c),
            "stability": self.stability.to_dict(),
            "warnings": list(self.warnings),
        }
        if timing:
            d["timing"] = self.timing
        return d

    @classmethod
    def from_dict(cls, d: dict) -> StudyReport:
        return cls(
            config=d["config"],
            rows=[GridRow(**r) for r in d["rows"]],
            co_l2=list(d["co_l2"]),
            co_c=list(d["co_c"]),
            stability=StabilityVerdict.from_dict(d["stability"]),
            warnings=list(d.get("warnings", [])),
            timing=d.get("timing", {}),
        )


# -- custom problems ------------------------------------------------------

_EXPR_NAMES = {
    name: getattr(np, name)
    for name in (
        "sin", "cos", "tan", "exp", "log", "sqrt", "sinh", "cosh", "tanh",
        "arctan", "abs", "pi", "e", "where", "minimum", "maximum",
    )
}
_EXPR_NAMES["gamma"] = np.vectorize(math.gamma, otypes=[float])


def _compile(expr: str, args: str):
    code = compile(f"lambda {args}: ({expr})", "<problem-file>", "eval")
    # names go in globals so the lambda body can see them
    namespace = {"__builtins__": {}, **_EXPR_NAMES}
    return eval(code, namespace)  # noqa: S307 - restricted namespace


def load_problem_file(path) -> tuple[ProblemSpec, callable]:
    """Read a JSON problem description with numpy-expression strings.

    Required keys: ``nu``, ``alpha``, ``beta``, ``gamma``, ``k`` (in ``x, t``),
    ``f`` (``x, t``), ``mu`` (``t``), ``u0`` (``x``), ``exact`` (``x, t``).
    Optional: ``T`` (default 1), ``k_symmetric`` (default true).
    """
    with open(path) as fh:
        d = json.load(fh)
    missing = [k for k in ("nu", "alpha", "beta", "gamma", "k", "f", "mu", "u0", "exact") if k not in d]
    if missing:
        raise ConfigError(f"{path}: missing keys {missing}")
    try:
        k = _compile(d["k"], "x, t")
        f = _compile(d["f"], "x, t")
        mu = _compile(d["mu"], "t")
        u0 = _compile(d["u0"], "x")
        exact = _compile(d["exact"], "x, t")
        spec = ProblemSpec(
            nu=float(d["nu"]), alpha=float(d["alpha"]), beta=float(d["beta"]),
            gamma=float(d["gamma"]), k=k, f=f, mu=mu, u0=u0,
            T=float(d.get("T", 1.0)), k_symmetric=bool(d.get("k_symmetric", True)),
        )
    except (SyntaxError, ValueError, TypeError, NameError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return spec, exact


def build_problem(config: StudyConfig) -> tuple[ProblemSpec, callable]:
    if config.problem == "custom":
        return load_problem_file(config.spec_file)
    p = mms.make_problem(config.nu, config.alpha, config.beta, config.gamma, config.T)
    return p.spec, p.exact


# -- running --------------------------------------------------------------

def _solve_grid(problem: ProblemSpec, exact, N: int, N_T: int) -> tuple[GridRow, float]:
    grid = build_grid(problem, N, N_T)
    t0 = time.perf_counter()
    try:
        history = advance(problem, grid)
    except DegenerateSystem as exc:
        raise DegenerateSystem(exc.message, level=exc.level, grid=(N, N_T)) from None
    elapsed = time.perf_counter() - t0
    x = grid.x
    err_l2 = err_c = 0.0
    for n, y in enumerate(history.layers):
        z = y - exact(x, grid.t(n))
        err_l2 = max(err_l2, math.sqrt(float(z @ z) * grid.h))
        err_c = max(err_c, float(np.max(np.abs(z))))
    return GridRow(N, N_T, grid.h, grid.tau, err_l2, err_c), elapsed


def _solve_grid_from_config(config_dict: dict, N: int, N_T: int):
    problem, exact = build_problem(StudyConfig.from_dict(config_dict))
    return _solve_grid(problem, exact, N, N_T)


def _orders(hs, errs) -> list[float]:
    if len(hs) < 2:
        return []
    if any(not e > 0.0 for e in errs):
        return [math.nan] * (len(hs) - 1)
    return convergence_order(list(zip(hs, errs)))


def run_study(config: StudyConfig) -> StudyReport:
    """Solve on every grid of ``config`` and tabulate errors and orders."""
    problem, exact = build_problem(config)
    t0 = time.perf_counter()
    if config.jobs > 1 and len(config.grids) > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            futures = [
                pool.submit(_solve_grid_from_config, config.to_dict(), N, N_T)
                for N, N_T in config.grids
            ]
            results = [fut.result() for fut in futures]
    else:
        results = [_solve_grid(problem, exact, N, N_T) for N, N_T in config.grids]

    rows = [r for r, _ in results]
    hs = [r.h for r in rows]
    verdict = classify_stability(problem.alpha, problem.beta, problem.gamma)
    warnings = list(problem.warnings)
    if not verdict.guaranteed:
        warnings.append(
            f"no stability guarantee for alpha={problem.alpha}, beta={problem.beta}, "
            f"gamma={problem.gamma}"
        )
    cfg = config.to_dict()
    cfg.update(nu=problem.nu, alpha=problem.alpha, beta=problem.beta, gamma=problem.gamma, T=problem.T)
    return StudyReport(
        config=cfg,
        rows=rows,
        co_l2=_orders(hs, [r.err_l2 for r in rows]),
        co_c=_orders(hs, [r.err_c for r in rows]),
        stability=verdict,
        warnings=warnings,
        timing={"total_s": time.perf_counter() - t0, "per_grid_s": [t for _, t in results]},
    )


# -- output ---------------------------------------------------------------

def _h_label(row: GridRow) -> str:
    return f"1/{row.N}"


def _sci(v: float) -> str:
    return f"{v:.5e}"


def _co(v: float) -> str:
    return "" if v is None or math.isnan(v) else f"{v:.3f}"


def _table(report: StudyReport, norms) -> str:
    cfg = report.config
    lines = [
        f"nu={cfg['nu']:g}, alpha={cfg['alpha']:g}, beta={cfg['beta']:g}, "
        f"gamma={cfg['gamma']:g}, T={cfg['T']:g}"
    ]
    header = ["h", "N_T"]
    if "l2" in norms:
        header += ["max_n |[z^n]|_0", "CO"]
    if "c" in norms:
        header += ["||z||_C", "CO"]
    body = []
    for j, row in enumerate(report.rows):
        cells = [_h_label(row), str(row.Nt)]
        if "l2" in norms:
            cells += [_sci(row.err_l2), _co(report.co_l2[j - 1]) if j else ""]
        if "c" in norms:
            cells += [_sci(row.err_c), _co(report.co_c[j - 1]) if j else ""]
        body.append(cells)
    widths = [max(len(r[i]) for r in [header] + body) for i in range(len(header))]
    fmt = "  ".join(f"{{:<{w}}}" for w in widths)
    rule = "-" * (sum(widths) + 2 * (len(widths) - 1))
    lines += [rule, fmt.format(*header).rstrip(), rule]
    lines += [fmt.format(*cells).rstrip() for cells in body]
    lines.append(rule)
    st = report.stability
    line = f"stability: {st.case.value}"
    if st.delta is not None:
        a1, b1, g1 = st.transformed
        line += f" (delta={st.delta:.6g}, alpha1=beta1={a1:.6g}, gamma1={g1:.6g})"
    lines.append(line)
    if report.warnings:
        lines.append("warnings:")
        lines += [f"  - {w}" for w in report.warnings]
    return "\n".join(lines) + "\n"


def _csv(report: StudyReport, norms) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["h", "err_l2", "co_l2", "err_c", "co_c"])
    for j, row in enumerate(report.rows):
        l2 = ("l2" in norms, row.err_l2, report.co_l2[j - 1] if j else None)
        c = ("c" in norms, row.err_c, report.co_c[j - 1] if j else None)
        cells = [_h_label(row)]
        for on, err, co in (l2, c):
            cells += [_sci(err), _co(co)] if on else ["", ""]
        writer.writerow(cells)
    return buf.getvalue()


def emit_report(report: StudyReport, fmt: str = "table", norms=NORMS, timing: bool = True) -> bytes:
    """Serialize a report as ``table``, ``csv`` or ``json`` (UTF-8 bytes)."""
    if fmt == "table":
        text = _table(report, norms)
    elif fmt == "csv":
        text = _csv(report, norms)
    elif fmt == "json":
        text = json.dumps(report.to_dict(timing=timing), indent=2, allow_nan=True) + "\n"
    else:
        raise ValueError(f"unknown format {fmt!r}")
    return text.encode("utf-8")


def parse_report(data) -> StudyReport:
    """Inverse of ``emit_report(..., 'json')``."""
    if isinstance(data, (bytes, bytearray)):
        data = data.decode("utf-8")
    return StudyReport.from_dict(json.loads(data))
