"""Command-line entry point.

Precedence for study settings, lowest first: built-in defaults, ``--config``
JSON file, ``FRACSTEKLOV_*`` environment variables, command-line flags.

Exit codes: 0 success, 2 configuration error, 3 degenerate discrete system,
4 no stability guarantee while ``--strict`` is set.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from .analysis import classify_stability
from .stepper import DegenerateSystem
from .study import FORMATS, NORMS, PROBLEMS, ConfigError, StudyConfig, emit_report, run_study

log = logging.getLogger("fracsteklov")

ENV_PREFIX = "FRACSTEKLOV_"

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DEGENERATE = 3
EXIT_NO_GUARANTEE = 4

# settings accepted from config files, environment variables and flags
_KEYS = ("nu", "alpha", "beta", "gamma", "T", "grids", "equal_steps", "norms",
         "format", "out", "problem", "spec_file", "strict", "jobs")


def _parse_bool(s) -> bool:
    if isinstance(s, bool):
        return s
    v = str(s).strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {s!r}")


def parse_grids(s) -> tuple[tuple[int, int], ...]:
    """``"160,320"`` -> ``((160, 160), (320, 320))``; ``"160x80"`` sets N_T separately."""
    if isinstance(s, (list, tuple)):
        items = [str(g) if not isinstance(g, (list, tuple)) else f"{g[0]}x{g[1]}" for g in s]
    else:
        items = [tok for tok in str(s).split(",") if tok.strip()]
    grids = []
    for tok in items:
        parts = tok.strip().lower().split("x")
        try:
            if len(parts) == 1:
                n = int(parts[0])
                grids.append((n, n))
            elif len(parts) == 2:
                grids.append((int(parts[0]), int(parts[1])))
            else:
                raise ValueError
        except ValueError:
            raise ConfigError(f"bad grid entry {tok!r}; use N or NxN_T") from None
    return tuple(grids)


def parse_norms(s) -> tuple[str, ...]:
    items = s if isinstance(s, (list, tuple)) else str(s).split(",")
    return tuple(tok.strip().lower() for tok in items if str(tok).strip())


_CONVERT = {
    "nu": float, "alpha": float, "beta": float, "gamma": float, "T": float,
    "grids": parse_grids, "equal_steps": _parse_bool, "norms": parse_norms,
    "format": str, "out": str, "problem": str, "spec_file": str,
    "strict": _parse_bool, "jobs": int,
}

_DEFAULTS = {
    "nu": 0.5, "alpha": 3.0, "beta": 2.0, "gamma": -5.0, "T": 1.0,
    "grids": ((160, 160), (320, 320), (640, 640)), "equal_steps": True,
    "norms": NORMS, "format": "table", "out": None, "problem": "mms",
    "spec_file": None, "strict": False, "jobs": 1,
}


def _convert(key, value):
    try:
        return _CONVERT[key](value)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad value for {key}: {value!r} ({exc})") from None


def resolve_settings(args: argparse.Namespace, environ=None) -> dict:
    environ = os.environ if environ is None else environ
    settings = dict(_DEFAULTS)
    if args.config:
        try:
            with open(args.config) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a flat JSON object")
        unknown = set(data) - set(_KEYS)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        settings.update({k: _convert(k, v) for k, v in data.items()})
    for key in _KEYS:
        env = environ.get(ENV_PREFIX + key.upper())
        if env is not None:
            settings[key] = _convert(key, env)
    for key in _KEYS:
        value = getattr(args, key, None)
        if value is not None:
            settings[key] = _convert(key, value)
    return settings


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fracsteklov",
        description="Time-fractional diffusion with Steklov nonlocal boundary conditions.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    st = sub.add_parser("study", help="run a convergence study on a sequence of grids")
    st.add_argument("--config", help="flat JSON file with default settings")
    st.add_argument("--nu", type=float)
    st.add_argument("--alpha", type=float)
    st.add_argument("--beta", type=float)
    st.add_argument("--gamma", type=float)
    st.add_argument("--T", type=float, dest="T")
    st.add_argument("--grids", help='comma list of N or NxN_T, e.g. "160,320,640"')
    st.add_argument("--equal-steps", dest="equal_steps", action="store_const", const=True,
                    help="require N_T == N on every grid (h = tau)")
    st.add_argument("--no-equal-steps", dest="equal_steps", action="store_const", const=False)
    st.add_argument("--norms", help="comma list drawn from l2,c")
    st.add_argument("--format", choices=FORMATS)
    st.add_argument("--out", help="write the report here instead of stdout")
    st.add_argument("--problem", choices=PROBLEMS)
    st.add_argument("--spec-file", dest="spec_file", help="JSON problem file for --problem custom")
    st.add_argument("--jobs", type=int, help="solve grids in this many processes")
    st.add_argument("--strict", action="store_const", const=True,
                    help="exit with status 4 when no stability condition holds")

    cl = sub.add_parser("classify", help="report which stability condition holds")
    cl.add_argument("--alpha", type=float, required=True)
    cl.add_argument("--beta", type=float, required=True)
    cl.add_argument("--gamma", type=float, required=True)
    cl.add_argument("--strict", action="store_true")
    return parser


def _cmd_study(args) -> int:
    settings = resolve_settings(args)
    config = StudyConfig(
        nu=settings["nu"], alpha=settings["alpha"], beta=settings["beta"],
        gamma=settings["gamma"], T=settings["T"], grids=settings["grids"],
        equal_steps=settings["equal_steps"], norms=settings["norms"],
        output=settings["format"], problem=settings["problem"],
        spec_file=settings["spec_file"], jobs=settings["jobs"],
    )
    report = run_study(config)
    data = emit_report(report, config.output, norms=config.norms)
    if settings["out"]:
        with open(settings["out"], "wb") as fh:
            fh.write(data)
        log.info("wrote %s", settings["out"])
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    for w in report.warnings:
        log.warning(w)
    if settings["strict"] and not report.stability.guaranteed:
        return EXIT_NO_GUARANTEE
    return EXIT_OK


def _cmd_classify(args) -> int:
    verdict = classify_stability(args.alpha, args.beta, args.gamma)
    print(json.dumps(verdict.to_dict()))
    if args.strict and not verdict.guaranteed:
        return EXIT_NO_GUARANTEE
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s: %(message)s",
    )
    try:
        if args.command == "study":
            return _cmd_study(args)
        return _cmd_classify(args)
    except ValueError as exc:  # ConfigError and invalid problem data
        log.error("config error: %s", exc)
        return EXIT_CONFIG
    except DegenerateSystem as exc:
        log.error("solver failure: %s", exc)
        return EXIT_DEGENERATE


if __name__ == "__main__":
    sys.exit(main())
