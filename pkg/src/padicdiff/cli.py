"""Command-line front end.

Commands
--------
norms     CSV of n, log_p ||G_n/n!|| at a fixed log-radius
radius    JSON radius estimates at one point or on a grid
polygon   JSON convergence polygon (+ optional SVG plot)
bounded   JSON boundedness report at one point (+ optional b_n SVG)
theorem   JSON end-to-end one-slope/non-Robba/boundedness report
cyclic    JSON scalar operator + gauge from a cyclic-vector search
pullback  writes the ramification pullback as a new module definition
catalog   lists the built-in example families

A module comes either from a config file (``--config``) or from the catalog
(``--catalog NAME`` plus parameters).  Config files are INI-style::

    [module]
    p = 2
    variable = x
    matrix =
        0, 1
        1/x, 2
    interval = 1/4, 4        ; radii r1, r2
    ; or log_interval = -2, 2  ; exact base-p log-radii

    [run]
    depth = 256
    grid = 17
    max_denominator = 32
    mode = exact
    tolerance = 0.02
    rho = 0
    h = 1
    seed = 0
    threads = 1

Command-line flags override [run] values.  Radii that are exact powers of p
convert to exact log-radii; anything else is stored as a rational
approximation of log_p r with 12 significant digits.

Exit codes: 0 success; 1 invalid input; 2 completed but inconclusive or
numerically unclear; 3 budget exceeded.  Errors are machine-readable JSON
on stderr.  The environment variable PADICDIFF_THREADS selects the worker
count for grid evaluation; the --threads flag takes precedence.
"""

from __future__ import annotations

import argparse
import configparser
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .arith import Interval, Prime, as_prime
from .catalog import catalog_get, catalog_names, catalog_summaries
from .diagnostics import (
    INCONCLUSIVE,
    VERDICT_UNCLEAR,
    bounded_report,
    theorem_check,
)
from .diffmod import DiffModule, RFMatrix, frobenius_pullback, norm_sequence
from .errors import (
    BudgetExceededError,
    CyclicSearchError,
    DomainError,
    HypothesisViolationError,
    InputError,
    PadicDiffError,
    ParseError,
)
from .jsonutil import SCHEMA_VERSION, estimate_json, fmt_float, frac_str, frobenius_json, polygon_json
from .laurent import poly_to_str, rf_to_str
from .plot import polygon_svg, sequence_svg
from .radius import (
    EXACT,
    TAIL_MIN,
    frobenius_radius_check,
    polygon_estimate,
    radius_estimate,
)
from .spectral import cyclic_vector

__all__ = ["main"]

ENV_THREADS = "PADICDIFF_THREADS"


@dataclass
class RunConfig:
    p: Prime
    var: str
    module: DiffModule
    depth: int = 256
    grid: int = 17
    max_denominator: int = 32
    mode: str = EXACT
    method: str = TAIL_MIN
    tolerance: float = 0.02
    rho: Optional[Fraction] = None
    h: int = 1
    seed: int = 0
    threads: int = 1
    normalized: bool = True


def _parse_fraction(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"not a rational number: {text!r}") from exc


def _exact_power_exponent(n: int, p: int) -> Optional[int]:
    if n < 1:
        return None
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k if n == 1 else None


def log_radius_of(r: Fraction, p: int) -> Fraction:
    """log_p r: exact for powers of p, else 12 significant digits."""
    if r <= 0:
        raise InputError(f"radius must be positive, got {r}")
    kn = _exact_power_exponent(r.numerator, p)
    kd = _exact_power_exponent(r.denominator, p)
    if kn is not None and kd is not None:
        return Fraction(kn - kd)
    x = math.log(r.numerator) - math.log(r.denominator)
    x /= math.log(p)
    if x == 0:
        return Fraction(0)
    scale = 10 ** (11 - math.floor(math.log10(abs(x))))
    return Fraction(round(x * scale), scale)


def _interval_from_texts(
    p: int, interval: Optional[str], log_interval: Optional[str]
) -> Interval:
    if (interval is None) == (log_interval is None):
        raise InputError("give exactly one of interval (radii) or log_interval")
    if log_interval is not None:
        parts = [s for s in log_interval.split(",") if s.strip()]
        if len(parts) != 2:
            raise InputError("log_interval must be 'lo, hi'")
        return Interval(_parse_fraction(parts[0]), _parse_fraction(parts[1]))
    parts = [s for s in interval.split(",") if s.strip()]
    if len(parts) != 2:
        raise InputError("interval must be 'r1, r2'")
    r1, r2 = _parse_fraction(parts[0]), _parse_fraction(parts[1])
    return Interval(log_radius_of(r1, p), log_radius_of(r2, p))


def _matrix_from_text(text: str, var: str) -> RFMatrix:
    rows = []
    for line in text.replace(";", "\n").splitlines():
        line = line.strip()
        if not line:
            continue
        rows.append([cell.strip() for cell in line.split(",")])
    if not rows:
        raise InputError("empty matrix")
    return RFMatrix.from_strings(rows, var)


def _load_config_module(path: str) -> tuple[DiffModule, dict]:
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    read = cp.read(path)
    if not read:
        raise InputError(f"config file not found: {path}")
    if "module" not in cp:
        raise InputError("config file needs a [module] section")
    sec = cp["module"]
    if "p" not in sec or "matrix" not in sec:
        raise InputError("[module] needs p and matrix")
    p = as_prime(int(sec["p"]))
    var = sec.get("variable", "x").strip()
    interval = _interval_from_texts(p.p, sec.get("interval"), sec.get("log_interval"))
    matrix = _matrix_from_text(sec["matrix"], var)
    module = DiffModule(p, matrix, interval, var).validate()
    run = dict(cp["run"]) if "run" in cp else {}
    return module, run


def _module_from_args(args) -> tuple[DiffModule, dict]:
    if args.config and args.catalog:
        raise InputError("give either --config or --catalog, not both")
    if args.config:
        return _load_config_module(args.config)
    if args.catalog:
        if args.p is None:
            raise InputError("--catalog needs --p")
        p = as_prime(args.p)
        interval = _interval_from_texts(p.p, args.interval, args.log_interval)
        entry = catalog_get(
            args.catalog,
            p,
            alpha=_parse_fraction(args.alpha) if args.alpha else 1,
            a=_parse_fraction(args.a) if args.a else None,
            h=args.h if args.h else 1,
            q=tuple(args.q or ()),
        )
        return entry.build(interval), {}
    raise InputError("a module is required: --config FILE or --catalog NAME")


def _merge_config(args, module: DiffModule, run: dict) -> RunConfig:
    def pick(flag, key, cast, default):
        if flag is not None:
            return cast(flag)
        if key in run:
            return cast(run[key])
        return default

    threads_env = os.environ.get(ENV_THREADS)
    threads = pick(args.threads, "threads", int, int(threads_env) if threads_env else 1)
    rho_text = args.rho if args.rho is not None else run.get("rho")
    cfg = RunConfig(
        p=module.p,
        var=module.var,
        module=module,
        depth=pick(args.depth, "depth", int, 256),
        grid=pick(args.grid, "grid", int, 17),
        max_denominator=pick(args.max_denominator, "max_denominator", int, 32),
        mode=pick(args.mode, "mode", str, EXACT),
        method=pick(args.method, "method", str, TAIL_MIN),
        tolerance=pick(args.tol, "tolerance", float, 0.02),
        rho=_parse_fraction(rho_text) if rho_text is not None else None,
        h=pick(args.h, "h", int, 1),
        seed=pick(args.seed, "seed", int, 0),
        threads=max(1, threads),
        normalized=not args.unnormalized,
    )
    if cfg.mode not in (EXACT, "float"):
        raise InputError(f"unknown mode {cfg.mode!r}")
    return cfg


def _emit(args, payload: dict) -> None:
    text = json.dumps(payload, indent=2) + "\n"
    if args.json:
        with open(args.json, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _write(path: Optional[str], text: str) -> None:
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _parallel_map(fn, items, threads: int):
    if threads <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _require_rho(cfg: RunConfig) -> Fraction:
    if cfg.rho is None:
        raise InputError("this command needs --rho (or rho= in [run])")
    return cfg.rho


# ---------------------------------------------------------------------------
# command handlers
# ---------------------------------------------------------------------------


def _cmd_norms(args, cfg: RunConfig) -> int:
    rho = _require_rho(cfg)
    seq = norm_sequence(
        cfg.module, rho, cfg.depth, include_factorial=cfg.normalized
    )
    lines = ["n,value,exact"]
    for n, v in enumerate(seq.values):
        if v is None:
            lines.append(f"{n},,")
        else:
            lines.append(f"{n},{fmt_float(v)},{frac_str(v)}")
    _write(args.csv or args.json, "\n".join(lines) + "\n")
    return 0


def _cmd_radius(args, cfg: RunConfig) -> int:
    state = cfg.module.taylor_state(cfg.depth)
    rhos = [cfg.rho] if cfg.rho is not None else cfg.module.interval.interior_grid(cfg.grid)
    ests = _parallel_map(
        lambda r: radius_estimate(
            cfg.module,
            r,
            cfg.depth,
            method=cfg.method,
            mode=cfg.mode,
            state=state,
            include_factorial=cfg.normalized,
        ),
        rhos,
        cfg.threads,
    )
    payload = {
        "schema_version": SCHEMA_VERSION,
        "kind": "radius",
        "p": cfg.p.p,
        "depth": cfg.depth,
        "mode": cfg.mode,
        "normalized": cfg.normalized,
        "points": [estimate_json(e) for e in ests],
    }
    _emit(args, payload)
    return 0


def _cmd_polygon(args, cfg: RunConfig) -> int:
    poly = polygon_estimate(
        cfg.module,
        grid=cfg.grid,
        depth=cfg.depth,
        max_denominator=cfg.max_denominator,
        mode=cfg.mode,
    )
    payload = {
        "schema_version": SCHEMA_VERSION,
        "kind": "polygon",
        "p": cfg.p.p,
        "depth": cfg.depth,
        "mode": cfg.mode,
        **polygon_json(poly),
    }
    _emit(args, payload)
    if args.svg:
        _write(args.svg, polygon_svg(poly))
    return 0


def _cmd_bounded(args, cfg: RunConfig) -> int:
    rho = _require_rho(cfg)
    state = cfg.module.taylor_state(cfg.depth)
    if args.log_r is not None:
        log_r = _parse_fraction(args.log_r)
    else:
        log_r = radius_estimate(cfg.module, rho, cfg.depth, state=state).tail_min
    report = bounded_report(cfg.module, rho, cfg.depth, log_r, cfg.tolerance, state=state)
    payload = {
        "schema_version": SCHEMA_VERSION,
        "kind": "bounded",
        "p": cfg.p.p,
        **report.to_json_dict(),
    }
    _emit(args, payload)
    if args.svg:
        _write(args.svg, sequence_svg(report.values))
    return 2 if report.classification == INCONCLUSIVE else 0


def _cmd_theorem(args, cfg: RunConfig) -> int:
    report = theorem_check(
        cfg.module,
        grid=cfg.grid,
        depth=cfg.depth,
        tol=cfg.tolerance,
        max_denominator=cfg.max_denominator,
        mode=cfg.mode,
    )
    payload = {
        "schema_version": SCHEMA_VERSION,
        "kind": "theorem",
        "p": cfg.p.p,
        "depth": cfg.depth,
        **report.to_json_dict(),
    }
    _emit(args, payload)
    if args.svg:
        _write(args.svg, polygon_svg(report.polygon))
    return 2 if report.verdict == VERDICT_UNCLEAR else 0


def _cmd_frobenius(args, cfg: RunConfig) -> int:
    report = frobenius_radius_check(
        cfg.module, h=cfg.h, grid=cfg.grid, depth=cfg.depth, tol=cfg.tolerance
    )
    payload = {
        "schema_version": SCHEMA_VERSION,
        "kind": "frobenius",
        **frobenius_json(report),
    }
    _emit(args, payload)
    return 0 if report.passed else 2


def _cmd_cyclic(args, cfg: RunConfig) -> int:
    red = cyclic_vector(cfg.module, seed=cfg.seed)
    payload = {
        "schema_version": SCHEMA_VERSION,
        "kind": "cyclic",
        "p": cfg.p.p,
        "order": red.operator.order,
        "q": [rf_to_str(qi, cfg.var) for qi in red.operator.coeffs],
        "gauge": [[rf_to_str(e, cfg.var) for e in row] for row in red.gauge.rows],
        "vector": [poly_to_str(c, cfg.var) for c in red.vector],
        "valid_intervals": [[frac_str(j.lo), frac_str(j.hi)] for j in red.valid],
        "attempts": red.attempts,
    }
    _emit(args, payload)
    return 0


def _module_config_text(module: DiffModule) -> str:
    rows = "\n".join(
        "    " + ", ".join(rf_to_str(e, module.var) for e in row)
        for row in module.matrix.rows
    )
    return (
        "[module]\n"
        f"p = {module.p.p}\n"
        f"variable = {module.var}\n"
        "matrix =\n"
        f"{rows}\n"
        f"log_interval = {module.interval.lo}, {module.interval.hi}\n"
    )


def _cmd_pullback(args, cfg: RunConfig) -> int:
    pulled = frobenius_pullback(cfg.module, cfg.h)
    _write(args.out, _module_config_text(pulled))
    return 0


def _cmd_catalog(args, cfg=None) -> int:
    # canonical instantiations so expected values are concrete
    shown = {
        "zero": catalog_get("zero", 2),
        "exp": catalog_get("exp", 2, alpha=1),
        "euler": catalog_get("euler", 2, a=Fraction(1, 2)),
        "companion": None,
        "pullback-exp": catalog_get("pullback-exp", 2, alpha=1, h=1),
    }
    window = Interval(-2, 2)
    entries = []
    for name in catalog_names():
        entry = shown[name]
        info = {"name": name, "summary": catalog_summaries()[name]}
        if entry is not None:
            segments = entry.expected_segments(window)
            info["example_params"] = {k: frac_str(v) for k, v in entry.params.items()}
            info["expected_segments_on_(-2,2)"] = (
                None
                if segments is None
                else [
                    {"slope": frac_str(s), "intercept": frac_str(c)} for s, c in segments
                ]
            )
            info["expected_boundedness"] = entry.expected_boundedness
            info["provenance"] = entry.provenance
        entries.append(info)
    payload = {
        "schema_version": SCHEMA_VERSION,
        "kind": "catalog",
        "entries": entries,
    }
    _emit(args, payload)
    return 0


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

_COMMANDS = {
    "norms": _cmd_norms,
    "radius": _cmd_radius,
    "polygon": _cmd_polygon,
    "bounded": _cmd_bounded,
    "theorem": _cmd_theorem,
    "frobenius": _cmd_frobenius,
    "cyclic": _cmd_cyclic,
    "pullback": _cmd_pullback,
    "catalog": _cmd_catalog,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="padicdiff",
        description="exact toolkit for differential modules on p-adic annuli",
    )
    parser.add_argument("command", choices=sorted(_COMMANDS))
    src = parser.add_argument_group("module source")
    src.add_argument("--config", help="INI module definition")
    src.add_argument("--catalog", help="catalog entry name")
    src.add_argument("--p", type=int, help="prime (with --catalog)")
    src.add_argument("--alpha", help="exp / pullback-exp parameter")
    src.add_argument("--a", help="euler parameter")
    src.add_argument("--q", action="append", help="companion coefficient (repeatable)")
    src.add_argument("--interval", help="radii 'r1, r2'")
    src.add_argument("--log-interval", dest="log_interval", help="log-radii 'lo, hi'")

    run = parser.add_argument_group("run parameters")
    run.add_argument("--depth", type=int)
    run.add_argument("--grid", type=int)
    run.add_argument("--max-denominator", dest="max_denominator", type=int)
    run.add_argument("--mode", choices=["exact", "float"])
    run.add_argument("--method", choices=["tail-min", "tail-slope"])
    run.add_argument("--tol", type=float)
    run.add_argument("--rho", help="log-radius for norms/bounded/radius")
    run.add_argument("--log-r", dest="log_r", help="log R for bounded")
    run.add_argument("--h", type=int, help="pullback order")
    run.add_argument("--seed", type=int)
    run.add_argument("--threads", type=int)
    run.add_argument("--unnormalized", action="store_true", help="drop the n! factor")

    out = parser.add_argument_group("outputs")
    out.add_argument("--json", help="JSON report path (default stdout)")
    out.add_argument("--csv", help="CSV path (norms)")
    out.add_argument("--svg", help="SVG plot path")
    out.add_argument("--out", help="module definition path (pullback)")
    return parser


def _error_payload(exc: Exception) -> str:
    return json.dumps(
        {"error": {"type": type(exc).__name__, "message": str(exc)}}
    ) + "\n"


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "catalog":
            return _cmd_catalog(args)
        module, run = _module_from_args(args)
        cfg = _merge_config(args, module, run)
        return _COMMANDS[args.command](args, cfg)
    except BudgetExceededError as exc:
        sys.stderr.write(_error_payload(exc))
        return 3
    except (InputError, ParseError, DomainError, HypothesisViolationError,
            CyclicSearchError, PadicDiffError) as exc:
        sys.stderr.write(_error_payload(exc))
        return 1


if __name__ == "__main__":
    sys.exit(main())
