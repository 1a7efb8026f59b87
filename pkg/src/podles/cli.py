"""Command-line entry point: ``podles verify | seminorm | interval``.

Settings come from flags, then an optional config file, then defaults.
The config file is flat ``key = value`` text; blank lines and ``#``
comments are ignored.  Recognized keys: q, N, tolerance, seed, theta_grid,
format, output, allow_extreme_q.

Exit codes: 0 success, 1 a verification check failed, 2 invalid input or
configuration, 3 a distance solve did not converge.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Dict, List, Optional

from .core import ModelConstants, cstar_norm, from_qpoly
from .dirac import seminorm_L
from .metric import SolverConfig, interval_metric_table, table_to_csv, table_to_json
from .parse import ParseError, parse
from .qsymb import NotInSphereError
from .suite import run_suite

EXIT_OK, EXIT_FAIL, EXIT_INVALID, EXIT_NONCONVERGED = 0, 1, 2, 3


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    q: float = 0.5
    N: int = 32
    tolerance: float = 1e-8
    seed: int = 0
    theta_grid: int = 20
    output: Optional[str] = None
    format: str = "csv"
    allow_extreme_q: bool = False

    def validate(self) -> "RunConfig":
        if not 0.0 < self.q < 1.0:
            raise ConfigError(f"q out of range: {self.q} is not in (0, 1)")
        if not self.allow_extreme_q and not 0.05 <= self.q <= 0.95:
            raise ConfigError(f"q out of range: {self.q} outside [0.05, 0.95] (use --allow-extreme-q)")
        if self.N < 4:
            raise ConfigError(f"N too small: {self.N} < 4")
        if not 0.0 < self.tolerance <= 1e-2:
            raise ConfigError(f"tolerance out of range: {self.tolerance} not in (0, 1e-2]")
        if self.theta_grid < 1:
            raise ConfigError("theta_grid must be at least 1")
        if self.format not in ("csv", "json"):
            raise ConfigError(f"unknown format {self.format!r}")
        return self

    def constants(self) -> ModelConstants:
        if self.allow_extreme_q:
            return ModelConstants(self.q, self.N, q_min=0.0, q_max=1.0)
        return ModelConstants(self.q, self.N)

    def solver(self) -> SolverConfig:
        return SolverConfig(tolerance=self.tolerance, seed=self.seed)


_CASTS = {"q": float, "N": int, "tolerance": float, "seed": int, "theta_grid": int,
          "output": str, "format": str, "allow_extreme_q": None}


def _bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {text!r}")


def read_config_file(path: str) -> Dict[str, object]:
    out: Dict[str, object] = {}
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from exc
    for num, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{num}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in _CASTS:
            raise ConfigError(f"{path}:{num}: unknown key {key!r}")
        cast = _CASTS[key]
        try:
            out[key] = _bool(value) if cast is None else cast(value)
        except ValueError as exc:
            raise ConfigError(f"{path}:{num}: bad value for {key}: {value!r}") from exc
    return out


def resolve_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig()
    if getattr(args, "config", None):
        cfg = replace(cfg, **read_config_file(args.config))
    flags = {f.name: getattr(args, f.name) for f in fields(RunConfig)
             if getattr(args, f.name, None) is not None}
    return replace(cfg, **flags).validate()


def _common(p: argparse.ArgumentParser, with_output: bool = False):
    p.add_argument("--q", type=float)
    p.add_argument("--N", type=int)
    p.add_argument("--tolerance", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--theta-grid", dest="theta_grid", type=int)
    p.add_argument("--config", help="flat key = value settings file")
    p.add_argument("--allow-extreme-q", dest="allow_extreme_q", action="store_true", default=None)
    p.add_argument("-v", "--verbose", action="store_true")
    if with_output:
        p.add_argument("--format", choices=("csv", "json"))
        p.add_argument("--output", help="write to this path instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="podles", description="Spectral metric toolkit for the Podleś sphere.")
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run the invariant suite")
    _common(v)
    v.add_argument("--report", help="write the JSON report here")
    v.add_argument("--json", action="store_true", help="print the JSON report instead of text lines")

    s = sub.add_parser("seminorm", help="norm, seminorm and psi_inf of an expression")
    _common(s)
    s.add_argument("expression")

    i = sub.add_parser("interval", help="metric table on the quantized interval")
    _common(i, with_output=True)
    i.add_argument("--kmax", type=int, default=6)
    return parser


def cmd_verify(cfg: RunConfig, report: Optional[str] = None, as_json: bool = False,
               out=None) -> int:
    out = out or sys.stdout
    progress = None if as_json else (lambda r: print(r.line(), file=out, flush=True))
    results = run_suite(cfg.constants(), cfg.tolerance, cfg.seed, cfg.theta_grid, progress)
    doc = [r.to_dict() for r in results]
    if report:
        Path(report).write_text(json.dumps(doc, indent=2) + "\n")
    failed = [r for r in results if not r.passed]
    if as_json:
        print(json.dumps(doc, indent=2), file=out)
    else:
        print(f"{len(results) - len(failed)}/{len(results)} checks passed", file=out)
    return EXIT_FAIL if failed else EXIT_OK


def cmd_seminorm(cfg: RunConfig, expression: str, out=None) -> int:
    out = out or sys.stdout
    try:
        x = from_qpoly(parse(expression), cfg.constants())
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NotInSphereError as exc:
        print(f"not in the sphere algebra: {exc}", file=sys.stderr)
        return EXIT_INVALID
    psi = complex(x.psi_inf())
    print(f"cstar_norm = {cstar_norm(x):.12g}", file=out)
    print(f"L = {seminorm_L(x):.12g}", file=out)
    print(f"psi_inf = {psi.real:.12g}" + (f" + {psi.imag:.12g}i" if psi.imag else ""), file=out)
    return EXIT_OK


def cmd_interval(cfg: RunConfig, kmax: int, out=None) -> int:
    out = out or sys.stdout
    c = cfg.constants()
    if not 0 <= kmax <= c.N // 2:
        print(f"kmax must lie in 0..{c.N // 2}", file=sys.stderr)
        return EXIT_INVALID
    rows = interval_metric_table(c, kmax, cfg.solver())
    text = table_to_csv(rows) if cfg.format == "csv" else table_to_json(rows)
    if cfg.output:
        Path(cfg.output).write_text(text)
    else:
        out.write(text)
    flagged = [r.k for r in rows if not r.converged]
    if flagged:
        print(f"solver did not converge for rows k = {flagged}", file=sys.stderr)
        return EXIT_NONCONVERGED
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = resolve_config(args)
    except (ConfigError, ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    if args.command == "verify":
        return cmd_verify(cfg, args.report, args.json)
    if args.command == "seminorm":
        return cmd_seminorm(cfg, args.expression)
    return cmd_interval(cfg, args.kmax)


if __name__ == "__main__":
    sys.exit(main())
