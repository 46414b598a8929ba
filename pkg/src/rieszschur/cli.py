"""Command-line front end.

Exit codes: 0 success, 1 parse error, 2 a hypothesis of the inequality
fails, 3 a certified violation was found (or an acceptance criterion
failed in ``suite``), 4 the output could not be written.
"""
from __future__ import annotations

import argparse
import sys
import time
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

from . import __version__
from .acceptance import run_battery
from .certificates import HypothesisError, Verdict, check_main
from .density import alpha_star, ld_dense_check
from .norms import GridSpec, inf_quadratic, real_zeros, sup_norm
from .parser import ParseError, parse_expr
from .report import FORMATS, Report, emit
from .sharpness import sharpness_search

COMMANDS = ("check", "a-s", "sup", "zeros", "density", "sharpness", "suite")

EXIT_OK, EXIT_PARSE, EXIT_HYPOTHESIS, EXIT_VIOLATION, EXIT_IO = 0, 1, 2, 3, 4

DEFAULTS: Dict[str, Any] = {
    "Q": None, "f": None, "sigma": None, "tau": None, "s": None,
    "window": None, "step": None, "format": "json", "out": None, "seed": 42,
    "basis_size": 4, "iterations": 2000, "timing": False,
}
_CASTS = {"sigma": float, "tau": float, "s": float, "window": float, "step": float,
          "seed": int, "basis_size": int, "iterations": int}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    Q_expr: Optional[str] = None
    f_expr: Optional[str] = None
    sigma: Optional[float] = None
    tau: Optional[float] = None
    s: Optional[float] = None
    grid: GridSpec = field(default_factory=GridSpec)
    output_path: Optional[str] = None
    format: str = "json"
    seed: int = 42
    basis_size: int = 4
    iterations: int = 2000
    timing: bool = False

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.format not in FORMATS:
            raise ConfigError(f"unknown format {self.format!r}")
        if self.sigma is not None and not self.sigma > 0:
            raise HypothesisError("sigma > 0", f"got sigma={self.sigma}")
        if self.tau is not None and not self.tau >= 0:
            raise HypothesisError("tau >= 0", f"got tau={self.tau}")

    def echo(self) -> Dict[str, Any]:
        d = {"command": self.command, "Q": self.Q_expr, "f": self.f_expr, "sigma": self.sigma,
             "tau": self.tau, "s": self.s, "grid": self.grid.to_dict(), "format": self.format,
             "seed": self.seed}
        if self.command == "sharpness":
            d.update(basis_size=self.basis_size, iterations=self.iterations)
        return {k: v for k, v in d.items() if v is not None}


def read_config_file(path: str) -> Dict[str, str]:
    """Flat ``key = value`` lines; ``#`` starts a comment."""
    out: Dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key=value")
            key, value = (t.strip() for t in line.split("=", 1))
            key = key.replace("-", "_")
            if key not in DEFAULTS:
                raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
            out[key] = value
    return out


def _coerce(key: str, value: Any) -> Any:
    if value is None:
        return None
    if key == "timing" and isinstance(value, str):
        return value.lower() in ("1", "true", "yes", "on")
    cast = _CASTS.get(key)
    try:
        return cast(value) if cast else value
    except ValueError:
        raise ConfigError(f"bad value for {key}: {value!r}") from None


def resolve_settings(cli: Dict[str, Any], config: Dict[str, str]) -> Dict[str, Any]:
    """CLI flags override config-file values, which override defaults."""
    merged = {}
    for key, default in DEFAULTS.items():
        if cli.get(key) is not None:
            merged[key] = _coerce(key, cli[key])
        elif key in config:
            merged[key] = _coerce(key, config[key])
        else:
            merged[key] = default
    return merged


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rieszschur",
                                description="Certified checks of weighted sup-norm inequalities "
                                            "for entire functions of exponential type.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--Q", help="weight expression, e.g. 'sin(x)'")
    p.add_argument("--f", help="function expression, e.g. 'sinratio(3,1)'")
    p.add_argument("--sigma", help="type bound of f")
    p.add_argument("--tau", help="type bound of Q")
    p.add_argument("--s", help="parameter of A_s (default sigma + tau)")
    p.add_argument("--window", help="half-width W of the search window")
    p.add_argument("--step", help="base grid step")
    p.add_argument("--format", choices=FORMATS)
    p.add_argument("--out", help="output file (default stdout)")
    p.add_argument("--seed", help="seed for randomized families")
    p.add_argument("--basis-size", dest="basis_size", help="sharpness: number of frequencies")
    p.add_argument("--iterations", help="sharpness: coordinate-ascent moves")
    p.add_argument("--config", help="flat key=value configuration file")
    p.add_argument("--timing", action="store_const", const=True, default=None,
                   help="record wall time (makes output non-reproducible)")
    return p


def make_config(argv: Optional[Sequence[str]] = None) -> RunConfig:
    args = build_parser().parse_args(argv)
    cli = {k: v for k, v in vars(args).items() if k not in ("command", "config")}
    file_cfg = read_config_file(args.config) if args.config else {}
    st = resolve_settings(cli, file_cfg)
    grid = GridSpec(window=st["window"], step=st["step"])
    return RunConfig(command=args.command, Q_expr=st["Q"], f_expr=st["f"], sigma=st["sigma"],
                     tau=st["tau"], s=st["s"], grid=grid, output_path=st["out"],
                     format=st["format"], seed=st["seed"], basis_size=st["basis_size"],
                     iterations=st["iterations"], timing=bool(st["timing"]))


def _need(value, name: str):
    if value is None:
        raise ConfigError(f"--{name} is required for this command")
    return value


def _s_value(cfg: RunConfig) -> float:
    if cfg.s is not None:
        return cfg.s
    if cfg.sigma is not None:
        return cfg.sigma + (cfg.tau or 0.0)
    raise ConfigError("--s (or --sigma/--tau) is required for this command")


def run(cfg: RunConfig) -> Report:
    """Dispatch ``cfg.command``; hypothesis failures propagate as HypothesisError."""
    t0 = time.perf_counter()
    certs: List = []
    encs: List = []
    diags: List[Dict[str, Any]] = []
    cmd = cfg.command
    if cmd == "check":
        Q = parse_expr(_need(cfg.Q_expr, "Q"))
        f = parse_expr(_need(cfg.f_expr, "f"))
        certs.append(check_main(Q, f, _need(cfg.sigma, "sigma"), _need(cfg.tau, "tau"), cfg.grid))
    elif cmd == "a-s":
        Q = parse_expr(_need(cfg.Q_expr, "Q"))
        s = _s_value(cfg)
        encs.append((f"A_{s:g}(Q)", inf_quadratic(Q, s, cfg.grid)))
    elif cmd == "sup":
        f = parse_expr(_need(cfg.f_expr or cfg.Q_expr, "f"))
        encs.append(("sup|f|", sup_norm(f, cfg.grid)))
    elif cmd == "zeros":
        Q = parse_expr(_need(cfg.Q_expr, "Q"))
        window = (-cfg.grid.window, cfg.grid.window) if cfg.grid.window else None
        diags.append({"zeros": real_zeros(Q, window, cfg.grid).to_dict()})
    elif cmd == "density":
        Q = parse_expr(_need(cfg.Q_expr, "Q"))
        window = (-cfg.grid.window, cfg.grid.window) if cfg.grid.window else None
        res = alpha_star(Q, _s_value(cfg), window=window, grid=cfg.grid)
        dens = ld_dense_check(res.E_star, res.d / 2, res.d / 4)
        diags.append({"alpha_star": res.to_dict(), "density": dens.to_dict()})
    elif cmd == "sharpness":
        Q = parse_expr(_need(cfg.Q_expr, "Q"))
        res = sharpness_search(Q, _need(cfg.sigma, "sigma"), _need(cfg.tau, "tau"),
                               cfg.basis_size, cfg.iterations, cfg.seed, cfg.grid)
        diags.append({"sharpness": res.to_dict()})
    elif cmd == "suite":
        for r in run_battery(cfg.seed):
            certs.extend(r.certificates)
            diags.append(r.to_diagnostic())
    wall = int(round((time.perf_counter() - t0) * 1000)) if cfg.timing else 0
    return Report(cfg.echo(), tuple(certs), tuple(encs), tuple(diags), wall_time_ms=wall)


def exit_code(report: Report) -> int:
    if any(c.verdict is Verdict.VIOLATION_SUSPECTED for c in report.certificates):
        return EXIT_VIOLATION
    if any(d.get("passed") is False for d in report.diagnostics):
        return EXIT_VIOLATION
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        cfg = make_config(argv)
        report = run(cfg)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except HypothesisError as exc:
        print(f"hypothesis failed: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS if isinstance(exc, ConfigError) else EXIT_IO
    data = emit(report, cfg.format)
    try:
        if cfg.output_path:
            with open(cfg.output_path, "wb") as fh:
                fh.write(data)
        else:
            sys.stdout.buffer.write(data)
            sys.stdout.flush()
    except OSError as exc:
        print(f"cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO
    return exit_code(report)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
