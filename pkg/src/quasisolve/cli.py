"""Command-line front end.

Usage::

    python -m quasisolve COMMAND PROBLEM [options]

COMMAND is one of ``verify``, ``construct``, ``solve``, ``certify``,
``sweep``.  PROBLEM is a corpus name (see ``quasisolve.corpus.EXAMPLES``)
or the path of an INI config file::

    [problem]
    corpus_name = ex1
    tau_mode = nonincreasing      ; optional, must match the corpus entry

    [domain]                      ; optional, must match the corpus entry
    t0 = 0
    L = 1
    r = 1
    r_hat = 1

    [params]                      ; overrides, named after the symbols
    sigma1 = 0.4
    epsilon = 0.01

    [run]                         ; optional defaults for the flags below
    h = 1e-3
    tol_iter = 0.01
    max_iter = 200
    seed = 0
    out = results

    [sweep]
    param = f1
    values = 0.1, 0.2, 0.3

Flags: ``--h``, ``--tol-iter``, ``--max-iter``, ``--seed``,
``--set key=value`` (repeatable; ``run.h=...`` style keys set run options),
``--out DIR``, and for ``sweep`` ``--param NAME --values v1,v2,...``.

Exit codes: 0 success or certified, 2 verification failed, 3 no
convergence, 4 configuration error.  Check reports are written one JSON
record per line; errors go to stderr as JSON records.
"""

from __future__ import annotations

import argparse
import configparser
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

from .constructors import (
    LinearBracketParams,
    bounded_bracket,
    linear_bracket,
    search_linear_lower,
    search_linear_upper,
)
from .corpus import EXAMPLES, build_example
from .errors import BracketViolation, NoConvergence, ParamValidation, QuasisolveError, UnknownExample
from .grid import BoundData, GridFunction
from .iteration import iterate_coupled, write_trace
from .problem import TauMode
from .report import Report
from .verify import contraction_margin, transversality_check, verify_bounds, verify_lower_upper

EXIT_OK = 0
EXIT_VERIFY = 2
EXIT_NOCONV = 3
EXIT_CONFIG = 4

COMMANDS = ("verify", "construct", "solve", "certify", "sweep")


class ConfigError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    problem: str
    h: float = 1e-3
    tol_iter: Optional[float] = None
    max_iter: int = 200
    rng_seed: int = 0
    output_dir: Optional[str] = None
    params: dict = field(default_factory=dict)
    sweep_param: Optional[str] = None
    sweep_values: list = field(default_factory=list)
    jobs: int = 1
    plot: bool = True

    def validate(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if not self.h > 0:
            raise ConfigError("h must be positive")
        if self.max_iter < 1:
            raise ConfigError("max_iter must be at least 1")
        if self.tol_iter is not None and not self.tol_iter > 0:
            raise ConfigError("tol_iter must be positive")
        if self.command == "sweep" and (not self.sweep_param or not self.sweep_values):
            raise ConfigError("sweep needs --param and --values")


def _err(kind: str, message: str, **extra):
    rec = {"error": kind, "message": message}
    rec.update(extra)
    print(json.dumps(rec), file=sys.stderr)


def _emit(report: Report, out_dir: Optional[str], filename: str = "report.jsonl"):
    text = report.to_jsonl()
    sys.stdout.write(text)
    if out_dir:
        with open(os.path.join(out_dir, filename), "w") as fh:
            fh.write(text)


# -- configuration ------------------------------------------------------------


def _parse_value(text: str):
    try:
        return float(text)
    except ValueError as exc:
        raise ConfigError(f"value {text!r} is not a number") from exc


def _load_ini(path: str, cfg: RunConfig) -> RunConfig:
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    parser.optionxform = str
    if not parser.read(path):
        raise ConfigError(f"cannot read config {path!r}")
    if not parser.has_option("problem", "corpus_name"):
        raise ConfigError("config needs [problem] corpus_name")
    cfg.problem = parser.get("problem", "corpus_name").strip()
    checks = {}
    if parser.has_option("problem", "tau_mode"):
        checks["tau_mode"] = parser.get("problem", "tau_mode")
    if parser.has_section("domain"):
        checks["domain"] = {k: _parse_value(v) for k, v in parser.items("domain")}
    cfg._structure_checks = checks  # type: ignore[attr-defined]
    if parser.has_section("params"):
        for k, v in parser.items("params"):
            cfg.params[k] = _parse_value(v)
    if parser.has_section("run"):
        run = dict(parser.items("run"))
        cfg.h = float(run.pop("h", cfg.h))
        if "tol_iter" in run:
            cfg.tol_iter = float(run.pop("tol_iter"))
        cfg.max_iter = int(run.pop("max_iter", cfg.max_iter))
        cfg.rng_seed = int(run.pop("seed", cfg.rng_seed))
        cfg.output_dir = run.pop("out", cfg.output_dir)
        if run:
            raise ConfigError(f"unknown [run] keys: {sorted(run)}")
    if parser.has_section("sweep"):
        cfg.sweep_param = parser.get("sweep", "param", fallback=None)
        vals = parser.get("sweep", "values", fallback="")
        cfg.sweep_values = [_parse_value(v) for v in vals.split(",") if v.strip()]
    return cfg


def _check_structure(cfg: RunConfig, entry):
    checks = getattr(cfg, "_structure_checks", {})
    if "tau_mode" in checks:
        try:
            mode = TauMode.parse(checks["tau_mode"])
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        if mode is not entry.problem.tau_mode:
            raise ConfigError(f"tau_mode {mode.value} does not match {entry.name} "
                              f"({entry.problem.tau_mode.value})")
    dom = checks.get("domain")
    if dom:
        d = entry.problem.domain
        for key, val in dom.items():
            if key not in ("t0", "L", "r", "r_hat"):
                raise ConfigError(f"unknown [domain] key {key!r}")
            if not math.isclose(getattr(d, key), val, abs_tol=1e-12):
                raise ConfigError(f"domain.{key}={val} does not match {entry.name} ({getattr(d, key)})")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="quasisolve", description=__doc__.split("\n\n")[0])
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("problem", help="corpus name or path to an INI config")
    ap.add_argument("--h", type=float, default=None, help="grid step (default 1e-3)")
    ap.add_argument("--tol-iter", type=float, default=None)
    ap.add_argument("--max-iter", type=int, default=None)
    ap.add_argument("--seed", type=int, default=None)
    ap.add_argument("--set", action="append", default=[], metavar="KEY=VALUE")
    ap.add_argument("--out", default=None, metavar="DIR")
    ap.add_argument("--param", default=None, help="parameter swept by the sweep command")
    ap.add_argument("--values", default=None, help="comma separated sweep values")
    ap.add_argument("--jobs", type=int, default=1, help="parallel sweep points")
    ap.add_argument("--no-plot", action="store_true", help="skip the PNG plot of solve")
    return ap


def config_from_args(argv: Sequence[str]) -> RunConfig:
    ap = build_parser()
    try:
        ns = ap.parse_args(argv)
    except SystemExit as exc:
        raise ConfigError("bad command line") from exc
    cfg = RunConfig(ns.command, ns.problem)
    if ns.problem not in EXAMPLES and (os.path.exists(ns.problem) or ns.problem.endswith((".ini", ".cfg"))):
        cfg = _load_ini(ns.problem, cfg)
    for item in ns.set:
        if "=" not in item:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        key, val = (s.strip() for s in item.split("=", 1))
        if key.startswith("run."):
            key = key[4:]
            if key == "h":
                cfg.h = float(val)
            elif key == "tol_iter":
                cfg.tol_iter = float(val)
            elif key == "max_iter":
                cfg.max_iter = int(val)
            elif key == "seed":
                cfg.rng_seed = int(val)
            else:
                raise ConfigError(f"unknown run option {key!r}")
        else:
            cfg.params[key.removeprefix("params.")] = _parse_value(val)
    if ns.h is not None:
        cfg.h = ns.h
    if ns.tol_iter is not None:
        cfg.tol_iter = ns.tol_iter
    if ns.max_iter is not None:
        cfg.max_iter = ns.max_iter
    if ns.seed is not None:
        cfg.rng_seed = ns.seed
    if ns.out is not None:
        cfg.output_dir = ns.out
    if ns.param is not None:
        cfg.sweep_param = ns.param
    if ns.values is not None:
        cfg.sweep_values = [_parse_value(v) for v in ns.values.split(",") if v.strip()]
    cfg.jobs = ns.jobs
    cfg.plot = not ns.no_plot
    cfg.validate()
    return cfg


# -- commands -------------------------------------------------------------------


def _entry(cfg: RunConfig):
    entry = build_example(cfg.problem, cfg.params, h=cfg.h, strict=False)
    _check_structure(cfg, entry)
    return entry


def _verify(cfg: RunConfig, entry) -> int:
    rep = Report()
    rep.extend(Report([r for r in entry.param_checks.records]))
    for r in rep.records:
        r.check_id = "param." + r.check_id
    rep.extend(verify_lower_upper(entry.problem, entry.bracket))
    vb = verify_bounds(entry.problem, entry.bracket, rng_seed=cfg.rng_seed)
    rep.extend(vb)
    if entry.discontinuity_lines:
        env = vb.records[0].detail
        tr = transversality_check(entry.discontinuity_lines, env["f_min"], env["f_max"])
        ok = tr.passed
        rep.add("transversality", ok, tr.margin, None, lines=len(tr))
    _emit(rep, cfg.output_dir)
    return EXIT_OK if rep.passed else EXIT_VERIFY


def _construct(cfg: RunConfig, entry) -> int:
    p = entry.problem
    name = entry.name
    rep = Report()
    if name.startswith("ej1"):
        r_bar = entry.params["r_bar"]
        found = search_linear_upper(p, r_bar, h=cfg.h)
        rep.add("search_linear_upper", found is not None, found[0] if found else -1.0, None)
        if found:
            m_b, n_b = found
            eps = entry.bracket.bounds.psi_m.values.min()
            m_grid = [m for m in (m_b * 2.0 ** -j for j in range(1, 21)) if m < eps]
            m_a = search_linear_lower(p, m_b, n_b, r_bar, m_grid=m_grid, h=cfg.h)
            rep.add("search_linear_lower", m_a is not None and 0 < m_a < eps,
                    m_a if m_a is not None else -1.0, None)
            if m_a is not None:
                br = linear_bracket(p, LinearBracketParams(m_a, m_b, n_b), r_bar, cfg.h)
                rep.extend(br.report)
    elif name.startswith("ex1"):
        psi = entry.params["sigma1"] + entry.params["sigma2"]
        br = bounded_bracket(p, 0.0, 0.3, psi, h=cfg.h)
        rep.extend(br.report)
    elif name == "probe_linear":
        br = bounded_bracket(p, 0.0, 0.0, entry.params["a"], h=cfg.h)
        rep.extend(br.report)
    else:
        rep.add("no_recipe", True, 0.0, None, note="shipped bracket only")
        rep.extend(verify_lower_upper(p, entry.bracket))
    _emit(rep, cfg.output_dir)
    return EXIT_OK if rep.passed else EXIT_VERIFY


def _plot(entry, sol, path):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(7, 4))
    t = sol.v_star.t
    ax.plot(t, entry.bracket.alpha.values, "k--", lw=0.8, label="alpha")
    ax.plot(t, entry.bracket.beta.values, "k:", lw=0.8, label="beta")
    ax.plot(t, sol.v_star.values, label="v*")
    ax.plot(t, sol.w_star.values, label="w*")
    ax.axvline(entry.problem.domain.t0, color="0.7", lw=0.5)
    ax.set_xlabel("t")
    ax.set_title(f"{entry.name}: gap {sol.gap:.2e}")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def _solve(cfg: RunConfig, entry, write: bool = True):
    rep = verify_lower_upper(entry.problem, entry.bracket)
    if not rep.passed:
        _emit(rep, cfg.output_dir)
        return EXIT_VERIFY, None
    sol = iterate_coupled(entry.problem, entry.bracket, tol_iter=cfg.tol_iter,
                          max_iter=cfg.max_iter, force=True)
    if write and cfg.output_dir:
        sol.v_star.to_csv(os.path.join(cfg.output_dir, "v_star.csv"))
        sol.w_star.to_csv(os.path.join(cfg.output_dir, "w_star.csv"))
        write_trace(sol.trace, os.path.join(cfg.output_dir, "trace.csv"))
        if cfg.plot:
            _plot(entry, sol, os.path.join(cfg.output_dir, "solution.png"))
    return (EXIT_OK if sol.converged else EXIT_NOCONV), sol


def _solve_cmd(cfg: RunConfig, entry) -> int:
    code, sol = _solve(cfg, entry)
    if sol is None:
        return code
    rep = Report()
    rep.add("converged", sol.converged, sol.tol_iter - (sol.trace[-1].gap if sol.trace else 0.0), None,
            iterations=sol.iterations)
    rep.add("gap", True, sol.gap, None)
    rep.add("residual_v", True, sol.residual_v, None)
    rep.add("residual_w", True, sol.residual_w, None)
    rep.add("monotonicity_warnings", sol.monotonicity_warnings == 0, -float(sol.monotonicity_warnings), None)
    _emit(rep, cfg.output_dir)
    return code


def _certify_once(cfg: RunConfig, entry, write: bool = True) -> tuple[int, dict]:
    margin = contraction_margin(entry.lipschitz, entry.problem.tau_mode) if entry.lipschitz else -math.inf
    code, sol = _solve(cfg, entry, write=write)
    row = {"margin": margin, "gap": math.nan, "iterations": 0, "converged": False, "exit": code}
    if sol is None:
        return code, row
    gap_ok = sol.gap <= 10.0 * cfg.h
    row.update(gap=sol.gap, iterations=sol.iterations, converged=sol.converged)
    if not sol.converged:
        code = EXIT_NOCONV
    elif margin > 0 and gap_ok:
        code = EXIT_OK
    else:
        code = EXIT_VERIFY
    row["exit"] = code
    return code, row


def _certify(cfg: RunConfig, entry) -> int:
    code, row = _certify_once(cfg, entry)
    rep = Report()
    rep.add("contraction_margin", row["margin"] > 0, row["margin"], None)
    rep.add("gap<=10h", row["gap"] <= 10.0 * cfg.h, 10.0 * cfg.h - row["gap"], None)
    rep.add("converged", row["converged"], 0.0, None, iterations=row["iterations"])
    _emit(rep, cfg.output_dir)
    return code


def _sweep_point(args):
    cfg, value = args
    pcfg = replace(cfg, params={**cfg.params, cfg.sweep_param: value}, output_dir=None)
    try:
        entry = build_example(pcfg.problem, pcfg.params, h=pcfg.h, strict=False)
        code, row = _certify_once(pcfg, entry, write=False)
    except ParamValidation as exc:
        return value, {"margin": math.nan, "gap": math.nan, "iterations": 0, "converged": False,
                       "exit": EXIT_CONFIG, "error": str(exc)}
    except QuasisolveError as exc:
        return value, {"margin": math.nan, "gap": math.nan, "iterations": 0, "converged": False,
                       "exit": EXIT_VERIFY, "error": str(exc)}
    return value, row


def _sweep(cfg: RunConfig) -> int:
    points = [(cfg, v) for v in cfg.sweep_values]
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as ex:
            rows = list(ex.map(_sweep_point, points))
    else:
        rows = [_sweep_point(pt) for pt in points]
    header = f"{cfg.sweep_param:>12} {'margin':>10} {'gap':>10} {'iters':>6} exit"
    lines = [header]
    csv_lines = [f"{cfg.sweep_param},margin,gap,iterations,converged,exit"]
    for value, row in rows:
        lines.append(f"{value:>12.6g} {row['margin']:>10.4g} {row['gap']:>10.3e} {row['iterations']:>6d} {row['exit']}")
        csv_lines.append(f"{value:.17g},{row['margin']:.17g},{row['gap']:.17g},{row['iterations']},"
                         f"{int(row['converged'])},{row['exit']}")
    print("\n".join(lines))
    if cfg.output_dir:
        with open(os.path.join(cfg.output_dir, "sweep.csv"), "w") as fh:
            fh.write("\n".join(csv_lines) + "\n")
    codes = [row["exit"] for _, row in rows]
    return max(codes) if codes else EXIT_OK


def run(cfg: RunConfig) -> int:
    """Execute one configured command and return its exit code."""
    try:
        cfg.validate()
        if cfg.output_dir:
            os.makedirs(cfg.output_dir, exist_ok=True)
        if cfg.command == "sweep":
            return _sweep(cfg)
        entry = _entry(cfg)
        handler = {"verify": _verify, "construct": _construct, "solve": _solve_cmd,
                   "certify": _certify}[cfg.command]
        return handler(cfg, entry)
    except (ConfigError, UnknownExample, ParamValidation) as exc:
        _err(type(exc).__name__, str(exc))
        return EXIT_CONFIG
    except NoConvergence as exc:
        _err("NoConvergence", str(exc))
        return EXIT_NOCONV
    except (BracketViolation, QuasisolveError) as exc:
        _err(type(exc).__name__, str(exc))
        return EXIT_VERIFY


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        cfg = config_from_args(argv)
    except (ConfigError, ValueError) as exc:
        _err("ConfigError", str(exc))
        return EXIT_CONFIG
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
