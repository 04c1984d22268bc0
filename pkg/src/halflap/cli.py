"""Command-line front end: ``halflap {thresholds,solve,sweep,verify}``.

Every command reads a TOML run configuration (see :mod:`halflap.config`)
and writes JSON reports into the output directory.  Reports are
deterministic functions of the configuration and seed; wall-clock timings
go to a separate ``timings.json`` so reruns produce byte-identical reports.

Exit codes: 0 success, 1 runtime failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import __version__
from .config import RunConfig, from_dict, load
from .errors import ConfigError, HalflapError, NoWitnessError, UndefinedCfError
from .fields import write_field_csv, write_samples_csv
from .nonlinearity import estimate_cf
from .solvers import MINIMIZER, MOUNTAIN_PASS, solve_both
from .thresholds import certify, check_theorem_ball, first_eigenvalue, lambda_nonexist, lambda_zero

DEFAULT_OUT = "halflap-out"
SWEEP_COLUMNS = ["index", "lambda", "outcome", "energy_minimizer", "residual_minimizer",
                 "energy_mountain_pass", "residual_mountain_pass", "h_distance", "error"]


def _clean(obj):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to strings."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_clean(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else repr(x)
    return obj


def dumps(obj) -> str:
    return json.dumps(_clean(obj), indent=2, sort_keys=True, allow_nan=False) + "\n"


def write_atomic(path, text: str) -> None:
    """Write through a temporary file in the same directory, then rename."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _envelope(command: str, cfg: RunConfig) -> dict:
    return {"version": __version__, "command": command, "config": cfg.describe()}


def _c_f(nonlinearity) -> float:
    try:
        return estimate_cf(nonlinearity).value
    except UndefinedCfError:
        return 0.0


def references(cfg: RunConfig, nonlinearity, weight, need_zero=True) -> tuple:
    """``(refs, lz)``: the thresholds a relative ``lambda`` may point at.

    ``lambda_zero`` is ``None`` (and absent from ``refs``) when no cone
    witness exists.
    """
    cf = _c_f(nonlinearity)
    refs = {"c_f": cf}
    if cf > 0:
        refs["lambda_nonexist"] = lambda_nonexist(first_eigenvalue(cfg.domain), cf, weight.sup_norm)
    lz = None
    if need_zero:
        try:
            lz = lambda_zero(nonlinearity, weight, cfg.domain)
            refs["lambda_zero"] = lz.value
        except NoWitnessError:
            pass
    return refs, lz


def _resolve(spec, refs):
    if spec.of is not None and spec.of not in refs:
        raise NoWitnessError(f"lambda refers to {spec.of}, which is undefined for this configuration")
    return spec.resolve(refs)


# --------------------------------------------------------------------------
# commands

def cmd_thresholds(cfg: RunConfig, out: str) -> int:
    g = cfg.build_nonlinearity()
    model = None
    if cfg.domain.has_basis and cfg.modes is not None:
        cf = _c_f(g)
        model = cfg.build_model(0.0, g.with_cf(cf) if cf > 0 else g)
        weight = model.weight
    else:
        weight = cfg.build_weight()
    cert = certify(g if model is None else model.nonlinearity, weight, cfg.domain, model,
                   cfg.random_trials, cfg.seed)
    doc = _envelope("thresholds", cfg)
    doc["hypotheses"] = g.describe()
    doc["certificate"] = cert.describe()
    if cfg.domain.kind == "ball" and cfg.domain.dim >= 2:
        try:
            doc["ball_condition"] = check_theorem_ball(g, cfg.domain.dim, cfg.domain.radius).describe()
        except ValueError as exc:
            doc["ball_condition"] = {"status": "not-applicable", "reason": str(exc)}
    write_atomic(os.path.join(out, "certificate.json"), dumps(doc))
    print(f"lambda_nonexist = {cert.lambda_nonexist!r}")
    print(f"lambda_zero     = {cert.lambda_zero.value!r}")
    if cert.lambda_star is not None:
        print(f"lambda_star <= {cert.lambda_star.upper!r}")
    return 0


def _solve_document(cfg: RunConfig, lam: float, refs: dict, lz):
    g = cfg.build_nonlinearity()
    if refs.get("c_f", 0) > 0:
        g = g.with_cf(refs["c_f"])
    model = cfg.build_model(lam, g)
    report = solve_both(model, cfg.solver, lz, thresholds=refs)
    return model, report


def cmd_solve(cfg: RunConfig, out: str) -> int:
    if cfg.lam is None:
        raise ConfigError("solve needs a scalar 'lambda'")
    g = cfg.build_nonlinearity()
    weight = cfg.build_weight()
    refs, lz = references(cfg, g, weight)
    lam = _resolve(cfg.lam, refs)
    model, report = _solve_document(cfg, lam, refs, lz)
    doc = _envelope("solve", cfg)
    doc["lambda"] = lam
    doc["report"] = report.describe()
    files = {}
    for p in report.points:
        stem = p.kind.replace("-", "_")
        coeffs, samples = f"{stem}.csv", f"{stem}_samples.csv"
        write_field_csv(os.path.join(out, coeffs), p.u)
        write_samples_csv(os.path.join(out, samples), p.u, model.grid)
        files[p.kind] = {"coefficients": coeffs, "samples": samples}
    n = cfg.domain.dim
    doc["files"] = files
    doc["csv_columns"] = {"coefficients": [f"k{d + 1}" for d in range(n)] + ["coefficient"],
                          "samples": [f"x{d + 1}" for d in range(n)] + ["value"]}
    write_atomic(os.path.join(out, "report.json"), dumps(doc))
    write_atomic(os.path.join(out, "timings.json"), dumps(report.timings))
    print(f"outcome: {report.outcome}")
    for p in report.points:
        print(f"  {p.kind}: energy {p.energy!r}, residual {p.residual:.3e}")
    return 0


def _sweep_row(raw: dict, index: int, lam: float, refs: dict, lz, rows_dir: str) -> dict:
    cfg = from_dict(raw)
    row = {"index": index, "lambda": lam}
    try:
        _, report = _solve_document(cfg, lam, refs, lz)
        row["outcome"] = report.outcome
        for p in report.points:
            if p.kind in (MINIMIZER, MOUNTAIN_PASS):
                key = p.kind.replace("-", "_")
                row[f"energy_{key}"] = p.energy
                row[f"residual_{key}"] = p.residual
        if report.distances:
            row["h_distance"] = next(iter(report.distances.values()))
        detail = report.describe()
    except (HalflapError, ArithmeticError, ValueError) as exc:
        row["outcome"] = "failed"
        row["error"] = str(exc)
        detail = {"error": str(exc)}
    write_atomic(os.path.join(rows_dir, f"row_{index:04d}.json"), dumps({"row": row, "report": detail}))
    return row


def cmd_sweep(cfg: RunConfig, out: str, jobs: int = 1) -> int:
    if cfg.sweep is None:
        raise ConfigError("sweep needs a [sweep] table")
    g = cfg.build_nonlinearity()
    weight = cfg.build_weight()
    refs, lz = references(cfg, g, weight)
    for spec in (cfg.sweep.lo, cfg.sweep.hi):
        if spec.of is not None and spec.of not in refs:
            raise NoWitnessError(f"sweep bound refers to {spec.of}, which is undefined here")
    lams = [float(v) for v in cfg.sweep.values(refs)]
    rows_dir = os.path.join(out, "rows")
    os.makedirs(rows_dir, exist_ok=True)
    args = [(cfg.raw, i, lam, refs, lz, rows_dir) for i, lam in enumerate(lams)]
    if jobs <= 1:
        rows = [_sweep_row(*a) for a in args]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_sweep_row, *zip(*args)))
    rows.sort(key=lambda r: r["index"])

    lines = []
    for r in rows:
        vals = []
        for c in SWEEP_COLUMNS:
            v = r.get(c, "")
            vals.append(format(v, ".17g") if isinstance(v, float) else str(v))
        lines.append(vals)
    path = os.path.join(out, "sweep.csv")
    with open(path + ".tmp", "w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(SWEEP_COLUMNS)
        wr.writerows(lines)
    os.replace(path + ".tmp", path)
    doc = _envelope("sweep", cfg)
    doc["thresholds"] = refs
    doc["lambdas"] = lams
    doc["csv_columns"] = SWEEP_COLUMNS
    doc["rows"] = rows
    write_atomic(os.path.join(out, "report.json"), dumps(doc))
    ok = sum(r["outcome"] != "failed" for r in rows)
    print(f"{ok}/{len(rows)} rows succeeded")
    return 0 if ok >= 1 else 1


DEFAULT_VERIFY = {"domain": {"kind": "interval", "lengths": ["pi"]}, "modes": 32}


def cmd_verify(cfg: RunConfig, out: str) -> int:
    from .verify import run_suite

    checks = run_suite(cfg)
    doc = _envelope("verify", cfg)
    doc["checks"] = [c.describe() for c in checks]
    doc["all_passed"] = all(c.passed for c in checks)
    write_atomic(os.path.join(out, "verify.json"), dumps(doc))
    for c in checks:
        print(f"{'PASS' if c.passed else 'FAIL'} {c.name}: {c.measured:.3e} (tol {c.tolerance:.1e})")
    return 0 if doc["all_passed"] else 1


# --------------------------------------------------------------------------
# entry point

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="halflap", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in (("thresholds", "write the threshold certificate"),
                       ("solve", "find the minimiser and the mountain-pass point"),
                       ("sweep", "solve over a range of lambda"),
                       ("verify", "run the invariant checks")):
        p = sub.add_parser(name, help=text)
        p.add_argument("--config", required=name != "verify", help="TOML run configuration")
        p.add_argument("--out", help=f"output directory (default: config 'out' or {DEFAULT_OUT})")
        p.add_argument("--seed", type=int, help="override the configuration seed (unsigned 64-bit)")
        if name == "sweep":
            p.add_argument("--jobs", type=int, default=1, help="parallel sweep rows")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load(args.config) if args.config else from_dict(dict(DEFAULT_VERIFY))
        if args.seed is not None:
            if not 0 <= args.seed < 2**64:
                raise ConfigError("--seed must be an unsigned 64-bit integer")
            cfg = cfg.with_seed(args.seed)
        if getattr(args, "jobs", 1) < 1:
            raise ConfigError("--jobs must be at least 1")
        out = args.out or cfg.out or DEFAULT_OUT
        try:
            os.makedirs(out, exist_ok=True)
        except OSError as exc:
            raise ConfigError(f"cannot create output directory {out}: {exc}") from exc
        if not os.access(out, os.W_OK):
            raise ConfigError(f"output directory {out} is not writable")
        if args.command == "thresholds":
            return cmd_thresholds(cfg, out)
        if args.command == "solve":
            return cmd_solve(cfg, out)
        if args.command == "sweep":
            return cmd_sweep(cfg, out, args.jobs)
        return cmd_verify(cfg, out)
    except ConfigError as exc:
        print(f"halflap: config error: {exc}", file=sys.stderr)
        return 2
    except (HalflapError, ArithmeticError, ValueError, OSError) as exc:
        print(f"halflap: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
