"""``quenchlab`` command line.

    quenchlab verify   [--n 4,6,8,10] [--lambdas 0.3,0.9,1.0,1.5] [--tolerance 1e-9]
    quenchlab sweep    --observable chi-f|riw|energy --method sum|integral|elliptic|asymptotic
    quenchlab peaks    [--observable ...] [--n 128,...,4096]
    quenchlab collapse [--observable ...] [--nu 1.0] [--window 2]

Common: ``--lambda-min/--lambda-max/--lambda-count``, ``--out``, ``--format csv|json``,
``--config path`` (``key = value`` lines; command-line flags win), ``--workers``.

Exit codes: 0 success, 1 failed check or fit, 2 configuration error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from . import ed, observables as obs, scaling
from .errors import ConfigurationError, DegeneracyError, QuenchLabError, ResourceError
from .ising import check_sites, ground_energy_sum
from .parallel import ordered_map, worker_count
from .tables import render_csv, render_json

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_IO = 0, 1, 2, 3

OBSERVABLES = {
    "chi-f": obs.FIDELITY_SUSCEPTIBILITY,
    "riw": obs.RESCALED_IRREVERSIBLE_WORK,
    "energy": obs.GROUND_ENERGY,
}
METHODS = {
    "sum": obs.MODE_SUM,
    "integral": obs.CONTINUUM_INTEGRAL,
    "elliptic": obs.ELLIPTIC_CLOSED_FORM,
    "asymptotic": obs.ASYMPTOTIC,
}
ANSATZ = {
    obs.FIDELITY_SUSCEPTIBILITY: ("algebraic", scaling.collapse_algebraic),
    obs.RESCALED_IRREVERSIBLE_WORK: ("logarithmic", scaling.collapse_logarithmic),
}

DEFAULTS = {
    "verify": {"n": "4,6,8,10", "lambdas": "0.3,0.9,1.0,1.5", "tolerance": 1e-9, "solver": "lapack"},
    "sweep": {"observable": "chi-f", "method": "sum", "n": "128,256,512,1024"},
    "peaks": {"n": "128,256,512,1024,2048,4096"},
    "collapse": {"n": "128,256,512,1024", "nu": 1.0, "window": 2.0},
}
COMMON_DEFAULTS = {"lambda_min": 0.8, "lambda_max": 1.2, "lambda_count": 2001, "format": "csv"}
# execution details that must not leak into (and change) the output bytes
NOT_RECORDED = {"out", "config", "workers", "command"}


class OutputError(QuenchLabError):
    """Result file could not be written."""


def _parser():
    p = argparse.ArgumentParser(prog="quenchlab", description=__doc__.split("\n\n")[0])
    p.add_argument("command", choices=sorted(DEFAULTS))
    p.add_argument("--observable", choices=sorted(OBSERVABLES))
    p.add_argument("--method", choices=sorted(METHODS))
    p.add_argument("--n", help="comma-separated even chain lengths")
    p.add_argument("--lambdas", help="comma-separated fields (verify)")
    p.add_argument("--lambda-min", dest="lambda_min", type=float)
    p.add_argument("--lambda-max", dest="lambda_max", type=float)
    p.add_argument("--lambda-count", dest="lambda_count", type=int)
    p.add_argument("--nu", type=float)
    p.add_argument("--window", type=float)
    p.add_argument("--tolerance", type=float)
    p.add_argument("--solver", choices=["lapack", "jacobi"])
    p.add_argument("--out")
    p.add_argument("--format", choices=["csv", "json"])
    p.add_argument("--config")
    p.add_argument("--workers", type=int)
    return p


def read_config_file(path):
    """``key = value`` lines; ``#`` comments and blank lines ignored."""
    settings = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ConfigurationError(f"{path}:{lineno}: expected key = value")
            settings[key.strip().replace("-", "_")] = value.strip()
    return settings


CHOICES = {
    "observable": OBSERVABLES, "method": METHODS,
    "format": ("csv", "json"), "solver": ("lapack", "jacobi"),
}


def resolve(args):
    """Merge built-in defaults, the config file and flags (flags win)."""
    cfg = dict(COMMON_DEFAULTS)
    cfg.update(DEFAULTS[args.command])
    if args.config:
        from_file = read_config_file(args.config)
        unknown = sorted(set(from_file) - set(vars(args)) - {"command"})
        if unknown:
            raise ConfigurationError(f"{args.config}: unknown keys {', '.join(unknown)}")
        from_file.pop("command", None)
        cfg.update(from_file)
    for key, value in vars(args).items():
        if value is not None:
            cfg[key] = value
    for key, allowed in CHOICES.items():
        if cfg.get(key) is not None and cfg[key] not in allowed:
            raise ConfigurationError(f"{key} must be one of {', '.join(sorted(allowed))}, got {cfg[key]!r}")
    return cfg


def _number(cfg, key, cast=float):
    try:
        return cast(cfg[key])
    except (TypeError, ValueError):
        raise ConfigurationError(f"{key} must be a number, got {cfg[key]!r}") from None


def _n_list(cfg):
    try:
        ns = [int(t) for t in str(cfg["n"]).split(",") if t.strip()]
    except ValueError:
        raise ConfigurationError(f"--n must be comma-separated integers, got {cfg['n']!r}") from None
    if not ns:
        raise ConfigurationError("--n is empty")
    return sorted({check_sites(n) for n in ns})


def _lambda_grid(cfg):
    lo, hi, count = _number(cfg, "lambda_min"), _number(cfg, "lambda_max"), _number(cfg, "lambda_count", int)
    if count < 1 or (count >= 2 and not lo < hi) or lo < 0:
        raise ConfigurationError(f"bad lambda grid: min={lo}, max={hi}, count={count}")
    return np.linspace(lo, hi, count) if count > 1 else np.array([lo])


def _kinds(cfg, allowed):
    if cfg.get("observable"):
        kind = OBSERVABLES[cfg["observable"]]
        if kind not in allowed:
            raise ConfigurationError(f"observable {cfg['observable']!r} not supported by this command")
        return [kind]
    return list(allowed)


def _recorded(cfg):
    return {k: v for k, v in cfg.items() if k not in NOT_RECORDED and v is not None}


def _emit(cfg, columns, rows, footer=None):
    render = render_json if cfg["format"] == "json" else render_csv
    text = render(columns, rows, {"command": cfg["command"], **_recorded(cfg)}, footer)
    out = cfg.get("out")
    if not out or out == "-":
        sys.stdout.write(text)
        return
    try:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise OutputError(f"cannot write {out}: {exc}") from exc


def cmd_verify(cfg):
    """Free-fermion and RIW/chi_F identity checks against dense ED."""
    ns = _n_list(cfg)
    try:
        lams = [float(t) for t in str(cfg["lambdas"]).split(",")]
    except ValueError:
        raise ConfigurationError(f"--lambdas must be comma-separated numbers, got {cfg['lambdas']!r}") from None
    if any(not math.isfinite(l) or l < 0 for l in lams):
        raise ConfigurationError(f"fields must be finite and non-negative, got {cfg['lambdas']!r}")
    tol = _number(cfg, "tolerance")
    solver = cfg["solver"]
    for n in ns:
        ed.build_hamiltonian(n)

    def cell(job):
        n, lam = job
        try:
            rep = ed.identity_check(n, lam, solver=solver)
            chi, riw = rep.chi_f, rep.lhs
        except DegeneracyError as exc:
            return [("cell", n, lam, math.nan, math.nan, exc.gap, tol, "ERROR")]
        rows = []
        for name, value, ref in (
            ("identity", rep.lhs, rep.rhs),
            ("ground_energy", rep.ground_energy, ground_energy_sum(n, lam)),
            ("chi_f", chi, obs.chi_f_sum(n, lam)),
            ("riw", riw, obs.riw_sum(n, lam)),
        ):
            gap = abs(value - ref)
            ok = gap <= tol * max(1.0, abs(value))
            rows.append((name, n, lam, value, ref, gap, tol, "PASS" if ok else "FAIL"))
        return rows

    jobs = [(n, lam) for n in ns for lam in lams]
    rows = [r for block in ordered_map(cell, jobs, cfg.get("workers")) for r in block]
    for r in rows:
        print(f"{r[7]:5s} {r[0]:14s} N={r[1]:<3d} lam={r[2]:<6g} value={r[3]:.15g} ref={r[4]:.15g} gap={r[5]:.3e}")
    if cfg.get("out") not in (None, "-"):
        _emit(cfg, ["check", "N", "lambda", "value", "reference", "gap", "tolerance", "status"], rows)
    return EXIT_OK if all(r[7] == "PASS" for r in rows) else EXIT_FAIL


def cmd_sweep(cfg):
    kind = OBSERVABLES[cfg["observable"]]
    method = METHODS[cfg["method"]]
    ns = _n_list(cfg)
    grid = _lambda_grid(cfg)
    if method == obs.ELLIPTIC_CLOSED_FORM and kind == obs.RESCALED_IRREVERSIBLE_WORK and np.any(grid == 1.0):
        raise ConfigurationError("the elliptic RIW diverges at lambda = 1; exclude it from the grid")
    if method == obs.ASYMPTOTIC and np.any(grid == 1.0):
        raise ConfigurationError("the asymptotic law diverges at lambda = 1; exclude it from the grid")
    curves = ordered_map(lambda n: obs.sample_curve(kind, n, grid, method), ns, cfg.get("workers"))
    rows = []
    for c in curves:
        for lam, val, res in zip(c.lambdas.tolist(), c.values.tolist(), c.rescaled.tolist()):
            rows.append((kind, method, c.n_sites, lam, val, res))
    _emit(cfg, ["observable", "method", "N", "lambda", "value", "rescaled_value"], rows)
    return EXIT_OK


def cmd_peaks(cfg):
    ns = _n_list(cfg)
    kinds = _kinds(cfg, (obs.FIDELITY_SUSCEPTIBILITY, obs.RESCALED_IRREVERSIBLE_WORK))
    rows, footer, failures, total = [], {}, [], 0
    for kind in kinds:
        def one(n, kind=kind):
            try:
                return scaling.find_peak(kind, n)
            except QuenchLabError as exc:
                return exc
        found = ordered_map(one, ns, cfg.get("workers"))
        peaks = []
        for n, res in zip(ns, found):
            total += 1
            if isinstance(res, Exception):
                failures.append(f"{kind} N={n}: {res}")
                print(f"peak search failed for {kind} at N={n}: {res}", file=sys.stderr)
                continue
            peaks.append(res)
            rows.append((kind, n, res.lambda_m, res.peak_value, res.one_minus_lambda_m))
        fits = {}
        for law in ("power", "n_log_n"):
            try:
                fits[law] = scaling.fit_peak_scaling(peaks, law).as_dict()
            except QuenchLabError as exc:
                fits[law] = {"error": str(exc)}
        if len(peaks) >= 2:
            fits["one_minus_lambda_m_slope"] = scaling.convergence_exponent(peaks)
        footer[kind] = fits
    if failures:
        footer["failures"] = failures
    _emit(cfg, ["observable", "N", "lambda_m", "peak_value", "one_minus_lambda_m"], rows, footer)
    return EXIT_FAIL if len(failures) == total else EXIT_OK


def cmd_collapse(cfg):
    ns = _n_list(cfg)
    kinds = _kinds(cfg, tuple(ANSATZ))
    nu, window = _number(cfg, "nu"), _number(cfg, "window")
    if not (nu > 0 and window > 0):
        raise ConfigurationError(f"nu and window must be positive, got nu={nu}, window={window}")
    _lambda_grid(cfg)
    lo, hi, count = _number(cfg, "lambda_min"), _number(cfg, "lambda_max"), _number(cfg, "lambda_count", int)
    rows, footer = [], {}
    for kind in kinds:
        name, collapse = ANSATZ[kind]
        curves, peaks = scaling.collapse_curves(kind, ns, lo, hi, count, cfg.get("workers"))
        res = collapse(curves, peaks, nu, window)
        rows.extend((kind, name, n, x, y) for x, y, n in res.points)
        footer[kind] = {"ansatz": name, "nu": nu, "window": window, "quality": res.quality, "mse": res.mse}
    _emit(cfg, ["observable", "ansatz", "N", "x", "y"], rows, footer)
    return EXIT_OK


COMMANDS = {"verify": cmd_verify, "sweep": cmd_sweep, "peaks": cmd_peaks, "collapse": cmd_collapse}


def main(argv=None):
    args = _parser().parse_args(argv)
    try:
        cfg = resolve(args)
        if cfg.get("workers") is not None:
            cfg["workers"] = worker_count(_number(cfg, "workers", int))
        return COMMANDS[args.command](cfg)
    except (ConfigurationError, ResourceError) as exc:
        print(f"quenchlab: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OutputError as exc:
        print(f"quenchlab: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"quenchlab: {exc}", file=sys.stderr)
        return EXIT_CONFIG if args.config and getattr(exc, "filename", None) == args.config else EXIT_IO
    except QuenchLabError as exc:
        print(f"quenchlab: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
