"""Command-line front end: ``cheegerspec {bound,sweep,spectrum,riemann-check,validate}``.

Flags override values from an optional ``--config`` file of ``key = value``
lines (keys are the long flag names with dashes or underscores).
Exit codes: 0 success, 1 solver failure or failed check, 2 invalid configuration.
"""
from __future__ import annotations

import argparse
import math
import sys

from . import __version__
from .bounds import bound_report, h_grid, omega_problem, sweep, write_csv, write_curves, asymptotic_constant
from .errors import CheegerSpecError, SingularSubstitutionError
from .riemann import (fuchsian_check, liouville_transform, local_exponents, riemann_params,
                      verify_riem2)
from .sturm import EIG_TOL, eigenfunction, eigenvalues
from .validate import CASES, run_all
from .weights import GeometryParams, Rule, build_weights

DEFAULTS = {
    "n": 2, "delta": 1.0, "h": None, "h_range": None, "log": False, "k": None,
    "rule": "agol", "omega": 1, "tol": None, "out": None, "format": "csv",
    "dump_eigenfunction": None, "tau_only": False, "residual_tol": 1e-4,
    "grid": 1024, "case": None, "workers": 1,
}


class ConfigError(Exception):
    pass


def _common(p, *, single_h=True, h_range=False):
    p.add_argument("--config", metavar="PATH", help="key = value file; flags take precedence")
    p.add_argument("--n", type=int, default=None, help="dimension (default 2)")
    p.add_argument("--delta", type=float, default=None, help="Ricci scale, Ric >= -(n-1) delta^2 (default 1)")
    if single_h:
        p.add_argument("--h", type=float, default=None, help="Cheeger constant")
    if h_range:
        p.add_argument("--h-range", nargs=3, metavar=("MIN", "MAX", "COUNT"), default=None)
        p.add_argument("--log", action="store_true", default=None, help="log-spaced h grid")
    p.add_argument("--rule", choices=[r.value for r in Rule], default=None,
                   help="mean-curvature bound (default agol)")
    p.add_argument("--tol", type=float, default=None, help="relative eigenvalue tolerance")
    p.add_argument("--out", metavar="PATH", default=None)


def build_parser():
    parser = argparse.ArgumentParser(prog="cheegerspec", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bound", help="eigenvalue bounds at one h")
    _common(p, h_range=True)
    p.add_argument("--k", type=int, nargs="+", default=None)

    p = sub.add_parser("sweep", help="bounds over a grid of h, as CSV")
    _common(p, single_h=True, h_range=True)
    p.add_argument("--k", type=int, nargs="+", default=None)
    p.add_argument("--format", choices=["csv", "svg-data"], default=None)
    p.add_argument("--workers", type=int, default=None)

    p = sub.add_parser("spectrum", help="eigenvalues of omega_1 or omega_2 at one h")
    _common(p, h_range=True)
    p.add_argument("--k", type=int, nargs="+", default=None)
    p.add_argument("--omega", type=int, choices=[1, 2], default=None)
    p.add_argument("--dump-eigenfunction", type=int, metavar="K", default=None)

    p = sub.add_parser("riemann-check", help="verify the Riemann-equation form of the first eigenfunction")
    _common(p, h_range=True)
    p.add_argument("--tau-only", action="store_true", default=None)
    p.add_argument("--residual-tol", type=float, default=None)
    p.add_argument("--grid", type=int, default=None, help="eigenfunction sample count")

    p = sub.add_parser("validate", help="run the closed-form oracle cases")
    p.add_argument("--config", metavar="PATH")
    p.add_argument("--case", choices=sorted(CASES), action="append", default=None)
    p.add_argument("--tol", type=float, default=None, help="override every case tolerance")
    return parser


def read_config(path):
    out = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key = value")
            key, val = (s.strip() for s in line.split("=", 1))
            out[key.replace("-", "_")] = val
    return out


def _coerce(key, raw):
    try:
        if key in ("n", "omega", "dump_eigenfunction", "grid", "workers"):
            return int(raw)
        if key in ("delta", "h", "tol", "residual_tol"):
            return float(raw)
        if key in ("log", "tau_only"):
            return raw.lower() in ("1", "true", "yes", "on")
        if key == "k":
            return [int(x) for x in raw.replace(",", " ").split()]
        if key == "h_range":
            return raw.replace(",", " ").split()
        if key == "case":
            return raw.replace(",", " ").split()
    except ValueError as exc:
        raise ConfigError(f"bad value for {key}: {raw!r}") from exc
    return raw


def resolve(args):
    """Merge flags over config file over defaults into a plain namespace."""
    cfg = read_config(args.config) if getattr(args, "config", None) else {}
    merged = dict(DEFAULTS)
    for key, raw in cfg.items():
        if key not in DEFAULTS:
            raise ConfigError(f"unknown config key {key!r}")
        merged[key] = _coerce(key, raw)
    for key, val in vars(args).items():
        if val is not None and key in DEFAULTS:
            merged[key] = val
    merged["command"] = args.command
    conf = argparse.Namespace(**merged)
    if conf.h_range is not None:
        try:
            lo, hi, count = float(conf.h_range[0]), float(conf.h_range[1]), int(conf.h_range[2])
        except (ValueError, IndexError) as exc:
            raise ConfigError("--h-range needs MIN MAX COUNT") from exc
        if count < 1 or not 0 < lo < hi:
            raise ConfigError("--h-range needs 0 < MIN < MAX and COUNT >= 1")
        conf.h_range = (lo, hi, count)
    if conf.k is not None and any(k < 1 for k in conf.k):
        raise ConfigError("--k values must be >= 1")
    return conf


def _params(conf):
    if conf.h_range is not None:
        raise ConfigError(f"{conf.command} takes a single --h, not --h-range")
    if conf.h is None:
        raise ConfigError(f"{conf.command} needs --h")
    try:
        return GeometryParams(conf.n, conf.delta, conf.h, conf.rule)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _open_out(path):
    return open(path, "w", newline="") if path else sys.stdout


def cmd_bound(conf):
    params = _params(conf)
    report = bound_report(params, conf.k or [1], conf.tol or EIG_TOL)
    print("\n".join(report.lines()))
    return 0


def cmd_sweep(conf):
    if conf.h_range is None:
        raise ConfigError("sweep needs --h-range MIN MAX COUNT")
    if conf.h is not None:
        raise ConfigError("sweep takes --h-range, not --h")
    try:
        template = GeometryParams(conf.n, conf.delta, conf.h_range[0], conf.rule)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    k_list = conf.k or [1]
    grid = h_grid(*conf.h_range, log=conf.log)
    reports = sweep(template, grid, k_list, conf.tol or EIG_TOL, workers=conf.workers)
    for r in reports:
        if r.error:
            print(f"warning: h={r.params.h!r}: {r.error}", file=sys.stderr)
    meta = {"n": conf.n, "delta": conf.delta, "rule": conf.rule,
            "h_range": " ".join(map(repr, conf.h_range)), "spacing": "log" if conf.log else "linear",
            "k": " ".join(map(str, k_list)), "tol": conf.tol or EIG_TOL}
    fh = _open_out(conf.out)
    try:
        write_csv(reports, fh, k_list, meta)
    finally:
        if conf.out:
            fh.close()
    if conf.format == "svg-data":
        if conf.out:
            with open(conf.out + ".curves", "w") as cf:
                write_curves(reports, cf)
        else:
            write_curves(reports, sys.stdout)
    return 1 if all(r.error for r in reports) else 0


def cmd_spectrum(conf):
    params = _params(conf)
    ws = build_weights(params)
    prob = omega_problem(conf.omega, ws)
    ks = conf.k or [1, 2, 3, 4, 5]
    lams = eigenvalues(prob, max(ks), conf.tol or EIG_TOL)
    print(f"# omega{conf.omega} n={params.n} delta={params.delta!r} h={params.h!r} "
          f"rule={params.rule.value} T={ws.T!r}")
    if conf.omega == 2:
        print(f"# c_tilde = {asymptotic_constant(ws)!r}")
    print(f"{'k':>4} {'lambda':>24} {'lambda/k^2':>24}")
    for k in ks:
        print(f"{k:>4d} {lams[k - 1]:>24.15e} {lams[k - 1] / k ** 2:>24.15e}")
    if conf.dump_eigenfunction is not None:
        k = conf.dump_eigenfunction
        if k < 1:
            raise ConfigError("--dump-eigenfunction K needs K >= 1")
        lam = lams[k - 1] if k <= len(lams) else eigenvalues(prob, k, conf.tol or EIG_TOL)[-1]
        pair = eigenfunction(prob, lam, k, num=conf.grid)
        if conf.out:
            with open(conf.out, "w", newline="") as fh:
                pair.to_csv(fh)
        else:
            pair.to_csv(sys.stdout)
    return 0


def _fmt_pair(pair):
    return "{" + ", ".join(f"{complex(x).real + 0.0:.12g}{complex(x).imag + 0.0:+.12g}j" for x in pair) + "}"


def cmd_riemann_check(conf):
    if conf.delta != 1.0:
        raise ConfigError("riemann-check requires --delta 1")
    conf.rule = Rule.AGOL.value
    params = _params(conf)
    ws = build_weights(params)
    prob = omega_problem(1, ws)
    lam = eigenvalues(prob, 1, conf.tol or EIG_TOL)[0]
    pair = eigenfunction(prob, lam, 1, num=conf.grid)
    sol = liouville_transform(pair, params.h, params.n)
    print(f"n = {params.n}\nh = {params.h!r}\nupsilon = {ws.upsilon!r}\nT = {ws.T!r}\nlambda = {lam!r}")
    print(f"tau_residual = {sol.tau_residual:.6e}")
    print(f"y(0) = {sol.left_defect:.3e}\ny(T) - Jbar(T) = {sol.value_defect:.3e}\n"
          f"y'(T) - Jbar'(T) = {sol.slope_defect:.3e}")
    ok = sol.tau_residual <= conf.residual_tol
    if conf.tau_only:
        print(f"status = {'pass' if ok else 'FAIL'}")
        return 0 if ok else 1
    try:
        rp = riemann_params(params.n, lam, ws.upsilon, ws.T)
    except SingularSubstitutionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    ex = local_exponents(rp)
    z_res = verify_riem2(sol, rp)
    fuchs = fuchsian_check(rp)
    print(f"q = {rp.q!r}\nr = {rp.r!r}\ns = {rp.s!r}\na = {rp.a!r}\nb = {rp.b!r}")
    print(f"exponents at 0 = {_fmt_pair(ex.at_zero)}")
    print(f"exponents at 1 = {_fmt_pair(ex.at_one)}")
    print(f"exponents at inf = {_fmt_pair(ex.at_infinity)}")
    print(f"exponent sum = {complex(ex.total()).real:.15g}")
    print(f"fuchsian = {fuchs['ok']}")
    print(f"z_residual = {z_res:.6e}")
    ok = ok and z_res <= conf.residual_tol and fuchs["ok"]
    print(f"status = {'pass' if ok else 'FAIL'}")
    return 0 if ok else 1


def cmd_validate(conf):
    tolerances = {"*": conf.tol} if conf.tol is not None else None
    report = run_all(tolerances, conf.case)
    print(report.table())
    if not report.passed:
        print("failing cases: " + ", ".join(report.failing), file=sys.stderr)
        return 1
    return 0


COMMANDS = {
    "bound": cmd_bound, "sweep": cmd_sweep, "spectrum": cmd_spectrum,
    "riemann-check": cmd_riemann_check, "validate": cmd_validate,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        conf = resolve(args)
        return COMMANDS[args.command](conf)
    except (ConfigError, OSError) as exc:
        print(f"cheegerspec: error: {exc}", file=sys.stderr)
        return 2
    except CheegerSpecError as exc:
        print(f"cheegerspec: solver failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
