"""Command line front end: spectrum, correlate, bethe and verify.

Every option can be preset through an environment variable named
YBCIRCUIT_<OPTION>, e.g. YBCIRCUIT_LAMBDA_COUNT=41.  Exit codes: 0 success,
1 verification failure, 2 usage error, 3 resource cap.
"""

import argparse
import csv
import io
import json
import math
import os
import sys
import time

import numpy as np

from . import __version__
from .bethe import bethe_eigenvalue, solve_bethe
from .checks import run_suite
from .errors import DomainError, PoleError, ResourceError
from .numerics import cluster_eigenvalues
from .oracle import MAX_OTOC_L, ChainSpec, default_length, infinite_temp_correlation, otoc_direct
from .spectral import sector_eigenvalues
from .transfer import MAX_M, build_transfer, correlation_via_tm, otoc_via_tm, tm_coordinates

SCHEMA = "ybcircuit/1"
ENV_PREFIX = "YBCIRCUIT_"
EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2, 3


class UsageError(ValueError):
    pass


def _fmt(x):
    if isinstance(x, (bool, np.bool_)) or x is None:
        return json.dumps(bool(x) if x is not None else None)
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if not math.isfinite(x):
        return "null"
    return format(x, ".17g")


def to_json(obj, indent=0):
    """JSON text with every float written to 17 significant digits.

    Complex numbers become [re, im] pairs; dict keys are sorted.
    """
    pad, inner = "  " * indent, "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{json.dumps(str(k))}: {to_json(obj[k], indent + 1)}" for k in sorted(obj)]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        if len(obj) == 0:
            return "[]"
        items = [to_json(v, indent + 1) for v in obj]
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in obj):
            return "[" + ", ".join(items) + "]"
        return "[\n" + ",\n".join(inner + s for s in items) + "\n" + pad + "]"
    if isinstance(obj, (complex, np.complexfloating)):
        return f"[{_fmt(obj.real)}, {_fmt(obj.imag)}]"
    if isinstance(obj, str):
        return json.dumps(obj)
    return _fmt(obj)


def _env_default(dest, default, type_):
    raw = os.environ.get(ENV_PREFIX + dest.upper())
    if raw is None:
        return default
    return type_(raw) if type_ else raw


def _opt(p, flag, default=None, type=None, **kw):
    dest = kw.pop("dest", flag.lstrip("-").replace("-", "_"))
    p.add_argument(flag, dest=dest, default=_env_default(dest, default, type), type=type, **kw)


def _common(p, m_default=1):
    _opt(p, "--m", m_default, int, help="transfer matrix size (or maximal size)")
    _opt(p, "--lambda-start", 0.0, float)
    _opt(p, "--lambda-stop", 4.0, float)
    _opt(p, "--lambda-count", 81, int)
    _opt(p, "--eps", None, str, help="comma separated inhomogeneities")
    _opt(p, "--eps-seed", None, int, help="draw normal inhomogeneities from this seed")
    _opt(p, "--kind", "correlation", str, choices=sorted(MAX_M))
    _opt(p, "--tol", 1e-8, float, help="relative clustering tolerance")
    _opt(p, "--out", "-", str, help="output path, - for stdout")
    _opt(p, "--format", "json", str, choices=["json", "csv"])


def build_parser():
    parser = argparse.ArgumentParser(prog="ybcircuit", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="eigenvalues of tau_1 .. tau_m on a lambda grid")
    _common(p)

    p = sub.add_parser("correlate", help="correlators from the transfer matrix and the oracle")
    _common(p)
    _opt(p, "--points", "1:1,1:3", str, help="comma separated x:t pairs")
    _opt(p, "--alpha", "z", str)
    _opt(p, "--beta", "z", str)

    p = sub.add_parser("bethe", help="Bethe root sets and their eigenvalues")
    _common(p)
    _opt(p, "--n", 2, int, help="number of uncontracted sites")
    _opt(p, "--N", 2, int, dest="N", help="number of rapidities")
    _opt(p, "--seed", 0, int)

    p = sub.add_parser("verify", help="run the full property suite")
    _common(p)
    _opt(p, "--seed", 0, int)
    p.add_argument("--inject-wrong-normalization", action="store_true", help=argparse.SUPPRESS)
    return parser


def _grid(cfg):
    if cfg.lambda_count < 1:
        raise UsageError("--lambda-count must be at least 1")
    if cfg.tol <= 0:
        raise UsageError("--tol must be positive")
    return np.linspace(cfg.lambda_start, cfg.lambda_stop, cfg.lambda_count)


def _epsilons(cfg, m):
    if cfg.eps is not None and cfg.eps_seed is not None:
        raise UsageError("give either --eps or --eps-seed")
    if cfg.eps is not None:
        eps = [float(e) for e in cfg.eps.split(",")]
        if len(eps) != m:
            raise UsageError(f"--eps needs {m} values")
        return eps
    if cfg.eps_seed is not None:
        return np.random.default_rng(cfg.eps_seed).normal(size=m).tolist()
    return None


def _inputs(cfg):
    return {k: v for k, v in sorted(vars(cfg).items()) if k != "inject_wrong_normalization"}


def cmd_spectrum(cfg):
    if cfg.m > MAX_M[cfg.kind]:
        raise ResourceError(f"{cfg.kind} spectra are capped at m={MAX_M[cfg.kind]}")
    rows = []
    # an explicit eps list fixes a single size
    sizes = [cfg.m] if cfg.eps is not None else range(1, cfg.m + 1)
    for m in sizes:
        eps = _epsilons(cfg, m)
        for lam in _grid(cfg):
            vals = sector_eigenvalues(build_transfer(m, lam, eps, cfg.kind))
            for value, mult in cluster_eigenvalues(vals, cfg.tol * max(1.0, np.abs(vals).max())):
                rows.append({"m": m, "lambda": float(lam), "re_t": value.real, "im_t": value.imag,
                             "multiplicity": mult})
    return {"rows": rows}, EXIT_OK


def _points(text):
    pts = []
    for item in text.split(","):
        x, t = (int(v) for v in item.split(":"))
        if (t - x) % 2:
            raise UsageError(f"t - x must be even at (x, t) = ({x}, {t}); odd offsets are not supported")
        pts.append((x, t))
    return pts


def cmd_correlate(cfg):
    otoc = cfg.kind == "otoc"
    rows = []
    for lam in _grid(cfg):
        for x, t in _points(cfg.points):
            m, steps = tm_coordinates(x, t)
            if m < 1 or steps < 0:
                raise UsageError(f"(x, t) = ({x}, {t}) lies outside the light cone")
            eps = _epsilons(cfg, m)
            fn = otoc_via_tm if otoc else correlation_via_tm
            row = {"x": x, "t": t, "m": m, "steps": steps, "lambda": float(lam),
                   "value_tm": fn(m, steps, cfg.alpha, cfg.beta, lam, eps)}
            L = default_length(t)
            if eps is None and L <= (MAX_OTOC_L if otoc else 10) and abs(x) <= t:
                spec = ChainSpec(L, t, float(lam))
                ref = (otoc_direct if otoc else infinite_temp_correlation)(spec, x, cfg.alpha, cfg.beta)
                row["value_oracle"] = ref
                row["abs_diff"] = abs(ref - row["value_tm"])
            rows.append(row)
    return {"rows": rows}, EXIT_OK


def cmd_bethe(cfg):
    if cfg.N > 2 * cfg.n:
        raise UsageError("--N must not exceed 2 n")
    eps = _epsilons(cfg, cfg.n)
    grid = _grid(cfg)
    records = []
    for rs in solve_bethe(cfg.n, cfg.N, eps, rng=cfg.seed):
        vals = []
        for lam in grid:
            try:
                vals.append(bethe_eigenvalue(lam, rs))
            except PoleError:
                vals.append(None)
        records.append({"n": rs.n, "N": rs.N, "spin": rs.spin, "roots": list(rs.roots),
                        "residual": rs.residual, "zero_modes": rs.zero_modes,
                        "singular": rs.singular, "lambda": grid, "eigenvalue": vals})
    return {"root_sets": records}, EXIT_OK


def cmd_verify(cfg):
    checks = run_suite(cfg.seed, cfg.inject_wrong_normalization)
    out = [{"name": c.name, "residual": c.residual, "threshold": c.threshold, "passed": c.passed,
            "expect_fail": c.expect_fail, "error": c.error} for c in checks]
    ok = all(c.passed for c in checks)
    return {"checks": out, "passed": ok}, EXIT_OK if ok else EXIT_FAIL


COMMANDS = {"spectrum": cmd_spectrum, "correlate": cmd_correlate, "bethe": cmd_bethe, "verify": cmd_verify}


def _csv(payload):
    rows = payload.get("rows")
    if rows is None:
        raise UsageError("csv output is available for spectrum and correlate only")
    buf = io.StringIO()
    buf.write(f"# schema: {SCHEMA}\n")
    fields = list(rows[0]) if rows else ["m", "lambda", "re_t", "im_t", "multiplicity"]
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(fields)
    for r in rows:
        w.writerow([_cell(r[f]) for f in fields])
    return buf.getvalue()


def _cell(v):
    if isinstance(v, (complex, np.complexfloating)):
        return f"{_fmt(v.real)}{'+' if v.imag >= 0 else '-'}{_fmt(abs(v.imag))}j"
    return _fmt(v)


def main(argv=None):
    parser = build_parser()
    try:
        cfg = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    start = time.perf_counter()
    try:
        payload, code = COMMANDS[cfg.command](cfg)
        text = _csv(payload) if cfg.format == "csv" else None
    except ResourceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (UsageError, DomainError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if text is None:
        doc = {"schema": SCHEMA, "command": cfg.command, "inputs": _inputs(cfg), "outputs": payload,
               "provenance": {"version": __version__, "seed": getattr(cfg, "seed", cfg.eps_seed),
                              "wall_time": time.perf_counter() - start}}
        text = to_json(doc) + "\n"
    if cfg.out == "-":
        sys.stdout.write(text)
    else:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    if cfg.command == "verify":
        for c in payload["checks"]:
            mark = "ok" if c["passed"] else "FAIL"
            rel = ">" if c["expect_fail"] else "<="
            print(f"{mark:4} {c['name']:26} {_fmt(c['residual'])} {rel} {c['threshold']:g}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
