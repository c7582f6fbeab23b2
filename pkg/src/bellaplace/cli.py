"""Command-line front end.

Exit status: 0 on success, 1 when the computation hits a domain problem
(divergence, non-integrability, tolerance not met, bad argument values), 2 on
usage errors (unknown flags, unparsable expressions or sequence specs).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from fractions import Fraction

import numpy as np

from .bellcore import bell_table
from .errors import (ArgumentDomainError, BellaplaceError, ContourDivergenceError,
                     ExpressionSyntaxError)
from .expression import FunctionExpr
from .isomorphism import (SeriesMap, apply_iso, convention_gap, exp_series,
                          iso_reciprocal_convention, laguerre_series)
from .kernels import KernelSpec, hp_decay_probe, kernel_eval
from .series import FormalPowerSeries
from .selftest import run_selftest
from .transform import (QuadratureConfig, bromwich_invert, transform, transform_complex,
                        transform_many)
from .umbral import blissard_reciprocal, coeff_C, parse_sequence_spec

TOL_ENV = "BELLAPLACE_TOL"


class UsageError(Exception):
    pass


# argument helpers ----------------------------------------------------------

def _fraction_list(text):
    out = []
    for item in text.split(","):
        item = item.strip()
        if not item or "." in item or "e" in item.lower():
            raise UsageError(f"expected exact integers or p/q fractions, got {item!r}")
        try:
            out.append(Fraction(item))
        except (ValueError, ZeroDivisionError):
            raise UsageError(f"cannot parse {item!r} as a fraction") from None
    return out


def parse_grid(text: str) -> list[float]:
    """``0.5,1,2`` or ``start:stop:count`` (inclusive, evenly spaced)."""
    try:
        if ":" in text:
            parts = text.split(":")
            if len(parts) != 3:
                raise ValueError
            start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
            if count < 1:
                raise ValueError
            return [float(v) for v in np.linspace(start, stop, count)]
        return [float(v) for v in text.split(",")]
    except ValueError:
        raise UsageError(f"bad grid {text!r}; use a comma list or start:stop:count") from None


def _sequence(text):
    try:
        return parse_sequence_spec(text)
    except ArgumentDomainError as exc:
        raise UsageError(str(exc)) from None


def _function(text, variable="t"):
    return FunctionExpr.parse(text, variable)


def default_tolerance() -> float | None:
    raw = os.environ.get(TOL_ENV)
    if raw is None or raw == "":
        return None
    try:
        value = float(raw)
    except ValueError:
        raise UsageError(f"{TOL_ENV} must be a positive number, got {raw!r}") from None
    if not value > 0:
        raise UsageError(f"{TOL_ENV} must be a positive number, got {raw!r}")
    return value


def _quadrature(args) -> QuadratureConfig:
    env = default_tolerance()
    base = QuadratureConfig()
    abs_tol = args.abs_tol if args.abs_tol is not None else (env or base.abs_tol)
    rel_tol = args.rel_tol if args.rel_tol is not None else (env or base.rel_tol)
    tail = args.tail_eps if args.tail_eps is not None else base.tail_epsilon
    return QuadratureConfig(abs_tol=abs_tol, rel_tol=rel_tol, tail_epsilon=tail,
                            max_interval=args.max_interval)


def _kernel(args) -> KernelSpec:
    chosen = [x is not None for x in (args.sequence, args.laguerre, args.geometric)]
    if sum(chosen) > 1:
        raise UsageError("give at most one of --sequence, --laguerre, --geometric")
    if args.geometric is not None:
        return KernelSpec.truncated_geometric(args.geometric)
    if args.sequence is not None:
        spec = KernelSpec.reciprocal_egf(_sequence(args.sequence))
    else:
        spec = KernelSpec.laguerre(args.laguerre if args.laguerre is not None else 0)
    if getattr(args, "truncate", None) is not None:
        if spec.family == "laguerre":
            return KernelSpec.truncated_laguerre(spec.r, args.truncate)
        return spec.as_truncated(args.truncate)
    return spec


# output ----------------------------------------------------------------------

def _cell(v):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if v is None:
        return ""
    return str(v)


def _json_value(v):
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, np.floating):
        return float(v)
    if isinstance(v, dict):
        return {k: _json_value(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_json_value(x) for x in v]
    return v


def emit(out, fmt, command, columns, rows, extra=None):
    """Write rows as CSV (fixed column order) or a JSON object."""
    if fmt == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([_cell(row[c]) for c in columns])
        return
    doc = {"command": command, "columns": list(columns),
           "rows": [{c: _json_value(row[c]) for c in columns} for row in rows]}
    for key, value in (extra or {}).items():
        doc[key] = _json_value(value)
    json.dump(doc, out, ensure_ascii=False, indent=2)
    out.write("\n")


# subcommands ---------------------------------------------------------------

def cmd_bell(args, out):
    g = _fraction_list(args.g)
    table = bell_table(g, args.n)
    rows = [{"n": n, "k": k, "value": table(n, k)}
            for n in range(1, args.n + 1) for k in range(1, n + 1)]
    if args.f is not None:
        f = _fraction_list(args.f)
        if len(f) < args.n:
            raise ArgumentDomainError(f"--f needs {args.n} values, got {len(f)}")
        rows += [{"n": n, "k": "Y", "value": table.complete(n, f[:n])}
                 for n in range(1, args.n + 1)]
    emit(out, args.output, "bell", ("n", "k", "value"), rows)
    return 0


def cmd_blissard(args, out):
    a = _sequence(args.sequence)
    b = blissard_reciprocal(a, args.order)
    c = coeff_C(a, args.order)
    rows = [{"k": k, "a_k": a[k], "b_k": b[k], "c_k": c[k]} for k in range(args.order + 1)]
    emit(out, args.output, "blissard", ("k", "a_k", "b_k", "c_k"), rows,
         {"sequence": a.label})
    return 0


def cmd_kernel(args, out):
    spec = _kernel(args)
    s_grid, t_grid = parse_grid(args.s), parse_grid(args.t)
    rows = [{"s": s, "t": t, "value": kernel_eval(spec, s, t)} for s in s_grid for t in t_grid]
    extra = {"kernel": spec.label}
    if args.decay_report:
        reports = [dict(hp_decay_probe(spec, s, args.probe_t_max / s).to_dict(), s=s)
                   for s in s_grid]
        with open(args.decay_report, "w", encoding="utf-8") as fh:
            json.dump(_json_value({"kernel": spec.label, "reports": reports}), fh, indent=2)
            fh.write("\n")
    emit(out, args.output, "kernel", ("s", "t", "value"), rows, extra)
    return 0


def cmd_transform(args, out):
    f = _function(args.function)
    spec = _kernel(args)
    q = _quadrature(args)
    results = transform_many(f, spec, parse_grid(args.s), q, workers=args.workers)
    rows = [{"s": s, "value": r.value, "error_estimate": r.error_estimate,
             "cutoff_T": r.cutoff_T, "flags": ";".join(sorted(r.flags))}
            for s, r in zip(parse_grid(args.s), results)]
    emit(out, args.output, "transform", ("s", "value", "error_estimate", "cutoff_T", "flags"),
         rows, {"function": f.text, "kernel": spec.label,
                "decay_verdicts": [r.decay.verdict if r.decay else None for r in results]})
    return 0


def cmd_invert(args, out):
    if (args.image is None) == (args.function is None):
        raise UsageError("give exactly one of --image or --function")
    q = _quadrature(args)
    if args.image is not None:
        image = _function(args.image, "s")
        F = image
        r = args.r if args.r is not None else 0
    else:
        f = _function(args.function)
        spec = _kernel(args)
        r = args.r if args.r is not None else (spec.r if spec.family == "laguerre" else 0)
        inner = QuadratureConfig(abs_tol=max(q.abs_tol, 1e-10), rel_tol=max(q.rel_tol, 1e-8),
                                 tail_epsilon=max(q.tail_epsilon, 1e-12),
                                 max_interval=q.max_interval)

        def F(z):
            return transform_complex(f, spec, z, inner)
    rows, reports, failed = [], [], False
    for t in parse_grid(args.t):
        try:
            res = bromwich_invert(F, r, t, args.gamma, q, tau_max=args.tau_max)
        except ContourDivergenceError as exc:
            failed = True
            rows.append({"t": t, "value": None, "error_estimate": None,
                         "status": "contour-divergence"})
            reports.append(dict(exc.report, error=str(exc)))
            continue
        status = "experimental" if res.experimental else ("ok" if res.converged else "unconverged")
        failed |= not res.converged
        rows.append({"t": t, "value": res.value, "error_estimate": res.error_estimate,
                     "status": status})
        reports.append(res.diagnostics)
    extra = {"r": r, "gamma": args.gamma}
    if args.report:
        extra["diagnostics"] = reports
    emit(out, args.output, "invert", ("t", "value", "error_estimate", "status"), rows, extra)
    return 1 if failed else 0


def _named_series(text, N):
    text = text.strip()
    if text == "exp":
        return exp_series(N)
    if text.startswith("e:"):
        arg = text[2:]
        if not arg.isdigit():
            raise UsageError(f"bad series {text!r}; use exp, e:R or a coefficient list")
        return laguerre_series(int(arg), N)
    return FormalPowerSeries(tuple(_fraction_list(text)))


def cmd_iso(args, out):
    if args.gap:
        gap = convention_gap(args.m, args.order)
        rows = [{"n": n, "coefficient_wise": a, "multiplicative": b, "agree": str(a == b).lower()}
                for n, (a, b) in enumerate(zip(gap.coefficient_wise_series,
                                               gap.multiplicative_series))]
        emit(out, args.output, "iso-gap", ("n", "coefficient_wise", "multiplicative", "agree"),
             rows, {"m": args.m, "first_disagreement": gap.order})
        return 0
    p = _named_series(args.series, args.order)
    if args.sequence is not None:
        if args.reciprocal:
            raise UsageError("--reciprocal applies to the (n!)^m map only")
        mapping = SeriesMap("general", sequence=_sequence(args.sequence))
        image = mapping(p)
        convention = "coefficient-wise"
    elif args.reciprocal:
        mapping = SeriesMap("laguerre-iterate", m=args.m)
        image = iso_reciprocal_convention(p, args.m, args.order)
        convention = "multiplicative-reciprocal"
    else:
        mapping = SeriesMap("laguerre-iterate", m=args.m)
        image = apply_iso(p, args.m)
        convention = "coefficient-wise"
    rows = [{"n": n, "coefficient": c} for n, c in enumerate(image.coeffs)]
    emit(out, args.output, "iso", ("n", "coefficient"), rows,
         {"map": mapping.description, "convention": convention})
    return 0


def cmd_selftest(args, out):
    results = run_selftest(args.seed)
    rows = [{"check": r.name, "status": "pass" if r.passed else "fail", "detail": r.detail}
            for r in results]
    passed = sum(r.passed for r in results)
    emit(out, args.output, "selftest", ("check", "status", "detail"), rows,
         {"passed": passed, "failed": len(results) - passed})
    print(f"selftest: {passed} passed, {len(results) - passed} failed", file=args.err)
    return 0 if passed == len(results) else 1


# parser ----------------------------------------------------------------------

def _nonneg_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected an integer >= 0, got {v}")
    return v


def _pos_int(text):
    v = _nonneg_int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("expected an integer >= 1")
    return v


def _add_output(p):
    p.add_argument("--output", choices=("csv", "json"), default="csv")


def _add_kernel(p, truncate=True):
    p.add_argument("--sequence", help="umbral sequence spec for a reciprocal-EGF kernel")
    p.add_argument("--laguerre", type=_nonneg_int, help="Laguerre order r (default 0)")
    p.add_argument("--geometric", type=_pos_int, help="truncated geometric kernel of order n")
    if truncate:
        p.add_argument("--truncate", type=_pos_int, help="truncate the denominator at x^n")


def _add_quadrature(p):
    p.add_argument("--abs-tol", type=float)
    p.add_argument("--rel-tol", type=float)
    p.add_argument("--tail-eps", type=float)
    p.add_argument("--max-interval", type=float, default=QuadratureConfig().max_interval)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bellaplace",
        description="Bell polynomials, Blissard reciprocals and generalized Laplace transforms.",
        epilog=f"Set {TOL_ENV} to override the default quadrature tolerances.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bell", help="partial Bell table and complete Bell values")
    p.add_argument("--n", type=_pos_int, required=True)
    p.add_argument("--g", required=True, help="g_1,g_2,... as integers or p/q")
    p.add_argument("--f", help="f_1,f_2,... to also emit Y_n")
    _add_output(p)
    p.set_defaults(handler=cmd_bell)

    p = sub.add_parser("blissard", help="reciprocal sequence b and coefficients C")
    p.add_argument("--sequence", required=True)
    p.add_argument("--order", type=_nonneg_int, required=True)
    _add_output(p)
    p.set_defaults(handler=cmd_blissard)

    p = sub.add_parser("kernel", help="evaluate a kernel on an (s, t) grid")
    _add_kernel(p)
    p.add_argument("--s", required=True)
    p.add_argument("--t", required=True)
    p.add_argument("--decay-report", metavar="PATH", help="write decay-probe JSON here")
    p.add_argument("--probe-t-max", type=float, default=200.0,
                   help="probe horizon, in units of 1/s")
    _add_output(p)
    p.set_defaults(handler=cmd_kernel)

    p = sub.add_parser("transform", help="generalized Laplace transform of f(t)")
    p.add_argument("--function", required=True)
    _add_kernel(p)
    p.add_argument("--s", required=True)
    p.add_argument("--workers", type=_pos_int, default=1)
    _add_quadrature(p)
    _add_output(p)
    p.set_defaults(handler=cmd_transform)

    p = sub.add_parser("invert", help="experimental contour inversion")
    p.add_argument("--image", help="F(s) as an expression in s")
    p.add_argument("--function", help="f(t); F is computed with the chosen kernel")
    _add_kernel(p)
    p.add_argument("--r", type=_nonneg_int, help="order of e_r on the contour")
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--t", required=True)
    p.add_argument("--tau-max", type=float, default=32.0)
    p.add_argument("--report", action="store_true", help="include diagnostics in JSON")
    _add_quadrature(p)
    _add_output(p)
    p.set_defaults(handler=cmd_invert)

    p = sub.add_parser("iso", help="coefficient maps on power series")
    p.add_argument("--series", default="exp", help="exp, e:R or c_0,c_1,...")
    p.add_argument("--m", type=_pos_int, default=1)
    p.add_argument("--sequence", help="use the general map s^n -> a_n s^n")
    p.add_argument("--order", type=_nonneg_int, default=10)
    p.add_argument("--reciprocal", action="store_true",
                   help="reciprocal of the image (multiplicative convention)")
    p.add_argument("--gap", action="store_true", help="compare both conventions on exp(-x)")
    _add_output(p)
    p.set_defaults(handler=cmd_iso)

    p = sub.add_parser("selftest", help="exact identity suite")
    p.add_argument("--seed", type=int, default=20240101)
    _add_output(p)
    p.set_defaults(handler=cmd_selftest)
    return parser


def run_command(argv, out=None, err=None) -> int:
    """Parse ``argv`` and dispatch; returns the exit status."""
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    buf = io.StringIO()
    args.err = err
    try:
        status = args.handler(args, buf)
    except (UsageError, ExpressionSyntaxError) as exc:
        parser.print_usage(err)
        print(f"bellaplace {args.command}: error: {exc}", file=err)
        return 2
    except BellaplaceError as exc:
        print(f"bellaplace {args.command}: {type(exc).__name__}: {exc}", file=err)
        return 1
    out.write(buf.getvalue())
    return status


def main(argv=None) -> int:
    return run_command(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
