"""Command-line front end: ``ratekit eval | verify | table``.

Exit status: 0 success, 1 verification failure or method disagreement,
2 invalid input, 3 numerical failure.
"""
import argparse
import csv
import io
import json
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .errors import InvalidInput, MethodDisagreement, NumericalFailure
from .integrals import IntegralSpec, Variant
from .representations import EvalMethod, evaluate
from .verify import SUITES, default_workers, run_suites, summarize

EXIT_OK, EXIT_FAIL, EXIT_INVALID, EXIT_NUMERIC = 0, 1, 2, 3
SPEC_FIELDS = ("variant", "alpha", "a", "b", "delta", "rho", "beta", "cutoff")
ROW_FIELDS = SPEC_FIELDS + ("value", "error_estimate", "method", "work")


class UsageError(Exception):
    pass


def _grid(text, log):
    try:
        start, stop, count = text.split(":")
        start, stop, count = float(start), float(stop), int(count)
    except ValueError:
        raise UsageError(f"grid {text!r} is not start:stop:count") from None
    if count < 1:
        raise UsageError("grid count must be positive")
    if log:
        if not (start > 0 and stop > 0):
            raise UsageError("a logarithmic grid needs positive end points")
        return [float(v) for v in np.geomspace(start, stop, count)]
    return [float(v) for v in np.linspace(start, stop, count)]


def build_parser():
    p = argparse.ArgumentParser(prog="ratekit", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def spec_flags(sp):
        sp.add_argument("--variant", choices=[v.value for v in Variant])
        sp.add_argument("--alpha", type=float)
        sp.add_argument("--a", type=float)
        sp.add_argument("--b", type=float)
        sp.add_argument("--delta", type=float)
        sp.add_argument("--rho", type=float)
        sp.add_argument("--beta", type=float)
        sp.add_argument("--cutoff", type=float)
        sp.add_argument("--m", type=int, help="sets delta = m * rho when --delta is absent")
        sp.add_argument("--format", choices=("json", "csv", "human"), default="human")
        sp.add_argument("--threads", type=int, help="worker processes (env RATEKIT_THREADS)")

    ev = sub.add_parser("eval", help="evaluate one integral")
    spec_flags(ev)
    ev.add_argument("--method", choices=[m.value for m in EvalMethod], default="auto")
    ev.add_argument("--rel-tol", type=float, default=1e-10)

    ver = sub.add_parser("verify", help="run verification suites")
    ver.add_argument("suite", choices=SUITES + ("all",))
    spec_flags(ver)
    ver.add_argument("--seed", type=int, default=0)

    tab = sub.add_parser("table", help="sweep b or beta over a grid")
    spec_flags(tab)
    tab.add_argument("--method", choices=[m.value for m in EvalMethod], default="auto")
    tab.add_argument("--rel-tol", type=float, default=1e-10)
    tab.add_argument("--b-grid")
    tab.add_argument("--beta-grid")
    tab.add_argument("--log-grid", action="store_true")
    return p


def _spec_from_args(args, b_default=None, a_default=None):
    if args.variant is None:
        raise UsageError("--variant is required")
    delta = args.delta
    if delta is None and args.m is not None and args.rho is not None:
        delta = args.m * args.rho
    values = {"alpha": args.alpha, "a": args.a if args.a is not None else a_default,
              "rho": args.rho, "delta": delta}
    values["b"] = args.b if args.b is not None else b_default
    missing = [k for k, v in values.items() if v is None]
    if missing:
        raise UsageError("missing " + ", ".join("--" + k for k in missing))
    return IntegralSpec(Variant(args.variant), beta=args.beta, cutoff=args.cutoff, **values)


def _row(spec, res):
    row = {k: getattr(spec, k) for k in SPEC_FIELDS}
    row["variant"] = spec.variant.value
    row.update(value=res.value, error_estimate=res.abs_error_estimate,
               method=res.method.value, work=res.work)
    return row


def _config(args):
    cfg = {k: v for k, v in vars(args).items() if k not in ("threads", "format") and v is not None}
    return dict(sorted(cfg.items()))


def _fmt(v):
    if isinstance(v, float):
        return "%.17g" % v
    if v is None:
        return ""
    return str(v)


def _emit(fmt, command, config, cases, summary, columns, out):
    if fmt == "json":
        doc = {"command": command, "config": config, "cases": cases, "summary": summary}
        out.write(json.dumps(doc, indent=1) + "\n")
        return
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        for c in cases:
            w.writerow([_fmt(c.get(k)) for k in columns])
        out.write(buf.getvalue())
        return
    for c in cases:
        if command == "verify":
            status = "PASS" if c["passed"] else "FAIL"
            detail = c.get("error") or f"residual={c['residual']:.3e} tol={c['tolerance']:.1e}"
            out.write(f"{status} {c['suite']} {c['name']}: {detail}\n")
        else:
            params = " ".join(f"{k}={c[k]}" for k in SPEC_FIELDS if c[k] is not None)
            out.write(f"{params}\n  value={c['value']!r} +/- {c['error_estimate']:.2e} "
                      f"[{c['method']}, work={c['work']}]\n")
    out.write("summary: " + ", ".join(f"{k}={v}" for k, v in summary.items()) + "\n")


def _eval_point(job):
    spec, method, rel_tol = job
    return _row(spec, evaluate(spec, method, rel_tol))


def _workers(args):
    return args.threads if args.threads else default_workers()


def cmd_eval(args, out):
    spec = _spec_from_args(args)
    row = _row(spec, evaluate(spec, args.method, args.rel_tol))
    _emit(args.format, "eval", _config(args), [row], {"total": 1}, ROW_FIELDS, out)
    return EXIT_OK


def cmd_table(args, out):
    if (args.b_grid is None) == (args.beta_grid is None):
        raise UsageError("give exactly one of --b-grid and --beta-grid")
    if args.b_grid is not None:
        base = _spec_from_args(args, b_default=1.0)
        specs = [base.with_(b=b) for b in _grid(args.b_grid, args.log_grid)]
    else:
        base = _spec_from_args(args)
        if base.variant not in (Variant.I1BETA, Variant.I2BETA):
            raise UsageError("--beta-grid needs a pathway variant")
        specs = [base.with_(beta=beta) for beta in _grid(args.beta_grid, args.log_grid)]
    jobs = [(s, args.method, args.rel_tol) for s in specs]
    workers = _workers(args)
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_eval_point, jobs))
    else:
        rows = [_eval_point(j) for j in jobs]
    _emit(args.format, "table", _config(args), rows, {"total": len(rows)}, ROW_FIELDS, out)
    return EXIT_OK


def cmd_verify(args, out):
    # a and b only fix the reduced argument, which the checks sweep anyway
    spec = _spec_from_args(args, b_default=1.0, a_default=1.0) if args.variant else None
    suites = SUITES if args.suite == "all" else (args.suite,)
    cases = run_suites(suites, args.seed, spec, _workers(args))
    summary = summarize(cases)
    _emit(args.format, "verify", _config(args), cases, summary,
          ("suite", "name", "residual", "tolerance", "passed"), out)
    return EXIT_OK if summary["failed"] == 0 else EXIT_FAIL


COMMANDS = {"eval": cmd_eval, "table": cmd_table, "verify": cmd_verify}


def main(argv=None, out=None):
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad flags and 0 after --help
        return exc.code if isinstance(exc.code, int) else EXIT_INVALID
    try:
        return COMMANDS[args.command](args, out)
    except (UsageError, InvalidInput, ValueError) as exc:
        print(f"ratekit: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except MethodDisagreement as exc:
        print(f"ratekit: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except NumericalFailure as exc:
        print(f"ratekit: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
