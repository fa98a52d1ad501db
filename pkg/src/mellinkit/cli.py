"""Command-line driver: ``mellinkit <subcommand> [flags]``.

Exit codes: 0 success, 1 a check failed, 2 bad input.
"""

import argparse
import csv
import hashlib
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import serialize
from .checks import CheckResult, combine, to_jsonable
from .dist import sample
from .errors import MellinKitError, QuadratureFailure
from .excess import check_semigroup, excess, excess_mellin
from .levy import delta_formula, dist_from_levy, levy_exponent
from .limit import convergence_report, estimate_c, rho_curve
from .mellin import (DEFAULT_LAMBDAS, check_log_convexity, check_lyapunov,
                     log_mellin_profile, mellin, mellin_distance)
from .size_bias import check_dominance, check_properties, size_bias
from .suite import default_x_grid, full_suite
from .tmonotone import check_downward_closure, check_k_monotone, recover_mixing_mellin


class InputError(Exception):
    pass


def parse_grid(text):
    """``lo:hi:step`` (inclusive), a comma list, or a single number."""
    text = text.strip()
    try:
        if ":" in text:
            parts = [float(p) for p in text.split(":")]
            if len(parts) != 3:
                raise InputError("grid %r must be lo:hi:step" % text)
            lo, hi, step = parts
            if not step > 0:
                raise InputError("grid %r needs a positive step" % text)
            n = int(math.floor((hi - lo) / step + 1e-9)) + 1
            grid = lo + step * np.arange(max(n, 0))
        else:
            grid = np.array([float(p) for p in text.split(",") if p.strip()])
    except ValueError:
        raise InputError("cannot parse grid %r" % text) from None
    grid = np.round(grid, 12)
    if grid.size == 0:
        raise InputError("grid %r is empty" % text)
    if not np.all(np.isfinite(grid)):
        raise InputError("grid %r has non-finite points" % text)
    return grid


def _digest(config):
    blob = json.dumps(to_jsonable(config), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _csv(header, rows, digest):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["config_digest"] + list(header))
    for row in rows:
        w.writerow([digest] + [repr(float(v)) if isinstance(v, (float, np.floating)) else v
                               for v in row])
    return buf.getvalue()


def _load_spec(args, required=True):
    if args.spec is None:
        if required:
            raise InputError("--spec is required")
        return None
    path = Path(args.spec)
    if not path.exists():
        raise InputError("spec file %s not found" % path)
    return serialize.load_spec(path)


def _grid(args, name, default):
    value = getattr(args, name)
    return parse_grid(value) if value is not None else np.asarray(default, dtype=float)


# ---------------------------------------------------------------- subcommands


def cmd_mellin(args):
    spec = _load_spec(args)
    lams = _grid(args, "lam", DEFAULT_LAMBDAS)
    vals = [mellin(spec, l, tol=args.tol) for l in lams]
    rows = [(v.lam, v.value, v.abs_error, v.method) for v in vals]
    checks = []
    pos = np.sort(lams[lams > 0])
    if lams.size >= 3 and np.all(np.diff(lams) > 0):
        checks.append(check_log_convexity(log_mellin_profile(spec, lams)))
    if pos.size >= 2:
        checks.append(check_lyapunov(spec, list(zip(pos[:-1], pos[1:]))))
    verdict = combine("mellin", checks)
    table = (["lambda", "value", "abs_error", "method"], rows)
    return {"spec": serialize.spec_to_dict(spec), "table": rows,
            "verdict": verdict.to_dict()}, table, verdict


def cmd_bias(args):
    spec = _load_spec(args)
    ts = _grid(args, "t", [0.0, 0.5, 1.0, 2.0, 5.0])
    lams = _grid(args, "lam", DEFAULT_LAMBDAS)
    rows, laws, checks = [], [], []
    for t in ts:
        biased = size_bias(spec, t)
        laws.append({"t": t, "spec": serialize.spec_to_dict(biased)})
        for l in lams:
            rows.append((t, l, mellin(biased, l, tol=args.tol).value))
        checks.append(check_properties(spec, args.s, t, lams))
        checks.append(check_dominance(spec, t, default_x_grid(spec)))
    verdict = combine("bias", checks)
    return {"biased": laws, "verdict": verdict.to_dict()}, (["t", "lambda", "mellin"], rows), verdict


def cmd_excess(args):
    spec = _load_spec(args)
    ts = _grid(args, "t", [0.5, 1.0, 2.0, 5.0])
    lams = _grid(args, "lam", DEFAULT_LAMBDAS)
    rows, laws, checks, fixed = [], [], [], []
    for t in ts:
        law = excess(spec, t)
        laws.append({"t": t, "spec": serialize.spec_to_dict(law)})
        for l in lams:
            rows.append((t, l, excess_mellin(spec, t, l).value))
        fixed.append({"t": t, "distance_to_input": mellin_distance(law, spec, lams)})
        checks.append(check_semigroup(spec, args.s, t, lams, tol=max(args.tol, 1e-5)))
    verdict = combine("excess", checks)
    doc = {"excess": laws, "fixed_point_distance": fixed, "verdict": verdict.to_dict()}
    return doc, (["t", "lambda", "mellin"], rows), verdict


def cmd_tmono(args):
    spec = _load_spec(args)
    ts = _grid(args, "t", [2.0])
    lams = _grid(args, "lam", DEFAULT_LAMBDAS)
    span = spec.upper if math.isfinite(spec.upper) else default_x_grid(spec)[-1]
    checks, rows = [], []
    for t in ts:
        for k in range(1, int(math.floor(t)) + 1):
            r = check_k_monotone(spec, k, [0.0, span])
            checks.append(r)
            rows.append((t, "k_monotone_%d" % k, int(r.passed), r.worst_violation))
        rec = recover_mixing_mellin(spec, t, lams)
        checks.append(rec.certificate)
        rows.append((t, "mixing_recovery", int(rec.certificate.passed),
                     rec.certificate.worst_violation))
        if 0 < args.s <= t:
            r = check_downward_closure(spec, t, args.s, lams)
            checks.append(r)
            rows.append((t, "downward_closure", int(r.passed), r.worst_violation))
    verdict = combine("tmono", checks)
    return ({"verdict": verdict.to_dict()},
            (["t", "check", "passed", "worst_violation"], rows), verdict)


def cmd_limit(args):
    spec = _load_spec(args)
    ts = _grid(args, "t", [5.0, 10.0, 20.0, 40.0])
    lams = _grid(args, "lam", DEFAULT_LAMBDAS)
    report = convergence_report(spec, args.alpha, ts, lams, n_samples=args.n,
                                seed=args.seed, s=args.s)
    rows = []
    for i, t in enumerate(report.curve.t_grid):
        for j, l in enumerate(report.lambdas):
            rows.append(("mellin_rel_error", t, l, report.mellin_errors[i, j]))
        rows.append(("ks", t, "", report.ks_stats[i]))
    return report.to_dict(), (["kind", "t", "lambda", "value"], rows), report.verdict


def cmd_levy(args):
    if args.spec is None:
        raise InputError("--spec is required")
    path = Path(args.spec)
    if not path.exists():
        raise InputError("spec file %s not found" % path)
    levy = serialize.load_levy(path)
    ts = _grid(args, "t", [1.0, 2.0, 5.0, 10.0, 20.0, 50.0])
    law = dist_from_levy(levy)
    rows = []
    for t in ts:
        if t > 0:
            rows.append((t, levy_exponent(levy, t), delta_formula(levy, t, args.s),
                         estimate_c(law, t, args.s).value))
    c = np.array([r[3] for r in rows])
    corr = c - levy.sigma2
    checks = [CheckResult("c_nonincreasing", bool(np.all(np.diff(c) <= 1e-12)),
                          float(np.max(np.diff(c), initial=0.0))),
              CheckResult("c_above_sigma2", bool(np.all(corr >= -1e-12)),
                          float(-corr.min(initial=0.0)))]
    verdict = combine("levy", checks)
    doc = {"levy": serialize.levy_to_dict(levy), "sigma2": levy.sigma2,
           "curve": rho_curve(law, args.alpha, [r[0] for r in rows]).to_dict(),
           "table": rows, "verdict": verdict.to_dict()}
    return doc, (["t", "g", "delta_formula", "c_estimate"], rows), verdict


def cmd_check_suite(args):
    verdict = full_suite(args.seed)
    rows = [(c["name"], int(c["passed"]), c["worst_violation"])
            for c in verdict.details["components"]]
    return verdict.to_dict(), (["suite", "passed", "worst_violation"], rows), verdict


def cmd_sample(args):
    spec = _load_spec(args)
    batch = sample(spec, args.n, args.seed)
    rows = [(i, v) for i, v in enumerate(batch.values)]
    doc = {"spec": serialize.spec_to_dict(spec), "seed": batch.seed, "n": batch.n,
           "values": batch.values.tolist()}
    return doc, (["index", "value"], rows), None


COMMANDS = {
    "mellin": (cmd_mellin, "Mellin transform table with log-convexity and Lyapunov checks"),
    "bias": (cmd_bias, "size-biased laws with property and dominance checks"),
    "excess": (cmd_excess, "stationary-excess laws with semigroup checks"),
    "tmono": (cmd_tmono, "t-monotonicity certificates"),
    "limit": (cmd_limit, "convergence report towards the log-normal limit"),
    "levy": (cmd_levy, "Lévy exponent tables and c convergence"),
    "check-suite": (cmd_check_suite, "randomized battery of every structural check"),
    "sample": (cmd_sample, "seeded i.i.d. batch"),
}


def build_parser():
    parser = argparse.ArgumentParser(prog="mellinkit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--spec", help="JSON spec document or (x, S) CSV")
        p.add_argument("--alpha", type=float, default=1.0)
        p.add_argument("--t", dest="t", help="t grid lo:hi:step")
        p.add_argument("--lambda", dest="lam", help="lambda grid lo:hi:step")
        p.add_argument("--s", type=float, default=1.0)
        p.add_argument("--n", type=int, default=100_000)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--tol", type=float, default=1e-8)
        p.add_argument("--out", help="directory for <subcommand>.json / .csv")
        p.add_argument("--format", choices=("json", "csv"), default="json")
    return parser


def run(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    handler = COMMANDS[args.command][0]
    if args.n < 1 or not args.alpha > 0 or not args.tol > 0 or not args.seed >= 0:
        print("error: --n, --alpha and --tol must be positive, --seed nonnegative",
              file=sys.stderr)
        return 2
    try:
        doc, (header, rows), verdict = handler(args)
    except QuadratureFailure as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1
    except (InputError, MellinKitError, ValueError, OSError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    config = {k: v for k, v in vars(args).items() if k not in ("out", "format")}
    if args.spec:
        config["spec_document"] = Path(args.spec).read_text()
    digest = _digest(config)
    if args.format == "json":
        doc = dict(to_jsonable(doc))
        doc["config_digest"] = digest
        text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    else:
        text = _csv(header, rows, digest)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / ("%s.%s" % (args.command, args.format))).write_text(text)
    else:
        sys.stdout.write(text)
    return 0 if verdict is None or verdict.passed else 1


def main():
    sys.exit(run())
