"""``normbound`` command-line interface.

Exit codes: 0 pass, 1 inequality violation, 2 usage or domain error,
3 schema or validation error, 4 resource budget exceeded.
"""
import argparse
import math
import os
import sys

import numpy as np

from . import __version__
from . import constants as K
from . import tail_bounds as TB
from ._accel import backend
from .errors import BudgetError, DomainError, SchemaError, ValidationError
from .io import SCHEMA_TAG, corpus_from_doc, dumps, load_json, model_from_doc, sequence_from_doc, to_csv
from .lipschitz import analyze, concentration_tail
from .martingale_lab import (
    model_from_spec,
    simulate_mc,
    verify_lemma_LR,
    verify_maximal_moment,
    verify_moment_domination,
    verify_tail_domination,
)

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_SCHEMA, EXIT_BUDGET = 0, 1, 2, 3, 4

CHAIN_SLACK = 1e-8
K1_LIMIT_TOL = 1e-6


class Outcome:
    """What a command produces: a JSON record, CSV rows and the exit code."""

    def __init__(self, command, inputs, result, rows=(), columns=(), code=EXIT_PASS, method=None):
        self.record = {"schema": SCHEMA_TAG, "command": command, "input": inputs}
        if method:
            self.record["method"] = method
        self.record["result"] = result
        if rows:
            self.record["rows"] = list(rows)
        self.rows = list(rows) or [dict(result)]
        self.columns = list(columns) or list(self.rows[0])
        self.code = code


def _floats(text):
    if text is None or text.strip() == "":
        return []
    return [float(v) for v in text.split(",")]


def _grid(start, stop, step):
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return np.round(start + step * np.arange(count), 12)


def _threads(value):
    if value is not None:
        return value
    env = os.environ.get("NORMBOUND_THREADS")
    return int(env) if env else 1


def _load_model(args):
    if getattr(args, "model_file", None):
        return model_from_doc(load_json(args.model_file))
    if not args.model:
        raise DomainError("give --model NAME or --model-file PATH")
    return model_from_spec(args.model).validate()


# ---------------------------------------------------------------- commands


def cmd_constants(args):
    a, b = args.alpha, args.beta
    K.AlphaBeta(a, b)
    res = {"c": K.c_const(a, b), "k": K.k_const(a, b)}
    notes = []
    if a > 1:
        res["k1"] = K.k1_const(a, b)
        res["k1_sigma"] = K.k1_maximizer(a, b)
        res["k3"] = K.k3_const(a, b)
        if b < a:
            res["k2"] = K.k2_const(a, b)
        else:
            res["k2"] = None
            notes.append("k2 has a Gamma(0) pole at beta == alpha")
    else:
        notes.append("k1, k2, k3 need alpha > 1")
    res["notes"] = notes
    return Outcome("constants", {"alpha": a, "beta": b}, res)


_METHODS = {
    "hoeffding": TB.hoeffding_bound,
    "pinelis": TB.pinelis_bound,
    "combined": TB.combined_bound,
}


def cmd_bound(args):
    xs = _floats(args.x)
    if not xs:
        raise DomainError("--x needs at least one value")
    rows = []
    for x in xs:
        if args.method == "all":
            rows.append(TB.bound_report(x, args.s).as_dict())
        elif args.method == "optimal":
            opt = TB.optimal_bound(x, args.s)
            rows.append({"x": x, "scale": args.s, "optimal": opt.value, "optimal_t": opt.arg_t,
                         "boundary_limit": opt.boundary_limit})
        else:
            rows.append({"x": x, "scale": args.s, args.method: _METHODS[args.method](x, args.s)})
    result = rows[0] if len(rows) == 1 else {"count": len(rows)}
    return Outcome("bound", {"x": xs, "s": args.s}, result, rows=rows if len(rows) > 1 else (),
                   method=args.method)


def cmd_bound_sequence(args):
    doc = load_json(args.file)
    scales, forms, exceed = sequence_from_doc(doc)
    x = args.x if args.x is not None else doc.get("x")
    if x is None:
        raise DomainError("give --x or an \"x\" field in the file")
    agg = K.aggregate(scales).aggregate
    res = {"x": x, "scale": agg, "step_scales": scales, "forms": forms,
           "combined": TB.combined_bound(x, agg)}
    if exceed:
        res["truncation"] = TB.truncation_bound(exceed, x, agg)
    echo = {"schema": SCHEMA_TAG, "x": x, "steps": doc["steps"]}
    if exceed:
        echo["exceedances"] = exceed
    res["echo"] = echo
    row = {k: v for k, v in res.items() if k not in ("echo", "step_scales", "forms")}
    return Outcome("bound-sequence", {"file": args.file, "x": x}, res, rows=[row], columns=list(row))


def cmd_rademacher(args):
    n = args.n
    xs = _floats(args.x)
    if not xs:
        xs = [(n - 2 * k) / math.sqrt(n) for k in range(n + 1)]
    rows = []
    for x in xs:
        p = TB.rademacher_tail(n, x)
        rows.append({"x": x, "tail": p, "discrete_bound": TB.rademacher_discrete_bound(n, x),
                     "combined": TB.combined_bound(x, 1.0)})
    return Outcome("rademacher", {"n": n, "x": xs}, {"count": len(rows)}, rows=rows)


def _report_outcome(name, inputs, rep, full_rows=True):
    rows = [c.as_dict() for c in rep.checks] if full_rows else ()
    worst = rep.worst()
    res = {"passed": rep.passed, "min_slack": rep.min_slack, "checks": len(rep.checks),
           "failures": len(rep.failures)}
    res.update(rep.meta)
    if worst is not None and not rep.passed:
        res["worst"] = worst.as_dict()
    return Outcome(f"verify {name}", inputs, res, rows=rows,
                   columns=["label", "at", "lhs", "rhs", "slack", "ok"],
                   code=EXIT_PASS if rep.passed else EXIT_FAIL)


def cmd_verify(args):
    suite = args.suite
    if suite == "lemma":
        r = np.arange(args.r_steps + 1) / args.r_steps
        t = _grid(args.t_min, args.t_max, args.t_step)
        rep = verify_lemma_LR(r, t)
        inputs = {"r_steps": args.r_steps, "t_min": args.t_min, "t_max": args.t_max, "t_step": args.t_step}
        return _report_outcome("lemma", inputs, rep)
    if suite == "constants-chain":
        return _constants_chain(_floats(args.alphas), args.beta_step)
    model = _load_model(args)
    inputs = {"model": args.model or args.model_file}
    if suite == "moments":
        return _report_outcome("moments", inputs, verify_moment_domination(model))
    if suite == "tails":
        return _report_outcome("tails", inputs, verify_tail_domination(model))
    if suite == "maximal":
        inputs.update(alpha=args.alpha, beta=args.beta, x=args.x_point, t=args.t_point)
        rep = verify_maximal_moment(model, (args.alpha, args.beta), args.x_point, args.t_point)
        return _report_outcome("maximal", inputs, rep)
    raise DomainError(f"unknown suite {suite}")


def _constants_chain(alphas, beta_step):
    rows, ok_all, worst = [], True, math.inf
    for a in alphas:
        for b in np.arange(0.0, a, beta_step):
            b = float(b)
            k, k1 = K.k_const(a, b), K.k1_const(a, b)
            cap = min(K.k2_const(a, b), K.k3_const(a, b))
            slack = min(k1 - k, cap - k1)
            ok = slack >= -CHAIN_SLACK
            worst = min(worst, slack)
            ok_all &= ok
            rows.append({"alpha": a, "beta": b, "k": k, "k1": k1, "k2": K.k2_const(a, b),
                         "k3": K.k3_const(a, b), "slack": slack, "ok": ok})
        lim = (a / (a - 1.0)) ** a
        k1aa = K.k1_const(a, a)
        ok = abs(k1aa - lim) <= K1_LIMIT_TOL and K.k_const(a, a) <= k1aa + CHAIN_SLACK
        ok_all &= ok
        rows.append({"alpha": a, "beta": a, "k": K.k_const(a, a), "k1": k1aa, "k2": None,
                     "k3": K.k3_const(a, a), "slack": lim - k1aa, "ok": ok})
    res = {"passed": bool(ok_all), "min_slack": worst, "checks": len(rows)}
    return Outcome("verify constants-chain", {"alphas": alphas, "beta_step": beta_step}, res, rows=rows,
                   code=EXIT_PASS if ok_all else EXIT_FAIL)


def cmd_simulate(args):
    model = _load_model(args)
    xs = _floats(args.x) or None
    res = simulate_mc(model, args.paths, seed=args.seed, x_grid=xs, workers=_threads(args.threads))
    s = model.scale()
    rows = []
    for x, ps, hs, pm, hm in zip(res.x_grid, res.tail_s, res.half_width_s, res.tail_m, res.half_width_m):
        b = TB.combined_bound(float(x), s)
        rows.append({"x": float(x), "p_s": float(ps), "hw_s": float(hs), "p_m": float(pm), "hw_m": float(hm),
                     "combined": b, "ok": bool(ps - hs <= b)})
    ok = all(r["ok"] for r in rows)
    inputs = {"model": args.model or args.model_file, "paths": args.paths, "seed": args.seed}
    return Outcome("simulate", inputs, {"passed": ok, "scale": s, "backend": res.backend}, rows=rows,
                   code=EXIT_PASS if ok else EXIT_FAIL)


def cmd_lipschitz(args):
    entries = corpus_from_doc(load_json(args.file))
    xs = _floats(args.x)
    rows, ok_all = [], True
    summary = []
    for name, g, variables in entries:
        an = analyze(g, variables)
        checks = an.checks()
        ok = (
            all(c[-1] for c in checks)
            and all(a.r_hat <= a.r_i + 1e-12 for a in an.xi)
            and all(a.mean_residual <= 1e-12 for a in an.xi)
            and an.convex_ok is not False
        )
        ok_all &= ok
        summary.append({
            "name": name, "g": g, "n": len(variables), "r": an.profile.radius,
            "r_i": list(an.profile.radii), "r_hat": [a.r_hat for a in an.xi], "s_i": [a.s_i for a in an.xi],
            "s": an.s, "s_tight": an.s_tight, "domination": ok,
        })
        for x in xs:
            rt = concentration_tail(an.profile.radius, x)
            row = {"name": name, "x": x, "tail": an.tail(x), "bound_r": rt.plain, "bound_r_tight": rt.tighter}
            if an.s > 0:
                st = concentration_tail(an.s, x)
                row.update(bound_s=st.plain, bound_s_tight=st.tighter)
            rows.append(row)
    res = {"passed": bool(ok_all), "entries": summary}
    cols = ["name", "x", "tail", "bound_r", "bound_r_tight", "bound_s", "bound_s_tight"]
    out = Outcome("lipschitz", {"file": args.file, "x": xs}, res, rows=rows, columns=cols,
                  code=EXIT_PASS if ok_all else EXIT_FAIL)
    if not rows:
        out.rows = [{k: v for k, v in e.items() if not isinstance(v, list)} for e in summary]
        out.columns = ["name", "g", "n", "r", "s", "s_tight", "domination"]
    return out


# ---------------------------------------------------------------- parser


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["json", "csv"], default="json")
    common.add_argument("--out", help="write the record here instead of stdout")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--threads", type=int, default=None, help="worker cap (default $NORMBOUND_THREADS or 1)")

    p = argparse.ArgumentParser(prog="normbound", description="Normal-domination bounds for supermartingales.")
    p.add_argument("--version", action="version", version=f"normbound {__version__} ({backend()})")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("constants", parents=[common], help="c, k, k1, k2, k3 at (alpha, beta)")
    c.add_argument("--alpha", type=float, required=True)
    c.add_argument("--beta", type=float, required=True)
    c.set_defaults(func=cmd_constants)

    b = sub.add_parser("bound", parents=[common], help="tail bounds at x for scale s")
    b.add_argument("--x", required=True, help="value or comma-separated list")
    b.add_argument("--s", type=float, required=True)
    b.add_argument("--method", choices=["hoeffding", "pinelis", "combined", "optimal", "all"], default="combined")
    b.set_defaults(func=cmd_bound)

    bs = sub.add_parser("bound-sequence", parents=[common], help="bound from per-step (D, var) or (C, D) data")
    bs.add_argument("--file", required=True)
    bs.add_argument("--x", type=float)
    bs.set_defaults(func=cmd_bound_sequence)

    r = sub.add_parser("rademacher", parents=[common], help="exact Rademacher tail and the discrete bound")
    r.add_argument("--n", type=int, required=True)
    r.add_argument("--x", help="comma-separated values; default every lattice point")
    r.set_defaults(func=cmd_rademacher)

    v = sub.add_parser("verify", parents=[common], help="run a verification suite")
    v.add_argument("suite", choices=["lemma", "moments", "tails", "maximal", "constants-chain"])
    v.add_argument("--model", help="builtin model, e.g. rademacher:10, two-point:0.3, adapted-sign:6")
    v.add_argument("--model-file")
    v.add_argument("--r-steps", type=int, default=200)
    v.add_argument("--t-min", type=float, default=-30.0)
    v.add_argument("--t-max", type=float, default=2.0)
    v.add_argument("--t-step", type=float, default=0.01)
    v.add_argument("--alphas", default="1.5,2,3,5")
    v.add_argument("--beta-step", type=float, default=0.25)
    v.add_argument("--alpha", type=float, default=2.0)
    v.add_argument("--beta", type=float, default=1.0)
    v.add_argument("--x-point", type=float, default=1.0, dest="x_point")
    v.add_argument("--t-point", type=float, default=0.0, dest="t_point")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("simulate", parents=[common], help="Monte Carlo tails of S_n and M_n")
    s.add_argument("--model")
    s.add_argument("--model-file")
    s.add_argument("--paths", type=int, default=100_000)
    s.add_argument("--x", help="comma-separated grid; default s * (0, 0.5, ..., 6)")
    s.set_defaults(func=cmd_simulate)

    lp = sub.add_parser("lipschitz", parents=[common], help="scales and bounds for a Lipschitz corpus file")
    lp.add_argument("--file", required=True)
    lp.add_argument("--x", default="", help="comma-separated x values (empty: scales only)")
    lp.set_defaults(func=cmd_lipschitz)
    return p


def _emit(outcome, args):
    if args.format == "csv":
        text = to_csv(outcome.rows, outcome.columns)
    else:
        text = dumps(outcome.record) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        outcome = args.func(args)
    except (SchemaError, ValidationError) as exc:
        print(f"normbound: schema error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except BudgetError as exc:
        print(f"normbound: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except DomainError as exc:
        print(f"normbound: {exc}", file=sys.stderr)
        return EXIT_USAGE
    _emit(outcome, args)
    if outcome.code == EXIT_FAIL:
        print("normbound: inequality violated", file=sys.stderr)
    return outcome.code


if __name__ == "__main__":
    sys.exit(main())
