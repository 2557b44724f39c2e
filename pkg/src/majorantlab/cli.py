"""Command-line front end.

Subcommands: gen, norm, extremal, scaling, probcheck, entropy.  Exit code 0
means every invariant asserted during the run held, 1 means some failed, and
2 is a usage or parameter error.  Report-producing commands write delimited
output plus a JSON summary, and render a matplotlib figure next to them.
"""

from __future__ import annotations

import argparse
import math
import os
import sys

import numpy as np

from . import entropy as ent
from . import probtools as prob
from .expsum import (
    CoefficientDomain,
    CoefficientSeq,
    GridSpec,
    dirichlet_norm,
    lp_norm,
    lp_norm_even_exact,
)
from .extremal import SearchParams, ascend
from .setgen import (
    RandomSetModel,
    Seed,
    SetFileError,
    read_set_file,
    write_set_file,
)
from .scaling import (
    ExperimentConfig,
    run_experiment,
    squares_kink,
)

_MODEL_CHOICES = ("bernoulli", "doubling", "power", "perturbed-ap", "squares", "ap", "ap2d")


class _Invariants:
    """Collects asserted checks; each prints one pass/fail line."""

    def __init__(self):
        self.failures = 0

    def check(self, name, ok, detail=""):
        mark = "ok" if ok else "FAIL"
        suffix = f"  ({detail})" if detail else ""
        print(f"[{mark}] {name}{suffix}")
        if not ok:
            self.failures += 1
        return ok

    def note(self, name, detail):
        print(f"[--] {name}  ({detail})")

    def exit_code(self):
        return 1 if self.failures else 0


def _load_config_tokens(path):
    tokens = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            key, sep, value = text.partition("=")
            if not sep:
                raise ValueError(f"{path}:{lineno}: expected key = value")
            tokens += [f"--{key.strip().replace('_', '-')}", value.strip()]
    return tokens


def _expand_config(argv):
    """Splice config-file entries in after the subcommand; flags override them."""
    if "--config" not in argv:
        return argv
    idx = argv.index("--config")
    if idx + 1 >= len(argv):
        raise ValueError("--config needs a path")
    tokens = _load_config_tokens(argv[idx + 1])
    rest = argv[:idx] + argv[idx + 2:]
    if not rest or rest[0].startswith("-"):
        raise ValueError("--config requires a subcommand")
    return [rest[0]] + tokens + rest[1:]


def _parse_sizes(text):
    """Either a comma list, or A:B meaning the powers of two from A to B."""
    if ":" in text:
        lo, hi = (int(v) for v in text.split(":", 1))
        sizes = []
        s = lo
        while s <= hi:
            sizes.append(s)
            s *= 2
        return tuple(sizes)
    return tuple(int(v) for v in text.split(","))


def _seed_from(args):
    return Seed(args.seed, getattr(args, "stream", 0))


def _model_from(args):
    variant = args.model.replace("-", "_")
    n = args.n
    params = {}
    if variant == "bernoulli":
        if args.tau is not None:
            params["tau"] = args.tau
        elif args.delta is not None:
            params["delta"] = args.delta
        else:
            raise ValueError("bernoulli needs --tau or --delta")
    elif variant == "doubling":
        if args.k is not None:
            params["k"] = args.k
        elif args.delta is not None:
            params["delta"] = args.delta
        else:
            raise ValueError("doubling needs --k or --delta")
    elif variant == "power":
        params["s_exp"] = args.s_exp
        if args.tau is not None:
            params["tau"] = args.tau
        elif args.delta is not None:
            params["delta"] = args.delta
        else:
            raise ValueError("power needs --tau or --delta")
    elif variant == "perturbed_ap":
        params = {"b": args.b, "a": args.a, "length": args.len, "s": args.s}
    elif variant == "ap":
        params = {"b": args.b, "a": args.a, "length": args.len}
    elif variant == "ap2d":
        params = {"b": args.b, "a1": args.a1, "l1": args.l1, "a2": args.a2, "l2": args.l2}
    return RandomSetModel(variant, n, params)


def _resolve_set(args):
    if getattr(args, "set", None):
        fset, meta = read_set_file(args.set)
        return fset, meta["model"]
    if getattr(args, "model", None) is None:
        raise ValueError("provide --set FILE or --model ...")
    model = _model_from(args)
    return model.generate(_seed_from(args), getattr(args, "trial", 0)), model.tag()


def _add_model_flags(sp):
    sp.add_argument("--model", choices=_MODEL_CHOICES)
    sp.add_argument("--n", type=int, help="ambient window size")
    sp.add_argument("--tau", type=float)
    sp.add_argument("--delta", type=float)
    sp.add_argument("--k", type=int)
    sp.add_argument("--s-exp", type=int, default=1)
    sp.add_argument("--b", type=int)
    sp.add_argument("--a", type=int)
    sp.add_argument("--len", type=int)
    sp.add_argument("--s", type=int)
    sp.add_argument("--a1", type=int)
    sp.add_argument("--l1", type=int)
    sp.add_argument("--a2", type=int)
    sp.add_argument("--l2", type=int)
    sp.add_argument("--trial", type=int, default=0)


def _add_common(sp):
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--stream", type=int, default=0)
    sp.add_argument("--config", help="key = value file of flag defaults")


def build_parser():
    parser = argparse.ArgumentParser(prog="majorantlab")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="draw a frequency set and write it out")
    _add_model_flags(g)
    _add_common(g)
    g.add_argument("--out", help="set file path (stdout when omitted)")

    n = sub.add_parser("norm", help="L^p norm of a set's polynomial")
    _add_model_flags(n)
    _add_common(n)
    n.add_argument("--set", help="set file from gen")
    n.add_argument("--p", type=float, required=True)
    n.add_argument("--grid", type=int, help="explicit quadrature points (power of two)")
    n.add_argument("--oversample", type=float, default=8.0)
    n.add_argument("--json", help="write a JSON record here")

    e = sub.add_parser("extremal", help="coefficient search over a unit ball")
    _add_model_flags(e)
    _add_common(e)
    e.add_argument("--set", help="set file from gen")
    e.add_argument("--p", type=float, required=True)
    e.add_argument("--domain", choices=("linf", "l2"), default="linf")
    e.add_argument("--restarts", type=int, default=8)
    e.add_argument("--max-iter", type=int, default=200)
    e.add_argument("--tol", type=float, default=1e-9)
    e.add_argument("--json", help="write a JSON record here")

    s = sub.add_parser("scaling", help="size sweep of a norm statistic")
    _add_common(s)
    s.add_argument("--model", choices=("bernoulli", "doubling", "power", "perturbed-ap", "squares"),
                   required=True)
    s.add_argument("--p", required=True,
                   help="exponent; a comma list is allowed for --model squares")
    s.add_argument("--sizes", required=True,
                   help="comma list, or A:B for powers of two (roots for squares)")
    s.add_argument("--trials", type=int, default=32)
    s.add_argument("--statistic", choices=("dirichlet_norm_p", "majorant_ratio",
                                           "kp_constant", "star_ratio"),
                   default="dirichlet_norm_p")
    s.add_argument("--delta", type=float)
    s.add_argument("--tau", type=float)
    s.add_argument("--tau-rule", choices=("critical",))
    s.add_argument("--k", type=int)
    s.add_argument("--s-exp", type=int, default=1)
    s.add_argument("--s-beta", type=float, default=0.5)
    s.add_argument("--a-mult", type=int, default=4)
    s.add_argument("--slope-tol", type=float, default=0.15)
    s.add_argument("--threads", type=int)
    s.add_argument("--out", help="output prefix (derived from the run when omitted)")
    s.add_argument("--no-plot", action="store_true")

    p = sub.add_parser("probcheck", help="deviation and moment inequalities")
    _add_common(p)
    p.add_argument("--check", choices=("mgf", "moment", "ldt", "supnorm", "appoly"),
                   required=True)
    p.add_argument("--tau", type=float, default=0.3)
    p.add_argument("--taus", help="comma list of tau values (mgf)")
    p.add_argument("--x-max", type=float, default=1.0)
    p.add_argument("--x-step", type=float, default=0.001)
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--q", type=int, default=5)
    p.add_argument("--lambdas", default="1,2,3,4,5,6")
    p.add_argument("--trials", type=int, default=100000)
    p.add_argument("--b", type=int, default=9)
    p.add_argument("--a", type=int, default=32)
    p.add_argument("--len", type=int, default=256)
    p.add_argument("--s", type=int, default=8)

    t = sub.add_parser("entropy", help="mean widths, packings and coverings")
    _add_common(t)
    t.add_argument("--check", choices=("levy", "chain", "volume", "sudakov"),
                   required=True)
    t.add_argument("--norm", choices=("l1", "l2", "linf", "trig"), default="l1")
    t.add_argument("--n", type=int, default=100)
    t.add_argument("--q", type=float, default=4.0)
    t.add_argument("--samples", type=int, default=10000)
    t.add_argument("--points", type=int, default=100)
    t.add_argument("--t", type=float, default=0.3)

    return parser


def _resolve_threads(args):
    if getattr(args, "threads", None):
        return max(1, args.threads)
    env = os.environ.get("MAJORANTLAB_THREADS")
    return max(1, int(env)) if env else 1


def cmd_gen(args):
    inv = _Invariants()
    model = _model_from(args)
    fset = model.generate(_seed_from(args), args.trial)
    if args.out:
        write_set_file(args.out, fset, model.tag(), _seed_from(args))
        print(f"wrote {fset.size} elements (N={fset.ambient_size}, model={model.tag()}) to {args.out}")
    else:
        print(f"# N={fset.ambient_size} model={model.tag()} seed={_seed_from(args)}")
        for v in fset.elems:
            print(v)
    return inv.exit_code()


def cmd_norm(args):
    inv = _Invariants()
    fset, tag = _resolve_set(args)
    coeffs = CoefficientSeq.indicator(fset)
    p = args.p
    if args.grid is not None:
        grid = GridSpec(args.grid, max(4.0, args.grid / max(1, fset.ambient_size)))
        value = lp_norm(coeffs, p, grid)
        method, points = "quadrature", grid.points
    elif float(p) == int(p) and int(p) % 2 == 0:
        value = lp_norm_even_exact(coeffs, int(p))
        method, points = "exact", 0
    else:
        value = lp_norm(coeffs, p)
        method, points = "quadrature", GridSpec.for_ambient(fset.ambient_size, args.oversample).points
    print(f"norm={value!r} p={p:g} method={method} grid={points} "
          f"size={fset.size} ambient={fset.ambient_size} model={tag}")
    if method == "exact":
        check = lp_norm(coeffs, p)
        inv.check("exact and quadrature paths agree",
                  abs(check - value) <= 1e-9 * max(value, 1e-300),
                  f"quadrature {check!r}")
    if args.json:
        import json
        with open(args.json, "w") as fh:
            json.dump({"norm": value, "p": p, "method": method, "grid_points": points,
                       "size": fset.size, "ambient": fset.ambient_size, "model": tag,
                       "seed": str(_seed_from(args))}, fh, indent=2, sort_keys=True)
    return inv.exit_code()


def cmd_extremal(args):
    inv = _Invariants()
    fset, tag = _resolve_set(args)
    domain = CoefficientDomain.LINF_BALL if args.domain == "linf" else CoefficientDomain.L2_BALL
    params = SearchParams(args.restarts, args.max_iter, args.tol, args.seed)
    result = ascend(fset, args.p, domain, params=params)
    print(f"best_norm={result.best_norm!r} ratio={result.ratio!r} "
          f"gamma={result.gamma_estimate:.6f} iterations={result.iterations_used} "
          f"converged={result.converged} model={tag}")
    slack = 1e-12
    monotone = all(
        later >= earlier - slack * max(abs(later), 1.0)
        for hist in result.objective_histories
        for earlier, later in zip(hist, hist[1:])
    )
    inv.check("ascent objective is monotone", monotone)
    if domain is CoefficientDomain.LINF_BALL:
        inv.check("ratio at least 1", result.ratio >= 1.0 - 1e-9, f"ratio {result.ratio!r}")
        if float(args.p) == int(args.p) and int(args.p) % 2 == 0:
            inv.check("even p keeps the all-ones optimum", result.ratio <= 1.0 + 1e-8,
                      f"ratio {result.ratio!r}")
    if args.json:
        import json
        with open(args.json, "w") as fh:
            json.dump({"best_norm": result.best_norm, "ratio": result.ratio,
                       "gamma": result.gamma_estimate, "iterations": result.iterations_used,
                       "converged": result.converged, "p": args.p, "domain": args.domain,
                       "model": tag, "seed": str(_seed_from(args))}, fh,
                      indent=2, sort_keys=True)
    return inv.exit_code()


def _write_report_files(prefix, csv_lines, json_text, figure_fn, plot):
    csv_path = f"{prefix}.csv"
    with open(csv_path, "w") as fh:
        fh.write("\n".join(csv_lines) + "\n")
    json_path = f"{prefix}.json"
    with open(json_path, "w") as fh:
        fh.write(json_text + "\n")
    written = [csv_path, json_path]
    if plot:
        from . import plots  # deferred: pulls in matplotlib

        written.append(figure_fn(f"{prefix}.png"))
    print("wrote " + " ".join(written))


def _cmd_scaling_kink(args, inv):
    p_grid = [float(v) for v in str(args.p).split(",")]
    roots = _parse_sizes(args.sizes)
    report = squares_kink(p_grid, roots, coeff_trials=args.trials, seed=_seed_from(args))
    for p in p_grid:
        fit = report.fits[p]
        print(f"p={p:g} root_exponent={fit['root_exponent']:.4f} "
              f"ambient_exponent={fit['ambient_exponent']:.4f}")
    print(f"l4/l2 coefficient ratio slope={report.ratio_slope:.4f}")
    inv.check("coefficient L4/l2 ratio is nearly flat", abs(report.ratio_slope) < 0.1,
              f"slope {report.ratio_slope:.4f}")
    prefix = args.out or "kink_squares"
    from .plots import kink_figure

    def figure(path):
        return kink_figure(report, path)

    csv_lines = report.csv_lines(p_grid[0])
    _write_report_files(prefix, csv_lines, report.to_json(), figure, not args.no_plot)
    for p in p_grid[1:]:
        extra = f"{prefix}_p{p:g}.csv"
        with open(extra, "w") as fh:
            fh.write("\n".join(report.csv_lines(p)) + "\n")
        print(f"wrote {extra}")
    with open(f"{prefix}_ratio.csv", "w") as fh:
        fh.write("\n".join(report.ratio_csv_lines()) + "\n")
    return inv.exit_code()


def cmd_scaling(args):
    inv = _Invariants()
    if args.model == "squares":
        return _cmd_scaling_kink(args, inv)
    config = ExperimentConfig(
        family=args.model.replace("-", "_"),
        sizes=_parse_sizes(args.sizes),
        p=float(args.p),
        trials=args.trials,
        seed=_seed_from(args),
        statistic=args.statistic,
        delta=args.delta,
        tau=args.tau,
        tau_rule=args.tau_rule,
        k=args.k,
        s_exp=args.s_exp,
        s_beta=args.s_beta,
        a_mult=args.a_mult,
        search=SearchParams(seed=args.seed),
    )
    report = run_experiment(config, threads=_resolve_threads(args))
    for row in report.rows:
        flag = "" if row.valid else "  [excluded from fit]"
        print(f"size={row.size} mean={row.mean:.6g} std={row.std:.6g} "
              f"excluded={row.excluded}{flag}")
    inv.check("every size kept at least 95% of draws", all(r.valid for r in report.rows))
    if report.fit is not None:
        print(f"slope={report.fit.slope:.4f} intercept={report.fit.intercept:.4f} "
              f"residual_rms={report.fit.residual_rms:.4f}")
    if report.predicted is not None:
        print(f"predicted_exponent={report.predicted.exponent:.4f} "
              f"crossover={report.predicted.crossover:.4f}")
        if report.fit_mode == "single" and report.fit is not None:
            inv.check("fitted slope matches the predicted exponent",
                      abs(report.fit.slope - report.predicted.exponent) <= args.slope_tol,
                      f"fit {report.fit.slope:.4f} vs {report.predicted.exponent:.4f}")
        elif report.two_term is not None:
            inv.check("two-term fit has positive weights", report.two_term["positive"],
                      f"c1={report.two_term['c1']:.4g} c2={report.two_term['c2']:.4g}")
    prefix = args.out or f"scaling_{args.model}_p{float(args.p):g}"
    from .plots import scaling_figure

    def figure(path):
        return scaling_figure(report, path)

    _write_report_files(prefix, report.csv_lines(), report.to_json(), figure, not args.no_plot)
    return inv.exit_code()


def cmd_probcheck(args):
    inv = _Invariants()
    seed = _seed_from(args)
    if args.check == "mgf":
        taus = ([float(v) for v in args.taus.split(",")] if args.taus
                else [round(0.01 * i, 2) for i in range(1, 100)])
        xs = np.arange(-args.x_max, args.x_max + args.x_step / 2, args.x_step)
        res = prob.mgf_inequality_check(taus, xs)
        inv.check("exponential-moment bound holds on the unit interval grid",
                  bool(res.ok.all()), f"{res.ok.size} points")
        failed = [f"{t:.2f}" for t, h in zip(res.tau_grid, res.probe_holds) if not h]
        inv.note("probe x = tau^(-1/2) fails for tau in",
                 "{" + ", ".join(failed) + "}" if failed else "none")
    elif args.check == "moment":
        res = prob.moment_bound_check(args.n, args.tau, args.q)
        inv.check("binomial moment is below (q + e tau n)^q",
                  res.ok, f"exact {res.exact:.6g} vs bound {res.bound:.6g}")
    elif args.check == "ldt":
        lam = [float(v) for v in args.lambdas.split(",")]
        res = prob.ldt_empirical(np.ones(args.n), args.tau, lam, args.trials, seed)
        slack = res.slack()
        ok = True
        for i, l in enumerate(res.lambda_grid):
            if res.condition_ok[i]:
                ok &= res.exceed_freq[i] <= res.bound[i] + slack[i]
            print(f"lambda={l:g} exceed={res.exceed_freq[i]:.6g} bound={res.bound[i]:.6g} "
                  f"condition_ok={bool(res.condition_ok[i])}")
        inv.check("tail frequencies stay under 4 exp(-lambda^2/8) plus slack", ok)
    elif args.check == "supnorm":
        res = prob.salem_zygmund_check(args.n, args.tau, np.ones(args.n), args.trials, seed)
        if res.skipped:
            inv.note("sup-norm check skipped", res.reason)
        else:
            print(f"sup_max={res.sup_max:.4f} threshold={res.threshold:.4f} "
                  f"violations={res.violations}/{res.trials}")
            inv.check("no sup-norm exceedances", res.violations == 0)
    else:  # appoly
        c = prob.perturbed_ap_sup_constant(args.b, args.a, args.len, args.s,
                                           args.trials, seed)
        inv.note("measured sup constant for centered jittered progressions",
                 f"C = {c:.4f} at L={args.len}, s={args.s}")
    return inv.exit_code()


def cmd_entropy(args):
    inv = _Invariants()
    seed = _seed_from(args)
    n = args.n
    if args.norm == "l1":
        oracle = ent.l1_oracle(n)
    elif args.norm == "l2":
        oracle = ent.l2_oracle(n)
    elif args.norm == "linf":
        oracle = ent.linf_oracle(n)
    else:
        oracle = ent.trig_lq_oracle(args.q, n)
    if args.check == "levy":
        est = ent.levy_mean(oracle, args.samples, seed)
        print(f"mean_width={est.mean:.6f} std_error={est.std_error:.6f} alpha_n={est.alpha_n:.6f}")
        if args.norm == "l1":
            closed = est.alpha_n * 2.0 * n / math.sqrt(2.0 * math.pi)
            inv.check("l1 mean width matches the closed form",
                      abs(est.mean - closed) <= 4.0 * est.std_error,
                      f"measured {est.mean:.6f} vs {closed:.6f}")
        elif args.norm == "linf":
            inv.note("sup-norm width against sqrt(log n)",
                     f"ratio {est.mean / math.sqrt(math.log(n)):.4f}")
        else:
            inv.note("width against sqrt(q)", f"ratio {est.mean / math.sqrt(args.q):.4f}")
    elif args.check == "chain":
        points = ent.ball_samples(oracle, n, args.points, seed)
        pack_t, cover_t = ent.greedy_packing_cover(points, oracle, args.t)
        pack_2t, _ = ent.greedy_packing_cover(points, oracle, 2 * args.t)
        print(f"packing(t)={pack_t} cover(t)={cover_t} packing(2t)={pack_2t}")
        inv.check("packing/cover comparison chain",
                  pack_t >= cover_t >= pack_2t)
    elif args.check == "volume":
        measured, bound = ent.volume_bound_check(oracle, n, args.t, args.samples, seed)
        inv.check("greedy ball packing respects the volume bound",
                  measured <= bound, f"measured {measured} vs (4/t)^n = {bound:.4g}")
    else:  # sudakov
        est = ent.levy_mean(oracle, args.samples, seed)
        rhs_t = ent.dual_sudakov_rhs(est.mean, n, args.t)
        rhs_2t = ent.dual_sudakov_rhs(est.mean, n, 2 * args.t)
        print(f"log-covering bound: t={args.t:g} -> {rhs_t:.4f}, 2t -> {rhs_2t:.4f}")
        inv.check("bound scales as t^-2", abs(rhs_2t - rhs_t / 4.0) <= 1e-9 * rhs_t)
    return inv.exit_code()


_DISPATCH = {
    "gen": cmd_gen,
    "norm": cmd_norm,
    "extremal": cmd_extremal,
    "scaling": cmd_scaling,
    "probcheck": cmd_probcheck,
    "entropy": cmd_entropy,
}


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        argv = _expand_config(argv)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _DISPATCH[args.command](args)
    except (ValueError, SetFileError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
