"""Command-line front end.

Subcommands: weight, dirichlet, capacity, mult, pair, polygon, decompose,
spectra, audit.  Weight and multiplier specifications come from flags or
from an INI config file (flat key-value with typed sections: [run],
[weight], [multiplier]); flags override the file.  Numeric series go to
CSV (RFC 4180), human-readable reports to text.  Identical config plus
seed yields byte-identical output; LKSMULT_THREADS caps parallelism.

Exit codes: 0 success, 2 precondition/config errors, 3 solver failures.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import sys
from fractions import Fraction

import numpy as np

from . import __version__
from .seqcore import (LksError, PreconditionError, QuadratureResolutionError,
                      SolverFailure, WindowSeq)
from .weights import (CoeffSeq, a2_report, lks_weight, reciprocal_integrable,
                      schoenberg_pd_check, zero_set)
from .dirichlet import (DirichletMatrix, components, minimality_report,
                        seminorm, shift_isometry_check)
from .potentials import capacity, green_kernel, riesz_kernels
from .multipliers import (MultiplierSpec, NuWeight, capacitary_constant,
                          embedding_constant, energy_constant, mu_weights,
                          multiplier_norm, pair_multiplier_check,
                          quasimetric_report, slp_bounds)
from .singular import (SingularitySet, composite_weight, polygon_structure,
                       theorem53_check, theorem59_adjust, conditions_for_pair,
                       build_cutoff, cutoff_decompose)
from .spectra import (NuMeasure, SymbolSpec, resolvent_probe,
                      slp_failure_demo, winding_number)
from .acceptance import DEFAULT_SEED, format_report, run_battery

FMT = "%.12g"


def _fmt(x) -> str:
    if isinstance(x, complex) or np.iscomplexobj(np.asarray(x)):
        z = complex(x)
        return "(%s%+sj)" % (FMT % z.real, FMT % z.imag)
    return FMT % float(x)


class Report:
    def __init__(self, command: str, args_echo: dict):
        self.lines = ["lksmult %s report" % command,
                      "version: %s" % __version__]
        for k in sorted(args_echo):
            self.lines.append("config %s = %s" % (k, args_echo[k]))
        self.lines.append("")

    def add(self, fmt, *vals):
        self.lines.append(fmt % vals if vals else fmt)

    def text(self) -> str:
        return "\n".join(self.lines) + "\n"


def _emit(text: str, out):
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _write_csv(path: str, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\r\n")
        w.writerow(header)
        for row in rows:
            w.writerow([c if isinstance(c, str) else _fmt(c) for c in row])


def _load_config(path):
    cfg = {"run": {}, "weight": {}, "multiplier": {}}
    if path:
        parser = configparser.ConfigParser()
        with open(path) as fh:
            parser.read_file(fh)
        for sect in parser.sections():
            cfg.setdefault(sect, {}).update(dict(parser.items(sect)))
    return cfg


def _weight_from_args(args, cfg) -> dict:
    w = dict(cfg.get("weight", {}))
    for key in ("kind", "alpha", "beta", "c", "K"):
        v = getattr(args, key if key != "K" else "K", None)
        if v is not None:
            w[key.lower()] = v
    kind = w.get("kind", "lks_power")
    M = 1 << int(getattr(args, "grid_log2", None) or w.get("grid_log2", 20))
    K = int(w.get("k", w.get("K", 1 << 17)))
    if kind == "lks_power":
        c = CoeffSeq.power(float(w.get("alpha", 0.5)), K)
    elif kind == "lks_power_log":
        c = CoeffSeq.power_log(float(w.get("beta", 2.0)), K)
    elif kind == "lks_table":
        vals = [float(v) for v in str(w["c"]).split(",")]
        c = CoeffSeq.table(vals)
    else:
        raise PreconditionError("unsupported weight kind %r here" % (kind,))
    return {"kind": kind, "coeffs": c, "M": M}


def _mult_from_args(args, cfg) -> MultiplierSpec:
    m = dict(cfg.get("multiplier", {}))
    for key in ("family", "a", "n", "zeta_angle", "delta", "theta", "phi"):
        v = getattr(args, key, None)
        if v is not None:
            m[key] = v
    fam = m.get("family", "constant")
    if fam == "constant":
        return MultiplierSpec.constant(complex(str(m.get("a", "1"))))
    if fam == "basis":
        return MultiplierSpec.basis(int(m.get("n", 0)))
    if fam == "rotation":
        return MultiplierSpec.rotation(float(m.get("zeta_angle", 1.0)))
    if fam == "power_rotation":
        return MultiplierSpec.power_rotation(float(m.get("delta", 0.25)),
                                             float(m.get("theta", 2.0)))
    if fam == "affine_rotation":
        return MultiplierSpec.affine_rotation(complex(str(m.get("a", "2"))),
                                              complex(str(m.get("b", "0.5"))),
                                              float(m.get("zeta_angle", 1.0)))
    if fam == "symbol":
        coeffs = [complex(s) for s in str(m.get("phi", "0,1")).split(",")]
        return MultiplierSpec.symbol(coeffs, float(m.get("zeta_angle", 1.0)))
    raise PreconditionError("unknown multiplier family %r" % (fam,))


# --------------------------------------------------------------------------
# subcommands

def cmd_weight(args, cfg) -> int:
    spec = _weight_from_args(args, cfg)
    c, M = spec["coeffs"], spec["M"]
    rep = Report("weight", {"kind": spec["kind"], "K": c.K, "M": M,
                            "seed": args.seed})
    grid, table = lks_weight(c, M)
    rep.add("coefficient table excerpt (n: what(n)):")
    for n in range(-8, 9):
        rep.add("  %+d: %s", n, _fmt(table.at(n).real))
    zs = zero_set(c)
    rep.add("zero set: d = %d, angles %s", zs.d,
            ", ".join(str(f) for f in zs.fractions))
    ir = reciprocal_integrable(c)
    rep.add("reciprocal integrable: %s (lower %s, upper %s, classes %s/%s)",
            ir.verdict, _fmt(ir.lower_bound), _fmt(ir.upper_bound),
            ir.lower_class, ir.upper_class)
    if ir.verdict == "not_integrable":
        rep.add("note: Mult(L^2(w)) is trivial -- sequences constant on the "
                "%d gcd cosets", zs.d)
    a2 = a2_report(grid, max_level=args.a2_level)
    rep.add("A2 per-level maxima (level: value):")
    for lev, v in enumerate(a2.per_level):
        rep.add("  %2d: %s", lev, _fmt(v))
    eps = [float(s) for s in args.eps.split(",")]
    sch = schoenberg_pd_check(grid, eps)
    rep.add("Schoenberg exp(-eps w) minimum coefficients:")
    for e in eps:
        rep.add("  eps=%s: min %s (coeff0 %s)", _fmt(e),
                _fmt(sch[e]["min_coeff"]), _fmt(sch[e]["coeff0"]))
    _emit(rep.text(), args.out)
    return 0


def cmd_dirichlet(args, cfg) -> int:
    spec = _weight_from_args(args, cfg)
    c = spec["coeffs"]
    N = args.window
    rep = Report("dirichlet", {"kind": spec["kind"], "K": c.K,
                               "window": N, "seed": args.seed})
    C = DirichletMatrix.toeplitz(c, N)
    info = components(C)
    rep.add("components: D = %d, non_splitting = %s, cosets %s",
            info.D, info.non_splitting,
            ", ".join(str(len(cs)) for cs in info.cosets))
    mr = minimality_report(c)
    rep.add("minimality: %s (necessary %s [%s], sufficient %s [%s])",
            mr.verdict, _fmt(mr.necessary_series), mr.necessary_class,
            _fmt(mr.sufficient_series), mr.sufficient_class)
    rep.add("||e_0||^2 = %s (= 2 sum c_k = %s)",
            _fmt(seminorm(C, WindowSeq.basis(0)) ** 2), _fmt(2 * c.total()))
    rep.add("shift isometry check: %s",
            shift_isometry_check(C, trials=10, seed=args.seed))
    _emit(rep.text(), args.out)
    return 0


def _kernels_for(spec, args):
    c = spec["coeffs"]
    if spec["kind"] == "lks_power" and c.closed_form is not None:
        return riesz_kernels(c.closed_form.alpha, spec["M"])
    return green_kernel(c, spec["M"])


def cmd_capacity(args, cfg) -> int:
    spec = _weight_from_args(args, cfg)
    J = [int(s) for s in args.set.split(",") if s.strip() != ""]
    if not J:
        raise PreconditionError("empty set J")
    ker = _kernels_for(spec, args)
    rep = Report("capacity", {"kind": spec["kind"], "set": args.set,
                              "method": args.method, "seed": args.seed})
    res = capacity(J, ker, method=args.method, xy_window=args.window)
    cross = capacity(J, ker, method="projected_gradient")
    rep.add("Cap(J) = %s", _fmt(res.value))
    rep.add("active set: %s", ",".join(str(int(j)) for j in res.active_set))
    rep.add("solver gap = %s", _fmt(res.gap))
    rep.add("cross-check gap (projected_gradient) = %s",
            _fmt(abs(cross.value - res.value) / res.value))
    rep.add("truncation flag: %s", res.truncation_flag)
    for k, v in sorted(res.checks.items()):
        rep.add("check %s: %s", k, v)
    rep.add("z on J: %s", ", ".join(_fmt(v.real) for v in res.zJ.at(res.J)))
    rep.add("x excerpt |j|<=8: %s",
            ", ".join(_fmt(v.real) for v in res.xJ.at(np.arange(-8, 9))))
    _emit(rep.text(), args.out)
    return 0


def cmd_mult(args, cfg) -> int:
    spec = _weight_from_args(args, cfg)
    lam = _mult_from_args(args, cfg)
    c = spec["coeffs"]
    N = args.window
    ker = _kernels_for(spec, args)
    rep = Report("mult", {"kind": spec["kind"], "family": lam.family,
                          "window": N, "strategy": args.strategy,
                          "seed": args.seed})
    nu = mu_weights(lam, c, -N, N)
    rep.add("mu^2 excerpt |k|<=8: %s",
            ", ".join(_fmt(v) for v in nu.at(np.arange(-8, 9))))
    Ns = [max(N // 4, 4), max(N // 2, 8), N]
    emb = embedding_constant(nu, c, min(N, 128))
    rep.add("embedding constant C_N^2 (N=%d) = %s", min(N, 128), _fmt(emb))
    small = NuWeight(-6, 6, nu.at(np.arange(-6, 7)))
    strategy = args.strategy
    c1, wit = capacitary_constant(small if strategy == "all_subsets" else nu,
                                  ker, strategy, seed=args.seed)
    rep.add("capacitary constant C_1 = %s at J = %s", _fmt(c1), wit)
    ce, wite = energy_constant(small if strategy == "all_subsets" else nu,
                               ker, strategy, seed=args.seed)
    rep.add("energy constant = %s at J = %s", _fmt(ce), wite)
    qm = quasimetric_report(ker)
    rep.add("quasimetric kappa = %s", _fmt(qm.kappa_best))
    norms = [multiplier_norm(lam, ker.wtable, n) for n in Ns]
    for n, v in zip(Ns, norms):
        rep.add("compression norm N=%d: %s", n, _fmt(v))
    try:
        slp = slp_bounds(lam, c, ker.wtable, min(N, 64))
        rep.add("slp: delta=%s pointwise_ok=%s bounds (%s, %s)",
                _fmt(slp.delta), slp.pointwise_ok, _fmt(slp.bound_lemma),
                _fmt(slp.bound_remark))
    except LksError as exc:
        rep.add("slp: not invertible (%s)", exc)
    growth = norms[-1] / max(norms[0], 1e-300)
    verdict = "fail (compression norms grow %sx)" % _fmt(growth) \
        if growth > 2.0 else "pass (norms stable at tested windows)"
    rep.add("verdict: %s", verdict)
    _emit(rep.text(), args.out)
    return 0


def cmd_pair(args, cfg) -> int:
    lam = _mult_from_args(args, cfg)
    rep = Report("pair", {"family": lam.family, "alpha": args.alpha,
                          "beta": args.beta, "seed": args.seed})
    pr = pair_multiplier_check(lam, args.alpha, args.beta, kmax=args.kmax)
    rep.add("sup |lambda| = %s", _fmt(pr.sup_lambda))
    for scan in filter(None, (pr.mu_scan, pr.lambda_scan)):
        rep.add("%s: slope %s class %s ratios %s", scan.label,
                _fmt(scan.slope), scan.classification,
                ", ".join(_fmt(r) for r in scan.ratios))
    rep.add("verdict: %s", pr.verdict)
    _emit(rep.text(), args.out)
    return 0


def cmd_polygon(args, cfg) -> int:
    fracs = tuple(Fraction(s) for s in args.angles.split(","))
    theta = SingularitySet(fracs, args.alpha)
    rep = Report("polygon", {"angles": args.angles, "alpha": args.alpha,
                             "seed": args.seed})
    pd = polygon_structure(theta)
    rep.add("d = %d, d_s = %d, n_s = %d", pd.d, pd.d_s, pd.n_s)
    rep.add("orbits: %s", "; ".join(str(o) for o in pd.orbits))
    cw = composite_weight(theta, 1 << args.grid_log2)
    rep.add("composite ratio [%s, %s], bracket A = %s, min W = %s",
            _fmt(cw.ratio_min), _fmt(cw.ratio_max), _fmt(cw.bracket),
            _fmt(cw.w_min))
    _emit(rep.text(), args.out)
    return 0


def cmd_decompose(args, cfg) -> int:
    lam = _mult_from_args(args, cfg)
    rep = Report("decompose", {"family": lam.family, "alpha": args.alpha,
                               "beta": args.beta, "theta": args.theta,
                               "invert": args.invert, "seed": args.seed})
    tr = theorem53_check(lam, args.alpha, args.beta, args.theta, kmax=args.kmax)
    rep.add("branch %s, gamma = %s, cutoff a = %s", tr.branch,
            _fmt(tr.gamma), _fmt(tr.cutoff_a))
    for name, scan in tr.conditions.items():
        rep.add("%-13s slope %s class %-13s max ratio %s", name,
                _fmt(scan.slope), scan.classification, _fmt(scan.max_ratio))
    rep.add("verdict: %s", tr.verdict)
    if args.invert:
        co = build_cutoff(tr.cutoff_a)
        pad = 256
        n_top = 1 << args.kmax
        l1, l2 = cutoff_decompose(lam, co, -pad, n_top + pad)
        adj = theorem59_adjust(l1, l2)
        rep.add("theorem59: delta=%s min|lambda3|=%s reconstruction %s",
                _fmt(adj.delta), _fmt(adj.min_lam3),
                _fmt(adj.reconstruction_error))
        conds = conditions_for_pair(adj.inv_smooth, adj.inv_rest, args.alpha,
                                    args.beta, args.theta, kmax=args.kmax)
        for name, scan in conds.items():
            rep.add("inverse %-13s class %-13s max ratio %s", name,
                    scan.classification, _fmt(scan.max_ratio))
    _emit(rep.text(), args.out)
    return 0


def cmd_spectra(args, cfg) -> int:
    nu = NuMeasure(zeta_angle=args.zeta_angle, K=args.K)
    phi = SymbolSpec(tuple(complex(s) for s in args.phi.split(",")))
    zs = [complex(s) for s in args.z.split(",")]
    Ns = [int(s) for s in args.N.split(",")]
    rep = Report("spectra", {"zeta_angle": _fmt(args.zeta_angle),
                             "phi": args.phi, "z": args.z, "N": args.N,
                             "K": args.K, "seed": args.seed})
    rows = []
    for z in zs:
        probes = resolvent_probe(phi, nu, z, Ns)
        try:
            wind = winding_number(phi, z)
            wtxt = str(wind)
        except LksError:
            wtxt = "on_curve"
        for (N_eff, smin) in probes:
            rows.append((_fmt(z), N_eff, smin, wtxt))
        rep.add("z=%s: smin %s, winding %s", _fmt(z),
                ", ".join("%d:%s" % (n, _fmt(s)) for n, s in probes), wtxt)
    demo = slp_failure_demo(nu, Ns)
    for row in demo["rows"]:
        rep.add("N=%d forward %s inverse %s constant %s", row["N"],
                _fmt(row["forward"]), _fmt(row["inverse"]),
                _fmt(row["constant"]))
    rep.add("inverse growth ratio = %s", _fmt(demo["inverse_growth"]))
    if args.csv:
        _write_csv(args.csv, ("z", "N", "smallest_singular_value", "winding"),
                   rows)
    _emit(rep.text(), args.out)
    return 0


def cmd_audit(args, cfg) -> int:
    results = run_battery(args.profile, args.seed)
    _emit(format_report(results, args.profile, args.seed), args.out)
    return 0 if all(r.passed for r in results) else 1


# --------------------------------------------------------------------------

def _add_common(sp):
    sp.add_argument("--config", default=None, help="INI config file")
    sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sp.add_argument("--out", default=None, help="write the report here")
    sp.add_argument("--grid-log2", dest="grid_log2", type=int, default=None)


def _add_weight_flags(sp):
    sp.add_argument("--kind", default=None,
                    choices=["lks_power", "lks_power_log", "lks_table"])
    sp.add_argument("--alpha", type=float, default=None)
    sp.add_argument("--beta", type=float, default=None)
    sp.add_argument("--c", default=None, help="comma list for lks_table")
    sp.add_argument("--K", type=int, default=None)


def _add_mult_flags(sp):
    sp.add_argument("--family", default=None,
                    choices=["constant", "basis", "rotation", "power_rotation",
                             "affine_rotation", "symbol"])
    sp.add_argument("--a", default=None)
    sp.add_argument("--b", default=None)
    sp.add_argument("--n", type=int, default=None)
    sp.add_argument("--zeta-angle", dest="zeta_angle", type=float, default=None)
    sp.add_argument("--delta", type=float, default=None)
    sp.add_argument("--theta", type=float, default=None)
    sp.add_argument("--phi", default=None, help="comma list of coefficients")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="lksmult",
        description="multiplier analysis for weighted L^2 spaces on the circle")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("weight", help="single-weight analytic report")
    _add_common(sp); _add_weight_flags(sp)
    sp.add_argument("--a2-level", dest="a2_level", type=int, default=12)
    sp.add_argument("--eps", default="0.1,1,10")
    sp.set_defaults(fn=cmd_weight)

    sp = sub.add_parser("dirichlet", help="Besov-Dirichlet structure report")
    _add_common(sp); _add_weight_flags(sp)
    sp.add_argument("--window", type=int, default=32)
    sp.set_defaults(fn=cmd_dirichlet)

    sp = sub.add_parser("capacity", help="capacity of a finite set")
    _add_common(sp); _add_weight_flags(sp)
    sp.add_argument("--set", required=True, help="comma list of integers")
    sp.add_argument("--method", default="active_set",
                    choices=["active_set", "projected_gradient", "dual_lp"])
    sp.add_argument("--window", type=int, default=4096)
    sp.set_defaults(fn=cmd_capacity)

    sp = sub.add_parser("mult", help="multiplier membership report")
    _add_common(sp); _add_weight_flags(sp); _add_mult_flags(sp)
    sp.add_argument("--window", type=int, default=64)
    sp.add_argument("--strategy", default="intervals",
                    choices=["intervals", "all_subsets", "random"])
    sp.set_defaults(fn=cmd_mult)

    sp = sub.add_parser("pair", help="pair multiplier check (D_beta -> D_alpha)")
    _add_common(sp); _add_mult_flags(sp)
    sp.add_argument("--alpha", type=float, required=True)
    sp.add_argument("--beta", type=float, required=True)
    sp.add_argument("--kmax", type=int, default=10)
    sp.set_defaults(fn=cmd_pair)

    sp = sub.add_parser("polygon", help="polygon structure and composite weight")
    _add_common(sp)
    sp.add_argument("--angles", required=True,
                    help="comma list of fractions of a turn, e.g. 0,1/4,1/2,3/4")
    sp.add_argument("--alpha", type=float, default=0.5)
    sp.set_defaults(fn=cmd_polygon, grid_log2_default=18)

    sp = sub.add_parser("decompose", help="Theorem 5.3 cut-off decomposition check")
    _add_common(sp); _add_mult_flags(sp)
    sp.add_argument("--alpha", type=float, required=True)
    sp.add_argument("--beta", type=float, required=True)
    sp.add_argument("--theta", type=float, required=True)
    sp.add_argument("--kmax", type=int, default=10)
    sp.add_argument("--invert", action="store_true")
    sp.set_defaults(fn=cmd_decompose)

    sp = sub.add_parser("spectra", help="hidden-spectrum probes")
    _add_common(sp)
    sp.add_argument("--zeta-angle", dest="zeta_angle", type=float,
                    default=2.0 * np.pi * (np.sqrt(5.0) - 1.0) / 2.0)
    sp.add_argument("--phi", default="0,1")
    sp.add_argument("--z", default="0")
    sp.add_argument("--N", default="32,128")
    sp.add_argument("--K", type=int, default=2048)
    sp.add_argument("--csv", default=None, help="CSV output path")
    sp.set_defaults(fn=cmd_spectra)

    sp = sub.add_parser("audit", help="run the acceptance battery")
    _add_common(sp)
    sp.add_argument("--profile", default="full", choices=["full", "quick"])
    sp.set_defaults(fn=cmd_audit)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "grid_log2", None) is None:
        args.grid_log2 = getattr(args, "grid_log2_default", None)
    try:
        cfg = _load_config(getattr(args, "config", None))
        return args.fn(args, cfg)
    except (PreconditionError, ValueError, OSError) as exc:
        sys.stderr.write("error: %s\n" % exc)
        return 2
    except (SolverFailure, QuadratureResolutionError) as exc:
        sys.stderr.write("solver failure: %s\n" % exc)
        return 3


if __name__ == "__main__":
    sys.exit(main())
