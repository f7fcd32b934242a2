"""Command-line driver: ``ltlab <subcommand> [options]``.

Every run resolves its configuration from, in increasing priority, the
preset (``--preset``), a key=value config file (``--config``) and explicit
flags.  Output is a JSON document with ``metadata`` (version, config hash,
wall time), the resolved ``config`` and the ``payload``; tabular payloads
can also be written as CSV.

Exit codes: 0 success, 1 usage or input error, 2 an inequality that is a
theorem failed numerically.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
import time

import numpy as np

from ltlab import __version__
from ltlab.errors import LTLabError
from ltlab.tables import emit_table

EXIT_OK, EXIT_USAGE, EXIT_VIOLATION = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


PRESETS = {
    "constants": {"default": {}},
    "rumin-eval": {
        "paper-d1s1": {"d": 1, "s": 1.0, "a": 4.5, "p": 0.25, "alpha": 0.36, "beta": 2.1,
                       "normalization": "both"},
    },
    "rumin-optimize": {
        "paper-d1s1": {"family": "reference", "d": 1, "s": 1.0, "restarts": 5, "max_evals": 200},
        "quick": {"family": "reference", "d": 1, "s": 1.0, "restarts": 1, "max_evals": 40},
    },
    "kinetic-corpus": {
        "default": {"s_values": "0.5,1,2", "seeds": 50, "N": 8, "n": 256, "smoothness": 2.0},
        "fermi-ball": {"mode": "fermi-ball", "M_values": "1,2,5,10,50,200"},
    },
    "schrodinger": {
        "poschl-teller": {"potential": "poschl-teller", "nu": 1.0, "kappa": "1", "L": 20.0, "n": 4096},
        "guards": {"potential": "corpus", "kappa": "0.5,1,1.5", "L": 20.0, "n": 4096},
    },
    "weyl-sweep": {
        "sech2": {"potential": "sech2", "amplitude": 1.0, "kappa": 1.0, "lambdas": "4,16,64,256",
                  "L": 20.0, "n": 4096},
    },
    "cover": {
        "uniform": {"density": "uniform", "lambda_": 0.3, "d": 1, "K": 4},
        "corpus": {"density": "corpus", "count": 100},
    },
    "local-checks": {
        "default": {"families": 50, "configs": 10000},
    },
}


def _common(p):
    p.add_argument("--out", default=None, help="output directory (default: print JSON to stdout)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=None, help="override the relative tolerance")
    p.add_argument("--preset", default=None)
    p.add_argument("--format", choices=("json", "csv", "both"), default="json")
    p.add_argument("--config", default=None, help="key=value config file")


def build_parser():
    parser = _Parser(prog="ltlab", description="Lieb-Thirring numerical laboratory")
    parser.add_argument("--version", action="version", version=f"ltlab {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("constants", help="semiclassical constants and lifting factors")
    _common(p)
    p.add_argument("--kappa", type=float, default=1.0)
    p.add_argument("--d", type=int, default=1)
    p.add_argument("--s", type=float, default=1.0)
    p.add_argument("--E", type=float, default=1.0)

    p = sub.add_parser("rumin-eval", help="evaluate the momentum-decomposition functional")
    _common(p)
    p.add_argument("--d", type=int, default=1)
    p.add_argument("--s", type=float, default=1.0)
    p.add_argument("--a", type=float, default=4.5)
    p.add_argument("--p", type=float, default=0.25)
    p.add_argument("--alpha", type=float, default=0.36)
    p.add_argument("--beta", type=float, default=2.1)
    p.add_argument("--normalization", choices=("mass", "literal", "both"), default="both")

    p = sub.add_parser("rumin-optimize", help="minimize the functional over a trial family")
    _common(p)
    p.add_argument("--family", choices=("reference", "exponent", "power-window", "scale"), default="reference")
    p.add_argument("--d", type=int, default=1)
    p.add_argument("--s", type=float, default=1.0)
    p.add_argument("--restarts", type=int, default=5)
    p.add_argument("--max-evals", type=int, default=200)

    p = sub.add_parser("kinetic-corpus", help="kinetic ratios over random orthonormal families")
    _common(p)
    p.add_argument("--mode", choices=("random", "fermi-ball"), default="random")
    p.add_argument("--s-values", default="0.5,1,2")
    p.add_argument("--seeds", type=int, default=50)
    p.add_argument("--N", type=int, default=8)
    p.add_argument("--n", type=int, default=256)
    p.add_argument("--smoothness", type=float, default=2.0)
    p.add_argument("--M-values", default="1,2,5,10,50,200")

    p = sub.add_parser("schrodinger", help="1-D spectra and Lieb-Thirring ratios")
    _common(p)
    p.add_argument("--potential", choices=("poschl-teller", "sech2", "square", "gaussian", "table", "corpus"),
                   default="poschl-teller")
    p.add_argument("--nu", type=float, default=1.0)
    p.add_argument("--amplitude", type=float, default=1.0)
    p.add_argument("--depth", type=float, default=1.0)
    p.add_argument("--width", type=float, default=1.0)
    p.add_argument("--table", default=None)
    p.add_argument("--lambda", dest="lambda_", type=float, default=1.0)
    p.add_argument("--kappa", default="1")
    p.add_argument("--L", type=float, default=20.0)
    p.add_argument("--n", type=int, default=4096)

    p = sub.add_parser("weyl-sweep", help="Riesz means against semiclassics as coupling grows")
    _common(p)
    p.add_argument("--potential", choices=("sech2", "square", "gaussian", "table"), default="sech2")
    p.add_argument("--amplitude", type=float, default=1.0)
    p.add_argument("--depth", type=float, default=1.0)
    p.add_argument("--width", type=float, default=1.0)
    p.add_argument("--table", default=None)
    p.add_argument("--kappa", type=float, default=1.0)
    p.add_argument("--lambdas", default="4,16,64,256")
    p.add_argument("--L", type=float, default=20.0)
    p.add_argument("--n", type=int, default=4096)

    p = sub.add_parser("cover", help="dyadic stopping-time cover and covering inequality")
    _common(p)
    p.add_argument("--density", choices=("uniform", "random", "corpus"), default="uniform")
    p.add_argument("--lambda", dest="lambda_", type=float, default=0.3)
    p.add_argument("--d", type=int, default=1)
    p.add_argument("--K", type=int, default=4)
    p.add_argument("--alpha", type=float, default=2.0)
    p.add_argument("--eps", type=float, default=0.5)
    p.add_argument("--q", type=float, default=None)
    p.add_argument("--count", type=int, default=100)

    p = sub.add_parser("local-checks", help="local exclusion, uncertainty and interaction checks")
    _common(p)
    p.add_argument("--families", type=int, default=50)
    p.add_argument("--configs", type=int, default=10000)
    return parser


def read_config_file(path):
    """Parse flat key=value lines; '#' starts a comment."""
    out = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc.strerror}") from None
    for no, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{no}: expected key=value")
        k, v = (t.strip() for t in line.split("=", 1))
        if not k:
            raise UsageError(f"{path}:{no}: empty key")
        out[k] = v
    return out


def _tokens(mapping):
    toks = []
    for k, v in mapping.items():
        flag = "--lambda" if k in ("lambda_", "lambda") else "--" + k.replace("_", "-")
        toks += [flag, str(v)]
    return toks


def _flag_names(parser, command):
    sub = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    return sub.choices[command]


def resolve_args(argv):
    parser = build_parser()
    if not argv or argv[0] in ("-h", "--help", "--version"):
        parser.parse_args(argv)  # prints and exits
    command = argv[0]
    if command not in PRESETS:
        parser.parse_args(argv)
        raise UsageError(f"unknown subcommand {command!r}")
    pre = _Parser(add_help=False)
    pre.add_argument("--preset", default=None)
    pre.add_argument("--config", default=None)
    known, _ = pre.parse_known_args(argv[1:])
    tokens = []
    if known.preset is not None:
        presets = PRESETS[command]
        if known.preset not in presets:
            raise UsageError(f"unknown preset {known.preset!r} for {command}; choose from {sorted(presets)}")
        tokens += _tokens(presets[known.preset])
    if known.config is not None:
        tokens += _tokens(read_config_file(known.config))
    args = parser.parse_args([command, *tokens, *argv[1:]])
    return args


_NON_CONFIG = {"out", "format", "config"}


def config_of(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in _NON_CONFIG}


def config_hash(cfg: dict) -> str:
    blob = json.dumps(cfg, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return None
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    return x


def _floats(text):
    try:
        return [float(t) for t in str(text).split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"expected a comma-separated list of numbers, got {text!r}") from None


# ---------------------------------------------------------------- subcommands


def cmd_constants(args):
    from ltlab import semiclassics as sc

    p = sc.RieszParams(args.kappa, args.d, args.s)
    out = {
        "params": {"kappa": p.kappa, "d": p.d, "s": p.s, "case": p.case, "valid": p.valid},
        "lcl": sc.lcl(p.kappa, p.d, p.s),
        "kcl": sc.kcl(p.d, p.s),
        "lcl_kappa1": sc.lcl(1.0, p.d, p.s),
    }
    if p.s == 1.0:
        out["kinetic_from_lcl1"] = sc.kinetic_from_riesz(out["lcl_kappa1"], p.d)
        out["duality_product"] = out["kcl"] * (1 + 2 / p.d) * (out["lcl_kappa1"] * (1 + p.d / 2)) ** (2 / p.d)
    out["al_lift_factor"] = sc.al_lift_factor(p.kappa, p.d, p.s) if p.kappa > 0 else None
    try:
        out["case4_lift_factor"] = sc.case4_lift_factor(p.kappa, p.d, p.s)
    except LTLabError:
        out["case4_lift_factor"] = None
    try:
        out["uniform_density_bound"] = sc.uniform_density_bound(p.d, p.s, args.E)
    except LTLabError:
        out["uniform_density_bound"] = None
    try:
        out["bessel_window_constant"] = sc.bessel_window_constant(p.d, p.s, p.kappa)
    except LTLabError:
        out["bessel_window_constant"] = None
    return out, None, False


def _quad_spec(args):
    from ltlab.rumin import QuadratureSpec

    if args.tol is None:
        return QuadratureSpec()
    return QuadratureSpec(rel_tol=args.tol, inner_rel_tol=min(args.tol, 1e-9))


def cmd_rumin_eval(args):
    from ltlab.rumin import (PowerDecayProfile, RuminTrial, WindowProfile, kinetic_bound_ratio,
                             normalize_f, rumin_functional)

    f = normalize_f(PowerDecayProfile(args.a, args.p))
    phi = WindowProfile(args.alpha, args.beta)
    q = _quad_spec(args)
    modes = ["mass", "literal"] if args.normalization == "both" else [args.normalization]
    out = {"f": f.params(), "phi": phi.params(), "readings": {}}
    for mode in modes:
        res = rumin_functional(RuminTrial(f, phi, args.d, args.s, mode), q)
        entry = res.as_dict()
        if res.finite:
            kb = kinetic_bound_ratio(args.d, args.s, res.value)
            entry["kinetic_ratio"] = kb.ratio
            entry["l_ratio"] = kb.l_ratio
        out["readings"][mode] = entry
    primary = out["readings"].get("mass") or out["readings"][modes[0]]
    out["C"] = primary["value"]
    out["L_ratio"] = primary.get("l_ratio")
    out["kinetic_ratio"] = primary.get("kinetic_ratio")
    return out, None, False


def cmd_rumin_optimize(args):
    from ltlab.rumin import kinetic_bound_ratio
    from ltlab.rumin import optimize as ro

    fam = {"reference": ro.reference_family, "exponent": ro.exponent_family,
           "power-window": ro.power_window_family, "scale": ro.scale_family}[args.family]()
    cfg = ro.OptConfig(d=args.d, s=args.s, restarts=args.restarts, max_evals_per_restart=args.max_evals)
    res = ro.optimize_trial(fam, cfg)
    out = res.as_dict()
    out["family"] = args.family
    out["box"] = {"names": list(fam.names), "lower": list(fam.lower), "upper": list(fam.upper)}
    kb = kinetic_bound_ratio(args.d, args.s, res.value)
    out["kinetic_ratio"], out["l_ratio"] = kb.ratio, kb.l_ratio
    rows = [{"iteration": r["iteration"], **dict(zip(fam.names, r["params"])), "C": r["C"],
             "status": r["status"]} for r in res.trace]
    table = (rows, ["iteration", *fam.names, "C", "status"])
    return out, table, False


def rumin_kinetic_bound(d: int, s: float) -> dict:
    """Lower bound K^cl * r(C) for K_{d,s} from the reference trial shape."""
    from ltlab.rumin import (PowerDecayProfile, RuminTrial, WindowProfile, kinetic_bound_ratio,
                             normalize_f, rumin_functional)
    from ltlab.semiclassics import kcl

    f = normalize_f(PowerDecayProfile(4.5, 0.25))
    res = rumin_functional(RuminTrial(f, WindowProfile(0.36, 2.1), d, s))
    kb = kinetic_bound_ratio(d, s, res.value)
    return {"C": res.value, "ratio": kb.ratio, "kcl": kcl(d, s), "bound": kcl(d, s) * kb.ratio}


def cmd_kinetic_corpus(args):
    from ltlab import kinetic_lab as kl

    if args.mode == "fermi-ball":
        rows = []
        for M in _floats(args.M_values):
            M = int(M)
            n = 8
            while n < 8 * M + 8:
                n *= 2
            grid = kl.PeriodicGrid(1, 1.0, n)
            fam = kl.fermi_ball(grid, M=M)
            r = kl.lt_ratio(fam, 1, 1.0)
            exact = kl.fermi_ball_ratio(M)
            rows.append({"M": M, "n": n, "ratio": r, "closed_form": exact, "abs_diff": abs(r - exact),
                         "ratio_over_kcl": r / (math.pi**2 / 3)})
        return {"mode": "fermi-ball", "rows": rows}, (rows, ["M", "n", "ratio", "closed_form", "abs_diff",
                                                             "ratio_over_kcl"]), False
    grid = kl.PeriodicGrid(1, 1.0, args.n)
    rows, summary, violated = [], [], False
    fams = [kl.random_orthonormal_family(args.seed + k, args.N, grid, args.smoothness) for k in range(args.seeds)]
    ho = [kl.hoffmann_ostenhof_check(f) for f in fams]
    for s in _floats(args.s_values):
        bound = rumin_kinetic_bound(1, s)
        ratios = [kl.lt_ratio(f, 1, s) for f in fams]
        for k, (f, r) in enumerate(zip(fams, ratios)):
            lhs, rhs, margin = ho[k]
            rows.append({"s": s, "seed": f.seed, "lt_ratio": r, "ho_lhs": lhs, "ho_rhs": rhs, "ho_margin": margin,
                         "gram_deviation": f.gram_deviation()})
        mn = min(ratios)
        ok = mn >= 0.9 * bound["bound"]
        violated |= not ok
        summary.append({"s": s, "min_lt_ratio": mn, "rumin_bound": bound["bound"], "rumin_C": bound["C"],
                        "ok": ok})
    ho_ok = all(m >= -1e-8 * lhs for lhs, _, m in ho)
    violated |= not ho_ok
    out = {"mode": "random", "summary": summary, "hoffmann_ostenhof_ok": ho_ok,
           "min_ho_margin_rel": min(m / lhs for lhs, _, m in ho)}
    return out, (rows, ["s", "seed", "lt_ratio", "ho_lhs", "ho_rhs", "ho_margin", "gram_deviation"]), violated


def _potential(args):
    from ltlab.schrodinger1d import Potential1D

    if args.potential == "poschl-teller":
        return Potential1D.poschl_teller(args.nu)
    if args.potential == "sech2":
        return Potential1D.sech2(args.amplitude)
    if args.potential == "square":
        return Potential1D.square_well(args.depth, args.width)
    if args.potential == "gaussian":
        return Potential1D.gaussian_well(args.depth, args.width)
    if args.potential == "table":
        if not args.table:
            raise UsageError("--potential table needs --table PATH")
        return Potential1D.from_table(args.table)
    raise UsageError(f"unknown potential {args.potential!r}")


def _guard(kappa, ratio, err):
    from ltlab.schrodinger1d import RATIO_BOUNDS

    bound = RATIO_BOUNDS.get(kappa)
    if bound is None:
        return True
    return ratio <= bound + err + 1e-12


def cmd_schrodinger(args):
    from ltlab import schrodinger1d as s1

    disc = s1.Discretization1D(args.L, args.n)
    kappas = _floats(args.kappa)
    if args.potential == "corpus":
        cases = s1.potential_corpus()
    else:
        cases = [(args.potential, _potential(args), args.lambda_)]
    rows, violated = [], False
    for name, V, lam in cases:
        spec = None
        for kappa in kappas:
            rep = s1.lt_ratio_report(V, lam, kappa, disc)
            spec = rep.spectrum
            ok = _guard(kappa, rep.ratio, rep.error)
            violated |= not ok
            rows.append({"potential": name, "lambda": lam, "kappa": kappa, "riesz": rep.riesz,
                         "semiclassical": rep.semiclassical, "ratio": rep.ratio, "error": rep.error,
                         "count": len(rep.spectrum), "truncated": rep.spectrum.truncated, "guard_ok": ok})
        if len(cases) == 1 and spec is not None:
            single = spec.as_dict()
    out = {"rows": rows, "violations": sum(not r["guard_ok"] for r in rows)}
    if len(cases) == 1:
        out["spectrum"] = single
    cols = ["potential", "lambda", "kappa", "riesz", "semiclassical", "ratio", "error", "count", "truncated",
            "guard_ok"]
    return out, (rows, cols), violated


def cmd_weyl_sweep(args):
    from ltlab import schrodinger1d as s1

    disc = s1.Discretization1D(args.L, args.n)
    V = _potential(args)
    rows = s1.weyl_sweep(V, args.kappa, _floats(args.lambdas), disc)
    dicts = [r.as_dict() for r in rows]
    violated = any(r.lam > 0 and not _guard(args.kappa, r.ratio, r.error) for r in rows)
    ratios = [r.ratio for r in rows if r.lam > 0]
    out = {"rows": dicts, "strictly_decreasing": all(b < a for a, b in zip(ratios, ratios[1:]))}
    return out, (dicts, ["lambda", "riesz", "semiclassical", "ratio"]), violated


def _cover_case(tl, mf, Lam, d, alpha, eps, q):
    cover = tl.stopping_time_cover(mf, Lam)
    tl.check_cover(cover)
    qq = (1 - eps) * Lam * 2.0 ** (-d) if q is None else q
    slack = tl.covering_inequality_check(cover, alpha, qq, eps)
    gs = tl.group_slacks(cover, alpha, qq, eps)
    return cover, slack, gs


def cmd_cover(args):
    from ltlab import tiling as tl

    rng = np.random.default_rng(args.seed)
    if args.density == "corpus":
        rows, violated = [], False
        for i in range(args.count):
            d = 1 + i % 2
            K = 10 if d == 1 else 6
            vals = tl.random_dyadic_density(rng, d, K)
            mf = tl.MassFunction(vals)
            Lam = max(mf.total_mass * 2.0 ** (-int(rng.integers(2, 7))), 2 * float(vals.max()))
            if Lam >= mf.total_mass:
                Lam = 0.5 * (mf.total_mass + 2 * float(vals.max()))
            for alpha in (1.0, 2.0, 4.0):
                for eps in (0.25, 0.5):
                    cover, slack, gs = _cover_case(tl, mf, Lam, d, alpha, eps, None)
                    leaf_slack = Lam - max(leaf.mass for leaf in cover.leaves)
                    ok = slack >= 0 and min(gs) >= 0 and leaf_slack >= 0
                    violated |= not ok
                    rows.append({"case": i, "d": d, "Lambda": Lam, "alpha": alpha, "eps": eps,
                                 "leaves": len(cover.leaves), "groups": len(cover.groups),
                                 "leaf_mass_slack": leaf_slack, "slack": slack,
                                 "min_group_slack": min(gs), "ok": ok})
        out = {"cases": args.count, "checks": len(rows), "violations": sum(not r["ok"] for r in rows),
               "min_slack": min(r["slack"] for r in rows),
               "min_leaf_mass_slack": min(r["leaf_mass_slack"] for r in rows)}
        return out, (rows, list(rows[0].keys()) if rows else ["case"]), violated
    if args.density == "uniform":
        n = 2**args.K
        mf = tl.MassFunction(np.full((n,) * args.d, 1.0 / n**args.d))
    else:
        mf = tl.MassFunction(tl.random_dyadic_density(rng, args.d, args.K))
    cover, slack, gs = _cover_case(tl, mf, args.lambda_, args.d, args.alpha, args.eps, args.q)
    out = tl.cover_to_json(cover)
    out.update({"slack": slack, "group_slacks": gs})
    violated = slack < 0 or min(gs) < 0
    rows = [{"corner": " ".join(format(c, ".17g") for c in cube["corner"]), "side": cube["side"],
             "mass": cube["mass"], "group": cube["group"]} for cube in out["cubes"]]
    return out, (rows, ["corner", "side", "mass", "group"]), violated


def cmd_local_checks(args):
    from ltlab import kinetic_lab as kl
    from ltlab import tiling as tl

    rng = np.random.default_rng(args.seed)
    grid = kl.PeriodicGrid(1, 1.0, 256)
    exclusion, uncertainty = [], []
    for k in range(args.families):
        fam = kl.random_orthonormal_family(args.seed + k, 8, grid, 2.0)
        for start, m in (((96,), 64), ((112,), 32), ((128,), 16), ((80,), 128)):
            lhs, rhs, slack = tl.local_exclusion_check(fam, start, m)
            exclusion.append({"seed": args.seed + k, "start": start[0], "m": m, "lhs": lhs, "rhs": rhs,
                              "slack": slack, "ok": slack >= -1e-8 * lhs})
            uncertainty.append(tl.local_uncertainty_probe(fam, start, m))
    w = tl.neumann_witness()
    wl, wr, ws = tl.local_exclusion_check(w, (0,), w.grid.n)
    worst_pair = math.inf
    for i in range(args.configs):
        d = 1 + i % 2
        s = (0.5, 1.0, 2.0)[i % 3]
        pts = rng.random((int(rng.integers(2, 30)), d))
        _, _, slack = tl.interaction_exclusion_check(pts, (0.0,) * d, 1.0, i % 5, d, s)
        worst_pair = min(worst_pair, slack)
    finite_c = [c for c in uncertainty if math.isfinite(c)]
    ex_ok = all(r["ok"] for r in exclusion)
    witness_ok = abs(ws) <= 1e-8 * wl
    inter_ok = worst_pair >= 0
    out = {
        "local_exclusion": {"checks": len(exclusion), "ok": ex_ok,
                            "min_rel_slack": min(r["slack"] / r["lhs"] for r in exclusion)},
        "witness": {"lhs": wl, "rhs": wr, "slack": ws, "ok": witness_ok},
        "local_uncertainty": {"min_C": min(finite_c) if finite_c else None, "probes": len(uncertainty)},
        "interaction": {"configs": args.configs, "min_slack": worst_pair, "ok": inter_ok},
        "neumann_deficit": {str(mu): tl.neumann_deficit(1, mu) / mu for mu in (1e4, 1e5)},
    }
    return out, (exclusion, ["seed", "start", "m", "lhs", "rhs", "slack", "ok"]), not (ex_ok and witness_ok and inter_ok)


COMMANDS = {
    "constants": cmd_constants,
    "rumin-eval": cmd_rumin_eval,
    "rumin-optimize": cmd_rumin_optimize,
    "kinetic-corpus": cmd_kinetic_corpus,
    "schrodinger": cmd_schrodinger,
    "weyl-sweep": cmd_weyl_sweep,
    "cover": cmd_cover,
    "local-checks": cmd_local_checks,
}


def run(argv=None, stdout=None):
    """Execute one subcommand; returns (exit code, result document or None)."""
    stdout = stdout or sys.stdout
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = resolve_args(argv)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_USAGE, None
    except SystemExit as exc:  # --help / --version
        return (EXIT_OK if not exc.code else EXIT_USAGE), None
    if args.command is None:
        build_parser().print_usage(sys.stderr)
        return EXIT_USAGE, None
    cfg = config_of(args)
    t0 = time.perf_counter()
    try:
        payload, table, violated = COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"ltlab {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE, None
    except (LTLabError, ValueError) as exc:
        print(f"ltlab {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE, None
    doc = {
        "metadata": {"version": __version__, "subcommand": args.command, "config_hash": config_hash(cfg),
                     "wall_time": time.perf_counter() - t0, "violation": bool(violated)},
        "config": _jsonable(cfg),
        "payload": _jsonable(payload),
    }
    text = json.dumps(doc, indent=2, sort_keys=True, allow_nan=False)
    try:
        if args.out is None:
            if args.format in ("json", "both"):
                stdout.write(text + "\n")
            if args.format in ("csv", "both") and table is not None:
                stdout.write(emit_table(*table))
        else:
            os.makedirs(args.out, exist_ok=True)
            if args.format in ("json", "both"):
                path = os.path.join(args.out, f"{args.command}.json")
                with open(path, "w", encoding="ascii") as fh:
                    fh.write(text + "\n")
            if args.format in ("csv", "both") and table is not None:
                emit_table(*table, path=os.path.join(args.out, f"{args.command}.csv"))
    except OSError as exc:
        print(f"ltlab {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE, doc
    if violated:
        print(f"ltlab {args.command}: inequality check failed", file=sys.stderr)
        return EXIT_VIOLATION, doc
    return EXIT_OK, doc


def main(argv=None):
    code, _ = run(argv)
    return code


if __name__ == "__main__":
    sys.exit(main())
