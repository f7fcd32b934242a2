"""Acceptance criteria 1-11, each reporting one PASS/FAIL line.

The lines are printed in the terminal summary of every pytest run and also
when this file is executed directly.
"""
import math
import time

import pytest

from ltlab import cli, schrodinger1d as s1
from ltlab.kinetic_lab import PeriodicGrid, fermi_ball, fermi_ball_ratio, lt_ratio
from ltlab.rumin import PowerDecayProfile, RuminTrial, WindowProfile, normalize_f, rescaled_phi, rumin_functional
from ltlab.semiclassics import kcl, lcl
from ltlab.tiling import neumann_deficit

RESULTS = {}


def report(number, ok, detail):
    RESULTS[number] = (bool(ok), detail)
    assert ok, f"criterion {number}: {detail}"


def run_cli(*argv):
    code, doc = cli.run(list(argv), stdout=_Sink())
    return code, doc


class _Sink:
    def write(self, _):
        pass


def test_c01_duality():
    t0 = time.perf_counter()
    worst = max(abs(kcl(d) * (1 + 2 / d) * (lcl(1.0, d) * (1 + d / 2)) ** (2 / d) - 1) for d in range(1, 11))
    dt = time.perf_counter() - t0
    report(1, worst <= 1e-12 and dt < 1.0, f"max |product - 1| = {worst:.2e} over d=1..10, {dt:.3f} s")


def test_c02_rumin_reproduction():
    t0 = time.perf_counter()
    code, doc = run_cli("rumin-eval", "--preset", "paper-d1s1")
    dt = time.perf_counter() - t0
    p = doc["payload"]
    C, L = p["C"], p["L_ratio"]
    both = set(p["readings"]) == {"mass", "literal"}
    ok = code == 0 and abs(C - 0.373556) <= 5e-4 and L <= 1.456 + 2e-3 and dt < 10 and both
    report(2, ok, f"C = {C:.7f}, L-ratio = {L:.6f}, literal reading {p['readings']['literal']['status']}, "
                  f"{dt:.2f} s")


def test_c03_scale_invariance():
    trial = RuminTrial(normalize_f(PowerDecayProfile(4.5, 0.25)), WindowProfile(0.36, 2.1))
    base = rumin_functional(trial).value
    diffs = [abs(rumin_functional(trial.with_phi(rescaled_phi(trial.phi, ell))).value - base) for ell in (0.3, 2.0)]
    report(3, max(diffs) <= 1e-8, f"|C(l) - C(1)| = {diffs[0]:.1e} (l=0.3), {diffs[1]:.1e} (l=2)")


def test_c04_fermi_ball():
    t0 = time.perf_counter()
    worst = 0.0
    for M in range(1, 51):
        n = 8
        while n < 8 * M + 8:
            n *= 2
        r = lt_ratio(fermi_ball(PeriodicGrid(1, 1.0, n), M=M), 1, 1.0)
        worst = max(worst, abs(r - fermi_ball_ratio(M)))
    r200 = lt_ratio(fermi_ball(PeriodicGrid(1, 1.0, 2048), M=200), 1, 1.0)
    rel = abs(r200 / (math.pi**2 / 3) - 1)
    dt = time.perf_counter() - t0
    report(4, worst <= 1e-10 and rel <= 0.01 and dt < 30,
           f"max deviation M<=50: {worst:.1e}; M=200 off pi^2/3 by {rel:.2e}; {dt:.2f} s")


def test_c05_schrodinger_oracles():
    t0 = time.perf_counter()
    disc = s1.Discretization1D(20.0, 4096)
    spec = s1.negative_spectrum(s1.Potential1D.poschl_teller(1.0), 1.0, disc)
    e0 = spec.eigenvalues[0]
    r1 = s1.lt_ratio_1d(s1.Potential1D.poschl_teller(1.0), 1.0, 1.0, disc)
    r2 = s1.lt_ratio_1d(s1.Potential1D.poschl_teller(2.0), 1.0, 1.0, disc)
    dt = time.perf_counter() - t0
    ok = (len(spec) == 1 and abs(e0 + 1) <= 1e-4 and abs(r1 - 1.06066) <= 1e-3 and r1 <= 1.1548
          and abs(r2 - 1.0206) <= 1e-3 and dt < 30)
    report(5, ok, f"E0 = {e0:.8f}, ratio(nu=1) = {r1:.6f}, ratio(nu=2) = {r2:.6f}, {dt:.2f} s")


def test_c06_weyl_sweep():
    code, doc = run_cli("weyl-sweep", "--preset", "sech2")
    ratios = [row["ratio"] for row in doc["payload"]["rows"]]
    dec = all(b < a for a, b in zip(ratios, ratios[1:]))
    report(6, code == 0 and dec and abs(ratios[-1] - 1) <= 0.1,
           "ratios " + ", ".join(f"{r:.5f}" for r in ratios))


def test_c07_guards():
    code, doc = run_cli("schrodinger", "--preset", "guards")
    rows = doc["payload"]["rows"]
    worst = {k: max(r["ratio"] for r in rows if r["kappa"] == k) for k in (0.5, 1.0, 1.5)}
    # the exit status must flag an exceedance
    saved = s1.RATIO_BOUNDS[1.0]
    try:
        s1.RATIO_BOUNDS[1.0] = 1.0
        forced, _ = run_cli("schrodinger", "--potential", "poschl-teller", "--nu", "1", "--kappa", "1")
    finally:
        s1.RATIO_BOUNDS[1.0] = saved
    report(7, code == 0 and forced == 2,
           f"{len(rows)} (potential, kappa) cases, max ratio {worst[0.5]:.4f} / {worst[1.0]:.4f} / "
           f"{worst[1.5]:.6f} for kappa 1/2, 1, 3/2; forced exceedance exits {forced}")


def test_c08_covers():
    t0 = time.perf_counter()
    code, doc = run_cli("cover", "--preset", "corpus")
    dt = time.perf_counter() - t0
    p = doc["payload"]
    ok = code == 0 and p["cases"] == 100 and p["checks"] == 600 and p["violations"] == 0 and dt < 60
    report(8, ok, f"{p['checks']} checks, min slack {p['min_slack']:.3g}, "
                  f"min Lambda - leaf mass {p['min_leaf_mass_slack']:.3g}, {dt:.2f} s")


def test_c09_local_checks():
    code, doc = run_cli("local-checks", "--preset", "default")
    p = doc["payload"]
    ok = code == 0 and p["local_exclusion"]["ok"] and p["witness"]["ok"] and p["interaction"]["ok"]
    report(9, ok, f"exclusion min slack/lhs {p['local_exclusion']['min_rel_slack']:.3f} on 50 families; "
                  f"witness slack {p['witness']['slack']:.1e}; interaction min slack "
                  f"{p['interaction']['min_slack']:.3g} on {p['interaction']['configs']} configs")


def test_c10_neumann_deficit():
    v = neumann_deficit(1, 1e5) / 1e5
    report(10, 0.48 <= v <= 0.52, f"deficit/mu = {v:.6f} at mu = 1e5")


def test_c11_kinetic_corpus():
    code, doc = run_cli("kinetic-corpus", "--preset", "default")
    summ = doc["payload"]["summary"]
    ok = code == 0 and all(r["ok"] for r in summ) and len(summ) == 3
    report(11, ok, "; ".join(f"s={r['s']:g}: min {r['min_lt_ratio']:.4g} vs 0.9 x {r['rumin_bound']:.4g}"
                             for r in summ))


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q"]))
