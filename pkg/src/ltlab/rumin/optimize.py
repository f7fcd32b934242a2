"""Deterministic derivative-free search over parametric trial families."""
from __future__ import annotations

import csv
import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import optimize as sopt

from ltlab.errors import AllDivergentError, DomainError, LTLabError
from ltlab.rumin.functional import QuadratureSpec, RuminTrial, normalize_f, rumin_functional
from ltlab.rumin.profiles import IndicatorProfile, PowerDecayProfile, PowerWindowProfile, WindowProfile

__all__ = [
    "TrialFamily",
    "OptConfig",
    "OptResult",
    "optimize_trial",
    "reference_family",
    "power_window_family",
    "exponent_family",
    "scale_family",
    "write_trace_csv",
    "FAST_QUADRATURE",
]

# looser nested quadrature used inside the search loop
FAST_QUADRATURE = QuadratureSpec(abs_tol=1e-9, rel_tol=1e-8, inner_rel_tol=1e-9, t_min=1e-8)


@dataclass(frozen=True)
class TrialFamily:
    """Named parameters in a box and a builder returning (f, phi) profiles.

    ``build`` may return an f that is not yet L2-normalized; ``normalize_f``
    is applied when ``normalize`` is true.
    """

    names: tuple
    lower: tuple
    upper: tuple
    build: Callable
    start: tuple | None = None
    normalize: bool = True

    def __post_init__(self):
        if not (len(self.names) == len(self.lower) == len(self.upper)):
            raise DomainError("names, lower and upper must have equal length")
        if any(lo > hi for lo, hi in zip(self.lower, self.upper)):
            raise DomainError("box lower bounds must not exceed upper bounds")
        if self.start is not None and not self.contains(self.start):
            raise DomainError("start point lies outside the box")

    def contains(self, x) -> bool:
        return all(lo <= v <= hi for v, lo, hi in zip(x, self.lower, self.upper))

    def corners(self):
        return [tuple(c) for c in itertools.product(*zip(self.lower, self.upper))]

    def seeds(self, count: int):
        """Deterministic interior seed points: start, center, then fixed fractions."""
        lo, hi = np.asarray(self.lower, float), np.asarray(self.upper, float)
        pts = []
        if self.start is not None:
            pts.append(tuple(self.start))
        pts.append(tuple(0.5 * (lo + hi)))
        fracs = [0.25, 0.75, 0.4, 0.6, 0.1, 0.9]
        k = 0
        while len(pts) < count:
            fr = fracs[k % len(fracs)]
            alt = np.array([fr if (j + k) % 2 == 0 else 1 - fr for j in range(len(lo))])
            pts.append(tuple(lo + alt * (hi - lo)))
            k += 1
        return pts[:count]


@dataclass(frozen=True)
class OptConfig:
    d: int = 1
    s: float = 1.0
    restarts: int = 5
    max_evals_per_restart: int = 200
    xatol: float = 1e-6
    fatol: float = 1e-9
    quadrature: QuadratureSpec = field(default_factory=lambda: FAST_QUADRATURE)
    phi_normalization: str = "mass"
    refine_quadrature: QuadratureSpec | None = field(default_factory=QuadratureSpec)


@dataclass
class OptResult:
    params: dict
    value: float
    error: float
    trace: list
    corner_best: float
    evaluations: int

    def as_dict(self) -> dict:
        return {
            "params": self.params,
            "value": self.value,
            "error": self.error,
            "corner_best": self.corner_best,
            "evaluations": self.evaluations,
        }


def _evaluate(family: TrialFamily, x, cfg: OptConfig, q: QuadratureSpec):
    try:
        f, phi = family.build(*x)
        if family.normalize:
            f = normalize_f(f)
        trial = RuminTrial(f, phi, cfg.d, cfg.s, cfg.phi_normalization)
        res = rumin_functional(trial, q)
    except (LTLabError, ValueError, ArithmeticError) as exc:
        return math.inf, math.inf, f"invalid: {type(exc).__name__}"
    if not res.finite:
        return math.inf, math.inf, "divergent"
    return res.value, res.error, "ok"


def optimize_trial(family: TrialFamily, cfg: OptConfig | None = None) -> OptResult:
    """Minimize the functional over the family's box.

    All box corners are evaluated first, then Nelder-Mead (with bound
    clipping) runs from ``cfg.restarts`` deterministic seed points.  The
    result is the best finite value seen anywhere, so it is never worse than
    the best corner.  Divergent or invalid trials count as +inf.  When
    ``cfg.refine_quadrature`` is set the winner is re-evaluated with it.
    """
    cfg = cfg or OptConfig()
    trace = []
    memo = {}

    def objective(x, phase):
        x = tuple(float(np.clip(v, lo, hi)) for v, lo, hi in zip(x, family.lower, family.upper))
        if x not in memo:
            memo[x] = _evaluate(family, x, cfg, cfg.quadrature)
        val, err, status = memo[x]
        trace.append({"iteration": len(trace), "phase": phase, "params": x, "C": val, "status": status})
        return val

    for c in family.corners():
        objective(c, "corner")
    corner_vals = [row["C"] for row in trace]
    corner_best = min(corner_vals)
    for r, seed in enumerate(family.seeds(cfg.restarts)):
        if cfg.max_evals_per_restart <= 0:
            objective(seed, f"seed{r}")
            continue
        sopt.minimize(
            objective, np.asarray(seed, float), args=(f"restart{r}",), method="Nelder-Mead",
            bounds=list(zip(family.lower, family.upper)),
            options={"maxfev": cfg.max_evals_per_restart, "xatol": cfg.xatol, "fatol": cfg.fatol},
        )
    finite = [row for row in trace if math.isfinite(row["C"])]
    if not finite:
        raise AllDivergentError(f"all {len(trace)} trials in the box diverged or were invalid")
    # first occurrence of the minimum, so ties resolve by evaluation order
    best = min(finite, key=lambda row: row["C"])
    x = best["params"]
    value, err, _ = memo[x]
    if cfg.refine_quadrature is not None:
        v2, e2, st = _evaluate(family, x, cfg, cfg.refine_quadrature)
        if st == "ok":
            value, err = v2, e2
    return OptResult(
        params=dict(zip(family.names, x)), value=value, error=err, trace=trace,
        corner_best=corner_best, evaluations=len(memo),
    )


def write_trace_csv(trace: Sequence[dict], names: Sequence[str], path) -> None:
    """Write an optimizer trace with columns iteration, params..., C, status."""
    with open(path, "w", newline="", encoding="ascii") as fh:
        w = csv.writer(fh, lineterminator="\r\n")
        w.writerow(["iteration", *names, "C", "status"])
        for row in trace:
            w.writerow([row["iteration"], *(format(v, ".17g") for v in row["params"]),
                        format(row["C"], ".17g"), row["status"]])


REFERENCE_START = (4.5, 0.25, 0.36, 2.1)


def _reference_build(a, p, alpha, beta):
    return PowerDecayProfile(a, p), WindowProfile(alpha, beta)


def reference_family(half_widths=(1.0, 0.05, 0.1, 0.5), start=REFERENCE_START) -> TrialFamily:
    """f = (1 + mu t^a)^(-p) normalized, phi = (1 - t^alpha)^beta/(1+t) on [0,1]."""
    lower = tuple(c - h for c, h in zip(start, half_widths))
    upper = tuple(c + h for c, h in zip(start, half_widths))
    return TrialFamily(("a", "p", "alpha", "beta"), lower, upper, _reference_build, start=tuple(start))


def _power_window_build(b):
    return IndicatorProfile(1.0), PowerWindowProfile(b)


def power_window_family(lower=-0.3, upper=3.0, start=None) -> TrialFamily:
    """f = 1(t <= 1), phi = (1+b)(1-t)^b on [0,1]; one parameter b."""
    return TrialFamily(("b",), (lower,), (upper,), _power_window_build,
                       start=None if start is None else (start,), normalize=False)


def _exponent_build(a, p=0.25, alpha=0.36, beta=2.1):
    return PowerDecayProfile(a, p), WindowProfile(alpha, beta)


def exponent_family(lower=3.5, upper=6.0, start=4.5) -> TrialFamily:
    """Slice of the reference family with only the decay exponent a free."""
    return TrialFamily(("a",), (lower,), (upper,), _exponent_build, start=(start,))


def _scale_build(ell):
    return IndicatorProfile(1.0), IndicatorProfile(1.0 / ell, ell)


def scale_family(lower=0.5, upper=4.0) -> TrialFamily:
    """f = 1(t <= 1), phi = ell * 1(t <= 1/ell); the functional is constant in ell."""
    return TrialFamily(("ell",), (lower,), (upper,), _scale_build, normalize=False)
