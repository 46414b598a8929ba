"""Acceptance battery shared by ``rieszschur suite`` and the test-suite.

Every criterion returns a :class:`CriterionResult` whose ``summary`` holds
only deterministic data (no timings), so a suite report is reproducible
byte for byte.  Runtime limits are checked separately through ``elapsed``.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Sequence, Tuple

import numpy as np

from .catalog import catalog, random_algebraic, random_decaying, random_trig_poly
from .certificates import (Certificate, Inequality, Verdict, check_classic_schur, check_cor_sin,
                           check_cor_x, check_duffin_schaeffer, check_main)
from .density import alpha_star, ld_dense_check
from .expr import Sin, mollify, poly, sinratio
from .norms import a_s_profile, inf_quadratic
from .parser import parse_expr
from .sharpness import sharpness_search

OK_VERDICTS = (Verdict.HOLDS_CERTIFIED, Verdict.EQUALITY_WITHIN_TOL)


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    summary: Dict[str, Any]
    elapsed: float = 0.0
    certificates: List[Certificate] = field(default_factory=list)

    def line(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        return f"[{mark}] criterion {self.number}: {self.title} ({self.elapsed:.2f} s)"

    def to_diagnostic(self) -> Dict[str, Any]:
        return {"criterion": self.number, "title": self.title, "passed": self.passed,
                "summary": self.summary}


def _rng(seed: int, criterion: int) -> np.random.Generator:
    return np.random.default_rng([seed, criterion])


def criterion_1(seed: int) -> CriterionResult:
    f = parse_expr("sin(2*x)/x")
    cert = check_cor_x(f, 2.0)
    ratio = cert.lhs.lo / (cert.constant * cert.rhs_norm.lo)
    ok = abs(ratio - 1.0) <= 1e-6 and cert.verdict is Verdict.EQUALITY_WITHIN_TOL
    return CriterionResult(1, "sin(2x)/x is extremal for the constant sigma with Q = x", ok,
                           {"ratio": ratio, "verdict": cert.verdict.value}, certificates=[cert])


def criterion_2(seed: int) -> CriterionResult:
    f = parse_expr("sin(3*x)/sin(x)")
    cert = check_cor_sin(f, 2.0, 1.0)
    ratio = cert.lhs.lo / (cert.constant * cert.rhs_norm.lo)
    d = cert.equality_diag
    ok = (abs(ratio - 1.0) <= 1e-6 and d is not None and not d.fit_failed
          and abs(d.fitted_S - 1.0) <= 1e-6 and abs(d.fitted_C) <= 1e-6 and d.residual_sup <= 1e-6)
    summary = {"ratio": ratio, "constant": cert.constant, "verdict": cert.verdict.value,
               "fitted_S": d.fitted_S if d else None, "fitted_C": d.fitted_C if d else None,
               "residual_sup": d.residual_sup if d else None}
    return CriterionResult(2, "sin(3x)/sin(x) is extremal for sigma/tau + 1 = 3", ok, summary,
                           certificates=[cert])


def criterion_3(seed: int) -> CriterionResult:
    rows = []
    ok = True
    for tau in (1.0, 2.0):
        for s in (0.0, tau / 2, tau, 2 * tau, 5 * tau):
            A = inf_quadratic(Sin(tau), s)
            err = abs(A.lo - min(tau * tau, s * s))
            ok &= err <= 1e-8
            rows.append({"Q": f"sin({tau:g}x)", "s": s, "lo": A.lo, "error": err})
    for s in (1.0, 5.0, 10.0):
        A = inf_quadratic(poly([0.0, 1.0]), s)
        err = max(abs(A.lo - 1.0), abs(A.hi - 1.0))
        ok &= err <= 1e-10
        rows.append({"Q": "x", "s": s, "lo": A.lo, "error": err})
    return CriterionResult(3, "A_s closed forms for sin(tau x) and x", bool(ok), {"rows": rows})


def criterion_4(seed: int) -> CriterionResult:
    s_values = np.linspace(0.1, 10.0, 100)
    worst = math.inf
    per_q = {}
    for name, Q in catalog().items():
        prof = a_s_profile(Q, s_values, tol=1e-9)
        lows = np.array([e.lo for e in prof])
        step = float(np.min(np.diff(lows)))
        per_q[name] = step
        worst = min(worst, step)
    return CriterionResult(4, "A_s is nondecreasing in s for every catalogued weight",
                           worst >= -1e-9, {"min_step": worst, "per_weight": per_q})


def criterion_5(seed: int) -> CriterionResult:
    rng = _rng(seed, 5)
    worst_gap = math.inf
    certs = []
    for _ in range(50):
        gamma = float(rng.uniform(0.5, 3.0))
        g = random_trig_poly(rng, gamma, 4, include_top=True, lattice=8)
        c = check_duffin_schaeffer(g, gamma)
        certs.append(c)
        worst_gap = min(worst_gap, c.details["min_pointwise_gap"])
    eq = check_duffin_schaeffer(Sin(2.0), 2.0)
    certs.append(eq)
    ok = worst_gap >= -1e-9 and bool(eq.details["equality_everywhere"])
    return CriterionResult(5, "g'^2 + gamma^2 g^2 <= gamma^2 ||g||^2 pointwise", ok,
                           {"min_pointwise_gap": worst_gap,
                            "sin_equality_everywhere": bool(eq.details["equality_everywhere"])},
                           certificates=certs)


def criterion_6(seed: int) -> CriterionResult:
    rng = _rng(seed, 6)
    counts: Dict[str, int] = {}
    certs = []
    bad = 0
    for i in range(100):
        # frequencies on a common lattice keep f and Q f periodic, so both
        # norms get tight certified enclosures
        sigma = float(rng.integers(2, 13)) / 4
        if i % 2 == 0:
            tau = float(rng.integers(2, 9)) / 4
            Q = Sin(tau)
            f = random_trig_poly(rng, sigma, 4, lattice=int(round(4 * sigma)))
        else:
            tau = 0.0
            Q = poly([0.0, 1.0])
            f = random_decaying(rng, sigma, 3)
        c = check_main(Q, f, sigma, tau)
        certs.append(c)
        counts[c.verdict.value] = counts.get(c.verdict.value, 0) + 1
        bad += c.verdict not in OK_VERDICTS
    return CriterionResult(6, "main inequality on 100 random pairs", bad == 0,
                           {"verdicts": counts}, certificates=certs)


def criterion_7(seed: int) -> CriterionResult:
    rng = _rng(seed, 7)
    ok = True
    eq_ratios = {}
    certs = []
    for n in (1, 2, 3, 5):
        c = check_classic_schur(Inequality.RS_TRIG, sinratio(n + 1, 1), n)
        certs.append(c)
        r = c.lhs.lo / (c.constant * c.rhs_norm.lo)
        eq_ratios[str(n)] = r
        ok &= abs(r - 1.0) <= 1e-8
    failures = {"SCHUR_POLY": 0, "SCHUR_POLY_refined": 0, "RS_CLASSIC": 0}
    worst_ratio = {"SCHUR_POLY": 0.0, "RS_CLASSIC": 0.0}
    for n in range(1, 7):
        for _ in range(50):
            P = random_algebraic(rng, n)
            c = check_classic_schur(Inequality.SCHUR_POLY, P, n)
            failures["SCHUR_POLY"] += c.verdict not in OK_VERDICTS
            worst_ratio["SCHUR_POLY"] = max(worst_ratio["SCHUR_POLY"], c.ratio)
            if n % 2 == 1:
                ref = c.details["refined"]["verdict"]
                failures["SCHUR_POLY_refined"] += ref not in (v.value for v in OK_VERDICTS)
            d = check_classic_schur(Inequality.RS_CLASSIC, P, n)
            failures["RS_CLASSIC"] += d.verdict not in OK_VERDICTS
            worst_ratio["RS_CLASSIC"] = max(worst_ratio["RS_CLASSIC"], d.ratio)
    ok &= not any(failures.values())
    return CriterionResult(7, "classical trio: equality for sin((n+1)t)/sin t, random polynomials hold",
                           bool(ok), {"equality_ratios": eq_ratios, "failures": failures,
                                      "worst_ratio": worst_ratio}, certificates=certs)


def criterion_8(seed: int) -> CriterionResult:
    res = alpha_star(Sin(1.0), 3.0, math.pi)
    closed = math.pi / math.sqrt(64.0 + 9.0 * math.pi ** 2)
    err = abs(res.alpha2 - closed)
    dens = ld_dense_check(res.E_star, math.pi / 2, math.pi / 4)
    residual = abs(res.alpha2 / math.sqrt(res.C2 ** 2 - res.alpha2 ** 2 * 9.0) - math.pi / 8)
    ok = err <= 1e-12 and dens.is_dense
    return CriterionResult(8, "alpha* for sin(x), s = 3 and density of E*", ok,
                           {"alpha2": res.alpha2, "closed_form": closed, "error": err,
                            "defining_equation_residual": residual, "alpha1": res.alpha1,
                            "density": dens.to_dict()})


def criterion_9(seed: int) -> CriterionResult:
    res = sharpness_search(Sin(1.0), 2.0, 1.0, basis_size=4, iterations=2000, seed=seed)
    ok = 2.9 <= res.ratio <= 3.0 * (1 + 1e-6)
    return CriterionResult(9, "sharpness search approaches the constant 3", ok,
                           {"ratio": res.ratio, "constant": res.constant, "restarts": res.restarts})


def criterion_10(seed: int) -> CriterionResult:
    rng = _rng(seed, 10)
    worst_centre = 0.0
    worst_excess = -math.inf
    for _ in range(20):
        sigma = float(rng.uniform(0.5, 3.0))
        f = random_trig_poly(rng, sigma, 4)
        delta = float(rng.uniform(0.05, 1.0))
        x_eps = float(rng.uniform(-5.0, 5.0))
        F = mollify(f, delta, x_eps)
        worst_centre = max(worst_centre, abs(float(F(x_eps)) - float(f(x_eps))))
        xs = np.linspace(x_eps - 50.0, x_eps + 50.0, 10_000)
        fv, Fv = np.abs(f(xs)), np.abs(F(xs))
        # rounding allowance of a few ulps of |f|
        excess = float(np.max(Fv - fv - 4 * np.finfo(float).eps * fv))
        worst_excess = max(worst_excess, excess)
    ok = worst_centre <= 1e-12 and worst_excess <= 0.0
    return CriterionResult(10, "mollifier keeps f(x_eps) and never exceeds |f|", ok,
                           {"max_centre_error": worst_centre, "max_excess": worst_excess})


CRITERIA: Tuple[Callable[[int], CriterionResult], ...] = (
    criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
    criterion_6, criterion_7, criterion_8, criterion_9, criterion_10,
)
TIME_LIMITS = {1: 1.0, 9: 30.0}


def run_criterion(number: int, seed: int = 42) -> CriterionResult:
    t0 = time.perf_counter()
    res = CRITERIA[number - 1](seed)
    res.elapsed = time.perf_counter() - t0
    limit = TIME_LIMITS.get(number)
    if limit is not None and res.elapsed >= limit:
        res.passed = False
    return res


def run_battery(seed: int = 42, numbers: Sequence[int] = tuple(range(1, 11))) -> List[CriterionResult]:
    return [run_criterion(n, seed) for n in numbers]
