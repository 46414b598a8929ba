"""Inequality checks and equality-case diagnosis.

Each check returns a :class:`Certificate` comparing ``lhs`` with
``constant * rhs_norm``.  ``margin = constant * rhs_norm.lo - lhs.hi`` is the
rigorous direction: a positive margin with certified enclosures proves the
inequality for that instance.  Since the inequalities are theorems, a
negative margin beyond tolerance on certified data points at a bug here.
"""
from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass, field, replace
from typing import Any, Dict, Optional, Sequence, Tuple, Union

import numpy as np

from .expr import Const, Cos, ExpTypeFn, Sin, add, mul, poly, scale
from .norms import ConsistencyError, Enclosure, GridSpec, inf_quadratic, real_zeros, sup_norm

EQUALITY_RTOL = 1e-6
_TYPE_SLACK = 1e-12


class Inequality(str, enum.Enum):
    RS_CLASSIC = "RS_CLASSIC"
    RS_TRIG = "RS_TRIG"
    SCHUR_POLY = "SCHUR_POLY"
    MAIN = "MAIN"
    COR_SIN = "COR_SIN"
    COR_X = "COR_X"
    DUFFIN_SCHAEFFER = "DUFFIN_SCHAEFFER"


class Verdict(str, enum.Enum):
    HOLDS_CERTIFIED = "HOLDS_CERTIFIED"
    HOLDS_OBSERVED = "HOLDS_OBSERVED"
    EQUALITY_WITHIN_TOL = "EQUALITY_WITHIN_TOL"
    VIOLATION_SUSPECTED = "VIOLATION_SUSPECTED"


class HypothesisError(ValueError):
    """An input violates a hypothesis of the inequality being checked."""

    def __init__(self, condition: str, message: str):
        super().__init__(f"{condition}: {message}")
        self.condition = condition


@dataclass(frozen=True)
class EqualityDiagnosis:
    x0: float
    fprime_at_x0: float
    fitted_S: float
    fitted_C: float
    residual_sup: float
    qf_at_x0: float = 0.0
    qf_norm: float = 0.0
    attains_qf_norm: bool = False
    fit_failed: bool = False

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        return cls(**d)


@dataclass(frozen=True)
class Certificate:
    inequality_id: Inequality
    lhs: Enclosure
    constant: float
    rhs_norm: Enclosure
    margin: float
    verdict: Verdict
    equality_diag: Optional[EqualityDiagnosis] = None
    details: Dict[str, Any] = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return self.verdict is not Verdict.VIOLATION_SUSPECTED

    @property
    def ratio(self) -> float:
        """Observed ``lhs / (constant * rhs)``; 1 at equality."""
        denom = self.constant * self.rhs_norm.lo
        return self.lhs.lo / denom if denom > 0 else math.inf

    def to_dict(self):
        return {
            "inequality_id": self.inequality_id.value,
            "lhs": self.lhs.to_dict(),
            "constant": self.constant,
            "rhs_norm": self.rhs_norm.to_dict(),
            "margin": self.margin,
            "verdict": self.verdict.value,
            "equality_diag": self.equality_diag.to_dict() if self.equality_diag else None,
            "details": self.details,
        }

    @classmethod
    def from_dict(cls, d):
        diag = d.get("equality_diag")
        return cls(
            inequality_id=Inequality(d["inequality_id"]),
            lhs=Enclosure.from_dict(d["lhs"]),
            constant=d["constant"],
            rhs_norm=Enclosure.from_dict(d["rhs_norm"]),
            margin=d["margin"],
            verdict=Verdict(d["verdict"]),
            equality_diag=EqualityDiagnosis.from_dict(diag) if diag else None,
            details=d.get("details", {}),
        )


def judge(lhs: Enclosure, constant: float, rhs: Enclosure,
          rtol: float = EQUALITY_RTOL) -> Tuple[float, Verdict, str]:
    """Margin, verdict and an explanatory note for ``lhs <= constant * rhs``."""
    margin = constant * rhs.lo - lhs.hi
    tol = rtol * constant * rhs.lo
    both = lhs.certified and rhs.certified
    if rhs.unbounded_suspected:
        return margin, Verdict.HOLDS_OBSERVED, "right side unbounded; inequality is vacuous"
    if abs(margin) <= tol:
        return margin, Verdict.EQUALITY_WITHIN_TOL, ""
    if margin < -tol:
        if not both:
            return margin, Verdict.HOLDS_OBSERVED, "inconclusive: negative margin on uncertified data"
        if lhs.lo - constant * rhs.hi <= tol:
            # the enclosures overlap, so the data cannot decide either way
            return margin, Verdict.HOLDS_OBSERVED, "inconclusive: enclosures too wide to separate"
        return margin, Verdict.VIOLATION_SUSPECTED, "certified margin is negative"
    if both:
        return margin, Verdict.HOLDS_CERTIFIED, ""
    return margin, Verdict.HOLDS_OBSERVED, "at least one enclosure is not certified"


def _notes(*items: str):
    return [s for s in items if s]


# ---------------------------------------------------------------------------
# weighted inequality checks
# ---------------------------------------------------------------------------


def main_constant(Q: ExpTypeFn, sigma: float, tau: float,
                  grid: Optional[GridSpec] = None) -> Tuple[float, Enclosure]:
    """``(sigma + tau) * A_{sigma+tau}(Q)**-1/2`` and the enclosure of ``A``."""
    A = inf_quadratic(Q, sigma + tau, grid)
    if A.lo <= 1e-12:
        raise HypothesisError(
            "positive A_s(Q)",
            f"A_{sigma + tau:g}(Q) enclosure [{A.lo:.3g}, {A.hi:.3g}] contains 0",
        )
    return (sigma + tau) / math.sqrt(A.lo), A


def _check_hypotheses(Q: ExpTypeFn, f: ExpTypeFn, sigma: float, tau: float, grid):
    if not sigma > 0:
        raise HypothesisError("sigma > 0", f"got sigma={sigma}")
    if not tau >= 0:
        raise HypothesisError("tau >= 0", f"got tau={tau}")
    if Q.sharp_type_bound > tau * (1 + _TYPE_SLACK) + _TYPE_SLACK:
        raise HypothesisError("Q in B_tau", f"type of Q is {Q.sharp_type_bound:g} > tau={tau:g}")
    if f.sharp_type_bound > sigma * (1 + _TYPE_SLACK) + _TYPE_SLACK:
        raise HypothesisError("f in B_sigma", f"type of f is {f.sharp_type_bound:g} > sigma={sigma:g}")
    zs = real_zeros(Q, grid=grid)
    if not zs.separation > 0:
        raise HypothesisError("separated real zeros", "real zeros of Q are not separated")
    return zs


def check_main(Q: ExpTypeFn, f: ExpTypeFn, sigma: float, tau: float,
               grid: Optional[GridSpec] = None, diagnose: bool = True,
               inequality_id: Inequality = Inequality.MAIN,
               constant: Optional[float] = None) -> Certificate:
    """``|f(x)| <= (sigma+tau) A_{sigma+tau}(Q)^{-1/2} ||Q f||`` for all real x."""
    grid = grid or GridSpec()
    zs = _check_hypotheses(Q, f, sigma, tau, grid)
    general, A = main_constant(Q, sigma, tau, grid)
    C = general if constant is None else constant
    lhs = sup_norm(f, grid)
    rhs = sup_norm(mul(Q, f), grid)
    margin, verdict, note = judge(lhs, C, rhs)
    details = {
        "sigma": sigma,
        "tau": tau,
        "Q": Q.to_source(),
        "f": f.to_source(),
        "A": A.to_dict(),
        "general_constant": general,
        "zero_separation": zs.separation,
        "notes": _notes(note, lhs.note, rhs.note),
    }
    diag = None
    if diagnose and verdict is Verdict.EQUALITY_WITHIN_TOL:
        diag = diagnose_equality(Q, f, sigma, tau, lhs.witness, grid, qf_norm=rhs)
    return Certificate(inequality_id, lhs, C, rhs, margin, verdict, diag, details)


def check_cor_sin(f: ExpTypeFn, sigma: float, tau: float,
                  grid: Optional[GridSpec] = None) -> Certificate:
    """``|f(x)| <= (sigma/tau + 1) ||sin(tau t) f(t)||``."""
    if not tau > 0:
        raise HypothesisError("tau > 0", f"got tau={tau}")
    C = sigma / tau + 1
    cert = check_main(Sin(float(tau)), f, sigma, tau, grid,
                      inequality_id=Inequality.COR_SIN, constant=C)
    general = cert.details["general_constant"]
    if abs(general - C) > 1e-9 * C:
        raise ConsistencyError(f"general constant {general!r} disagrees with sigma/tau+1={C!r}")
    return cert


def check_cor_x(f: ExpTypeFn, sigma: float, grid: Optional[GridSpec] = None) -> Certificate:
    """``|f(x)| <= sigma ||t f(t)||``."""
    C = float(sigma)
    cert = check_main(poly([0.0, 1.0]), f, sigma, 0.0, grid,
                      inequality_id=Inequality.COR_X, constant=C)
    general = cert.details["general_constant"]
    if abs(general - C) > 1e-9 * C:
        raise ConsistencyError(f"general constant {general!r} disagrees with sigma={C!r}")
    return cert


def _test_grid(g: ExpTypeFn, grid: GridSpec) -> np.ndarray:
    W, h = grid.resolve(g)
    P = g.period
    if P:
        n = max(16, int(math.ceil(P / h)))
        return -0.5 * P + P * np.arange(n) / n
    return np.linspace(-W, W, int(math.ceil(2 * W / h)) + 1)


def check_duffin_schaeffer(g: ExpTypeFn, gamma: float,
                           grid: Optional[GridSpec] = None) -> Certificate:
    """``g'(x)^2 + gamma^2 g(x)^2 <= gamma^2 ||g||^2`` for real bounded ``g`` of type gamma."""
    grid = grid or GridSpec()
    if g.sharp_type_bound > gamma * (1 + _TYPE_SLACK) + _TYPE_SLACK:
        raise HypothesisError("g in B_gamma", f"type {g.sharp_type_bound:g} > gamma={gamma:g}")
    S = sup_norm(g, grid)
    if not S.certified:
        raise HypothesisError("g bounded", "sup norm of g could not be certified")
    dg = g.derivative
    xs = _test_grid(g, grid)
    pointwise = dg(xs) ** 2 + gamma ** 2 * g(xs) ** 2
    bound = gamma ** 2 * S.hi ** 2
    gaps = bound - pointwise
    eq_tol = 1e-9 * max(bound, 1e-300)
    energy = add(mul(dg, dg), scale(gamma ** 2, mul(g, g)))
    lhs = sup_norm(energy, grid)
    rhs = Enclosure(S.lo ** 2, S.hi ** 2, S.witness, S.certified)
    margin, verdict, note = judge(lhs, gamma ** 2, rhs)
    everywhere = bool(np.all(np.abs(gaps) <= eq_tol))
    # the sup of the left side always touches gamma^2 ||g||^2 where |g| peaks,
    # so equality is only meaningful pointwise
    if verdict is Verdict.EQUALITY_WITHIN_TOL and not everywhere:
        verdict = Verdict.HOLDS_CERTIFIED if lhs.certified and rhs.certified else Verdict.HOLDS_OBSERVED
        note = "sup attained where |g| peaks; strict pointwise gap elsewhere"
    details = {
        "gamma": gamma,
        "g": g.to_source(),
        "grid_points": int(len(xs)),
        "min_pointwise_gap": float(np.min(gaps)),
        "argmin_pointwise_gap": float(xs[int(np.argmin(gaps))]),
        "max_pointwise_gap": float(np.max(gaps)),
        "equality_everywhere": everywhere,
        "notes": _notes(note),
    }
    return Certificate(Inequality.DUFFIN_SCHAEFFER, lhs, gamma ** 2, rhs, margin, verdict, None, details)


# ---------------------------------------------------------------------------
# classical Riesz-Schur inequalities on compact sets
# ---------------------------------------------------------------------------


def chebyshev_lift(coeffs: Sequence[float]) -> ExpTypeFn:
    """``theta -> P(cos theta)`` as a cosine polynomial (ascending power coefficients)."""
    b = np.polynomial.chebyshev.poly2cheb(np.asarray(coeffs, dtype=float))
    terms = [Const(float(b[0]))] + [scale(float(bk), Cos(float(k))) for k, bk in enumerate(b) if k]
    return add(*terms)


def trig_from_coeffs(cos_coeffs: Sequence[float], sin_coeffs: Sequence[float] = ()) -> ExpTypeFn:
    """``a_0 + sum_k a_k cos(k t) + b_k sin(k t)``; ``sin_coeffs[0]`` multiplies ``sin(t)``."""
    terms = [Const(float(cos_coeffs[0]))] if len(cos_coeffs) else []
    terms += [scale(float(a), Cos(float(k))) for k, a in enumerate(cos_coeffs) if k]
    terms += [scale(float(b), Sin(float(k + 1))) for k, b in enumerate(sin_coeffs)]
    return add(*terms)


SchurInput = Union[ExpTypeFn, Sequence[float], Tuple[Sequence[float], Sequence[float]]]


def check_classic_schur(kind: Union[str, Inequality], data: SchurInput, n: int,
                        grid: Optional[GridSpec] = None) -> Certificate:
    """The three classical inequalities with constant ``n + 1``.

    ``kind`` is RS_CLASSIC (weight ``sqrt(1-t^2)`` on [-1,1]), SCHUR_POLY
    (weight ``t`` on [-1,1]) or RS_TRIG (weight ``sin t`` on one period).
    Algebraic data are ascending power coefficients and are handled through
    ``t = cos(theta)``, which turns both norms into sup norms of cosine
    polynomials over a full period.  For SCHUR_POLY with odd ``n`` the
    refined constant ``n`` is also evaluated (``details['refined']``).
    """
    kind = Inequality(kind if isinstance(kind, str) else kind.value)
    grid = grid or GridSpec()
    if kind in (Inequality.RS_CLASSIC, Inequality.SCHUR_POLY):
        coeffs = np.trim_zeros(np.asarray(data, dtype=float), "b")
        if len(coeffs) - 1 > n:
            raise HypothesisError("P in P_n", f"degree {len(coeffs) - 1} > n={n}")
        base = chebyshev_lift(coeffs if len(coeffs) else [0.0])
        weight = Sin(1.0) if kind is Inequality.RS_CLASSIC else Cos(1.0)
        source = {"P": [float(c) for c in coeffs]}
    elif kind is Inequality.RS_TRIG:
        if isinstance(data, ExpTypeFn):
            base = data
        else:
            cos_c, sin_c = data
            base = trig_from_coeffs(cos_c, sin_c)
        if base.sharp_type_bound > n + _TYPE_SLACK:
            raise HypothesisError("T in T_n", f"degree {base.sharp_type_bound:g} > n={n}")
        P = base.raw_period
        if P is None or (P and abs(2 * math.pi / P - round(2 * math.pi / P)) > 1e-9):
            raise HypothesisError("T in T_n", "T is not 2*pi-periodic")
        weight = Sin(1.0)
        source = {"T": base.to_source()}
    else:
        raise ValueError(f"not a classical inequality: {kind}")
    lhs = sup_norm(base, grid)
    rhs = sup_norm(mul(weight, base), grid)
    C = float(n + 1)
    margin, verdict, note = judge(lhs, C, rhs)
    details: Dict[str, Any] = {"n": n, **source, "notes": _notes(note)}
    if kind is Inequality.SCHUR_POLY and n % 2 == 1:
        m2, v2, _ = judge(lhs, float(n), rhs)
        details["refined"] = {"constant": float(n), "margin": m2, "verdict": v2.value}
    return Certificate(kind, lhs, C, rhs, margin, verdict, None, details)


# ---------------------------------------------------------------------------
# equality case
# ---------------------------------------------------------------------------


def diagnose_equality(Q: ExpTypeFn, f: ExpTypeFn, sigma: float, tau: float, x0: float,
                      grid: Optional[GridSpec] = None,
                      qf_norm: Optional[Enclosure] = None,
                      max_retries: int = 5) -> EqualityDiagnosis:
    """Explain an equality point ``x0``.

    Either ``|Qf(x0)| = ||Qf||`` or ``Qf = S sin(w x) + C cos(w x)`` with
    ``w = sigma + tau``; both branches are evaluated.  ``S`` and ``C`` come
    from a 2x2 solve at two nodes a quarter period apart (shifted and
    retried if the system is ill-conditioned).
    """
    grid = grid or GridSpec()
    w = sigma + tau
    g = mul(Q, f)
    norm = qf_norm if qf_norm is not None else sup_norm(g, grid)
    fp = f.derivative(float(x0))
    gx0 = g(float(x0))
    attains = abs(gx0) >= norm.lo * (1 - EQUALITY_RTOL)
    S = Cc = math.nan
    failed = True
    for attempt in range(max_retries + 1):
        x1 = x0 + 0.3 * attempt / w
        x2 = x1 + 0.5 * math.pi / w
        M = np.array([[math.sin(w * x1), math.cos(w * x1)], [math.sin(w * x2), math.cos(w * x2)]])
        if np.linalg.cond(M) >= 1e3:
            continue
        S, Cc = np.linalg.solve(M, np.array([g(x1), g(x2)]))
        failed = False
        break
    if failed:
        resid = math.inf
    else:
        xs = _residual_grid(g, w, grid)
        resid = float(np.max(np.abs(g(xs) - S * np.sin(w * xs) - Cc * np.cos(w * xs))))
    return EqualityDiagnosis(float(x0), float(fp), float(S), float(Cc), resid,
                             float(gx0), float(norm.lo), bool(attains), failed)


def _residual_grid(g: ExpTypeFn, w: float, grid: GridSpec) -> np.ndarray:
    W, h = grid.resolve(g)
    h = min(h, 0.1 / w)
    return np.linspace(-W, W, int(math.ceil(2 * W / h)) + 1)
