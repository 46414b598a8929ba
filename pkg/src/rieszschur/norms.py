"""Sup norms, the quadratic infimum ``A_s(Q)`` and real zeros on the line.

Certification works cell by cell.  For a bounded real ``f`` of exponential
type ``g``, Bernstein's inequality gives ``|f'''| <= g**3 * S`` with
``S = sup |f|``.  On a cell of radius ``r`` around ``c`` the quadratic Taylor
model ``q(t) = f(c) + f'(c) t + f''(c) t**2/2`` therefore satisfies

    |f(c + t)| <= max_{|t|<=r} |q(t)| + g**3 r**3 S / 6,

and taking the worst cell gives ``S <= max_c P_c / (1 - g**3 r_c**3 / 6)``.
Cells whose bound is not yet within tolerance of the observed maximum are
bisected (branch and bound), so the certified upper bound ends up within
``~1e-11`` relative of the attained value.  Everything is floating point;
no interval arithmetic is attempted.
"""
from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import brentq

from .expr import Const, ExpTypeFn, Poly, Var, mul

log = logging.getLogger(__name__)

SUP_RTOL = 1e-11
INF_RTOL = 1e-12
MAX_DEPTH = 40
MAX_EVALS = 2_000_000
_TIE_ULPS = 4
_PAD = 1e-14


class ConsistencyError(RuntimeError):
    """A computed quantity contradicts a proved property (signals a bug)."""


@dataclass(frozen=True)
class GridSpec:
    """Window half-width, base step and refinement policy.

    ``window``/``step`` left as None follow the default rule
    ``W = max(50, 10 periods)``, ``h = min(0.01, 0.1/max(1, type))``.
    """

    window: Optional[float] = None
    step: Optional[float] = None
    refine_iters: int = 30
    bernstein_slack: bool = True

    def resolve(self, f: ExpTypeFn) -> Tuple[float, float]:
        gamma = f.sharp_type_bound
        h = self.step if self.step is not None else min(0.01, 0.1 / max(1.0, gamma))
        if self.window is not None:
            W = float(self.window)
        else:
            P = f.period
            W = max(50.0, 10 * P) if P else 50.0
        if self.bernstein_slack and gamma * h >= 1:
            raise ValueError(f"step {h} too coarse for type {gamma}: need type*step < 1")
        return W, h

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class Enclosure:
    """``lo <= true value <= hi``; ``witness`` is where ``lo`` was observed."""

    lo: float
    hi: float
    witness: float
    certified: bool
    window_limited: bool = False
    unbounded_suspected: bool = False
    note: str = ""

    def __post_init__(self):
        if not self.lo <= self.hi:
            raise ValueError(f"empty enclosure [{self.lo}, {self.hi}]")

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def contains(self, v: float, tol: float = 0.0) -> bool:
        return self.lo - tol <= v <= self.hi + tol

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        return cls(**d)


@dataclass(frozen=True)
class ZeroSet:
    zeros: Tuple[float, ...]
    separation: float
    window_limited: bool
    multiplicity_suspect: Tuple[float, ...] = ()
    window: Tuple[float, float] = (-math.inf, math.inf)

    def to_dict(self):
        d = asdict(self)
        d["zeros"] = list(self.zeros)
        d["multiplicity_suspect"] = list(self.multiplicity_suspect)
        d["window"] = list(self.window)
        return d


# ---------------------------------------------------------------------------
# Taylor-model branch and bound
# ---------------------------------------------------------------------------


def _quad_extremes(v0, v1, v2, r):
    """Max |q| and min q of ``q(t) = v0 + v1 t + v2 t^2/2`` on ``[-r, r]``."""
    qm = v0 - v1 * r + 0.5 * v2 * r * r
    qp = v0 + v1 * r + 0.5 * v2 * r * r
    with np.errstate(divide="ignore", invalid="ignore"):
        ts = np.where(v2 != 0, -v1 / v2, 0.0)
    inside = (v2 != 0) & (np.abs(ts) <= r)
    qs = np.where(inside, v0 + v1 * ts + 0.5 * v2 * ts * ts, qm)
    absmax = np.maximum(np.maximum(np.abs(qm), np.abs(qp)), np.abs(qs))
    qmin = np.minimum(np.minimum(qm, qp), qs)
    return absmax, qmin


class _Best:
    """Running extremum with leftmost tie-breaking."""

    def __init__(self, sense: int):
        self.sense = sense  # +1 tracks a maximum, -1 a minimum
        self.value = -math.inf if sense > 0 else math.inf
        self.x = math.nan

    def offer(self, xs: np.ndarray, vals: np.ndarray):
        if len(vals) == 0:
            return
        key = self.sense * np.asarray(vals)
        m = float(np.max(key))
        tol = _TIE_ULPS * np.finfo(float).eps * abs(m)
        xt = float(np.min(np.asarray(xs)[key >= m - tol]))
        cur = self.sense * self.value
        if m > cur + tol:
            self.value, self.x = self.sense * m, xt
        elif m >= cur - tol:
            if m > cur:
                self.value = self.sense * m
            if xt < self.x:
                self.x = xt


def _newton_polish(xs, d1, d2, a, b, iters, objective, sense):
    """Newton on the derivative from several starts; returns (x, value) arrays."""
    x = np.array(xs, dtype=float)
    if len(x) == 0:
        return x, x
    best_x = x.copy()
    best_v = objective(x)
    for _ in range(iters):
        g1, g2 = d1(x), d2(x)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = np.where(g2 != 0, g1 / g2, 0.0)
        x = np.clip(x - step, a, b)
        v = objective(x)
        better = sense * v > sense * best_v
        best_x = np.where(better, x, best_x)
        best_v = np.where(better, v, best_v)
        if np.all(np.abs(step) < 1e-15 * (1 + np.abs(x))):
            break
    return best_x, best_v


def _cells(a: float, b: float, h: float):
    n = max(1, int(math.ceil((b - a) / h)))
    width = (b - a) / n
    centers = a + (np.arange(n) + 0.5) * width
    return centers, 0.5 * width


def _bnb_sup_abs(f: ExpTypeFn, a: float, b: float, h: float, gamma: float, iters: int):
    """Certified ``sup_{[a,b]} |f|`` assuming ``f`` bounded on R of type ``gamma``.

    Returns ``(lo, witness, hi_cells)`` where ``hi_cells`` bounds |f| on the
    window in terms of the global sup (see module docstring).
    """
    f1, f2 = f.derivative, f.derivative.derivative
    kappa = gamma ** 3 / 6.0
    best = _Best(+1)
    centers, r = _cells(a, b, h)
    hi_done = 0.0
    evals = 0
    depth = 0
    polished = False
    while len(centers):
        v0, v1, v2 = f(centers), f1(centers), f2(centers)
        evals += len(centers)
        best.offer(centers, np.abs(v0))
        absmax, _ = _quad_extremes(v0, v1, v2, r)
        denom = 1.0 - kappa * r ** 3
        if denom <= 0:
            raise ValueError("cells too wide for the Bernstein remainder")
        bound = absmax / denom
        if not polished:
            # polish the most promising cells first so the threshold is tight
            k = min(len(centers), 32)
            idx = np.argsort(-bound)[:k]
            xs, vs = _newton_polish(
                centers[idx], f1, f2, a, b, iters, lambda t: np.abs(f(t)), +1
            )
            best.offer(xs, vs)
            polished = True
        thresh = best.value * (1 + SUP_RTOL) + 1e-300
        keep = bound > thresh
        if (~keep).any():
            hi_done = max(hi_done, float(np.max(bound[~keep])))
        if not keep.any():
            break
        if depth >= MAX_DEPTH or evals >= MAX_EVALS:
            hi_done = max(hi_done, float(np.max(bound[keep])))
            break
        c = centers[keep]
        r = 0.5 * r
        centers = np.concatenate([c - r, c + r])
        centers.sort()
        depth += 1
    # final polish around the incumbent
    xs, vs = _newton_polish([best.x], f1, f2, a, b, iters, lambda t: np.abs(f(t)), +1)
    best.offer(xs, vs)
    hi = max(hi_done, best.value) * (1 + _PAD)
    return best.value, best.x, hi


def _grid_max_abs(f: ExpTypeFn, a: float, b: float, h: float) -> Tuple[float, float]:
    xs = np.linspace(a, b, max(2, int(math.ceil((b - a) / h)) + 1))
    v = np.abs(f(xs))
    i = int(np.argmax(v))
    return float(v[i]), float(xs[i])


def _growth_ratio(f: ExpTypeFn, W: float, h: float) -> Tuple[float, ...]:
    ms = [_grid_max_abs(f, -W * 2 ** k, W * 2 ** k, h)[0] for k in range(3)]
    return tuple(ms)


def sup_norm(f: ExpTypeFn, grid: Optional[GridSpec] = None) -> Enclosure:
    """Enclosure of ``sup_{x in R} |f(x)|``."""
    grid = grid or GridSpec()
    W, h = grid.resolve(f)
    gamma = f.sharp_type_bound
    if f.is_constant:
        v = abs(f(0.0))
        return Enclosure(v, v, 0.0, True)
    env = f.envelope
    P = f.period
    if P:
        a, b = -0.5 * P, 0.5 * P
        tail = 0.0
    elif env.bounded:
        if grid.window is None and env.decaying:
            est, _ = _grid_max_abs(f, -W, W, h)
            if est > 0:
                need = env.s + (env.M / est) ** (1.0 / env.p) * 1.05
                W = max(W, min(need, 4000.0))
        elif grid.window is None and env.g > 0 and env.tail(max(W, env.R)) > 0:
            # bounded but not decaying: widen until the offset factor
            # (W/(W-s))^g costs at most 0.1% over the coefficient bound
            est, _ = _grid_max_abs(f, -W, W, h)
            if env.tail(max(W, env.R)) > est * 1.001:
                need = env.s / (1.0 - 1.001 ** (-1.0 / env.g))
                W = max(W, min(need, 4000.0))
        W = max(W, env.R)
        a, b = -W, W
        tail = env.tail(W)
    else:
        return _sup_unbounded(f, W, h, grid.refine_iters)

    if not grid.bernstein_slack:
        lo, x = _grid_max_abs(f, a, b, h)
        return Enclosure(lo, lo, x, False, window_limited=not P, note="observed grid maximum")
    lo, x, hi_cells = _bnb_sup_abs(f, a, b, h, gamma, grid.refine_iters)
    hi = max(hi_cells, tail)
    note = ""
    if tail > hi_cells:
        note = f"tail bound {tail:.6g} beyond |x|>={W:g} dominates"
    return Enclosure(lo, max(hi, lo), x, True, note=note)


def _sup_unbounded(f: ExpTypeFn, W: float, h: float, iters: int) -> Enclosure:
    m = _growth_ratio(f, W, h)
    lo, x = _grid_max_abs(f, -W, W, h)
    grows = m[0] > 0 and m[1] >= 1.8 * m[0] and m[2] >= 1.8 * m[1]
    if grows:
        return Enclosure(lo, math.inf, x, False, window_limited=True, unbounded_suspected=True,
                         note="window maxima grow at least linearly; sup is infinite")
    return Enclosure(lo, lo, x, False, window_limited=True,
                     note="growth envelope unbounded; observed window maximum only")


# ---------------------------------------------------------------------------
# A_s(Q) = inf_t Q'(t)^2 + s^2 Q(t)^2
# ---------------------------------------------------------------------------


def _is_polynomial(f: ExpTypeFn) -> bool:
    return isinstance(f, (Const, Var, Poly))


def _poly_coeffs(f: ExpTypeFn) -> np.ndarray:
    if isinstance(f, Const):
        return np.array([float(f.c)])
    if isinstance(f, Var):
        return np.array([0.0, 1.0])
    return np.array(f.coeffs)


def _inf_quadratic_poly(Q: ExpTypeFn, s: float) -> Enclosure:
    P = np.polynomial.polynomial
    q = _poly_coeffs(Q)
    dq = P.polyder(q) if len(q) > 1 else np.array([0.0])
    phi = P.polyadd(P.polymul(dq, dq), s * s * P.polymul(q, q))
    phi = np.trim_zeros(phi, "b")
    if len(phi) <= 1:
        v = float(phi[0]) if len(phi) else 0.0
        return Enclosure(v, v, 0.0, True)
    dphi, d2phi = P.polyder(phi), P.polyder(phi, 2)
    crit = P.polyroots(dphi)
    xs = np.real(crit[np.abs(np.imag(crit)) <= 1e-7 * (1 + np.abs(crit))])
    for _ in range(8):
        with np.errstate(divide="ignore", invalid="ignore"):
            g2 = P.polyval(xs, d2phi)
            xs = xs - np.where(g2 != 0, P.polyval(xs, dphi) / g2, 0.0)
    vals = P.polyval(xs, phi)
    best = _Best(-1)
    best.offer(xs, vals)
    v = max(best.value, 0.0)
    return Enclosure(v, v, best.x, True, note="exact polynomial critical points")


class _Quadratic:
    """``phi = Q'^2 + s^2 Q^2`` with its first two derivatives."""

    def __init__(self, Q: ExpTypeFn, s: float):
        self.s2 = s * s
        self.q = [Q, Q.derivative, Q.derivative.derivative, Q.derivative.derivative.derivative]

    def values(self, x):
        q0, q1, q2, q3 = (g(x) for g in self.q)
        s2 = self.s2
        phi = q1 * q1 + s2 * q0 * q0
        d1 = 2 * q1 * q2 + 2 * s2 * q0 * q1
        d2 = 2 * q2 * q2 + 2 * q1 * q3 + 2 * s2 * (q1 * q1 + q0 * q2)
        return phi, d1, d2


def _bnb_inf(obj: _Quadratic, a: float, b: float, h: float, K: float, iters: int):
    """Certified lower bound for ``inf_[a,b] phi`` given ``|phi'''| <= K``."""
    best = _Best(-1)
    centers, r = _cells(a, b, h)
    lo_done = math.inf
    evals, depth, polished = 0, 0, False
    while len(centers):
        v0, v1, v2 = obj.values(centers)
        evals += len(centers)
        best.offer(centers, v0)
        _, qmin = _quad_extremes(v0, v1, v2, r)
        lower = qmin - K * r ** 3 / 6.0
        if not polished:
            k = min(len(centers), 32)
            idx = np.argsort(lower)[:k]
            xs, vs = _newton_polish(
                centers[idx],
                lambda t: obj.values(t)[1],
                lambda t: obj.values(t)[2],
                a, b, iters, lambda t: obj.values(t)[0], -1,
            )
            best.offer(xs, vs)
            polished = True
        tol = INF_RTOL * max(1.0, abs(best.value)) + 1e-300
        keep = lower < best.value - tol
        if (~keep).any():
            lo_done = min(lo_done, float(np.min(lower[~keep])))
        if not keep.any():
            break
        if depth >= MAX_DEPTH or evals >= MAX_EVALS:
            lo_done = min(lo_done, float(np.min(lower[keep])))
            break
        c = centers[keep]
        r = 0.5 * r
        centers = np.concatenate([c - r, c + r])
        centers.sort()
        depth += 1
    lo = min(lo_done, best.value)
    lo -= _PAD * max(1.0, abs(lo))
    return max(lo, 0.0), best.value, best.x


def inf_quadratic(Q: ExpTypeFn, s: float, grid: Optional[GridSpec] = None,
                  q_norm: Optional[Enclosure] = None) -> Enclosure:
    """Enclosure of ``A_s(Q) = inf_t Q'(t)^2 + s^2 Q(t)^2`` over the real line."""
    if s < 0:
        raise ValueError("s must be non-negative")
    grid = grid or GridSpec()
    if _is_polynomial(Q):
        return _inf_quadratic_poly(Q, s)
    env, denv = Q.envelope, Q.derivative.envelope
    if env.decaying and denv.decaying:
        return Enclosure(0.0, 0.0, math.inf, True,
                         note="Q and Q' vanish at infinity, so the infimum is 0")
    W, h = grid.resolve(Q)
    gamma = Q.sharp_type_bound
    obj = _Quadratic(Q, s)
    P = Q.period
    if P:
        a, b = -0.5 * P, 0.5 * P
    else:
        a, b = -W, W
    if env.bounded and grid.bernstein_slack:
        qn = q_norm if q_norm is not None else sup_norm(Q, grid)
        phi_norm = (gamma ** 2 + s * s) * qn.hi ** 2
        K = (2 * gamma) ** 3 * phi_norm
        lo, hi, x = _bnb_inf(obj, a, b, h, K, grid.refine_iters)
        lo = min(lo, hi)
        if P:
            return Enclosure(lo, hi, x, True)
        return Enclosure(lo, hi, x, False, window_limited=True,
                         note=f"infimum over [{a:g}, {b:g}] only")
    xs = np.linspace(a, b, int(math.ceil((b - a) / h)) + 1)
    phi = obj.values(xs)[0]
    best = _Best(-1)
    best.offer(xs, phi)
    return Enclosure(best.value, best.value, best.x, False, window_limited=True,
                     note="observed grid minimum on the window")


def a_s_profile(Q: ExpTypeFn, s_values: Sequence[float], grid: Optional[GridSpec] = None,
                tol: float = 1e-9) -> List[Enclosure]:
    """``A_s(Q)`` along an ascending list of ``s``; checks monotonicity of ``lo``."""
    s_values = list(s_values)
    if any(b < a for a, b in zip(s_values, s_values[1:])):
        raise ValueError("s_values must be sorted ascending")
    grid = grid or GridSpec()
    qn = None
    if not _is_polynomial(Q) and Q.envelope.bounded:
        qn = sup_norm(Q, grid)
    out = [inf_quadratic(Q, s, grid, q_norm=qn) for s in s_values]
    for (s0, e0), (s1, e1) in zip(zip(s_values, out), zip(s_values[1:], out[1:])):
        if e1.lo < e0.lo - tol:
            raise ConsistencyError(
                f"A_s(Q) decreased from {e0.lo!r} (s={s0}) to {e1.lo!r} (s={s1})"
            )
    return out


def tail_maxima(Q: ExpTypeFn, decades: Sequence[int] = (1, 2, 3), h: Optional[float] = None):
    """``max |Q|`` on ``[10^k, 10^(k+1)]`` and on its mirror, per decade ``k``."""
    h = h or min(0.01, 0.1 / max(1.0, Q.sharp_type_bound))
    out = []
    for k in decades:
        lo, hi = 10.0 ** k, 10.0 ** (k + 1)
        hk = max(h, (hi - lo) / 200_000)
        right = _grid_max_abs(Q, lo, hi, hk)[0]
        left = _grid_max_abs(Q, -hi, -lo, hk)[0]
        out.append((k, right, left))
    return out


# ---------------------------------------------------------------------------
# real zeros
# ---------------------------------------------------------------------------


def _separation(zeros: Sequence[float]) -> float:
    if len(zeros) < 2:
        return 1.0
    return float(np.min(np.diff(np.asarray(zeros))))


def _dedupe(xs, tol=1e-9):
    out = []
    for x in sorted(xs):
        if not out or x - out[-1] > tol * (1 + abs(x)):
            out.append(x)
    return out


def _poly_zeros(Q: ExpTypeFn, window) -> ZeroSet:
    P = np.polynomial.polynomial
    q = np.trim_zeros(_poly_coeffs(Q), "b")
    roots = P.polyroots(q)
    real = np.sort(np.real(roots[np.abs(np.imag(roots)) <= 1e-7 * (1 + np.abs(roots))]))
    dq = P.polyder(q)
    for _ in range(6):
        with np.errstate(divide="ignore", invalid="ignore"):
            d = P.polyval(real, dq)
            real = real - np.where(d != 0, P.polyval(real, q) / d, 0.0)
    clusters: List[List[float]] = []
    for x in np.sort(real):
        if clusters and abs(x - clusters[-1][-1]) <= 1e-6 * (1 + abs(x)):
            clusters[-1].append(float(x))
        else:
            clusters.append([float(x)])
    simple = [c[0] for c in clusters if len(c) == 1]
    suspect = [float(np.mean(c)) for c in clusters if len(c) > 1]
    a, b = window if window is not None else (-math.inf, math.inf)
    simple = [z for z in simple if a <= z <= b]
    suspect = [z for z in suspect if a <= z <= b]
    if suspect:
        log.warning("multiple zeros excluded from separation: %s", suspect)
    return ZeroSet(tuple(simple), _separation(simple), False, tuple(suspect), (a, b))


def real_zeros(Q: ExpTypeFn, window: Optional[Tuple[float, float]] = None,
               grid: Optional[GridSpec] = None) -> ZeroSet:
    """Real zeros of ``Q`` and their minimal separation ``d`` (1 if fewer than two)."""
    grid = grid or GridSpec()
    if window is not None:
        window = (float(window[0]), float(window[1]))
    if Q.is_constant:
        if Q(0.0) == 0:
            raise ValueError("Q vanishes identically")
        w = window or (-math.inf, math.inf)
        return ZeroSet((), 1.0, False, (), w)
    if _is_polynomial(Q):
        return _poly_zeros(Q, window)
    W, h = grid.resolve(Q)
    P = Q.period
    if window is None:
        window = (-P, P) if P else (-W, W)
    window_limited = not P
    a, b = window
    n = max(2, int(math.ceil((b - a) / h)) + 1)
    xs = np.linspace(a, b, n)
    v = Q(xs)
    scale = max(float(np.max(np.abs(v))), 1e-300)
    if scale == 1e-300:
        raise ValueError("Q vanishes identically on the window")
    zeros: List[float] = []
    suspect: List[float] = []
    exact = np.nonzero(v == 0)[0]
    for i in exact:
        left = v[i - 1] if i > 0 else -v[i + 1]
        right = v[i + 1] if i < n - 1 else -v[i - 1]
        (zeros if left * right < 0 else suspect).append(float(xs[i]))
    for i in np.nonzero(v[:-1] * v[1:] < 0)[0]:
        zeros.append(brentq(Q, xs[i], xs[i + 1], xtol=1e-15, rtol=4 * np.finfo(float).eps))
    # local minima of |Q| that dip to ~0 without a sign change
    av = np.abs(v)
    interior = np.nonzero((av[1:-1] <= av[:-2]) & (av[1:-1] <= av[2:]) & (v[:-2] * v[2:] > 0))[0] + 1
    if len(interior):
        dQ, d2Q = Q.derivative, Q.derivative.derivative
        xm, _ = _newton_polish(xs[interior], dQ, d2Q, a, b, grid.refine_iters,
                               lambda t: -np.abs(Q(t)), +1)
        for x0 in xm:
            if abs(Q(x0)) <= 1e-10 * scale:
                suspect.append(float(x0))
    zeros = _dedupe(zeros)
    suspect = [s for s in _dedupe(suspect) if all(abs(s - z) > 1e-7 for z in zeros)]
    if suspect:
        log.warning("multiplicity-suspect zeros excluded from separation: %s", suspect)
    return ZeroSet(tuple(zeros), _separation(zeros), window_limited, tuple(suspect), window)


def product(Q: ExpTypeFn, f: ExpTypeFn) -> ExpTypeFn:
    return mul(Q, f)
