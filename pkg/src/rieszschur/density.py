"""Sublevel sets of a weight, (L, delta)-density, and the constant chain
that turns a lower bound on |Q| away from its zeros into a bound for f."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import brentq

from .catalog import random_trig_poly
from .certificates import HypothesisError
from .expr import ExpTypeFn, mul
from .norms import GridSpec, inf_quadratic, real_zeros, sup_norm

log = logging.getLogger(__name__)

Interval = Tuple[float, float]


def _normalize(intervals: Iterable[Sequence[float]], window: Interval) -> Tuple[Interval, ...]:
    lo, hi = window
    clipped = sorted((max(float(a), lo), min(float(b), hi)) for a, b in intervals)
    out: List[List[float]] = []
    for a, b in clipped:
        if b < a:
            continue
        if out and a <= out[-1][1]:
            out[-1][1] = max(out[-1][1], b)
        else:
            out.append([a, b])
    return tuple((a, b) for a, b in out)


@dataclass(frozen=True)
class IntervalSet:
    """Finite union of closed intervals inside ``window``, kept sorted and disjoint."""

    intervals: Tuple[Interval, ...]
    window: Interval

    def __post_init__(self):
        if not self.window[0] <= self.window[1]:
            raise ValueError(f"bad window {self.window}")
        object.__setattr__(self, "window", (float(self.window[0]), float(self.window[1])))
        object.__setattr__(self, "intervals", _normalize(self.intervals, self.window))

    @classmethod
    def full(cls, window: Interval) -> "IntervalSet":
        return cls(((window[0], window[1]),), window)

    @classmethod
    def empty(cls, window: Interval) -> "IntervalSet":
        return cls((), window)

    @property
    def measure(self) -> float:
        return math.fsum(b - a for a, b in self.intervals)

    @property
    def window_length(self) -> float:
        return self.window[1] - self.window[0]

    def complement(self) -> "IntervalSet":
        lo, hi = self.window
        gaps = []
        cur = lo
        for a, b in self.intervals:
            if a > cur:
                gaps.append((cur, a))
            cur = max(cur, b)
        if cur < hi:
            gaps.append((cur, hi))
        return IntervalSet(tuple(gaps), self.window)

    def contains_point(self, x: float) -> bool:
        return any(a <= x <= b for a, b in self.intervals)

    def contains(self, other: "IntervalSet") -> bool:
        """Interval-set containment ``other ⊆ self``."""
        return all(any(a <= c and d <= b for a, b in self.intervals) for c, d in other.intervals)

    def measure_in(self, a: float, b: float) -> float:
        """Lebesgue measure of the intersection with ``[a, b]``."""
        return math.fsum(max(0.0, min(hi, b) - max(lo, a)) for lo, hi in self.intervals)

    def mask(self, xs: np.ndarray) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        m = np.zeros(xs.shape, dtype=bool)
        for a, b in self.intervals:
            m |= (xs >= a) & (xs <= b)
        return m

    def to_json(self) -> List[List[float]]:
        return [[a, b] for a, b in self.intervals]

    @classmethod
    def from_json(cls, data, window: Interval) -> "IntervalSet":
        return cls(tuple((float(a), float(b)) for a, b in data), window)


@dataclass(frozen=True)
class DensityReport:
    L: float
    delta: float
    is_dense: bool
    worst_window_start: float
    worst_measure: float

    def to_dict(self):
        return dict(L=self.L, delta=self.delta, is_dense=self.is_dense,
                    worst_window_start=self.worst_window_start, worst_measure=self.worst_measure)


@dataclass(frozen=True)
class Component:
    """One connected piece of ``{|Q| < alpha}`` within the window."""

    a: float
    b: float
    zeros: Tuple[float, ...]
    touches_edge: bool
    tangency: bool = False

    @property
    def length(self) -> float:
        return self.b - self.a


@dataclass(frozen=True)
class SublevelSet:
    alpha: float
    set: IntervalSet
    components: Tuple[Component, ...]
    tangency: bool

    @property
    def intervals(self):
        return self.set.intervals


def _grid(window: Interval, h: float) -> np.ndarray:
    a, b = window
    n = max(2, int(math.ceil((b - a) / h)) + 1)
    return np.linspace(a, b, n)


def sublevel_set(Q: ExpTypeFn, alpha: float, window: Interval,
                 grid: Optional[GridSpec] = None, zeros: Optional[Sequence[float]] = None,
                 tangency_rtol: float = 1e-9) -> SublevelSet:
    """``{x in window : |Q(x)| < alpha}`` with crossings of ``|Q| = alpha`` refined by brentq.

    A grid local minimum of ``|Q| - alpha`` that comes within ``tangency_rtol``
    of zero without a sign change is a possible tangency; a component of one
    grid step on each side is added there and the result is flagged.
    """
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    grid = grid or GridSpec()
    _, h = grid.resolve(Q)
    window = (float(window[0]), float(window[1]))
    xs = _grid(window, h)
    g = np.abs(Q(xs)) - alpha

    def gfun(t):
        return abs(float(Q(t))) - alpha

    below = g < 0
    ivs: List[List[float]] = []
    i, n = 0, len(xs)
    while i < n:
        if not below[i]:
            i += 1
            continue
        j = i
        while j + 1 < n and below[j + 1]:
            j += 1
        a = window[0] if i == 0 else brentq(gfun, xs[i - 1], xs[i], xtol=1e-15)
        b = window[1] if j == n - 1 else brentq(gfun, xs[j], xs[j + 1], xtol=1e-15)
        ivs.append([a, b])
        i = j + 1

    tangency = False
    interior = np.flatnonzero((g[1:-1] <= g[:-2]) & (g[1:-1] <= g[2:])) + 1
    for k in interior:
        if g[k] >= 0 and g[k] <= tangency_rtol * alpha:
            tangency = True
            ivs.append([xs[k] - h, xs[k] + h])
    if tangency:
        log.warning("possible tangency |Q| = %g; boundaries widened by one grid step", alpha)

    S = IntervalSet(tuple(map(tuple, ivs)), window)
    if zeros is None:
        # widen by a step so zeros sitting on the window edge are found
        zeros = real_zeros(Q, (window[0] - h, window[1] + h), grid).zeros
    comps = []
    for a, b in S.intervals:
        inside = tuple(z for z in zeros if a - 1e-12 * (1 + abs(a)) <= z <= b + 1e-12 * (1 + abs(b)))
        edge = a <= window[0] or b >= window[1]
        comps.append(Component(a, b, inside, edge, tangency and any(
            a <= xs[k] <= b and 0 <= g[k] <= tangency_rtol * alpha for k in interior)))
    return SublevelSet(float(alpha), S, tuple(comps), tangency)


def ld_dense_check(E: IntervalSet, L: float, delta: float) -> DensityReport:
    """Minimum of ``m(E ∩ [t, t+L])`` over every window ``[t, t+L]`` inside ``E.window``.

    The measure is piecewise linear in ``t`` with breakpoints at the
    endpoints shifted by 0 and ``-L``, so evaluating it at those points (and
    at the two extreme positions) gives the exact minimum.
    """
    if not (0 < delta <= L):
        raise ValueError("need 0 < delta <= L")
    lo, hi = E.window
    if hi - lo < L:
        raise ValueError(f"window of length {hi - lo} is shorter than L={L}")
    t_max = hi - L
    cands = {lo, t_max}
    for a, b in E.intervals:
        for t in (a, b, a - L, b - L):
            if lo <= t <= t_max:
                cands.add(t)
    worst_t, worst = lo, math.inf
    for t in sorted(cands):
        m = E.measure_in(t, t + L)
        if m < worst:
            worst_t, worst = t, m
    return DensityReport(float(L), float(delta), bool(worst >= delta - 1e-12), float(worst_t), float(worst))


@dataclass(frozen=True)
class AlphaStar:
    alpha_star: float
    E_star: IntervalSet
    alpha1: float
    alpha2: float
    C2: float
    d: float
    s: float
    window_limited: bool
    sublevel: SublevelSet = field(repr=False, compare=False, default=None)

    def to_dict(self):
        return dict(alpha_star=self.alpha_star, alpha1=self.alpha1, alpha2=self.alpha2, C2=self.C2,
                    d=self.d, s=self.s, window_limited=self.window_limited,
                    E_star=self.E_star.to_json(), window=list(self.E_star.window))


def alpha2_closed_form(C2: float, s: float, d: float) -> float:
    """Positive root of ``alpha / sqrt(C2**2 - alpha**2 s**2) = d/8``."""
    return d * C2 / math.sqrt(64.0 + d * d * s * s)


def _default_window(Q: ExpTypeFn, grid: GridSpec) -> Interval:
    P = Q.period
    if P:
        return (-P, P)
    W, _ = grid.resolve(Q)
    return (-W, W)


def _structure_ok(Q, alpha, window, outer, zeros, d, grid) -> Tuple[bool, bool]:
    """Whether every component meeting ``window`` is bounded, short and holds one zero.

    Components are computed on the wider ``outer`` window so that pieces
    clipped by ``window`` are seen whole.  Returns ``(ok, window_limited)``.
    """
    S = sublevel_set(Q, alpha, outer, grid, zeros)
    limited = False
    for c in S.components:
        meets = c.b >= window[0] and c.a <= window[1]
        if c.touches_edge:
            if meets:
                return False, True
            limited = True
            continue
        if not meets:
            continue
        if c.length > d / 4 or len(c.zeros) != 1:
            return False, limited
    return True, limited


def alpha_star(Q: ExpTypeFn, s: float, d: Optional[float] = None,
               window: Optional[Interval] = None, grid: Optional[GridSpec] = None,
               iterations: int = 60) -> AlphaStar:
    """Level ``alpha*`` below which ``|Q|`` only dips in short pieces around its zeros.

    ``alpha2`` is the closed form, ``alpha1`` the largest level in
    ``(0, C2/s]`` (binary search) at which every sublevel component is
    bounded, no longer than ``d/4``, and contains exactly one zero.  On a
    finite window these are window-level facts; ``window_limited`` is set
    whenever a component could not be seen in full.
    """
    grid = grid or GridSpec()
    window = window or _default_window(Q, grid)
    window = (float(window[0]), float(window[1]))
    A = inf_quadratic(Q, s, grid)
    if not A.lo > 0:
        raise HypothesisError("positive A_s(Q)", f"A_{s:g}(Q) enclosure [{A.lo:.3g}, {A.hi:.3g}] contains 0")
    margin = max(1.0, window[1] - window[0]) * 0.5
    outer = (window[0] - margin, window[1] + margin)
    zs = real_zeros(Q, outer, grid)
    if d is None:
        d = zs.separation
    C2 = math.sqrt(A.lo)
    a2 = alpha2_closed_form(C2, s, d)
    hi = C2 / s if s > 0 else max(sup_norm(Q, grid).hi, C2)
    ok, limited = _structure_ok(Q, hi, window, outer, zs.zeros, d, grid)
    if ok:
        a1 = hi
    else:
        lo_a, hi_a = 0.0, hi
        for _ in range(iterations):
            mid = 0.5 * (lo_a + hi_a)
            ok, lim = _structure_ok(Q, mid, window, outer, zs.zeros, d, grid)
            if ok:
                lo_a, limited = mid, lim
            else:
                hi_a = mid
        a1 = lo_a
    a_star = min(a1, a2)
    if not a_star > 0:
        raise HypothesisError("separated real zeros", "no positive level isolates the zeros of Q")
    S = sublevel_set(Q, a_star, window, grid, zs.zeros)
    limited = limited or zs.window_limited or any(c.touches_edge for c in S.components)
    P = Q.period
    if P and window[1] - window[0] >= P:
        # every component is a translate of one seen whole inside the window
        limited = False
    return AlphaStar(float(a_star), S.set.complement(), float(a1), float(a2), float(C2),
                     float(d), float(s), bool(limited), S)


@dataclass(frozen=True)
class ConstantChain:
    """Empirical constants: ``C1_est`` bounds ``||f|| / ||f||_{E*}``, ``C3_est = C1_est / alpha*``."""

    C1_est: float
    C3_est: float
    alpha_star: float
    ratios: Tuple[float, ...]
    verified: bool
    worst_member: int
    window_limited: bool

    def to_dict(self):
        d = dict(self.__dict__)
        d["ratios"] = list(self.ratios)
        return d


def schur_constant_chain(Q: ExpTypeFn, sigma: float, tau: float, family_size: int = 100,
                         seed: int = 0, extra: Sequence[ExpTypeFn] = (),
                         window: Optional[Interval] = None,
                         grid: Optional[GridSpec] = None, terms: int = 4) -> ConstantChain:
    """Estimate the constants of the sublevel argument on a random family in ``B_sigma``.

    ``C1_est`` is the largest observed ``max|f| / max_{E*}|f|`` on a common
    grid; it is an empirical lower bound for the true constant, not a
    certificate.  ``verified`` records that ``max|f| <= C3_est max|Q f|``
    held for every member on the same grid.
    """
    grid = grid or GridSpec()
    res = alpha_star(Q, sigma + tau, window=window, grid=grid)
    win = res.E_star.window
    _, h = grid.resolve(Q)
    h = min(h, 0.1 / max(1.0, sigma))
    xs = _grid(win, h)
    in_E = res.E_star.mask(xs)
    qv = Q(xs)
    rng = np.random.default_rng(seed)
    family = [random_trig_poly(rng, sigma, terms) for _ in range(family_size)] + list(extra)
    ratios = []
    vals = []
    for f in family:
        fv = np.abs(f(xs))
        on_E = float(fv[in_E].max()) if in_E.any() else 0.0
        ratios.append(float(fv.max()) / on_E if on_E > 0 else math.inf)
        vals.append((float(fv.max()), float(np.abs(qv * f(xs)).max())))
    C1 = max(ratios) if ratios else 1.0
    C3 = C1 / res.alpha_star
    verified = all(fmax <= C3 * qfmax * (1 + 1e-12) for fmax, qfmax in vals)
    worst = int(np.argmax(ratios)) if ratios else -1
    return ConstantChain(float(C1), float(C3), res.alpha_star, tuple(ratios), bool(verified),
                         worst, res.window_limited)


def weighted_family_bound(Q: ExpTypeFn, f: ExpTypeFn, grid: Optional[GridSpec] = None) -> float:
    """Certified-norm ratio ``||f|| / ||Q f||`` (lower end over upper end)."""
    grid = grid or GridSpec()
    return sup_norm(f, grid).lo / sup_norm(mul(Q, f), grid).hi
