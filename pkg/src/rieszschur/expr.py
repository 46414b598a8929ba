"""Closed-form entire functions of exponential type.

Every node is an immutable dataclass that evaluates on numpy arrays and
reports, without sampling:

* ``type_bound``       -- a safe upper bound for the exponential type,
* ``sharp_type_bound`` -- the exact type where the node knows it (SinRatio),
* ``period``           -- a common period, or None for aperiodic trees,
* ``envelope``         -- ``(M, p, R)`` with ``|f(x)| <= M |x|**-p`` for ``|x| >= R``.

Trees should be built with the smart constructors (``add``, ``mul``,
``scale``, ``poly``, ...) or the arithmetic operators; these keep trees in a
canonical form (flattened sums/products, folded polynomial parts) so that
printing and re-parsing reproduces the same evaluation order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np

Number = Union[int, float]

SERIES_RADIUS = 1e-4
_RATIO_SERIES_RADIUS = 1e-3
_MAX_PERIOD_DENOMINATOR = 240


class NonEntireError(ValueError):
    """Raised when a quotient node would have poles on the real line."""


class Envelope(NamedTuple):
    """Growth bound valid for ``|x| >= R``::

        |f(x)| <= M(|x|) * (|x| - s)**(-p) * (|x| / (|x| - s))**g

    where ``M(r) = sum(coef[j] * r**(-j))`` is non-increasing, so lower
    order polynomial terms fade at large ``|x|``.  ``s`` is the offset of shifted decaying factors (``R > s``) and ``g``
    collects the polynomial growth that had to be re-expressed in terms of
    ``|x| - s``.  With ``s = g = 0`` this is plain ``M |x|**(-p)``.
    """

    coef: Tuple[float, ...]
    p: int
    R: float
    s: float = 0.0
    g: int = 0

    @property
    def M(self) -> float:
        """Constant valid on the whole range ``|x| >= max(R, 1)``."""
        return float(sum(self.coef))

    def scaled(self, c: float) -> "Envelope":
        return self._replace(coef=tuple(abs(c) * m for m in self.coef))

    @property
    def bounded(self) -> bool:
        return self.p >= 0

    @property
    def decaying(self) -> bool:
        return self.p >= 1

    def tail(self, W: float) -> float:
        """Bound on ``sup_{|x| >= W} |f(x)|`` (needs ``W >= R`` and ``p >= 0``)."""
        if W < self.R or self.p < 0:
            return math.inf
        d = W - self.s
        lead = sum(m * W ** (-j) for j, m in enumerate(self.coef))
        return lead * d ** (-self.p) * (W / d) ** self.g


def _rebase(e: Envelope, s: float) -> Tuple[int, int]:
    """Exponents ``(p, g)`` of ``e`` rewritten for the larger offset ``s``."""
    # (|x|-s_e)^(-p) <= (|x|-s)^(-p) for p >= 0; growth |x|^k becomes
    # (|x|-s)^k (|x|/(|x|-s))^k, and only polynomial factors (offset 0) grow
    return e.p, e.g + max(0, -e.p)


def _fmt(v: float) -> str:
    s = repr(float(v))
    return f"({s})" if s.startswith("-") else s


def _lcm_period(p1: Optional[float], p2: Optional[float]) -> Optional[float]:
    # 0.0 marks a constant, which has every period
    if p1 is None or p2 is None:
        return None
    if p1 == 0.0:
        return p2
    if p2 == 0.0:
        return p1
    r = p1 / p2
    fr = Fraction(r).limit_denominator(_MAX_PERIOD_DENOMINATOR)
    if fr.numerator == 0 or abs(r - fr.numerator / fr.denominator) > 1e-9 * r:
        return None
    return 0.5 * (p1 * fr.denominator + p2 * fr.numerator)


class ExpTypeFn:
    """Base class of the expression tree."""

    real_valued = True

    def __call__(self, x):
        arr = np.asarray(x, dtype=float)
        out = self._eval(np.atleast_1d(arr))
        if arr.ndim == 0:
            return float(out[0])
        return out.reshape(arr.shape)

    def _eval(self, x: np.ndarray) -> np.ndarray:  # pragma: no cover - abstract
        raise NotImplementedError

    # -- metadata ---------------------------------------------------------
    @property
    def type_bound(self) -> float:
        raise NotImplementedError

    @property
    def sharp_type_bound(self) -> float:
        return self.type_bound

    @property
    def raw_period(self) -> Optional[float]:
        """Period, ``0.0`` for constants, None when aperiodic."""
        return None

    @property
    def period(self) -> Optional[float]:
        p = self.raw_period
        return p if p else None

    @property
    def is_constant(self) -> bool:
        return self.raw_period == 0.0

    @property
    def envelope(self) -> Envelope:
        raise NotImplementedError

    @property
    def decay(self) -> Optional[float]:
        """Constant M with ``|f(x)| <= M/|x|`` far out, when the tree decays."""
        env = self.envelope
        return env.M if env.decaying else None

    # -- calculus ---------------------------------------------------------
    @cached_property
    def derivative(self) -> "ExpTypeFn":
        return self._derivative()

    def _derivative(self) -> "ExpTypeFn":  # pragma: no cover - abstract
        raise NotImplementedError

    def nth_derivative(self, n: int) -> "ExpTypeFn":
        f = self
        for _ in range(n):
            f = f.derivative
        return f

    # -- printing ---------------------------------------------------------
    def to_source(self) -> str:
        raise NotImplementedError

    def __str__(self) -> str:
        return self.to_source()

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        return add(self, _lift(other))

    def __radd__(self, other):
        return add(_lift(other), self)

    def __sub__(self, other):
        return add(self, scale(-1.0, _lift(other)))

    def __rsub__(self, other):
        return add(_lift(other), scale(-1.0, self))

    def __mul__(self, other):
        return mul(self, _lift(other))

    def __rmul__(self, other):
        return mul(_lift(other), self)

    def __neg__(self):
        return scale(-1.0, self)

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("only non-negative integer powers are supported")
        if n == 0:
            return Const(1.0)
        return mul(*([self] * n))


def _lift(v) -> ExpTypeFn:
    if isinstance(v, ExpTypeFn):
        return v
    return Const(float(v))


# ---------------------------------------------------------------------------
# leaves
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Const(ExpTypeFn):
    c: float

    def _eval(self, x):
        return np.full(x.shape, float(self.c))

    @property
    def type_bound(self):
        return 0.0

    @property
    def raw_period(self):
        return 0.0

    @property
    def envelope(self):
        return Envelope((abs(self.c),), 0, 1.0)

    def _derivative(self):
        return Const(0.0)

    def to_source(self):
        return _fmt(self.c)


@dataclass(frozen=True)
class Var(ExpTypeFn):
    def _eval(self, x):
        return x.astype(float, copy=True)

    @property
    def type_bound(self):
        return 0.0

    @property
    def envelope(self):
        return Envelope((1.0,), -1, 1.0)

    def _derivative(self):
        return Const(1.0)

    def to_source(self):
        return "x"


@dataclass(frozen=True)
class Poly(ExpTypeFn):
    """Polynomial with ascending coefficients ``coeffs[k] * x**k``."""

    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def _eval(self, x):
        return np.polynomial.polynomial.polyval(x, self.coeffs)

    @property
    def type_bound(self):
        return 0.0

    @property
    def raw_period(self):
        return 0.0 if self.degree <= 0 else None

    @property
    def envelope(self):
        # |P(x)| <= |x|^n * sum_j |c_{n-j}| |x|^(-j)
        return Envelope(tuple(float(abs(c)) for c in self.coeffs[::-1]), -max(self.degree, 0), 1.0)

    def _derivative(self):
        return poly([k * c for k, c in enumerate(self.coeffs)][1:])

    def to_source(self):
        terms = []
        for k, c in enumerate(self.coeffs):
            terms.append(_fmt(c) if k == 0 else _fmt(c) + "*x" * k)
        return "(" + " + ".join(terms) + ")"


@dataclass(frozen=True)
class Sin(ExpTypeFn):
    """``sin(a*x + b)``."""

    a: float
    b: float = 0.0

    def _eval(self, x):
        return np.sin(self.a * x + self.b)

    @property
    def type_bound(self):
        return abs(self.a)

    @property
    def raw_period(self):
        return 0.0 if self.a == 0 else 2 * math.pi / abs(self.a)

    @property
    def envelope(self):
        return Envelope((1.0,), 0, 1.0)

    def _derivative(self):
        return scale(self.a, Cos(self.a, self.b))

    def to_source(self):
        if self.b == 0:
            return f"sin({_fmt(self.a)}*x)"
        return f"sin({_fmt(self.a)}*x + {_fmt(self.b)})"


@dataclass(frozen=True)
class Cos(ExpTypeFn):
    """``cos(a*x + b)``."""

    a: float
    b: float = 0.0

    def _eval(self, x):
        return np.cos(self.a * x + self.b)

    @property
    def type_bound(self):
        return abs(self.a)

    @property
    def raw_period(self):
        return 0.0 if self.a == 0 else 2 * math.pi / abs(self.a)

    @property
    def envelope(self):
        return Envelope((1.0,), 0, 1.0)

    def _derivative(self):
        return scale(-self.a, Sin(self.a, self.b))

    def to_source(self):
        if self.b == 0:
            return f"cos({_fmt(self.a)}*x)"
        return f"cos({_fmt(self.a)}*x + {_fmt(self.b)})"


def _ratio_multiplier(a: float, b: float) -> int:
    if b == 0:
        raise NonEntireError("sinratio denominator sin(0*x) vanishes identically")
    r = a / b
    n = round(r)
    if n < 1 or abs(r - n) > 1e-12 * max(1.0, abs(r)):
        raise NonEntireError(
            f"sin({a:g}x)/sin({b:g}x) is not entire: {r:g} is not a positive integer"
        )
    return int(n)


@dataclass(frozen=True)
class SinRatio(ExpTypeFn):
    """``sin(a*x)/sin(b*x)`` with ``a/b`` a positive integer.

    ``type_bound`` is the safe bound ``|a|``; the function is a cosine
    polynomial of exact type ``|a| - |b|`` (``sharp_type_bound``).
    """

    a: float
    b: float

    def __post_init__(self):
        _ratio_multiplier(self.a, self.b)

    @property
    def n(self) -> int:
        return _ratio_multiplier(self.a, self.b)

    def _eval(self, x):
        n = self.n
        u = self.b * x
        k = np.rint(u / math.pi)
        e = u - k * math.pi
        # sin(n(k pi + e)) / sin(k pi + e) = (-1)^(k(n-1)) sin(n e)/sin(e)
        sign = np.where((np.mod(k, 2) == 1) & (n % 2 == 0), -1.0, 1.0)
        out = np.empty_like(e)
        small = np.abs(n * e) < _RATIO_SERIES_RADIUS
        big = ~small
        out[big] = np.sin(n * e[big]) / np.sin(e[big])
        if small.any():
            es = e[small] ** 2
            acc = np.zeros_like(es)
            # Taylor series of the Dirichlet sum  sum_j cos((n-1-2j) e)
            freqs = np.arange(n - 1, -n, -2, dtype=float)
            for m in range(3, -1, -1):
                coef = (-1) ** m * float(np.sum(freqs ** (2 * m))) / math.factorial(2 * m)
                acc = acc * es + coef
            out[small] = acc
        return sign * out

    @property
    def type_bound(self):
        return abs(self.a)

    @property
    def sharp_type_bound(self):
        return abs(self.a) - abs(self.b)

    @property
    def raw_period(self):
        return (math.pi if self.n % 2 == 1 else 2 * math.pi) / abs(self.b)

    @property
    def envelope(self):
        return Envelope((float(self.n),), 0, 1.0)

    def expand(self) -> ExpTypeFn:
        """The same function as an explicit cosine sum (Dirichlet kernel)."""
        n, b = self.n, abs(self.b)
        if n % 2 == 1:
            terms = [Const(1.0)] + [scale(2.0, Cos(2 * k * b)) for k in range(1, (n - 1) // 2 + 1)]
        else:
            terms = [scale(2.0, Cos((2 * k - 1) * b)) for k in range(1, n // 2 + 1)]
        return add(*terms)

    def _derivative(self):
        return self.expand().derivative

    def to_source(self):
        return f"sinratio({_fmt(self.a)}, {_fmt(self.b)})"


def _sinc_series(u: np.ndarray, k: int) -> np.ndarray:
    # k-th derivative of sin(u)/u from its Maclaurin series
    if k == 0:
        u2 = u * u
        return 1.0 + u2 * (-1.0 / 6 + u2 * (1.0 / 120 + u2 * (-1.0 / 5040)))
    out = np.zeros_like(u)
    j0 = (k + 1) // 2
    for j in range(j0 + 32, j0 - 1, -1):
        p = 2 * j - k
        out += (-1) ** j * u ** p / ((2 * j + 1) * math.factorial(p))
    return out


def sinc_derivative(u: np.ndarray, k: int = 0) -> np.ndarray:
    """k-th derivative of ``sin(u)/u`` (value 1 at 0), vectorized."""
    u = np.asarray(u, dtype=float)
    out = np.empty_like(u)
    thresh = SERIES_RADIUS if k == 0 else k + 1.0
    small = np.abs(u) < thresh
    if small.any():
        out[small] = _sinc_series(u[small], k)
    big = ~small
    if big.any():
        ub = u[big]
        s, c = np.sin(ub), np.cos(ub)
        cyc = (s, c, -s, -c)
        h = s / ub
        # u h^(j) + j h^(j-1) = sin^(j)(u); forward-stable for |u| > k
        for j in range(1, k + 1):
            h = (cyc[j % 4] - j * h) / ub
        out[big] = h
    return out


@dataclass(frozen=True)
class SinOverX(ExpTypeFn):
    """``d^order/dx^order [sin(a (x - shift)) / (x - shift)]``.

    ``order`` and ``shift`` exist so that derivatives and mollifiers stay
    closed under the node set; the grammar form is ``sinoverx(a)``.
    """

    a: float
    shift: float = 0.0
    order: int = 0

    def _eval(self, x):
        u = self.a * (x - self.shift)
        return self.a ** (self.order + 1) * sinc_derivative(u, self.order)

    @property
    def type_bound(self):
        return abs(self.a)

    @property
    def envelope(self):
        k, a = self.order, abs(self.a)
        M = float(sum(math.comb(k, j) * a ** (k - j) * math.factorial(j) for j in range(k + 1)))
        # |sinc derivative| <= M / |x - shift| once |x - shift| >= 1
        c = abs(self.shift)
        return Envelope((M,), 1, c + 1.0, c, 0)

    def _derivative(self):
        return SinOverX(self.a, self.shift, self.order + 1)

    def to_source(self):
        if self.shift == 0 and self.order == 0:
            return f"sinoverx({_fmt(self.a)})"
        return f"sinoverx({_fmt(self.a)}, {_fmt(self.shift)}, {self.order})"


# ---------------------------------------------------------------------------
# composites
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Sum(ExpTypeFn):
    children: tuple

    def _eval(self, x):
        out = self.children[0]._eval(x)
        for ch in self.children[1:]:
            out = out + ch._eval(x)
        return out

    @property
    def type_bound(self):
        return max(ch.type_bound for ch in self.children)

    @property
    def sharp_type_bound(self):
        return max(ch.sharp_type_bound for ch in self.children)

    @property
    def raw_period(self):
        p = 0.0
        for ch in self.children:
            p = _lcm_period(p, ch.raw_period)
        return p

    @property
    def envelope(self):
        envs = [ch.envelope for ch in self.children]
        off = max(e.s for e in envs)
        pg = [_rebase(e, off) for e in envs]
        R = max(max(e.R for e in envs), off + 1.0)  # (|x|-s)^(-p) monotone in p needs |x|-s >= 1
        # a term with larger p only loses by (|x|-s)^(p-pmin) >= 1 once |x| >= R
        n = max(len(e.coef) for e in envs)
        coef = tuple(sum(e.coef[j] for e in envs if j < len(e.coef)) for j in range(n))
        return Envelope(coef, min(p for p, _ in pg), R, off, max(g for _, g in pg))

    def _derivative(self):
        return add(*[ch.derivative for ch in self.children])

    def to_source(self):
        return "(" + " + ".join(ch.to_source() for ch in self.children) + ")"


@dataclass(frozen=True)
class Product(ExpTypeFn):
    children: tuple

    def _eval(self, x):
        out = self.children[0]._eval(x)
        for ch in self.children[1:]:
            out = out * ch._eval(x)
        return out

    @property
    def type_bound(self):
        return float(sum(ch.type_bound for ch in self.children))

    @property
    def sharp_type_bound(self):
        return float(sum(ch.sharp_type_bound for ch in self.children))

    @property
    def raw_period(self):
        p = 0.0
        for ch in self.children:
            p = _lcm_period(p, ch.raw_period)
        return p

    @property
    def envelope(self):
        envs = [ch.envelope for ch in self.children]
        off = max(e.s for e in envs)
        pg = [_rebase(e, off) for e in envs]
        coef = np.array([1.0])
        for e in envs:
            coef = np.convolve(coef, e.coef)
        return Envelope(tuple(float(m) for m in coef), sum(p for p, _ in pg),
                        max(e.R for e in envs), off, sum(g for _, g in pg))

    def _derivative(self):
        ch = self.children
        terms = []
        for i in range(len(ch)):
            terms.append(mul(*ch[:i], ch[i].derivative, *ch[i + 1 :]))
        return add(*terms)

    def to_source(self):
        return "(" + " * ".join(ch.to_source() for ch in self.children) + ")"


@dataclass(frozen=True)
class Scale(ExpTypeFn):
    c: float
    child: ExpTypeFn

    def _eval(self, x):
        return self.c * self.child._eval(x)

    @property
    def type_bound(self):
        return self.child.type_bound

    @property
    def sharp_type_bound(self):
        return self.child.sharp_type_bound

    @property
    def raw_period(self):
        return self.child.raw_period

    @property
    def envelope(self):
        e = self.child.envelope
        return e.scaled(self.c)

    def _derivative(self):
        return scale(self.c, self.child.derivative)

    def to_source(self):
        return f"({_fmt(self.c)} * {self.child.to_source()})"


# ---------------------------------------------------------------------------
# smart constructors
# ---------------------------------------------------------------------------


def _poly_coeffs(f: ExpTypeFn) -> Optional[np.ndarray]:
    if isinstance(f, Const):
        return np.array([float(f.c)])
    if isinstance(f, Var):
        return np.array([0.0, 1.0])
    if isinstance(f, Poly):
        return np.array(f.coeffs)
    return None


def poly(coeffs: Sequence[Number]) -> ExpTypeFn:
    """Canonical polynomial: trailing zeros stripped, degree 0 becomes Const."""
    cs = [float(c) for c in coeffs]
    while len(cs) > 1 and cs[-1] == 0:
        cs.pop()
    if not cs:
        return Const(0.0)
    if len(cs) == 1:
        return Const(cs[0])
    return Poly(tuple(cs))


def add(*terms: ExpTypeFn) -> ExpTypeFn:
    flat = []
    for t in terms:
        t = _lift(t)
        flat.extend(t.children if isinstance(t, Sum) else (t,))
    if not flat:
        return Const(0.0)
    # fold every polynomial term into one, placed at the first one's slot
    slot, acc = None, None
    others = []
    for t in flat:
        cs = _poly_coeffs(t)
        if cs is None:
            others.append(t)
        elif acc is None:
            slot, acc = len(others), cs
        else:
            acc = np.polynomial.polynomial.polyadd(acc, cs)
    if acc is not None:
        pf = poly(acc)
        if not others:
            return pf
        if not (isinstance(pf, Const) and pf.c == 0):
            others.insert(slot, pf)
    if len(others) == 1:
        return others[0]
    return Sum(tuple(others))


def scale(c: Number, f: ExpTypeFn) -> ExpTypeFn:
    c = float(c)
    f = _lift(f)
    if c == 0:
        return Const(0.0)
    if c == 1:
        return f
    pc = _poly_coeffs(f)
    if pc is not None:
        return poly(c * pc)
    if isinstance(f, Scale):
        return scale(c * f.c, f.child)
    return Scale(c, f)


def mul(*factors: ExpTypeFn) -> ExpTypeFn:
    c = 1.0
    rest = []
    todo = [_lift(t) for t in reversed(factors)]
    while todo:
        t = todo.pop()
        while isinstance(t, Scale):
            c *= t.c
            t = t.child
        if isinstance(t, Product):
            todo.extend(reversed(t.children))
        else:
            rest.append(t)
    if not rest:
        return Const(c)
    # fold every polynomial factor into one, placed at the first one's slot
    slot, pc = None, None
    others = []
    for t in rest:
        if isinstance(t, Const):
            c *= t.c
            continue
        cs = _poly_coeffs(t)
        if cs is None:
            others.append(t)
            continue
        if pc is None:
            slot, pc = len(others), cs
        else:
            pc = np.polynomial.polynomial.polymul(pc, cs)
    if pc is not None:
        pf = poly(pc)
        if isinstance(pf, Const):
            c *= pf.c
        else:
            others.insert(slot, pf)
    if c == 0:
        return Const(0.0)
    if not others:
        return Const(c)
    core = others[0] if len(others) == 1 else Product(tuple(others))
    return scale(c, core)


def sinratio(a: Number, b: Number) -> ExpTypeFn:
    return SinRatio(float(a), float(b))


def sinoverx(a: Number, shift: Number = 0.0, order: int = 0) -> ExpTypeFn:
    if a == 0:
        return Const(0.0)
    return SinOverX(float(a), float(shift), int(order))


def trig_poly(freqs: Sequence[Number], cos_coeffs: Sequence[Number], sin_coeffs: Sequence[Number]) -> ExpTypeFn:
    """``sum_k c_k cos(w_k x) + s_k sin(w_k x)``."""
    terms = []
    for w, ca, sa in zip(freqs, cos_coeffs, sin_coeffs):
        terms.append(scale(ca, Cos(float(w))) if w != 0 else Const(float(ca)))
        if w != 0:
            terms.append(scale(sa, Sin(float(w))))
    return add(*terms)


# ---------------------------------------------------------------------------
# operations used by the proofs
# ---------------------------------------------------------------------------


def evaluate(f: ExpTypeFn, x: float) -> float:
    """Value of ``f`` at a single real point."""
    return float(f(float(x)))


def derivative(f: ExpTypeFn) -> ExpTypeFn:
    return f.derivative


def mollify(f: ExpTypeFn, delta: float, x_eps: float) -> ExpTypeFn:
    """``f(x) * sin(delta (x - x_eps)) / (delta (x - x_eps))``.

    The factor is bounded by 1 in modulus and equals 1 at ``x_eps``, so the
    result is dominated by ``|f|``, decays like ``1/|x|`` and has type
    ``type(f) + delta``.
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    return mul(f, scale(1.0 / delta, SinOverX(float(delta), float(x_eps))))


@dataclass(frozen=True)
class RealDecomposition:
    """A complex-valued ``f = f1 + i f2`` carried as two real trees."""

    f1: ExpTypeFn
    f2: ExpTypeFn

    def modulus(self, x):
        return np.hypot(self.f1(x), self.f2(x))

    def phase(self, x: float) -> float:
        """``eta`` with ``exp(i eta) = f(x)/|f(x)|``."""
        return math.atan2(self.f2(float(x)), self.f1(float(x)))

    def rotate(self, eta: float) -> ExpTypeFn:
        """``G = cos(eta) f1 + sin(eta) f2``; real, with ``|G| <= |f|``."""
        return add(scale(math.cos(eta), self.f1), scale(math.sin(eta), self.f2))

    @property
    def type_bound(self) -> float:
        return max(self.f1.type_bound, self.f2.type_bound)


def real_decompose(f1: ExpTypeFn, f2: ExpTypeFn) -> RealDecomposition:
    return RealDecomposition(f1, f2)
