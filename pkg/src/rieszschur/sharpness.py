"""Search for near-extremal functions in the main inequality.

For periodic weights the candidates are ``f = sum_k a_k cos(w_k x) + b_k
sin(w_k x)`` with ``w_k = k sigma / m``.  For aperiodic weights such a
trigonometric polynomial usually has ``||Q f|| = inf``, so the cardinal
basis ``sin(sigma (x - x_k)) / (x - x_k)`` with nodes ``x_k = z + k pi / sigma`` (``z`` the real zero of ``Q`` nearest
the origin, or 0),
``|k| <= m``, is used instead; every member is of type ``sigma`` and decays.

The ratio ``||f|| / ||Q f||`` is maximized by coordinate ascent with
adaptive steps and random restarts on a sampling grid, then polished by a
linear program (for a fixed peak location ``x0``, maximize ``f(x0)`` subject
to ``|Q f| <= 1`` on the grid) tried at the current peak and at the zeros of
``Q`` inside the sampling window.  The final ratio is recomputed with
certified norms (upper bound in the denominator), so it can never exceed the
true ratio of the returned function.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional

import numpy as np
from scipy.optimize import linprog

from .certificates import main_constant
from .expr import Const, Cos, ExpTypeFn, Sin, add, mul, scale, sinoverx
from .norms import ConsistencyError, GridSpec, real_zeros, sup_norm


@dataclass(frozen=True)
class SharpnessResult:
    ratio: float
    sampled_ratio: float
    constant: float
    coefficients: tuple
    basis: str
    nodes: tuple
    x0: float
    iterations: int
    restarts: int
    converged: bool
    function: str

    def to_dict(self):
        d = self.__dict__.copy()
        d["coefficients"] = list(self.coefficients)
        d["nodes"] = list(self.nodes)
        return d


def _basis(sigma: float, m: int, periodic: bool, centre: float = 0.0):
    if periodic:
        nodes = [k * sigma / m for k in range(m + 1)]
        funcs: List[ExpTypeFn] = [Const(1.0)]
        for w in nodes[1:]:
            funcs.append(Cos(w))
            funcs.append(Sin(w))
        return "trig", nodes, funcs
    nodes = [centre + k * math.pi / sigma for k in range(-m, m + 1)]
    return "cardinal", nodes, [sinoverx(sigma, x_k) for x_k in nodes]


def _assemble(coeffs, funcs) -> ExpTypeFn:
    return add(*[scale(c, b) for c, b in zip(coeffs, funcs)])


def _lp_peak(B, QB, j):
    """Coefficients maximizing ``(B c)[j]`` subject to ``|QB c| <= 1``."""
    dim = B.shape[1]
    A = np.vstack([QB, -QB])
    res = linprog(-B[j], A_ub=A, b_ub=np.ones(A.shape[0]), bounds=[(None, None)] * dim,
                  method="highs")
    if res.status != 0:
        return None
    return np.asarray(res.x)


def sharpness_search(Q: ExpTypeFn, sigma: float, tau: float, basis_size: int = 4,
                     iterations: int = 2000, seed: int = 0,
                     grid: Optional[GridSpec] = None, samples_per_unit: float = 40.0,
                     restart_patience: int = 400) -> SharpnessResult:
    """Maximize ``|f(x0)| / ||Q f||`` over the basis span and ``x0``.

    One iteration is one coordinate move (both directions tried).  With
    ``iterations=0`` the random initial guess is evaluated as is.
    """
    grid = grid or GridSpec()
    rng = np.random.default_rng(seed)
    constant, _ = main_constant(Q, sigma, tau, grid)
    m = int(basis_size)
    periodic = Q.period is not None or Q.is_constant
    centre = 0.0
    if not periodic:
        zs = real_zeros(Q, grid=grid).zeros
        if zs:
            centre = min(zs, key=abs)
    kind, nodes, funcs = _basis(sigma, m, periodic, centre)

    # sampling grid: one common period, or a window around the nodes
    if periodic:
        L = 2 * math.pi * m / sigma
        P = Q.period
        if P:
            r = P / L
            fr = Fraction(r).limit_denominator(240)
            L = L * fr.numerator if abs(r - fr.numerator / fr.denominator) < 1e-9 * r else max(L, P) * 8
        a, b = -0.5 * L, 0.5 * L
    else:
        W = grid.window or max(60.0, 2 * max(abs(nodes[0]), abs(nodes[-1])) + 20.0)
        a, b = -W, W
    n = int(math.ceil((b - a) * samples_per_unit * max(1.0, sigma + tau)))
    xs = np.linspace(a, b, n + 1)
    B = np.stack([fn(xs) for fn in funcs], axis=1)
    QB = Q(xs)[:, None] * B

    def ratio(c):
        den = np.max(np.abs(QB @ c))
        return np.max(np.abs(B @ c)) / den if den > 0 else 0.0

    dim = B.shape[1]
    c = rng.standard_normal(dim)
    best_c, best_r = c.copy(), ratio(c)
    cur_c, cur_r = c.copy(), best_r
    steps = np.full(dim, 0.5)
    restarts, stale = 0, 0
    for it in range(iterations):
        i = it % dim
        improved = False
        for sgn in (1.0, -1.0):
            trial = cur_c.copy()
            trial[i] += sgn * steps[i] * max(1.0, np.max(np.abs(cur_c)))
            r = ratio(trial)
            if r > cur_r:
                cur_c, cur_r = trial, r
                steps[i] *= 1.5
                improved = True
                break
        if not improved:
            steps[i] *= 0.5
        if cur_r > best_r * (1 + 1e-12):
            best_c, best_r, stale = cur_c.copy(), cur_r, 0
        else:
            stale += 1
        if stale >= restart_patience or np.all(steps < 1e-10):
            cur_c = rng.standard_normal(dim)
            cur_r = ratio(cur_c)
            steps[:] = 0.5
            restarts += 1
            stale = 0
    converged = bool(np.all(steps < 1e-6)) or iterations == 0

    if iterations > 0:
        candidates = [int(np.argmax(np.abs(B @ best_c)))]
        qs = np.abs(Q(xs))
        local_min = np.flatnonzero((qs[1:-1] <= qs[:-2]) & (qs[1:-1] <= qs[2:])) + 1
        candidates += [int(j) for j in local_min if qs[j] < 1e-2 * max(qs.max(), 1e-300)]
        for j in sorted(set(candidates)):
            polished = _lp_peak(B, QB, j)
            if polished is not None and ratio(polished) > best_r:
                best_c, best_r = polished, ratio(polished)

    best_c = best_c / np.max(np.abs(best_c))
    f = _assemble(best_c, funcs)
    fn = sup_norm(f, grid)
    qfn = sup_norm(mul(Q, f), grid)
    certified_ratio = fn.lo / qfn.hi if qfn.hi > 0 else 0.0
    if certified_ratio > constant * (1 + 1e-6):
        raise ConsistencyError(f"ratio {certified_ratio!r} exceeds the constant {constant!r}")
    return SharpnessResult(
        ratio=float(certified_ratio),
        sampled_ratio=float(best_r),
        constant=float(constant),
        coefficients=tuple(float(v) for v in best_c),
        basis=kind,
        nodes=tuple(float(w) for w in nodes),
        x0=float(fn.witness),
        iterations=int(iterations),
        restarts=restarts,
        converged=converged,
        function=f.to_source(),
    )
