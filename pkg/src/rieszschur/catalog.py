"""Catalogued weights and seeded random sample families."""
from __future__ import annotations

from typing import Dict, List, Optional

import numpy as np

from .expr import ExpTypeFn, mul, scale, sinoverx, trig_poly
from .parser import parse_expr

# Weights with a positive A_s for every s > 0 and simple real zeros (or none).
CATALOG_SOURCES: Dict[str, str] = {
    "sin": "sin(x)",
    "sin2": "sin(2*x)",
    "cos3": "cos(3*x)",
    "line": "x",
    "affine": "2*x + 1",
    "shifted_sin": "sin(x) + 0.5",
    "lifted_sin": "2 + sin(x)",
    "two_tone": "sin(x) + 0.3*sin(2*x)",
    "dirichlet": "sinratio(3, 1)",
    "cos_product": "cos(x)*cos(2*x)",
}


def catalog() -> Dict[str, ExpTypeFn]:
    return {name: parse_expr(src) for name, src in CATALOG_SOURCES.items()}


def random_trig_poly(rng: np.random.Generator, type_bound: float, terms: int = 4,
                     include_top: bool = False, lattice: int = 0) -> ExpTypeFn:
    """Random real trigonometric polynomial with frequencies in ``[0, type_bound]``.

    Frequencies are drawn uniformly and coefficients are standard normal.
    With ``lattice=m > 0`` they are drawn from ``type_bound * j / m`` instead,
    which makes the result periodic (so its sup norm can be certified).
    With ``include_top`` the frequency ``type_bound`` itself is always present.
    """
    if lattice > 0:
        freqs = np.sort(type_bound * rng.integers(0, lattice + 1, size=terms) / lattice)
    else:
        freqs = np.sort(rng.uniform(0.0, type_bound, size=terms))
    if include_top:
        freqs[-1] = type_bound
    c = rng.standard_normal(terms)
    s = rng.standard_normal(terms)
    return trig_poly(freqs, c, s)


def random_decaying(rng: np.random.Generator, type_bound: float, terms: int = 3,
                    damping: Optional[float] = None) -> ExpTypeFn:
    """Random trig polynomial damped by ``sin(d x)/(d x)`` so the total type stays at ``type_bound``.

    Such functions are bounded even after multiplication by a polynomial of
    degree one, which trigonometric polynomials are not.
    """
    d = damping if damping is not None else type_bound / 4
    core = random_trig_poly(rng, type_bound - d, terms)
    return mul(core, scale(1.0 / d, sinoverx(d)))


def random_algebraic(rng: np.random.Generator, degree: int) -> List[float]:
    """Standard-normal coefficients of a real polynomial of exact degree ``degree``."""
    c = rng.standard_normal(degree + 1)
    if c[-1] == 0:
        c[-1] = 1.0
    return [float(v) for v in c]
