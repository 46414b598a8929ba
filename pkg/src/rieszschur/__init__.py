"""Certified numerics for weighted sup-norm inequalities of entire functions of exponential type."""

__version__ = "0.1.0"

from .expr import ExpTypeFn, derivative, evaluate, mollify, real_decompose  # noqa: E402,F401
from .parser import ParseError, parse, parse_expr  # noqa: E402,F401
from .norms import Enclosure, GridSpec, inf_quadratic, real_zeros, sup_norm  # noqa: E402,F401
from .certificates import Certificate, HypothesisError, Verdict, check_main  # noqa: E402,F401
