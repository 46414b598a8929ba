import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rieszschur.expr import Const, SinOverX, SinRatio
from rieszschur.parser import ParseError, parse, parse_expr, to_source


@pytest.mark.parametrize("src, oracle", [
    ("sin(x)", np.sin),
    ("cos(3*x)", lambda x: np.cos(3 * x)),
    ("2*x + 1", lambda x: 2 * x + 1),
    ("sin(x) + 0.5", lambda x: np.sin(x) + 0.5),
    ("cos(x)*cos(2*x)", lambda x: np.cos(x) * np.cos(2 * x)),
    ("sin(2*x + pi/4)", lambda x: np.sin(2 * x + math.pi / 4)),
    ("-sin(x)^2", lambda x: -np.sin(x) ** 2),
    ("x*(x - 1)", lambda x: x * (x - 1)),
    ("sin(3*x)/sin(x)", lambda x: np.sin(3 * x) / np.sin(x)),
    ("sin(2*x)/x", lambda x: np.sin(2 * x) / x),
    ("sin(x)/2", lambda x: np.sin(x) / 2),
])
def test_parse_and_evaluate(src, oracle):
    f = parse_expr(src)
    xs = np.linspace(-4.1, 4.3, 57)  # avoids the removable points
    assert np.allclose(f(xs), oracle(xs), atol=1e-12, rtol=1e-12)


def test_quotients_become_entire_nodes():
    assert isinstance(parse_expr("sin(3*x)/sin(x)"), SinRatio)
    assert isinstance(parse_expr("sin(2*x)/x"), SinOverX)
    assert isinstance(parse_expr("sinratio(3, 1)"), SinRatio)


@pytest.mark.parametrize("src", ["sin(2.5*x)/sin(x)", "sin(x)/sin(2*x)"])
def test_non_entire_quotient_rejected(src):
    with pytest.raises(ParseError, match="non-entire"):
        parse_expr(src)


@pytest.mark.parametrize("src, pos", [
    ("sin(x", 5),
    ("sin(x) +", 8),
    ("2 $ x", 2),
    ("foo(x)", 0),
    ("sin(x*x)", 4),
    ("cos(x)/cos(x)", 6),
    ("x^1.5", 2),
])
def test_errors_report_position(src, pos):
    with pytest.raises(ParseError) as err:
        parse_expr(src)
    assert err.value.position == pos


def test_named_parameters_are_recorded():
    prog = parse("sin(tau*x)", params={"tau": 2.0, "unused": 1.0})
    assert prog.free_parameters == {"tau": 2.0}
    assert prog.root(0.3) == pytest.approx(math.sin(0.6))


def test_constants_fold():
    assert parse_expr("2*pi - pi") == Const(math.pi)


_atoms = st.sampled_from(["x", "sin(x)", "cos(2*x)", "sin(0.5*x + 1)", "sinratio(3, 1)",
                          "sinoverx(2)", "1.5", "pi"])


@st.composite
def expressions(draw, depth=3):
    if depth == 0 or draw(st.booleans()):
        return draw(_atoms)
    op = draw(st.sampled_from([" + ", " - ", "*"]))
    return "(" + draw(expressions(depth=depth - 1)) + op + draw(expressions(depth=depth - 1)) + ")"


@given(expressions())
@settings(max_examples=150, deadline=None)
def test_print_parse_round_trip(src):
    tree = parse_expr(src)
    again = parse_expr(to_source(tree))
    assert again == tree
    xs = np.linspace(-3, 3, 17)
    assert np.allclose(again(xs), tree(xs), rtol=1e-13, atol=1e-13)
