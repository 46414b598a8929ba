import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rieszschur.expr import (Const, Cos, NonEntireError, Sin, SinOverX, SinRatio, add, derivative,
                             evaluate, mollify, mul, poly, real_decompose, scale, sinc_derivative,
                             sinoverx, sinratio, trig_poly)

mp.mp.dps = 40


def mp_sinratio(n, b, x):
    x = mp.mpf(x)
    if mp.sin(b * x) == 0:
        return mp.mpf(n) * (-1) ** (int(mp.nint(b * x / mp.pi)) * (n - 1))
    return mp.sin(n * b * x) / mp.sin(b * x)


def mp_sinc_deriv(a, k, x):
    return mp.diff(lambda t: mp.sin(a * t) / t if t != 0 else mp.mpf(a), mp.mpf(x), k)


# ---------------------------------------------------------------- evaluation

@pytest.mark.parametrize("x", [0.0, 1e-9, -1e-5, 0.3, math.pi, 2 * math.pi - 1e-7, 17.2, -1e4])
def test_sinratio_matches_mpmath_including_removable_points(x):
    f = sinratio(3, 1)
    assert abs(evaluate(f, x) - float(mp_sinratio(3, 1, x))) <= 1e-12


@pytest.mark.parametrize("n", [2, 4, 5])
def test_sinratio_at_multiples_of_pi(n):
    f = sinratio(n, 1)
    for k in range(-3, 4):
        assert evaluate(f, k * math.pi) == pytest.approx(n * (-1) ** (k * (n - 1)), abs=1e-12)


def test_sinratio_rejects_non_integer_quotient():
    with pytest.raises(NonEntireError):
        SinRatio(2.5, 1.0)


def test_sinratio_expansion_and_type():
    f = sinratio(3, 1)
    xs = np.linspace(-7, 7, 301)
    assert np.allclose(f(xs), 1 + 2 * np.cos(2 * xs), atol=1e-12)
    assert f.sharp_type_bound == pytest.approx(2.0)
    assert f.period == pytest.approx(math.pi)
    assert sinratio(4, 1).period == pytest.approx(2 * math.pi)


@pytest.mark.parametrize("x", [0.0, 1e-6, 3e-5, 0.5, 2.0, 40.0, -123.4])
@pytest.mark.parametrize("k", [0, 1, 2, 3])
def test_sinoverx_derivatives_match_mpmath(x, k):
    a = 2.0
    got = evaluate(sinoverx(a, 0.0, k), x)
    want = float(mp_sinc_deriv(a, k, x))
    assert abs(got - want) <= 1e-12 * max(1.0, abs(want))


@pytest.mark.parametrize("k", [0, 1, 2, 3])
def test_sinc_derivative_accurate_on_both_sides_of_series_switch(k):
    edge = 1e-4 if k == 0 else k + 1.0
    for u in (edge * (1 - 1e-9), edge * (1 + 1e-9)):
        want = float(mp.diff(lambda t: mp.sin(t) / t, mp.mpf(u), k))
        assert abs(sinc_derivative(np.array([u]), k)[0] - want) <= 1e-13


def test_scalar_and_vector_evaluation_agree():
    f = add(Sin(2.0, 0.3), mul(poly([1, 2]), Cos(0.5)))
    xs = np.linspace(-3, 3, 13)
    assert np.array_equal(f(xs), np.array([f(float(x)) for x in xs]))
    assert isinstance(f(0.1), float)


# ---------------------------------------------------------------- derivatives

FUNCS = [
    Sin(1.5, 0.2),
    Cos(3.0),
    poly([1.0, -2.0, 0.5]),
    sinratio(3, 1),
    sinoverx(2.0),
    sinoverx(1.5, 0.7),
    mul(Sin(1.0), Cos(2.0)),
    add(scale(2.0, Sin(0.5)), Const(1.0)),
    mul(poly([0, 1]), sinoverx(1.0)),
]


@pytest.mark.parametrize("f", FUNCS, ids=lambda f: f.to_source())
def test_derivative_against_central_differences(f):
    g = derivative(f)
    h = 1e-5
    for x in (-2.3, -0.1, 0.0, 0.4, 3.7):
        fd = (evaluate(f, x + h) - evaluate(f, x - h)) / (2 * h)
        assert evaluate(g, x) == pytest.approx(fd, rel=1e-7, abs=1e-7)


def test_derivative_of_sin_cos_exact():
    xs = np.linspace(-4, 4, 41)
    assert np.allclose(Sin(2.0, 0.5).derivative(xs), 2 * np.cos(2 * xs + 0.5), atol=1e-14)
    assert np.allclose(Cos(3.0).derivative(xs), -3 * np.sin(3 * xs), atol=1e-14)


# ---------------------------------------------------------------- type bounds and periods

def test_type_bounds_combine_additively():
    f = mul(Sin(1.0), Cos(2.5))
    assert f.type_bound == pytest.approx(3.5)
    assert add(Sin(1.0), Cos(2.5)).type_bound == pytest.approx(2.5)
    assert poly([1, 2, 3]).type_bound == 0.0


def test_period_lcm():
    assert add(Sin(1.0), Sin(2.0)).period == pytest.approx(2 * math.pi)
    assert add(Sin(2.0), Cos(3.0)).period == pytest.approx(2 * math.pi)
    assert add(Sin(1.0), Sin(math.sqrt(2))).period is None
    assert mul(poly([0, 1]), Sin(1.0)).period is None


def test_envelope_bounds_values():
    f = mul(poly([0, 1]), scale(0.5, sinoverx(0.5, 0.0, 0)))
    env = f.envelope
    xs = np.linspace(-300, 300, 20001)
    bound = env.M / np.maximum(1.0, np.abs(xs)) ** env.p
    assert np.all(np.abs(f(xs)) <= bound + 1e-12)


# ---------------------------------------------------------------- smart constructors

def test_polynomial_folding():
    f = add(poly([1, 2]), poly([0, 0, 3]), Const(-1))
    assert f.to_source() == poly([0, 2, 3]).to_source()
    assert mul(poly([0, 1]), poly([0, 1])).to_source() == poly([0, 0, 1]).to_source()
    assert poly([2.0]) == Const(2.0)


def test_integer_power():
    f = Sin(1.0) ** 2
    xs = np.linspace(-3, 3, 31)
    assert np.allclose(f(xs), np.sin(xs) ** 2)


# ---------------------------------------------------------------- mollifier and decomposition

@given(st.floats(0.05, 2.0), st.floats(-10, 10), st.integers(0, 10_000))
@settings(max_examples=60, deadline=None)
def test_mollifier_preserves_centre_value_and_is_dominated(delta, x_eps, seed):
    rng = np.random.default_rng(seed)
    f = trig_poly(rng.uniform(0, 2, 3), rng.standard_normal(3), rng.standard_normal(3))
    F = mollify(f, delta, x_eps)
    assert abs(F(x_eps) - f(x_eps)) <= 1e-12 * max(1.0, abs(f(x_eps)))
    xs = np.linspace(x_eps - 40, x_eps + 40, 4001)
    fv = np.abs(f(xs))
    assert np.all(np.abs(F(xs)) <= fv * (1 + 4 * np.finfo(float).eps) + 1e-300)
    assert F.type_bound == pytest.approx(f.type_bound + delta)


def test_mollifier_rejects_nonpositive_delta():
    with pytest.raises(ValueError):
        mollify(Sin(1.0), 0.0, 0.0)


def test_real_decomposition_rotation_attains_modulus():
    d = real_decompose(Cos(1.0), Sin(1.0))
    x = 0.7
    G = d.rotate(d.phase(x))
    assert G(x) == pytest.approx(d.modulus(x))
    xs = np.linspace(-5, 5, 101)
    assert np.all(np.abs(G(xs)) <= d.modulus(xs) + 1e-14)
