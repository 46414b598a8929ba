import math

import numpy as np
import pytest

from rieszschur.certificates import (Certificate, HypothesisError, Inequality, Verdict,
                                     check_classic_schur, check_cor_sin, check_cor_x,
                                     check_duffin_schaeffer, check_main, diagnose_equality, judge,
                                     main_constant)
from rieszschur.catalog import random_algebraic
from rieszschur.expr import Const, Cos, Sin, add, mul, poly, scale, sinoverx, sinratio
from rieszschur.norms import Enclosure
from rieszschur.sharpness import sharpness_search


def enc(lo, hi, certified=True):
    return Enclosure(lo, hi, 0.0, certified)


# ---------------------------------------------------------------- judge

def test_judge_equality_band():
    margin, verdict, _ = judge(enc(1.0, 1.0), 2.0, enc(0.5, 0.5))
    assert verdict is Verdict.EQUALITY_WITHIN_TOL and margin == 0.0


def test_judge_certified_violation_needs_separated_enclosures():
    _, verdict, _ = judge(enc(1.5, 1.5), 1.0, enc(1.0, 1.0))
    assert verdict is Verdict.VIOLATION_SUSPECTED
    _, verdict, note = judge(enc(1.5, 1.6), 1.0, enc(1.0, 1.7))
    assert verdict is Verdict.HOLDS_OBSERVED and "inconclusive" in note


def test_judge_uncertified_never_reports_violation():
    _, verdict, _ = judge(enc(3.0, 3.0, certified=False), 1.0, enc(1.0, 1.0))
    assert verdict is Verdict.HOLDS_OBSERVED


def test_judge_strict_inequality():
    margin, verdict, _ = judge(enc(0.5, 0.6), 1.0, enc(1.0, 1.0))
    assert verdict is Verdict.HOLDS_CERTIFIED and margin == pytest.approx(0.4)


# ---------------------------------------------------------------- main inequality

def test_sin_times_cos_is_an_equality_case():
    cert = check_main(Sin(1.0), Cos(1.0), 1.0, 1.0)
    assert cert.verdict is Verdict.EQUALITY_WITHIN_TOL
    assert cert.constant == pytest.approx(2.0, rel=1e-10)
    diag = cert.equality_diag
    assert diag is not None and not diag.fit_failed
    assert diag.fitted_S == pytest.approx(0.5, abs=1e-10)
    assert diag.fitted_C == pytest.approx(0.0, abs=1e-10)
    assert diag.residual_sup <= 1e-10


def test_constant_weight_gives_constant_one():
    cert = check_main(Const(1.0), Const(1.0), 1.0, 0.0)
    assert cert.constant == pytest.approx(1.0)
    assert cert.holds


def test_constant_weight_with_trig_f():
    cert = check_main(Const(2.0), Sin(1.0), 1.0, 0.0)
    # A_1(2) = 4, so the constant is 1/2 and ||2 sin|| = 2 makes it tight
    assert cert.constant == pytest.approx(0.5)
    assert cert.verdict is Verdict.EQUALITY_WITHIN_TOL


def test_dirichlet_kernel_is_extremal_for_sine_weight():
    cert = check_cor_sin(sinratio(4, 1), 3.0, 1.0)
    assert cert.constant == pytest.approx(4.0)
    assert cert.verdict is Verdict.EQUALITY_WITHIN_TOL


def test_linear_weight_with_squared_sinc():
    f = mul(sinoverx(1.0), sinoverx(1.0))
    cert = check_cor_x(f, 2.0)
    assert cert.verdict is Verdict.HOLDS_CERTIFIED
    # ||sin^2(x)/x|| = 0.72461135...
    assert cert.rhs_norm.lo == pytest.approx(0.7246113537767, abs=1e-9)
    assert cert.margin == pytest.approx(2 * 0.7246113537767 - 1.0, abs=1e-8)


def test_linear_weight_with_bounded_non_decaying_f_is_vacuous():
    cert = check_cor_x(Cos(1.0), 1.0)
    assert cert.rhs_norm.unbounded_suspected
    assert cert.verdict is Verdict.HOLDS_OBSERVED


def test_type_hypotheses_rejected():
    with pytest.raises(HypothesisError, match="Q in B_tau"):
        check_main(Sin(2.0), Sin(1.0), 1.0, 1.0)
    with pytest.raises(HypothesisError, match="f in B_sigma"):
        check_main(Sin(1.0), Sin(3.0), 1.0, 1.0)
    with pytest.raises(HypothesisError):
        check_main(Sin(1.0), Sin(1.0), 0.0, 1.0)


def test_weight_with_double_zero_fails_positivity_condition():
    with pytest.raises(HypothesisError) as err:
        main_constant(mul(Sin(1.0), Sin(1.0)), 1.0, 2.0)
    assert err.value.condition == "positive A_s(Q)"


def test_certificate_dict_round_trip():
    cert = check_main(Sin(1.0), Cos(1.0), 1.0, 1.0)
    again = Certificate.from_dict(cert.to_dict())
    assert again == cert


# ---------------------------------------------------------------- classical trio

def test_trig_constant_is_equality_for_n_zero():
    cert = check_classic_schur(Inequality.RS_TRIG, ([1.0], []), 0)
    assert cert.verdict is Verdict.EQUALITY_WITHIN_TOL


@pytest.mark.parametrize("n", [1, 2, 3, 5])
def test_trig_dirichlet_equality(n):
    cert = check_classic_schur("RS_TRIG", sinratio(n + 1, 1), n)
    assert cert.verdict is Verdict.EQUALITY_WITHIN_TOL


def test_identity_polynomial():
    cert = check_classic_schur("SCHUR_POLY", [0.0, 1.0], 1)
    assert cert.verdict is Verdict.HOLDS_CERTIFIED
    assert cert.details["refined"]["verdict"] == Verdict.EQUALITY_WITHIN_TOL.value
    cert = check_classic_schur("RS_CLASSIC", [0.0, 1.0], 1)
    assert cert.verdict is Verdict.EQUALITY_WITHIN_TOL


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_random_polynomials_hold(n):
    rng = np.random.default_rng(n)
    for _ in range(10):
        P = random_algebraic(rng, n)
        for kind in ("SCHUR_POLY", "RS_CLASSIC"):
            assert check_classic_schur(kind, P, n).holds


def test_degree_above_n_rejected():
    with pytest.raises(HypothesisError):
        check_classic_schur("SCHUR_POLY", [0, 0, 1], 1)


# ---------------------------------------------------------------- Duffin-Schaeffer

def test_pure_sine_is_pointwise_equality():
    cert = check_duffin_schaeffer(Sin(2.0), 2.0)
    assert cert.verdict is Verdict.EQUALITY_WITHIN_TOL
    assert cert.details["equality_everywhere"]


def test_mixed_trig_poly_has_positive_gap():
    cert = check_duffin_schaeffer(add(Sin(1.0), scale(0.5, Cos(2.0))), 2.0)
    assert cert.verdict is Verdict.HOLDS_CERTIFIED
    assert cert.details["min_pointwise_gap"] > 0


# ---------------------------------------------------------------- equality diagnosis

def test_diagnosis_flags_norm_attaining_point():
    Q, f = Sin(1.0), sinratio(3, 1)
    # Qf = sin 3x, which attains its norm at pi/6
    d = diagnose_equality(Q, f, 2.0, 1.0, math.pi / 6)
    assert d.attains_qf_norm
    assert d.fitted_S == pytest.approx(1.0, abs=1e-10)
    assert d.residual_sup <= 1e-10


# ---------------------------------------------------------------- sharpness search

def test_sharpness_without_iterations_stays_below_constant():
    res = sharpness_search(Sin(1.0), 2.0, 1.0, iterations=0)
    assert 0 < res.ratio <= res.constant * (1 + 1e-6)


def test_sharpness_reaches_sine_constant():
    res = sharpness_search(Sin(1.0), 2.0, 1.0)
    assert 2.9 <= res.ratio <= 3 * (1 + 1e-6)
    assert res.basis == "trig"


def test_sharpness_for_linear_weight():
    res = sharpness_search(poly([0.0, 1.0]), 1.0, 0.0)
    assert 0.99 <= res.ratio <= 1 + 1e-6


def test_sharpness_is_reproducible():
    a = sharpness_search(Sin(1.0), 2.0, 1.0, iterations=200, seed=7)
    b = sharpness_search(Sin(1.0), 2.0, 1.0, iterations=200, seed=7)
    assert a.to_dict() == b.to_dict()
