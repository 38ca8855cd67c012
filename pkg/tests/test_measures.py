import math
from fractions import Fraction

import numpy as np
import pytest

from cohstates.errors import NoClosedForm, PrecisionLoss, QuadratureFailure, TestFunctionOutOfClass
from cohstates.measures import (
    RadialMeasure,
    TestFunction,
    closed_form_measure,
    density_eval,
    exact_targets,
    laguerre_coefficients,
    pairing_bound,
    target_moments,
    verify_moments,
    weak_pairing,
)
from cohstates.spectrum import DegeneracySequence, EnergySpectrum

LINEAR = EnergySpectrum.linear()
EX1 = DegeneracySequence.example1()
EX2 = DegeneracySequence.example2()
EX3 = DegeneracySequence.example3()

# Frozen by the independent oracle (even/odd split of the alternating binomial sums).
ORACLE_D = [1, 0, 1, 2, 4, 8, 16, 32, 64, 128, 256, 512, 1024, 2048, 4096, 8192, 16384]
ORACLE_F12_AT_2 = -131.41783489998247
ORACLE_BOUND_8_12 = Fraction(134656, 467775)
ORACLE_BOUND_12_16 = Fraction(475136, 127702575)


def example2_series(N):
    return laguerre_coefficients(exact_targets(LINEAR, EX2, N))


@pytest.mark.parametrize(
    "deg, n, expected",
    [(EX1, 0, 1), (EX1, 3, 12), (EX2, 4, 72), (EX2, 5, 360), (EX3, 2, 12)],
)
def test_target_moments(deg, n, expected):
    assert target_moments(LINEAR, deg, n) == expected


def test_laguerre_coefficients_example2_exact():
    series = example2_series(16)
    assert list(series.coefficients) == [Fraction(d) for d in ORACLE_D]
    assert series.orthonormality_residual < 1e-12


def test_laguerre_coefficients_reject_inexact_floats():
    with pytest.raises(PrecisionLoss):
        laguerre_coefficients([1.0, 0.1])
    assert laguerre_coefficients([1.0, 0.5], allow_float_lift=True).coefficients[1] == Fraction(1, 2)


def test_density_unit_series_is_exponential():
    series = laguerre_coefficients([1])
    x = np.linspace(0, 5, 11)
    np.testing.assert_allclose(density_eval(series, x).value, np.exp(-x), rtol=1e-15)


def test_density_at_zero_is_coefficient_sum():
    series = example2_series(12)
    assert density_eval(series, 0.0).value == pytest.approx(float(sum(series.coefficients)), rel=1e-15)


def test_density_example2_pinned():
    series = example2_series(12)
    assert density_eval(series, 2.0).value == pytest.approx(ORACLE_F12_AT_2, rel=1e-12)


def test_example2_partial_sum_is_signed():
    m = RadialMeasure.laguerre(example2_series(12))
    assert m.nonpositive_somewhere and m.weak_only


def test_verify_moments_example1():
    rep = verify_moments(closed_form_measure("example1"), LINEAR, EX1, 12)
    assert rep.passed
    assert rep.moments[0] == pytest.approx(1.0, rel=1e-12)
    assert rep.moments[5] == pytest.approx(240.0, rel=1e-8)


def test_verify_moments_gamma_n7():
    rep = verify_moments(closed_form_measure("gk-linear"), LINEAR, DegeneracySequence.constant(), 7)
    assert rep.moments[7] == pytest.approx(5040.0, rel=1e-12)


def test_verify_moments_power_measure_bounded_spectrum():
    spec = EnergySpectrum.bounded(2.0, 1.0)
    rep = verify_moments(RadialMeasure.power(2.0, 1.0), spec, DegeneracySequence.constant(), 12)
    assert rep.passed


def test_verify_moments_detects_quadrature_drift():
    with pytest.raises(QuadratureFailure):
        verify_moments(closed_form_measure("gk-linear"), LINEAR, DegeneracySequence.constant(), 60, nodes=8)


def test_closed_form_measures():
    m = closed_form_measure("example1")
    assert m.atoms == ((0.0, -1.0),)
    assert m.params == {"c": 2.0, "a": 0.0}
    with pytest.raises(NoClosedForm):
        closed_form_measure("example2")


def test_pairing_bounds_match_oracle():
    series = example2_series(24)
    assert pairing_bound(series, 8, 12) == pytest.approx(float(ORACLE_BOUND_8_12), rel=1e-15)
    assert pairing_bound(series, 12, 16) == pytest.approx(float(ORACLE_BOUND_12_16), rel=1e-15)
    assert pairing_bound(series, 20, 24) < 1e-3


def test_weak_pairing_equal_orders_is_zero():
    s = example2_series(8)
    assert weak_pairing(s, s, TestFunction.normalized()).value == 0.0


@pytest.mark.parametrize("center, half_width", [(0.5, 0.5), (0.4, 0.3)])
def test_weak_pairing_within_bound(center, half_width):
    phi = TestFunction.normalized(center, half_width)
    assert phi.in_class()
    for M, N in ((8, 12), (12, 16)):
        res = weak_pairing(example2_series(N), example2_series(M), phi)
        assert res.ok and abs(res.value) <= res.bound


def test_unscaled_bump_is_out_of_class():
    with pytest.raises(TestFunctionOutOfClass):
        weak_pairing(example2_series(12), example2_series(8), TestFunction())


def test_bump_derivative_matches_finite_difference():
    phi = TestFunction(0.5, 0.5)
    x = np.linspace(0.2, 0.8, 7)
    h = 1e-5
    for k in range(3):
        fd = (phi.derivative(k, x + h) - phi.derivative(k, x - h)) / (2 * h)
        np.testing.assert_allclose(phi.derivative(k + 1, x), fd, rtol=1e-6, atol=1e-9)


def test_measure_round_trip():
    m = closed_form_measure("example1")
    back = RadialMeasure.from_dict(m.to_dict())
    assert back.moment(4) == pytest.approx(m.moment(4), rel=1e-15)
    lag = RadialMeasure.laguerre(example2_series(6))
    assert RadialMeasure.from_dict(lag.to_dict()).series.coefficients == lag.series.coefficients


def test_total_mass_is_one():
    for tag in ("gk-linear", "example1", "example3"):
        assert closed_form_measure(tag).moment(0) == pytest.approx(1.0, rel=1e-12)
