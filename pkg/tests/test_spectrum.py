import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cohstates.errors import NonMonotoneSpectrum, OutsideConvergenceDomain, UnshiftedSpectrum
from cohstates.spectrum import (
    BranchSet,
    DegeneracySequence,
    EnergySpectrum,
    eps_factorial,
    log_eps_factorial,
    normalization,
    radius_of_convergence,
    series_terms,
    shift_to_zero,
)

LINEAR = EnergySpectrum.linear()


def halving():
    return EnergySpectrum.from_rule(lambda n: 0.0 if n == 0 else 1 - 2.0**-n, descriptor="halving")


@pytest.mark.parametrize("n, expected", [(0, 1.0), (5, 120.0)])
def test_eps_factorial_linear(n, expected):
    assert eps_factorial(LINEAR, n) == expected


def test_eps_factorial_explicit_levels():
    assert eps_factorial(EnergySpectrum.from_levels([0, 0.5, 1.5]), 2) == 0.75


def test_eps_factorial_log_space_agrees_with_lgamma():
    assert log_eps_factorial(LINEAR, 200) == pytest.approx(math.lgamma(201), rel=1e-14)
    with pytest.raises(OverflowError):
        eps_factorial(LINEAR, 200)


def test_eps_factorial_rejects_disorder():
    spec = EnergySpectrum.from_levels([0, 2, 1])
    with pytest.raises(NonMonotoneSpectrum):
        spec.check_increasing(2)


def test_shift_to_zero_records_offset_and_is_idempotent():
    spec = shift_to_zero(EnergySpectrum.from_levels([0.5, 1.5, 2.5]))
    np.testing.assert_array_equal(spec.levels(2), [0, 1, 2])
    assert spec.offset == 0.5
    again = shift_to_zero(spec)
    assert again.offset == 0.5
    np.testing.assert_array_equal(again.levels(2), [0, 1, 2])


def test_shift_to_zero_on_shifted_spectrum_is_identity():
    spec = shift_to_zero(LINEAR)
    assert spec.offset == 0.0
    np.testing.assert_array_equal(spec.levels(5), LINEAR.levels(5))


def test_branch_set_rejects_unshifted():
    with pytest.raises(UnshiftedSpectrum):
        BranchSet((EnergySpectrum.from_levels([0.1, 1.1]),))


def test_radius_linear_is_infinite():
    assert math.isinf(radius_of_convergence(LINEAR).value)


def test_radius_halving_spectrum_is_one():
    est = radius_of_convergence(halving())
    assert est.value == pytest.approx(1.0, abs=1e-12)
    assert est.status in ("stabilized", "closed-form")


def test_radius_example3_is_infinite():
    assert math.isinf(radius_of_convergence(LINEAR, DegeneracySequence.example3()).value)


def test_radius_bounded_spectrum_is_its_accumulation_point():
    assert radius_of_convergence(EnergySpectrum.bounded(2.0, 1.0)).value == 2.0


@pytest.mark.parametrize("J", [0.1, 1.0, 2.0, 5.0, 30.0])
def test_normalization_linear_is_exponential(J):
    assert normalization(LINEAR, None, J).value == pytest.approx(math.exp(J), rel=1e-13)


def test_normalization_example1_at_one_is_e():
    assert normalization(LINEAR, DegeneracySequence.example1(), 1.0).value == pytest.approx(math.e, rel=1e-14)


def test_normalization_at_zero_is_one():
    for spec in (LINEAR, halving(), EnergySpectrum.bounded(1.0)):
        assert normalization(spec, None, 0.0).value == 1.0


def test_normalization_outside_domain():
    with pytest.raises(OutsideConvergenceDomain):
        normalization(halving(), None, 1.5)


def test_normalization_halving_matches_direct_sum():
    J = 0.5
    direct, fact = 0.0, 1.0
    for n in range(400):
        if n:
            fact *= 1 - 2.0**-n
        direct += J**n / fact
    res = normalization(halving(), None, J)
    assert res.value == pytest.approx(direct, rel=1e-13)


def test_normalization_bounded_closed_form():
    # eps_n! = L^n (a+1)/(n+a+1), so N = sum (J/L)^n (n+a+1)/(a+1)
    L, a, J = 2.0, 1.0, 1.5
    x = J / L
    closed = (x / (1 - x) ** 2 + (a + 1) / (1 - x)) / (a + 1)
    assert normalization(EnergySpectrum.bounded(L, a), None, J).value == pytest.approx(closed, rel=1e-13)


def test_series_tail_bound_is_certified():
    s = series_terms(LINEAR, math.log(5.0), 1e-14)
    total = float(np.sum(s.terms))
    # truncation is bounded by tail_bound; summation adds rounding of order depth * eps
    assert abs(math.exp(5.0) - total) / total <= s.tail_bound + (s.depth + 1) * np.finfo(float).eps


@settings(max_examples=40, deadline=None)
@given(J=st.floats(min_value=0.0, max_value=40.0))
def test_normalization_property_exponential(J):
    assert normalization(LINEAR, None, J).value == pytest.approx(math.exp(J), rel=1e-12)


def test_degeneracy_sequences():
    assert DegeneracySequence.example1().values(3).tolist() == [1, 2, 2, 2]
    assert DegeneracySequence.example2().values(5).tolist() == [1, 1, 2, 2, 3, 3]
    assert DegeneracySequence.example3().values(2).tolist() == [1, 3, 6]


def test_spectrum_round_trip():
    spec = EnergySpectrum.bounded(2.0, 0.5, omega=1.5)
    back = EnergySpectrum.from_dict(spec.to_dict())
    np.testing.assert_array_equal(back.levels(10), spec.levels(10))
    assert back.fingerprint() == spec.fingerprint()
