import json
import math

import numpy as np
import pytest

from cohstates.errors import BranchOutOfRange, SpectrumMismatch
from cohstates.models import boson_two_fermion
from cohstates.spectrum import DegeneracySequence, EnergySpectrum
from cohstates.states import (
    LabeledKet,
    action_angle,
    bcs,
    bcs_z,
    branch_vcs,
    complex_label,
    degenerate_state,
    energy_expectation,
    evolve,
    gk_state,
    vcs1,
    vcs1_family,
    vcs1_z,
    vcs2,
)

LINEAR = EnergySpectrum.linear()


def test_gk_ground_state_at_zero_action():
    ket = gk_state(LINEAR, 0.0, 0.3)
    assert ket.coeffs.tolist() == [1.0]


def test_gk_linear_is_canonical_coherent_state():
    J, g = 1.7, 0.4
    ket = gk_state(LINEAR, J, g)
    n = np.arange(ket.truncation + 1)
    ref = np.exp(-J / 2) * J ** (n / 2) * np.exp(-1j * n * g) / np.sqrt([math.factorial(k) for k in n])
    np.testing.assert_allclose(ket.coeffs, ref, rtol=1e-13, atol=1e-300)


def test_gk_norm():
    ket = gk_state(LINEAR, 2.0, 0.7)
    assert abs(ket.norm2() - 1) <= 1e-14


def test_example1_coefficients():
    J, g, th = 1.3, 0.2, 0.9
    ket = degenerate_state(LINEAR, DegeneracySequence.example1(), J, g, th)
    for (n, j), c in zip(ket.labels.tolist(), ket.coeffs):
        if n >= 1:
            ref = math.exp(-J / 2) * J ** (n / 2) * np.exp(-1j * n * g - 1j * j * th) / math.sqrt(2 * math.factorial(n))
            assert abs(c - ref) <= 1e-15


def test_degenerate_with_unit_degeneracy_is_gk_times_phase():
    a = degenerate_state(LINEAR, DegeneracySequence.constant(), 1.1, 0.5, 0.8)
    b = gk_state(LINEAR, 1.1, 0.5)
    np.testing.assert_allclose(a.coeffs, b.coeffs * np.exp(-0.8j), atol=1e-16)


def test_example3_norm():
    ket = degenerate_state(LINEAR, DegeneracySequence.example3(), 1.5, 0.3, 1.0)
    assert abs(ket.norm2() - 1) <= 1e-13


def test_branch_states_orthonormal():
    br = boson_two_fermion().branches
    kets = [branch_vcs(br, j, [0.5, 1.0, 2.0, 5.0], 0.3).ket for j in range(br.N)]
    G = np.array([[a.inner(b) for b in kets] for a in kets])
    np.testing.assert_allclose(G, np.eye(br.N), atol=1e-12)


def test_branch_zero_action_is_branch_ground():
    ket = branch_vcs(boson_two_fermion().branches, 2, 0.0, 0.0).ket
    assert ket.labels.tolist() == [[2, 0]] and ket.coeffs.tolist() == [1.0]


def test_branch_out_of_range():
    with pytest.raises(BranchOutOfRange):
        branch_vcs(boson_two_fermion().branches, 4, 1.0, 0.0)


def test_vcs1_z_form_prefactor():
    z, z2, ell = 0.6 - 0.2j, 0.3 + 0.5j, 2
    ket = vcs1_z(z, z2, ell)
    n = ket.labels[:, 0]
    pref = np.exp(-(abs(z) ** 2 + abs(z2) ** 2) / 2) * np.conj(z2) ** ell / math.sqrt(math.factorial(ell))
    ref = pref * z**n / np.sqrt([math.factorial(k) for k in n])
    np.testing.assert_allclose(ket.coeffs, ref, atol=1e-15)


def test_vcs1_components_sum_to_one():
    total = sum(k.norm2() for k in vcs1_family(LINEAR, 1.0, 0.0, 2.0, 1.0))
    assert abs(total - 1) <= 1e-13


def test_bcs_with_zero_second_action_is_gk_column():
    ket = bcs(LINEAR, 1.2, 0.4, 0.0, 0.9)
    assert set(ket.labels[:, 1].tolist()) == {0}
    np.testing.assert_allclose(ket.coeffs, gk_state(LINEAR, 1.2, 0.4).coeffs, atol=1e-16)


def test_bcs_z_matches_closed_form():
    z, z2 = 0.5 + 0.1j, -0.2 + 0.4j
    ket = bcs_z(z, z2)
    n, l = ket.labels[:, 0], ket.labels[:, 1]
    f = np.array([math.factorial(k) for k in range(ket.truncation + 1)], dtype=float)
    ref = np.exp(-(abs(z) ** 2 + abs(z2) ** 2) / 2) * z**n * np.conj(z2) ** l / np.sqrt(f[n] * f[l])
    np.testing.assert_allclose(ket.coeffs, ref, atol=1e-15)


def test_action_angle_round_trip():
    z = 0.8 - 0.6j
    assert complex_label(*action_angle(z)) == pytest.approx(z, abs=1e-15)


@pytest.mark.parametrize("t", [0.0, 0.1, 1.0, 10.0])
def test_evolution_shifts_angle(t):
    spec = EnergySpectrum.linear(1.3)
    a = evolve(gk_state(spec, 2.0, 0.4), spec, t)
    b = gk_state(spec, 2.0, 0.4 + spec.omega * t)
    assert np.max(np.abs(a.coeffs - b.coeffs)) <= 1e-14


def test_evolution_bcs_shifts_both_angles():
    a = evolve(bcs(LINEAR, 2.0, 0.1, 1.0, 0.5), LINEAR, 1.0)
    b = bcs(LINEAR, 2.0, 1.1, 1.0, 1.5)
    assert np.max(np.abs(a.coeffs - b.coeffs)) <= 1e-14


def test_evolution_rejects_foreign_spectrum():
    with pytest.raises(SpectrumMismatch):
        evolve(gk_state(LINEAR, 1.0, 0.0), EnergySpectrum.linear(2.0), 1.0)


@pytest.mark.parametrize("J", [0.5, 1.0, 2.0, 5.0])
def test_action_identity_gk(J):
    e = energy_expectation(gk_state(LINEAR, J, 0.3), LINEAR)
    assert abs(e.value - J) <= e.error_bound


def test_action_identity_example3():
    e = energy_expectation(degenerate_state(LINEAR, DegeneracySequence.example3(), 2.0, 0.0, 0.0), LINEAR)
    assert abs(e.value - 2.0) <= e.error_bound


def test_action_identity_bcs():
    e = energy_expectation(bcs(LINEAR, 3.0, 0.0, 1.0, 0.0), LINEAR)
    assert abs(e.value - 2.0) <= e.error_bound


def test_action_identity_vcs_families():
    fam = vcs1_family(LINEAR, 2.0, 0.0, 1.0, 0.3)
    e = energy_expectation(fam, LINEAR)
    assert abs(e.value - 2.0) <= e.error_bound
    e2 = energy_expectation(vcs2(LINEAR, 2.0, 0.0, 1.5, 0.3, 1), LINEAR)
    assert abs(e2.value - 1.5) <= e2.error_bound
    e1 = energy_expectation(vcs1(LINEAR, 2.0, 0.0, 1.5, 0.3, 1), LINEAR)
    assert abs(e1.value - 2.0) <= e1.error_bound


def test_ket_json_round_trip_is_bit_identical():
    ket = degenerate_state(LINEAR, DegeneracySequence.example3(), 1.5, 0.3, 1.0)
    back = LabeledKet.from_json(json.dumps(json.loads(ket.to_json())))
    assert np.array_equal(back.coeffs, ket.coeffs)
    assert np.array_equal(back.labels, ket.labels)


def test_ket_csv_columns():
    header = gk_state(LINEAR, 1.0, 0.0).to_csv().splitlines()[0]
    assert header == "n,re,im,modulus2"
    header = bcs(LINEAR, 1.0, 0.0, 1.0, 0.0).to_csv().splitlines()[0]
    assert header == "n,l,re,im,modulus2"


def test_ket_csv_values_parse_as_floats():
    ket = gk_state(LINEAR, 1.0, 0.4)
    rows = ket.to_csv().splitlines()[1:]
    re = [float(r.split(",")[1]) for r in rows]
    assert re == ket.coeffs.real.tolist()
