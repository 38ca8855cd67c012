import math
from fractions import Fraction

import numpy as np
import pytest

from cohstates.errors import NotHermitian
from cohstates.models import (
    MODEL_TAGS,
    build_model,
    degeneracy_free_check,
    hermitian_coupling_diagonalize,
    two_fermion_spectrum,
)
from cohstates.spectrum import normalization

F = Fraction


def exact_table():
    return two_fermion_spectrum(F(1), F(1, 5), F(9, 20), F(1, 10), F(1, 10))


def test_table_rows_exact():
    t = exact_table()
    w, e1, e2, g1, g2 = F(1), F(1, 5), F(9, 20), F(1, 10), F(1, 10)
    assert t.row(0, 0).ground == 0
    assert t.row(1, 0).ground == e1 - g1**2 / w == F(19, 100)
    assert t.row(0, 1).ground == e2 - g2**2 / w == F(11, 25)
    assert t.row(1, 1).ground == e1 + e2 - (g1 + g2) ** 2 / w == F(61, 100)
    assert t.energy(1, 1, 3) == 3 + F(61, 100)


def test_table_branches_are_shifted_oscillators():
    br = exact_table().branch_set()
    for b in br.branches:
        np.testing.assert_array_equal(b.levels(5), np.arange(6))
    assert [b.offset for b in br.branches] == [0.0, 0.19, 0.44, 0.61]


def test_shift_operators_satisfy_ccr():
    t = exact_table()
    for k, l in ((0, 0), (1, 0), (0, 1), (1, 1)):
        assert t.commutator_residual(k, l, 12) <= 1e-12


def test_degeneracy_free_example():
    chk = degeneracy_free_check(1.0, 0.2, 0.45, 0.1, 0.1)
    assert chk.ok
    np.testing.assert_allclose(chk.spectrum.levels(5), [0, 0.19, 0.44, 0.63, 1.0, 1.19], atol=1e-15)


def test_degeneracy_free_fails_by_symmetry():
    chk = degeneracy_free_check(1.0, 0.2, 0.2, 0.0, 0.0)
    assert not chk.ok and "E1 < E2" in chk.violated


def test_hermitian_diagonal_input():
    V, gd = hermitian_coupling_diagonalize([[0.1, 0], [0, 0.3]])
    np.testing.assert_allclose(np.diag(gd).real, [0.3, 0.1])
    np.testing.assert_allclose(np.abs(V), [[0, 1], [1, 0]], atol=1e-15)


def test_hermitian_pauli_x():
    _, gd = hermitian_coupling_diagonalize([[0, 1], [1, 0]])
    np.testing.assert_allclose(np.diag(gd).real, [1, -1], atol=1e-15)


def test_hermitian_random_against_characteristic_roots():
    rng = np.random.default_rng(7)
    for _ in range(20):
        a, d = rng.normal(size=2)
        b = complex(*rng.normal(size=2))
        g = np.array([[a, b], [np.conj(b), d]])
        V, gd = hermitian_coupling_diagonalize(g)
        assert np.max(np.abs(V @ g @ V.conj().T - gd)) <= 1e-12
        # roots of x^2 - (a+d) x + (ad - |b|^2)
        disc = math.sqrt((a - d) ** 2 + 4 * abs(b) ** 2)
        np.testing.assert_allclose(np.diag(gd).real, [(a + d + disc) / 2, (a + d - disc) / 2], atol=1e-12)


def test_hermitian_rejects_non_hermitian():
    with pytest.raises(NotHermitian):
        hermitian_coupling_diagonalize([[0, 1], [2, 0]])


def test_example1_descriptor():
    m = build_model("example1")
    assert m.degeneracy(0) == 1 and m.degeneracy(5) == 2
    assert normalization(m.spectrum, m.degeneracy, 1.0).value == pytest.approx(math.e, rel=1e-14)
    assert m.measure.atoms == ((0.0, -1.0),)


def test_example2_descriptor():
    m = build_model("example2", m=1.0, k=2.5)
    assert [m.degeneracy(n) for n in (0, 1, 4, 5)] == [1, 1, 3, 3]
    assert m.extras["frequency_ratio"] == pytest.approx(2.0, rel=1e-15)
    assert m.measure.weak_only


def test_example3_descriptor():
    m = build_model("example3")
    assert [m.degeneracy(n) for n in range(3)] == [1, 3, 6]
    n = 4
    assert math.factorial(n) * m.degeneracy(n) == math.factorial(n + 2) // 2


def test_example3_weak_field_warning():
    with pytest.warns(UserWarning):
        build_model("example3", e=1.0, B=1.0)


def test_model_cards_are_json():
    import json

    for tag in MODEL_TAGS:
        json.dumps(build_model(tag).model_card())
