import itertools
from math import comb

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _oracles import antisymmetric_tensor, contraction_oracle, plucker_by_minors, random_spvector
from plurirank.errors import DomainError
from plurirank.exterior import (
    PPForm,
    PPMatrix,
    compound_matrix,
    contract_beta,
    enumerate_multiindices,
    pair,
    plucker_from_frame,
    pp_from_plucker,
    pull_form,
    push_matrix,
    trace,
)
from plurirank.linalg import complex_gaussian

kp = st.integers(2, 6).flatmap(lambda k: st.tuples(st.just(k), st.integers(1, k)))


def test_multiindices_lexicographic():
    assert enumerate_multiindices(4, 2) == [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
    assert enumerate_multiindices(3, 0) == [()]
    assert enumerate_multiindices(3, 3) == [(0, 1, 2)]


@pytest.mark.parametrize("k,p", [(3, 4), (-1, 0), (2, -1)])
def test_multiindices_reject_bad_shapes(k, p):
    with pytest.raises(DomainError):
        enumerate_multiindices(k, p)


@given(kp)
def test_multiindex_count(shape):
    k, p = shape
    assert len(enumerate_multiindices(k, p)) == comb(k, p)


def test_plucker_of_coordinate_frame():
    w = plucker_from_frame(np.eye(4)[:, [0, 2]])
    expected = np.zeros(6)
    expected[1] = 1.0
    np.testing.assert_allclose(w.coeffs, expected)


def test_plucker_matches_minors_and_antisymmetric_tensor():
    rng = np.random.default_rng(3)
    for k, p in [(3, 1), (4, 2), (5, 3), (6, 2)]:
        f = complex_gaussian(rng, (k, p))
        w = plucker_from_frame(f).coeffs
        np.testing.assert_allclose(w, plucker_by_minors(f), atol=1e-12)
        tens = antisymmetric_tensor(f)
        for n, idx in enumerate(itertools.combinations(range(k), p)):
            assert abs(tens[idx] - w[n]) < 1e-12


@settings(max_examples=50, deadline=None)
@given(kp, st.integers(0, 2**32 - 1))
def test_plucker_norm_is_gram_determinant(shape, seed):
    k, p = shape
    f = complex_gaussian(np.random.default_rng(seed), (k, p))
    w = plucker_from_frame(f)
    gram = np.linalg.det(f.conj().T @ f).real
    assert w.norm**2 == pytest.approx(gram, rel=1e-9)


@settings(max_examples=50, deadline=None)
@given(kp, st.integers(0, 2**32 - 1))
def test_plucker_scales_by_determinant_under_change_of_frame(shape, seed):
    k, p = shape
    rng = np.random.default_rng(seed)
    f = complex_gaussian(rng, (k, p))
    g = complex_gaussian(rng, (p, p))
    lhs = plucker_from_frame(f @ g).coeffs
    rhs = np.linalg.det(g) * plucker_from_frame(f).coeffs
    np.testing.assert_allclose(lhs, rhs, atol=1e-9 * max(1.0, np.abs(rhs).max()))


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 3), st.integers(0, 2**32 - 1))
def test_compound_matrix_is_multiplicative(p, seed):
    rng = np.random.default_rng(seed)
    a = complex_gaussian(rng, (4, 5))
    b = complex_gaussian(rng, (5, 4))
    np.testing.assert_allclose(
        compound_matrix(a @ b, p), compound_matrix(a, p) @ compound_matrix(b, p), atol=1e-9
    )


def test_compound_of_frame_action():
    rng = np.random.default_rng(0)
    a = complex_gaussian(rng, (5, 4))
    f = complex_gaussian(rng, (4, 2))
    np.testing.assert_allclose(
        compound_matrix(a, 2) @ plucker_from_frame(f).coeffs, plucker_from_frame(a @ f).coeffs, atol=1e-10
    )


def test_ppmatrix_rejects_non_hermitian():
    with pytest.raises(DomainError):
        PPMatrix(2, 1, np.array([[1, 1], [0, 1]]))
    with pytest.raises(DomainError):
        PPMatrix(3, 1, np.eye(2))


def test_contract_beta_of_decomposable_frame():
    # e1 ^ e2 in C^3: contraction is the projector onto span(e1, e2)
    t = pp_from_plucker(plucker_from_frame(np.eye(3)[:, :2]))
    np.testing.assert_allclose(contract_beta(t), np.diag([1.0, 1.0, 0.0]), atol=1e-14)


def test_contract_beta_p1_is_identity_map():
    h = np.array([[2.0, 1j], [-1j, 1.0]])
    np.testing.assert_allclose(contract_beta(PPMatrix(2, 1, h)), h)


def test_contract_beta_rejects_p0():
    with pytest.raises(DomainError):
        contract_beta(PPMatrix(3, 0, np.ones((1, 1))))


def test_contract_beta_matches_permutation_oracle():
    rng = np.random.default_rng(11)
    for k, p, n in [(3, 2, 2), (4, 2, 3), (5, 3, 2), (6, 3, 4), (6, 2, 1), (4, 4, 1)]:
        t = random_spvector(rng, k, p, n)
        np.testing.assert_allclose(contract_beta(t.matrix), contraction_oracle(t), atol=1e-10)


def test_pairing_and_trace():
    t = pp_from_plucker(plucker_from_frame(np.eye(3)[:, :2]))
    assert pair(t, PPForm.identity(3, 2)) == pytest.approx(1.0)
    assert pair(t, PPForm.zero(3, 2)) == 0.0
    assert trace(t) == pytest.approx(1.0)
    assert trace(t * 2.5 + t) == pytest.approx(3.5)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 3), st.integers(0, 2**32 - 1))
def test_push_and_pull_are_adjoint(p, seed):
    rng = np.random.default_rng(seed)
    a = complex_gaussian(rng, (4, 5))
    t = random_spvector(rng, 5, p, 3).matrix
    g = complex_gaussian(rng, (comb(4, p), comb(4, p)))
    phi = PPForm(4, p, g + g.conj().T)
    lhs = pair(push_matrix(a, t), phi)
    rhs = pair(t, pull_form(a, phi))
    assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-9)
