import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _oracles import random_shape, random_spvector, subspace_distance
from plurirank.errors import DomainError
from plurirank.exterior import contract_beta
from plurirank.linalg import complex_gaussian
from plurirank.positivity import (
    SPTerm,
    SPVector,
    average,
    det_root_concavity_gap,
    is_decomposable_by_rank,
    is_psd,
    kernel_inheritance_residual,
    lemma_i_check,
    normalize_trace,
    rank_via_contraction,
    rank_via_span,
)

seeds = st.integers(0, 2**32 - 1)


def test_decomposable_has_rank_p():
    t = SPVector.from_frames([np.eye(4)[:, :2]])
    assert rank_via_span(t) == rank_via_contraction(t) == 2
    assert is_decomposable_by_rank(t)


def test_two_planes_in_c4():
    # e1^e2 + e3^e4 spans everything
    e = np.eye(4)
    t = SPVector.from_frames([e[:, :2], e[:, 2:]])
    assert rank_via_span(t) == rank_via_contraction(t) == 4
    assert not is_decomposable_by_rank(t)


def test_zero_vector_rank_and_decomposability():
    t = SPVector(3, 1)
    assert rank_via_span(t) == rank_via_contraction(t) == 0
    with pytest.raises(DomainError):
        is_decomposable_by_rank(t)


def test_degenerate_frame_is_dead():
    v = np.array([1.0, 2.0, 0.0])
    t = SPVector.from_frames([np.column_stack([v, 2 * v])])
    assert not t.terms[0].is_live
    assert rank_via_span(t) == 0


def test_negative_weight_rejected():
    with pytest.raises(DomainError):
        SPTerm(-1.0, np.eye(3)[:, :1])


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_rank_algorithms_agree(seed):
    rng = np.random.default_rng(seed)
    k, p, n, d = random_shape(rng)
    t = random_spvector(rng, k, p, n, d)
    assert rank_via_span(t) == rank_via_contraction(t)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_contraction_range_is_span(seed):
    rng = np.random.default_rng(seed)
    k, p, n, d = random_shape(rng)
    t = random_spvector(rng, k, p, n, d)
    m = contract_beta(t.matrix)
    ev, vec = np.linalg.eigh(m)
    rng_basis = vec[:, ev > 1e-9 * ev.max()]
    assert subspace_distance(rng_basis, t.span_basis()) < 1e-7


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_strongly_positive_is_psd_and_rank_bounded(seed):
    rng = np.random.default_rng(seed)
    k, p, n, d = random_shape(rng)
    t = random_spvector(rng, k, p, n, d)
    assert is_psd(t)
    assert p <= rank_via_span(t) <= min(k, n * p, d)


@settings(max_examples=40, deadline=None)
@given(seeds, st.floats(0.01, 100.0))
def test_rank_invariant_under_positive_scaling_and_normalization(seed, s):
    rng = np.random.default_rng(seed)
    k, p, n, d = random_shape(rng)
    t = random_spvector(rng, k, p, n, d)
    r = rank_via_span(t)
    assert rank_via_span(t.scaled(s)) == r
    nt = normalize_trace(t)
    assert nt.trace == pytest.approx(1.0, abs=1e-12)
    assert rank_via_contraction(nt) == r


def test_rank_of_sum_is_rank_of_joint_span():
    rng = np.random.default_rng(5)
    a = random_spvector(rng, 6, 2, 1)
    b = random_spvector(rng, 6, 2, 1)
    ab = SPVector(6, 2, a.terms + b.terms)
    assert rank_via_span(ab) == 4 == rank_via_contraction(ab)


def test_map_frames_kills_vanishing_terms():
    t = SPVector.from_frames([np.eye(3)[:, :1], np.eye(3)[:, 1:2]])
    a = np.diag([1.0, 0.0, 1.0])
    pushed = t.map_frames(a)
    assert [term.is_live for term in pushed.terms] == [True, False]
    assert rank_via_span(pushed) == 1


def test_normalize_zero_raises():
    with pytest.raises(DomainError):
        normalize_trace(SPVector(3, 1))


def _trace_one_family(rng, k, p, size, sub_dim):
    return [normalize_trace(random_spvector(rng, k, p, int(rng.integers(1, 3)), sub_dim)) for _ in range(size)]


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_kernel_inheritance(seed):
    rng = np.random.default_rng(seed)
    k = int(rng.integers(2, 6))
    p = int(rng.integers(1, k))
    fam = _trace_one_family(rng, k, p, int(rng.integers(1, 5)), int(rng.integers(p, k + 1)))
    mu = rng.dirichlet(np.ones(len(fam)))
    assert kernel_inheritance_residual(fam, mu) <= 1e-9


def test_lemma_i_on_rank_deficient_average():
    rng = np.random.default_rng(2)
    basis = np.eye(5)[:, :3]
    fam = [
        normalize_trace(SPVector.from_frames([basis @ complex_gaussian(rng, (3, 2))])) for _ in range(4)
    ]
    res = lemma_i_check(fam, np.full(4, 0.25))
    assert res.avg_rank == 3
    assert res.fraction_full_rank == 0.0
    assert res.holds


def test_lemma_i_with_full_rank_member():
    e = np.eye(3)
    full = normalize_trace(SPVector.from_frames([e[:, :1], e[:, 1:2], e[:, 2:]]))
    thin = normalize_trace(SPVector.from_frames([e[:, :1]]))
    res = lemma_i_check([full, thin], [0.5, 0.5])
    assert res.avg_rank == 3 and res.holds
    # a null-weight full-rank member does not count
    res0 = lemma_i_check([full, thin], [0.0, 1.0])
    assert res0.avg_rank == 1 and res0.fraction_full_rank == 0.0 and res0.holds


def test_average_checks_inputs():
    t = normalize_trace(SPVector.from_frames([np.eye(3)[:, :1]]))
    with pytest.raises(DomainError):
        average([t, t], [0.6, 0.6])
    with pytest.raises(DomainError):
        average([t.scaled(2.0)], [1.0])
    with pytest.raises(DomainError):
        average([], [])


@settings(max_examples=60, deadline=None)
@given(seeds, st.floats(0.0, 1.0))
def test_det_root_concavity(seed, s):
    rng = np.random.default_rng(seed)
    k = int(rng.integers(1, 6))
    ga = complex_gaussian(rng, (k, int(rng.integers(1, k + 1))))
    gb = complex_gaussian(rng, (k, k))
    a, b = ga @ ga.conj().T, gb @ gb.conj().T
    scale = max(np.linalg.norm(a, 2), np.linalg.norm(b, 2))
    assert det_root_concavity_gap(a, b, s) >= -1e-10 * scale
