"""Reference computations written without the package's index tables or
compound-matrix code, used as independent oracles in the tests."""

import itertools

import numpy as np

from plurirank.linalg import complex_gaussian, haar_unitary
from plurirank.positivity import SPTerm, SPVector


def perm_sign(perm) -> int:
    inversions = sum(1 for i, j in itertools.combinations(range(len(perm)), 2) if perm[i] > perm[j])
    return -1 if inversions % 2 else 1


def antisymmetric_tensor(frame: np.ndarray) -> np.ndarray:
    """``v_1 ^ ... ^ v_p`` as a full k^p array, summed over all permutations."""
    k, p = frame.shape
    out = np.zeros((k,) * p, dtype=complex)
    for perm in itertools.permutations(range(p)):
        term = frame[:, perm[0]]
        for j in perm[1:]:
            term = np.multiply.outer(term, frame[:, j])
        out += perm_sign(perm) * term
    return out


def plucker_by_minors(frame: np.ndarray) -> np.ndarray:
    k, p = frame.shape
    return np.array([np.linalg.det(frame[list(rows), :]) for rows in itertools.combinations(range(k), p)])


def contraction_oracle(t: SPVector) -> np.ndarray:
    """sum_terms lam * T_{a, i_2..i_p} conj(T_{b, i_2..i_p}) / (p-1)!."""
    k, p = t.k, t.p
    m = np.zeros((k, k), dtype=complex)
    for term in t.terms:
        tens = antisymmetric_tensor(term.frame).reshape(k, -1)
        m += term.lam * tens @ tens.conj().T
    return m / float(np.prod(range(1, p)))


def random_spvector(rng: np.random.Generator, k: int, p: int, n_terms: int, sub_dim: int | None = None) -> SPVector:
    """Random strongly positive vector; frames live in a random subspace of
    dimension ``sub_dim`` (default k) so that ranks below k occur."""
    d = k if sub_dim is None else sub_dim
    basis = haar_unitary(k, rng)[:, :d]
    terms = []
    for _ in range(n_terms):
        frame = basis @ complex_gaussian(rng, (d, p))
        terms.append(SPTerm(float(rng.uniform(0.05, 2.0)), frame))
    return SPVector(k, p, tuple(terms))


def random_shape(rng: np.random.Generator, max_k: int = 6, max_p: int = 3, max_terms: int = 5):
    k = int(rng.integers(2, max_k + 1))
    p = int(rng.integers(1, min(max_p, k - 1) + 1))
    n_terms = int(rng.integers(1, max_terms + 1))
    sub_dim = int(rng.integers(p, k + 1))
    return k, p, n_terms, sub_dim


def subspace_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Spectral norm of the difference of orthogonal projectors onto range(a), range(b)."""
    qa, _ = np.linalg.qr(a)
    qb, _ = np.linalg.qr(b)
    return float(np.linalg.norm(qa @ qa.conj().T - qb @ qb.conj().T, 2))
