r"""Coefficient calculus for (p,p)-vectors on a Hermitian space C^k.

A (p,p)-vector is stored by its Hermitian matrix of coefficients ``H[I, J]``
over pairs of increasing multi-indices of length p, enumerated in
lexicographic order. A decomposable strongly positive vector built from a
p-frame with Plücker vector ``w`` is the rank-one matrix ``w w^*``; the
:math:`i^{p^2}` normalisation of the classical form is absorbed so that strong
positivity shows up as positive semidefiniteness and all pairings are real.
"""

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from math import comb

import numpy as np

from .errors import DomainError

MultiIndex = tuple[int, ...]

HERMITIAN_RTOL = 1e-12


def _check_kp(k: int, p: int) -> None:
    if not isinstance(k, (int, np.integer)) or not isinstance(p, (int, np.integer)):
        raise DomainError(f"k and p must be integers, got {k!r}, {p!r}")
    if k < 0 or p < 0:
        raise DomainError(f"k and p must be non-negative, got k={k}, p={p}")
    if p > k:
        raise DomainError(f"degree p={p} exceeds dimension k={k}")


@lru_cache(maxsize=None)
def _multiindices(k: int, p: int) -> tuple[MultiIndex, ...]:
    return tuple(combinations(range(k), p))


def enumerate_multiindices(k: int, p: int) -> list[MultiIndex]:
    """All increasing p-tuples in ``range(k)``, lexicographically ordered."""
    _check_kp(k, p)
    return list(_multiindices(int(k), int(p)))


@lru_cache(maxsize=None)
def _index_table(k: int, p: int) -> dict[MultiIndex, int]:
    return {idx: n for n, idx in enumerate(_multiindices(k, p))}


@lru_cache(maxsize=None)
def _minor_rows(k: int, p: int) -> np.ndarray:
    return np.array(_multiindices(k, p), dtype=int).reshape(comb(k, p), p)


def _check_hermitian(h: np.ndarray, what: str) -> None:
    scale = max(1.0, float(np.max(np.abs(h))) if h.size else 0.0)
    if h.size and np.max(np.abs(h - h.conj().T)) > HERMITIAN_RTOL * scale:
        raise DomainError(f"{what} coefficient matrix is not Hermitian")


@dataclass(frozen=True, eq=False)
class PluckerVector:
    """Plücker coordinates of ``v_1 ^ ... ^ v_p`` in the multi-index basis."""

    k: int
    p: int
    coeffs: np.ndarray

    def __post_init__(self):
        _check_kp(self.k, self.p)
        c = np.asarray(self.coeffs, dtype=complex).reshape(-1)
        if c.shape[0] != comb(self.k, self.p):
            raise DomainError(f"expected {comb(self.k, self.p)} coordinates, got {c.shape[0]}")
        if not np.all(np.isfinite(c)):
            raise DomainError("Plücker coordinates must be finite")
        object.__setattr__(self, "coeffs", c)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))


@dataclass(frozen=True, eq=False)
class PPMatrix:
    """Coefficient matrix of a (p,p)-vector."""

    k: int
    p: int
    H: np.ndarray

    def __post_init__(self):
        _check_kp(self.k, self.p)
        h = np.asarray(self.H, dtype=complex)
        n = comb(self.k, self.p)
        if h.shape != (n, n):
            raise DomainError(f"expected a {n}x{n} coefficient matrix, got {h.shape}")
        _check_hermitian(h, "(p,p)-vector")
        object.__setattr__(self, "H", h)

    def __add__(self, other: "PPMatrix") -> "PPMatrix":
        _same_shape(self, other)
        return PPMatrix(self.k, self.p, self.H + other.H)

    def __mul__(self, s: float) -> "PPMatrix":
        return PPMatrix(self.k, self.p, float(s) * self.H)

    __rmul__ = __mul__


@dataclass(frozen=True, eq=False)
class PPForm:
    """Coefficients of a (p,p)-form, dual to :class:`PPMatrix` under :func:`pair`."""

    k: int
    p: int
    H: np.ndarray

    def __post_init__(self):
        _check_kp(self.k, self.p)
        h = np.asarray(self.H, dtype=complex)
        n = comb(self.k, self.p)
        if h.shape != (n, n):
            raise DomainError(f"expected a {n}x{n} coefficient matrix, got {h.shape}")
        _check_hermitian(h, "(p,p)-form")
        object.__setattr__(self, "H", h)

    @classmethod
    def identity(cls, k: int, p: int) -> "PPForm":
        """The form whose pairing with a (p,p)-vector is its trace."""
        return cls(k, p, np.eye(comb(k, p), dtype=complex))

    @classmethod
    def zero(cls, k: int, p: int) -> "PPForm":
        n = comb(k, p)
        return cls(k, p, np.zeros((n, n), dtype=complex))


def _same_shape(a, b) -> None:
    if (a.k, a.p) != (b.k, b.p):
        raise DomainError(f"shape mismatch: (k,p)=({a.k},{a.p}) vs ({b.k},{b.p})")


def plucker_coeffs(frame: np.ndarray) -> np.ndarray:
    """All p x p minors of a k x p frame matrix, rows chosen by multi-index."""
    k, p = frame.shape
    if p == 0:
        return np.ones(1, dtype=complex)
    rows = _minor_rows(k, p)
    return np.linalg.det(frame[rows, :])


def _frame_matrix(frame, k: int | None = None) -> np.ndarray:
    """Normalise a frame given as a k x p matrix or as a sequence of p k-vectors."""
    if isinstance(frame, np.ndarray) and frame.ndim == 2:
        f = frame.astype(complex, copy=False)
    else:
        vectors = [np.asarray(v, dtype=complex).reshape(-1) for v in frame]
        if not vectors:
            if k is None:
                raise DomainError("empty frame needs an explicit dimension k")
            return np.zeros((k, 0), dtype=complex)
        lengths = {v.shape[0] for v in vectors}
        if len(lengths) != 1:
            raise DomainError(f"frame vectors have inconsistent lengths {sorted(lengths)}")
        f = np.stack(vectors, axis=1)
    if k is not None and f.shape[0] != k:
        raise DomainError(f"frame vectors have dimension {f.shape[0]}, expected {k}")
    if f.shape[1] > f.shape[0]:
        raise DomainError(f"a frame of {f.shape[1]} vectors in dimension {f.shape[0]}")
    return f


def plucker_from_frame(frame, k: int | None = None) -> PluckerVector:
    """Plücker vector of the wedge of the frame vectors.

    ``frame`` is either a sequence of p vectors of length k or a k x p matrix
    whose columns are the vectors.
    """
    f = _frame_matrix(frame, k)
    return PluckerVector(f.shape[0], f.shape[1], plucker_coeffs(f))


def pp_from_plucker(w: PluckerVector) -> PPMatrix:
    """Rank-one matrix ``w w^*`` of the decomposable vector with Plücker vector w."""
    return PPMatrix(w.k, w.p, np.outer(w.coeffs, w.coeffs.conj()))


@lru_cache(maxsize=None)
def _contraction_tensor(k: int, p: int) -> np.ndarray:
    """Signed incidence tensor A[K, a, I] = sign(a, K) when I = sort(K + {a}).

    sign(a, K) is (-1)^(number of elements of K below a), the sign of the
    permutation moving a into sorted position.
    """
    lower = _multiindices(k, p - 1)
    table = _index_table(k, p)
    a_tensor = np.zeros((len(lower), k, len(table)))
    for n, K in enumerate(lower):
        for a in range(k):
            if a in K:
                continue
            below = sum(1 for x in K if x < a)
            a_tensor[n, a, table[tuple(sorted(K + (a,)))]] = -1.0 if below % 2 else 1.0
    return a_tensor


def contraction_rows(k: int, p: int) -> np.ndarray:
    """Linear maps ``w -> (contraction of w by e_K^*)`` stacked over |K| = p-1.

    Shape (C(k,p-1), k, C(k,p)). Applied to a Plücker vector this produces
    vectors spanning exactly the span of the decomposable vector.
    """
    _check_kp(k, p)
    if p == 0:
        raise DomainError("contraction needs p >= 1")
    return _contraction_tensor(int(k), int(p))


def contract_beta(t: PPMatrix) -> np.ndarray:
    r"""The positive (1,1)-vector ``t`` contracted with :math:`\beta^{p-1}`.

    ``M[a, b] = sum_K sign(a,K) sign(b,K) H[K+a, K+b]`` over multi-indices K of
    length p-1 avoiding a and b. The constant (p-1)! is dropped. For strongly
    positive input M is positive semidefinite and its range is the span of t,
    so ``rank(M)`` is the rank of t.
    """
    if t.p == 0:
        raise DomainError("contraction against beta^(p-1) is undefined for p = 0")
    a = _contraction_tensor(t.k, t.p)
    m = np.einsum("nai,ij,nbj->ab", a, t.H, a, optimize=True)
    return 0.5 * (m + m.conj().T)


def pair(t: PPMatrix, phi: PPForm) -> float:
    """Real pairing ``Re sum_{I,J} H_t[I,J] conj(H_phi[I,J])``."""
    _same_shape(t, phi)
    return float(np.real(np.vdot(phi.H, t.H)))


def trace(t: PPMatrix) -> float:
    return float(np.real(np.trace(t.H)))


def compound_matrix(a, p: int) -> np.ndarray:
    """p-th compound of an m x n matrix: the induced map on Plücker coordinates.

    ``compound_matrix(a, p) @ plucker(frame) == plucker(a @ frame)``.
    """
    a = np.asarray(a, dtype=complex)
    m, n = a.shape
    if p == 0:
        return np.ones((1, 1), dtype=complex)
    if p > min(m, n):
        return np.zeros((comb(m, p), comb(n, p)), dtype=complex)
    rows = _minor_rows(m, p)
    cols = _minor_rows(n, p)
    blocks = a[rows[:, None, :, None], cols[None, :, None, :]]
    return np.linalg.det(blocks)


def push_matrix(a, t: PPMatrix) -> PPMatrix:
    """Image of a (p,p)-vector under the linear map ``a``: ``C t C^*``."""
    c = compound_matrix(a, t.p)
    h = c @ t.H @ c.conj().T
    return PPMatrix(np.asarray(a).shape[0], t.p, 0.5 * (h + h.conj().T))


def pull_form(a, phi: PPForm) -> PPForm:
    """Pullback of a (p,p)-form under ``a``, the adjoint of :func:`push_matrix`."""
    c = compound_matrix(a, phi.p)
    h = c.conj().T @ phi.H @ c
    return PPForm(np.asarray(a).shape[1], phi.p, 0.5 * (h + h.conj().T))
