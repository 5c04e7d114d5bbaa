"""Strongly positive (p,p)-vectors kept together with an explicit decomposition.

An :class:`SPVector` is a nonnegative combination ``sum lambda_j [F_j]`` of
decomposable vectors, one per p-frame ``F_j``. Keeping the frames makes the
rank (the dimension of the smallest subspace carrying the vector) directly
computable as the dimension of the span of all live frame vectors. The
coefficient-only route through :func:`~plurirank.exterior.contract_beta` is
kept as an independent cross-check.
"""

from dataclasses import dataclass, field
from functools import cached_property
from math import comb

import numpy as np

from .errors import DomainError
from .exterior import PPMatrix, _frame_matrix, contract_beta, plucker_coeffs
from .linalg import RANK_RTOL, numerical_rank, range_basis

# A term is dead when its wedge is this small relative to the product of its
# frame vector norms (Hadamard bound), i.e. the frame is numerically dependent.
WEDGE_RTOL = 1e-9
PSD_FLOOR = 1e-10


@dataclass(frozen=True, eq=False)
class SPTerm:
    """One decomposable term ``lam * [v_1 ^ ... ^ v_p]``; frame is k x p."""

    lam: float
    frame: np.ndarray

    def __post_init__(self):
        lam = float(self.lam)
        if not np.isfinite(lam) or lam < 0:
            raise DomainError(f"term weight must be finite and nonnegative, got {float(self.lam)!r}")
        f = _frame_matrix(self.frame)
        if not np.all(np.isfinite(f)):
            raise DomainError("frame vectors must be finite")
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "frame", f)

    @cached_property
    def plucker(self) -> np.ndarray:
        return plucker_coeffs(self.frame)

    @property
    def is_live(self) -> bool:
        """Positive weight and a numerically nonvanishing wedge."""
        if self.lam <= 0:
            return False
        wnorm = float(np.linalg.norm(self.plucker))
        bound = float(np.prod(np.linalg.norm(self.frame, axis=0)))
        return wnorm > WEDGE_RTOL * bound


@dataclass(frozen=True, eq=False)
class SPVector:
    """A strongly positive (p,p)-vector on C^k with a stored decomposition.

    For tangent vectors of projective space, ``k`` is the dimension of the
    homogeneous coordinate space the frames are written in.
    """

    k: int
    p: int
    terms: tuple = field(default=())

    def __post_init__(self):
        if self.p < 0 or self.p > self.k:
            raise DomainError(f"invalid (k,p)=({self.k},{self.p})")
        terms = tuple(t if isinstance(t, SPTerm) else SPTerm(*t) for t in self.terms)
        for t in terms:
            if t.frame.shape != (self.k, self.p):
                raise DomainError(f"term frame has shape {t.frame.shape}, expected {(self.k, self.p)}")
        object.__setattr__(self, "terms", terms)

    @classmethod
    def from_frames(cls, frames, weights=None, k: int | None = None) -> "SPVector":
        """Build from a list of frames (each k x p, or a list of p vectors)."""
        mats = [_frame_matrix(f, k) for f in frames]
        if not mats:
            raise DomainError("from_frames needs at least one frame; use SPVector(k, p) for zero")
        if weights is None:
            weights = [1.0] * len(mats)
        if len(weights) != len(mats):
            raise DomainError("one weight per frame is required")
        k0, p0 = mats[0].shape
        return cls(k0, p0, tuple(SPTerm(w, m) for w, m in zip(weights, mats)))

    @cached_property
    def matrix(self) -> PPMatrix:
        n = comb(self.k, self.p)
        if not self.terms:
            return PPMatrix(self.k, self.p, np.zeros((n, n), dtype=complex))
        w = np.stack([t.plucker for t in self.terms])
        lam = np.array([t.lam for t in self.terms])
        h = (w.T * lam) @ w.conj()
        return PPMatrix(self.k, self.p, 0.5 * (h + h.conj().T))

    @cached_property
    def trace(self) -> float:
        return float(sum(t.lam * np.vdot(t.plucker, t.plucker).real for t in self.terms))

    def live_terms(self) -> list[SPTerm]:
        return [t for t in self.terms if t.is_live]

    def span_matrix(self) -> np.ndarray:
        """All frame vectors of live terms as columns (k x p*#live)."""
        live = self.live_terms()
        if not live:
            return np.zeros((self.k, 0), dtype=complex)
        return np.hstack([t.frame for t in live])

    def span_basis(self) -> np.ndarray:
        """Orthonormal basis of Span(t), the smallest subspace carrying t."""
        return range_basis(self.span_matrix())

    def scaled(self, s: float) -> "SPVector":
        if s < 0:
            raise DomainError("strongly positive vectors can only be scaled by s >= 0")
        return SPVector(self.k, self.p, tuple(SPTerm(s * t.lam, t.frame) for t in self.terms))

    def map_frames(self, a, kill_rtol: float = WEDGE_RTOL) -> "SPVector":
        """Image under the linear map ``a`` applied to every frame vector.

        Terms whose image wedge is below ``kill_rtol`` times ``|w| * ||a||^p``
        are kept with a zero frame, so they drop out of ranks and traces.
        """
        a = np.asarray(a, dtype=complex)
        out_dim = a.shape[0]
        if a.shape[1] != self.k:
            raise DomainError(f"map expects dimension {a.shape[1]}, vector lives in {self.k}")
        if self.p > out_dim:
            raise DomainError(f"cannot push a degree-{self.p} vector into dimension {out_dim}")
        anorm = float(np.linalg.norm(a, 2)) if a.size else 0.0
        terms = []
        for t in self.terms:
            f = a @ t.frame
            before = float(np.linalg.norm(t.plucker))
            after = float(np.linalg.norm(plucker_coeffs(f)))
            if after <= kill_rtol * before * anorm ** self.p:
                f = np.zeros_like(f)
            terms.append(SPTerm(t.lam, f))
        return SPVector(out_dim, self.p, tuple(terms))


def rank_via_span(t: SPVector) -> int:
    """dim Span(t): numerical rank of all live frame vectors stacked together."""
    return numerical_rank(t.span_matrix())


def rank_via_contraction(t: SPVector) -> int:
    """Rank of t read off its coefficients: the rank of ``t`` contracted with beta^(p-1)."""
    if t.p == 0:
        raise DomainError("rank via contraction needs p >= 1")
    m = contract_beta(t.matrix)
    ev = np.linalg.eigvalsh(m)
    top = float(np.max(np.abs(ev))) if ev.size else 0.0
    if top <= 0:
        return 0
    return int(np.count_nonzero(ev > RANK_RTOL * top))


def is_decomposable_by_rank(t: SPVector) -> bool:
    r = rank_via_span(t)
    if r == 0:
        raise DomainError("decomposability by rank is undefined for the zero vector")
    return r == t.p


def normalize_trace(t: SPVector) -> SPVector:
    tr = t.trace
    if not tr > 0:
        raise DomainError(f"cannot normalise a vector of trace {tr}")
    return t.scaled(1.0 / tr)


def is_psd(t: SPVector, floor: float = PSD_FLOOR) -> bool:
    h = t.matrix.H
    ev = np.linalg.eigvalsh(h)
    scale = float(np.max(np.abs(ev))) if ev.size else 0.0
    return bool(ev.size == 0 or ev.min() >= -floor * max(scale, 1e-300))


def _check_family(family, mu) -> np.ndarray:
    if len(family) == 0:
        raise DomainError("empty family")
    mu = np.asarray(mu, dtype=float)
    if mu.shape != (len(family),):
        raise DomainError("one weight per family member is required")
    if np.any(mu < 0) or abs(mu.sum() - 1.0) > 1e-12:
        raise DomainError("weights must be nonnegative and sum to 1")
    k, p = family[0].k, family[0].p
    for n, t in enumerate(family):
        if (t.k, t.p) != (k, p):
            raise DomainError(f"member {n} has (k,p)=({t.k},{t.p}), expected ({k},{p})")
        if abs(t.trace - 1.0) > 1e-10:
            raise DomainError(f"member {n} has trace {t.trace}, expected 1")
    return mu


def average(family, mu) -> SPVector:
    """``sum_a mu_a t_a`` for a finite family of trace-1 vectors."""
    mu = _check_family(family, mu)
    terms = tuple(
        SPTerm(m * term.lam, term.frame) for t, m in zip(family, mu) for term in t.terms
    )
    return SPVector(family[0].k, family[0].p, terms)


@dataclass(frozen=True)
class LemmaICheck:
    avg_rank: int
    fraction_full_rank: float
    holds: bool


def lemma_i_check(family, mu) -> LemmaICheck:
    """Finite form of: a rank-deficient average has rank-deficient members.

    If the average has rank < k, the weighted members of full rank k must
    have total weight zero.
    """
    mu = _check_family(family, mu)
    k = family[0].k
    avg_rank = rank_via_span(average(family, mu))
    charged = [t for t, m in zip(family, mu) if m > 0]
    full = sum(1 for t in charged if rank_via_span(t) == k)
    fraction = full / len(charged) if charged else 0.0
    holds = avg_rank >= k or full == 0
    return LemmaICheck(avg_rank, fraction, holds)


def kernel_inheritance_residual(family, mu) -> float:
    """Largest relative residual ``|H_a v| / ||H_a||`` over kernel vectors v of the average.

    PSD additivity makes every kernel vector of ``sum mu_a H_a`` a kernel
    vector of each ``H_a`` with ``mu_a > 0``; the return value measures how
    far that holds numerically (0 when the average is nondegenerate).
    """
    mu = _check_family(family, mu)
    h_avg = sum(m * t.matrix.H for t, m in zip(family, mu))
    ev, vecs = np.linalg.eigh(h_avg)
    top = float(np.max(np.abs(ev)))
    kernel = vecs[:, ev <= RANK_RTOL * top]
    if kernel.shape[1] == 0:
        return 0.0
    worst = 0.0
    for t, m in zip(family, mu):
        if m <= 0:
            continue
        h = t.matrix.H
        scale = float(np.linalg.norm(h, 2))
        if scale == 0:
            continue
        worst = max(worst, float(np.linalg.norm(h @ kernel, 2)) / scale)
    return worst


def det_root_concavity_gap(a, b, s: float) -> float:
    """``det(sA+(1-s)B)^(1/k) - s det(A)^(1/k) - (1-s) det(B)^(1/k)`` for PSD A, B.

    Nonnegative by concavity of ``M -> det(M)^(1/k)`` on the PSD cone; this is
    what forces a positive average of Hermitian matrices to be singular only
    when the averaged matrices are.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    scale = max(float(np.linalg.norm(a, 2)), float(np.linalg.norm(b, 2)), 1e-300)

    def root(m):
        # eigenvalues at rounding level are zeros; keeping them would put
        # their k-th root (far above rounding level) into the gap
        ev = np.linalg.eigvalsh(0.5 * (m + m.conj().T))
        if np.any(ev <= RANK_RTOL * scale):
            return 0.0
        return float(np.exp(np.mean(np.log(ev))))

    return root(s * a + (1 - s) * b) - s * root(a) - (1 - s) * root(b)
