"""Monte Carlo and constructive checks of the genericity statements.

Linear version: V = C^n with a fixed target L (dimension ell) and a kernel
K drawn from the Haar measure on the Grassmannian of (n - ell)-planes; the
projection ``pi_{K,L}`` is the projector onto L along K. For a strongly
positive t of rank >= ell > p the pushed vector has rank ell unless K lies
in a measure-zero exceptional set. Sampling shows the set is not hit;
:func:`adversarial_kernel` exhibits members of it, so the statistical check
is not vacuous.

Projective version: :func:`transversality_montecarlo` draws Haar projections
of P^k and checks every decomposable constituent of every atom against the
fiber tangent.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import CenterIncidence, DomainError, PlurirankError
from .linalg import (
    RANK_RTOL,
    complex_gaussian,
    derive_rng,
    haar_unitary,
    min_principal_sine,
    numerical_rank,
    oblique_coordinates,
    orthonormalize,
    range_basis,
)
from .positivity import SPTerm, SPVector, rank_via_span
from .projective import TOL_CENTER, Projection, is_transverse, random_projection

MIN_PRINCIPAL_ANGLE = 1e-8
MAX_RETRIES = 16


@dataclass(frozen=True, eq=False)
class KernelSample:
    K: np.ndarray  # n x (n - ell), orthonormal columns
    seed: object
    retries: int = 0


@dataclass
class TrialReport:
    trials: int
    failures: int
    failure_indices: list
    seed: object
    tolerances: dict
    per_trial_failures: list = field(default_factory=list)
    errors: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "trials": self.trials,
            "failures": self.failures,
            "failure_indices": list(self.failure_indices),
            "seed": self.seed,
            "tolerances": dict(self.tolerances),
            "per_trial_failures": list(self.per_trial_failures),
            "errors": list(self.errors),
        }


def _check_target(L, dim_v: int, ell: int) -> np.ndarray:
    L = np.asarray(L, dtype=complex)
    if L.shape != (dim_v, ell):
        raise DomainError(f"target basis must be {dim_v} x {ell}, got {L.shape}")
    return L


def haar_kernel(dim_v: int, ell: int, L, seed) -> KernelSample:
    """Haar-random (dim_v - ell)-dimensional kernel complementary to L.

    Resamples (and counts the retries) when the smallest principal angle
    between K and L is below 1e-8; that has probability zero.
    """
    if not 1 <= ell < dim_v:
        raise DomainError(f"need 1 <= ell < dim V, got ell={ell}, dim V={dim_v}")
    L = orthonormalize(_check_target(L, dim_v, ell))
    rng = np.random.default_rng(seed)
    for retries in range(MAX_RETRIES):
        K = haar_unitary(dim_v, rng)[:, : dim_v - ell]
        if min_principal_sine(K, L) > MIN_PRINCIPAL_ANGLE:
            return KernelSample(K, seed, retries)
    raise PlurirankError(f"no transversal kernel after {MAX_RETRIES} Haar draws")


def projection_coords(K, L) -> np.ndarray:
    """Matrix of pi_{K,L} in the coordinates of the basis of L (ell x n)."""
    return oblique_coordinates(orthonormalize(L), np.asarray(K, dtype=complex))


def injectivity_trial(W, K, L) -> bool:
    """Whether pi_{K,L} restricted to span(W) is injective (W is n x p)."""
    W = orthonormalize(np.asarray(W, dtype=complex))
    L = np.asarray(L)
    p, ell = W.shape[1], L.shape[1]
    if p > ell:
        raise DomainError(f"injectivity into L needs p <= ell, got p={p}, ell={ell}")
    c = projection_coords(K, L)
    return numerical_rank(c @ W, scale=float(np.linalg.norm(c, 2))) == p


def greedy_independent(vectors, count: int, rtol: float = RANK_RTOL) -> list[int]:
    """Indices of the first ``count`` columns that are independent of the earlier picks.

    Pivoted Gram-Schmidt in column order, so ties go to the earliest column.
    """
    vectors = np.asarray(vectors, dtype=complex)
    picked, basis = [], []
    for j in range(vectors.shape[1]):
        v = vectors[:, j].copy()
        norm0 = np.linalg.norm(v)
        if norm0 == 0:
            continue
        for b in basis:
            v -= b * np.vdot(b, v)
        if np.linalg.norm(v) > rtol * norm0:
            basis.append(v / np.linalg.norm(v))
            picked.append(j)
            if len(picked) == count:
                break
    return picked


def push_linear(t: SPVector, K, L) -> SPVector:
    """``(pi_{K,L})_* t`` as a vector on L, in the coordinates of L's basis."""
    return t.map_frames(projection_coords(K, L))


def lemma_ii_trial(t: SPVector, K, L) -> int:
    """Rank of ``(pi_{K,L})_* t`` for t of rank >= ell > p."""
    L = np.asarray(L)
    ell = L.shape[1]
    if not t.p < ell:
        raise DomainError(f"need p < ell, got p={t.p}, ell={ell}")
    vectors = t.span_matrix()
    if numerical_rank(vectors) < ell:
        raise DomainError(f"need rank(t) >= ell = {ell}")
    if len(greedy_independent(vectors, ell)) < ell:
        raise PlurirankError("could not select ell independent constituent vectors")
    return rank_via_span(push_linear(t, K, L))


def _term_outside(t: SPVector, L) -> tuple[int, np.ndarray] | None:
    """A live term whose span leaves L, with a unit vector of that span furthest from L."""
    Lo = orthonormalize(L)
    for n, term in enumerate(t.terms):
        if not term.is_live:
            continue
        span = range_basis(term.frame)
        resid = span - Lo @ (Lo.conj().T @ span)
        _, s, vh = np.linalg.svd(resid, full_matrices=False)
        if s[0] > 1e-6:
            v = span @ vh[0].conj()
            return n, v / np.linalg.norm(v)
    return None


def adversarial_kernel(t: SPVector, ell: int, L, seed=0) -> KernelSample:
    """A kernel in the exceptional set of t: it contains a constituent vector.

    Picks a live term whose span is not inside L, puts the vector of that span
    furthest from L into K, and completes K with random directions until it is
    a complement of L. Projection then fails to be injective on that term's
    span. Raises when every term lies inside L, where no complement of L can
    meet Span(t).
    """
    L = _check_target(L, t.k, ell)
    dim_v = t.k
    if dim_v - ell < 1:
        raise DomainError("need dim V - ell >= 1")
    if rank_via_span(t) < ell:
        raise DomainError(f"need rank(t) >= ell = {ell}")
    found = _term_outside(t, L)
    if found is None:
        raise DomainError("every constituent span lies in L; no kernel complementary to L meets Span(t)")
    _, v = found
    rng = np.random.default_rng(seed)
    Lo = orthonormalize(L)
    for retries in range(MAX_RETRIES):
        extra = complex_gaussian(rng, (dim_v, dim_v - ell - 1))
        K = orthonormalize(np.column_stack([v, extra]))
        if min_principal_sine(K, Lo) > MIN_PRINCIPAL_ANGLE:
            return KernelSample(K, seed, retries)
    raise PlurirankError(f"could not complete an adversarial kernel after {MAX_RETRIES} tries")


def certify_exceptional(t: SPVector, K, L) -> str | None:
    """Which failure K causes on t: 'rank_drop', 'injectivity', or None."""
    ell = np.asarray(L).shape[1]
    if rank_via_span(push_linear(t, K, L)) < ell:
        return "rank_drop"
    for term in t.terms:
        if term.is_live and not injectivity_trial(term.frame, K, L):
            return "injectivity"
    return None


def random_sp_of_rank(dim_v: int, p: int, r: int, rng: np.random.Generator, n_terms: int | None = None) -> SPVector:
    """Random strongly positive vector whose constituents span a random r-dim subspace."""
    if not 1 <= p <= r <= dim_v:
        raise DomainError(f"need 1 <= p <= r <= dim V, got p={p}, r={r}, dim V={dim_v}")
    S = haar_unitary(dim_v, rng)[:, :r]
    if n_terms is None:
        n_terms = -(-r // p) + 1
    terms = []
    for _ in range(n_terms):
        frame = S @ complex_gaussian(rng, (r, p))
        terms.append(SPTerm(float(rng.uniform(0.1, 1.0)), frame))
    return SPVector(dim_v, p, tuple(terms))


def lemma_ii_montecarlo(dim_v: int, p: int, ell: int, r: int, trials: int, seed: int) -> TrialReport:
    """Haar kernels against one fixed random t of rank r; a failure is pushed rank != ell."""
    L = np.eye(dim_v, dtype=complex)[:, :ell]
    t = random_sp_of_rank(dim_v, p, r, derive_rng(seed, 0))
    if rank_via_span(t) != r:
        raise PlurirankError("random test vector does not have the requested rank")
    failures, per = [], []
    for n in range(trials):
        ks = haar_kernel(dim_v, ell, L, [seed, 1, n])
        bad = lemma_ii_trial(t, ks.K, L) != ell
        per.append(int(bad))
        if bad:
            failures.append(n)
    return TrialReport(trials, len(failures), failures, seed, {"rank_rtol": RANK_RTOL}, per)


def injectivity_montecarlo(dim_v: int, p: int, ell: int, trials: int, seed: int) -> TrialReport:
    """Haar kernels against fresh random p-dimensional W."""
    L = np.eye(dim_v, dtype=complex)[:, :ell]
    failures, per = [], []
    for n in range(trials):
        rng = derive_rng(seed, 2, n)
        W = complex_gaussian(rng, (dim_v, p))
        ks = haar_kernel(dim_v, ell, L, [seed, 3, n])
        bad = not injectivity_trial(W, ks.K, L)
        per.append(int(bad))
        if bad:
            failures.append(n)
    return TrialReport(trials, len(failures), failures, seed, {"rank_rtol": RANK_RTOL}, per)


def transversality_montecarlo(
    T,
    ell: int,
    trials: int,
    seed: int,
    inject: Projection | None = None,
    tol_center: float = TOL_CENTER,
) -> TrialReport:
    """Count, per Haar projection onto P^ell, atoms with a constituent not transverse to the fiber.

    Each decomposable term of an atom is tested separately: this is the
    condition that fails exactly when the pushed term vanishes. ``inject``
    replaces the random projection of trial 0.
    """
    if not T.atoms:
        return TrialReport(0, 0, [], seed, {"rank_rtol": RANK_RTOL, "tol_center": tol_center})
    if not T.p <= ell <= T.k - 1:
        raise DomainError(f"need p <= ell <= k-1, got p={T.p}, ell={ell}, k={T.k}")
    failures, per, errors = [], [], []
    for n in range(trials):
        pi = inject if (n == 0 and inject is not None) else random_projection(T.k, ell, [seed, n])
        count = 0
        for i, a in enumerate(T.atoms):
            try:
                ok = all(
                    is_transverse(SPVector(a.t.k, a.t.p, (term,)), pi, a.x, tol_center)
                    for term in a.t.terms
                    if term.is_live
                )
            except CenterIncidence:
                errors.append({"trial": n, "atom": i, "error": "center_incidence"})
                ok = False
            count += not ok
        per.append(count)
        if count:
            failures.append(n)
    tolerances = {"rank_rtol": RANK_RTOL, "tol_center": tol_center}
    return TrialReport(trials, len(failures), failures, seed, tolerances, per, errors)
