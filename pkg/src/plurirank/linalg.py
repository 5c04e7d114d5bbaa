"""Dense linear-algebra helpers shared by the geometric modules."""

import numpy as np

# Singular values at or below RANK_RTOL * reference count as zero.
RANK_RTOL = 1e-9


def singular_values(a) -> np.ndarray:
    a = np.asarray(a)
    if a.size == 0:
        return np.zeros(0)
    return np.linalg.svd(a, compute_uv=False)


def numerical_rank(a, rtol: float = RANK_RTOL, scale: float | None = None) -> int:
    """Number of singular values strictly above ``rtol * scale``.

    ``scale`` defaults to the largest singular value of ``a``. Pass an explicit
    scale when ``a`` may be numerically zero as a whole, e.g. the image of a
    unit basis under a map that kills it.
    """
    s = singular_values(a)
    if s.size == 0:
        return 0
    ref = s[0] if scale is None else scale
    if not ref > 0:
        return 0
    return int(np.count_nonzero(s > rtol * ref))


def range_basis(a, rtol: float = RANK_RTOL, scale: float | None = None) -> np.ndarray:
    """Orthonormal basis (as columns) of the numerical column space of ``a``."""
    a = np.asarray(a)
    if a.size == 0:
        return np.zeros((a.shape[0], 0), dtype=complex)
    u, s, _ = np.linalg.svd(a, full_matrices=False)
    ref = s[0] if scale is None else scale
    r = int(np.count_nonzero(s > rtol * ref)) if ref > 0 else 0
    return u[:, :r]


def null_space(a, dim: int) -> np.ndarray:
    """Orthonormal basis of the ``dim`` least-singular right directions of ``a``."""
    a = np.atleast_2d(np.asarray(a))
    n = a.shape[1]
    _, _, vh = np.linalg.svd(a, full_matrices=True)
    return vh[n - dim:].conj().T


def orthonormalize(a) -> np.ndarray:
    q, _ = np.linalg.qr(np.asarray(a, dtype=complex))
    return q


def haar_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed n x n unitary.

    QR of a standard complex Gaussian matrix, with the columns of Q rescaled by
    the phases of diag(R) so that R has a positive diagonal. Without that fix
    the distribution depends on the LAPACK sign convention and is not Haar.
    """
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    phases = d / np.abs(d)
    return q * phases[np.newaxis, :]


def complex_gaussian(rng: np.random.Generator, shape) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def min_principal_sine(a, b) -> float:
    """Sine of the smallest principal angle between span(a) and span(b).

    Both arguments are matrices with orthonormal columns. Computed from the
    component of ``a`` orthogonal to ``b``, which keeps precision for tiny angles.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape[1] == 0 or b.shape[1] == 0:
        return 1.0
    resid = a - b @ (b.conj().T @ a)
    return float(singular_values(resid)[-1])


def oblique_coordinates(target, kernel) -> np.ndarray:
    """Coordinates along ``target`` of the projection with the given kernel.

    Returns the (dim target) x n matrix C with ``target @ C`` the projector onto
    span(target) along span(kernel). The two spans must be complementary.
    """
    target = np.asarray(target, dtype=complex)
    kernel = np.asarray(kernel, dtype=complex)
    n = target.shape[0]
    if target.shape[1] + kernel.shape[1] != n:
        raise ValueError("target and kernel dimensions must add up to the ambient dimension")
    basis = np.hstack([target, kernel])
    return np.linalg.solve(basis, np.eye(n))[: target.shape[1]]


def derive_rng(seed, *keys) -> np.random.Generator:
    """Independent generator for the stream labelled ``keys`` under ``seed``.

    Streams depend only on (seed, keys), never on how many draws other
    streams made, so trial results do not depend on scheduling order.
    ``seed`` may itself be a sequence of ints.
    """
    return np.random.default_rng([*(int(s) for s in np.atleast_1d(seed)), *(int(k) for k in keys)])
