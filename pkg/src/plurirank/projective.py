"""Points, tangent spaces and linear projections of complex projective space.

A point of P^k is a unit vector ``z`` of C^{k+1}, defined up to phase. The
tangent space at ``z`` is modelled as the orthogonal complement of ``z``, and
tangent (p,p)-vectors are :class:`~plurirank.positivity.SPVector` objects
whose frames are written in those homogeneous coordinates.

A :class:`Projection` with center ``I`` and target ``L`` comes from a direct
sum ``C^{k+1} = I_hat + L_hat``; it sends ``[z]`` to ``[P z]`` where ``P`` is the
projector onto ``L_hat`` along ``I_hat``. Metric constants of the differential
(the ``|z| / |Pz|`` factors) are not tracked: ranks, transversality and
support comparisons do not see them.
"""

from dataclasses import dataclass

import numpy as np

from .errors import CenterIncidence, DomainError
from .linalg import (
    complex_gaussian,
    haar_unitary,
    min_principal_sine,
    null_space,
    numerical_rank,
    oblique_coordinates,
    orthonormalize,
)
from .positivity import SPVector

TOL_CENTER = 1e-8
MIN_PRINCIPAL_ANGLE = 1e-8
UNIT_TOL = 1e-12
ORTHO_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class ProjPoint:
    z: np.ndarray

    def __post_init__(self):
        z = np.asarray(self.z, dtype=complex).reshape(-1)
        if abs(np.linalg.norm(z) - 1.0) > UNIT_TOL:
            raise DomainError(f"homogeneous representative must have unit norm, got {np.linalg.norm(z)}")
        object.__setattr__(self, "z", z)

    @classmethod
    def from_vector(cls, v) -> "ProjPoint":
        v = np.asarray(v, dtype=complex).reshape(-1)
        n = np.linalg.norm(v)
        if n == 0:
            raise DomainError("the zero vector is not a point of projective space")
        return cls(v / n)

    @property
    def k(self) -> int:
        return self.z.shape[0] - 1

    def same_point(self, other: "ProjPoint", tol: float = 1e-10) -> bool:
        return fs_distance(self, other) <= tol


@dataclass(frozen=True, eq=False)
class TangentFrame:
    base: ProjPoint
    vectors: np.ndarray  # (k+1) x m, columns orthogonal to base.z

    def __post_init__(self):
        v = np.asarray(self.vectors, dtype=complex)
        if v.ndim != 2 or v.shape[0] != self.base.z.shape[0]:
            raise DomainError("tangent vectors must be columns of length k+1")
        if v.size and np.max(np.abs(self.base.z.conj() @ v)) > ORTHO_TOL * max(1.0, np.max(np.abs(v))):
            raise DomainError("tangent vectors must be orthogonal to the base point")
        object.__setattr__(self, "vectors", v)

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]


def tangent_basis(x: ProjPoint) -> np.ndarray:
    """Orthonormal basis of x^perp, the model of T_x P^k, as (k+1) x k columns."""
    return null_space(x.z.conj()[np.newaxis, :], x.k)


def tangent_projector(x: ProjPoint) -> np.ndarray:
    return np.eye(x.z.shape[0]) - np.outer(x.z, x.z.conj())


def fs_distance(x: ProjPoint, y: ProjPoint) -> float:
    """Chordal Fubini-Study distance ``sqrt(1 - |<x,y>|^2)``.

    Evaluated as the norm of the part of y orthogonal to x, which equals the
    same quantity without cancellation for nearby points.
    """
    a, b = x.z, y.z
    return float(np.linalg.norm(b - a * np.vdot(a, b)))


def haar_points(k: int, n: int, rng: np.random.Generator) -> np.ndarray:
    """n unitarily invariant random points of P^k, as rows of an n x (k+1) array."""
    g = complex_gaussian(rng, (n, k + 1))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


@dataclass(frozen=True, eq=False)
class Projection:
    """Linear projection of P^k with center P(I_hat) onto P(L_hat) ~ P^ell.

    ``I_basis`` and ``L_basis`` hold orthonormal columns. ``coords`` is the
    (ell+1) x (k+1) matrix giving coordinates in ``L_basis`` of the projection
    along ``I_hat``, so that ``P = L_basis @ coords``.
    """

    k: int
    ell: int
    I_basis: np.ndarray
    L_basis: np.ndarray
    coords: np.ndarray
    P: np.ndarray

    @classmethod
    def from_bases(cls, I_basis, L_basis) -> "Projection":
        i_b = orthonormalize(I_basis) if np.asarray(I_basis).shape[1] else np.asarray(I_basis, dtype=complex)
        l_b = orthonormalize(L_basis)
        n = l_b.shape[0]
        if i_b.shape[0] != n or i_b.shape[1] + l_b.shape[1] != n:
            raise DomainError("center and target dimensions must add up to k+1")
        if min_principal_sine(i_b, l_b) <= MIN_PRINCIPAL_ANGLE:
            raise DomainError("center and target are not in direct sum")
        coords = oblique_coordinates(l_b, i_b)
        return cls(n - 1, l_b.shape[1] - 1, i_b, l_b, coords, l_b @ coords)

    @property
    def center_dim(self) -> int:
        """Projective dimension of the center, k - ell - 1 (-1 when empty)."""
        return self.k - self.ell - 1

    def to_target(self, v) -> np.ndarray:
        """Coordinates in ``L_basis`` of vectors lying in L_hat."""
        return self.L_basis.conj().T @ np.asarray(v)


def random_projection(k: int, ell: int, seed) -> Projection:
    """Haar-random projection: the first k-ell columns of a Haar unitary span I_hat.

    ``seed`` is an int or a sequence of ints (see :func:`~plurirank.linalg.derive_rng`).
    """
    if not 1 <= ell <= k - 1:
        raise DomainError(f"target dimension ell={ell} must lie in [1, {k - 1}]")
    rng = np.random.default_rng(seed)
    u = haar_unitary(k + 1, rng)
    return Projection.from_bases(u[:, : k - ell], u[:, k - ell:])


def identity_projection(k: int) -> Projection:
    """The degenerate case ell = k: empty center, P = identity."""
    return Projection.from_bases(np.zeros((k + 1, 0), dtype=complex), np.eye(k + 1))


def _image(pi: Projection, x: ProjPoint, tol_center: float) -> np.ndarray:
    if x.z.shape[0] != pi.k + 1:
        raise DomainError(f"point of P^{x.k} given to a projection of P^{pi.k}")
    y = pi.P @ x.z
    ny = np.linalg.norm(y)
    if ny <= tol_center:
        raise CenterIncidence(f"point is within {ny:.3g} of the center of the projection")
    return y / ny


def project_point(pi: Projection, x: ProjPoint, tol_center: float = TOL_CENTER) -> ProjPoint:
    return ProjPoint(_image(pi, x, tol_center))


def dprojection(pi: Projection, x: ProjPoint, tol_center: float = TOL_CENTER) -> np.ndarray:
    """Differential of the projection at x on tangent representatives.

    Returns the (k+1) x (k+1) matrix ``w -> (I - y y^*) P (I - x x^*) w`` with
    ``y`` the unit image point; on x^perp it is a complex-linear map onto
    y^perp whose kernel is the fiber direction, of dimension k - ell.
    """
    y = _image(pi, x, tol_center)
    return (np.eye(pi.k + 1) - np.outer(y, y.conj())) @ pi.P @ tangent_projector(x)


def pushforward_sp(pi: Projection, x: ProjPoint, t: SPVector, tol_center: float = TOL_CENTER) -> SPVector:
    """Push a tangent (p,p)-vector at x forward to the tangent space at pi(x).

    Frames are mapped by the differential. Terms whose pushed wedge vanishes
    are kept with a zero frame; the result is strongly positive by construction.
    """
    if t.k != pi.k + 1:
        raise DomainError(f"tangent vector has {t.k} coordinates, expected {pi.k + 1}")
    return t.map_frames(dprojection(pi, x, tol_center))


def fiber_tangent(pi: Projection, x: ProjPoint, tol_center: float = TOL_CENTER) -> TangentFrame:
    """Orthonormal basis of the tangent space at x of the fiber through x (dim k - ell)."""
    d = dprojection(pi, x, tol_center)
    tb = tangent_basis(x)
    kernel = tb @ null_space(d @ tb, pi.k - pi.ell)
    return TangentFrame(x, kernel)


def is_transverse(t: SPVector, pi: Projection, x: ProjPoint, tol_center: float = TOL_CENTER) -> bool:
    """True iff Span(t) meets the fiber tangent at x only in 0."""
    span = t.span_basis()
    fiber = fiber_tangent(pi, x, tol_center).vectors
    r_span = span.shape[1]
    return numerical_rank(np.hstack([span, fiber]), scale=1.0) == r_span + fiber.shape[1]


def random_tangent_frame(x: ProjPoint, p: int, rng: np.random.Generator) -> np.ndarray:
    """Orthonormal Gaussian-random p-frame in x^perp, as (k+1) x p."""
    g = complex_gaussian(rng, (x.z.shape[0], p))
    g = tangent_projector(x) @ g
    return orthonormalize(g)

