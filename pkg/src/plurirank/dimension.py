"""Correlation dimension of weighted point clouds in P^k.

The correlation integral of a probability measure mu is
``C(r) = (mu x mu){(x, y) : d(x, y) < r}`` with d the chordal Fubini-Study
distance; its log-log slope is the correlation dimension. For the uniform
measure on a projective m-plane ``C(r) = r^(2m)`` exactly, so the estimator
is unbiased on the clouds the synthetic generators produce.

Pairs are weighted by ``w_i w_j`` and include the diagonal, which makes the
estimate a function of the measure alone (splitting an atom into copies
changes nothing). Above ``max_pairs`` ordered pairs are subsampled with a
seeded generator.
"""

import csv
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .errors import CenterIncidence, DomainError
from .projective import TOL_CENTER, Projection

MAX_PAIRS = 2_000_000
N_RADII = 24
MIN_POINTS = 100


@dataclass(frozen=True)
class DimensionEstimate:
    value: float
    stderr: float
    fit_range: tuple
    n_points: int
    n_pairs: int
    radii: tuple = field(default=(), repr=False)
    correlation: tuple = field(default=(), repr=False)

    def as_dict(self) -> dict:
        return {
            "value": self.value,
            "stderr": self.stderr,
            "fit_range": list(self.fit_range),
            "n_points": self.n_points,
            "n_pairs": self.n_pairs,
        }


def _distances(points: np.ndarray, i: np.ndarray, j: np.ndarray) -> np.ndarray:
    """Chordal distances of the pairs (i[m], j[m]).

    Evaluated pair by pair rather than through a blocked Gram product, so
    identical vectors give bit-identical distances wherever they occur.
    """
    out = np.empty(i.size)
    step = 1 << 18
    for start in range(0, i.size, step):
        sl = slice(start, start + step)
        g = np.einsum("ij,ij->i", points[i[sl]].conj(), points[j[sl]])
        out[sl] = np.sqrt(np.clip(1.0 - np.abs(g) ** 2, 0.0, None))
    return out


def _pairs_all(n: int, weights: np.ndarray):
    """All unordered pairs with the diagonal; off-diagonal pairs weigh 2 w_i w_j."""
    i, j = np.triu_indices(n)
    pw = weights[i] * weights[j]
    return i, j, np.where(i == j, pw, 2.0 * pw)


def _pairs_sampled(n: int, weights: np.ndarray, n_pairs: int, rng):
    i = rng.integers(0, n, size=n_pairs)
    j = rng.integers(0, n, size=n_pairs)
    return i, j, weights[i] * weights[j]


def correlation_curve(points, weights=None, seed: int = 0, max_pairs: int = MAX_PAIRS):
    """Distinct pair distances, ascending, with the weighted fraction of pairs at
    or below each; the second array is the empirical correlation integral."""
    pts = np.asarray(points, dtype=complex)
    n = pts.shape[0]
    w = np.full(n, 1.0 / n) if weights is None else np.asarray(weights, dtype=float)
    if w.shape != (n,) or np.any(w < 0) or not w.sum() > 0:
        raise DomainError("weights must be nonnegative, one per point, with positive sum")
    w = w / w.sum()
    if n * (n + 1) // 2 <= max_pairs:
        i, j, pw = _pairs_all(n, w)
    else:
        i, j, pw = _pairs_sampled(n, w, max_pairs, np.random.default_rng(seed))
    d = _distances(pts, i, j)
    order = np.argsort(d, kind="stable")
    d = d[order]
    cum = np.cumsum(pw[order])
    cum /= cum[-1]
    # Collapse ties onto the right-continuous CDF value P(d <= r).
    last = np.r_[d[1:] != d[:-1], True]
    return d[last], cum[last]


def correlation_dimension(
    points,
    weights=None,
    q_lo: float = 0.05,
    q_hi: float = 0.25,
    seed: int = 0,
    max_pairs: int = MAX_PAIRS,
    n_radii: int = N_RADII,
) -> DimensionEstimate:
    """Least-squares slope of log C(r) against log r on the window where
    ``q_lo <= C(r) <= q_hi``.

    Parameters
    ----------
    points : array_like, shape (n, k+1)
        Unit homogeneous representatives.
    weights : array_like, optional
        Point masses; uniform when omitted.
    q_lo, q_hi : float
        Fit window, as levels of the correlation integral.
    seed : int
        Seed for pair subsampling (unused when all pairs fit in ``max_pairs``).
    """
    pts = np.asarray(points, dtype=complex)
    if pts.ndim != 2 or pts.shape[0] < MIN_POINTS:
        raise DomainError(f"need at least {MIN_POINTS} points for a dimension estimate")
    if not 0 < q_lo < q_hi < 1:
        raise DomainError(f"need 0 < q_lo < q_hi < 1, got {q_lo}, {q_hi}")
    d, cdf = correlation_curve(pts, weights, seed, max_pairs)
    if d[-1] <= 0:
        raise DomainError("degenerate cloud: all points coincide")
    # Interpolated quantiles keep the window continuous in the pair weights.
    r_lo = float(np.interp(q_lo, cdf, d))
    r_hi = float(np.interp(q_hi, cdf, d))
    if not 0 < r_lo < r_hi:
        raise DomainError(
            f"degenerate cloud: fit window [{r_lo:.3g}, {r_hi:.3g}] is empty or hits zero distance"
        )
    radii = np.geomspace(r_lo, r_hi, n_radii)
    # Piecewise-linear empirical C(r): within one pair weight of the step
    # function, but continuous, so window edges sitting on a pair distance
    # do not make the fit jump.
    corr = np.interp(radii, d, cdf)
    keep = corr > 0
    if np.count_nonzero(keep) < 3:
        raise DomainError("degenerate cloud: too few nonempty radii in the fit window")
    fit = stats.linregress(np.log(radii[keep]), np.log(corr[keep]))
    k = pts.shape[1] - 1
    value = float(np.clip(fit.slope, 0.0, 2.0 * k))
    return DimensionEstimate(
        value=value,
        stderr=float(fit.stderr),
        fit_range=(float(r_lo), float(r_hi)),
        n_points=int(pts.shape[0]),
        n_pairs=int(min(max_pairs, pts.shape[0] * (pts.shape[0] + 1) // 2)),
        radii=tuple(float(r) for r in radii),
        correlation=tuple(float(c) for c in corr),
    )


def write_curve_csv(est: DimensionEstimate, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["r", "C"])
        for r, c in zip(est.radii, est.correlation):
            writer.writerow([repr(r), repr(c)])


@dataclass(frozen=True)
class LipschitzImageCheck:
    dim_before: DimensionEstimate
    dim_after: DimensionEstimate

    @property
    def holds(self) -> bool:
        """Image dimension does not exceed the source beyond estimator noise."""
        slack = 2.0 * max(self.dim_before.stderr, self.dim_after.stderr)
        return self.dim_after.value <= self.dim_before.value + slack


def project_cloud(points, pi: Projection, tol_center: float = TOL_CENTER) -> np.ndarray:
    """Images of points under ``pi``, in coordinates of the target L."""
    pts = np.asarray(points, dtype=complex)
    raw = pts @ pi.coords.T
    norms = np.linalg.norm(raw, axis=1)
    bad = np.flatnonzero(norms <= tol_center)
    if bad.size:
        raise CenterIncidence(f"points {bad.tolist()} lie on the center of the projection", bad.tolist())
    return raw / norms[:, None]


def lipschitz_image_check(
    points,
    pi: Projection,
    weights=None,
    q_lo: float = 0.05,
    q_hi: float = 0.25,
    seed: int = 0,
    tol_center: float = TOL_CENTER,
) -> LipschitzImageCheck:
    """Dimension of a cloud and of its image under a projection."""
    before = correlation_dimension(points, weights, q_lo, q_hi, seed)
    after = correlation_dimension(project_cloud(points, pi, tol_center), weights, q_lo, q_hi, seed)
    return LipschitzImageCheck(before, after)
