"""End-to-end rank/dimension verification on discretized currents.

``verify_theorem`` estimates the dimension of the trace measure, derives the
projection target ``ell``, checks the two-sided rank bound atom by atom,
pushes the current forward under a Haar-random projection and, when some
atoms have rank >= ell, runs both sides of the rank-drop argument on them:
the pushed restricted current and the generic per-atom pushed ranks. The
domination step that would connect the two (it needs regularisation theory
that is not implemented) is recorded as assumed, never checked.

The estimated dimension carries noise, so bounds derived from it use a
tolerance ``dim_tol`` (default 0.25, the calibration accuracy required of
the estimator): the rank bound is ``floor((dim + dim_tol) / 2)`` and
``ell`` is one more.
"""

import hashlib
import json
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .currents import (
    DEFAULT_DELTA,
    DiscreteCurrent,
    check_ac,
    pushforward_current,
    restrict,
)
from .dimension import DimensionEstimate, correlation_dimension, project_cloud
from .errors import CenterIncidence, DomainError
from .genericity import transversality_montecarlo
from .linalg import RANK_RTOL
from .positivity import rank_via_span
from .projective import (
    TOL_CENTER,
    identity_projection,
    pushforward_sp,
    random_projection,
)

REPORT_SCHEMA = "plurirank-report/1"
DIM_TOL = 0.25
MAX_RESAMPLES = 16
MIN_ATOMS = 100


def _histogram(ranks) -> dict:
    return {str(r): c for r, c in sorted(Counter(int(r) for r in ranks).items())}


def sample_projection(T: DiscreteCurrent, ell: int, seed, tol_center: float = TOL_CENTER):
    """A Haar projection onto P^ell missing every atom, with the number of resamples.

    ``ell >= k`` gives the identity.
    """
    if ell >= T.k:
        return identity_projection(T.k), 0
    pts = T.points
    for attempt in range(MAX_RESAMPLES):
        pi = random_projection(T.k, ell, [*np.atleast_1d(seed).tolist(), attempt])
        if len(pts) == 0 or np.min(np.linalg.norm(pts @ pi.P.T, axis=1)) > tol_center:
            return pi, attempt
    raise CenterIncidence(f"every one of {MAX_RESAMPLES} sampled projections hit an atom")


@dataclass
class VerifyReport:
    k: int
    p: int
    dim_estimate: DimensionEstimate
    dim_tolerance: float
    ell: int
    rank_upper_bound: int
    per_atom_ranks: dict
    eq1_satisfied: bool
    ac_checks: tuple
    degenerate_clusters: int
    pushed_ranks: dict
    projection_ell: int
    projection_resamples: int
    ell_unstable: bool
    contradiction: dict | None
    seeds: dict
    tolerances: dict = field(default_factory=dict)

    def violations(self) -> list[str]:
        out = []
        if not self.eq1_satisfied:
            out.append(
                f"rank bound violated: ranks {self.per_atom_ranks} outside "
                f"[{self.p}, {self.rank_upper_bound}]"
            )
        return out

    def as_dict(self) -> dict:
        return {
            "k": self.k,
            "p": self.p,
            "dim_estimate": self.dim_estimate.as_dict(),
            "dim_tolerance": self.dim_tolerance,
            "ell": self.ell,
            "rank_upper_bound": self.rank_upper_bound,
            "per_atom_ranks": self.per_atom_ranks,
            "eq1_satisfied": self.eq1_satisfied,
            "ac_checks": {
                "trace_of_push_ll_push_of_trace": self.ac_checks[0],
                "push_of_trace_ll_trace_of_push": self.ac_checks[1],
            },
            "degenerate_clusters": self.degenerate_clusters,
            "pushed_ranks": self.pushed_ranks,
            "projection_ell": self.projection_ell,
            "projection_resamples": self.projection_resamples,
            "ell_unstable": self.ell_unstable,
            "contradiction": self.contradiction,
            "seeds": self.seeds,
            "tolerances": self.tolerances,
        }


def rank_bounds(dim_value: float, dim_tol: float = DIM_TOL) -> tuple[int, int]:
    """(upper rank bound, ell) derived from an estimated dimension."""
    bound = int(np.floor((dim_value + dim_tol) / 2.0))
    return bound, bound + 1


def verify_theorem(
    T: DiscreteCurrent,
    seed: int,
    q_lo: float = 0.05,
    q_hi: float = 0.25,
    delta: float = DEFAULT_DELTA,
    tol_center: float = TOL_CENTER,
    dim_tol: float = DIM_TOL,
    trials: int = 20,
    spot_checks: int = 5,
    max_spot_atoms: int = 50,
) -> VerifyReport:
    """Check ``p <= rank(t_x) <= dim(sigma_T) / 2`` on every atom of T."""
    if len(T) < MIN_ATOMS:
        raise DomainError(f"need at least {MIN_ATOMS} atoms, got {len(T)}")
    est = correlation_dimension(T.points, T.weights, q_lo, q_hi, seed=[seed, 0])
    bound, ell = rank_bounds(est.value, dim_tol)
    ranks = T.ranks()
    eq1 = all(T.p <= r <= bound for r in ranks)

    pi, resamples = sample_projection(T, ell, [seed, 1], tol_center)
    res = pushforward_current(T, pi, delta, tol_center)
    img_pts, img_w = res.image_measure()
    out_pts, out_w = res.trace_measure()
    forward = check_ac(out_pts, out_w, img_pts, img_w, delta).holds
    backward = check_ac(img_pts, img_w, out_pts, out_w, delta).holds

    contradiction = None
    S = restrict(T, lambda a: rank_via_span(a.t) >= ell)
    if len(S):
        contradiction = _contradiction_branches(
            S, ell, pi, seed, delta, tol_center, trials, spot_checks, max_spot_atoms
        )

    return VerifyReport(
        k=T.k,
        p=T.p,
        dim_estimate=est,
        dim_tolerance=dim_tol,
        ell=ell,
        rank_upper_bound=bound,
        per_atom_ranks=_histogram(ranks),
        eq1_satisfied=eq1,
        ac_checks=(forward, backward),
        degenerate_clusters=len(res.degenerate),
        pushed_ranks=_histogram(res.current.ranks()),
        projection_ell=pi.ell,
        projection_resamples=resamples,
        ell_unstable=bool(abs(est.value - round(est.value)) < 2.0 * est.stderr),
        contradiction=contradiction,
        seeds={"seed": seed, "dimension": [seed, 0], "projection": [seed, 1]},
        tolerances={
            "rank_rtol": RANK_RTOL,
            "delta": delta,
            "tol_center": tol_center,
            "q_lo": q_lo,
            "q_hi": q_hi,
        },
    )


def _contradiction_branches(S, ell, pi, seed, delta, tol_center, trials, spot_checks, max_spot_atoms):
    """Both branches of the rank-drop argument on the atoms of rank >= ell."""
    report = {
        "atoms_rank_at_least_ell": len(S),
        "domination_step": "assumed",
    }
    if ell > S.k - 1:
        report["note"] = f"ell = {ell} leaves no room for a proper projection of P^{S.k}"
        return report
    pushed = pushforward_current(S, pi, delta, tol_center)
    pushed_ranks = pushed.current.ranks()
    report["pushed_S_ranks"] = _histogram(pushed_ranks)
    report["pushed_S_all_below_ell"] = all(r < ell for r in pushed_ranks)

    generic, total = 0, 0
    for i, a in enumerate(S.atoms[:max_spot_atoms]):
        for n in range(spot_checks):
            q = random_projection(S.k, ell, [seed, 2, i, n])
            try:
                r = rank_via_span(pushforward_sp(q, a.x, a.t, tol_center))
            except CenterIncidence:
                continue
            total += 1
            generic += r >= ell
    report["generic_pushed_rank_at_least_ell_fraction"] = generic / total if total else None
    if S.p <= ell:
        tr = transversality_montecarlo(S, ell, trials, seed)
        report["transversality"] = {"trials": tr.trials, "failures": tr.failures}
    report["both_branches_observed"] = bool(
        report["pushed_S_all_below_ell"] and total and generic == total
    )
    return report


def singularity_experiment(
    points,
    weights,
    ell: int,
    trials: int,
    seed: int,
    q_lo: float = 0.05,
    q_hi: float = 0.25,
    dim_tol: float = DIM_TOL,
    tol_center: float = TOL_CENTER,
) -> dict:
    """Dimension of the projected trace cloud over random projections onto P^ell.

    A projected dimension below ``2 ell - dim_tol`` is the discrete stand-in
    for a pushed trace measure singular to Lebesgue measure on P^ell. Purely
    observational.
    """
    pts = np.asarray(points, dtype=complex)
    k = pts.shape[1] - 1
    if ell < 1:
        raise DomainError("need ell >= 1")
    estimates = []
    for n in range(trials):
        if ell >= k:
            img = pts
        else:
            pi = random_projection(k, ell, [seed, n])
            img = project_cloud(pts, pi, tol_center)
        est = correlation_dimension(img, weights, q_lo, q_hi, seed=[seed, n])
        estimates.append(est)
    below = [e.value < 2 * ell - dim_tol for e in estimates]
    return {
        "ell": ell,
        "trials": trials,
        "projected_dims": [e.value for e in estimates],
        "projected_stderr": [e.stderr for e in estimates],
        "singular_fraction": (sum(below) / trials) if trials else None,
        "threshold": 2 * ell - dim_tol,
    }


def digest_bytes(*chunks: bytes) -> str:
    h = hashlib.sha256()
    for c in chunks:
        h.update(c)
    return h.hexdigest()


def make_report(op: str, inputs_digest: str, seed, metrics: dict, violations: list) -> dict:
    return {
        "schema": REPORT_SCHEMA,
        "op": op,
        "inputs_digest": inputs_digest,
        "seed": seed,
        "metrics": metrics,
        "violations": violations,
    }


def dumps_report(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2, allow_nan=False) + "\n"
