"""Atomic positive currents of bidimension (p,p) on P^k.

A :class:`DiscreteCurrent` is a finite list of atoms ``(x_i, w_i, t_i)``: a
point, a positive weight and a trace-1 strongly positive tangent vector. It
acts on (p,p)-forms by ``<T, phi> = sum_i w_i <t_i, phi(x_i)>`` and its trace
measure is the weighted point cloud ``sum_i w_i delta_{x_i}``.

Pushing forward under a linear projection groups atoms by fiber. Within a
fiber cluster the trace measure disintegrates into normalised conditional
weights, the pushed tangent vectors are averaged against them, and the
average is split into a trace-1 direction and a density that is folded into
the output weight.
"""

import json
import os
import tempfile
from dataclasses import dataclass, field
from math import comb
from pathlib import Path
from typing import Callable

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

from .errors import CenterIncidence, DomainError, ValidationError
from .exterior import PPForm, pair, pull_form
from .linalg import complex_gaussian, derive_rng, haar_unitary, null_space
from .positivity import SPTerm, SPVector, is_psd, normalize_trace, rank_via_span
from .projective import (
    TOL_CENTER,
    ProjPoint,
    Projection,
    dprojection,
    fiber_tangent,
    random_projection,
    random_tangent_frame,
    tangent_basis,
)

SCHEMA = "plurirank-current/1"
TRACE_TOL = 1e-10
ORTHO_TOL = 1e-10
DEFAULT_DELTA = 1e-9


@dataclass(frozen=True, eq=False)
class Atom:
    x: ProjPoint
    weight: float
    t: SPVector

    def __post_init__(self):
        w = float(self.weight)
        if not np.isfinite(w) or w <= 0:
            raise DomainError(f"weight must be positive, got {float(self.weight)!r}")
        object.__setattr__(self, "weight", w)
        n = self.x.z.shape[0]
        if self.t.k != n:
            raise DomainError(f"tangent vector has {self.t.k} coordinates, point has {n}")
        tr = self.t.trace
        if abs(tr - 1.0) > TRACE_TOL:
            raise DomainError(f"tangent vector must have trace 1, got {float(tr)!r}")
        zc = self.x.z.conj()
        for j, term in enumerate(self.t.terms):
            norms = np.maximum(1.0, np.linalg.norm(term.frame, axis=0))
            if np.any(np.abs(zc @ term.frame) > ORTHO_TOL * norms):
                raise DomainError(f"frame of term {j} is not orthogonal to the base point")


@dataclass(frozen=True, eq=False)
class DiscreteCurrent:
    k: int
    p: int
    atoms: tuple = ()

    def __post_init__(self):
        if not 1 <= self.p <= self.k:
            raise DomainError(f"need 1 <= p <= k, got (k,p)=({self.k},{self.p})")
        atoms = tuple(self.atoms)
        for i, a in enumerate(atoms):
            if a.x.z.shape[0] != self.k + 1 or a.t.p != self.p:
                raise DomainError(f"atom {i} does not live on P^{self.k} with degree {self.p}")
        object.__setattr__(self, "atoms", atoms)

    def __len__(self) -> int:
        return len(self.atoms)

    @property
    def points(self) -> np.ndarray:
        if not self.atoms:
            return np.zeros((0, self.k + 1), dtype=complex)
        return np.stack([a.x.z for a in self.atoms])

    @property
    def weights(self) -> np.ndarray:
        return np.array([a.weight for a in self.atoms], dtype=float)

    @property
    def mass(self) -> float:
        return float(sum(a.weight for a in self.atoms))

    def ranks(self) -> list[int]:
        return [rank_via_span(a.t) for a in self.atoms]


@dataclass(frozen=True, eq=False)
class FiberCluster:
    """Atoms sharing one fiber, with the conditional measure on that fiber."""

    z: ProjPoint  # image point, in coordinates of the target L
    members: tuple
    conditional_weights: np.ndarray
    total_weight: float
    diameter: float  # largest distance from a member image to z


@dataclass(frozen=True, eq=False)
class PushforwardResult:
    current: DiscreteCurrent
    clusters: tuple
    h: tuple  # density per cluster; None on degenerate clusters
    degenerate: tuple  # indices of clusters whose averaged vector vanishes
    atom_cluster: tuple  # for every output atom, the cluster it came from
    projection: Projection = field(repr=False)
    images: np.ndarray = field(repr=False)  # unit image points, ambient coordinates
    pushed: tuple = field(repr=False)  # per input atom, pushed vector in ambient coordinates

    def image_measure(self) -> tuple[np.ndarray, np.ndarray]:
        """pi_* sigma_T as (points in L coordinates, weights), one atom per cluster."""
        pts = np.stack([c.z.z for c in self.clusters]) if self.clusters else np.zeros((0, self.current.k + 1))
        return pts, np.array([c.total_weight for c in self.clusters])

    def trace_measure(self) -> tuple[np.ndarray, np.ndarray]:
        """sigma_{pi_* T} as (points in L coordinates, weights)."""
        return self.current.points, self.current.weights


# --------------------------------------------------------------------------
# serialisation


def _cplx(v) -> list:
    return [[float(c.real), float(c.imag)] for c in np.asarray(v).reshape(-1)]


def _uncplx(pairs, n: int, what: str) -> np.ndarray:
    if not isinstance(pairs, list) or len(pairs) != n:
        raise DomainError(f"{what} must be a list of {n} [re, im] pairs")
    out = np.empty(n, dtype=complex)
    for j, pr in enumerate(pairs):
        if not (isinstance(pr, list) and len(pr) == 2 and all(isinstance(c, (int, float)) and not isinstance(c, bool) for c in pr)):
            raise DomainError(f"{what}[{j}] is not an [re, im] pair of numbers")
        out[j] = complex(pr[0], pr[1])
    return out


def current_to_dict(T: DiscreteCurrent) -> dict:
    atoms = []
    for a in T.atoms:
        atoms.append({
            "z": _cplx(a.x.z),
            "weight": float(a.weight),
            "terms": [
                {"lambda": float(term.lam), "frame": [_cplx(term.frame[:, j]) for j in range(T.p)]}
                for term in a.t.terms
            ],
        })
    return {"schema": SCHEMA, "k": int(T.k), "p": int(T.p), "atoms": atoms}


def _atom_from_dict(d, k: int, p: int) -> Atom:
    if not isinstance(d, dict):
        raise DomainError("atom must be an object")
    for key in ("z", "weight", "terms"):
        if key not in d:
            raise DomainError(f"missing field {key!r}")
    z = _uncplx(d["z"], k + 1, "z")
    if abs(np.linalg.norm(z) - 1.0) > 1e-12:
        raise DomainError(f"point is not a unit vector (norm {float(np.linalg.norm(z)):.6g})")
    if not isinstance(d["terms"], list):
        raise DomainError("terms must be a list")
    terms = []
    for j, td in enumerate(d["terms"]):
        if not isinstance(td, dict) or "lambda" not in td or "frame" not in td:
            raise DomainError(f"term {j} needs 'lambda' and 'frame'")
        frame = td["frame"]
        if not isinstance(frame, list) or len(frame) != p:
            raise DomainError(f"term {j} frame must hold {p} vectors")
        lam = td["lambda"]
        if isinstance(lam, bool) or not isinstance(lam, (int, float)):
            raise DomainError(f"term {j} lambda must be a number")
        cols = [_uncplx(v, k + 1, f"term {j} frame vector") for v in frame]
        terms.append(SPTerm(lam, np.stack(cols, axis=1)))
    weight = d["weight"]
    if isinstance(weight, bool) or not isinstance(weight, (int, float)):
        raise DomainError("weight must be a number")
    return Atom(ProjPoint(z), weight, SPVector(k + 1, p, tuple(terms)))


def current_from_dict(d) -> DiscreteCurrent:
    """Parse and validate a dataset; errors name the offending atom."""
    if not isinstance(d, dict):
        raise ValidationError("dataset must be a JSON object")
    if d.get("schema") != SCHEMA:
        raise ValidationError(f"schema must be {SCHEMA!r}, got {d.get('schema')!r}")
    k, p = d.get("k"), d.get("p")
    if not isinstance(k, int) or not isinstance(p, int) or isinstance(k, bool) or isinstance(p, bool) or not 1 <= p <= k:
        raise ValidationError(f"need integers 1 <= p <= k, got k={k!r}, p={p!r}")
    raw = d.get("atoms")
    if not isinstance(raw, list):
        raise ValidationError("atoms must be a list")
    atoms = []
    for i, ad in enumerate(raw):
        try:
            atoms.append(_atom_from_dict(ad, k, p))
        except DomainError as exc:
            raise ValidationError(str(exc), atom_index=i) from exc
    T = DiscreteCurrent(k, p, tuple(atoms))
    if not T.mass > 0:
        raise ValidationError("a current needs positive total mass (no atoms given)")
    return T


def atomic_write_text(path, text: str) -> None:
    """Write through a temporary file in the same directory, then rename."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def dumps_current(T: DiscreteCurrent) -> str:
    # json emits floats via repr, the shortest string that round-trips exactly.
    return json.dumps(current_to_dict(T), separators=(",", ":")) + "\n"


def save_current(T: DiscreteCurrent, path) -> None:
    atomic_write_text(path, dumps_current(T))


def load_current(path) -> DiscreteCurrent:
    try:
        with open(path, encoding="utf-8") as fh:
            d = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"not valid JSON: {exc}") from exc
    return current_from_dict(d)


# --------------------------------------------------------------------------
# measure-level operations


def restrict(T: DiscreteCurrent, predicate: Callable[[Atom], bool]) -> DiscreteCurrent:
    """The current restricted to the atoms satisfying ``predicate``; may be empty."""
    return DiscreteCurrent(T.k, T.p, tuple(a for a in T.atoms if predicate(a)))


def pair_current(T: DiscreteCurrent, phi_field) -> float:
    """``sum_i w_i <t_i, phi(x_i)>``.

    ``phi_field`` maps atom index to a :class:`PPForm` (a mapping or a
    sequence); a single PPForm is used at every atom.
    """
    total = 0.0
    for i, a in enumerate(T.atoms):
        if isinstance(phi_field, PPForm):
            phi = phi_field
        else:
            try:
                phi = phi_field[i]
            except (KeyError, IndexError):
                raise DomainError(f"no form given at atom {i}") from None
        total += a.weight * pair(a.t.matrix, phi)
    return total


def _embed(points: np.ndarray) -> np.ndarray:
    """Phase-invariant real embedding ``z -> z z^*``; Euclidean distance is sqrt(2) * fs."""
    outer = points[:, :, None] * points[:, None, :].conj()
    flat = outer.reshape(points.shape[0], -1)
    return np.hstack([flat.real, flat.imag])


def cluster_points(points: np.ndarray, delta: float) -> list[list[int]]:
    """Single-linkage clusters at Fubini-Study radius ``delta``.

    Clusters come out ordered by their smallest member index, members ascending.
    """
    if delta < 0:
        raise DomainError("clustering radius must be nonnegative")
    n = points.shape[0]
    if n == 0:
        return []
    emb = _embed(points)
    pairs = cKDTree(emb).query_pairs(np.sqrt(2.0) * delta, output_type="ndarray")
    graph = coo_matrix((np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])), shape=(n, n))
    _, labels = connected_components(graph, directed=False)
    groups: dict[int, list[int]] = {}
    for i, lab in enumerate(labels):
        groups.setdefault(int(lab), []).append(i)
    return sorted(groups.values(), key=lambda g: g[0])


def pushforward_current(
    T: DiscreteCurrent,
    pi: Projection,
    delta: float = DEFAULT_DELTA,
    tol_center: float = TOL_CENTER,
) -> PushforwardResult:
    """Push T forward to the target of ``pi`` (a current on P^ell).

    For every fiber cluster with images near z, the averaged pushed vector
    ``t~(z) = sum_i c_i pi_*(t_i)`` (conditional weights c_i) is split as
    ``t~ = trace(t~) * t_out``; the output atom carries ``t_out`` and weight
    ``W(z) * trace(t~)``, and ``h(z) = 1 / trace(t~)`` is returned, so that
    ``t_out = h t~`` and ``W = h * weight_out``. Clusters where every pushed
    term vanishes produce no atom and are listed in ``degenerate``.
    """
    if delta < 0:
        raise DomainError("clustering radius must be nonnegative")
    if T.k != pi.k:
        raise DomainError(f"current on P^{T.k} given to a projection of P^{pi.k}")
    if T.p > pi.ell:
        raise DomainError(f"cannot push bidimension ({T.p},{T.p}) to P^{pi.ell}")

    pts = T.points
    raw = pts @ pi.P.T
    norms = np.linalg.norm(raw, axis=1) if len(T) else np.zeros(0)
    bad = [int(i) for i in np.flatnonzero(norms <= tol_center)]
    if bad:
        raise CenterIncidence(f"atoms {bad} lie on the center of the projection", bad)
    images = raw / norms[:, None] if len(T) else raw

    pushed = tuple(
        a.t.map_frames(dprojection(pi, a.x, tol_center)) for a in T.atoms
    )
    groups = cluster_points(images, delta)

    clusters, hs, degenerate, out_atoms, atom_cluster = [], [], [], [], []
    lh = pi.L_basis.conj().T
    for ci, members in enumerate(groups):
        y = images[members[0]]
        w = np.array([T.atoms[i].weight for i in members])
        total = float(w.sum())
        cond = w / total
        to_l = lh @ (np.eye(pi.k + 1) - np.outer(y, y.conj()))
        terms = []
        for c, i in zip(cond, members):
            for term in pushed[i].terms:
                terms.append(SPTerm(c * term.lam, to_l @ term.frame))
        avg = SPVector(pi.ell + 1, T.p, tuple(terms))
        z_l = ProjPoint.from_vector(lh @ y)
        diam = max(
            float(np.linalg.norm(images[i] - y * np.vdot(y, images[i]))) for i in members
        )
        clusters.append(FiberCluster(z_l, tuple(members), cond, total, diam))
        live = [t for t in avg.terms if t.is_live]
        tr = avg.trace
        if not live or not tr > 0:
            hs.append(None)
            degenerate.append(ci)
            continue
        hs.append(1.0 / tr)
        out_atoms.append(Atom(z_l, total * tr, normalize_trace(avg)))
        atom_cluster.append(ci)

    out = DiscreteCurrent(pi.ell, T.p, tuple(out_atoms))
    return PushforwardResult(
        out, tuple(clusters), tuple(hs), tuple(degenerate), tuple(atom_cluster), pi, images, pushed
    )


def random_psd_form(k: int, p: int, rng: np.random.Generator) -> PPForm:
    n = comb(k, p)
    g = complex_gaussian(rng, (n, n))
    return PPForm(k, p, g @ g.conj().T / n)


@dataclass(frozen=True)
class AdjunctionCheck:
    max_rel_error: float
    n_forms: int
    n_skipped: int
    max_cluster_diameter: float
    exact_fiber: bool


def check_pairing_adjunction(
    T: DiscreteCurrent,
    pi: Projection,
    delta: float = DEFAULT_DELTA,
    n_forms: int = 100,
    seed: int = 0,
    tol_center: float = TOL_CENTER,
) -> AdjunctionCheck:
    """Compare ``<pi_* T, phi>`` with ``<T, pi^* phi>`` on random positive form fields.

    Each field assigns an independent random positive (p,p)-form on L to every
    fiber cluster. The right-hand side pulls the form back atom by atom through
    the induced map on Plücker coordinates, so it never uses the pushed
    frames. The identity is exact for exact-fiber clusters; otherwise the
    reported cluster diameter bounds how far the comparison is meaningful.
    """
    res = pushforward_current(T, pi, delta, tol_center)
    rng = np.random.default_rng(seed)
    lh = pi.L_basis.conj().T
    maps = [None] * len(T)
    cluster_of = np.empty(len(T), dtype=int)
    for ci, c in enumerate(res.clusters):
        y = res.images[c.members[0]]
        to_l = lh @ (np.eye(pi.k + 1) - np.outer(y, y.conj()))
        for i in c.members:
            cluster_of[i] = ci
            maps[i] = to_l @ dprojection(pi, T.atoms[i].x, tol_center)

    worst, skipped = 0.0, 0
    for _ in range(n_forms):
        forms = [random_psd_form(pi.ell + 1, T.p, rng) for _ in res.clusters]
        lhs = pair_current(res.current, [forms[ci] for ci in res.atom_cluster])
        rhs = sum(
            a.weight * pair(a.t.matrix, pull_form(maps[i], forms[cluster_of[i]]))
            for i, a in enumerate(T.atoms)
        )
        scale = max(abs(lhs), abs(rhs))
        if scale == 0:
            skipped += 1
            continue
        worst = max(worst, abs(lhs - rhs) / scale)
    diam = max((c.diameter for c in res.clusters), default=0.0)
    return AdjunctionCheck(worst, n_forms, skipped, diam, diam <= 1e-9)


@dataclass(frozen=True, eq=False)
class ACResult:
    """Outcome of an atomic absolute-continuity test ``sigma << nu``."""

    holds: bool
    witness: int | None = None
    witness_point: np.ndarray | None = None


def check_ac(sigma_points, sigma_weights, nu_points, nu_weights, tol: float = 1e-9) -> ACResult:
    """``sigma << nu`` for atomic measures: every charged sigma atom has a
    charged nu atom within Fubini-Study distance ``tol``."""
    sp = np.asarray(sigma_points, dtype=complex)
    sw = np.asarray(sigma_weights, dtype=float)
    npts = np.asarray(nu_points, dtype=complex)
    nw = np.asarray(nu_weights, dtype=float)
    charged_nu = npts[nw > 0] if len(npts) else npts
    idx = [i for i in range(len(sp)) if sw[i] > 0]
    if not idx:
        return ACResult(True)
    if len(charged_nu) == 0:
        return ACResult(False, idx[0], sp[idx[0]])
    tree = cKDTree(_embed(charged_nu))
    dist, _ = tree.query(_embed(sp[idx]), k=1)
    for i, d in zip(idx, dist):
        if d > np.sqrt(2.0) * tol:
            return ACResult(False, i, sp[i])
    return ACResult(True)


# --------------------------------------------------------------------------
# synthetic currents


def _plane_atoms(basis: np.ndarray, n: int, weight: float, rng: np.random.Generator) -> list[Atom]:
    """Uniform atoms on the projective plane P(span basis) with its tangent planes."""
    dim = basis.shape[1]
    g = complex_gaussian(rng, (n, dim))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    atoms = []
    for u in g:
        z = basis @ u
        frame = basis @ null_space(u.conj()[np.newaxis, :], dim - 1)
        t = SPVector(basis.shape[0], dim - 1, (SPTerm(1.0, frame),))
        atoms.append(Atom(ProjPoint.from_vector(z), weight, normalize_trace(t)))
    return atoms


def _check_generator_range(k: int, p: int, n: int) -> None:
    if not 1 <= p <= k - 1:
        raise DomainError(f"need 1 <= p <= k-1, got k={k}, p={p}")
    if n < 1:
        raise DomainError("need at least one atom")


def generate_plane_current(k: int, p: int, n: int, seed: int) -> DiscreteCurrent:
    """Integration current of a Haar-random projective p-plane, sampled at n points."""
    _check_generator_range(k, p, n)
    rng = np.random.default_rng(seed)
    basis = haar_unitary(k + 1, rng)[:, : p + 1]
    return DiscreteCurrent(k, p, tuple(_plane_atoms(basis, n, 1.0 / n, rng)))


def generate_union_current(k: int, p: int, m: int, n: int, seed: int) -> DiscreteCurrent:
    """n atoms spread round-robin over m independent Haar-random p-planes."""
    _check_generator_range(k, p, n)
    if m < 1:
        raise DomainError("need at least one plane")
    planes = [haar_unitary(k + 1, derive_rng(seed, 0, j))[:, : p + 1] for j in range(m)]
    counts = [n // m + (1 if j < n % m else 0) for j in range(m)]
    per_plane = [
        _plane_atoms(planes[j], counts[j], 1.0 / n, derive_rng(seed, 1, j)) for j in range(m)
    ]
    atoms = []
    for i in range(n):
        atoms.append(per_plane[i % m][i // m])
    return DiscreteCurrent(k, p, tuple(atoms))


@dataclass(frozen=True, eq=False)
class FiberedFamily:
    current: DiscreteCurrent
    projection: Projection
    fiber_of: tuple  # fiber index of every atom


def generate_fibered_family(
    k: int,
    p: int,
    ell: int,
    n_fibers: int,
    per_fiber: int,
    seed: int,
    shared_tangent: bool = False,
) -> FiberedFamily:
    """Atoms placed on common fibers of a projection drawn first.

    Every fiber is the span of the center with a random base point, so atoms
    on it collide exactly under the projection. Tangent vectors are random
    decomposable p-frames; with ``shared_tangent`` they are instead lifted from
    one frame at the image point, so all pushed vectors on a fiber agree.
    """
    if not 1 <= p <= ell <= k - 1:
        raise DomainError(f"need 1 <= p <= ell <= k-1, got k={k}, p={p}, ell={ell}")
    if n_fibers < 1 or per_fiber < 1:
        raise DomainError("need at least one fiber and one atom per fiber")
    pi = random_projection(k, ell, [seed, 0])
    rng = derive_rng(seed, 1)
    atoms, fiber_of = [], []
    weight = 1.0 / (n_fibers * per_fiber)
    for f in range(n_fibers):
        base = complex_gaussian(rng, k + 1)
        y = pi.P @ base
        y /= np.linalg.norm(y)
        if shared_tangent:
            u = ProjPoint.from_vector(pi.to_target(y))
            target = pi.L_basis @ random_tangent_frame(u, p, rng)
        for _ in range(per_fiber):
            z = base * complex_gaussian(rng, 1)[0] + pi.I_basis @ complex_gaussian(rng, k - ell)
            x = ProjPoint.from_vector(z)
            if shared_tangent:
                # solve inside x^perp; the cutoff drops the rank-deficiency noise of D
                tb = tangent_basis(x)
                frame = tb @ (np.linalg.pinv(dprojection(pi, x) @ tb, rcond=1e-10) @ target)
            else:
                frame = random_tangent_frame(x, p, rng)
            t = normalize_trace(SPVector(k + 1, p, (SPTerm(1.0, frame),)))
            atoms.append(Atom(x, weight, t))
            fiber_of.append(f)
    return FiberedFamily(DiscreteCurrent(k, p, tuple(atoms)), pi, tuple(fiber_of))


def fiber_atom(pi: Projection, x: ProjPoint, p: int, weight: float = 1.0) -> Atom:
    """An atom at x whose tangent p-frame lies inside the fiber of ``pi``.

    Its pushforward vanishes; needs p <= k - ell.
    """
    fiber = fiber_tangent(pi, x).vectors
    if p > fiber.shape[1]:
        raise DomainError(f"fiber has dimension {fiber.shape[1]} < p = {p}")
    t = normalize_trace(SPVector(pi.k + 1, p, (SPTerm(1.0, fiber[:, :p]),)))
    return Atom(x, weight, t)


def pushed_is_strongly_positive(res: PushforwardResult) -> bool:
    return all(is_psd(a.t) for a in res.current.atoms)


def generate_rank_violation(k: int, p: int, n: int, rank: int, seed: int) -> DiscreteCurrent:
    """A plane current whose first atom is replaced by one of the given rank.

    The cloud still looks 2p-dimensional, so the rank bound fails at that
    atom. Not a closed current: this is a detector test input.
    """
    _check_generator_range(k, p, n)
    if not p < rank <= k:
        raise DomainError(f"need p < rank <= k, got p={p}, rank={rank}, k={k}")
    T = generate_plane_current(k, p, n, seed)
    x = T.atoms[0].x
    tangent = random_tangent_frame(x, rank, derive_rng(seed, 1))
    frames = [tangent[:, [(s + j) % rank for j in range(p)]] for s in range(rank)]
    t = normalize_trace(SPVector.from_frames(frames))
    atoms = (Atom(x, T.atoms[0].weight, t),) + T.atoms[1:]
    return DiscreteCurrent(k, p, atoms)


def generate_degenerate_fiber(k: int, p: int, ell: int, n: int, seed: int) -> tuple[DiscreteCurrent, Projection]:
    """A plane current plus one atom tangent to a fiber of a fixed projection.

    Under the returned projection that atom pushes forward to zero, so its
    image carries trace mass of T but none of the pushed current.
    """
    _check_generator_range(k, p, n)
    if not p <= ell <= k - p:
        raise DomainError(f"need p <= ell <= k - p, got k={k}, p={p}, ell={ell}")
    T = generate_plane_current(k, p, n, seed)
    pi = random_projection(k, ell, [seed, 1])
    x = ProjPoint.from_vector(complex_gaussian(derive_rng(seed, 2), k + 1))
    extra = fiber_atom(pi, x, p, weight=1.0 / n)
    return DiscreteCurrent(k, p, T.atoms + (extra,)), pi
