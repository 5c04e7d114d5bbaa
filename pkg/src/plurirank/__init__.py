"""Strongly positive (p,p)-vectors, linear projections of P^k and rank checks
for discretized positive currents."""

__version__ = "0.1.0"

from .errors import CenterIncidence, DomainError, PlurirankError, ValidationError
from .exterior import (
    PluckerVector,
    PPForm,
    PPMatrix,
    contract_beta,
    enumerate_multiindices,
    pair,
    plucker_from_frame,
    pp_from_plucker,
    trace,
)
from .positivity import (
    SPTerm,
    SPVector,
    average,
    is_decomposable_by_rank,
    lemma_i_check,
    normalize_trace,
    rank_via_contraction,
    rank_via_span,
)
from .projective import (
    ProjPoint,
    Projection,
    TangentFrame,
    dprojection,
    fiber_tangent,
    fs_distance,
    is_transverse,
    project_point,
    pushforward_sp,
    random_projection,
)
from .currents import (
    Atom,
    DiscreteCurrent,
    FiberCluster,
    check_ac,
    check_pairing_adjunction,
    generate_fibered_family,
    generate_plane_current,
    generate_union_current,
    load_current,
    pair_current,
    pushforward_current,
    restrict,
    save_current,
)
from .dimension import DimensionEstimate, correlation_dimension, lipschitz_image_check
from .genericity import (
    KernelSample,
    TrialReport,
    adversarial_kernel,
    haar_kernel,
    injectivity_trial,
    lemma_ii_trial,
    transversality_montecarlo,
)
from .harness import VerifyReport, singularity_experiment, verify_theorem
