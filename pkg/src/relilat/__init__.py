"""Exact reliability analysis of semicoherent systems and weighted lattice polynomials."""

from .errors import *  # noqa: F401,F403
from .setfun import (
    MAX_N,
    MobiusTransform,
    SetFunction,
    ValidationReport,
    dual,
    mobius_transform,
    validate_semicoherent,
    zeta_transform,
)
from .structure import (
    FormTag,
    PathCutReport,
    SystemStructure,
    bridge,
    eval_mle,
    eval_structure,
    from_cut_sets,
    from_path_sets,
    from_truth_table,
    kofn_mobius,
    make_kofn,
    minimal_path_sets,
    parallel,
    series,
)
from .latpoly import (
    MinimalWlpRepresentation,
    SymmetricProfile,
    WeightedLatticePolynomial,
    WlpForm,
    eval_wlp,
    from_terms,
    lp_from_structure,
    make_symmetric,
    make_weighted_max,
    make_weighted_min,
    minimal_representation,
    threshold_structure,
    weighted_bridge,
)
from .lifetimes import (
    Comonotone,
    DiscreteJoint,
    Exponential,
    Independent,
    JointLifetimeModel,
    PiecewiseEmpirical,
    StateVectorDistribution,
    Weibull,
    joint_cdf,
    joint_survival,
    pgf_eval,
    sample_lifetimes,
    state_vector_dist,
)
from .reliability import (
    Formula,
    MttfResult,
    ReliabilityQuery,
    ReliabilityReport,
    mttf,
    reliability_at,
    reliability_curve,
    symmetric_reliability_at,
    wlp_distribution_at,
)
from .mcoracle import McEstimate, estimate_mttf, estimate_reliability
from .specfile import SystemSpec, emit_canonical, parse_spec, parse_spec_file

__version__ = "0.1.0"
