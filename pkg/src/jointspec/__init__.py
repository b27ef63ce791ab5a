"""Determinantal hypersurfaces of matrix pencils and their local spectral data."""

from .branches import (
    Branch,
    DerivativeEstimate,
    RegularityReport,
    SpectralResolution,
    TOperator,
    branch_derivatives,
    check_regularity,
    local_branches,
    probe_regularity,
    spectral_resolution,
    t_operator,
)
from .coxeter import (
    CoxeterMatrix,
    CoxeterRep,
    DihedralIrrep,
    RigidityReport,
    SpectrumComponentDescriptor,
    build_representation,
    check_condition_I,
    check_condition_II,
    check_condition_star,
    dihedral,
    dihedral_component_catalog,
    dihedral_pair_decomposition,
    equivalence_evidence,
    extended_tuple,
    extract_invariant_subspace,
    geometric_representation,
    rigidity_check,
    verify_restriction,
)
from .errors import (
    AssignmentError,
    BranchCollisionError,
    DimensionMismatchError,
    EigenvalueOnContourError,
    EmptySubspaceError,
    ExtrapolationError,
    JointSpecError,
    NotNormalError,
    PairingAmbiguityError,
    ProjectionBlowupError,
    QuadratureError,
    SeparationError,
    TrackingError,
    UnknownEigenvalueError,
)
from .pencil import (
    MatrixTuple,
    NormalityReport,
    PencilPoint,
    det_chart_first,
    det_projective,
    det_proper,
    evaluate_pencil,
    is_spectral_point,
    line_roots,
    normality_report,
    opnorm,
    sample_spectrum_curve,
    slice_roots,
)
from .projections import (
    ComponentProjection,
    ContourSpec,
    LimitProjection,
    NormProfile,
    component_projection,
    limit_projection,
    projection_ladder,
    projection_norm_profile,
    riesz_projection,
    riesz_projection_info,
)
from .relations import (
    HypothesisNotMet,
    PairAnalysis,
    RelationReport,
    analyze_pair,
    verify_cross_moment_zero,
    verify_first_moment,
    verify_orthogonality_and_resolution,
    verify_pair,
    verify_prime_relations,
    verify_same_projection_lemma,
    verify_second_moment,
    verify_square_relation,
)

__version__ = "0.1.0"
