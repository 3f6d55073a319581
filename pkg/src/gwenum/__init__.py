"""Grothendieck-Witt valued curve-count toolkit.

GW(k) arithmetic with a decidable equality, finite etale algebras and
their trace forms, enriched/twisted binomial coefficients, Picard
lattice models of surface degenerations, and the wall-crossing engine
that ties them together.
"""

from .errors import (
    DegreeLimitExceeded,
    DegreeMismatch,
    DimensionMismatch,
    EvenCharacteristic,
    FieldMismatch,
    GwenumError,
    IndexOutOfRange,
    MissingEntry,
    MissingEntryWarning,
    NotPerpendicular,
    ParityViolation,
    ProfileInconsistent,
    SquareTwistWarning,
    UnsupportedExtension,
    ZeroElement,
)
from .fields import BaseField, SquareClass, sq_class, squarefree_part
from .gw import (
    GWElement,
    GWInvariants,
    gw_eq,
    gw_form,
    gw_from_json,
    gw_invariants,
    gw_to_json,
    gw_unit,
    gw_zero,
    hilbert_places,
    hilbert_symbol,
    hyperbolic,
    parse_gw,
    pretty,
)
from .etale import (
    EtaleAlgebra,
    FiniteFactor,
    GaloisSet,
    MultiQuadFactor,
    OrbitDecomposition,
    algebra_of_decomposition,
    curve_weight,
    fiber_set,
    mass,
    orbits,
    quad_ext,
    scaled_trace,
    trace_form,
    transfer,
)
from .binomial import (
    BinomialQuery,
    binom,
    check_induction_step,
    check_main_identity,
    check_product,
    check_symmetry,
    check_twisted_product,
    check_useful_identity,
    fq_corpus,
    main_identity_rhs,
    multiquadratic_corpus,
    pascal_triangle,
    run_identity_suite,
    tbinom,
    twisted_diagonal,
    useful_identity_rhs,
)
from .lattice import (
    LatticeModel,
    SurgeryModel,
    adjunction_genus,
    blowup_lattice,
    blowup_model,
    cubic_model,
    dehn_twist,
    dot,
    j_range,
    n_points,
    perp_project,
    phi_fiber,
    quadric_model,
)
from .wallcross import (
    InvariantTable,
    ProfileData,
    ProfileRecord,
    blowup_general,
    check_surgery_consistency,
    conjectural_blowup_reduction,
    degeneration_sum,
    dehn_check,
    euler_char_quadric,
    euler_diff,
    quadric_general,
    quadric_split,
    random_profile,
    wall_cross,
    welschinger_reduction,
)

__version__ = "0.1.0"
