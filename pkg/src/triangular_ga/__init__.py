"""Classification of triangular additive-group actions on A^3 over Q[x]_(x)."""

from .errors import (
    AlgebraError,
    DegenerateError,
    DivisibilityError,
    InternalConsistencyError,
    InternalError,
    NotASliceError,
    NotInvertibleError,
    ParseError,
    PreconditionError,
    SchemaError,
    SearchBudgetError,
    UnsupportedSplittingError,
    VariableError,
)
from .ring import BaseElem, MPoly, comp_inverse_mod_xn, parse_poly
from .ideals import (
    GroebnerBasis,
    MembershipWitness,
    groebner,
    layered_membership,
    member,
    minimal_polynomial_mod,
    monitored_layered_membership,
    resultant,
    squarefree_part,
    uni_gcd,
    unit_ideal,
)
from .lnd import (
    FlowMap,
    SliceCertificate,
    TriangularDerivation,
    TwinDerivation,
    apply_derivation,
    basic_invariants,
    dixmier,
    exp_flow,
    fpf_check,
    fpf_oracle,
    integral,
    reconstruct,
    verify_slice,
)
from .reduction import (
    NormalizationStep,
    NonProperTrigger,
    SharpResult,
    constant_residue_slice_builder,
    easy_translation,
    pull_back,
    rank_two_slice,
    reducible_q_normalize,
    sharp_decompose,
    sharp_reduce,
)
from .properness import GammaCertificate, gamma_membership, gamma_poly, non_properness_certificate
from .atlas import (
    Cocycle,
    GeneralPositionData,
    SplittingAlgebra,
    build_side,
    chart_cocycle,
    general_position,
    hensel_lift_sigmas,
    psi_affineness,
    s1_s2_factor,
    separatedness_check,
    splitting_build,
)
from .driver import ClassificationReport, classify_driver, delta
from .io import loads, parse, render, replay_certificate

__version__ = "0.1.0"
