"""Exact-arithmetic toolkit for finite ontological models.

Finite measurement and preparation scenarios with rational probabilities,
ontic/epistemic classification of properties, local-realizability
decisions with self-verifying witnesses and certificates, and a small
quantum layer that bridges Born probabilities into the exact setting.
"""

from .probcore import (
    Check,
    Dist,
    EmpiricalModel,
    InvariantViolation,
    JointOutcome,
    MeasurementScenario,
    NegativeWeight,
    NotASubcontext,
    OntolabError,
    Rational,
    SignallingWitness,
    SumNotOne,
    check_no_signalling,
    is_delta,
    make_dist,
    marginalize,
    mix_empirical,
    product_dist,
)
from .properties import (
    Classification,
    Epistemic,
    InvertedFamily,
    Ontic,
    PriorNotFullSupport,
    Property,
    bayes_invert,
    classify,
    hs_equivalence,
    supports_overlap,
)
from .ontomodel import (
    CanonicalLocalModel,
    EPISTEMIC,
    FactorizationWitness,
    MarginalIllDefined,
    NondeterministicWitness,
    NotLocal,
    ONTIC,
    OntologicalModel,
    ParameterDependenceWitness,
    UNDEFINED,
    UnknownPreparation,
    canonicalize,
    factorizes,
    is_deterministic,
    is_local,
    is_parameter_independent,
    observable_property,
    onticity_report,
    operational_probabilities,
)
from .localdecide import (
    DEFAULT_ASSIGNMENT_CAP,
    Feasible,
    Infeasible,
    LocalWitness,
    NonlocalityCertificate,
    Signalling,
    SignedWeights,
    TooManyAssignments,
    decide_local,
    global_assignments,
    lp_feasibility,
    quasi_local_decomposition,
    verify_certificate,
    verify_signed_weights,
    verify_witness,
)
from .prepscen import (
    OUTSIDE,
    OVERLAP,
    BadRegion,
    DependenceWitness,
    PBRParams,
    PreparationModel,
    PreparationScenario,
    PrepSignallingWitness,
    QOutOfRange,
    as_measurement_model,
    is_no_preparation_signalling,
    is_preparation_independent,
    overlap_event_probability,
    pbr_counterexample,
    product_preparation_model,
)

__version__ = "0.1.0"
