"""Entanglement measures and separability certificates for n-qubit W-class states."""

from .errors import (
    CapExceeded,
    CoherencesNotZero,
    NegativeWeight,
    NotPositive,
    NotPure,
    SylvesterViolation,
    ValidationError,
    WTangleError,
)
from .linalg import (
    DEFAULT_CAP,
    DEFAULT_TOL,
    concurrence_spectrum,
    hermitian_eigenvalues,
    kron,
    partial_trace,
    partial_transpose,
)
from .measures import (
    Z_PRESETS,
    MeasureReport,
    closed_form_pi_tangle,
    closed_form_sum_pi,
    closed_form_sum_two_tangles,
    concurrence,
    large_n_condition_check,
    measure_report,
    negativity,
    one_tangle,
    pair_concurrences,
    pair_negativities,
    pi_tangle,
    resolve_z,
    sum_pi_tangles,
    sum_two_tangles,
    three_tangle,
)
from .sampling import SamplerConfig, dephase, sample_local_unitary, sample_state
from .separability import (
    ProductVector,
    SeparabilityCertificate,
    audit_theorem,
    certify,
    check_positivity,
)
from .states import (
    AsymmetricWState,
    BipartiteReduction,
    DensityMatrix,
    SymmetricWState,
    WSubspaceState,
    build_asymmetric,
    build_symmetric,
    reduce_pair,
    to_full,
    zero_coherences,
)

__version__ = "0.1.0"
