"""Resource theory of quantum reference frames at desk scale.

Standard-form states, invariant Kraus channels, single-copy convertibility
solvers, frameness monotones, and asymptotic rate verification for the Z2,
U(1), and SU(2) superselection rules.
"""

from .config import set_tolerance, tolerance
from .errors import (
    AuditFailed,
    CompletenessViolated,
    EmptyState,
    FramenessError,
    IllegalShift,
    MonotoneViolated,
    NegativeWeight,
    NotAResource,
    NotDensityMatrix,
    ShiftDirectionUnavailable,
    SsrMismatch,
    TargetOutOfRange,
    TriangleViolation,
    WindowExceeded,
)
from .wigner import HalfInt, ThreeJArgs, clebsch_gordan, three_j
from .states import (
    Spectrum,
    Ssr,
    WeightState,
    from_json,
    is_gapless,
    is_resource,
    normalize,
    spectrum,
    tensor,
    tensor_all,
)
from .channels import (
    DiagonalKraus,
    KrausChannel,
    SphericalTensorKraus,
    apply,
    build_diagonal_channel,
    build_spherical_tensor,
    channel_from_json,
    is_invariant_channel,
    twirl,
    verify_covariance,
)
from .singlecopy import (
    FeasibilityCertificate,
    MaxProbMethod,
    MaxProbResult,
    StochasticFragment,
    det_feasible,
    majorizes,
    max_prob,
    stoch_feasible,
    stochastic_monotones,
    synthesize_ensemble_z2,
)
from .monotones import (
    MonotoneReport,
    chirality,
    j_mean,
    j_variance,
    monotonicity_audit,
    number_variance,
    report,
    z2_asymptotic,
)
from .asymptotic import (
    RateResult,
    Regime,
    fidelity,
    rate,
    tensor_power,
    variance_reduction_measurement,
    verify_rate,
)

__version__ = "0.1.0"

__all__ = [
    "AuditFailed",
    "CompletenessViolated",
    "DiagonalKraus",
    "EmptyState",
    "FeasibilityCertificate",
    "FramenessError",
    "HalfInt",
    "IllegalShift",
    "KrausChannel",
    "MaxProbMethod",
    "MaxProbResult",
    "MonotoneReport",
    "MonotoneViolated",
    "NegativeWeight",
    "NotAResource",
    "NotDensityMatrix",
    "RateResult",
    "Regime",
    "ShiftDirectionUnavailable",
    "Spectrum",
    "SphericalTensorKraus",
    "Ssr",
    "SsrMismatch",
    "StochasticFragment",
    "TargetOutOfRange",
    "ThreeJArgs",
    "TriangleViolation",
    "WeightState",
    "WindowExceeded",
    "apply",
    "build_diagonal_channel",
    "build_spherical_tensor",
    "channel_from_json",
    "chirality",
    "clebsch_gordan",
    "det_feasible",
    "fidelity",
    "from_json",
    "is_gapless",
    "is_invariant_channel",
    "is_resource",
    "j_mean",
    "j_variance",
    "majorizes",
    "max_prob",
    "monotonicity_audit",
    "normalize",
    "number_variance",
    "rate",
    "report",
    "set_tolerance",
    "spectrum",
    "stoch_feasible",
    "stochastic_monotones",
    "synthesize_ensemble_z2",
    "tensor",
    "tensor_all",
    "tensor_power",
    "three_j",
    "tolerance",
    "twirl",
    "variance_reduction_measurement",
    "verify_covariance",
    "verify_rate",
    "z2_asymptotic",
]
