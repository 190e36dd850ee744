"""Uncertainty-relation vectors, hidden-angle cosines, and velocity bounds.

A toolkit for separable 3D quantum states: per-axis position/momentum
variances (closed form, quadrature, or Monte Carlo), the aggregated
uncertainty relation between the squared-deviation vectors with its
angular variable, the per-axis and aggregated velocity-momentum-duration
relations, and a calibrated estimator bounding the group velocity of a
virtual particle from measurement samples.
"""

from .axis_states import (
    AxisState,
    Family,
    SeparableState3D,
    closed_form_variances,
    eval_psi,
    gaussian_packet,
    harmonic_oscillator,
    infinite_well,
    load_tabulated,
    make_axis_state,
    tabulated,
)
from .errors import (
    ConflictingCalibration,
    DegenerateVector,
    DerivativeUnstable,
    HiddenAngleError,
    InvalidQuantumNumber,
    MalformedRow,
    MissingHeader,
    NoClosedForm,
    NonFiniteValue,
    NonPositiveParameter,
    OutOfDomain,
    QuadratureNotConverged,
    RejectionInefficient,
    TooFewEvents,
    UnnormalizableTable,
)
from .event_stats import (
    EventRecord,
    SampleMoments,
    VelocityReport,
    parse_events,
    sample_moments,
    virtual_velocity_pipeline,
)
from .landau_peierls import (
    EnergyTimeParams,
    GroupVelocity,
    VelocityEstimate,
    calibrate_A,
    cauchy_schwarz_gap,
    energy_time_check,
    estimate_u2_norm,
    lp_aggregated_report,
    lp_per_axis_check,
    normalization_A,
    velocity_bound,
)
from .moments import (
    QuadratureConfig,
    Rule,
    VarianceVector,
    mc_variance_oracle,
    momentum_variance_quad,
    position_variance_quad,
    variance_vectors,
)
from .relations import (
    HBarContext,
    UncertaintyReport,
    box_cos_closed,
    cos_geometric,
    cos_saturation,
    dot,
    ho_cos_closed,
    hur_report,
    norm,
)

__version__ = "1.0.0"
