"""Energy-time and velocity-momentum inequalities, and the velocity bound.

The per-axis relation |u_i| dp_i dt >= hbar for a relativistic free
particle aggregates, exactly like the position-momentum case, into an
inequality between the norms of the squared-velocity vector and the
momentum-deviation vector, with its own angle.  Combining the two
aggregated relations and the energy-time relation gives an
order-of-magnitude estimate for |u^2| and, through the
Cauchy-Bunyakovsky-Schwarz inequality, an upper bound on |u|:

    |u| <= sqrt(3 |u^2|) = sqrt(3 A (dE)^2 / |(dP)^2|),  A = 3 / (delta^2 cos)

The normalization A can be fixed either from (delta, cos) directly or by
calibrating against a reference sample whose speed is known (the on-shell
limit); the calibration route inverts the bound exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DegenerateVector, OutOfDomain
from .moments import VarianceVector
from .relations import HBarContext

__all__ = [
    "GroupVelocity",
    "EnergyTimeParams",
    "VelocityEstimate",
    "EnergyTimeResult",
    "PerAxisVelocityResult",
    "AggregatedVelocityReport",
    "energy_time_check",
    "lp_per_axis_check",
    "lp_aggregated_report",
    "normalization_A",
    "estimate_u2_norm",
    "velocity_bound",
    "calibrate_A",
    "cauchy_schwarz_gap",
]

CHECK_TOL = 1e-10


@dataclass(frozen=True)
class GroupVelocity:
    """Group-velocity vector (u_x, u_y, u_z) in units of c."""

    components: tuple[float, float, float]

    def __post_init__(self):
        comps = tuple(float(c) for c in self.components)
        if len(comps) != 3 or not all(math.isfinite(c) for c in comps):
            raise ValueError(f"need three finite components, got {self.components!r}")
        object.__setattr__(self, "components", comps)

    @classmethod
    def of(cls, ux, uy, uz) -> "GroupVelocity":
        return cls((float(ux), float(uy), float(uz)))

    def squared(self) -> VarianceVector:
        return VarianceVector.of(*(c * c for c in self.components))

    def __iter__(self):
        return iter(self.components)


@dataclass(frozen=True)
class EnergyTimeParams:
    """(dE)^2, (dt)^2 and the free constant delta of the energy-time relation."""

    delta: float
    var_E: float
    var_t: float

    def __post_init__(self):
        if not (self.delta > 0.0 and math.isfinite(self.delta)):
            raise ValueError(f"delta must be positive, got {self.delta!r}")
        if self.var_E < 0.0 or self.var_t < 0.0:
            raise ValueError("variances must be nonnegative")


@dataclass(frozen=True)
class VelocityEstimate:
    """Calibrated normalization, |u^2| estimate, and the bound on |u|.

    ``u2_norm`` is an order-of-magnitude estimate and ``u_bound`` an upper
    bound, not a measurement.  ``cos_u``/``delta`` are None when A came
    from calibration rather than from parameters.
    """

    A: float
    u2_norm: float
    u_bound: float
    cos_u: float | None
    delta: float | None

    def __post_init__(self):
        if self.A <= 0.0 or not math.isfinite(self.A):
            raise ValueError(f"A must be positive, got {self.A!r}")
        if abs(self.u_bound - math.sqrt(3.0 * self.u2_norm)) > 1e-9 * max(
            self.u_bound, 1.0
        ):
            raise ValueError("u_bound must equal sqrt(3 * u2_norm)")
        if self.cos_u is not None and self.delta is not None:
            expected = 3.0 / (self.delta**2 * self.cos_u)
            if abs(self.A - expected) > 1e-9 * expected:
                raise ValueError("A disagrees with 3 / (delta^2 cos_u)")


@dataclass(frozen=True)
class EnergyTimeResult:
    holds: bool
    slack: float


@dataclass(frozen=True)
class PerAxisVelocityResult:
    holds: tuple[bool, bool, bool]
    slacks: tuple[float, float, float]


@dataclass(frozen=True)
class AggregatedVelocityReport:
    cos_u_geometric: float
    cos_u_saturation: float
    holds: bool
    slack: float


def energy_time_check(p: EnergyTimeParams,
                      ctx: HBarContext = HBarContext()) -> EnergyTimeResult:
    """(dE)^2 (dt)^2 >= delta^2 hbar^2, with slack."""
    bound = (p.delta * ctx.hbar) ** 2
    lhs = p.var_E * p.var_t
    return EnergyTimeResult(holds=lhs >= bound * (1.0 - CHECK_TOL), slack=lhs - bound)


def lp_per_axis_check(
    u: GroupVelocity,
    P2: VarianceVector,
    dt: float,
    ctx: HBarContext = HBarContext(),
) -> PerAxisVelocityResult:
    """|u_i| sqrt(P2_i) dt >= hbar, checked per component."""
    if dt <= 0.0:
        raise OutOfDomain(f"dt must be positive, got {dt!r}")
    lhs = [abs(ui) * math.sqrt(p2i) * dt for ui, p2i in zip(u, P2)]
    bound = ctx.hbar
    return PerAxisVelocityResult(
        holds=tuple(v >= bound * (1.0 - CHECK_TOL) for v in lhs),
        slacks=tuple(v - bound for v in lhs),
    )


def lp_aggregated_report(
    u: GroupVelocity,
    P2: VarianceVector,
    dt: float,
    ctx: HBarContext = HBarContext(),
) -> AggregatedVelocityReport:
    """|u^2| |(dP)^2| dt^2 >= 3 hbar^2 / cos, in both cosine readings."""
    if dt <= 0.0:
        raise OutOfDomain(f"dt must be positive, got {dt!r}")
    u2 = u.squared()
    nu = math.sqrt(sum(c * c for c in u2))
    np_ = math.sqrt(sum(c * c for c in P2))
    if nu == 0.0 or np_ == 0.0:
        raise DegenerateVector("aggregated velocity relation needs nonzero vectors")
    d = sum(a * b for a, b in zip(u2, P2))
    cg = d / (nu * np_)
    if 1.0 < cg <= 1.0 + 1e-12:
        cg = 1.0
    scale = nu * np_ * dt * dt
    bound = 3.0 * ctx.hbar ** 2
    return AggregatedVelocityReport(
        cos_u_geometric=cg,
        cos_u_saturation=bound / scale,
        holds=scale * cg >= bound * (1.0 - CHECK_TOL),
        slack=scale * cg - bound,
    )


def normalization_A(delta: float, cos_u: float) -> float:
    """A = 3 / (delta^2 cos_u); cos_u must lie in (0, 1]."""
    if not (delta > 0.0 and math.isfinite(delta)):
        raise OutOfDomain(f"delta must be positive, got {delta!r}")
    if not 0.0 < cos_u <= 1.0:
        raise OutOfDomain(f"cos_u must be in (0, 1], got {cos_u!r}")
    return 3.0 / (delta * delta * cos_u)


def estimate_u2_norm(var_E: float, P2_norm: float, A: float) -> float:
    """Order-of-magnitude estimate |u^2| ~ A (dE)^2 / |(dP)^2|."""
    if P2_norm <= 0.0:
        raise OutOfDomain(f"P2_norm must be positive, got {P2_norm!r}")
    if var_E < 0.0:
        raise OutOfDomain(f"var_E must be nonnegative, got {var_E!r}")
    if A <= 0.0:
        raise OutOfDomain(f"A must be positive, got {A!r}")
    return A * var_E / P2_norm


def velocity_bound(var_E: float, P2_norm: float, A: float) -> float:
    """Upper bound |u| <= sqrt(3 A (dE)^2 / |(dP)^2|)."""
    return math.sqrt(3.0 * estimate_u2_norm(var_E, P2_norm, A))


def calibrate_A(var_E_ref: float, P2_norm_ref: float, u_ref: float) -> float:
    """Fix A so the bound reproduces a reference speed exactly.

    Inverting the bound gives A = u_ref^2 |(dP)^2|_ref / (3 (dE)^2_ref);
    velocity_bound(var_E_ref, P2_norm_ref, calibrate_A(...)) == u_ref.
    """
    if var_E_ref <= 0.0 or P2_norm_ref <= 0.0 or u_ref <= 0.0:
        raise OutOfDomain("calibration inputs must all be positive")
    return u_ref * u_ref * P2_norm_ref / (3.0 * var_E_ref)


def cauchy_schwarz_gap(u: GroupVelocity) -> tuple[float, float]:
    """(|u|, sqrt(3 |u^2|)); the first never exceeds the second.

    Components are rescaled by their largest magnitude so fourth powers
    cannot underflow and the bound survives even for tiny velocities.
    """
    scale = max(abs(c) for c in u)
    if scale == 0.0:
        return 0.0, 0.0
    r = [c / scale for c in u]
    lhs = scale * math.sqrt(sum(c * c for c in r))
    r2 = [c * c for c in r]
    rhs = scale * math.sqrt(3.0 * math.sqrt(sum(c * c for c in r2)))
    return lhs, rhs
