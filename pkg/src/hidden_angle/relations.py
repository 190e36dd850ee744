"""Per-axis and aggregated position-momentum uncertainty relations.

Summing the three per-axis Heisenberg products turns them into the scalar
product of two vectors of squared deviations, (dP)^2 . (dR)^2, which
brings in the angle between those vectors.  Two readings of that angle's
cosine are computed side by side:

* the geometric cosine, dot / (|(dP)^2| |(dR)^2|), i.e. the literal
  dot-product angle, and
* the saturation cosine, 3 hbar^2 / (4 |(dP)^2| |(dR)^2|), the value that
  turns the aggregated inequality into an equality.

For the oscillator and infinite-well ladders the saturation reading has
closed forms, 1/(2n+1)^2 and 3/(n^2 pi^2 - 6), reproduced here exactly.
The two readings agree only for parallel vectors; both are reported and a
saturation cosine above 1 is flagged rather than clamped, since it signals
an unphysical input.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .axis_states import SeparableState3D
from .errors import DegenerateVector, InvalidQuantumNumber
from .moments import QuadratureConfig, VarianceVector, variance_vectors

__all__ = [
    "HBarContext",
    "UncertaintyReport",
    "dot",
    "norm",
    "cos_geometric",
    "cos_saturation",
    "ho_cos_closed",
    "box_cos_closed",
    "hur_report",
    "hur_axis_bound",
    "hur_aggregated_bound",
]

# tolerance factor applied to every ">=" check so exact-equality states pass
CHECK_TOL = 1e-10
CLAMP_DRIFT = 1e-12


@dataclass(frozen=True)
class HBarContext:
    """Carries the value of hbar (natural units: 1)."""

    hbar: float = 1.0

    def __post_init__(self):
        if not (self.hbar > 0.0 and math.isfinite(self.hbar)):
            raise ValueError(f"hbar must be positive and finite, got {self.hbar!r}")


def hur_axis_bound(hbar: float) -> float:
    """Lower bound for each per-axis product (dp_i)^2 (dx_i)^2."""
    return (0.5 * hbar) ** 2


def hur_aggregated_bound(hbar: float) -> float:
    """Lower bound for the dot product (dP)^2 . (dR)^2."""
    return 0.75 * hbar * hbar


def dot(v: VarianceVector, w: VarianceVector) -> float:
    return float(sum(a * b for a, b in zip(v, w)))


def norm(v: VarianceVector) -> float:
    return math.sqrt(sum(a * a for a in v))


def cos_geometric(P2: VarianceVector, R2: VarianceVector) -> float:
    """dot / (|P2| |R2|), clamped to 1 only for <= 1e-12 floating drift."""
    np_, nr = norm(P2), norm(R2)
    if np_ == 0.0 or nr == 0.0:
        raise DegenerateVector("cos_geometric needs two nonzero vectors")
    c = dot(P2, R2) / (np_ * nr)
    if 1.0 < c <= 1.0 + CLAMP_DRIFT:
        return 1.0
    return c


def cos_saturation(P2: VarianceVector, R2: VarianceVector,
                   ctx: HBarContext = HBarContext()) -> float:
    """The cosine that turns the aggregated relation into an equality."""
    np_, nr = norm(P2), norm(R2)
    if np_ == 0.0 or nr == 0.0:
        raise DegenerateVector("cos_saturation needs two nonzero vectors")
    return 3.0 * ctx.hbar ** 2 / (4.0 * np_ * nr)


def ho_cos_closed(n: int) -> float:
    """Saturation cosine of the isotropic oscillator level (n, n, n)."""
    if n < 0 or int(n) != n:
        raise InvalidQuantumNumber(f"oscillator levels start at n=0, got {n!r}")
    return 1.0 / (2 * n + 1) ** 2


def box_cos_closed(n: int) -> float:
    """Saturation cosine of the isotropic infinite-well level (n, n, n)."""
    if n < 1 or int(n) != n:
        raise InvalidQuantumNumber(f"infinite-well levels start at n=1, got {n!r}")
    return 3.0 / (n * n * math.pi * math.pi - 6.0)


@dataclass(frozen=True)
class UncertaintyReport:
    """Per-axis and aggregated uncertainty checks for one 3D state."""

    per_axis_products: tuple[float, float, float]
    dot_product: float
    norm_P2: float
    norm_R2: float
    cos_geometric: float
    cos_saturation: float
    aggregated_holds: bool
    per_axis_holds: tuple[bool, bool, bool]
    slack: float
    shcha_geometric_rad: float | None
    shcha_saturation_rad: float | None
    saturation_exceeds_one: bool
    hbar: float
    R2: VarianceVector
    P2: VarianceVector

    def to_dict(self) -> dict:
        return {
            "hbar": self.hbar,
            "R2": list(self.R2),
            "P2": list(self.P2),
            "per_axis_products": list(self.per_axis_products),
            "per_axis_holds": list(self.per_axis_holds),
            "dot_product": self.dot_product,
            "norm_P2": self.norm_P2,
            "norm_R2": self.norm_R2,
            "cos_geometric": self.cos_geometric,
            "cos_saturation": self.cos_saturation,
            "shcha_geometric_rad": self.shcha_geometric_rad,
            "shcha_saturation_rad": self.shcha_saturation_rad,
            "saturation_exceeds_one": self.saturation_exceeds_one,
            "aggregated_holds": self.aggregated_holds,
            "slack": self.slack,
        }


def _angle(c: float) -> float | None:
    """arccos on [0, pi/2); None when the cosine exceeds 1 beyond drift."""
    if c > 1.0 + CLAMP_DRIFT:
        return None
    return math.acos(min(max(c, 0.0), 1.0))


def hur_report(
    state: SeparableState3D,
    cfg: QuadratureConfig | None = None,
    ctx: HBarContext = HBarContext(),
    prefer_closed_form: bool = True,
) -> UncertaintyReport:
    """Full uncertainty report for a separable 3D state.

    Per-axis products are checked against (hbar/2)^2 and the aggregated
    dot product against 3 hbar^2 / 4, each with a 1e-10 relative
    tolerance; the slack is quoted against the geometric cosine.
    """
    R2, P2 = variance_vectors(state, cfg, ctx.hbar, prefer_closed_form)
    products = tuple(p * r for p, r in zip(P2, R2))
    d = dot(P2, R2)
    total = math.fsum(products)
    if d != 0.0 and abs(d - total) > 1e-12 * abs(d):
        raise AssertionError("dot product disagrees with per-axis products")
    np_, nr = norm(P2), norm(R2)
    cg = cos_geometric(P2, R2)
    cs = cos_saturation(P2, R2, ctx)
    axis_bound = hur_axis_bound(ctx.hbar) * (1.0 - CHECK_TOL)
    agg_bound = hur_aggregated_bound(ctx.hbar) * (1.0 - CHECK_TOL)
    per_axis = tuple(p >= axis_bound for p in products)
    aggregated = np_ * nr * cg >= agg_bound
    slack = np_ * nr - 3.0 * ctx.hbar ** 2 / (4.0 * cg)
    return UncertaintyReport(
        per_axis_products=products,
        dot_product=d,
        norm_P2=np_,
        norm_R2=nr,
        cos_geometric=cg,
        cos_saturation=cs,
        aggregated_holds=bool(aggregated),
        per_axis_holds=per_axis,
        slack=slack,
        shcha_geometric_rad=_angle(cg),
        shcha_saturation_rad=_angle(cs),
        saturation_exceeds_one=cs > 1.0 + CLAMP_DRIFT,
        hbar=ctx.hbar,
        R2=R2,
        P2=P2,
    )
