"""Randomized invariant checks behind the `verify` subcommand.

Each check draws its own cases from a seeded generator, so a run is fully
reproducible from (cases, seed).  On failure the offending inputs are
captured verbatim for replay.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import relations
from .axis_states import (
    SeparableState3D,
    gaussian_packet,
    harmonic_oscillator,
    infinite_well,
)
from .landau_peierls import (
    GroupVelocity,
    cauchy_schwarz_gap,
    lp_aggregated_report,
    lp_per_axis_check,
)
from .moments import VarianceVector
from .relations import HBarContext, cos_geometric, hur_report, norm

__all__ = ["CheckResult", "run_all_checks"]


@dataclass(frozen=True)
class CheckResult:
    name: str
    cases: int
    passed: bool
    failure: str | None = None


def _random_axis(rng: np.random.Generator):
    kind = rng.integers(0, 3)
    if kind == 0:
        return harmonic_oscillator(
            int(rng.integers(0, 13)),
            mass=float(np.exp(rng.uniform(-2.3, 2.3))),
            omega=float(np.exp(rng.uniform(-2.3, 2.3))),
        )
    if kind == 1:
        return infinite_well(int(rng.integers(1, 13)), width_L=float(rng.uniform(0.2, 5.0)))
    return gaussian_packet(float(np.exp(rng.uniform(-3.0, 3.0))))


def _check_per_axis_products(cases: int, rng, ctx: HBarContext) -> CheckResult:
    """Every stock state satisfies the per-axis position-momentum bound."""
    name = "per-axis position-momentum bound"
    for i in range(cases):
        if i == 0:
            state = SeparableState3D.isotropic(harmonic_oscillator(0))
        elif i == 1:
            state = SeparableState3D.isotropic(gaussian_packet(1.0))
        else:
            state = SeparableState3D((_random_axis(rng), _random_axis(rng), _random_axis(rng)))
        report = hur_report(state, ctx=ctx)
        if not all(report.per_axis_holds):
            return CheckResult(
                name, cases, False,
                f"case {i}: axes {[a.describe() for a in state.axes]} "
                f"products {report.per_axis_products}",
            )
    return CheckResult(name, cases, True)


def _check_hur_aggregation(cases: int, rng, ctx: HBarContext) -> CheckResult:
    """Per-axis bounds on random vectors imply the aggregated norm bound."""
    name = "per-axis bounds imply aggregated norm bound"
    axis_bound = relations.hur_axis_bound(ctx.hbar)
    agg_bound = relations.hur_aggregated_bound(ctx.hbar)
    for i in range(cases):
        r2 = np.exp(rng.uniform(-6.9, 6.9, 3))
        if i == 0:
            products = np.full(3, axis_bound)  # exactly saturated
        else:
            products = axis_bound * (1.0 + rng.exponential(3.0, 3))
        P2 = VarianceVector.of(*(products / r2))
        R2 = VarianceVector.of(*r2)
        lhs = norm(P2) * norm(R2) * cos_geometric(P2, R2)
        if lhs < agg_bound * (1.0 - 1e-10):
            return CheckResult(
                name, cases, False,
                f"case {i}: P2={tuple(P2)} R2={tuple(R2)} lhs={lhs!r} bound={agg_bound!r}",
            )
    return CheckResult(name, cases, True)


def _constrained_velocity_case(rng, hbar: float):
    P2 = VarianceVector.of(*np.exp(rng.uniform(-4.6, 4.6, 3)))
    dt = float(np.exp(rng.uniform(-2.3, 2.3)))
    u = GroupVelocity.of(
        *(
            hbar * (1.0 + rng.exponential(2.0)) / (math.sqrt(p2) * dt)
            for p2 in P2
        )
    )
    return u, P2, dt


def _check_lp_per_axis(cases: int, rng, ctx: HBarContext) -> CheckResult:
    """Constructed per-axis velocity cases all pass the component check."""
    name = "per-axis velocity-momentum-duration bound"
    for i in range(cases):
        u, P2, dt = _constrained_velocity_case(rng, ctx.hbar)
        result = lp_per_axis_check(u, P2, dt, ctx)
        if not all(result.holds):
            return CheckResult(
                name, cases, False,
                f"case {i}: u={tuple(u)} P2={tuple(P2)} dt={dt!r} slacks={result.slacks}",
            )
    return CheckResult(name, cases, True)


def _check_lp_aggregation(cases: int, rng, ctx: HBarContext) -> CheckResult:
    """Per-axis velocity bounds imply the aggregated norm bound."""
    name = "per-axis velocity bounds imply aggregated bound"
    for i in range(cases):
        u, P2, dt = _constrained_velocity_case(rng, ctx.hbar)
        report = lp_aggregated_report(u, P2, dt, ctx)
        if not report.holds:
            return CheckResult(
                name, cases, False,
                f"case {i}: u={tuple(u)} P2={tuple(P2)} dt={dt!r} slack={report.slack!r}",
            )
    return CheckResult(name, cases, True)


def _check_cauchy_schwarz(cases: int, rng, ctx: HBarContext) -> CheckResult:
    """|u| <= sqrt(3 |u^2|), strict except at the zero vector."""
    name = "velocity norm Cauchy-Schwarz bound"
    for i in range(cases):
        if i == 0:
            u = GroupVelocity.of(0.0, 0.0, 0.0)
        else:
            u = GroupVelocity.of(*rng.uniform(-5.0, 5.0, 3))
        lhs, rhs = cauchy_schwarz_gap(u)
        if any(c != 0.0 for c in u):
            ok = lhs < rhs
        else:
            ok = lhs == 0.0 and rhs == 0.0
        if not ok:
            return CheckResult(
                name, cases, False, f"case {i}: u={tuple(u)} lhs={lhs!r} rhs={rhs!r}"
            )
    return CheckResult(name, cases, True)


def run_all_checks(cases: int, seed: int, ctx: HBarContext = HBarContext()) -> list[CheckResult]:
    """Run every invariant check with ``cases`` draws each."""
    if cases < 1:
        raise ValueError(f"cases must be >= 1, got {cases}")
    checks = (
        _check_per_axis_products,
        _check_hur_aggregation,
        _check_lp_per_axis,
        _check_lp_aggregation,
        _check_cauchy_schwarz,
    )
    results = []
    for offset, check in enumerate(checks):
        rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(offset,)))
        results.append(check(cases, rng, ctx))
    return results
