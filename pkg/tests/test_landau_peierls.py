import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hidden_angle import (
    DegenerateVector,
    EnergyTimeParams,
    GroupVelocity,
    HBarContext,
    OutOfDomain,
    VarianceVector,
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

positive = st.floats(min_value=1e-3, max_value=1e3)


class TestEnergyTimeCheck:
    def test_holds_with_slack(self):
        r = energy_time_check(EnergyTimeParams(delta=1.0, var_E=4.0, var_t=1.0))
        assert r.holds and r.slack == pytest.approx(3.0)

    def test_fails(self):
        r = energy_time_check(EnergyTimeParams(delta=1.0, var_E=0.5, var_t=0.5))
        assert not r.holds and r.slack == pytest.approx(-0.75)

    def test_boundary_equality(self):
        r = energy_time_check(EnergyTimeParams(delta=1.0, var_E=1.0, var_t=1.0))
        assert r.holds and r.slack == 0.0

    def test_hbar_enters_squared(self):
        r = energy_time_check(
            EnergyTimeParams(delta=1.0, var_E=2.0, var_t=1.0), HBarContext(2.0)
        )
        assert not r.holds and r.slack == pytest.approx(-2.0)


class TestPerAxisVelocityCheck:
    def test_constructed_equality(self):
        r = lp_per_axis_check(
            GroupVelocity.of(0.5, 0.5, 0.5), VarianceVector.of(4, 4, 4), dt=1.0
        )
        assert all(r.holds)
        assert r.slacks == pytest.approx((0.0, 0.0, 0.0))

    def test_zero_component_fails(self):
        r = lp_per_axis_check(
            GroupVelocity.of(0.0, 1.0, 1.0), VarianceVector.of(1, 1, 1), dt=1.0
        )
        assert r.holds == (False, True, True)

    def test_large_duration_slack(self):
        r = lp_per_axis_check(
            GroupVelocity.of(1, 1, 1), VarianceVector.of(1, 1, 1), dt=2.0
        )
        assert all(r.holds)
        assert r.slacks == pytest.approx((1.0, 1.0, 1.0))

    def test_negative_duration_rejected(self):
        with pytest.raises(OutOfDomain):
            lp_per_axis_check(GroupVelocity.of(1, 1, 1), VarianceVector.of(1, 1, 1), dt=0.0)


class TestAggregatedVelocityReport:
    def test_three_saturated_axes_reach_equality(self):
        r = lp_aggregated_report(
            GroupVelocity.of(1, 1, 1), VarianceVector.of(1, 1, 1), dt=1.0
        )
        assert r.cos_u_geometric == 1.0
        assert r.holds
        assert r.slack == pytest.approx(0.0, abs=1e-12)
        assert r.cos_u_saturation == pytest.approx(1.0, rel=1e-12)

    def test_comfortable_margin(self):
        r = lp_aggregated_report(
            GroupVelocity.of(2, 2, 2), VarianceVector.of(1, 1, 1), dt=1.0
        )
        assert r.holds and r.slack == pytest.approx(9.0, rel=1e-12)

    def test_slow_particle_fails(self):
        r = lp_aggregated_report(
            GroupVelocity.of(0.1, 0.1, 0.1), VarianceVector.of(1, 1, 1), dt=1.0
        )
        assert not r.holds
        assert r.slack == pytest.approx(0.03 - 3.0, rel=1e-10)

    def test_zero_velocity_degenerate(self):
        with pytest.raises(DegenerateVector):
            lp_aggregated_report(GroupVelocity.of(0, 0, 0), VarianceVector.of(1, 1, 1), 1.0)

    @given(
        ux=positive, uy=positive, uz=positive,
        p1=positive, p2=positive, p3=positive,
        dt=st.floats(min_value=1e-2, max_value=1e2),
    )
    def test_per_axis_implies_aggregated(self, ux, uy, uz, p1, p2, p3, dt):
        P2 = VarianceVector.of(p1, p2, p3)
        # scale u so each component bound holds, then the norm bound must too
        u = GroupVelocity.of(
            *(
                (1.0 + ui) / (math.sqrt(p) * dt)
                for ui, p in zip((ux, uy, uz), P2)
            )
        )
        per_axis = lp_per_axis_check(u, P2, dt)
        assert all(per_axis.holds)
        assert lp_aggregated_report(u, P2, dt).holds


class TestNormalizationA:
    def test_unit_parameters(self):
        assert normalization_A(1.0, 1.0) == 3.0

    def test_arithmetic(self):
        assert normalization_A(2.0, 0.5) == pytest.approx(1.5)

    def test_cos_zero_rejected(self):
        with pytest.raises(OutOfDomain):
            normalization_A(1.0, 0.0)

    def test_cos_above_one_rejected(self):
        with pytest.raises(OutOfDomain):
            normalization_A(1.0, 1.5)

    @given(
        d1=st.floats(min_value=0.1, max_value=10.0),
        d2=st.floats(min_value=0.1, max_value=10.0),
        c1=st.floats(min_value=0.05, max_value=1.0),
        c2=st.floats(min_value=0.05, max_value=1.0),
    )
    def test_monotone_decreasing(self, d1, d2, c1, c2):
        lo_d, hi_d = sorted((d1, d2))
        lo_c, hi_c = sorted((c1, c2))
        assert normalization_A(hi_d, lo_c) <= normalization_A(lo_d, lo_c)
        assert normalization_A(lo_d, hi_c) <= normalization_A(lo_d, lo_c)


class TestVelocityEstimator:
    def test_u2_norm_arithmetic(self):
        assert estimate_u2_norm(1.0, 3.0, 3.0) == pytest.approx(1.0)
        assert estimate_u2_norm(2.0, 4.0, 1.0) == pytest.approx(0.5)

    def test_zero_energy_spread(self):
        assert estimate_u2_norm(0.0, 3.0, 3.0) == 0.0
        assert velocity_bound(0.0, 3.0, 3.0) == 0.0

    def test_bound_values(self):
        assert velocity_bound(1.0, 3.0, 3.0) == pytest.approx(math.sqrt(3.0), rel=1e-14)
        assert velocity_bound(1.0, 3.0, 1.0) == pytest.approx(1.0, rel=1e-14)

    def test_degenerate_momentum_rejected(self):
        with pytest.raises(OutOfDomain):
            velocity_bound(1.0, 0.0, 3.0)

    @given(
        var_E=positive, P2_norm=positive, A=positive,
        alpha=st.floats(min_value=1e-2, max_value=1e2),
    )
    def test_simultaneous_rescaling_cancels(self, var_E, P2_norm, A, alpha):
        base = estimate_u2_norm(var_E, P2_norm, A)
        scaled = estimate_u2_norm(alpha * var_E, alpha * P2_norm, A)
        assert scaled == pytest.approx(base, rel=1e-12)


class TestCalibration:
    def test_lightspeed_reference(self):
        # invert the bound algebraically: A = u^2 P2 / (3 varE)
        assert calibrate_A(2.0, 6.0, 1.0) == pytest.approx(1.0)
        assert calibrate_A(1.0, 3.0, 1.0) == pytest.approx(1.0)

    def test_nonpositive_inputs_rejected(self):
        with pytest.raises(OutOfDomain):
            calibrate_A(0.0, 1.0, 1.0)
        with pytest.raises(OutOfDomain):
            calibrate_A(1.0, 1.0, -1.0)

    @given(var_E=positive, P2_norm=positive, u_ref=positive)
    def test_round_trip(self, var_E, P2_norm, u_ref):
        A = calibrate_A(var_E, P2_norm, u_ref)
        assert velocity_bound(var_E, P2_norm, A) == pytest.approx(u_ref, rel=1e-12)


class TestCauchySchwarz:
    def test_isotropic_vector(self):
        lhs, rhs = cauchy_schwarz_gap(GroupVelocity.of(1, 1, 1))
        assert lhs == pytest.approx(math.sqrt(3.0), rel=1e-14)
        assert rhs == pytest.approx(2.2795070569547775, rel=1e-12)  # 3^(3/4)
        assert lhs < rhs

    def test_single_axis(self):
        lhs, rhs = cauchy_schwarz_gap(GroupVelocity.of(1, 0, 0))
        assert lhs == 1.0
        assert rhs == pytest.approx(math.sqrt(3.0), rel=1e-14)

    def test_zero_vector(self):
        assert cauchy_schwarz_gap(GroupVelocity.of(0, 0, 0)) == (0.0, 0.0)

    @given(
        ux=st.floats(min_value=-50, max_value=50),
        uy=st.floats(min_value=-50, max_value=50),
        uz=st.floats(min_value=-50, max_value=50),
    )
    def test_bound_always_holds(self, ux, uy, uz):
        lhs, rhs = cauchy_schwarz_gap(GroupVelocity.of(ux, uy, uz))
        if (ux, uy, uz) == (0.0, 0.0, 0.0):
            assert lhs == rhs == 0.0
        else:
            assert lhs < rhs


class TestVelocityEstimateType:
    def test_inconsistent_bound_rejected(self):
        with pytest.raises(ValueError):
            VelocityEstimate(A=1.0, u2_norm=1.0, u_bound=2.0, cos_u=None, delta=None)

    def test_parameter_built_invariant(self):
        A = normalization_A(0.5, 0.8)
        est = VelocityEstimate(
            A=A, u2_norm=0.4, u_bound=math.sqrt(1.2), cos_u=0.8, delta=0.5
        )
        assert est.A == pytest.approx(3.0 / (0.25 * 0.8))
