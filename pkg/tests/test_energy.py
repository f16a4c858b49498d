"""Weight rules, the truncated functional, monotonicity, decay, calibration."""

import math
from fractions import Fraction

import numpy as np
import pytest

from specenergy import (
    EnergyTrace,
    Grid,
    SmallnessError,
    calibrate_weights,
    energy_eval,
    monotonicity_report,
    decay_fit,
    semigroup_apply,
    sobolev_norm,
    to_spectral,
    weights_burgers_l2,
    weights_burgers_sobolev,
    weights_general,
    weights_linear,
)
from specenergy.energy import measured_decay_constant
from conftest import random_field

F = Fraction


class TestWeightRules:
    def test_linear_closed_form(self):
        w = weights_linear(3)
        assert w.values == (F(1), F(2), F(2), F(4, 3))

    def test_linear_recursion_identity(self):
        w = weights_linear(12)
        for n in range(1, 13):
            assert n * w.values[n] == 2 * w.values[n - 1]

    def test_normalization(self):
        for w in (weights_linear(5),
                  weights_burgers_sobolev(5, C=(F(1),) * 5, caux=F(1)),
                  weights_burgers_l2(5, C=(F(1),) * 5, D0=F(0)),
                  weights_general(5, C=(F(1),) * 5, D0=F(2))):
            assert w.values[0] == 1

    def test_burgers_sobolev_zero_data(self):
        w = weights_burgers_sobolev(2, C=(F(1), F(1)), caux=F(1), u0_norm=0)
        assert w.values[1] == F(3, 4)
        assert w.values[2] == F(9, 32)

    def test_burgers_sobolev_smallness_violation(self):
        # the n = 1 equation loses positivity once caux*C1^{8/3}*q^{8/3} >= 1
        with pytest.raises(SmallnessError, match="threshold"):
            weights_burgers_sobolev(3, C=(1.0,) * 3, caux=1.0, u0_norm=2.0)

    def test_burgers_sobolev_implicit_first_order(self):
        C = (2.0, 2.0, 2.0)
        q = 0.05
        w = weights_burgers_sobolev(3, C=C, caux=1.0, u0_norm=q)
        a1 = 0.75 - 0.75 * C[0] ** (8 / 3) * q ** (8 / 3)
        assert w.values[1] == pytest.approx(a1, rel=1e-14)
        # recursion with the fixed a1 for n >= 2
        denom = 2 + 0.75 * C[1] ** (8 / 3) * q ** (8 / 3) / a1
        assert w.values[2] == pytest.approx(0.75 * a1 / denom, rel=1e-14)

    def test_burgers_l2_unit_constants(self):
        w = weights_burgers_l2(3, C=(F(1),) * 3, D0=F(0))
        assert w.values == (F(1), F(1, 2), F(1, 4), F(1, 8))

    def test_burgers_l2_with_decay_constant(self):
        w = weights_burgers_l2(1, C=(F(1),), D0=F(1))
        assert w.values[1] == F(1, 32)

    def test_general_rule(self):
        assert weights_general(3, C=(F(1),) * 3, D0=F(2)).values[3] == F(1, 8)
        assert weights_general(3, C=(F(1), F(2), F(3)), D0=F(1)).values[3] == F(1, 3)

    def test_general_requires_positive_d0(self):
        with pytest.raises(ValueError, match="positive"):
            weights_general(3, D0=0.0)

    def test_default_constants_shape(self):
        w = weights_burgers_l2(4, D0=0.5)
        C = w.params["C"]
        assert len(C) == 4
        assert C[0] == pytest.approx(2.0 * 2.0**0.5)


class TestEnergyEval:
    def test_zero_field(self):
        g = Grid.make(8)
        f = to_spectral(np.zeros(8), g)
        ev = energy_eval(f, 1.0, 1.0, 0.0, weights_linear(5))
        assert ev.total == 0.0

    def test_t0_only_first_term(self):
        g = Grid.make(16)
        f = random_field(g, seed=1)
        ev = energy_eval(f, 0.0, 1.0, 0.0, weights_linear(5))
        assert ev.total == pytest.approx(sobolev_norm(f, 0.0) ** 2, rel=1e-13)
        assert np.all(ev.terms[1:] == 0)

    def test_single_mode_poisson_sum(self):
        # conserved total pi up to the Poisson tail beyond the truncation
        g = Grid.make(8)
        x, = g.coordinates()
        u0 = to_spectral(np.cos(x), g)
        w = weights_linear(40)
        for t in np.linspace(0.0, 5.0, 21):
            ut = semigroup_apply(u0, 1.0, t)
            ev = energy_eval(ut, t, 1.0, 0.0, w)
            assert ev.total >= np.pi * (1 - 1e-8)
            assert ev.total <= np.pi * (1 + 1e-12)
            expected_terms = [
                (2 * t) ** n / math.factorial(n) * np.exp(-2 * t) * np.pi
                for n in range(5)
            ]
            assert np.allclose(ev.terms[:5], expected_terms, rtol=1e-10)

    def test_offset_functional(self):
        g = Grid.make(16)
        f = random_field(g, seed=2)
        shifted = energy_eval(f, 3.0, 1.0, 0.0, weights_linear(4), t0=3.0)
        plain = energy_eval(f, 0.0, 1.0, 0.0, weights_linear(4))
        assert shifted.total == plain.total
        with pytest.raises(ValueError, match="nonnegative"):
            energy_eval(f, 1.0, 1.0, 0.0, weights_linear(4), t0=2.0)

    def test_trace_total_is_term_sum(self):
        g = Grid.make(16)
        f = random_field(g, seed=3)
        times = np.linspace(0, 2, 9)
        fields = [semigroup_apply(f, 1.0, t) for t in times]
        trace = EnergyTrace.from_fields(times, fields, weights_linear(6), 1.0, 0.0)
        assert np.allclose(trace.totals, trace.terms.sum(axis=1), rtol=1e-12)
        assert np.all(trace.terms >= 0)


def _fake_trace(times, totals_profile):
    """Trace with prescribed order-0 history and no higher content."""
    ladder = np.zeros((len(times), 2))
    ladder[:, 0] = np.sqrt(totals_profile)
    return EnergyTrace.from_ladder(times, ladder, weights_linear(1), 1.0, 0.0)


class TestMonotonicity:
    def test_strictly_decreasing(self):
        t = np.linspace(0, 1, 11)
        rep = monotonicity_report(_fake_trace(t, np.exp(-t)))
        assert rep.first_violation_time is None

    def test_constant_trace(self):
        t = np.linspace(0, 1, 11)
        rep = monotonicity_report(_fake_trace(t, np.ones_like(t)))
        assert rep.max_relative_increase == 0.0
        assert rep.first_violation_time is None

    def test_single_uptick_reported(self):
        t = np.linspace(0, 1, 11)
        profile = np.exp(-t)
        profile[5] = profile[4] * (1 + 1e-3)
        rep = monotonicity_report(_fake_trace(t, profile))
        assert rep.first_violation_time == pytest.approx(t[5])
        assert rep.max_relative_increase == pytest.approx(1e-3, rel=1e-6)


class TestDecayFit:
    def _semigroup_trace(self, n_max=8, theta=1.0, seed=4, d=1):
        g = Grid.make(64 if d == 1 else (32, 32))
        u0 = random_field(g, seed=seed, kmax=8)
        times = np.concatenate([[0.0], np.geomspace(1e-2, 10.0, 50)])
        fields = [semigroup_apply(u0, theta, t) for t in times]
        return EnergyTrace.from_fields(times, fields, weights_linear(n_max), theta, 0.0)

    def test_semigroup_bound_margin(self):
        trace = self._semigroup_trace()
        for n in range(1, 9):
            fit = decay_fit(trace, n)
            assert fit.bound_margin <= 1.0 + 1e-10, n

    def test_single_mode_exponential_beats_power(self):
        g = Grid.make(8)
        x, = g.coordinates()
        u0 = to_spectral(np.cos(x), g)
        times = np.concatenate([[0.0], np.geomspace(0.1, 10.0, 30)])
        fields = [semigroup_apply(u0, 1.0, t) for t in times]
        trace = EnergyTrace.from_fields(times, fields, weights_linear(4), 1.0, 0.0)
        fit = decay_fit(trace, 1)
        assert fit.fitted_exponent < -5.0
        assert fit.bound_margin <= 1.0 + 1e-12

    def test_constant_trace_zero_exponent(self):
        times = np.concatenate([[0.0], np.geomspace(0.1, 10.0, 20)])
        trace = _fake_trace(times, np.ones_like(times))
        fit = decay_fit(trace, 0)
        assert fit.fitted_exponent == pytest.approx(0.0, abs=1e-12)

    def test_insufficient_points(self):
        times = np.array([0.0, 1.0, 2.0, 3.0])
        trace = _fake_trace(times, np.exp(-times))
        with pytest.raises(ValueError, match="at least 5"):
            decay_fit(trace, 0)


class TestCalibration:
    def _linear_heat_ladder(self, n_max=4):
        g = Grid.make(64)
        u0 = random_field(g, seed=6, kmax=10)
        times = np.linspace(0.0, 5.0, 120)
        ladder = []
        for t in times:
            f = semigroup_apply(u0, 1.0, t)
            ladder.append([sobolev_norm(f, float(n)) for n in range(n_max + 1)])
        return times, np.array(ladder)

    def test_linear_heat_first_weight_near_two(self):
        times, ladder = self._linear_heat_ladder()
        seq = calibrate_weights(lambda: (times, ladder), 4)
        assert seq.values[1] >= 2.0 - 1e-2

    def test_zero_trajectory_unbounded(self):
        times = np.linspace(0, 1, 10)
        ladder = np.zeros((10, 3))
        seq = calibrate_weights(lambda: (times, ladder), 2)
        assert seq.params["flags"].get("1") == "unbounded"
        assert seq.values[1] >= 2.0**60

    def test_violating_trajectory_vanishing_weight(self):
        times = np.linspace(0.1, 1.0, 10) - 0.1
        ladder = np.ones((10, 2))
        ladder[:, 0] = 1.0            # constant base: zero slack
        ladder[:, 1] = 1.0            # t * L1^2 strictly increasing -> no room
        seq = calibrate_weights(lambda: (times, ladder), 1)
        assert seq.values[1] < 1e-8
        assert seq.params["flags"].get("1") == "vanishing"

    def test_calibrated_functional_monotone(self):
        times, ladder = self._linear_heat_ladder()
        seq = calibrate_weights(lambda: (times, ladder), 4)
        trace = EnergyTrace.from_ladder(times, ladder, seq, 1.0, 0.0)
        rep = monotonicity_report(trace)
        assert rep.first_violation_time is None

    def test_budget_exhaustion_flagged(self):
        times, ladder = self._linear_heat_ladder()
        seq = calibrate_weights(lambda: (times, ladder), 4, search_budget=3)
        assert seq.params["budget_exhausted"]
        assert len(seq.values) == 5


class TestMeasuredDecay:
    def test_exact_power_law(self):
        times = np.geomspace(0.1, 10, 40)
        norms = 3.0 / times**0.25
        val = measured_decay_constant(times, norms, 0.25)
        assert val == pytest.approx(3.0, rel=1e-12)

    def test_offset(self):
        times = np.array([0.0, 1.0, 2.0])
        norms = np.array([5.0, 2.0, 1.0])
        assert measured_decay_constant(times, norms, 1.0, t0=0.0) == pytest.approx(2.0)
        with pytest.raises(ValueError, match="offset"):
            measured_decay_constant(times, norms, 1.0, t0=5.0)
