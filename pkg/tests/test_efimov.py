"""Tests for geometric level accumulation under a -k/r^2 tail.

The empty-core matching roots are cross-checked against an independent
Romberg-quadrature evaluation of K_{i beta} (tests/oracles.py), then
frozen; the ODE route must reproduce the analytic family and label node
counts; the envelope-glued auxiliary potentials must stay within their
certified gap bound and feed the a-priori solution bounds."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import (
    bisect_root,
    k_imag_order_romberg,
    k_imag_order_derivative_romberg,
    phi_beta_series,
)
from pontspec.efimov import (
    AuxiliaryPotential,
    EfimovSpectrum,
    PiecewisePotential,
    analytic_levels,
    asymptotic_levels,
    lemma_bounds_check,
    numeric_levels,
)
from pontspec.errors import DomainError, PreconditionError
from pontspec.special import OMEGA, bessel_k_imag_order, beta_constants

E2PIB_K5 = 17.8664229165053  # exp(2 pi / sqrt(4.75))

# roots of K = f K' for k = 5, r0 = 1; first two verified against the
# Romberg oracle below, the rest pinned from the phase-variable scan
TAUS_K5 = (
    0.97924612683326129,
    0.23420847060480746,
    0.05545061923663145,
    0.013119154745276997,
    0.0031037595753878452,
    0.00073429287206623194,
    0.00017372028060534244,
)

# envelope-glued comparison potentials, deepest two levels each
V1_LEVELS = (-1.0025522091035717e-09, -6.411296821345794e-20)
V3_LEVELS = (-9.968326030689256e-10, -6.374733762132343e-20)

ARGMIN_R = 2.0493552692521484  # minimum of the pair curve at unit phase


def zero_core(k=5.0, r0=1.0):
    return PiecewisePotential(
        inner=lambda r: np.zeros_like(np.asarray(r, dtype=float)), r0=r0, k=k
    )


def matching_slope(tau):
    th = math.tanh(tau)
    return 2.0 * tau * th / (2.0 * tau - th)


class TestAnalyticFamily:
    def test_first_roots_match_quadrature_oracle(self):
        beta = beta_constants(5.0).beta

        def g(tau):
            kv = k_imag_order_romberg(beta, tau)
            kd = k_imag_order_derivative_romberg(beta, tau)
            return kv - matching_slope(tau) * kd

        spec = analytic_levels(5.0, 1.0, 2)
        for lo, hi, got in ((0.5, 1.5, spec.taus[0]), (0.15, 0.35, spec.taus[1])):
            want = bisect_root(g, lo, hi, iters=60)
            assert abs(got - want) <= 1e-12 * want

    def test_frozen_regression(self):
        spec = analytic_levels(5.0, 1.0, 7)
        assert spec.requested == 7 and spec.delivered == 7
        for got, want in zip(spec.taus, TAUS_K5):
            assert abs(got - want) <= 1e-13 * want
        for got, t in zip(spec.levels, TAUS_K5):
            assert abs(got + t * t) <= 1e-13 * t * t

    def test_residual_invariant_at_each_root(self):
        beta = beta_constants(5.0).beta
        spec = analytic_levels(5.0, 1.0, 7)
        for tau in spec.taus:
            kb = bessel_k_imag_order(beta, tau)
            rhs = matching_slope(tau) * kb.derivative
            assert abs(kb.value - rhs) <= 1e-10 * abs(rhs)

    def test_ratio_convergence(self):
        spec = analytic_levels(5.0, 1.0, 7)
        errs = [abs(r - E2PIB_K5) for r in spec.ratios]
        assert all(a > b for a, b in zip(errs, errs[1:]))
        for r in spec.ratios[2:]:
            assert abs(r - E2PIB_K5) <= 0.01 * E2PIB_K5

    def test_level_five_near_anchor(self):
        spec = analytic_levels(5.0, 1.0, 5)
        ref = spec.asymptotic_reference[4]
        assert abs(spec.levels[4] - ref) <= 0.01 * abs(ref)

    def test_anchor_offsets_shrink(self):
        # phase offsets b_n = beta log(tau_n / tau_n0) keep shrinking
        bc = beta_constants(5.0)
        spec = analytic_levels(5.0, 1.0, 7)
        offs = [
            abs(bc.beta * math.log(t * t / abs(ref)) / 2.0)
            for t, ref in zip(spec.taus, spec.asymptotic_reference)
        ]
        for a, b in zip(offs[2:], offs[3:]):
            assert a > b

    def test_roots_interlace_anchor_phases(self):
        bc = beta_constants(5.0)
        spec = analytic_levels(5.0, 1.0, 7)
        for n, tau in enumerate(spec.taus, start=1):
            theta = bc.beta * math.log(tau / 2.0) - bc.phi_beta
            anchor = math.atan(2.0 * bc.beta) - n * math.pi
            assert abs(theta - anchor) < math.pi / 2.0

    def test_core_radius_scaling(self):
        one = analytic_levels(5.0, 1.0, 3)
        two = analytic_levels(5.0, 2.0, 3)
        assert two.taus == one.taus
        assert all(a == 4.0 * b for a, b in zip(one.levels, two.levels))

    def test_floor_truncates_with_honest_count(self):
        spec = analytic_levels(5.0, 1.0, 500)
        assert spec.requested == 500
        assert spec.delivered == 240
        assert spec.taus[-1] >= 1e-150
        assert spec.levels[-1] < 0.0
        assert abs(spec.ratios[-1] - E2PIB_K5) <= 1e-10 * E2PIB_K5

    def test_rejects_bad_inputs(self):
        with pytest.raises(DomainError):
            analytic_levels(0.25, 1.0, 3)
        with pytest.raises(DomainError):
            analytic_levels(5.0, 1.0, 0)
        with pytest.raises(DomainError):
            analytic_levels(5.0, math.inf, 3)
        with pytest.raises(DomainError):
            analytic_levels(5.0, -2.0, 3)


class TestAsymptoticAnchors:
    def test_beta_one_ratio_is_exp_two_pi(self):
        vals = asymptotic_levels(1.25, 1.0, [1, 2, 3])
        want = math.exp(2.0 * math.pi)
        for a, b in zip(vals, vals[1:]):
            assert abs(a / b - want) <= 1e-12 * want

    def test_anchor_formula_against_series_phase(self):
        beta = math.sqrt(0.5 - 0.25)
        phib = phi_beta_series(beta)
        want = -((2.0 * math.exp((math.atan(2.0 * beta) + phib - math.pi) / beta) / 2.0) ** 2)
        (got,) = asymptotic_levels(0.5, 2.0, [1])
        assert abs(got - want) <= 1e-10 * abs(want)
        assert abs(got - -3.0401726561122639e-05) <= 1e-12 * abs(got)

    def test_deep_anchor_underflows_silently(self):
        (val,) = asymptotic_levels(5.0, 1.0, [2000])
        assert val == 0.0
        assert math.copysign(1.0, val) == -1.0

    def test_rejects_bad_core_radius(self):
        with pytest.raises(DomainError):
            asymptotic_levels(5.0, 0.0, [1])


class TestNumericRoute:
    def test_empty_core_matches_analytic(self):
        num = numeric_levels(zero_core(), 3)
        ana = analytic_levels(5.0, 1.0, 3)
        for a, b in zip(num.levels, ana.levels):
            assert abs(a - b) <= 1e-6 * abs(b)

    def test_node_labels_count_from_zero(self):
        num = numeric_levels(zero_core(), 4)
        assert num.nodes == (0, 1, 2, 3)

    def test_comparison_potentials_share_levels(self):
        s1 = numeric_levels(AuxiliaryPotential(1).as_piecewise(), 2)
        s3 = numeric_levels(AuxiliaryPotential(3).as_piecewise(), 2)
        gap = 2.0 * math.exp(-math.pi)
        for a, b in zip(s1.levels, s3.levels):
            assert abs(a - b) <= gap
        for got, want in zip(s1.levels, V1_LEVELS):
            assert abs(got - want) <= 1e-6 * abs(want)
        for got, want in zip(s3.levels, V3_LEVELS):
            assert abs(got - want) <= 1e-6 * abs(want)

    def test_lowest_level_above_core_minimum(self):
        pot = AuxiliaryPotential(1).as_piecewise()
        spec = numeric_levels(pot, 1)
        rr = np.linspace(1e-3, pot.r0, 4000)
        assert spec.levels[0] >= float(np.min(pot.inner(rr)))

    def test_floor_truncation_reported(self):
        spec = numeric_levels(AuxiliaryPotential(1).as_piecewise(), 4)
        assert spec.requested == 4
        assert spec.delivered == 2
        assert spec.nodes == (0, 1)

    def test_rejects_wrong_type(self):
        with pytest.raises(DomainError):
            numeric_levels("potential", 2)


class TestPiecewisePotential:
    def test_rejects_positive_inner(self):
        with pytest.raises(DomainError):
            PiecewisePotential(inner=lambda r: np.full_like(r, 0.1), r0=1.0, k=5.0)

    def test_rejects_weak_tail(self):
        with pytest.raises(DomainError):
            PiecewisePotential(inner=lambda r: np.zeros_like(r), r0=1.0, k=0.25)

    def test_rejects_bad_radius(self):
        with pytest.raises(DomainError):
            PiecewisePotential(inner=lambda r: np.zeros_like(r), r0=0.0, k=5.0)

    def test_evaluate_glues_tail(self):
        pot = zero_core(k=5.0, r0=2.0)
        r = np.array([1.0, 2.0, 4.0])
        out = pot.evaluate(r)
        assert out[0] == 0.0 and out[1] == 0.0
        assert abs(out[2] + 5.0 / 16.0) <= 1e-15


class TestAuxiliaryPotential:
    def test_cut_radii(self):
        for m in (0, 1, 2):
            want = math.sqrt(2.0) * (0.75 * math.pi + m * math.pi)
            assert AuxiliaryPotential(m).r_m == pytest.approx(want, rel=1e-15)

    def test_continuous_at_cut(self):
        for m in (1, 2):
            aux = AuxiliaryPotential(m)
            pot = aux.as_piecewise()
            inner = float(pot.inner(np.array([aux.r_m]))[0])
            tail = -OMEGA * OMEGA / (aux.r_m * aux.r_m)
            assert abs(inner - tail) <= 1e-12 * abs(tail)

    @settings(max_examples=60, deadline=None)
    @given(
        m=st.integers(min_value=1, max_value=3),
        mult=st.floats(min_value=1.0001, max_value=50.0),
    )
    def test_envelope_gap_within_bound(self, m, mult):
        aux = AuxiliaryPotential(m)
        gap = float(aux.envelope_gap(np.array([aux.r_m * mult]))[0])
        assert abs(gap) <= aux.bound()

    def test_gap_bound_shrinks_geometrically(self):
        b = [AuxiliaryPotential(m).bound() for m in (1, 2, 3)]
        assert b[0] > b[1] > b[2]
        assert b[1] / b[0] == pytest.approx(math.exp(-math.pi) / 4.0, rel=1e-12)

    def test_rejects_bad_m(self):
        with pytest.raises(DomainError):
            AuxiliaryPotential(-1)
        with pytest.raises(DomainError):
            AuxiliaryPotential(0).bound()

    def test_piecewise_carries_envelope_strength(self):
        pot = AuxiliaryPotential(1).as_piecewise()
        assert pot.k == pytest.approx(OMEGA * OMEGA, rel=1e-15)
        assert pot.r0 == pytest.approx(AuxiliaryPotential(1).r_m, rel=1e-15)


class TestLemmaBounds:
    def test_certified_pass(self):
        rec = lemma_bounds_check(
            AuxiliaryPotential(1).as_piecewise(), 0.01, ARGMIN_R
        )
        assert rec.ok and bool(rec)
        assert abs(rec.u_tilde) < rec.small_bound
        assert abs(rec.du_tilde) < rec.slope_small_bound
        assert rec.u_edge**2 < rec.edge_sq_bound
        assert rec.du_edge**2 < rec.slope_sq_bound

    def test_amplitude_scales_linearly(self):
        pot = AuxiliaryPotential(1).as_piecewise()
        one = lemma_bounds_check(pot, 0.01, ARGMIN_R, amplitude=1.0)
        two = lemma_bounds_check(pot, 0.01, ARGMIN_R, amplitude=2.0)
        assert two.ok
        assert two.small_bound == pytest.approx(2.0 * one.small_bound, rel=1e-14)
        assert two.slope_small_bound == pytest.approx(
            2.0 * one.slope_small_bound, rel=1e-14
        )
        assert two.u_tilde == pytest.approx(2.0 * one.u_tilde, rel=1e-14)
        assert two.edge_sq_bound == pytest.approx(4.0 * one.edge_sq_bound, rel=1e-13)

    def test_empty_core_fails_magnitude_hypothesis(self):
        with pytest.raises(PreconditionError):
            lemma_bounds_check(zero_core(), 0.01, 0.5)

    def test_decreasing_window_rejected(self):
        with pytest.raises(PreconditionError):
            lemma_bounds_check(AuxiliaryPotential(1).as_piecewise(), 0.01, 1.0)

    def test_large_lam_rejected(self):
        with pytest.raises(PreconditionError):
            lemma_bounds_check(AuxiliaryPotential(1).as_piecewise(), 0.2, ARGMIN_R)

    def test_tilde_r_outside_core_rejected(self):
        with pytest.raises(PreconditionError):
            lemma_bounds_check(AuxiliaryPotential(1).as_piecewise(), 0.01, 9.0)

    def test_malformed_numbers_rejected(self):
        pot = AuxiliaryPotential(1).as_piecewise()
        with pytest.raises(DomainError):
            lemma_bounds_check(pot, -0.01, ARGMIN_R)
        with pytest.raises(DomainError):
            lemma_bounds_check(pot, 0.01, ARGMIN_R, amplitude=0.0)
        with pytest.raises(DomainError):
            lemma_bounds_check(pot, 0.01, math.nan)


class TestSpectrumRecord:
    def test_rejects_inconsistent_lengths(self):
        with pytest.raises(DomainError):
            EfimovSpectrum(
                levels=(-1.0,),
                taus=(1.0, 2.0),
                ratios=(),
                asymptotic_reference=(-1.0,),
                requested=1,
                delivered=1,
            )

    def test_rejects_non_negative_levels(self):
        with pytest.raises(DomainError):
            EfimovSpectrum(
                levels=(-1.0, 0.0),
                taus=(1.0, 0.0),
                ratios=(math.inf,),
                asymptotic_reference=(-1.0, -0.0),
                requested=2,
                delivered=2,
            )

    def test_rejects_unsorted_levels(self):
        with pytest.raises(DomainError):
            EfimovSpectrum(
                levels=(-0.1, -1.0),
                taus=(0.3, 1.0),
                ratios=(0.1,),
                asymptotic_reference=(-0.1, -1.0),
                requested=2,
                delivered=2,
            )
