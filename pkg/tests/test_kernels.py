import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import erfc as scipy_erfc

from nwspectral.core import PhysicalParams, make_grids
from nwspectral.kernels import (RootedKernelParams, erfc, erfc_pair,
                                erfc_pair_codomain, gauss_codomain,
                                gauss_selfconv_exact, heat_kernel,
                                iterated_gauss_selfconv,
                                lorentzian_codomain, lorentzian_pair,
                                rooted_codomain, selfconv_discrete)
from nwspectral.spectral import default_plan


class TestErfc:
    def test_against_high_precision_oracle(self):
        # 50-digit reference frozen before comparing the in-repo series
        mpmath.mp.dps = 50
        for x in (-8.0, -2.5, -0.3, 0.0, 0.4, 1.7, 5.0, 12.0, 26.0):
            want = float(mpmath.erfc(x))
            got = erfc(x)
            assert got == pytest.approx(want, rel=1e-14, abs=1e-300), x

    def test_against_scipy_on_a_grid(self):
        xs = np.linspace(-10.0, 30.0, 2001)
        assert np.max(np.abs(erfc(xs) - scipy_erfc(xs))) < 1e-13

    def test_symmetry_identity(self):
        xs = np.linspace(0.0, 6.0, 301)
        assert np.max(np.abs(erfc(-xs) + erfc(xs) - 2.0)) < 1e-13

    @given(st.floats(min_value=-12.0, max_value=12.0))
    @settings(max_examples=80, deadline=None)
    def test_monotone_decreasing(self, x):
        assert erfc(x + 1e-3) <= erfc(x)

    def test_tail_underflow_is_clean(self):
        assert erfc(40.0) == 0.0
        assert erfc(-40.0) == pytest.approx(2.0)


class TestHeatKernel:
    def test_rejects_nonpositive_time(self):
        with pytest.raises(ValueError):
            heat_kernel(0.0, 0.0, 1.0)
        with pytest.raises(ValueError):
            heat_kernel(0.0, -0.5, 1.0)

    def test_mass_is_one(self):
        plan = default_plan()
        mass = float(np.sum(heat_kernel(plan.spatial.points, 0.3, 1.0))
                     * plan.dx)
        assert mass == pytest.approx(1.0, abs=1e-12)

    def test_transform_is_the_gaussian(self):
        plan = default_plan()
        got = plan.forward(heat_kernel(plan.spatial.points, 0.3, 1.0)).values
        want = gauss_codomain(plan.spectral.frequencies, 0.3, 1.0)
        assert np.max(np.abs(got - want)) < 1e-10

    @given(st.floats(min_value=0.05, max_value=2.0),
           st.floats(min_value=0.2, max_value=3.0))
    @settings(max_examples=40, deadline=None)
    def test_semigroup_in_codomain(self, t1, t2):
        s = np.linspace(-2.0, 2.0, 41)
        lhs = gauss_codomain(s, t1, 1.0) * gauss_codomain(s, t2, 1.0)
        rhs = gauss_codomain(s, t1 + t2, 1.0)
        assert np.max(np.abs(lhs - rhs)) < 1e-12


class TestRootedKernel:
    def test_rejects_trivial_root_order(self):
        with pytest.raises(ValueError):
            RootedKernelParams(PhysicalParams(1.0, 1.0, 0.1, 2), 1)

    def test_exponent_range(self):
        for n in (2, 3, 9):
            rp = RootedKernelParams(PhysicalParams(1.0, 1.0, 0.1, 2), n)
            assert -0.5 < rp.exponent < 0.0

    def test_n_factors_remake_the_heat_transform(self):
        # n factors need n-1 convolution operators; this pins the
        # factor-count convention used everywhere downstream
        plan = default_plan()
        s = plan.spectral.frequencies
        for p in (2, 3):
            rp = RootedKernelParams(PhysicalParams(1.0, 1.0, 0.1, p), p + 1)
            rooted = rooted_codomain(s, 0.4, rp)
            back = selfconv_discrete(rooted, p, plan.ds)
            want = gauss_codomain(s, 0.4, 1.0)
            assert np.max(np.abs(back - want)) < 1e-8

    def test_off_by_one_convention_fails(self):
        plan = default_plan()
        s = plan.spectral.frequencies
        rp = RootedKernelParams(PhysicalParams(1.0, 1.0, 0.1, 2), 3)
        rooted = rooted_codomain(s, 0.4, rp)
        over = selfconv_discrete(rooted, 3, plan.ds)
        want = gauss_codomain(s, 0.4, 1.0)
        assert np.max(np.abs(over - want)) > 1e-2


class TestIteratedSelfConvolution:
    def test_discrete_oracle_matches_continuum(self):
        plan = default_plan()
        s = plan.spectral.frequencies
        for i in (1, 2):
            exact = gauss_selfconv_exact(s, 0.5, 1.0, i)
            disc = iterated_gauss_selfconv(s, 0.5, 1.0, i,
                                           "discrete_oracle", plan.spectral)
            assert np.max(np.abs(exact - disc)) < 1e-8

    def test_stated_form_off_by_the_prefactor_law(self):
        # the closed form divides by an extra (4 pi D t)^((i+1)/2); the
        # exponential profile is shared, so the ratio is s-independent
        s = np.linspace(0.0, 1.0, 11)
        for i in (1, 2, 3):
            for t in (0.25, 1.0, 2.0):
                stated = iterated_gauss_selfconv(s, t, 1.0, i,
                                                 "paper_formula")
                exact = gauss_selfconv_exact(s, t, 1.0, i)
                ratio = stated / exact
                law = (4.0 * math.pi * t) ** (-(i + 1) / 2.0)
                assert np.max(np.abs(ratio - law)) < 1e-12 * law

    def test_rejects_unknown_source(self):
        with pytest.raises(ValueError):
            iterated_gauss_selfconv(0.0, 0.5, 1.0, 1, "guess")

    def test_rejects_i_zero(self):
        with pytest.raises(ValueError):
            iterated_gauss_selfconv(0.0, 0.5, 1.0, 0, "paper_formula")


class TestClosedFormPairs:
    def test_lorentzian_pair_forward(self):
        plan = default_plan(32768, 20.0)
        f = lorentzian_pair(plan.spatial.points, 1.0, 1.0)
        want = lorentzian_codomain(plan.spectral.frequencies, 1.0, 1.0)
        got = plan.forward(f).values
        assert np.max(np.abs(got - want)) < 1e-6

    def test_lorentzian_inverse_off_the_kink(self):
        plan = default_plan(16384, 40.0)
        inv = plan.inverse(lorentzian_codomain(plan.spectral.frequencies,
                                               1.0, 1.0))
        want = lorentzian_pair(plan.spatial.points, 1.0, 1.0)
        off = np.abs(plan.spatial.points) > 0.5
        assert np.max(np.abs(inv[off] - want[off])) < 1e-6

    def test_erfc_pair_vs_inverse_dft(self):
        spatial, spectral = make_grids(4096, 80.0)
        from nwspectral.spectral import TransformPlan
        plan = TransformPlan(spatial, spectral)
        got = erfc_pair(spatial.points, 0.7, 1.0, 1.0)
        want = plan.inverse(erfc_pair_codomain(spectral.frequencies, 0.7,
                                               1.0, 1.0))
        assert np.max(np.abs(got - want)) < 1e-6

    def test_erfc_pair_large_time_transient_vanishes(self):
        # e^(bt) prefactor must cancel against the erfc decay, not overflow
        plan = default_plan()
        vals = erfc_pair(plan.spatial.points, 50.0, 1.0, 1.0)
        assert np.all(np.isfinite(vals))
        assert np.max(np.abs(math.exp(-50.0) * vals)) < 1e-8

    def test_erfc_pair_rejects_bad_arguments(self):
        for t, D, b in ((0.0, 1.0, 1.0), (0.5, 0.0, 1.0), (0.5, 1.0, 0.0)):
            with pytest.raises(ValueError):
                erfc_pair(0.0, t, D, b)

    @given(st.floats(min_value=0.1, max_value=3.0),
           st.floats(min_value=0.2, max_value=4.0),
           st.floats(min_value=0.2, max_value=4.0))
    @settings(max_examples=30, deadline=None)
    def test_erfc_pair_is_even_in_x(self, t, D, b):
        x = np.linspace(0.25, 6.0, 24)
        left = erfc_pair(-x, t, D, b)
        right = erfc_pair(x, t, D, b)
        scale = np.max(np.abs(right))
        assert np.max(np.abs(left - right)) < 1e-12 * scale
