import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from whlab import ParameterError, StepLaw, convolution_powers, spectral_factorise
from whlab.spitzer import (
    choose_horizon,
    spitzer_ascending_factor,
    spitzer_descending_factor,
    truncation_bound,
)
from whlab.uniqueness import law_distance
from conftest import DRIFT_DOWN, SSRW, random_laws, step_laws
from oracles import ladder_by_linear_solve


class TestConvolutionPowers:
    def test_binomial_rows(self):
        table = convolution_powers(SSRW, 2)
        assert table.pmf(2) == pytest.approx({-2: 0.25, 0: 0.5, 2: 0.25})
        assert table.positive_part(1) == pytest.approx({1: 0.5})
        drift = convolution_powers(DRIFT_DOWN, 2)
        assert drift.pmf(2) == pytest.approx({-2: 0.49, 0: 0.42, 2: 0.09})

    def test_horizon_errors(self):
        with pytest.raises(ParameterError):
            convolution_powers(SSRW, 0)
        with pytest.raises(ParameterError):
            convolution_powers(StepLaw.from_pmf({-1: 0.5, 1024: 0.5}), 2048)

    @given(step_laws(max_reach=4), st.integers(1, 30))
    @settings(max_examples=30, deadline=None)
    def test_rows(self, law, N):
        table = convolution_powers(law, N)
        for n in range(1, N + 1):
            pmf = table.pmf(n)
            assert sum(pmf.values()) == pytest.approx(1.0, abs=1e-10 * n)
            assert min(pmf) >= -n * law.support_min and max(pmf) <= n * law.support_max
        if N > 1:
            prev = table.rows[N - 2]
            np.testing.assert_allclose(table.rows[N - 1], np.convolve(prev, law.probs), atol=1e-15)


class TestHorizon:
    def test_bound_formula(self):
        assert truncation_bound(0.5, 10) == pytest.approx(math.e * 0.5**11 / (11 * 0.5))

    @pytest.mark.parametrize("r", [0.1, 0.5, 0.9, 0.99])
    def test_choose_horizon_is_minimal(self, r):
        N = choose_horizon(r)
        assert truncation_bound(r, N) <= 1e-10 < truncation_bound(r, N - 1)

    @pytest.mark.parametrize("r", [1.0, 1.2, 0.0])
    def test_needs_killing(self, r):
        with pytest.raises(ParameterError):
            spitzer_ascending_factor(SSRW, r)


class TestAscending:
    def test_killed_ssrw_closed_form(self):
        # E[r^tau+] = (1 - sqrt(1 - r^2)) / r for the simple symmetric walk
        law, bound = spitzer_ascending_factor(SSRW, 0.5, N=60)
        assert law.mass(1) == pytest.approx(2 - math.sqrt(3), abs=1e-12)
        assert bound < 1e-12

    def test_small_killing_single_step(self):
        law = StepLaw.from_pmf({-1: 0.2, 1: 0.3, 2: 0.5})
        r = 1e-4
        asc, _ = spitzer_ascending_factor(law, r)
        for k in (1, 2):
            assert asc.mass(k) == pytest.approx(r * law.prob(k), rel=1e-3)

    def test_drift_near_one(self):
        asc, _ = spitzer_ascending_factor(DRIFT_DOWN, 0.99, N=4000)
        spectral = spectral_factorise(DRIFT_DOWN, 0.99).ascending
        assert abs(asc.mass(1) - spectral.mass(1)) < 1e-9
        assert asc.mass(1) == pytest.approx(3 / 7, abs=0.02)

    @pytest.mark.parametrize("r", [0.3, 0.6, 0.9])
    def test_linear_solve_oracle(self, r):
        for law in random_laws(10, 5, max_down=4, max_up=4):
            asc, bound = spitzer_ascending_factor(law, r)
            masses, defect = ladder_by_linear_solve(law, r, "strict")
            ref = law_distance(asc, type(asc).from_masses(masses, strict=True, clip=1e-12))
            assert ref <= bound + 1e-9

    @given(step_laws(max_reach=4))
    @settings(max_examples=25, deadline=None)
    def test_monotone_in_killing(self, law):
        totals = [spitzer_ascending_factor(law, r)[0].total_mass for r in np.arange(1, 10) / 10]
        assert np.all(np.diff(totals) >= -1e-12)

    @given(step_laws(max_reach=4), st.sampled_from([0.3, 0.5, 0.9]))
    @settings(max_examples=40, deadline=None)
    def test_matches_spectral(self, law, r):
        asc, bound = spitzer_ascending_factor(law, r)
        desc, _ = spitzer_descending_factor(law, r)
        fac = spectral_factorise(law, r)
        assert asc.atom_at_zero == 0.0
        assert law_distance(asc, fac.ascending) <= bound + 1e-9
        assert law_distance(desc, fac.descending) <= bound + 1e-9


class TestDescending:
    def test_killed_ssrw(self):
        r = 0.5
        desc, bound = spitzer_descending_factor(SSRW, r)
        # each weak descending step: either straight down, or up and back
        # to 0 with the ascending first-passage transform
        a = (1 - math.sqrt(1 - r * r)) / r
        assert desc.mass(1) == pytest.approx(r / 2, abs=bound)
        assert desc.mass(0) == pytest.approx(r / 2 * a, abs=bound)
