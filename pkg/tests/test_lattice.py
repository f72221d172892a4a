import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from whlab import (
    DefectiveLaw,
    DomainError,
    InvalidLawError,
    StepLaw,
    SubordinatorExponent,
    char_exponent,
    char_function,
    embed_compound_poisson,
    evaluate_exponent,
    minimal_span,
)
from conftest import DRIFT_DOWN, SSRW, step_laws
from oracles import gcd_span


class TestStepLaw:
    def test_tight_bounds_and_moments(self):
        law = StepLaw.from_pmf({"-2": 0.25, "0": 0.25, "3": 0.5})
        assert (law.support_min, law.support_max) == (2, 3)
        assert law.mean == pytest.approx(-0.5 + 1.5)
        assert law.prob(0) == 0.25 and law.prob(7) == 0.0

    @pytest.mark.parametrize(
        "pmf",
        [
            {-1: 0.5, 1: 0.4},  # sums to 0.9
            {0: 1.0},  # point mass at zero
            {-1: -0.1, 1: 1.1},
            {2**21: 1.0},
            {},
        ],
    )
    def test_rejects_invalid(self, pmf):
        with pytest.raises(InvalidLawError):
            StepLaw.from_pmf(pmf)

    def test_renormalised_within_tolerance(self):
        law = StepLaw.from_pmf({-1: 0.5, 1: 0.5 + 5e-13})
        assert law.probs.sum() == pytest.approx(1.0, abs=1e-15)

    def test_immutable(self):
        with pytest.raises(ValueError):
            SSRW.probs[0] = 1.0

    def test_json_round_trip(self):
        law = StepLaw.from_pmf({-3: 0.2, 0: 0.3, 6: 0.5})
        back = StepLaw.from_json(json.loads(json.dumps(law.to_json())))
        assert back.pmf() == law.pmf()

    def test_span_check_flag(self):
        with pytest.raises(InvalidLawError):
            StepLaw.from_json({"pmf": {"-2": 0.5, "2": 0.5}, "span_check": True})
        assert StepLaw.from_json({"pmf": {"-1": 0.5, "1": 0.5}, "span_check": True}).span == 1

    def test_rescale_and_reflect(self):
        law, eta = StepLaw.from_pmf({-3: 0.2, 0: 0.3, 6: 0.5}).rescaled()
        assert eta == 3 and law.pmf() == {-1: 0.2, 0: 0.3, 2: 0.5}
        assert DRIFT_DOWN.reflected().pmf() == {-1: 0.3, 1: 0.7}


class TestSpan:
    @pytest.mark.parametrize(
        "pmf, eta",
        [({-1: 0.5, 1: 0.5}, 1), ({-2: 0.5, 2: 0.5}, 2), ({-3: 0.2, 0: 0.3, 6: 0.5}, 3)],
    )
    def test_examples(self, pmf, eta):
        law = StepLaw.from_pmf(pmf)
        assert minimal_span(law) == eta == gcd_span(pmf)

    @given(
        st.integers(1, 6),
        st.lists(st.integers(-12, 12).filter(bool), min_size=1, max_size=5, unique=True),
        st.booleans(),
    )
    def test_matches_exhaustive_search(self, eta, pts, zero):
        pts = [eta * k for k in pts] + ([0] if zero else [])
        pmf = {k: 1.0 / len(pts) for k in pts}
        assert minimal_span(StepLaw.from_pmf(pmf)) == gcd_span(pmf)


class TestCharacteristicFunction:
    def test_ssrw_values(self):
        assert char_function(SSRW, 0.0) == pytest.approx(1.0)
        assert char_exponent(SSRW, 0.0) == pytest.approx(0.0)
        assert char_function(SSRW, math.pi) == pytest.approx(-1.0)
        assert char_exponent(SSRW, math.pi) == pytest.approx(2.0)

    def test_span_one_zero_at_two_pi(self):
        assert abs(char_exponent(DRIFT_DOWN, 2 * math.pi)) < 1e-12

    def test_domain(self):
        with pytest.raises(DomainError):
            char_function(SSRW, 1 + 0.5j)
        up = StepLaw.from_pmf({1: 0.5, 2: 0.5})
        # no negative steps: the upper half plane is admissible, |phi| < 1 there
        assert abs(char_function(up, 0.3 + 2j)) < 1
        with pytest.raises(DomainError):
            char_function(up, 1 - 1j)

    @given(step_laws())
    @settings(max_examples=60, deadline=None)
    def test_zeros_exactly_on_two_pi_lattice(self, law):
        zeros = 2 * np.pi * np.arange(-3, 4)
        assert np.max(np.abs(char_exponent(law, zeros))) < 1e-10
        z = np.linspace(-7 * np.pi, 7 * np.pi, 4001)
        dist = np.abs(z - 2 * np.pi * np.round(z / (2 * np.pi)))
        away = z[dist >= 0.1]
        assert np.min(np.abs(char_exponent(law, away))) > 0

    @given(step_laws(allow_one_sided=True), st.lists(st.floats(-50, 50), min_size=1, max_size=20))
    def test_hermitian_and_bounded(self, law, zs):
        z = np.array(zs)
        psi = char_exponent(law, z)
        np.testing.assert_allclose(char_exponent(law, -z), np.conj(psi), atol=1e-13)
        assert np.all(np.abs(psi) <= 2 + 1e-12)
        assert np.all(np.abs(char_function(law, z)) <= 1 + 1e-12)


class TestEmbedding:
    @pytest.mark.parametrize(
        "pmf, rate, jumps",
        [
            ({-1: 0.5, 1: 0.5}, 1.0, {-1: 0.5, 1: 0.5}),
            ({-1: 0.25, 0: 0.5, 1: 0.25}, 0.5, {-1: 0.5, 1: 0.5}),
            ({-1: 0.7, 1: 0.3}, 1.0, {-1: 0.7, 1: 0.3}),
        ],
    )
    def test_examples(self, pmf, rate, jumps):
        p, jump = embed_compound_poisson(StepLaw.from_pmf(pmf))
        assert p == pytest.approx(rate)
        assert jump.pmf() == pytest.approx(jumps)

    @given(step_laws())
    @settings(max_examples=40)
    def test_exponent_identity(self, law):
        p, jump = embed_compound_poisson(law)
        z = np.linspace(-np.pi, np.pi, 257)
        np.testing.assert_allclose(char_exponent(law, z), p * char_exponent(jump, z), atol=1e-12)


class TestDefectiveLaw:
    def test_invariants(self):
        law = DefectiveLaw.from_pmf({1: 3 / 7})
        assert law.defect == pytest.approx(4 / 7)
        assert not law.is_proper and math.isinf(law.mean)
        with pytest.raises(InvalidLawError):
            DefectiveLaw.from_pmf({0: 0.5, 1: 0.5}, strict=True)
        with pytest.raises(InvalidLawError):
            DefectiveLaw.from_pmf({1: 0.5}, defect=0.4)
        with pytest.raises(InvalidLawError):
            DefectiveLaw.from_pmf({-1: 1.0})

    def test_json_round_trip(self):
        law = DefectiveLaw.from_pmf({0: 0.3, 2: 0.6}, defect=0.1)
        back = DefectiveLaw.from_json(json.loads(json.dumps(law.to_json())))
        assert back.pmf() == law.pmf() and back.defect == law.defect and back.strict == law.strict

    def test_exponent_drops_atom_at_zero(self):
        exp = DefectiveLaw.from_pmf({0: 0.5, 1: 0.5}).to_exponent()
        assert exp.killing == 0 and exp.levy.tolist() == [0.0, 0.5]
        z = np.linspace(-3, 3, 11)
        law = DefectiveLaw.from_pmf({0: 0.5, 1: 0.5})
        np.testing.assert_allclose(exp(z), law.factor(np.exp(1j * z)), atol=1e-15)


class TestSubordinatorExponent:
    def test_examples(self):
        unit = SubordinatorExponent.from_atoms(0.0, {1: 1.0})
        assert evaluate_exponent(unit, 0) == 0
        killed = SubordinatorExponent.from_atoms(0.5, {})
        for z in (0, 1.3, 2j, -4 + 1j):
            assert evaluate_exponent(killed, z) == pytest.approx(0.5)

    def test_unit_jump_on_imaginary_axis(self):
        unit = SubordinatorExponent.from_atoms(0.0, {1: 1.0})
        y = np.linspace(0, 10, 101)
        kappa = evaluate_exponent(unit, 1j * y)
        np.testing.assert_allclose(kappa, 1 - np.exp(-y), atol=1e-14)
        assert np.all(np.diff(kappa.real) >= 0)

    def test_lower_half_plane_rejected(self):
        with pytest.raises(DomainError):
            evaluate_exponent(SubordinatorExponent.from_atoms(0.0, {1: 1.0}), 1 - 0.1j)

    @given(
        st.floats(0, 2),
        st.floats(0, 2),
        st.dictionaries(st.integers(1, 10), st.floats(0, 3), max_size=5),
    )
    def test_bernstein_consistency(self, q, d, atoms):
        exp = SubordinatorExponent.from_atoms(q, atoms, drift=d)
        y = np.arange(0, 101) / 10
        kappa = evaluate_exponent(exp, 1j * y)
        assert np.max(np.abs(kappa.imag)) < 1e-12
        assert kappa[0].real == pytest.approx(q)
        assert np.all(np.diff(kappa.real) >= -1e-12)
