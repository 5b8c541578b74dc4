import math
import sys
import unittest
from os import path
from unittest.mock import patch

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

sys.path.append(path.dirname(path.dirname(path.abspath(__file__))))
from src.binary import (
    BinaryPayoffs,
    BlackwellOrder,
    Favoredness,
    LemmaCase,
    alpha,
    alpha_derivative,
    binary_belief,
    blackwell_compare,
    classify_favored,
    lemma_case,
    mu_B,
    mu_W,
    mu_W_limit,
    optimal_policy,
    rho_bar,
    sender_values,
)
from src.exceptions import NumericalException, ProblemException

SEED = 20240229

CASE_I = BinaryPayoffs(3.0, 0.5, 1.0, 4.0)
CASE_II = BinaryPayoffs(3.0, -1.0, 1.0, 4.0)
CASE_III = BinaryPayoffs(4.0, 1.0, -1.0, 3.0)


def random_payoffs(rng: np.random.Generator) -> BinaryPayoffs:
    u_low_0, u_high_0 = rng.normal(size=2)
    return BinaryPayoffs(
        u_low_0=u_low_0,
        u_high_0=u_high_0,
        u_low_1=u_low_0 - rng.uniform(0.1, 2.0),
        u_high_1=u_high_0 + rng.uniform(0.1, 2.0),
    )


def mirrored(p: BinaryPayoffs) -> BinaryPayoffs:
    """Swap the two states and the two actions."""
    return BinaryPayoffs(
        u_low_0=p.u_high_1, u_high_0=p.u_low_1, u_low_1=p.u_high_0, u_high_1=p.u_low_0
    )


payoff_strategy = st.tuples(
    st.floats(-5.0, 5.0),
    st.floats(-5.0, 5.0),
    st.floats(0.05, 5.0),
    st.floats(0.05, 5.0),
).map(lambda t: BinaryPayoffs(t[0], t[1], t[0] - t[2], t[1] + t[3]))


class TestBinaryPayoffs(unittest.TestCase):
    def test_rejects_payoffs_not_matching_state(self):
        with self.assertRaises(ProblemException):
            BinaryPayoffs(1.0, 0.0, 2.0, 1.0)
        with self.assertRaises(ProblemException):
            BinaryPayoffs(3.0, 4.0, 1.0, 4.0)

    def test_rejects_non_finite(self):
        with self.assertRaises(ProblemException):
            BinaryPayoffs(math.nan, 0.0, -1.0, 1.0)

    def test_derived_quantities(self):
        self.assertEqual(CASE_II.var0, 4.0)
        self.assertEqual(CASE_II.var1, 3.0)
        self.assertEqual(CASE_II.u_max, -1.0)
        self.assertTrue(CASE_II.matches_state_strictly)

    def test_problem_conversion(self):
        problem = CASE_II.to_problem(2.0)
        self.assertEqual(problem.actions, (0, 1))
        self.assertEqual(BinaryPayoffs.from_problem(problem), CASE_II)


class TestThresholds(unittest.TestCase):
    def test_bayesian_threshold(self):
        self.assertAlmostEqual(mu_B(CASE_II), 2.0 / 7.0, delta=1e-12)

    def test_wishful_threshold_in_unit_interval(self):
        for rho in (1e-6, 0.5, 5.0, 50.0):
            self.assertTrue(0.0 < mu_W(CASE_II, rho) < 1.0)

    def test_invalid_rho(self):
        with self.assertRaises(ProblemException):
            mu_W(CASE_II, 0.0)

    def test_large_rho_limit(self):
        self.assertEqual(mu_W_limit(CASE_II), 0.0)
        self.assertEqual(mu_W_limit(CASE_III), 1.0)
        self.assertEqual(mu_W_limit(BinaryPayoffs(4.0, 1.0, -1.0, 4.0)), 0.5)
        self.assertLess(mu_W(CASE_II, 100.0), 1e-6)
        self.assertGreater(mu_W(CASE_III, 100.0), 1.0 - 1e-6)

    def test_translation_and_scaling(self):
        base = mu_W(CASE_II, 0.7)
        self.assertAlmostEqual(mu_W(CASE_II.translated(12.5), 0.7), base, delta=1e-12)
        self.assertAlmostEqual(mu_W(CASE_II.scaled(4.0), 0.7 / 4.0), base, delta=1e-12)


def test_small_rho_recovers_bayesian_threshold():
    rng = np.random.default_rng(SEED)
    for _ in range(100):
        p = random_payoffs(rng)
        assert abs(mu_W(p, 1e-6) - mu_B(p)) < 1e-4


def test_logistic_equation_on_rho_grid():
    h = 1e-5
    for p in (CASE_I, CASE_II, CASE_III):
        for rho in np.linspace(0.05, 5.0, 50):
            slope = (mu_W(p, rho + h) - mu_W(p, rho - h)) / (2.0 * h)
            m = mu_W(p, rho)
            predicted = alpha(p, rho) * m * (1.0 - m)
            assert abs(slope - predicted) <= 1e-4 * abs(predicted) + 1e-8


def test_alpha_derivative_matches_finite_difference():
    h = 1e-5
    for rho in (0.1, 0.6, 2.0, 7.0):
        slope = (alpha(CASE_II, rho + h) - alpha(CASE_II, rho - h)) / (2.0 * h)
        assert abs(slope - alpha_derivative(CASE_II, rho)) <= 1e-5


def test_alpha_series_is_continuous():
    # the series branch starts where rho * max(gain) drops below 1e-4
    cutoff = 1e-4 / max(CASE_II.low_gain, CASE_II.high_gain)
    assert abs(alpha(CASE_II, cutoff * 0.999) - alpha(CASE_II, cutoff * 1.001)) <= 1e-6


class TestFavoredness(unittest.TestCase):
    def test_lemma_cases(self):
        self.assertIs(lemma_case(CASE_I), LemmaCase.CASE_I)
        self.assertIs(lemma_case(CASE_II), LemmaCase.CASE_II)
        self.assertIs(lemma_case(CASE_III), LemmaCase.CASE_III)

    def test_rho_bar_of_case_ii(self):
        crossing = rho_bar(CASE_II)
        self.assertAlmostEqual(crossing, 0.621806, delta=5e-4)
        self.assertAlmostEqual(mu_W(CASE_II, crossing), mu_B(CASE_II), delta=1e-9)

    def test_no_rho_bar_in_case_i(self):
        self.assertIsNone(rho_bar(CASE_I))

    def test_case_i_favored_at_every_rho(self):
        for rho in (0.1, 1.0, 10.0):
            report = classify_favored(CASE_I, rho)
            self.assertIs(report.favored, Favoredness.FAVORED)
            self.assertLess(report.mu_W, report.mu_B)

    def test_case_ii_favored_above_rho_bar(self):
        crossing = rho_bar(CASE_II)
        for rho in (0.1, 1.0, 10.0):
            report = classify_favored(CASE_II, rho)
            expected = Favoredness.FAVORED if rho > crossing else Favoredness.NOT_FAVORED
            self.assertIs(report.favored, expected)
            self.assertEqual(report.mu_W < report.mu_B, rho > crossing)

    def test_case_iii_favored_below_rho_bar(self):
        crossing = rho_bar(CASE_III)
        self.assertIsNotNone(crossing)
        for rho in (0.1, 1.0, 10.0):
            report = classify_favored(CASE_III, rho)
            expected = Favoredness.FAVORED if rho < crossing else Favoredness.NOT_FAVORED
            self.assertIs(report.favored, expected)


class TestPolicies(unittest.TestCase):
    def test_no_disclosure_above_threshold(self):
        policy = optimal_policy(0.6, 0.4)
        self.assertFalse(policy.discloses)
        self.assertEqual(policy.value, 1.0)

    def test_split_below_threshold(self):
        policy = optimal_policy(0.2, 0.5)
        self.assertTrue(policy.discloses)
        self.assertEqual((policy.low, policy.high), (0.0, 0.5))
        self.assertAlmostEqual(policy.value, 0.4)

    def test_invalid_prior(self):
        with self.assertRaises(ProblemException):
            optimal_policy(1.0, 0.5)

    def test_wishful_policy_less_informative_when_favored(self):
        bayes, wishful = sender_values(CASE_I, 1.0, 0.1)
        self.assertGreater(wishful.value, bayes.value)
        self.assertIs(blackwell_compare(wishful, bayes), BlackwellOrder.LESS_INFORMATIVE)
        self.assertIs(blackwell_compare(bayes, wishful), BlackwellOrder.MORE_INFORMATIVE)
        self.assertIs(blackwell_compare(bayes, bayes), BlackwellOrder.EQUAL)

    def test_binary_belief_tie_goes_to_action_1(self):
        threshold = mu_W(CASE_II, 1.0)
        _, action = binary_belief(CASE_II, 1.0, threshold)
        self.assertEqual(action, 1)
        eta, action = binary_belief(CASE_II, 1.0, threshold / 2.0)
        self.assertEqual(action, 0)
        self.assertLess(eta, threshold / 2.0)


def test_alpha_limits_and_value():
    assert abs(alpha(CASE_II, 1e-6) - 0.5) <= 1e-3
    assert abs(alpha(CASE_II, 50.0) + 1.0) <= 1e-6
    assert abs(alpha(BinaryPayoffs(2.0, -1.0, 1.0, 4.0), 0.1) + 0.199135) <= 1e-3


def test_classification_is_translation_invariant():
    rng = np.random.default_rng(SEED)
    for _ in range(30):
        p = random_payoffs(rng)
        rho = float(rng.uniform(0.05, 5.0))
        report = classify_favored(p, rho)
        moved = classify_favored(p.translated(7.5), rho)
        assert moved.favored is report.favored
        assert moved.lemma_case is report.lemma_case
        assert abs(moved.mu_B - report.mu_B) <= 1e-10
        assert abs(moved.mu_W - report.mu_W) <= 1e-10
        if report.rho_bar is None:
            assert moved.rho_bar is None
        else:
            assert math.isclose(moved.rho_bar, report.rho_bar, rel_tol=1e-6)


def test_crossing_beyond_the_first_scan():
    # u_max = -1e-6: mu_W only drops below mu_B near rho = 7e5
    p = BinaryPayoffs(1.0, -1.0, 0.0, 1.000001)
    report = classify_favored(p, 1.0)
    assert report.lemma_case is LemmaCase.CASE_II
    assert report.favored is Favoredness.NOT_FAVORED
    assert report.mu_W > report.mu_B
    assert report.rho_bar is not None
    assert report.rho_bar > 1e4 / p.scale
    assert abs(mu_W(p, report.rho_bar) - mu_B(p)) <= 1e-9
    assert classify_favored(p, 2.0 * report.rho_bar).favored is Favoredness.FAVORED


def test_widened_scan_recovers_crossing():
    with patch("src.binary.RHO_SCAN_HIGH", 1e-6):
        crossing = rho_bar(CASE_II)
    assert abs(crossing - 0.621806) <= 5e-4


def test_rho_bar_bracket_failure_raises():
    # neither the first nor the widened scan may reach the crossing
    try:
        with patch("src.binary.RHO_SCAN_HIGH", 1e-6), patch("src.binary.RHO_SCAN_CEILING", 1e-6):
            rho_bar(CASE_II)
    except NumericalException as e:
        assert "No crossing" in str(e)
        return
    assert False, "Expected NumericalException, but it was not raised"


def test_classification_survives_bracket_failure():
    with patch("src.binary.RHO_SCAN_HIGH", 1e-6), patch("src.binary.RHO_SCAN_CEILING", 1e-6):
        report = classify_favored(CASE_II, 10.0)
    assert report.rho_bar is None
    assert report.favored is Favoredness.FAVORED
    assert report.mu_W < report.mu_B


@settings(derandomize=True, max_examples=300)
@given(payoff_strategy, st.floats(0.01, 10.0))
def test_threshold_symmetry(p, rho):
    assert math.isclose(mu_W(mirrored(p), rho), 1.0 - mu_W(p, rho), abs_tol=1e-12)
    assert math.isclose(mu_B(mirrored(p)), 1.0 - mu_B(p), abs_tol=1e-12)


@settings(derandomize=True, max_examples=300)
@given(payoff_strategy, st.floats(0.01, 10.0))
def test_threshold_separates_actions(p, rho):
    threshold = mu_W(p, rho)
    below = max(threshold - 1e-6, 0.0)
    above = min(threshold + 1e-6, 1.0)
    assert binary_belief(p, rho, above)[1] == 1
    if below < threshold - 5e-7:
        assert binary_belief(p, rho, below)[1] == 0
