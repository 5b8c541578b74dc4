import math
import sys
import unittest
import warnings
from concurrent.futures import ThreadPoolExecutor
from os import path

import numpy as np
from scipy.optimize import brentq

sys.path.append(path.dirname(path.dirname(path.abspath(__file__))))
from src.exceptions import ProblemException, QuadratureException
from src.investor import (
    PriorFamily,
    ReturnPrior,
    discrete_investment_probability,
    discretize_prior,
    exp_moment,
    integrate,
    prior_mean,
    solve_investor,
    theta_B,
    theta_W,
    trunc_exp_mean,
    trunc_mean,
)

SEED = 20240229

DEMO = ReturnPrior.uniform(-2.0, 1.0)


def wishful_oracle(z: float) -> float:
    """Uniform(-2, 1) with rho = 1: the tail of exp(theta) - 1 above z integrates to zero."""
    return math.e - math.exp(z) - (1.0 - z)


class TestReturnPrior(unittest.TestCase):
    def test_support_must_straddle_zero(self):
        with self.assertRaises(ProblemException):
            ReturnPrior.uniform(0.5, 1.0)

    def test_custom_prior_must_be_consistent(self):
        with self.assertRaises(ProblemException):
            ReturnPrior(
                theta_low=-1.0,
                theta_high=1.0,
                pdf=lambda t: np.full_like(np.asarray(t, dtype=float), 0.4),
                cdf=lambda t: np.clip((np.asarray(t, dtype=float) + 1.0) / 2.0, 0.0, 1.0),
            )

    def test_from_dict(self):
        prior = ReturnPrior.from_dict(
            {"family": "truncated_normal", "mean": -0.5, "std": 1.0, "low": -2.0, "high": 1.0}
        )
        self.assertIs(prior.kind, PriorFamily.TRUNCATED_NORMAL)
        with self.assertRaises(ProblemException):
            ReturnPrior.from_dict({"family": "cauchy"})

    def test_piecewise_linear_rejects_malformed_knots(self):
        malformed = (
            [[-2.0], [1.0]],
            [[-2.0, 1.0], [1.0]],
            [(-2.0, 1.0)],
            [(-2.0, 1.0), (0.0, 0.0), (1.0, 1.0)],
            [(-2.0, 1.0), (0.0, -0.5), (1.0, 1.0)],
        )
        for knots in malformed:
            with self.assertRaises(ProblemException):
                ReturnPrior.piecewise_linear(knots)
        with self.assertRaises(ProblemException):
            ReturnPrior.from_dict({"family": "piecewise_linear", "knots": [[-2], [1]]})

    def test_piecewise_linear_normalizes(self):
        prior = ReturnPrior.piecewise_linear([(-2.0, 1.0), (0.0, 2.0), (1.0, 0.5)])
        self.assertAlmostEqual(float(prior.cdf(1.0)), 1.0, delta=1e-12)
        self.assertAlmostEqual(
            integrate(prior.pdf, prior.theta_low, prior.theta_high, prior.breakpoints), 1.0, delta=1e-9
        )


class TestMoments(unittest.TestCase):
    def test_exp_moment_closed_form(self):
        self.assertAlmostEqual(exp_moment(DEMO, 1.0), (math.e - math.exp(-2.0)) / 3.0, delta=1e-10)

    def test_exp_moment_small_rho(self):
        self.assertAlmostEqual(exp_moment(DEMO, 1e-8), 1.0, delta=1e-7)

    def test_exp_moment_point_mass_limit(self):
        narrow = ReturnPrior.truncated_normal(-1.0, 0.02, -2.0, 1.0)
        self.assertAlmostEqual(exp_moment(narrow, 1.0), math.exp(-1.0), delta=1e-3)

    def test_trunc_mean_closed_form(self):
        for z in (-2.0, -1.5, -1.0, 0.0, 0.5):
            self.assertAlmostEqual(trunc_mean(DEMO, z), (1.0 + z) / 2.0, delta=1e-9)
        self.assertAlmostEqual(prior_mean(DEMO), -0.5, delta=1e-10)

    def test_trunc_exp_mean_closed_form(self):
        self.assertAlmostEqual(trunc_exp_mean(DEMO, -1.0, 1.0), (math.e - math.exp(-1.0)) / 2.0, delta=1e-9)
        self.assertAlmostEqual(trunc_exp_mean(DEMO, -2.0, 1.0), exp_moment(DEMO, 1.0), delta=1e-9)

    def test_endpoint_conventions(self):
        self.assertEqual(trunc_mean(DEMO, 1.0), 1.0)
        self.assertEqual(trunc_exp_mean(DEMO, 1.0, 2.0), math.exp(2.0))
        near_top = 1.0 - 1e-4 * DEMO.width
        self.assertAlmostEqual(trunc_mean(DEMO, near_top), 1.0, delta=1e-4 * DEMO.width)

    def test_cutoff_outside_support(self):
        with self.assertRaises(ProblemException):
            trunc_mean(DEMO, 2.0)


def test_truncated_means_increase():
    grid = np.linspace(DEMO.theta_low, DEMO.theta_high, 1000)
    phi = np.array([trunc_mean(DEMO, float(z)) for z in grid])
    psi = np.array([trunc_exp_mean(DEMO, float(z), 1.0) for z in grid])
    assert np.all(np.diff(phi) > -1e-12)
    assert np.all(np.diff(psi) > -1e-12)


def test_jensen_gap_on_interior_grid():
    prior = ReturnPrior.piecewise_linear([(-2.0, 1.0), (-0.5, 1.5), (1.0, 0.2)])
    for candidate in (DEMO, prior):
        for z in np.linspace(candidate.theta_low, candidate.theta_high, 202)[1:-1]:
            z = float(z)
            assert trunc_exp_mean(candidate, z, 1.0) > math.exp(trunc_mean(candidate, z))


class TestThresholds(unittest.TestCase):
    def test_bayesian_threshold(self):
        self.assertAlmostEqual(theta_B(DEMO), -1.0, delta=1e-9)
        self.assertAlmostEqual(theta_B(ReturnPrior.uniform(-3.0, 1.0)), -1.0, delta=1e-9)

    def test_bayesian_threshold_needs_negative_mean(self):
        with self.assertRaises(ProblemException) as context:
            theta_B(ReturnPrior.uniform(-0.5, 1.0))
        self.assertIn("m_hat < 0", str(context.exception))

    def test_wishful_threshold(self):
        expected = brentq(wishful_oracle, -2.0, 0.0, xtol=1e-14)
        self.assertAlmostEqual(theta_W(DEMO, 1.0), expected, delta=1e-9)
        self.assertAlmostEqual(expected, -1.4936, delta=1e-3)

    def test_wishful_threshold_needs_small_exp_moment(self):
        with self.assertRaises(ProblemException) as context:
            theta_W(DEMO, 5.0)
        self.assertIn("already invests", str(context.exception))

    def test_bayesian_limit(self):
        self.assertAlmostEqual(theta_W(DEMO, 1e-6), -1.0, delta=1e-3)
        solution = solve_investor(DEMO, 1e-6)
        self.assertLessEqual(solution.prob_W - solution.prob_B, 1e-3)

    def test_solution(self):
        solution = solve_investor(DEMO, 1.0)
        self.assertAlmostEqual(solution.prob_B, 2.0 / 3.0, delta=1e-9)
        self.assertAlmostEqual(solution.prob_W, 0.8312, delta=1e-3)
        self.assertGreater(solution.prob_W, solution.prob_B)


def test_wishful_investor_always_easier_to_persuade():
    rng = np.random.default_rng(SEED)
    checked = 0
    while checked < 100:
        low = float(rng.uniform(-3.0, -0.5))
        high = float(rng.uniform(0.1, 0.9 * -low))
        if rng.uniform() < 0.5:
            prior = ReturnPrior.uniform(low, high)
        else:
            middle = float(rng.uniform(low, high))
            prior = ReturnPrior.piecewise_linear(
                [
                    (low, float(rng.uniform(0.5, 2.0))),
                    (middle, float(rng.uniform(0.5, 2.0))),
                    (high, float(rng.uniform(0.1, 1.0))),
                ]
            )
        rho = float(rng.uniform(0.05, 2.0))
        if prior_mean(prior) >= 0.0 or exp_moment(prior, rho) >= 1.0:
            continue
        solution = solve_investor(prior, rho)
        assert solution.theta_W < solution.theta_B
        assert solution.prob_W > solution.prob_B
        checked += 1


def test_discretized_prior_matches_threshold_policy():
    thetas, masses = discretize_prior(DEMO, 50)
    assert thetas.size == 50
    assert abs(masses.sum() - 1.0) <= 1e-12
    solution = solve_investor(DEMO, 1.0)
    assert abs(discrete_investment_probability(DEMO, 1.0, 50) - solution.prob_W) <= 0.03


def test_quadrature_failure_is_reported():
    try:
        integrate(lambda t: 1.0 / abs(t) if t else 0.0, -1.0, 1.0)
    except QuadratureException as e:
        assert "Quadrature" in str(e)
        return
    assert False, "Expected QuadratureException, but it was not raised"


def test_quadrature_leaves_warning_filters_alone():
    before = list(warnings.filters)

    def failing(_):
        try:
            integrate(lambda t: 1.0 / abs(t) if t else 0.0, -1.0, 1.0)
        except QuadratureException:
            return True
        return False

    with ThreadPoolExecutor(max_workers=4) as pool:
        outcomes = list(pool.map(failing, range(16)))
    assert all(outcomes)
    assert list(warnings.filters) == before
