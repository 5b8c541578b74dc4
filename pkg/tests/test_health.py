import sys
import unittest
from os import path

import numpy as np

sys.path.append(path.dirname(path.dirname(path.abspath(__file__))))
from src.beliefs import Belief, tilt_belief
from src.binary import binary_belief, optimal_policy
from src.exceptions import ProblemException
from src.finite import BeliefMode, grid_oracle_value, optimal_policy_finite
from src.health import (
    HealthParams,
    adoption_probability,
    health_belief,
    health_problem,
    health_thresholds,
)

DEFAULT = HealthParams(sigma=2.0, cost=0.5, alpha=0.8, theta_low=0.1, theta_high=0.9, rho=2.0)


class TestHealthParams(unittest.TestCase):
    def test_payoffs(self):
        payoffs = DEFAULT.payoffs()
        self.assertAlmostEqual(payoffs.u_low_0, -0.2)
        self.assertAlmostEqual(payoffs.u_high_0, -1.8)
        self.assertAlmostEqual(payoffs.u_low_1, -0.54)
        self.assertAlmostEqual(payoffs.u_high_1, -0.86)

    def test_rejects_invalid_values(self):
        for changes in ({"sigma": 0.0}, {"alpha": 1.5}, {"theta_low": 0.95}, {"rho": -1.0}):
            with self.assertRaises(ProblemException):
                DEFAULT.replace(**changes)

    def test_severity_range(self):
        low, high = DEFAULT.severity_range()
        self.assertAlmostEqual(low, 0.5 / (0.8 * 0.9))
        self.assertAlmostEqual(high, 0.5 / (0.8 * 0.1))


class TestHealthModel(unittest.TestCase):
    def setUp(self):
        self.model = health_problem(DEFAULT)

    def test_thresholds(self):
        self.assertAlmostEqual(self.model.mu_B, 0.265625, delta=1e-9)
        self.assertAlmostEqual(self.model.mu_W, 0.685486, delta=1e-5)

    def test_beliefs_at_wishful_threshold(self):
        at_threshold = Belief.binary(self.model.mu_W)
        not_adopting = tilt_belief(self.model.problem, 0, at_threshold).p[1]
        adopting = tilt_belief(self.model.problem, 1, at_threshold).p[1]
        self.assertAlmostEqual(not_adopting, 0.0815927, delta=1e-5)
        self.assertAlmostEqual(adopting, 0.534719, delta=1e-5)
        self.assertAlmostEqual(health_belief(self.model.mu_W, DEFAULT), adopting, delta=1e-12)

    def test_belief_within_rounding_of_threshold_adopts(self):
        just_below = self.model.mu_W * (1.0 - 1e-13)
        eta, action = binary_belief(self.model.payoffs, DEFAULT.rho, just_below)
        self.assertEqual(action, 1)
        self.assertAlmostEqual(health_belief(just_below, DEFAULT), eta, delta=1e-12)
        self.assertAlmostEqual(health_belief(just_below, DEFAULT), 0.534719, delta=1e-5)

    def test_patient_is_optimistic(self):
        for mu in np.linspace(0.0, 1.0, 21):
            self.assertLessEqual(health_belief(float(mu), DEFAULT), mu + 1e-15)

    def test_wishful_patient_harder_to_persuade(self):
        self.assertGreater(self.model.mu_W, self.model.mu_B)

    def test_trade_off_must_hold_strictly(self):
        low, _ = DEFAULT.severity_range()
        with self.assertRaises(ProblemException):
            health_problem(DEFAULT.replace(sigma=low))
        with self.assertRaises(ProblemException):
            health_problem(DEFAULT.replace(sigma=low / 2.0))


def test_thresholds_at_interval_ends():
    low, high = DEFAULT.severity_range()
    assert health_thresholds(DEFAULT.replace(sigma=low)) == (1.0, 1.0)
    assert health_thresholds(DEFAULT.replace(sigma=high)) == (0.0, 0.0)


def test_adoption_probability_ordering_across_severity():
    for alpha in (1.0, 0.8):
        params = DEFAULT.replace(alpha=alpha)
        low, high = params.severity_range()
        for sigma in np.linspace(low, high, 100):
            tau = adoption_probability(0.3, params.replace(sigma=float(sigma)))
            assert tau.tau_wishful <= tau.tau_bayes + 1e-12
        at_top = adoption_probability(0.3, params.replace(sigma=high))
        assert at_top.tau_wishful == 1.0 and at_top.tau_bayes == 1.0


def test_adoption_probability_invalid_prior():
    try:
        adoption_probability(0.0, DEFAULT)
    except ProblemException as e:
        assert "mu0" in str(e)
        return
    assert False, "Expected ProblemException, but it was not raised"


def test_finite_solver_reproduces_campaign():
    model = health_problem(DEFAULT)
    prior = Belief.prior([0.8, 0.2])
    policy = optimal_policy_finite(model.problem, prior, BeliefMode.WISHFUL)
    support = sorted(float(q.p[1]) for q, w in zip(policy.posteriors, policy.weights) if w > 1e-12)
    assert len(support) == 2
    assert abs(support[0]) <= 1e-10
    assert abs(support[1] - 0.685486) <= 1e-5
    assert abs(policy.value - optimal_policy(0.2, model.mu_W).value) <= 1e-10
    assert abs(policy.value - 0.2 / model.mu_W) <= 1e-10


def test_grid_oracle_on_campaign():
    model = health_problem(DEFAULT)
    oracle = grid_oracle_value(model.problem, Belief.prior([0.8, 0.2]), BeliefMode.WISHFUL, 200)
    assert 0.0 <= 0.2 / model.mu_W - oracle <= 5e-3
