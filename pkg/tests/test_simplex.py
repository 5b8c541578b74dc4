import sys
import unittest
from os import path

import numpy as np
from scipy.optimize import linprog

sys.path.append(path.dirname(path.dirname(path.abspath(__file__))))
from src.exceptions import NumericalException
from src.simplex import DenseSimplex

SEED = 20240229


class TestDenseSimplex(unittest.TestCase):
    def test_small_program(self):
        # max x0 + 2 x1 s.t. x0 + x1 + s = 4, x1 + t = 3
        c = np.array([1.0, 2.0, 0.0, 0.0])
        a_eq = np.array([[1.0, 1.0, 1.0, 0.0], [0.0, 1.0, 0.0, 1.0]])
        result = DenseSimplex(c, a_eq, np.array([4.0, 3.0]), basis=[2, 3]).run_simplex()
        self.assertAlmostEqual(result.value, 7.0)
        np.testing.assert_allclose(result.x, [1.0, 3.0, 0.0, 0.0], atol=1e-12)

    def test_unbounded(self):
        c = np.array([1.0, 0.0])
        a_eq = np.array([[-1.0, 1.0]])
        with self.assertRaises(NumericalException):
            DenseSimplex(c, a_eq, np.array([1.0]), basis=[1]).run_simplex()

    def test_infeasible_start(self):
        with self.assertRaises(NumericalException):
            DenseSimplex(np.zeros(2), np.eye(2), np.array([1.0, -1.0]), basis=[0, 1])

    def test_shape_mismatch(self):
        with self.assertRaises(NumericalException):
            DenseSimplex(np.zeros(3), np.eye(2), np.ones(2), basis=[0, 1])

    def test_degenerate_program_terminates(self):
        # every candidate column passes through the same vertex
        c = np.array([0.0, 0.0, 1.0, 1.0, 1.0])
        a_eq = np.array(
            [
                [1.0, 0.0, 0.5, 0.5, 1.0],
                [0.0, 1.0, 0.5, 0.5, 0.0],
            ]
        )
        result = DenseSimplex(c, a_eq, np.array([0.5, 0.5]), basis=[0, 1]).run_simplex()
        self.assertAlmostEqual(result.value, 1.0)


def test_matches_linprog_on_random_mixtures():
    # Bayes-plausible mixtures: columns are beliefs, rhs the prior, start from the Diracs
    rng = np.random.default_rng(SEED)
    for _ in range(200):
        n, k = 3, 8
        columns = np.hstack([np.eye(n), rng.dirichlet(np.ones(n), size=k).T])
        rewards = np.concatenate([np.zeros(n), rng.uniform(0.0, 1.0, size=k)])
        prior = rng.dirichlet(np.ones(n))
        ours = DenseSimplex(rewards, columns, prior, basis=list(range(n))).run_simplex()
        reference = linprog(-rewards, A_eq=columns, b_eq=prior, bounds=(0, None), method="highs")
        assert reference.status == 0
        assert abs(ours.value + reference.fun) <= 1e-9
        np.testing.assert_allclose(columns @ ours.x, prior, atol=1e-9)
