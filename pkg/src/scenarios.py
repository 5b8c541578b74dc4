"""Scenario definitions: build the models from parameters and tabulate their outputs."""
import math
from typing import Any, Dict, List, Optional, Tuple, Type

import numpy as np

from src.beliefs import Belief, DecisionProblem, tilt_belief
from src.binary import (
    BinaryPayoffs,
    alpha,
    alpha_derivative,
    binary_belief,
    blackwell_compare,
    classify_favored,
    optimal_policy,
    sender_values,
)
from src.exceptions import ProblemException
from src.finite import (
    ORACLE_MAX_POINTS,
    ORACLE_MAX_STATES,
    BeliefMode,
    action_polytope,
    grid_oracle_value,
    is_favored,
    optimal_policy_finite,
)
from src.health import (
    HealthParams,
    adoption_probability,
    health_belief,
    health_problem,
    health_thresholds,
)
from src.helpers import Cell
from src.investor import (
    ReturnPrior,
    discrete_investment_probability,
    exp_moment,
    prior_mean,
    solve_investor,
    trunc_exp_mean,
    trunc_mean,
)
from src.logger import init_logger
from src.output import Row
from src.voting import (
    electorate_from_betas,
    election_outcome,
    optimal_public_policy,
    polarization,
    polarization_argmax,
    polarization_curve,
    voter_threshold,
)

logger = init_logger()

Parameters = Dict[str, Any]


def _check_grid(parameters: Parameters, key: str = "grid_points") -> None:
    if parameters[key] < 2:
        raise ProblemException(f"{key} must be >= 2, got {parameters[key]}")


def _check_prior(mu0: float) -> None:
    if not 0.0 < mu0 < 1.0:
        raise ProblemException(f"mu0 must lie in (0, 1), got {mu0!r}")


class Scenario:
    """
    Base class of the scenarios run by the CLI.

    A run emits a table whose first column is ``record`` and last is ``value``:
    curve rows fill the middle columns, summary rows only carry a name and a value.
    A sweep point emits the ``sweep_outputs`` columns for one parameter map.
    """

    name: str = ""
    run_columns: Tuple[str, ...] = ("record", "value")
    sweep_outputs: Tuple[str, ...] = ()

    def __init__(self, parameters: Parameters):
        """
        Initialize the Scenario instance.

        :param parameters: Fully resolved parameters of the scenario.
        :type parameters: Parameters
        """
        self.parameters = parameters

    def columns(self) -> List[str]:
        """Header of the run table."""
        return list(self.run_columns)

    def validate(self, parameters: Parameters) -> None:
        """Build the run models once; raises ProblemException on bad input."""
        raise NotImplementedError

    def validate_point(self, parameters: Parameters) -> None:
        """Build the models of one sweep point."""
        self.validate(parameters)

    def run_rows(self) -> List[Row]:
        """Rows of the run table."""
        raise NotImplementedError

    def sweep_point(self, parameters: Parameters) -> Row:
        """Sweep outputs at one parameter map."""
        raise NotImplementedError

    def sweep_range(
        self, parameter: str, start: Optional[float], stop: Optional[float], parameters: Parameters
    ) -> Tuple[float, float]:
        """Sweep interval; scenarios with a model-provided range fill in missing ends."""
        return start, stop

    def _summary(self, pairs: List[Tuple[str, Cell]]) -> List[Row]:
        blanks = [None] * (len(self.columns()) - 2)
        return [[name, *blanks, value] for name, value in pairs]


class BinaryScenario(Scenario):
    """Two-state, two-action receiver described by its four payoffs."""

    name = "binary"
    run_columns = ("record", "mu", "eta", "action", "value")
    sweep_outputs = ("mu_B", "mu_W", "alpha", "favored", "value_bayes", "value_wishful")

    @staticmethod
    def _payoffs(parameters: Parameters) -> BinaryPayoffs:
        values = parameters["payoffs"]
        if len(values) != 4:
            raise ProblemException(
                f"payoffs needs 4 values (u_low_0, u_high_0, u_low_1, u_high_1), got {values}"
            )
        return BinaryPayoffs(*values)

    def validate(self, parameters: Parameters) -> None:
        payoffs = self._payoffs(parameters)
        payoffs.to_problem(parameters["rho"])
        _check_prior(parameters["mu0"])
        _check_grid(parameters)

    def run_rows(self) -> List[Row]:
        parameters = self.parameters
        payoffs, rho = self._payoffs(parameters), parameters["rho"]

        rows: List[Row] = []
        for mu in np.linspace(0.0, 1.0, parameters["grid_points"]):
            eta, action = binary_belief(payoffs, rho, float(mu))
            rows.append(["curve", float(mu), eta, action, None])

        report = classify_favored(payoffs, rho)
        bayes, wishful = sender_values(payoffs, rho, parameters["mu0"])
        rows.extend(
            self._summary(
                [
                    ("mu_B", report.mu_B),
                    ("mu_W", report.mu_W),
                    ("alpha", alpha(payoffs, rho)),
                    ("alpha_derivative", alpha_derivative(payoffs, rho)),
                    ("rho_bar", report.rho_bar),
                    ("lemma_case", None if report.lemma_case is None else report.lemma_case.value),
                    ("favored", report.favored.value),
                    ("value_bayes", bayes.value),
                    ("value_wishful", wishful.value),
                    ("high_bayes", bayes.high),
                    ("high_wishful", wishful.high),
                    ("blackwell_wishful_vs_bayes", blackwell_compare(wishful, bayes).value),
                ]
            )
        )
        return rows

    def sweep_point(self, parameters: Parameters) -> Row:
        payoffs, rho = self._payoffs(parameters), parameters["rho"]
        report = classify_favored(payoffs, rho)
        bayes, wishful = sender_values(payoffs, rho, parameters["mu0"])
        return [
            report.mu_B,
            report.mu_W,
            alpha(payoffs, rho),
            report.favored.value,
            bayes.value,
            wishful.value,
        ]


class HealthScenario(Scenario):
    """Patient deciding on a preventive treatment."""

    name = "health"
    run_columns = ("record", "mu", "eta", "action", "value")
    sweep_outputs = ("mu_B", "mu_W", "tau_B", "tau_W")

    @staticmethod
    def _params(parameters: Parameters) -> HealthParams:
        return HealthParams(
            sigma=parameters["sigma"],
            cost=parameters["cost"],
            alpha=parameters["alpha"],
            theta_low=parameters["theta_low"],
            theta_high=parameters["theta_high"],
            rho=parameters["rho"],
        )

    def validate(self, parameters: Parameters) -> None:
        health_problem(self._params(parameters))
        _check_prior(parameters["mu0"])
        _check_grid(parameters)

    def validate_point(self, parameters: Parameters) -> None:
        health_thresholds(self._params(parameters))
        _check_prior(parameters["mu0"])

    def run_rows(self) -> List[Row]:
        parameters = self.parameters
        params = self._params(parameters)
        model = health_problem(params)

        rows: List[Row] = []
        for mu in np.linspace(0.0, 1.0, parameters["grid_points"]):
            mu = float(mu)
            rows.append(["curve", mu, health_belief(mu, params), int(mu >= model.mu_W), None])

        at_threshold = Belief.binary(model.mu_W)
        adoption = adoption_probability(parameters["mu0"], params)
        bayes = optimal_policy(parameters["mu0"], model.mu_B)
        wishful = optimal_policy(parameters["mu0"], model.mu_W)
        low, high = params.severity_range()
        rows.extend(
            self._summary(
                [
                    ("mu_B", model.mu_B),
                    ("mu_W", model.mu_W),
                    ("eta_at_mu_W_action_0", float(tilt_belief(model.problem, 0, at_threshold).p[1])),
                    ("eta_at_mu_W_action_1", float(tilt_belief(model.problem, 1, at_threshold).p[1])),
                    ("tau_B", adoption.tau_bayes),
                    ("tau_W", adoption.tau_wishful),
                    ("blackwell_wishful_vs_bayes", blackwell_compare(wishful, bayes).value),
                    ("sigma_low", low),
                    ("sigma_high", high),
                ]
            )
        )
        return rows

    def sweep_point(self, parameters: Parameters) -> Row:
        params = self._params(parameters)
        bayes, wishful = health_thresholds(params)
        adoption = adoption_probability(parameters["mu0"], params)
        return [bayes, wishful, adoption.tau_bayes, adoption.tau_wishful]

    def sweep_range(
        self, parameter: str, start: Optional[float], stop: Optional[float], parameters: Parameters
    ) -> Tuple[float, float]:
        if parameter != "sigma" or (start is not None and stop is not None):
            return start, stop
        low, high = self._params(parameters).severity_range()
        return (low if start is None else start), (high if stop is None else stop)


class VotingScenario(Scenario):
    """Electorate persuaded by a public signal."""

    name = "voting"
    run_columns = ("record", "voter", "beta", "mu", "threshold", "belief", "vote", "value")
    sweep_outputs = ("polarization", "votes_for", "passes")

    def validate(self, parameters: Parameters) -> None:
        electorate = electorate_from_betas(parameters["betas"], parameters["rho"])
        for beta in electorate.betas:
            voter_threshold(beta, electorate.rho)
        if not 0.0 <= parameters["mu"] <= 1.0:
            raise ProblemException(f"mu must lie in [0, 1], got {parameters['mu']!r}")
        _check_prior(parameters["mu0"])
        _check_grid(parameters)

    def run_rows(self) -> List[Row]:
        parameters = self.parameters
        electorate = electorate_from_betas(parameters["betas"], parameters["rho"])
        mu = parameters["mu"]
        profile = polarization(mu, electorate)
        outcome = election_outcome(mu, electorate)

        rows: List[Row] = []
        for index, (beta, belief, vote) in enumerate(
            zip(electorate.betas, profile.beliefs, outcome.votes), start=1
        ):
            threshold = voter_threshold(beta, electorate.rho)
            rows.append(["voter", index, beta, mu, threshold, belief, vote, None])

        grid, values = polarization_curve(electorate, parameters["grid_points"])
        rows.extend(
            ["curve", None, None, float(x), None, None, None, float(pi)]
            for x, pi in zip(grid, values)
        )

        policy = optimal_public_policy(parameters["mu0"], electorate)
        rows.extend(
            self._summary(
                [
                    ("polarization", profile.pi),
                    ("polarization_argmax", polarization_argmax(electorate)),
                    ("votes_for", sum(outcome.votes)),
                    ("passes", outcome.passes),
                    ("symmetric", electorate.symmetric),
                    ("policy_high", policy.high),
                    ("policy_weight_high", policy.weight_high),
                    ("policy_value", policy.value),
                ]
            )
        )
        return rows

    def sweep_point(self, parameters: Parameters) -> Row:
        electorate = electorate_from_betas(parameters["betas"], parameters["rho"])
        profile = polarization(parameters["mu"], electorate)
        outcome = election_outcome(parameters["mu"], electorate)
        return [profile.pi, sum(outcome.votes), outcome.passes]


class FiniteScenario(Scenario):
    """Finitely many states, two actions, sender paid 1 for action 1."""

    name = "finite"
    sweep_outputs = ("value_bayesian", "value_wishful", "is_favored")

    def _labels(self) -> List[str]:
        return [f"s{i}" for i in range(len(self.parameters["utilities"][0]))]

    def columns(self) -> List[str]:
        return ["record", "mode", "weight", *[f"p_{label}" for label in self._labels()], "value"]

    @staticmethod
    def _problem(parameters: Parameters) -> DecisionProblem:
        utilities = np.asarray(parameters["utilities"], dtype=float)
        if utilities.shape[0] != 2:
            raise ProblemException(
                f"utilities needs one row per action (2 rows), got {utilities.shape[0]}"
            )
        return DecisionProblem(
            states=tuple(f"s{i}" for i in range(utilities.shape[1])),
            actions=(0, 1),
            u=utilities,
            v=np.array([0.0, 1.0]),
            rho=parameters["rho"],
        )

    def _oracle_enabled(self, problem: DecisionProblem) -> bool:
        return problem.n_states <= ORACLE_MAX_STATES

    def validate(self, parameters: Parameters) -> None:
        problem = self._problem(parameters)
        problem.check_belief(Belief.prior(parameters["mu0"]))
        resolution = parameters["oracle_resolution"]
        if resolution < 1:
            raise ProblemException(f"oracle_resolution must be >= 1, got {resolution}")
        if self._oracle_enabled(problem):
            points = math.comb(resolution + problem.n_states - 1, problem.n_states - 1)
            if points > ORACLE_MAX_POINTS:
                raise ProblemException(
                    f"oracle_resolution {resolution} gives {points} grid points, "
                    f"limit is {ORACLE_MAX_POINTS}"
                )

    def run_rows(self) -> List[Row]:
        parameters = self.parameters
        problem = self._problem(parameters)
        mu0 = Belief.prior(parameters["mu0"])
        blanks = [None] * problem.n_states

        rows: List[Row] = []
        for mode in BeliefMode:
            for vertex in action_polytope(problem, mode).vertices:
                rows.append(["vertex", mode.value, None, *vertex.p.tolist(), None])
            policy = optimal_policy_finite(problem, mu0, mode)
            for posterior, weight in zip(policy.posteriors, policy.weights):
                rows.append(["posterior", mode.value, float(weight), *posterior.p.tolist(), None])
            rows.append(["value", mode.value, None, *blanks, policy.value])
            if self._oracle_enabled(problem):
                oracle = grid_oracle_value(problem, mu0, mode, parameters["oracle_resolution"])
                if oracle > policy.value + 1e-9:
                    logger.warning(
                        "Grid oracle %.9f beats the %s LP value %.9f", oracle, mode.value, policy.value
                    )
                rows.append(["oracle_value", mode.value, None, *blanks, oracle])

        verdict = is_favored(problem)
        rows.append(["is_favored", None, None, *blanks, verdict.favored])
        for (first, second), report in verdict.pairs.items():
            rows.append([f"pair:{first}-{second}", None, None, *blanks, report.favored.value])
        return rows

    def sweep_point(self, parameters: Parameters) -> Row:
        problem = self._problem(parameters)
        mu0 = Belief.prior(parameters["mu0"])
        return [
            optimal_policy_finite(problem, mu0, BeliefMode.BAYESIAN).value,
            optimal_policy_finite(problem, mu0, BeliefMode.WISHFUL).value,
            is_favored(problem).favored,
        ]


class InvestorScenario(Scenario):
    """Investor deciding whether to buy an asset with a continuous return."""

    name = "investor"
    run_columns = ("record", "z", "phi", "psi", "value")
    sweep_outputs = ("theta_B", "theta_W", "prob_B", "prob_W")

    def validate(self, parameters: Parameters) -> None:
        prior = ReturnPrior.from_dict(parameters["prior"])
        rho = parameters["rho"]
        if not (math.isfinite(rho) and rho > 0.0):
            raise ProblemException(f"rho must be finite and > 0, got {rho!r}")
        if prior_mean(prior) >= 0.0:
            raise ProblemException("prior violates m_hat < 0 assumption")
        if exp_moment(prior, rho) >= 1.0:
            raise ProblemException("wishful investor already invests at prior")
        if parameters["atoms"] < 2:
            raise ProblemException(f"atoms must be >= 2, got {parameters['atoms']}")
        _check_grid(parameters)

    def run_rows(self) -> List[Row]:
        parameters = self.parameters
        prior = ReturnPrior.from_dict(parameters["prior"])
        rho = parameters["rho"]

        rows: List[Row] = []
        for z in np.linspace(prior.theta_low, prior.theta_high, parameters["grid_points"]):
            z = float(z)
            rows.append(["curve", z, trunc_mean(prior, z), trunc_exp_mean(prior, z, rho), None])

        solution = solve_investor(prior, rho)
        rows.extend(
            self._summary(
                [
                    ("x_hat", solution.x_hat),
                    ("m_hat", solution.m_hat),
                    ("theta_B", solution.theta_B),
                    ("theta_W", solution.theta_W),
                    ("prob_B", solution.prob_B),
                    ("prob_W", solution.prob_W),
                    (
                        "discrete_prob_W",
                        discrete_investment_probability(prior, rho, parameters["atoms"]),
                    ),
                ]
            )
        )
        return rows

    def sweep_point(self, parameters: Parameters) -> Row:
        solution = solve_investor(ReturnPrior.from_dict(parameters["prior"]), parameters["rho"])
        return [solution.theta_B, solution.theta_W, solution.prob_B, solution.prob_W]


SCENARIOS: Dict[str, Type[Scenario]] = {
    scenario.name: scenario
    for scenario in (
        BinaryScenario,
        HealthScenario,
        VotingScenario,
        FiniteScenario,
        InvestorScenario,
    )
}
