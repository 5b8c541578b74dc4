"""Preventive-health parameterization of the binary model."""
import dataclasses
import math
from typing import NamedTuple, Tuple

from scipy.special import expit, logit

from src.beliefs import Belief, DecisionProblem, optimal_belief
from src.binary import BinaryPayoffs, mu_B, mu_W
from src.exceptions import ProblemException
from src.logger import init_logger

logger = init_logger()

# relative slack for recognising the ends of the trade-off interval
BOUNDARY_TOLERANCE: float = 1e-12


@dataclasses.dataclass(frozen=True)
class HealthParams:
    """
    Patient deciding whether to adopt a preventive treatment.

    sigma is the severity of the disease, cost the cost of the treatment, alpha
    its efficacy, theta_low and theta_high the two infection risks, and rho the
    patient's self-deception ability. Action 1 (adopt) suits the high-risk state.
    """

    sigma: float
    cost: float
    alpha: float
    theta_low: float
    theta_high: float
    rho: float

    def __post_init__(self):
        if not self.sigma > 0.0:
            raise ProblemException(f"sigma must be > 0, got {self.sigma!r}")
        if not self.cost > 0.0:
            raise ProblemException(f"cost must be > 0, got {self.cost!r}")
        if not 0.0 <= self.alpha <= 1.0:
            raise ProblemException(f"alpha must lie in [0, 1], got {self.alpha!r}")
        if not 0.0 < self.theta_low < self.theta_high < 1.0:
            raise ProblemException(
                f"Need 0 < theta_low < theta_high < 1, got {self.theta_low!r}, {self.theta_high!r}"
            )
        if not (math.isfinite(self.rho) and self.rho > 0.0):
            raise ProblemException(f"rho must be finite and > 0, got {self.rho!r}")

    def payoff(self, action: int, theta: float) -> float:
        """
        Patient's payoff from an action when the infection risk is theta.

        :param action: 1 to adopt the treatment, 0 otherwise.
        :type action: int
        :param theta: Infection risk.
        :type theta: float
        :return: (1 - a)(-sigma theta) + a(-(1 - alpha) theta sigma - cost).
        :rtype: float
        """
        return (1 - action) * (-self.sigma * theta) + action * (
            -(1.0 - self.alpha) * theta * self.sigma - self.cost
        )

    def payoffs(self) -> BinaryPayoffs:
        """The four payoffs in (low risk, high risk) state order."""
        return BinaryPayoffs(
            u_low_0=self.payoff(0, self.theta_low),
            u_high_0=self.payoff(0, self.theta_high),
            u_low_1=self.payoff(1, self.theta_low),
            u_high_1=self.payoff(1, self.theta_high),
        )

    def severity_range(self) -> Tuple[float, float]:
        """
        Severities for which the treatment trade-off holds.

        :return: (cost / (alpha theta_high), cost / (alpha theta_low)).
        :rtype: Tuple[float, float]
        """
        if self.alpha == 0.0:
            raise ProblemException("An ineffective treatment (alpha = 0) has no trade-off range")
        return (
            self.cost / (self.alpha * self.theta_high),
            self.cost / (self.alpha * self.theta_low),
        )

    def replace(self, **changes) -> "HealthParams":
        """Copy with some fields changed."""
        return dataclasses.replace(self, **changes)


class HealthModel(NamedTuple):
    """Payoffs, both thresholds and the decision problem of a health instance."""

    payoffs: BinaryPayoffs
    mu_B: float
    mu_W: float
    problem: DecisionProblem


class AdoptionProbability(NamedTuple):
    """Probability that the optimal campaign gets the treatment adopted."""

    tau_wishful: float
    tau_bayes: float


def _boundary(params: HealthParams) -> int:
    """
    Position of the cost relative to the trade-off interval.

    :return: -1 at the lower end (sigma alpha theta_low = cost), +1 at the upper
        end (sigma alpha theta_high = cost), 0 strictly inside.
    """
    lower = params.sigma * params.alpha * params.theta_low
    upper = params.sigma * params.alpha * params.theta_high
    slack = BOUNDARY_TOLERANCE * params.cost
    if abs(params.cost - lower) <= slack:
        return -1
    if abs(params.cost - upper) <= slack:
        return 1
    if not lower < params.cost < upper:
        raise ProblemException(
            f"Trade-off condition violated: need {lower!r} <= cost <= {upper!r}, got {params.cost!r}"
        )
    return 0


def health_problem(params: HealthParams) -> HealthModel:
    """
    Build the health instance.

    :param params: The parameters; the trade-off condition must hold strictly.
    :type params: HealthParams
    :return: Payoffs, thresholds and decision problem with states (low, high).
    :rtype: HealthModel
    """
    if _boundary(params) != 0:
        raise ProblemException("Trade-off condition must hold strictly for a health problem")
    payoffs = params.payoffs()
    return HealthModel(
        payoffs=payoffs,
        mu_B=mu_B(payoffs),
        mu_W=mu_W(payoffs, params.rho),
        problem=payoffs.to_problem(params.rho),
    )


def health_thresholds(params: HealthParams) -> Tuple[float, float]:
    """
    Bayesian and wishful adoption thresholds on the closed trade-off interval.

    At cost = sigma alpha theta_high even certainty of high risk barely justifies
    adoption, so both thresholds are 1; at cost = sigma alpha theta_low adoption is
    always justified and both are 0.

    :param params: The parameters.
    :type params: HealthParams
    :return: (mu_B, mu_W).
    :rtype: Tuple[float, float]
    """
    position = _boundary(params)
    if position == 1:
        return 1.0, 1.0
    if position == -1:
        return 0.0, 0.0
    payoffs = params.payoffs()
    return mu_B(payoffs), mu_W(payoffs, params.rho)


def health_belief(mu: float, params: HealthParams) -> float:
    """
    Patient's motivated belief in the high-risk state at posterior mu.

    :param mu: Posterior probability of the high-risk state.
    :type mu: float
    :param params: The parameters.
    :type params: HealthParams
    :return: eta(mu) <= mu.
    :rtype: float
    """
    if not 0.0 <= mu <= 1.0:
        raise ProblemException(f"mu must lie in [0, 1], got {mu!r}")
    # same indifference band as the general receiver, ties adopt
    adopts = optimal_belief(health_problem(params).problem, Belief.binary(mu)).action == 1
    spread = params.sigma * (params.theta_high - params.theta_low)
    if not adopts:
        shift = -params.rho * spread
    else:
        shift = -params.rho * (1.0 - params.alpha) * spread
    return float(expit(logit(mu) + shift))


def adoption_probability(mu0: float, params: HealthParams) -> AdoptionProbability:
    """
    Probability of adoption under the optimal campaign for each receiver type.

    :param mu0: Prior probability of the high-risk state.
    :type mu0: float
    :param params: The parameters.
    :type params: HealthParams
    :return: min(1, mu0 / threshold) for the wishful and Bayesian thresholds.
    :rtype: AdoptionProbability
    """
    if not 0.0 < mu0 < 1.0:
        raise ProblemException(f"mu0 must lie in (0, 1), got {mu0!r}")
    bayes, wishful = health_thresholds(params)

    def tau(threshold: float) -> float:
        return 1.0 if threshold <= mu0 else mu0 / threshold

    return AdoptionProbability(tau_wishful=tau(wishful), tau_bayes=tau(bayes))
