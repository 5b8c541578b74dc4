"""Two-state, two-action persuasion of a wishful receiver."""
import dataclasses
import math
from enum import Enum
from typing import Optional, Tuple

import numpy as np
from scipy.optimize import bisect
from scipy.special import expit, logit

from src.beliefs import Belief, DecisionProblem, optimal_belief
from src.exceptions import NumericalException, ProblemException
from src.helpers import geometric_grid
from src.logger import init_logger

logger = init_logger()

# below this value of rho * spread the alpha terms switch to their series
ALPHA_SERIES_CUTOFF: float = 1e-4

# geometric scan for the sign change of mu_W - mu_B, in units of 1 / scale
RHO_SCAN_LOW: float = 1e-8
RHO_SCAN_HIGH: float = 1e4
RHO_SCAN_POINTS: int = 64

# the widened scan stops here, in the same units
RHO_SCAN_CEILING: float = 1e12

# beyond rho * gain = 40 the log-gap terms of mu_W are below 1e-17
LOG_GAP_CUTOFF: float = 40.0

# differences below this are treated as unsigned during the scan
SIGN_TOLERANCE: float = 1e-13

PLAUSIBILITY_TOLERANCE: float = 1e-12
FAVORED_TOLERANCE: float = 1e-12

LOW_STATE = "theta_low"
HIGH_STATE = "theta_high"


class Favoredness(Enum):
    """Whether a wishful receiver takes action 1 on a larger set of posteriors."""

    FAVORED = "favored"
    NOT_FAVORED = "not_favored"
    EQUAL = "equal"


class LemmaCase(Enum):
    """Payoff pattern deciding favoredness from u_max and the two variabilities."""

    CASE_I = "i"
    CASE_II = "ii"
    CASE_III = "iii"


class BlackwellOrder(Enum):
    """Informativeness of a first policy relative to a second."""

    MORE_INFORMATIVE = "more_informative"
    LESS_INFORMATIVE = "less_informative"
    EQUAL = "equal"
    INCOMPARABLE = "incomparable"


@dataclasses.dataclass(frozen=True)
class BinaryPayoffs:
    """
    Receiver payoffs of a 2-state, 2-action problem where action 1 suits the high state.

    ``u_low_a`` is the payoff of action ``a`` in the low state and ``u_high_a`` in
    the high state.
    """

    u_low_0: float
    u_high_0: float
    u_low_1: float
    u_high_1: float

    def __post_init__(self):
        """
        Validate the payoffs.

        :raises ProblemException: If a payoff is not finite, or if action 0 is not
            strictly better in the low state and action 1 strictly better in the
            high state.
        """
        values = self.as_tuple()
        if not all(math.isfinite(x) for x in values):
            raise ProblemException(f"Payoffs must be finite: {values}")
        if not self.u_low_0 > self.u_low_1:
            raise ProblemException(
                f"Action 0 must be strictly better in the low state: {values}"
            )
        if not self.u_high_1 > self.u_high_0:
            raise ProblemException(
                f"Action 1 must be strictly better in the high state: {values}"
            )

    def as_tuple(self) -> Tuple[float, float, float, float]:
        """Payoffs in the order (u_low_0, u_high_0, u_low_1, u_high_1)."""
        return (self.u_low_0, self.u_high_0, self.u_low_1, self.u_high_1)

    @property
    def var0(self) -> float:
        """Payoff variability of action 0."""
        return self.u_low_0 - self.u_high_0

    @property
    def var1(self) -> float:
        """Payoff variability of action 1."""
        return self.u_high_1 - self.u_low_1

    @property
    def u_max(self) -> float:
        """Gap between the best payoffs of action 0 and action 1."""
        return self.u_low_0 - self.u_high_1

    @property
    def low_gain(self) -> float:
        """Loss from action 1 in the low state."""
        return self.u_low_0 - self.u_low_1

    @property
    def high_gain(self) -> float:
        """Gain from action 1 in the high state."""
        return self.u_high_1 - self.u_high_0

    @property
    def scale(self) -> float:
        """Payoff scale used to bound the rho search; unchanged by translation."""
        return max(abs(self.var0), abs(self.var1), self.low_gain, self.high_gain, abs(self.u_max))

    @property
    def matches_state_strictly(self) -> bool:
        """True when the cross-state inequalities u_high_1 > u_low_1 and u_low_0 > u_high_0 hold too."""
        return (
            self.u_high_1 > self.u_low_1
            and self.u_low_0 > self.u_high_0
            and self.u_low_0 > self.u_low_1
            and self.u_high_1 > self.u_high_0
        )

    def to_problem(self, rho: float) -> DecisionProblem:
        """
        Embed the payoffs in a decision problem with sender payoff v(a) = a.

        :param rho: Self-deception ability.
        :type rho: float
        :return: States (low, high), actions (0, 1).
        :rtype: DecisionProblem
        """
        return DecisionProblem(
            states=(LOW_STATE, HIGH_STATE),
            actions=(0, 1),
            u=np.array([[self.u_low_0, self.u_high_0], [self.u_low_1, self.u_high_1]]),
            v=np.array([0.0, 1.0]),
            rho=rho,
        )

    @classmethod
    def from_problem(cls, problem: DecisionProblem) -> "BinaryPayoffs":
        """
        Read the payoffs of a 2x2 decision problem.

        :param problem: Problem with two states (low, high) and two actions (0, 1).
        :type problem: DecisionProblem
        :return: The payoffs.
        :rtype: BinaryPayoffs
        """
        if problem.u.shape != (2, 2):
            raise ProblemException(f"Expected a 2x2 problem, got {problem.u.shape}")
        return cls(
            float(problem.u[0, 0]),
            float(problem.u[0, 1]),
            float(problem.u[1, 0]),
            float(problem.u[1, 1]),
        )

    def translated(self, shift: float) -> "BinaryPayoffs":
        """Add a constant to all four payoffs."""
        return BinaryPayoffs(*(x + shift for x in self.as_tuple()))

    def scaled(self, factor: float) -> "BinaryPayoffs":
        """Multiply all four payoffs by a positive constant."""
        return BinaryPayoffs(*(x * factor for x in self.as_tuple()))


@dataclasses.dataclass(frozen=True)
class ThresholdPolicy:
    """Information policy supported on the posteriors {low, high}."""

    low: float
    high: float
    weight_high: float
    value: float
    mu0: float

    def __post_init__(self):
        """Check Bayes plausibility against the prior."""
        mean = self.weight_high * self.high + (1.0 - self.weight_high) * self.low
        if abs(mean - self.mu0) > PLAUSIBILITY_TOLERANCE:
            raise NumericalException(
                f"Policy is not Bayes plausible: mean {mean!r} vs prior {self.mu0!r}"
            )

    @property
    def discloses(self) -> bool:
        """False for the no-disclosure policy."""
        return self.weight_high < 1.0


@dataclasses.dataclass(frozen=True)
class FavoredReport:
    """Favoredness of action 1 at a given rho, with the payoff pattern and rho threshold."""

    favored: Favoredness
    lemma_case: Optional[LemmaCase]
    mu_B: float
    mu_W: float
    rho_bar: Optional[float]


def _check_rho(rho: float) -> None:
    if not (math.isfinite(rho) and rho > 0.0):
        raise ProblemException(f"rho must be finite and > 0, got {rho!r}")


def _log_gap(x: float) -> float:
    """ln(1 - exp(-x)) for x > 0."""
    return math.log(-math.expm1(-x))


def mu_B(p: BinaryPayoffs) -> float:
    """
    Bayesian threshold: smallest posterior on the high state at which action 1 is taken.

    :param p: The payoffs.
    :type p: BinaryPayoffs
    :return: The threshold in (0, 1).
    :rtype: float
    """
    return p.low_gain / (p.low_gain + p.high_gain)


def mu_W(p: BinaryPayoffs, rho: float) -> float:
    """
    Wishful threshold at self-deception ability rho.

    The ratio of exponential differences is evaluated in logs so that neither
    large nor tiny rho loses precision.

    :param p: The payoffs.
    :type p: BinaryPayoffs
    :param rho: Self-deception ability.
    :type rho: float
    :return: The threshold in (0, 1).
    :rtype: float
    """
    _check_rho(rho)
    z = rho * p.u_max + _log_gap(rho * p.low_gain) - _log_gap(rho * p.high_gain)
    return float(expit(z))


def mu_W_limit(p: BinaryPayoffs) -> float:
    """
    Limit of the wishful threshold as rho grows without bound.

    :param p: The payoffs.
    :type p: BinaryPayoffs
    :return: 1 if u_max > 0, 0 if u_max < 0, 1/2 otherwise.
    :rtype: float
    """
    if p.u_max > 0.0:
        return 1.0
    if p.u_max < 0.0:
        return 0.0
    return 0.5


def _tilt_gain(spread: float, rho: float) -> float:
    """h(rho * spread) / rho with h(x) = x / (1 - exp(-x))."""
    x = rho * spread
    return spread / -math.expm1(-x)


def alpha(p: BinaryPayoffs, rho: float) -> float:
    """
    Coefficient of the logistic equation d mu_W / d rho = alpha mu_W (1 - mu_W).

    :param p: The payoffs.
    :type p: BinaryPayoffs
    :param rho: Self-deception ability.
    :type rho: float
    :return: alpha(rho).
    :rtype: float
    """
    _check_rho(rho)
    d, e = p.low_gain, p.high_gain
    if rho * max(d, e) < ALPHA_SERIES_CUTOFF:
        return (p.u_low_1 - p.u_high_0) + (d - e) / 2.0 + rho * (d * d - e * e) / 12.0
    return (p.u_low_1 - p.u_high_0) + _tilt_gain(d, rho) - _tilt_gain(e, rho)


def alpha_derivative(p: BinaryPayoffs, rho: float) -> float:
    """
    Closed-form derivative of alpha in rho.

    Uses d^2 exp(-x) / (1 - exp(-x))^2 = d^2 / (2 (cosh x - 1)) with x = rho d,
    which stays finite for large x.

    :param p: The payoffs.
    :type p: BinaryPayoffs
    :param rho: Self-deception ability.
    :type rho: float
    :return: alpha'(rho).
    :rtype: float
    """
    _check_rho(rho)

    def term(spread: float) -> float:
        x = rho * spread
        return spread * spread * math.exp(-x) / math.expm1(-x) ** 2

    return term(p.high_gain) - term(p.low_gain)


def lemma_case(p: BinaryPayoffs) -> Optional[LemmaCase]:
    """
    Payoff pattern of the favoredness lemma, or None on its boundaries.

    :param p: The payoffs.
    :type p: BinaryPayoffs
    :return: The matching case.
    :rtype: Optional[LemmaCase]
    """
    if p.u_max <= 0.0 and p.var0 < p.var1:
        return LemmaCase.CASE_I
    if p.u_max < 0.0 and p.var0 > p.var1:
        return LemmaCase.CASE_II
    if p.u_max > 0.0 and p.var0 < p.var1:
        return LemmaCase.CASE_III
    return None


def _first_sign_change(gap, grid: np.ndarray) -> Optional[Tuple[float, float]]:
    signed = [(float(rho), gap(float(rho))) for rho in grid]
    signed = [(rho, g) for rho, g in signed if abs(g) > SIGN_TOLERANCE]
    for (left, g_left), (right, g_right) in zip(signed, signed[1:]):
        if g_left * g_right < 0.0:
            return left, right
    return None


def _crossing_reach(p: BinaryPayoffs, threshold: float) -> Optional[float]:
    """Rho past which mu_W - mu_B has the sign of u_max, or None when out of range."""
    if p.u_max == 0.0:
        return None
    reach = 2.0 * max(
        (abs(float(logit(threshold))) + 1.0) / abs(p.u_max),
        LOG_GAP_CUTOFF / min(p.low_gain, p.high_gain),
    )
    if not reach <= RHO_SCAN_CEILING / p.scale:
        return None
    return reach


def rho_bar(p: BinaryPayoffs) -> Optional[float]:
    """
    Rho at which the wishful threshold crosses the Bayesian one.

    Scans a geometric grid over (1e-8, 1e4) / scale for a sign change of
    mu_W - mu_B and refines the first one by bisection. When that range holds no
    sign change, the scan is widened up to the rho where rho * u_max outweighs
    every other term of the wishful log-odds.

    :param p: The payoffs.
    :type p: BinaryPayoffs
    :raises NumericalException: If the payoff pattern predicts a crossing but the
        scan finds no bracket.
    :return: The crossing, or None when the thresholds never cross.
    :rtype: Optional[float]
    """
    threshold = mu_B(p)

    def gap(rho: float) -> float:
        return mu_W(p, rho) - threshold

    grid = geometric_grid(RHO_SCAN_LOW / p.scale, RHO_SCAN_HIGH / p.scale, RHO_SCAN_POINTS)
    bracket = _first_sign_change(gap, grid)
    if bracket is None:
        reach = _crossing_reach(p, threshold)
        if reach is not None and reach > grid[-1]:
            logger.debug("Widening the rho_bar scan for %s up to %.6g", p.as_tuple(), reach)
            bracket = _first_sign_change(
                gap, geometric_grid(float(grid[-1]), reach, RHO_SCAN_POINTS)
            )

    if bracket is not None:
        root = bisect(gap, bracket[0], bracket[1], xtol=1e-10, rtol=1e-10)
        logger.debug("rho_bar for %s found at %.12g", p.as_tuple(), root)
        return float(root)

    if lemma_case(p) in (LemmaCase.CASE_II, LemmaCase.CASE_III):
        raise NumericalException(
            f"No crossing of mu_W and mu_B bracketed for payoffs {p.as_tuple()}"
        )
    return None


def classify_favored(
    p: BinaryPayoffs, rho: float, locate_crossing: bool = True
) -> FavoredReport:
    """
    Decide whether a wishful receiver takes action 1 more often than a Bayesian one.

    The verdict compares the two thresholds at ``rho`` only. A crossing that
    cannot be bracketed is logged and reported as None.

    :param p: The payoffs.
    :type p: BinaryPayoffs
    :param rho: Self-deception ability.
    :type rho: float
    :param locate_crossing: Whether to search for rho_bar at all.
    :type locate_crossing: bool
    :return: The report.
    :rtype: FavoredReport
    """
    bayes = mu_B(p)
    wishful = mu_W(p, rho)
    if wishful < bayes - FAVORED_TOLERANCE:
        favored = Favoredness.FAVORED
    elif wishful > bayes + FAVORED_TOLERANCE:
        favored = Favoredness.NOT_FAVORED
    else:
        favored = Favoredness.EQUAL

    crossing = None
    if locate_crossing:
        try:
            crossing = rho_bar(p)
        except NumericalException as e:
            logger.warning("%s, reporting rho_bar as unknown", e)
    return FavoredReport(
        favored=favored,
        lemma_case=lemma_case(p),
        mu_B=bayes,
        mu_W=wishful,
        rho_bar=crossing,
    )


def optimal_policy(mu0: float, threshold: float) -> ThresholdPolicy:
    """
    Sender-optimal policy when action 1 is taken at posteriors >= threshold.

    :param mu0: Prior probability of the high state.
    :type mu0: float
    :param threshold: Receiver's threshold.
    :type threshold: float
    :return: No disclosure when mu0 >= threshold, else the split {0, threshold}.
    :rtype: ThresholdPolicy
    """
    if not 0.0 < mu0 < 1.0:
        raise ProblemException(f"mu0 must lie in (0, 1), got {mu0!r}")
    if not 0.0 < threshold < 1.0:
        raise ProblemException(f"threshold must lie in (0, 1), got {threshold!r}")

    if mu0 >= threshold:
        return ThresholdPolicy(low=0.0, high=mu0, weight_high=1.0, value=1.0, mu0=mu0)
    weight = mu0 / threshold
    return ThresholdPolicy(low=0.0, high=threshold, weight_high=weight, value=weight, mu0=mu0)


def sender_values(
    p: BinaryPayoffs, rho: float, mu0: float
) -> Tuple[ThresholdPolicy, ThresholdPolicy]:
    """
    Optimal policies against a Bayesian and a wishful receiver.

    :param p: The payoffs.
    :type p: BinaryPayoffs
    :param rho: Self-deception ability.
    :type rho: float
    :param mu0: Prior probability of the high state.
    :type mu0: float
    :return: (Bayesian policy, wishful policy).
    :rtype: Tuple[ThresholdPolicy, ThresholdPolicy]
    """
    return optimal_policy(mu0, mu_B(p)), optimal_policy(mu0, mu_W(p, rho))


def blackwell_compare(first: ThresholdPolicy, second: ThresholdPolicy) -> BlackwellOrder:
    """
    Compare two threshold policies in the Blackwell order.

    With a common low posterior 0, the policy with the larger high posterior has a
    support whose convex hull contains the other's support.

    :param first: The first policy.
    :type first: ThresholdPolicy
    :param second: The second policy.
    :type second: ThresholdPolicy
    :return: Order of ``first`` relative to ``second``.
    :rtype: BlackwellOrder
    """
    if first.low != 0.0 or second.low != 0.0:
        raise ProblemException("Both policies must have low posterior 0")
    if abs(first.high - second.high) <= PLAUSIBILITY_TOLERANCE:
        return BlackwellOrder.EQUAL
    if first.high > second.high:
        return BlackwellOrder.MORE_INFORMATIVE
    return BlackwellOrder.LESS_INFORMATIVE


def binary_belief(p: BinaryPayoffs, rho: float, mu: float) -> Tuple[float, int]:
    """
    Motivated belief on the high state and the action taken at posterior mu.

    :param p: The payoffs.
    :type p: BinaryPayoffs
    :param rho: Self-deception ability.
    :type rho: float
    :param mu: Posterior probability of the high state.
    :type mu: float
    :return: (eta, action).
    :rtype: Tuple[float, int]
    """
    outcome = optimal_belief(p.to_problem(rho), Belief.binary(mu))
    return float(outcome.belief.p[1]), int(outcome.action)
