"""Public persuasion of a wishful electorate and belief polarization."""
import dataclasses
import math
from typing import NamedTuple, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import expit, logit

from src.binary import BinaryPayoffs, ThresholdPolicy, mu_W, optimal_policy
from src.exceptions import NumericalException, ProblemException
from src.logger import init_logger

logger = init_logger()

SYMMETRY_TOLERANCE: float = 1e-12
FORMULA_TOLERANCE: float = 1e-10

ARGMAX_GRID_POINTS: int = 10_001


@dataclasses.dataclass(frozen=True)
class Electorate:
    """
    Odd number of voters with partisan preferences sorted ascending.

    Voter i supports the proposal (x = 1) with payoff beta_i when it is good and
    opposes it with payoff 1 - beta_i when it is bad; rho is shared by all voters.
    """

    betas: Tuple[float, ...]
    rho: float

    def __post_init__(self):
        betas = tuple(float(b) for b in self.betas)
        if len(betas) < 3 or len(betas) % 2 == 0:
            raise ProblemException(f"Need an odd number (>= 3) of voters, got {len(betas)}")
        if any(not 0.0 <= b <= 1.0 for b in betas):
            raise ProblemException(f"Partisan preferences must lie in [0, 1]: {betas}")
        if list(betas) != sorted(betas):
            raise ProblemException(f"Partisan preferences must be sorted ascending: {betas}")
        if not (math.isfinite(self.rho) and self.rho > 0.0):
            raise ProblemException(f"rho must be finite and > 0, got {self.rho!r}")
        object.__setattr__(self, "betas", betas)

    @property
    def size(self) -> int:
        """Number of voters."""
        return len(self.betas)

    @property
    def median_index(self) -> int:
        """Zero-based position of the median voter."""
        return self.size // 2

    @property
    def median_beta(self) -> float:
        """Partisan preference of the median voter."""
        return self.betas[self.median_index]

    @property
    def symmetric(self) -> bool:
        """True when beta_i + beta_(n+1-i) = 1 for every voter."""
        return all(
            abs(low + high - 1.0) <= SYMMETRY_TOLERANCE
            for low, high in zip(self.betas, reversed(self.betas))
        )


@dataclasses.dataclass(frozen=True)
class PolarizationProfile:
    """Every voter's motivated belief at a common posterior and the polarization index."""

    mu: float
    beliefs: Tuple[float, ...]
    pi: float


class ElectionOutcome(NamedTuple):
    """Votes in electorate order and whether the proposal passes."""

    votes: Tuple[int, ...]
    passes: bool


def _check_beta(beta: float) -> None:
    if not 0.0 < beta < 1.0:
        raise ProblemException(
            f"beta = {beta!r}: at 0 or 1 one action pays nothing in either state, "
            "so the voter has no threshold"
        )


def voter_payoffs(beta: float) -> BinaryPayoffs:
    """
    Payoffs of a voter in the states (bad, good) for the actions (against, for).

    :param beta: Partisan preference in (0, 1).
    :type beta: float
    :return: u(x, theta) = x theta beta + (1 - x)(1 - theta)(1 - beta).
    :rtype: BinaryPayoffs
    """
    _check_beta(beta)
    return BinaryPayoffs(u_low_0=1.0 - beta, u_high_0=0.0, u_low_1=0.0, u_high_1=beta)


def voter_threshold(beta: float, rho: float) -> float:
    """
    Smallest posterior at which a voter supports the proposal.

    :param beta: Partisan preference in (0, 1).
    :type beta: float
    :param rho: Self-deception ability.
    :type rho: float
    :return: The wishful threshold, 1/2 at beta = 1/2.
    :rtype: float
    """
    return mu_W(voter_payoffs(beta), rho)


def _beliefs(mu: np.ndarray, beta: float, rho: float) -> np.ndarray:
    threshold = voter_threshold(beta, rho)
    with np.errstate(divide="ignore"):
        odds = logit(mu)
    return np.where(mu >= threshold, expit(odds + rho * beta), expit(odds - rho * (1.0 - beta)))


def voter_belief(mu: float, beta: float, rho: float) -> float:
    """
    Voter's motivated belief that the proposal is good.

    :param mu: Common posterior in [0, 1].
    :type mu: float
    :param beta: Partisan preference in (0, 1).
    :type beta: float
    :param rho: Self-deception ability.
    :type rho: float
    :return: The belief, tilted up when the voter supports the proposal.
    :rtype: float
    """
    if not 0.0 <= mu <= 1.0:
        raise ProblemException(f"mu must lie in [0, 1], got {mu!r}")
    return float(_beliefs(np.array([mu]), beta, rho)[0])


def pair_distance(mu: float, beta_high: float, rho: float) -> float:
    """
    Belief gap within a symmetric pair of voters.

    :param mu: Common posterior.
    :type mu: float
    :param beta_high: Preference of the voter leaning for the proposal.
    :type beta_high: float
    :param rho: Self-deception ability.
    :type rho: float
    :return: eta(mu, beta_high) - eta(mu, 1 - beta_high).
    :rtype: float
    """
    return voter_belief(mu, beta_high, rho) - voter_belief(mu, 1.0 - beta_high, rho)


def _belief_matrix(mu: np.ndarray, electorate: Electorate) -> np.ndarray:
    return np.vstack([_beliefs(mu, beta, electorate.rho) for beta in electorate.betas])


def _sorted_sum(beliefs: np.ndarray) -> np.ndarray:
    """Sum over pairs of |b_i - b_j| along axis 0, from the sorted beliefs."""
    n = beliefs.shape[0]
    coefficients = 2.0 * np.arange(1, n + 1) - n - 1.0
    return coefficients @ np.sort(beliefs, axis=0)


def polarization(mu: float, electorate: Electorate) -> PolarizationProfile:
    """
    Polarization index at a common posterior.

    The pairwise sum is checked against the weighted form
    sum_i (n + 1 - 2i)(eta_(n+1-i) - eta_i) over the first half of the voters,
    whose terms are nonnegative because beliefs rise with beta.

    :param mu: Common posterior in [0, 1].
    :type mu: float
    :param electorate: The voters.
    :type electorate: Electorate
    :return: Beliefs and index.
    :rtype: PolarizationProfile
    """
    if not 0.0 <= mu <= 1.0:
        raise ProblemException(f"mu must lie in [0, 1], got {mu!r}")
    beliefs = _belief_matrix(np.array([mu]), electorate)[:, 0]
    n = electorate.size

    pairwise = float(np.abs(beliefs[:, None] - beliefs[None, :]).sum() / 2.0)
    weighted = float(
        sum(
            (n + 1 - 2 * i) * (beliefs[n - i] - beliefs[i - 1])
            for i in range(1, n // 2 + 1)
        )
    )
    if abs(pairwise - weighted) > FORMULA_TOLERANCE:
        raise NumericalException(
            f"Polarization formulas disagree at mu={mu!r}: {pairwise!r} vs {weighted!r}"
        )
    return PolarizationProfile(mu=float(mu), beliefs=tuple(float(b) for b in beliefs), pi=pairwise)


def polarization_curve(
    electorate: Electorate, grid_points: int
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Polarization index on an even grid of [0, 1].

    :param electorate: The voters.
    :type electorate: Electorate
    :param grid_points: Number of grid points (>= 2).
    :type grid_points: int
    :return: (mu grid, index values).
    :rtype: Tuple[np.ndarray, np.ndarray]
    """
    if grid_points < 2:
        raise ProblemException(f"grid_points must be >= 2, got {grid_points}")
    grid = np.linspace(0.0, 1.0, grid_points)
    return grid, _sorted_sum(_belief_matrix(grid, electorate))


def polarization_argmax(electorate: Electorate) -> float:
    """
    Posterior maximizing the polarization index.

    A dense grid locates the best point; golden-section search refines it when
    the neighbouring grid points bracket a maximum.

    :param electorate: The voters.
    :type electorate: Electorate
    :return: The maximizer in [0, 1].
    :rtype: float
    """
    grid, values = polarization_curve(electorate, ARGMAX_GRID_POINTS)
    best = int(np.argmax(values))
    if best == 0 or best == grid.size - 1:
        return float(grid[best])

    def negative(mu: float) -> float:
        return -float(_sorted_sum(_belief_matrix(np.array([mu]), electorate))[0])

    left, middle, right = grid[best - 1], grid[best], grid[best + 1]
    if not (values[best] > values[best - 1] and values[best] > values[best + 1]):
        return float(middle)

    result = minimize_scalar(negative, bracket=(left, middle, right), method="golden")
    refined = float(result.x)
    if left <= refined <= right and -result.fun >= values[best]:
        return refined
    return float(middle)


def election_outcome(mu: float, electorate: Electorate) -> ElectionOutcome:
    """
    Votes at a common posterior; a voter exactly at threshold votes for.

    :param mu: Common posterior in [0, 1].
    :type mu: float
    :param electorate: The voters.
    :type electorate: Electorate
    :return: The votes and the majority result.
    :rtype: ElectionOutcome
    """
    if not 0.0 <= mu <= 1.0:
        raise ProblemException(f"mu must lie in [0, 1], got {mu!r}")
    votes = tuple(int(mu >= voter_threshold(b, electorate.rho)) for b in electorate.betas)
    passes = sum(votes) >= (electorate.size + 1) // 2
    if passes != bool(votes[electorate.median_index]):
        raise NumericalException(f"Majority and median voter disagree at mu={mu!r}: {votes}")
    return ElectionOutcome(votes=votes, passes=passes)


def optimal_public_policy(mu0: float, electorate: Electorate) -> ThresholdPolicy:
    """
    Sender-optimal public policy: persuade the median voter.

    :param mu0: Prior probability that the proposal is good.
    :type mu0: float
    :param electorate: The voters.
    :type electorate: Electorate
    :return: Split on {0, median threshold}, or no disclosure.
    :rtype: ThresholdPolicy
    """
    return optimal_policy(mu0, voter_threshold(electorate.median_beta, electorate.rho))


def electorate_from_betas(betas: Sequence[float], rho: float) -> Electorate:
    """Build an electorate, sorting the preferences first."""
    return Electorate(betas=tuple(sorted(betas)), rho=rho)
