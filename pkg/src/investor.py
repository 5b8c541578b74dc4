"""Continuous-state investor: persuading a wishful investor to buy a risky asset."""
import dataclasses
import math
from enum import Enum
from typing import Callable, Dict, Optional, Sequence, Tuple

import numpy as np
from scipy import stats
from scipy.integrate import quad
from scipy.optimize import bisect

from src.beliefs import Belief, DecisionProblem
from src.exceptions import NumericalException, ProblemException, QuadratureException
from src.finite import BeliefMode, monotone_partition_value
from src.logger import init_logger

logger = init_logger()

QUAD_TOLERANCE: float = 1e-10
QUAD_LIMIT: int = 200

CDF_TOLERANCE: float = 1e-9
DENSITY_TOLERANCE: float = 1e-8
VALIDATION_GRID: int = 1000

# tail mass below which the truncated means take their endpoint convention
TAIL_TOLERANCE: float = 1e-12
ROOT_OFFSET: float = 1e-12

Density = Callable[[np.ndarray], np.ndarray]


class PriorFamily(Enum):
    """Built-in return distributions."""

    UNIFORM = "uniform"
    TRUNCATED_NORMAL = "truncated_normal"
    PIECEWISE_LINEAR = "piecewise_linear"
    CUSTOM = "custom"


@dataclasses.dataclass(frozen=True, eq=False)
class ReturnPrior:
    """
    Prior over the asset return on [theta_low, theta_high], with theta_low < 0 < theta_high.

    pdf and cdf accept floats or arrays. Use the classmethods for the built-in
    families; a custom prior must pass the same consistency checks.
    """

    theta_low: float
    theta_high: float
    pdf: Density
    cdf: Density
    kind: PriorFamily = PriorFamily.CUSTOM
    parameters: Dict = dataclasses.field(default_factory=dict)
    breakpoints: Tuple[float, ...] = ()

    def __post_init__(self):
        """
        Check the support and the consistency of pdf and cdf.

        :raises ProblemException: If the support does not straddle 0, the cdf
            does not run from 0 to 1 monotonically, or the density does not
            integrate to 1.
        """
        if not self.theta_low < 0.0 < self.theta_high:
            raise ProblemException(
                f"Need theta_low < 0 < theta_high, got [{self.theta_low!r}, {self.theta_high!r}]"
            )
        if abs(float(self.cdf(self.theta_low))) > CDF_TOLERANCE:
            raise ProblemException("cdf must vanish at theta_low")
        if abs(float(self.cdf(self.theta_high)) - 1.0) > CDF_TOLERANCE:
            raise ProblemException("cdf must reach 1 at theta_high")

        grid = np.linspace(self.theta_low, self.theta_high, VALIDATION_GRID)
        if np.any(np.diff(self.cdf(grid)) < -CDF_TOLERANCE):
            raise ProblemException("cdf must be nondecreasing")
        if np.any(self.pdf(grid) < 0.0):
            raise ProblemException("pdf must be nonnegative")

        mass = integrate(self.pdf, self.theta_low, self.theta_high, self.breakpoints)
        if abs(mass - 1.0) > DENSITY_TOLERANCE:
            raise ProblemException(f"pdf integrates to {mass!r}, not 1")

    @property
    def width(self) -> float:
        """Length of the support."""
        return self.theta_high - self.theta_low

    @classmethod
    def uniform(cls, low: float, high: float) -> "ReturnPrior":
        """
        Uniform prior on [low, high].

        :param low: Lowest return (< 0).
        :type low: float
        :param high: Highest return (> 0).
        :type high: float
        :return: The prior.
        :rtype: ReturnPrior
        """
        if not low < high:
            raise ProblemException(f"Need low < high, got {low!r}, {high!r}")
        density = 1.0 / (high - low)

        def pdf(theta):
            theta = np.asarray(theta, dtype=float)
            return np.where((theta >= low) & (theta <= high), density, 0.0)

        def cdf(theta):
            return np.clip((np.asarray(theta, dtype=float) - low) * density, 0.0, 1.0)

        return cls(
            theta_low=low,
            theta_high=high,
            pdf=pdf,
            cdf=cdf,
            kind=PriorFamily.UNIFORM,
            parameters={"low": low, "high": high},
        )

    @classmethod
    def truncated_normal(cls, mean: float, std: float, low: float, high: float) -> "ReturnPrior":
        """
        Normal(mean, std) truncated to [low, high].

        :param mean: Location of the untruncated normal.
        :type mean: float
        :param std: Scale of the untruncated normal (> 0).
        :type std: float
        :param low: Lowest return (< 0).
        :type low: float
        :param high: Highest return (> 0).
        :type high: float
        :return: The prior.
        :rtype: ReturnPrior
        """
        if not std > 0.0:
            raise ProblemException(f"std must be > 0, got {std!r}")
        frozen = stats.truncnorm((low - mean) / std, (high - mean) / std, loc=mean, scale=std)
        return cls(
            theta_low=low,
            theta_high=high,
            pdf=frozen.pdf,
            cdf=frozen.cdf,
            kind=PriorFamily.TRUNCATED_NORMAL,
            parameters={"mean": mean, "std": std, "low": low, "high": high},
            breakpoints=(mean,) if low < mean < high else (),
        )

    @classmethod
    def piecewise_linear(cls, knots: Sequence[Tuple[float, float]]) -> "ReturnPrior":
        """
        Density interpolated linearly between knots and normalized.

        :param knots: (theta, density) pairs with increasing theta; the first and
            last theta are the support ends; densities must be > 0.
        :type knots: Sequence[Tuple[float, float]]
        :return: The prior.
        :rtype: ReturnPrior
        """
        try:
            pairs = np.array(knots, dtype=float)
        except (TypeError, ValueError) as e:
            raise ProblemException(f"Knots must be (theta, density) pairs, got {knots!r}") from e
        if pairs.ndim != 2 or pairs.shape[1] != 2:
            raise ProblemException(f"Knots must be (theta, density) pairs, got {knots!r}")
        xs, ys = pairs[:, 0], pairs[:, 1]
        if xs.size < 2 or np.any(np.diff(xs) <= 0.0):
            raise ProblemException("Knots need at least 2 strictly increasing positions")
        if np.any(ys <= 0.0):
            raise ProblemException("Knot densities must be > 0")

        areas = np.diff(xs) * (ys[:-1] + ys[1:]) / 2.0
        total = areas.sum()
        cumulative = np.concatenate([[0.0], np.cumsum(areas)]) / total

        def pdf(theta):
            theta = np.asarray(theta, dtype=float)
            inside = (theta >= xs[0]) & (theta <= xs[-1])
            return np.where(inside, np.interp(theta, xs, ys) / total, 0.0)

        def cdf(theta):
            theta = np.clip(np.asarray(theta, dtype=float), xs[0], xs[-1])
            segment = np.clip(np.searchsorted(xs, theta, side="right") - 1, 0, xs.size - 2)
            offset = theta - xs[segment]
            partial = offset * (ys[segment] + np.interp(theta, xs, ys)) / 2.0 / total
            return np.minimum(cumulative[segment] + partial, 1.0)

        return cls(
            theta_low=float(xs[0]),
            theta_high=float(xs[-1]),
            pdf=pdf,
            cdf=cdf,
            kind=PriorFamily.PIECEWISE_LINEAR,
            parameters={"knots": [[float(x), float(y)] for x, y in zip(xs, ys)]},
            breakpoints=tuple(float(x) for x in xs[1:-1]),
        )

    @classmethod
    def from_dict(cls, document: Dict) -> "ReturnPrior":
        """
        Build a built-in prior from its config form.

        :param document: {"family": "uniform", "low", "high"},
            {"family": "truncated_normal", "mean", "std", "low", "high"} or
            {"family": "piecewise_linear", "knots": [[theta, density], ...]}.
        :type document: Dict
        :return: The prior.
        :rtype: ReturnPrior
        """
        family = document.get("family")
        if family == PriorFamily.UNIFORM.value:
            return cls.uniform(document["low"], document["high"])
        if family == PriorFamily.TRUNCATED_NORMAL.value:
            return cls.truncated_normal(
                document["mean"], document["std"], document["low"], document["high"]
            )
        if family == PriorFamily.PIECEWISE_LINEAR.value:
            return cls.piecewise_linear(document["knots"])
        raise ProblemException(f"Unknown prior family {family!r}")


@dataclasses.dataclass(frozen=True)
class InvestorSolution:
    """Investment thresholds and the resulting persuasion probabilities."""

    theta_W: float
    theta_B: float
    prob_W: float
    prob_B: float
    x_hat: float
    m_hat: float


def integrate(
    func: Callable[[float], float], a: float, b: float, breakpoints: Sequence[float] = ()
) -> float:
    """
    Adaptive quadrature of func over [a, b].

    :param func: The integrand.
    :type func: Callable[[float], float]
    :param a: Lower bound.
    :type a: float
    :param b: Upper bound.
    :type b: float
    :param breakpoints: Points of reduced smoothness; those outside (a, b) are ignored.
    :type breakpoints: Sequence[float]
    :raises QuadratureException: If the integral does not converge.
    :return: The integral.
    :rtype: float
    """
    if b <= a:
        return 0.0
    points = [x for x in breakpoints if a < x < b] or None
    # full_output reports non-convergence as a trailing message instead of a warning
    result = quad(
        lambda x: float(func(x)),
        a,
        b,
        epsabs=QUAD_TOLERANCE,
        epsrel=QUAD_TOLERANCE,
        limit=QUAD_LIMIT,
        points=points,
        full_output=1,
    )
    if len(result) > 3:
        message = " ".join(str(result[3]).split())
        raise QuadratureException(f"Quadrature on [{a!r}, {b!r}] failed: {message}")
    return float(result[0])


def _check_rho(rho: float) -> None:
    if not (math.isfinite(rho) and rho > 0.0):
        raise ProblemException(f"rho must be finite and > 0, got {rho!r}")


def _check_cutoff(prior: ReturnPrior, z: float) -> None:
    if not prior.theta_low <= z <= prior.theta_high:
        raise ProblemException(
            f"Cutoff {z!r} outside [{prior.theta_low!r}, {prior.theta_high!r}]"
        )


def exp_moment(prior: ReturnPrior, rho: float) -> float:
    """
    Prior expectation of exp(rho theta).

    :param prior: The prior.
    :type prior: ReturnPrior
    :param rho: Self-deception ability.
    :type rho: float
    :return: x_hat.
    :rtype: float
    """
    _check_rho(rho)
    return integrate(
        lambda t: math.exp(rho * t) * prior.pdf(t),
        prior.theta_low,
        prior.theta_high,
        prior.breakpoints,
    )


def prior_mean(prior: ReturnPrior) -> float:
    """
    Prior expected return.

    :param prior: The prior.
    :type prior: ReturnPrior
    :return: m_hat.
    :rtype: float
    """
    return integrate(lambda t: t * prior.pdf(t), prior.theta_low, prior.theta_high, prior.breakpoints)


def _tail_average(
    prior: ReturnPrior, z: float, func: Callable[[float], float]
) -> Optional[float]:
    """Average of func over the returns above z, or None when that tail is empty."""
    tail = 1.0 - float(prior.cdf(z))
    if tail < TAIL_TOLERANCE:
        return None
    return integrate(lambda t: func(t) * prior.pdf(t), z, prior.theta_high, prior.breakpoints) / tail


def trunc_mean(prior: ReturnPrior, z: float) -> float:
    """
    Expected return conditional on a return of at least z.

    :param prior: The prior.
    :type prior: ReturnPrior
    :param z: Cutoff in [theta_low, theta_high].
    :type z: float
    :return: phi(z); theta_high when the tail above z is empty.
    :rtype: float
    """
    _check_cutoff(prior, z)
    value = _tail_average(prior, z, lambda t: t)
    return prior.theta_high if value is None else value


def trunc_exp_mean(prior: ReturnPrior, z: float, rho: float) -> float:
    """
    Conditional expectation of exp(rho theta) given a return of at least z.

    :param prior: The prior.
    :type prior: ReturnPrior
    :param z: Cutoff in [theta_low, theta_high].
    :type z: float
    :param rho: Self-deception ability.
    :type rho: float
    :return: psi(z); exp(rho theta_high) when the tail above z is empty.
    :rtype: float
    """
    _check_rho(rho)
    _check_cutoff(prior, z)
    value = _tail_average(prior, z, lambda t: math.exp(rho * t))
    return math.exp(rho * prior.theta_high) if value is None else value


def _root(func: Callable[[float], float], prior: ReturnPrior, name: str) -> float:
    """Bisection on [theta_low + 1e-12, 0]."""
    try:
        root = bisect(func, prior.theta_low + ROOT_OFFSET, 0.0, xtol=1e-10 * prior.width)
    except ValueError as error:
        raise NumericalException(f"No bracket for {name} on [theta_low, 0]: {error}") from error
    logger.info("%s = %.12g", name, root)
    return float(root)


def theta_B(prior: ReturnPrior) -> float:
    """
    Lowest return a Bayesian investor can be persuaded to invest at.

    :param prior: Prior with negative mean.
    :type prior: ReturnPrior
    :return: The root of phi(z) = 0.
    :rtype: float
    """
    if prior_mean(prior) >= 0.0:
        raise ProblemException("prior violates m_hat < 0 assumption")
    return _root(lambda z: trunc_mean(prior, z), prior, "theta_B")


def theta_W(prior: ReturnPrior, rho: float) -> float:
    """
    Lowest return a wishful investor can be persuaded to invest at.

    Solves psi(z) = 1 in the form E[expm1(rho theta) / rho | theta >= z] = 0,
    which keeps precision for small rho.

    :param prior: Prior with x_hat < 1.
    :type prior: ReturnPrior
    :param rho: Self-deception ability.
    :type rho: float
    :return: The root.
    :rtype: float
    """
    if exp_moment(prior, rho) >= 1.0:
        raise ProblemException("wishful investor already invests at prior")

    def excess(z: float) -> float:
        value = _tail_average(prior, z, lambda t: math.expm1(rho * t) / rho)
        return math.expm1(rho * prior.theta_high) / rho if value is None else value

    return _root(excess, prior, "theta_W")


def solve_investor(prior: ReturnPrior, rho: float) -> InvestorSolution:
    """
    Thresholds, moments and persuasion probabilities of an investor instance.

    :param prior: Prior with x_hat < 1.
    :type prior: ReturnPrior
    :param rho: Self-deception ability.
    :type rho: float
    :raises NumericalException: If the computed thresholds break
        theta_low < theta_W < theta_B < 0.
    :return: The solution.
    :rtype: InvestorSolution
    """
    x_hat = exp_moment(prior, rho)
    m_hat = prior_mean(prior)
    if x_hat < 1.0 and m_hat >= 0.0:
        logger.warning("Prior has x_hat = %.6g < 1 but m_hat = %.6g >= 0", x_hat, m_hat)

    wishful = theta_W(prior, rho)
    bayes = theta_B(prior)
    solution = InvestorSolution(
        theta_W=wishful,
        theta_B=bayes,
        prob_W=1.0 - float(prior.cdf(wishful)),
        prob_B=1.0 - float(prior.cdf(bayes)),
        x_hat=x_hat,
        m_hat=m_hat,
    )
    if not prior.theta_low < solution.theta_W < solution.theta_B < 0.0:
        raise NumericalException(f"Threshold ordering violated: {solution}")
    if not solution.prob_W > solution.prob_B:
        raise NumericalException(f"Persuasion probabilities out of order: {solution}")
    return solution


def discretize_prior(prior: ReturnPrior, atoms: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Equal-width cells with an atom at each midpoint carrying the cell's mass.

    :param prior: The prior.
    :type prior: ReturnPrior
    :param atoms: Number of cells.
    :type atoms: int
    :return: (atom positions, masses).
    :rtype: Tuple[np.ndarray, np.ndarray]
    """
    if atoms < 2:
        raise ProblemException(f"Need at least 2 atoms, got {atoms}")
    edges = np.linspace(prior.theta_low, prior.theta_high, atoms + 1)
    masses = np.clip(np.diff(prior.cdf(edges)), 0.0, None)
    return (edges[:-1] + edges[1:]) / 2.0, masses / masses.sum()


def investor_problem(thetas: Sequence[float], rho: float) -> DecisionProblem:
    """
    Finite investor problem: keep cash (payoff 0) or invest (payoff theta).

    :param thetas: Returns, one state each.
    :type thetas: Sequence[float]
    :param rho: Self-deception ability.
    :type rho: float
    :return: Actions (0, 1) with sender payoff v(a) = a.
    :rtype: DecisionProblem
    """
    thetas = np.asarray(thetas, dtype=float)
    return DecisionProblem(
        states=tuple(float(t) for t in thetas),
        actions=(0, 1),
        u=np.vstack([np.zeros_like(thetas), thetas]),
        v=np.array([0.0, 1.0]),
        rho=rho,
    )


def discrete_investment_probability(prior: ReturnPrior, rho: float, atoms: int) -> float:
    """
    Investment probability of the best upper-pooling policy on the discretized prior.

    :param prior: The prior.
    :type prior: ReturnPrior
    :param rho: Self-deception ability.
    :type rho: float
    :param atoms: Number of cells.
    :type atoms: int
    :return: The probability that the wishful investor invests.
    :rtype: float
    """
    thetas, masses = discretize_prior(prior, atoms)
    value, _ = monotone_partition_value(
        investor_problem(thetas, rho), Belief(masses), BeliefMode.WISHFUL
    )
    return value
