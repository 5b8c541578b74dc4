"""Optimal motivated beliefs for finite decision problems."""
import dataclasses
import math
from typing import FrozenSet, Hashable, Sequence, Tuple

import numpy as np
from scipy.special import logsumexp, rel_entr, softmax

from src.exceptions import ProblemException
from src.logger import init_logger

logger = init_logger()

# beliefs must sum to one within this tolerance
BELIEF_TOLERANCE: float = 1e-12

# relative tolerance when comparing well-being or expected utility across actions
INDIFFERENCE_TOLERANCE: float = 1e-10


@dataclasses.dataclass(frozen=True, eq=False)
class Belief:
    """Probability vector over an ordered finite state list."""

    p: np.ndarray

    def __post_init__(self):
        """
        Validate the probability vector and freeze a normalized copy.

        :raises ProblemException: If an entry is negative or not finite, or if the
            entries do not sum to one within ``BELIEF_TOLERANCE``.
        """
        p = np.array(self.p, dtype=float)
        if p.ndim != 1 or p.size == 0:
            raise ProblemException(f"Belief must be a non-empty vector, got shape {p.shape}")
        if not np.all(np.isfinite(p)) or np.any(p < 0.0):
            raise ProblemException(f"Belief entries must be finite and >= 0: {p}")
        if abs(p.sum() - 1.0) > BELIEF_TOLERANCE:
            raise ProblemException(f"Belief entries must sum to 1, got {p.sum()!r}")
        p = p / p.sum()
        p.setflags(write=False)
        object.__setattr__(self, "p", p)

    @classmethod
    def prior(cls, p: Sequence[float]) -> "Belief":
        """
        Build a prior, which must put positive mass on every state.

        :param p: The probabilities.
        :type p: Sequence[float]
        :return: The prior belief.
        :rtype: Belief
        """
        belief = cls(np.asarray(p, dtype=float))
        if not belief.is_interior:
            raise ProblemException(f"Prior must lie in the interior of the simplex: {belief.p}")
        return belief

    @classmethod
    def dirac(cls, size: int, index: int) -> "Belief":
        """
        Build the degenerate belief on one state.

        :param size: Number of states.
        :type size: int
        :param index: Index of the state holding all the mass.
        :type index: int
        :return: The Dirac belief.
        :rtype: Belief
        """
        p = np.zeros(size)
        p[index] = 1.0
        return cls(p)

    @classmethod
    def binary(cls, mu_high: float) -> "Belief":
        """
        Build a two-state belief from the probability of the high state.

        :param mu_high: Probability of the second (high) state.
        :type mu_high: float
        :return: The belief (1 - mu_high, mu_high).
        :rtype: Belief
        """
        return cls(np.array([1.0 - mu_high, mu_high]))

    @property
    def size(self) -> int:
        """Number of states."""
        return int(self.p.size)

    @property
    def support(self) -> np.ndarray:
        """Boolean mask of states with positive probability."""
        return self.p > 0.0

    @property
    def is_interior(self) -> bool:
        """True when every state has positive probability."""
        return bool(np.all(self.p > 0.0))

    def is_close(self, other: "Belief", tolerance: float = 1e-10) -> bool:
        """
        Compare two beliefs in the max norm.

        :param other: The belief to compare with.
        :type other: Belief
        :param tolerance: Largest accepted entrywise difference.
        :type tolerance: float
        :return: True if both beliefs agree within the tolerance.
        :rtype: bool
        """
        return other.size == self.size and bool(
            np.max(np.abs(self.p - other.p)) <= tolerance
        )


@dataclasses.dataclass(frozen=True, eq=False)
class DecisionProblem:
    """
    Receiver's finite decision problem with the sender's per-action payoff.

    ``u[a, s]`` is the receiver payoff of action index ``a`` in state index ``s``,
    ``v[a]`` the sender payoff of action index ``a``, and ``rho`` the weight on
    anticipatory utility (self-deception ability).
    """

    states: Tuple[Hashable, ...]
    actions: Tuple[Hashable, ...]
    u: np.ndarray
    v: np.ndarray
    rho: float

    def __post_init__(self):
        """
        Validate shapes and values, then log weakly dominated actions.

        :raises ProblemException: On bad shapes, non-finite payoffs, duplicate
            labels or a non-positive ``rho``.
        """
        states = tuple(self.states)
        actions = tuple(self.actions)
        u = np.array(self.u, dtype=float)
        v = np.array(self.v, dtype=float)

        if len(states) < 2 or len(actions) < 2:
            raise ProblemException("A decision problem needs at least 2 states and 2 actions")
        if len(set(states)) != len(states) or len(set(actions)) != len(actions):
            raise ProblemException("State and action labels must be unique")
        if u.shape != (len(actions), len(states)):
            raise ProblemException(
                f"Payoff table has shape {u.shape}, expected {(len(actions), len(states))}"
            )
        if v.shape != (len(actions),):
            raise ProblemException(f"Sender payoffs have shape {v.shape}, expected {(len(actions),)}")
        if not np.all(np.isfinite(u)) or not np.all(np.isfinite(v)):
            raise ProblemException("Payoffs must be finite")
        if not (math.isfinite(self.rho) and self.rho > 0.0):
            raise ProblemException(f"rho must be finite and > 0, got {self.rho!r}")

        u.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "actions", actions)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "rho", float(self.rho))

        self._warn_dominated_actions()

    @property
    def n_states(self) -> int:
        """Number of states."""
        return len(self.states)

    @property
    def n_actions(self) -> int:
        """Number of actions."""
        return len(self.actions)

    def action_index(self, action: Hashable) -> int:
        """
        Get the index of an action label.

        :param action: The action label.
        :type action: Hashable
        :return: Its position in ``actions``.
        :rtype: int
        """
        try:
            return self.actions.index(action)
        except ValueError as error:
            raise ProblemException(f"Unknown action {action!r}") from error

    def check_belief(self, belief: Belief) -> None:
        """
        Ensure a belief lives on this problem's state list.

        :param belief: The belief to check.
        :type belief: Belief
        """
        if belief.size != self.n_states:
            raise ProblemException(
                f"Belief has {belief.size} states, problem has {self.n_states}"
            )

    def _warn_dominated_actions(self) -> None:
        """Log actions weakly dominated by another action with equal sender value."""
        for a in range(self.n_actions):
            for b in range(self.n_actions):
                if a == b or self.v[a] != self.v[b]:
                    continue
                if np.all(self.u[a] >= self.u[b]) and np.any(self.u[a] > self.u[b]):
                    logger.warning(
                        "Action %r is weakly dominated by %r with equal sender value",
                        self.actions[b],
                        self.actions[a],
                    )


@dataclasses.dataclass(frozen=True)
class MotivatedOutcome:
    """Receiver's optimal belief, the action it supports and the well-being reached."""

    belief: Belief
    action: Hashable
    wellbeing: float


def kl_divergence(eta: Belief, mu: Belief) -> float:
    """
    Kullback-Leibler divergence of eta from mu.

    Terms with eta(s) = 0 contribute 0. Returns ``math.inf`` when eta puts mass on
    a state that mu excludes.

    :param eta: Subjective belief.
    :type eta: Belief
    :param mu: Reference (Bayesian) belief.
    :type mu: Belief
    :return: KL(eta || mu) >= 0.
    :rtype: float
    """
    if eta.size != mu.size:
        raise ProblemException(f"Dimension mismatch: {eta.size} vs {mu.size}")
    return float(np.sum(rel_entr(eta.p, mu.p)))


def tilt_belief(problem: DecisionProblem, action: Hashable, mu: Belief) -> Belief:
    """
    Optimal belief motivated by an action: exponential tilt of mu by exp(rho u).

    :param problem: The decision problem.
    :type problem: DecisionProblem
    :param action: Action label the belief is motivated by.
    :type action: Hashable
    :param mu: Bayesian posterior.
    :type mu: Belief
    :return: Belief proportional to exp(rho u(action, .)) mu(.), same support as mu.
    :rtype: Belief
    """
    problem.check_belief(mu)
    index = problem.action_index(action)
    with np.errstate(divide="ignore"):
        logits = problem.rho * problem.u[index] + np.log(mu.p)
    return Belief(softmax(logits))


def wellbeing(problem: DecisionProblem, action: Hashable, mu: Belief) -> float:
    """
    Psychological well-being of an action under the optimally tilted belief.

    Equals (1/rho) ln sum_s exp(rho u(action, s)) mu(s), evaluated as a
    max-shifted log-sum-exp.

    :param problem: The decision problem.
    :type problem: DecisionProblem
    :param action: Action label.
    :type action: Hashable
    :param mu: Bayesian posterior.
    :type mu: Belief
    :return: W_action(mu).
    :rtype: float
    """
    problem.check_belief(mu)
    index = problem.action_index(action)
    support = mu.support
    payoffs = problem.u[index][support]
    if np.ptp(payoffs) == 0.0:
        return float(payoffs[0])
    return float(logsumexp(problem.rho * payoffs, b=mu.p[support]) / problem.rho)


def expected_utility(problem: DecisionProblem, action: Hashable, eta: Belief) -> float:
    """
    Anticipatory utility of an action under a (possibly distorted) belief.

    :param problem: The decision problem.
    :type problem: DecisionProblem
    :param action: Action label.
    :type action: Hashable
    :param eta: Belief used to evaluate the action.
    :type eta: Belief
    :return: sum_s u(action, s) eta(s).
    :rtype: float
    """
    problem.check_belief(eta)
    return float(problem.u[problem.action_index(action)] @ eta.p)


def _argmax_set(values: np.ndarray) -> np.ndarray:
    """Indices whose value is within the relative indifference tolerance of the max."""
    best = float(np.max(values))
    slack = INDIFFERENCE_TOLERANCE * max(1.0, abs(best))
    return np.flatnonzero(values >= best - slack)


def _wellbeing_values(problem: DecisionProblem, mu: Belief) -> np.ndarray:
    return np.array([wellbeing(problem, action, mu) for action in problem.actions])


def optimal_action_set(problem: DecisionProblem, mu: Belief) -> FrozenSet[Hashable]:
    """
    Actions a wishful receiver may take at posterior mu.

    :param problem: The decision problem.
    :type problem: DecisionProblem
    :param mu: Bayesian posterior.
    :type mu: Belief
    :return: The actions maximizing well-being.
    :rtype: FrozenSet[Hashable]
    """
    indices = _argmax_set(_wellbeing_values(problem, mu))
    return frozenset(problem.actions[i] for i in indices)


def bayesian_action_set(problem: DecisionProblem, mu: Belief) -> FrozenSet[Hashable]:
    """
    Actions a Bayesian receiver may take at posterior mu.

    :param problem: The decision problem.
    :type problem: DecisionProblem
    :param mu: Bayesian posterior.
    :type mu: Belief
    :return: The actions maximizing expected utility under mu.
    :rtype: FrozenSet[Hashable]
    """
    problem.check_belief(mu)
    indices = _argmax_set(problem.u @ mu.p)
    return frozenset(problem.actions[i] for i in indices)


def optimal_belief(problem: DecisionProblem, mu: Belief) -> MotivatedOutcome:
    """
    Receiver's optimal motivated belief and action at posterior mu.

    Among well-being maximizers the sender's preferred action is taken, then the
    lowest action index.

    :param problem: The decision problem.
    :type problem: DecisionProblem
    :param mu: Bayesian posterior.
    :type mu: Belief
    :return: The motivated outcome.
    :rtype: MotivatedOutcome
    """
    values = _wellbeing_values(problem, mu)
    candidates = _argmax_set(values)
    chosen = min(candidates, key=lambda i: (-problem.v[i], i))
    action = problem.actions[chosen]
    return MotivatedOutcome(
        belief=tilt_belief(problem, action, mu),
        action=action,
        wellbeing=float(values[chosen]),
    )


def sender_indirect_value(problem: DecisionProblem, mu: Belief) -> float:
    """
    Sender's payoff from inducing posterior mu.

    :param problem: The decision problem.
    :type problem: DecisionProblem
    :param mu: Bayesian posterior.
    :type mu: Belief
    :return: v of the action the receiver takes at mu.
    :rtype: float
    """
    outcome = optimal_belief(problem, mu)
    return float(problem.v[problem.action_index(outcome.action)])


def exponential_problem(problem: DecisionProblem) -> DecisionProblem:
    """
    Bayesian-equivalent problem with payoffs exp(rho u).

    A Bayesian receiver facing the returned problem acts exactly like the wishful
    receiver facing ``problem``.

    :param problem: The decision problem.
    :type problem: DecisionProblem
    :return: Same labels, sender payoffs and rho; payoffs exp(rho u).
    :rtype: DecisionProblem
    """
    with np.errstate(over="ignore"):
        u = np.exp(problem.rho * problem.u)
    if not np.all(np.isfinite(u)):
        raise ProblemException("exp(rho u) overflows; rescale payoffs or rho")
    return DecisionProblem(problem.states, problem.actions, u, problem.v, problem.rho)
