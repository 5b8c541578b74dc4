"""Finite-state persuasion with binary actions."""
import dataclasses
from enum import Enum
from typing import Dict, Hashable, List, Tuple

import numpy as np
from scipy.special import expit

from src.beliefs import Belief, DecisionProblem
from src.binary import BinaryPayoffs, FavoredReport, Favoredness, classify_favored
from src.exceptions import NumericalException, ProblemException
from src.helpers import simplex_grid
from src.logger import init_logger
from src.simplex import DenseSimplex

logger = init_logger()

MEMBERSHIP_TOLERANCE: float = 1e-12
VERTEX_TOLERANCE: float = 1e-10
COLLINEAR_TOLERANCE: float = 1e-9
PLAUSIBILITY_TOLERANCE: float = 1e-9

ORACLE_MAX_STATES: int = 4
ORACLE_MAX_POINTS: int = 50_000
ORACLE_BLOCK: int = 32

StatePair = Tuple[Hashable, Hashable]


class BeliefMode(Enum):
    """Receiver type whose action region is computed."""

    BAYESIAN = "bayesian"
    WISHFUL = "wishful"


@dataclasses.dataclass(frozen=True, eq=False)
class NetWeights:
    """
    Per-state gain from action 1 over action 0, stored as sign and log magnitude.

    Bayesian weights are u(1, s) - u(0, s); wishful weights are
    exp(rho u(1, s)) - exp(rho u(0, s)).
    """

    signs: np.ndarray
    log_magnitudes: np.ndarray

    def relative(self) -> np.ndarray:
        """Weights divided by the largest magnitude."""
        finite = np.isfinite(self.log_magnitudes)
        if not np.any(finite):
            return np.zeros_like(self.signs)
        top = np.max(self.log_magnitudes[finite])
        return self.signs * np.exp(self.log_magnitudes - top)


@dataclasses.dataclass(frozen=True)
class ActionPolytope:
    """Posteriors at which action 1 is taken, as the convex hull of its vertices."""

    mode: BeliefMode
    vertices: Tuple[Belief, ...]

    def vertex_matrix(self) -> np.ndarray:
        """Vertices as columns, shape (n_states, n_vertices)."""
        return np.column_stack([v.p for v in self.vertices])


@dataclasses.dataclass(frozen=True)
class FavoredVerdict:
    """Whether the Bayesian action-1 region lies inside the wishful one, with per-pair reports."""

    favored: bool
    pairs: Dict[StatePair, FavoredReport]


@dataclasses.dataclass(frozen=True)
class FinitePolicy:
    """Bayes-plausible distribution over posteriors and the sender value it achieves."""

    posteriors: Tuple[Belief, ...]
    weights: np.ndarray
    value: float
    prior: Belief

    def __post_init__(self):
        weights = np.asarray(self.weights, dtype=float)
        if np.any(weights < -PLAUSIBILITY_TOLERANCE):
            raise NumericalException(f"Negative policy weights: {weights}")
        if abs(weights.sum() - 1.0) > PLAUSIBILITY_TOLERANCE:
            raise NumericalException(f"Policy weights sum to {weights.sum()!r}")
        if np.max(np.abs(self.barycenter() - self.prior.p)) > PLAUSIBILITY_TOLERANCE:
            raise NumericalException("Policy is not Bayes plausible")

    def barycenter(self) -> np.ndarray:
        """Weighted average of the posteriors."""
        return sum(w * q.p for w, q in zip(self.weights, self.posteriors))


def _check_binary(problem: DecisionProblem) -> None:
    if problem.n_actions != 2:
        raise ProblemException(
            f"Action regions need exactly 2 actions, got {problem.n_actions}"
        )


def net_weights(problem: DecisionProblem, mode: BeliefMode) -> NetWeights:
    """
    Per-state net weights of action 1 over action 0.

    :param problem: A problem with two actions.
    :type problem: DecisionProblem
    :param mode: Bayesian or wishful receiver.
    :type mode: BeliefMode
    :return: Signs and log magnitudes (-inf where the weight is 0).
    :rtype: NetWeights
    """
    _check_binary(problem)
    u0, u1 = problem.u[0], problem.u[1]
    signs = np.sign(u1 - u0)
    with np.errstate(divide="ignore"):
        if mode is BeliefMode.BAYESIAN:
            log_magnitudes = np.log(np.abs(u1 - u0))
        else:
            top = problem.rho * np.maximum(u0, u1)
            spread = problem.rho * np.abs(u1 - u0)
            log_magnitudes = top + np.log(-np.expm1(-spread))
    return NetWeights(signs=signs, log_magnitudes=log_magnitudes)


def net_gain(problem: DecisionProblem, mu: Belief, mode: BeliefMode) -> float:
    """
    Net gain of action 1 at posterior mu, in units of the largest net weight.

    :param problem: A problem with two actions.
    :type problem: DecisionProblem
    :param mu: The posterior.
    :type mu: Belief
    :param mode: Bayesian or wishful receiver.
    :type mode: BeliefMode
    :return: sum_s w(s) mu(s) / max |w|.
    :rtype: float
    """
    problem.check_belief(mu)
    return float(net_weights(problem, mode).relative() @ mu.p)


def membership(problem: DecisionProblem, mu: Belief, mode: BeliefMode) -> bool:
    """
    Whether action 1 is taken at posterior mu.

    :param problem: A problem with two actions.
    :type problem: DecisionProblem
    :param mu: The posterior.
    :type mu: Belief
    :param mode: Bayesian or wishful receiver.
    :type mode: BeliefMode
    :return: True iff the net gain is >= -1e-12.
    :rtype: bool
    """
    return net_gain(problem, mu, mode) >= -MEMBERSHIP_TOLERANCE


def edge_indifference_points(
    problem: DecisionProblem, mode: BeliefMode
) -> List[Tuple[StatePair, Belief]]:
    """
    Indifference beliefs on the edges of the simplex.

    An edge between two states whose net weights have strictly opposite signs
    holds exactly one belief with zero net gain.

    :param problem: A problem with two actions.
    :type problem: DecisionProblem
    :param mode: Bayesian or wishful receiver.
    :type mode: BeliefMode
    :return: ((state_i, state_j), belief) for i < j, in state order.
    :rtype: List[Tuple[StatePair, Belief]]
    """
    weights = net_weights(problem, mode)
    points = []
    for i in range(problem.n_states):
        for j in range(i + 1, problem.n_states):
            if weights.signs[i] * weights.signs[j] >= 0.0:
                continue
            p = np.zeros(problem.n_states)
            gap = weights.log_magnitudes[i] - weights.log_magnitudes[j]
            p[j] = expit(gap)
            p[i] = expit(-gap)
            points.append(((problem.states[i], problem.states[j]), Belief(p)))
    return points


def action_polytope(problem: DecisionProblem, mode: BeliefMode) -> ActionPolytope:
    """
    Vertices of the set of posteriors at which action 1 is taken.

    :param problem: A problem with two actions.
    :type problem: DecisionProblem
    :param mode: Bayesian or wishful receiver.
    :type mode: BeliefMode
    :return: Diracs with nonnegative net weight, then edge indifference points.
    :rtype: ActionPolytope
    """
    weights = net_weights(problem, mode)
    candidates = [
        Belief.dirac(problem.n_states, i)
        for i in range(problem.n_states)
        if weights.signs[i] >= 0.0
    ]
    candidates.extend(belief for _, belief in edge_indifference_points(problem, mode))

    vertices: List[Belief] = []
    for belief in candidates:
        if not any(belief.is_close(v, VERTEX_TOLERANCE) for v in vertices):
            vertices.append(belief)
    return ActionPolytope(mode=mode, vertices=tuple(vertices))


def is_favored(problem: DecisionProblem) -> FavoredVerdict:
    """
    Whether every posterior persuading a Bayesian receiver also persuades a wishful one.

    The Bayesian region is a polytope, so checking its vertices is exact.

    :param problem: A problem with two actions.
    :type problem: DecisionProblem
    :return: The verdict and the two-state report of every edge with opposite
        Bayesian net weights.
    :rtype: FavoredVerdict
    """
    bayes = action_polytope(problem, BeliefMode.BAYESIAN)
    favored = all(membership(problem, v, BeliefMode.WISHFUL) for v in bayes.vertices)

    signs = net_weights(problem, BeliefMode.BAYESIAN).signs
    pairs: Dict[StatePair, FavoredReport] = {}
    for i in range(problem.n_states):
        for j in range(i + 1, problem.n_states):
            if signs[i] * signs[j] >= 0.0:
                continue
            low, high = (i, j) if signs[i] < 0.0 else (j, i)
            payoffs = BinaryPayoffs(
                u_low_0=float(problem.u[0, low]),
                u_high_0=float(problem.u[0, high]),
                u_low_1=float(problem.u[1, low]),
                u_high_1=float(problem.u[1, high]),
            )
            pairs[(problem.states[i], problem.states[j])] = classify_favored(
                payoffs, problem.rho, locate_crossing=False
            )
    return FavoredVerdict(favored=favored, pairs=pairs)


def pairwise_favored(verdict: FavoredVerdict) -> bool:
    """True when no two-state restriction has action 1 strictly disfavored."""
    return all(r.favored is not Favoredness.NOT_FAVORED for r in verdict.pairs.values())


def _position(beliefs: List[Belief], target: Belief) -> int:
    for index, belief in enumerate(beliefs):
        if belief.is_close(target, VERTEX_TOLERANCE):
            return index
    return -1


def optimal_policy_finite(
    problem: DecisionProblem, mu0: Belief, mode: BeliefMode
) -> FinitePolicy:
    """
    Sender-optimal policy when the sender gains 1 from action 1 and 0 otherwise.

    Solves max sum of weights on polytope vertices over Bayes-plausible
    distributions supported on the polytope vertices and all Diracs, starting
    from full disclosure.

    :param problem: A problem with two actions.
    :type problem: DecisionProblem
    :param mu0: Interior prior.
    :type mu0: Belief
    :param mode: Bayesian or wishful receiver.
    :type mode: BeliefMode
    :return: An optimal basic policy.
    :rtype: FinitePolicy
    """
    problem.check_belief(mu0)
    if not mu0.is_interior:
        raise ProblemException(f"Prior must be interior: {mu0.p}")

    polytope = action_polytope(problem, mode)
    candidates = list(polytope.vertices)
    rewards = [1.0] * len(candidates)
    basis = []
    for i in range(problem.n_states):
        dirac = Belief.dirac(problem.n_states, i)
        index = _position(candidates, dirac)
        if index < 0:
            candidates.append(dirac)
            rewards.append(0.0)
            index = len(candidates) - 1
        basis.append(index)

    matrix = np.column_stack([q.p for q in candidates])
    result = DenseSimplex(np.array(rewards), matrix, mu0.p, basis).run_simplex()

    support = np.flatnonzero(result.x > MEMBERSHIP_TOLERANCE)
    weights = result.x[support] / result.x[support].sum()
    value = float(sum(w for w, k in zip(weights, support) if rewards[k] == 1.0))
    logger.info(
        "%s policy: %d posteriors, value %.6f after %d pivots",
        mode.value,
        support.size,
        value,
        result.iterations,
    )
    return FinitePolicy(
        posteriors=tuple(candidates[k] for k in support),
        weights=weights,
        value=value,
        prior=mu0,
    )


def grid_oracle_value(
    problem: DecisionProblem, mu0: Belief, mode: BeliefMode, resolution: int
) -> float:
    """
    Best two-posterior policy with both posteriors on the k-grid of the simplex.

    A lower bound on the optimal value used to cross-check the LP.

    :param problem: A problem with two actions and at most 4 states.
    :type problem: DecisionProblem
    :param mu0: The prior.
    :type mu0: Belief
    :param mode: Bayesian or wishful receiver.
    :type mode: BeliefMode
    :param resolution: Grid resolution k.
    :type resolution: int
    :return: The best value found.
    :rtype: float
    """
    problem.check_belief(mu0)
    if problem.n_states > ORACLE_MAX_STATES:
        raise ProblemException(f"Grid oracle supports at most {ORACLE_MAX_STATES} states")
    if resolution < 1:
        raise ProblemException(f"Grid resolution must be >= 1, got {resolution}")
    grid = simplex_grid(problem.n_states, resolution)
    if grid.shape[0] > ORACLE_MAX_POINTS:
        raise ProblemException(f"Grid has {grid.shape[0]} points, limit is {ORACLE_MAX_POINTS}")

    if membership(problem, mu0, mode):
        return 1.0

    weights = net_weights(problem, mode).relative()
    members = grid @ weights >= -MEMBERSHIP_TOLERANCE
    offsets = grid - mu0.p
    persuading = offsets[members]
    persuading = persuading[np.sum(persuading**2, axis=1) > 0.0]

    best = 0.0
    for start in range(0, persuading.shape[0], ORACLE_BLOCK):
        block = persuading[start : start + ORACLE_BLOCK]
        squared = np.sum(block**2, axis=1)
        # q2 = mu0 - s (q1 - mu0) for s > 0 puts mu0 between q1 and q2
        s = -(offsets @ block.T) / squared
        residual = offsets[:, None, :] + s[:, :, None] * block[None, :, :]
        collinear = (s > 0.0) & (np.max(np.abs(residual), axis=2) <= COLLINEAR_TOLERANCE)
        t = s / (1.0 + s)
        value = np.where(collinear, t + (1.0 - t) * members[:, None], 0.0)
        best = max(best, float(value.max()))
    return best


def monotone_partition_value(
    problem: DecisionProblem, mu0: Belief, mode: BeliefMode
) -> Tuple[float, int]:
    """
    Best policy that pools the states from a cutoff upward and reveals the others.

    States are taken in the problem's order.

    :param problem: A problem with two actions.
    :type problem: DecisionProblem
    :param mu0: The prior.
    :type mu0: Belief
    :param mode: Bayesian or wishful receiver.
    :type mode: BeliefMode
    :return: (value, index of the lowest pooled state).
    :rtype: Tuple[float, int]
    """
    problem.check_belief(mu0)
    revealed_members = net_weights(problem, mode).signs >= 0.0
    best_value, best_cutoff = -1.0, 0
    for cutoff in range(problem.n_states):
        upper_mass = float(mu0.p[cutoff:].sum())
        if upper_mass <= 0.0:
            continue
        pooled = np.zeros(problem.n_states)
        pooled[cutoff:] = mu0.p[cutoff:] / upper_mass
        value = upper_mass if membership(problem, Belief(pooled), mode) else 0.0
        value += float(mu0.p[:cutoff] @ revealed_members[:cutoff])
        if value > best_value:
            best_value, best_cutoff = value, cutoff
    return best_value, best_cutoff
