"""Measures on the parallelogram ◇ = {0 <= x <= 1, |y - x| <= 1} and exact
Wasserstein-1 distances between finite ones.

Transport problems are solved exactly by network simplex, and the plan is
certified against its dual potentials before it is returned. The S x S
estimator matrix is an assignment problem.
"""

import math
from collections.abc import Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
import ot
from scipy.optimize import linear_sum_assignment
from scipy.spatial.distance import cdist

from .core import AffinePermutation, decreasing, is_bounded
from .decomposition import DomParams, enumerate_W
from .errors import EmptyDomain, InvalidMeasure, TransportFailure, UnboundedInput
from .sampling import Sampler, default_sampler

DIAMOND_DIAMETER = math.sqrt(10)
_EPS = 1e-12


@dataclass(frozen=True)
class DiamondPoint:
    x: float
    y: float

    def __post_init__(self):
        if not (-_EPS <= self.x <= 1 + _EPS and abs(self.y - self.x) <= 1 + _EPS):
            raise InvalidMeasure(f"({self.x}, {self.y}) lies outside the parallelogram")


@dataclass(frozen=True, eq=False)
class DiscreteMeasure:
    """Weighted atoms in ◇. points has shape (n, 2); weights sum to 1."""
    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        points = np.asarray(self.points, dtype=float).reshape(-1, 2)
        weights = np.asarray(self.weights, dtype=float).reshape(-1)
        if len(points) == 0 or len(points) != len(weights):
            raise InvalidMeasure(f"{len(points)} atoms but {len(weights)} weights")
        if np.any(weights <= 0):
            raise InvalidMeasure("weights must be positive")
        if abs(weights.sum() - 1) > _EPS * max(1, len(weights)):
            raise InvalidMeasure(f"weights sum to {weights.sum()!r}, expected 1")
        x, y = points[:, 0], points[:, 1]
        if np.any(x < -_EPS) or np.any(x > 1 + _EPS) or np.any(np.abs(y - x) > 1 + _EPS):
            raise InvalidMeasure("atoms must lie in the parallelogram")
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "weights", weights)

    @property
    def atoms(self) -> list[DiamondPoint]:
        return [DiamondPoint(float(x), float(y)) for x, y in self.points]

    @property
    def is_uniform(self) -> bool:
        return bool(np.all(self.weights == self.weights[0]))

    def __len__(self) -> int:
        return len(self.weights)


def dirac(x: float, y: float) -> DiscreteMeasure:
    return DiscreteMeasure(np.array([[x, y]]), np.array([1.0]))


def uniform(points: Sequence[Sequence[float]] | np.ndarray) -> DiscreteMeasure:
    points = np.asarray(points, dtype=float).reshape(-1, 2)
    return DiscreteMeasure(points, np.full(len(points), 1 / len(points)))


def mixture_of(measures: Sequence[DiscreteMeasure], coefficients: Sequence[float]) -> DiscreteMeasure:
    """Σ a_i ν_i for nonnegative coefficients summing to 1."""
    coefficients = np.asarray(coefficients, dtype=float)
    coefficients = coefficients / coefficients.sum()
    keep = [(m, a) for m, a in zip(measures, coefficients) if a > 0]
    points = np.vstack([m.points for m, _ in keep])
    weights = np.concatenate([a * m.weights for m, a in keep])
    return DiscreteMeasure(points, weights / weights.sum())


@dataclass(frozen=True)
class SlopeOneMixture:
    """λ⟨z⟩: the uniform mixture of uniform measures on the segments
    from (0, z_i) to (1, 1 + z_i)."""
    intercepts: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "intercepts", tuple(float(z) for z in self.intercepts))
        if not self.intercepts:
            raise InvalidMeasure("a mixture needs at least one intercept")
        for z in self.intercepts:
            if abs(z) > 1 + _EPS:
                raise InvalidMeasure(f"intercept {z} lies outside [-1, 1]")

    @property
    def k(self) -> int:
        return len(self.intercepts)

    @property
    def in_q0(self) -> bool:
        return abs(sum(self.intercepts)) <= _EPS


@dataclass(frozen=True, eq=False)
class TransportPlan:
    """Nonnegative flow whose margins match the source and target weights."""
    flow: np.ndarray

    def check(self, source: np.ndarray, target: np.ndarray, tol: float = 1e-9) -> None:
        if np.any(self.flow < -tol):
            raise InvalidMeasure("transport plan has negative flow")
        if not np.allclose(self.flow.sum(axis=1), source, atol=tol, rtol=0):
            raise InvalidMeasure("row sums differ from source weights")
        if not np.allclose(self.flow.sum(axis=0), target, atol=tol, rtol=0):
            raise InvalidMeasure("column sums differ from target weights")


@dataclass(frozen=True)
class Transport:
    distance: float
    plan: TransportPlan


def empirical_measure(sigma: AffinePermutation) -> DiscreteMeasure:
    """Atoms (i/N, σ(i)/N), each of weight 1/N."""
    if not is_bounded(sigma):
        raise UnboundedInput(f"{sigma} is not bounded")
    n = sigma.size
    i = np.arange(1, n + 1, dtype=float)
    points = np.column_stack([i / n, np.asarray(sigma.window, dtype=float) / n])
    return DiscreteMeasure(points, np.full(n, 1 / n))


def discretize(mixture: SlopeOneMixture, segments: int) -> DiscreteMeasure:
    """Midpoint rule: M atoms per segment, ((j - 1/2)/M, (j - 1/2)/M + z_i).

    Wass₁ to the continuous mixture is at most √2/(2M).
    """
    if segments < 1:
        raise InvalidMeasure(f"segments must be >= 1, got {segments}")
    x = (np.arange(1, segments + 1) - 0.5) / segments
    points = np.vstack([np.column_stack([x, x + z]) for z in mixture.intercepts])
    weights = np.full(len(points), 1 / len(points))
    return DiscreteMeasure(points, weights)


def _certify(plan: np.ndarray, a: np.ndarray, b: np.ndarray, cost: np.ndarray, log: dict) -> None:
    """Dual feasibility and a zero duality gap, to 1e-9 scaled by the largest cost."""
    if log.get("warning"):
        raise TransportFailure(f"network simplex stopped early: {log['warning']}")
    tol = 1e-9 * max(1.0, float(cost.max()))
    u, v = log["u"], log["v"]
    reduced = cost - u[:, None] - v[None, :]
    if reduced.min() < -tol:
        raise TransportFailure(f"dual infeasible by {-reduced.min():.3g}")
    primal = float((plan * cost).sum())
    dual = float(a @ u + b @ v)
    if abs(primal - dual) > tol:
        raise TransportFailure(f"duality gap {primal - dual:.3g}")


def _max_iterations(m: int, n: int) -> int:
    return max(100_000, 50 * m * n)


def wass1(mu: DiscreteMeasure, nu: DiscreteMeasure) -> Transport:
    """Exact Wasserstein-1 distance with Euclidean ground cost."""
    a, b = mu.weights, nu.weights
    cost = cdist(mu.points, nu.points)
    flow, log = ot.emd(a, b, cost, numItermax=_max_iterations(len(a), len(b)), log=True)
    plan = TransportPlan(np.asarray(flow))
    plan.check(a, b)
    _certify(plan.flow, a, b, cost, log)
    return Transport(float((plan.flow * cost).sum()), plan)


def wass1_to_mixture(mu: DiscreteMeasure, mixture: SlopeOneMixture, segments: int) -> float:
    """wass1 against the discretized mixture; additive error at most √2/(2M)."""
    return wass1(mu, discretize(mixture, segments)).distance


def mixture_shift_bound(x: Sequence[float], v: Sequence[float]) -> float:
    """(1/k) Σ|x_i - v_i|, an upper bound on Wass₁(λ⟨x⟩, λ⟨v⟩)."""
    if len(x) != len(v):
        raise InvalidMeasure("intercept vectors differ in length")
    return float(np.mean(np.abs(np.asarray(x, dtype=float) - np.asarray(v, dtype=float))))


# --- Q₀ ---


def _draw_q0(k: int, rng: np.random.Generator) -> tuple[np.ndarray, int]:
    attempts = 0
    while True:
        attempts += 1
        head = rng.uniform(-1.0, 1.0, size=k - 1)
        last = -head.sum()
        if abs(last) <= 1:
            return np.append(head, last), attempts


def sample_Q0(k: int, rng: np.random.Generator) -> SlopeOneMixture:
    """Uniform on Q₀ = {z ∈ [-1, 1]^k : Σz_i = 0} by rejection.

    Acceptance is at least 1/2^(k-1).
    """
    if k < 1:
        raise InvalidMeasure(f"k must be >= 1, got {k}")
    z, _ = _draw_q0(k, rng)
    return SlopeOneMixture(tuple(z))


def q0_acceptance_rate(k: int, trials: int, rng: np.random.Generator) -> float:
    accepted = 0
    for _ in range(trials):
        head = rng.uniform(-1.0, 1.0, size=k - 1)
        accepted += abs(head.sum()) <= 1
    return accepted / trials


# --- Wass₂ estimation ---


def assignment_cost(cost: np.ndarray) -> float:
    """Mean cost of the optimal assignment for a square cost matrix."""
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].mean())


def _cost_row(args: tuple[np.ndarray, np.ndarray, list[tuple[float, ...]], int]) -> list[float]:
    points, weights, intercepts, segments = args
    mu = DiscreteMeasure(points, weights)
    return [wass1_to_mixture(mu, SlopeOneMixture(z), segments) for z in intercepts]


def mixture_cost_matrix(
    measures: Sequence[DiscreteMeasure],
    mixtures: Sequence[SlopeOneMixture],
    segments: int,
    workers: int = 1,
) -> np.ndarray:
    """C[i, j] = wass1_to_mixture(measures[i], mixtures[j], M)."""
    intercepts = [m.intercepts for m in mixtures]
    jobs = [(m.points, m.weights, intercepts, segments) for m in measures]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_cost_row, jobs))
    else:
        rows = [_cost_row(job) for job in jobs]
    return np.array(rows, dtype=float)


def wass2_estimate(
    k: int,
    n: int,
    samples: int,
    sampler: Sampler,
    segments: int,
    rng: np.random.Generator,
    workers: int = 1,
) -> float:
    """Plug-in estimate of Wass₂ between random avoiders and λ^{Q₀}.

    Draws S avoiders and S intercept vectors, then solves the S x S
    assignment on the Wass₁ cost matrix.
    """
    if samples < 1:
        raise InvalidMeasure(f"samples must be >= 1, got {samples}")
    perms = sampler.sample(n, samples, rng)
    mixtures = [sample_Q0(k, rng) for _ in range(samples)]
    measures = [empirical_measure(sigma) for sigma in perms]
    return assignment_cost(mixture_cost_matrix(measures, mixtures, segments, workers))


def intercept_distance(
    n: Sequence[int],
    params: DomParams,
    samples: int,
    rng: np.random.Generator,
) -> float:
    """Wass₁ in R^k between Unif({Δ_i/n_i : Δ ∈ W(n)}) and S uniform draws from Q₀."""
    W = enumerate_W(n, params)
    if not W:
        raise EmptyDomain(f"W is empty for n = {tuple(n)}")
    sizes = np.asarray(n, dtype=float)
    scaled = np.asarray(W, dtype=float) / sizes
    k = len(n)
    targets = np.array([_draw_q0(k, rng)[0] for _ in range(samples)])
    cost = cdist(scaled, targets)
    a = np.full(len(scaled), 1 / len(scaled))
    b = np.full(len(targets), 1 / len(targets))
    plan = ot.emd(a, b, cost)
    return float((plan * cost).sum())


def converge_point(
    k: int,
    n: int,
    samples: int,
    segments: int,
    seed: int,
    cap: int | None = None,
    swap_prob: float = 0.8,
    workers: int = 1,
    offset_prob: float = 0.1,
) -> float:
    """wass2_estimate for (k+1)...1-avoiders of size N, seeded by (seed, N)."""
    rng = np.random.default_rng([seed, n])
    sampler = default_sampler(decreasing(k + 1), n, cap, swap_prob, offset_prob)
    return wass2_estimate(k, n, samples, sampler, segments, rng, workers)
