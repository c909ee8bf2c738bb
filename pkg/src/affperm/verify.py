"""Self-verification suites behind ``affperm verify``.

Each suite pits a closed form or fast algorithm against an independent
oracle: exhaustive enumeration, exact rational arithmetic, or a sampled
statistical test. The quick level shrinks every grid; the full level runs
them at their stated sizes.
"""

import math
import time
from collections.abc import Callable, Iterator, Sequence
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

import numpy as np
from scipy.spatial.distance import cdist

from .core import AffinePermutation, decreasing, is_bounded, validate_affine
from .counting import (
    a_m_constant,
    asymptotic_avoiders,
    asymptotic_rs,
    brute_avoiders,
    brute_total,
    exact_total,
    iter_bounded_windows,
    multinomial_sq_sum,
    tail_bound_check,
    upper_bound_avoiders,
    z_andre,
    z_count,
    z_star,
)
from .decomposition import (
    DecompTuple,
    DomParams,
    DomSampler,
    iter_d0_tuples,
    psi,
    psi_inverse,
    strip_deviation,
    verify_k_factorial,
)
from .measures import (
    DIAMOND_DIAMETER,
    DiscreteMeasure,
    SlopeOneMixture,
    converge_point,
    empirical_measure,
    mixture_of,
    uniform,
    wass1,
    wass1_to_mixture,
)
from .patterns import avoids_decreasing, contains_affine, default_limit
from .sampling import McmcConfig, chi_square_uniformity, enumerate_avoiders, mcmc_sample, reachable_set

LEVELS = ("quick", "full")

# Dom(40, 0.1, 3, 7): non-empty, and Ψ(Dom) is bounded for these parameters.
DOM_N = 40
DOM_PARAMS = DomParams(Fraction(1, 10), 3, 7)


@dataclass
class SuiteResult:
    name: str
    passed: bool
    detail: str
    elapsed: float


@dataclass(frozen=True)
class Suite:
    name: str
    run: Callable[[bool, int], tuple[bool, str]]
    full_only: bool = False


# --- brute-force transport oracle ---


def _tree_flow(
    cells: Sequence[tuple[int, int]],
    a: Sequence[Fraction],
    b: Sequence[Fraction],
) -> dict[tuple[int, int], Fraction] | None:
    """Basic solution on a spanning-tree support, by peeling leaves; None if not a tree."""
    supply, demand = list(a), list(b)
    remaining = set(cells)
    flow: dict[tuple[int, int], Fraction] = {}
    while remaining:
        leaf = None
        for side, size in ((0, len(a)), (1, len(b))):
            for idx in range(size):
                touching = [c for c in remaining if c[side] == idx]
                if len(touching) == 1:
                    leaf = (side, touching[0])
                    break
            if leaf:
                break
        if leaf is None:
            return None
        side, (i, j) = leaf
        amount = supply[i] if side == 0 else demand[j]
        flow[(i, j)] = amount
        supply[i] -= amount
        demand[j] -= amount
        remaining.discard((i, j))
    if any(supply) or any(demand) or any(f < 0 for f in flow.values()):
        return None
    return flow


def brute_transport(a: Sequence[Fraction], b: Sequence[Fraction], cost: np.ndarray) -> float:
    """Optimal transport cost by enumerating every vertex of the transportation polytope.

    Vertex flows are exact rationals; only the objective is a float.
    """
    m, n = len(a), len(b)
    cells = [(i, j) for i in range(m) for j in range(n)]
    best = math.inf
    for support in combinations(cells, m + n - 1):
        flow = _tree_flow(support, a, b)
        if flow is None:
            continue
        best = min(best, sum(float(f) * cost[c] for c, f in flow.items()))
    return best


def _random_points(rng: np.random.Generator, count: int) -> np.ndarray:
    x = rng.uniform(0, 1, count)
    return np.column_stack([x, x + rng.uniform(-1, 1, count)])


def _random_weights(rng: np.random.Generator, count: int) -> list[Fraction]:
    raw = [int(w) for w in rng.integers(1, 10, size=count)]
    total = sum(raw)
    return [Fraction(w, total) for w in raw]


def _random_measure(rng: np.random.Generator, max_atoms: int = 4) -> DiscreteMeasure:
    count = int(rng.integers(1, max_atoms + 1))
    weights = rng.uniform(0.1, 1, count)
    return DiscreteMeasure(_random_points(rng, count), weights / weights.sum())


# --- suites ---


def _check_totals(full: bool, seed: int) -> tuple[bool, str]:
    top = 6 if full else 5
    for n in range(1, top + 1):
        exact, brute = exact_total(n), brute_total(n, cap=top)
        if exact != brute:
            return False, f"N={n}: formula {exact} != enumeration {brute}"
    return True, f"N=1..{top}"


def _check_z_star(full: bool, seed: int) -> tuple[bool, str]:
    expected = [Fraction(1), Fraction(2), Fraction(3), Fraction(16, 3), Fraction(115, 12)]
    got = [z_star(k) for k in range(1, 6)]
    if got != expected:
        return False, f"got {[str(z) for z in got]}"
    return True, "1, 2, 3, 16/3, 115/12"


def _check_andre(full: bool, seed: int) -> tuple[bool, str]:
    top = 10 if full else 6
    for k in range(1, 6):
        for n in range(1, top + 1):
            if z_andre(k, n) != z_count([n] * k):
                return False, f"k={k}, n={n}: André sum differs from convolution"
        ratio = Fraction(z_andre(k, 200), 200 ** (k - 1)) / z_star(k)
        if abs(ratio - 1) > Fraction(1, 20):
            return False, f"k={k}: Z/n^(k-1) off Z*_k by {float(ratio - 1):.3g}"
    return True, f"k<=5, n<={top}; n=200 within 5%"


def _check_upper_bound(full: bool, seed: int) -> tuple[bool, str]:
    top = 7 if full else 5
    tau = decreasing(3)
    ratios = []
    for n in range(2, top + 1):
        brute, bound = brute_avoiders(n, tau, cap=top), upper_bound_avoiders(2, n)
        if brute > bound:
            return False, f"N={n}: {brute} avoiders exceed the bound {bound}"
        ratios.append(Fraction(brute, bound))
    # the ratio dips from N=2 to N=4 before it starts rising
    tail = ratios[2:]
    if any(x >= y for x, y in zip(tail, tail[1:])):
        return False, f"ratios not increasing from N=4: {[f'{float(r):.4f}' for r in ratios]}"
    return True, f"N=2..{top}, ratio {float(ratios[0]):.3f} -> {float(ratios[-1]):.3f}"


def _check_coefficients(full: bool, seed: int) -> tuple[bool, str]:
    for k in range(2, 7):
        for n in range(1, 51):
            got = asymptotic_avoiders(k, n).log_value
            want = math.log(a_m_constant(k + 1)) + (k - 1) / 2 * math.log(n) + 2 * n * math.log(k)
            if abs(got - want) > 1e-9:
                return False, f"k={k}, N={n}: log mismatch {got - want:.3g}"
    for n in range(1, 51):
        got = asymptotic_avoiders(2, n).log_value
        want = n * math.log(4) + 0.5 * math.log(n / (4 * math.pi))
        if abs(got - want) > 1e-9:
            return False, f"k=2, N={n}: differs from 4^N sqrt(N/4π)"
    return True, "k<=6, N<=50"


def _check_richmond_shallit(full: bool, seed: int) -> tuple[bool, str]:
    sizes = [10, 20, 40, 80]
    ratios = [asymptotic_rs(2, n).ratio(multinomial_sq_sum(2, n)) for n in sizes]
    at40 = ratios[sizes.index(40)]
    if not 0.95 < at40 < 1.05:
        return False, f"N=40 ratio {at40:.6f}"
    gaps = [abs(r - 1) for r in ratios]
    if any(x <= y for x, y in zip(gaps, gaps[1:])):
        return False, f"ratios not approaching 1: {[f'{r:.6f}' for r in ratios]}"
    return True, f"ratio at N=80: {ratios[-1]:.6f}"


def _check_tail(full: bool, seed: int) -> tuple[bool, str]:
    top = 25 if full else 12
    cases = 0
    for k in (2, 3):
        for alpha in (Fraction(1, 20), Fraction(1, 10), Fraction(1, 5)):
            for n in range(k, top + 1):
                report = tail_bound_check(k, n, alpha)
                cases += 1
                if not report.holds:
                    return False, f"k={k}, alpha={alpha}, N={n}: {report.lhs} > {report.rhs:.6g}"
    return True, f"{cases} cases"


def _check_psi(full: bool, seed: int) -> tuple[bool, str]:
    top = 5 if full else 4
    tau = decreasing(3)
    for n in range(2, top + 1):
        for sigma in enumerate_avoiders(n, tau, cap=top):
            if psi(psi_inverse(sigma, 2)) != sigma:
                return False, f"round trip fails at {sigma}"
    for n in range(2, (4 if full else 3) + 1):
        image = {s for s in map(psi, iter_d0_tuples(n, 2)) if is_bounded(s)}
        if image != set(enumerate_avoiders(n, tau, cap=n)):
            return False, f"N={n}: bounded image of Ψ differs from the 321-avoiders"
    example = DecompTuple(
        (4, 6),
        ((1, 5, 6, 9), (2, 3, 4, 7, 8, 10)),
        ((2, 3, 6, 10), (1, 4, 5, 7, 8, 9)),
        (2, -2),
    )
    if psi(example).window != (6, -2, -1, 1, 10, 12, 4, 5, 13, 7):
        return False, f"worked example gives {psi(example)}"
    return True, f"round trip N<={top}"


def _check_k_factorial(full: bool, seed: int) -> tuple[bool, str]:
    report = verify_k_factorial(DOM_PARAMS, DOM_N, 2, 200 if full else 40, seed)
    if not report.passed:
        return False, report.counterexample or "failed"
    return True, f"{report.samples} samples, {report.images} images"


def _check_pattern_methods(full: bool, seed: int) -> tuple[bool, str]:
    top = 5 if full else 4
    checked = 0
    for m in (3, 4):
        tau = decreasing(m)
        for n in range(1, top + 1):
            for w in iter_bounded_windows(n):
                sigma = AffinePermutation(w)
                found = contains_affine(sigma, tau, minimal=False)
                if (found is None) != avoids_decreasing(sigma, m):
                    return False, f"{sigma}, {tau}: search and ranks disagree"
                doubled = contains_affine(sigma, tau, limit=2 * default_limit(n, m), minimal=False)
                if (found is None) != (doubled is None):
                    return False, f"{sigma}, {tau}: doubling the window changes the answer"
                checked += 1
    return True, f"{checked} cases"


def _check_transport(full: bool, seed: int) -> tuple[bool, str]:
    rng = np.random.default_rng(seed)
    instances = 500 if full else 60
    for _ in range(instances):
        m, n = (int(x) for x in rng.integers(1, 5 if full else 4, size=2))
        a, b = _random_weights(rng, m), _random_weights(rng, n)
        mu = DiscreteMeasure(_random_points(rng, m), np.array([float(x) for x in a]))
        nu = DiscreteMeasure(_random_points(rng, n), np.array([float(x) for x in b]))
        oracle = brute_transport(a, b, cdist(mu.points, nu.points))
        got = wass1(mu, nu).distance
        if abs(got - oracle) > 1e-9:
            return False, f"{m}x{n} instance: solver {got!r} vs vertex oracle {oracle!r}"

    bound_cases = 200 if full else 30
    for _ in range(bound_cases):
        size = int(rng.integers(1, 4))
        nus = [_random_measure(rng) for _ in range(size)]
        omegas = [_random_measure(rng) for _ in range(size)]
        coeffs = rng.uniform(0.1, 1, size)
        coeffs /= coeffs.sum()
        lhs = wass1(mixture_of(nus, coeffs), mixture_of(omegas, coeffs)).distance
        rhs = sum(c * wass1(x, y).distance for c, x, y in zip(coeffs, nus, omegas))
        if lhs > rhs + 1e-9:
            return False, f"mixture bound: {lhs} > {rhs}"

        other = rng.uniform(0.1, 1, size)
        other /= other.sum()
        lhs = wass1(mixture_of(nus, coeffs), mixture_of(nus, other)).distance
        rhs = DIAMOND_DIAMETER * float(np.abs(coeffs - other).sum())
        if lhs > rhs + 1e-9:
            return False, f"reweighting bound: {lhs} > {rhs}"

        grid = _random_points(rng, int(rng.integers(2, 9)))
        keep = int(rng.integers(1, len(grid) + 1))
        subset, superset = uniform(grid[:keep]), uniform(grid)
        diameter = float(cdist(grid, grid).max())
        lhs = wass1(subset, superset).distance
        rhs = diameter * (len(grid) - keep) / len(grid)
        if lhs > rhs + 1e-9:
            return False, f"nested-uniform bound: {lhs} > {rhs}"
    return True, f"{instances} LP instances, {bound_cases} bound instances"


def _check_strip(full: bool, seed: int) -> tuple[bool, str]:
    k, p = 2, DOM_PARAMS
    sampler = DomSampler(DOM_N, k, p)
    rng = np.random.default_rng(seed)
    count = 1000 if full else 50
    strip = 2 * p.strip_width(k)
    bound = p.wass1_bound(DOM_N, k) + math.sqrt(2) / (20 * DOM_N)
    worst = 0.0
    for _ in range(count):
        t = sampler.sample(rng)
        if strip_deviation(t) >= strip:
            return False, f"strip violated by {t}"
        sigma = psi(t)
        if not is_bounded(sigma):
            return False, f"Ψ({t}) is unbounded"
        mixture = SlopeOneMixture(tuple(d / size for d, size in zip(t.delta, t.n)))
        dist = wass1_to_mixture(empirical_measure(sigma), mixture, 10 * DOM_N)
        worst = max(worst, dist)
        if dist > bound:
            return False, f"Wass1 {dist:.6f} above bound {bound:.6f}"
    return True, f"{count} tuples, worst Wass1 {worst:.4f} <= {bound:.4f}"


def _check_convergence(full: bool, seed: int) -> tuple[bool, str]:
    sizes = (4, 8, 16, 32)
    estimates = [converge_point(2, n, 40, 10 * n, seed) for n in sizes]
    shown = ", ".join(f"{e:.4f}" for e in estimates)
    if any(x <= y for x, y in zip(estimates, estimates[1:])):
        return False, f"not strictly decreasing: {shown}"
    if estimates[-1] >= estimates[0] / 2:
        return False, f"N=32 not below half of N=4: {shown}"
    return True, shown


def _check_mcmc(full: bool, seed: int) -> tuple[bool, str]:
    n, tau = 4, decreasing(3)
    universe = enumerate_avoiders(n, tau, cap=n)
    steps = 1_000_000 if full else 200_000
    # Pearson's test needs near-independent draws; thin = N^2 is too short here
    samples = mcmc_sample(n, tau, McmcConfig(steps=steps, burn_in=50 * n * n, thin=64, seed=seed))
    for sigma in samples[:: max(1, len(samples) // 100)]:
        validate_affine(sigma.window)
        if not (is_bounded(sigma) and avoids_decreasing(sigma, 3)):
            return False, f"chain emitted {sigma}"
    result = chi_square_uniformity(samples, universe)
    if result.p_value <= 0.01:
        return False, f"chi-square {result.statistic:.1f} on {result.dof} dof, p={result.p_value:.4g}"
    top = 5 if full else 4
    for size in range(1, top + 1):
        if reachable_set(size, tau) != set(enumerate_avoiders(size, tau, cap=top)):
            return False, f"N={size}: reachable set differs from the universe"
    return True, f"p={result.p_value:.3f}; reachability N<={top}"


SUITES: list[Suite] = [
    Suite("exact total", _check_totals),
    Suite("Z*_k table", _check_z_star),
    Suite("André sum", _check_andre),
    Suite("upper bound", _check_upper_bound),
    Suite("asymptotic coefficient", _check_coefficients),
    Suite("multinomial squares", _check_richmond_shallit),
    Suite("tail bound", _check_tail),
    Suite("Ψ round trip", _check_psi),
    Suite("k!-to-1", _check_k_factorial),
    Suite("pattern methods", _check_pattern_methods),
    Suite("transport", _check_transport),
    Suite("strip and Wass1", _check_strip),
    Suite("convergence trend", _check_convergence, full_only=True),
    Suite("MCMC uniformity", _check_mcmc),
]


def selected_suites(level: str) -> list[Suite]:
    if level not in LEVELS:
        raise ValueError(f"level must be one of {LEVELS}, got {level!r}")
    return [s for s in SUITES if level == "full" or not s.full_only]


def run_suites(level: str, seed: int = 0, suites: Sequence[Suite] | None = None) -> Iterator[SuiteResult]:
    """Yield one result per suite. Exceptions count as failures."""
    full = level == "full"
    for suite in selected_suites(level) if suites is None else suites:
        start = time.perf_counter()
        try:
            passed, detail = suite.run(full, seed)
        except Exception as e:
            passed, detail = False, f"{type(e).__name__}: {e}"
        yield SuiteResult(suite.name, passed, detail, time.perf_counter() - start)
