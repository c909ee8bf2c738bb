"""Exact and asymptotic counts of bounded affine permutations.

Closed forms are evaluated with Python integers and ``fractions.Fraction``
so they never round. Asymptotic estimates are carried in the log domain;
N! alone leaves double range before N = 200.
"""

import math
from collections.abc import Iterator, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations, product

from .config import resolve_cap
from .core import AffinePermutation, OrdinaryPermutation
from .errors import CapExceeded, SizeTooSmall
from .patterns import avoids


@dataclass(frozen=True)
class AsymptoticEstimate:
    """A positive real carried as its natural log."""
    log_value: float
    formula_id: str

    @property
    def value(self) -> float:
        try:
            return math.exp(self.log_value)
        except OverflowError:
            return math.inf

    @property
    def log10(self) -> float:
        return self.log_value / math.log(10)

    def ratio(self, exact: int | Fraction) -> float:
        """exact / estimate, computed from log differences."""
        if exact <= 0:
            return 0.0
        if isinstance(exact, Fraction):
            log_exact = math.log(exact.numerator) - math.log(exact.denominator)
        else:
            log_exact = math.log(exact)
        return math.exp(log_exact - self.log_value)


# --- Eulerian numbers and the exact total ---

_EULERIAN_ROWS: list[list[int]] = [[1]]


def _eulerian_row(m: int) -> list[int]:
    while len(_EULERIAN_ROWS) <= m:
        r = len(_EULERIAN_ROWS)
        prev = _EULERIAN_ROWS[-1]
        row = []
        for j in range(r):
            a = (j + 1) * prev[j] if j < len(prev) else 0
            b = (r - j) * prev[j - 1] if 0 < j <= len(prev) else 0
            row.append(a + b)
        _EULERIAN_ROWS.append(row)
    return _EULERIAN_ROWS[m]


def eulerian(m: int, j: int) -> int:
    """Permutations of [m] with exactly j excedances; a(0, 0) = 1."""
    if m < 0:
        return 0
    row = _eulerian_row(m)
    return row[j] if 0 <= j < len(row) else 0


def _binom(n: int, k: int) -> int:
    return math.comb(n, k) if 0 <= k <= n else 0


def exact_total(n: int) -> int:
    """|S̃//_N| = Σ_m C(N,m) Σ_j C(m, N-j) (-1)^(N-m) a(m, j)."""
    if n < 1:
        raise SizeTooSmall(f"N must be >= 1, got {n}")
    total = 0
    for m in range(n + 1):
        inner = sum(_binom(m, n - j) * eulerian(m, j) for j in range(m + 1))
        total += _binom(n, m) * (-1) ** (n - m) * inner
    return total


def asymptotic_total(n: int) -> AsymptoticEstimate:
    """√(3/(2πeN)) · 2^N · N!."""
    if n < 1:
        raise SizeTooSmall(f"N must be >= 1, got {n}")
    log_value = (
        0.5 * (math.log(3) - math.log(2 * math.pi * math.e * n))
        + n * math.log(2)
        + math.lgamma(n + 1)
    )
    return AsymptoticEstimate(log_value, "total")


# --- Brute force ---


def _shift_range(i: int, value: int, n: int) -> range:
    """Shifts d with |value + N d - i| < N."""
    low = -((value - i + n - 1) // n)  # ceil((i - N + 1 - value) / N)
    high = (i + n - 1 - value) // n
    return range(low, high + 1)


def iter_bounded_windows(n: int, first: int | None = None) -> Iterator[tuple[int, ...]]:
    """All bounded windows of size N: π ∈ S_N crossed with valid shift vectors.

    With first given, only permutations with π(1) = first are used, which
    partitions the output for parallel sweeps.
    """
    for pi in permutations(range(1, n + 1)):
        if first is not None and pi[0] != first:
            continue
        ranges = [_shift_range(i, v, n) for i, v in enumerate(pi, start=1)]
        for shifts in product(*ranges):
            if sum(shifts) == 0:
                yield tuple(v + n * d for v, d in zip(pi, shifts))


def _check_cap(n: int, cap: int | None) -> None:
    limit = resolve_cap(cap)
    if n > limit:
        raise CapExceeded(f"N = {n} exceeds the brute-force cap {limit} (set AFFPERM_CAP to raise it)")


def _count_part(args: tuple[int, int]) -> int:
    n, first = args
    return sum(1 for _ in iter_bounded_windows(n, first))


def _avoiders_part(args: tuple[int, int, OrdinaryPermutation]) -> list[tuple[int, ...]]:
    n, first, tau = args
    return [w for w in iter_bounded_windows(n, first) if avoids(AffinePermutation(w), tau)]


def _map_parts(fn, jobs: list, workers: int) -> list:
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, jobs))
    return [fn(job) for job in jobs]


def brute_total(n: int, cap: int | None = None, workers: int = 1) -> int:
    """Count S̃//_N by enumeration."""
    _check_cap(n, cap)
    return sum(_map_parts(_count_part, [(n, f) for f in range(1, n + 1)], workers))


def avoiding_windows(
    n: int,
    tau: OrdinaryPermutation,
    cap: int | None = None,
    workers: int = 1,
) -> list[tuple[int, ...]]:
    """Windows of S̃//_N avoiding tau, sorted lexicographically."""
    _check_cap(n, cap)
    parts = _map_parts(_avoiders_part, [(n, f, tau) for f in range(1, n + 1)], workers)
    return sorted(w for part in parts for w in part)


def brute_avoiders(
    n: int,
    tau: OrdinaryPermutation,
    cap: int | None = None,
    workers: int = 1,
) -> int:
    return len(avoiding_windows(n, tau, cap, workers))


def growth_rate_diagnostic(
    tau: OrdinaryPermutation,
    sizes: Sequence[int],
    cap: int | None = None,
    workers: int = 1,
) -> list[float]:
    """brute_avoiders(N, τ)^(1/N) per N. No convergence is claimed."""
    for n in sizes:
        _check_cap(n, cap)
    return [brute_avoiders(n, tau, cap, workers) ** (1 / n) for n in sizes]


# --- Z(n_1..n_k), André, Z*_k ---


def z_count(parts: Sequence[int]) -> int:
    """Integer vectors with |Δ_i| <= n_i summing to 0.

    Middle coefficient of Π(1 + x + ... + x^(2 n_i)), by exact convolution.
    """
    coeffs = [1]
    for n in parts:
        if n < 0:
            raise SizeTooSmall(f"parts must be nonnegative, got {n}")
        width = 2 * n + 1
        prefix = [0]
        for c in coeffs:
            prefix.append(prefix[-1] + c)
        size = len(coeffs) + width - 1
        coeffs = [
            prefix[min(d + 1, len(coeffs))] - prefix[max(d - width + 1, 0)]
            for d in range(size)
        ]
    return coeffs[sum(parts)]


def z_andre(k: int, n: int) -> int:
    """Z(n,...,n) with k parts, by André's alternating sum."""
    if k < 1 or n < 1:
        raise SizeTooSmall(f"need k, n >= 1, got k={k}, n={n}")
    total = Fraction(0)
    for j in range(k * n // (2 * n + 1) + 1):
        top = k + k * n - j * (2 * n + 1) - 1
        bottom = k * n - j * (2 * n + 1)
        if j > k:
            break
        term = Fraction(
            math.factorial(top),
            math.factorial(j) * math.factorial(k - j) * math.factorial(bottom),
        )
        total += -term if j % 2 else term
    total *= k
    assert total.denominator == 1
    return total.numerator


def z_star(k: int) -> Fraction:
    """(1/(k-1)!) Σ_j (-1)^j C(k,j) (k-2j)^(k-1), exact."""
    if k < 1:
        raise SizeTooSmall(f"k must be >= 1, got {k}")
    s = sum((-1) ** j * math.comb(k, j) * (k - 2 * j) ** (k - 1) for j in range(k // 2 + 1))
    return Fraction(s, math.factorial(k - 1))


def z_limit_ratio(k: int, n: int) -> float:
    return float(Fraction(z_andre(k, n), n ** (k - 1)))


# --- Multinomial sums and bounds ---


def compositions(total: int, parts: int, minimum: int = 0) -> Iterator[tuple[int, ...]]:
    """Ordered tuples of `parts` integers >= minimum summing to total."""
    if parts == 1:
        if total >= minimum:
            yield (total,)
        return
    for first in range(minimum, total - minimum * (parts - 1) + 1):
        for rest in compositions(total - first, parts - 1, minimum):
            yield (first, *rest)


def multinomial(parts: Sequence[int]) -> int:
    result, remaining = 1, sum(parts)
    for p in parts:
        result *= math.comb(remaining, p)
        remaining -= p
    return result


def _restricted_square_sum(k: int, n: int, allowed) -> int:
    """Σ multinomial(N; n)^2 over n >= 0 with every n_i allowed."""
    row = [1] + [0] * n  # one part used zero times: only M = 0
    for _ in range(k):
        row = [
            sum(
                math.comb(m, j) ** 2 * row[m - j]
                for j in range(m + 1)
                if allowed(j) and row[m - j]
            )
            for m in range(n + 1)
        ]
    return row[n]


def multinomial_sq_sum(k: int, n: int) -> int:
    """Σ over n ≥ 0, Σ n_i = N of multinomial(N; n)^2."""
    return _restricted_square_sum(k, n, lambda j: True)


def asymptotic_rs(k: int, n: int) -> AsymptoticEstimate:
    """k^(2N + k/2) (4πN)^((1-k)/2)."""
    if k < 2:
        raise SizeTooSmall(f"k must be >= 2, got {k}")
    log_value = (2 * n + k / 2) * math.log(k) + (1 - k) / 2 * math.log(4 * math.pi * n)
    return AsymptoticEstimate(log_value, "richmond-shallit")


def upper_bound_avoiders(k: int, n: int) -> int:
    """(1/k!) Σ_{n ≥ 1} multinomial(N; n)^2 Z(n)."""
    if n < k:
        raise SizeTooSmall(f"N = {n} is smaller than k = {k}")
    total = sum(multinomial(c) ** 2 * z_count(c) for c in compositions(n, k, minimum=1))
    quotient, remainder = divmod(total, math.factorial(k))
    assert remainder == 0, f"{k}! does not divide {total}"
    return quotient


def a_m_constant(m: int) -> float:
    """The constant A_m in the (m...1)-avoider asymptotics."""
    if m < 2:
        raise SizeTooSmall(f"m must be >= 2, got {m}")
    s = sum((-1) ** j * math.comb(m - 1, j) * (m - 2 * j - 1) ** (m - 2) for j in range((m - 1) // 2 + 1))
    log_den = (
        (m - 2) / 2 * math.log(4 * math.pi)
        + (m - 1) / 2 * math.log(m - 1)
        + 2 * math.lgamma(m - 1)
    )
    return s * math.exp(-log_den)


def asymptotic_avoiders(k: int, n: int) -> AsymptoticEstimate:
    """k^(2N) (N/4π)^((k-1)/2) Z*_k / (k^(k/2) (k-1)!)."""
    if k < 1:
        raise SizeTooSmall(f"k must be >= 1, got {k}")
    zs = z_star(k)
    log_value = (
        2 * n * math.log(k)
        + (k - 1) / 2 * math.log(n / (4 * math.pi))
        + math.log(zs.numerator) - math.log(zs.denominator)
        - k / 2 * math.log(k)
        - math.lgamma(k)
    )
    return AsymptoticEstimate(log_value, "avoiders")


def _exact_fraction(x: float | Fraction) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(str(x))


@dataclass(frozen=True)
class TailReport:
    lhs: int
    rhs: float
    log_rhs: float
    holds: bool


def tail_bound_check(k: int, n: int, alpha: float | Fraction, cap: int | None = None) -> TailReport:
    """Compare the exact multinomial² mass with some |n_i - N/k| > αN to 4k^(2N+2)e^(-4Nα²)."""
    limit = resolve_cap(cap, "sum_cap")
    if n > limit:
        raise CapExceeded(f"N = {n} exceeds the exact-sum cap {limit}")
    a = _exact_fraction(alpha)
    if not 0 < a < Fraction(1, k):
        raise SizeTooSmall(f"alpha must lie in (0, 1/{k}), got {alpha}")
    center, radius = Fraction(n, k), a * n
    inner = _restricted_square_sum(k, n, lambda j: abs(j - center) <= radius)
    lhs = multinomial_sq_sum(k, n) - inner
    alpha_f = float(a)
    log_rhs = math.log(4) + (2 * n + 2) * math.log(k) - 4 * n * alpha_f ** 2
    holds = lhs == 0 or math.log(lhs) <= log_rhs
    try:
        rhs = math.exp(log_rhs)
    except OverflowError:
        rhs = math.inf
    return TailReport(lhs=lhs, rhs=rhs, log_rhs=log_rhs, holds=holds)
