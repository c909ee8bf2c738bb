"""Pattern containment and avoidance.

Decreasing patterns are handled through ranks: the rank of position a is the
length of the longest decreasing subsequence starting there. In a bounded
affine permutation every such subsequence lies in the index window
[a, a + 2N - 2], since σ(j) < σ(a) < a + N and σ(j) > j - N. General
patterns use a depth-first search over a finite index window.
"""

from bisect import bisect_left
from collections.abc import Iterator, Sequence
from dataclasses import dataclass

from .core import AffinePermutation, OrdinaryPermutation, evaluate, is_bounded
from .errors import CapExceeded, InvalidPattern, SizeTooSmall, TooManyRanks, UnboundedInput

PARTITION_LIMIT = 10_000


@dataclass(frozen=True)
class Occurrence:
    """Positions (and realized values) of a pattern occurrence."""
    pattern: OrdinaryPermutation
    positions: tuple[int, ...]
    values: tuple[int, ...]

    @property
    def span(self) -> int:
        return self.positions[-1] - self.positions[0]


@dataclass(frozen=True)
class IncreasingPartition:
    """k disjoint non-empty blocks covering [N], each sorted ascending."""
    k: int
    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.blocks) != self.k or any(not b for b in self.blocks):
            raise ValueError(f"expected {self.k} non-empty blocks")
        covered = sorted(x for b in self.blocks for x in b)
        if covered != list(range(1, len(covered) + 1)):
            raise ValueError("blocks must partition [N]")

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(b) for b in self.blocks)


def _require_bounded(sigma: AffinePermutation) -> None:
    if not is_bounded(sigma):
        raise UnboundedInput(f"{sigma} has some |σ(i) - i| >= {sigma.size}")


def _is_consistent(values: Sequence[int], chosen: list[int], v: int, pattern: Sequence[int]) -> bool:
    """Would appending value v keep the chosen prefix order-isomorphic to pattern?"""
    t = len(chosen)
    pt = pattern[t]
    for s, j in enumerate(chosen):
        if (v > values[j]) != (pt > pattern[s]):
            return False
    return True


def _first_occurrence(
    values: Sequence[int],
    pattern: Sequence[int],
    first: int,
    last_limit: int,
) -> list[int] | None:
    """Lexicographically first occurrence with positions[0] == first, all <= last_limit.

    Positions are 0-based indices into values.
    """
    m = len(pattern)
    chosen = [first]

    def extend() -> bool:
        if len(chosen) == m:
            return True
        # leave room for the remaining slots
        stop = last_limit - (m - len(chosen) - 1)
        for j in range(chosen[-1] + 1, stop + 1):
            if _is_consistent(values, chosen, values[j], pattern):
                chosen.append(j)
                if extend():
                    return True
                chosen.pop()
        return False

    return list(chosen) if extend() else None


def contains_ordinary(pi: OrdinaryPermutation, tau: OrdinaryPermutation) -> Occurrence | None:
    """Find an occurrence of tau in the ordinary permutation pi."""
    values = pi.values
    n, m = len(values), tau.size
    if m > n:
        return None
    for a in range(n - m + 1):
        found = _first_occurrence(values, tau.values, a, n - 1)
        if found:
            return Occurrence(
                tau,
                tuple(j + 1 for j in found),
                tuple(values[j] for j in found),
            )
    return None


def _ranks(sigma: AffinePermutation) -> list[int]:
    """Ranks of positions 1..N via a right-to-left DP over indices 1..3N-2."""
    n = sigma.size
    width = max(3 * n - 2, 1)
    values = [evaluate(sigma, i) for i in range(1, width + 1)]
    best = [1] * width
    for i in range(width - 1, -1, -1):
        vi = values[i]
        stop = min(width, i + 2 * n - 1)
        for j in range(i + 1, stop):
            if values[j] < vi and best[j] + 1 > best[i]:
                best[i] = best[j] + 1
    return best[:n]


def rank(sigma: AffinePermutation, a: int) -> int:
    """Longest decreasing subsequence of σ starting at position a."""
    _require_bounded(sigma)
    n = sigma.size
    width = 2 * n - 1
    values = [evaluate(sigma, a + d) for d in range(width)]
    best = [1] * width
    for i in range(width - 1, -1, -1):
        vi = values[i]
        for j in range(i + 1, width):
            if values[j] < vi and best[j] + 1 > best[i]:
                best[i] = best[j] + 1
    return best[0]


def longest_decreasing(sigma: AffinePermutation) -> int:
    """max over a of rank(σ, a), by patience sorting over indices 1..3N-2."""
    _require_bounded(sigma)
    n = sigma.size
    tails: list[int] = []
    for i in range(1, max(3 * n - 2, 1) + 1):
        v = -evaluate(sigma, i)
        pos = bisect_left(tails, v)
        if pos == len(tails):
            tails.append(v)
        else:
            tails[pos] = v
    return len(tails)


def avoids_decreasing(sigma: AffinePermutation, m: int) -> bool:
    """True iff σ avoids m(m-1)...1, i.e. every rank is at most m - 1."""
    if m < 2:
        raise InvalidPattern(f"decreasing pattern length must be >= 2, got {m}")
    return longest_decreasing(sigma) <= m - 1


def is_increasing_block(sigma: AffinePermutation, block: Sequence[int]) -> bool:
    """σ(g_1) < ... < σ(g_w) < σ(g_1 + N) for a sorted block."""
    vals = [evaluate(sigma, g) for g in block]
    vals.append(evaluate(sigma, block[0] + sigma.size))
    return all(x < y for x, y in zip(vals, vals[1:]))


def _crosses(sigma: AffinePermutation, a: int, b: int) -> bool:
    """Does a form an inversion with some b + tN? Bounded σ needs only |t| <= 2."""
    n = sigma.size
    va, vb = evaluate(sigma, a), evaluate(sigma, b)
    return any((b + t * n - a) * (vb + t * n - va) < 0 for t in range(-2, 3))


def increasing_partitions(
    sigma: AffinePermutation,
    k: int,
    limit: int = PARTITION_LIMIT,
) -> Iterator[IncreasingPartition]:
    """Every partition of [N] into k increasing periodic blocks.

    Proper k-colourings of the graph joining positions whose periodic copies
    cross, each yielded once with blocks by ascending minimum.
    """
    _require_bounded(sigma)
    n = sigma.size
    if n < k:
        raise SizeTooSmall(f"N = {n} is smaller than k = {k}")
    earlier = [[]] + [[b for b in range(1, a) if _crosses(sigma, a, b)] for a in range(1, n + 1)]
    colour = [0] * (n + 1)
    found = 0

    def assign(a: int, used: int) -> Iterator[IncreasingPartition]:
        nonlocal found
        if n - a + 1 < k - used:
            return
        if a > n:
            found += 1
            if found > limit:
                raise CapExceeded(f"more than {limit} increasing partitions of {sigma}")
            blocks = [[x for x in range(1, n + 1) if colour[x] == c] for c in range(k)]
            yield IncreasingPartition(k, tuple(tuple(b) for b in blocks))
            return
        for c in range(min(used + 1, k)):
            if any(colour[b] == c for b in earlier[a]):
                continue
            colour[a] = c
            yield from assign(a + 1, max(used, c + 1))

    yield from assign(1, 0)


def decompose_increasing(sigma: AffinePermutation, k: int) -> IncreasingPartition:
    """Canonical partition of [N] into k increasing periodic blocks.

    Rank classes first; while fewer than k blocks exist, the largest block
    (earliest on ties) gives up its first element to a new block. Blocks
    are returned by ascending minimum.
    """
    _require_bounded(sigma)
    n = sigma.size
    if n < k:
        raise SizeTooSmall(f"N = {n} is smaller than k = {k}")
    ranks = _ranks(sigma)
    top = max(ranks)
    if top > k:
        a = ranks.index(top) + 1
        raise TooManyRanks(f"position {a} has rank {top} > {k}", indices=(a,))

    blocks = [[a for a in range(1, n + 1) if ranks[a - 1] == r] for r in range(1, k + 1)]
    blocks = sorted((b for b in blocks if b), key=lambda b: b[0])
    while len(blocks) < k:
        largest = max(range(len(blocks)), key=lambda i: (len(blocks[i]), -i))
        head, *rest = blocks[largest]
        blocks[largest] = rest
        blocks.append([head])
        blocks.sort(key=lambda b: b[0])

    partition = IncreasingPartition(k, tuple(tuple(b) for b in blocks))
    assert all(is_increasing_block(sigma, b) for b in partition.blocks)
    return partition


def default_limit(n: int, m: int) -> int:
    """Largest index searched by contains_affine: N + 3N(m - 1)."""
    return n + 3 * n * (m - 1)


def contains_affine(
    sigma: AffinePermutation,
    tau: OrdinaryPermutation,
    limit: int | None = None,
    minimal: bool = True,
) -> Occurrence | None:
    """Find an occurrence of tau in σ with first index in [1, N].

    Indices range over [1, limit], default N + 3N(m - 1): an occurrence with
    a gap of 3N or more can be shifted to close that gap without changing
    the realized pattern. With minimal=True the occurrence of smallest span
    is returned (earliest first index, then lexicographic on ties);
    otherwise the first one found.
    """
    _require_bounded(sigma)
    n, m = sigma.size, tau.size
    limit = default_limit(n, m) if limit is None else limit
    values = [evaluate(sigma, i) for i in range(1, limit + 1)]

    best: list[int] | None = None
    for a in range(min(n, limit - m + 1)):
        last_limit = limit - 1
        if best is not None:
            last_limit = min(last_limit, a + (best[-1] - best[0]) - 1)
        while last_limit >= a + m - 1:
            found = _first_occurrence(values, tau.values, a, last_limit)
            if not found:
                break
            best = found
            if not minimal:
                break
            last_limit = found[-1] - 1
        if best is not None and not minimal:
            break

    if best is None:
        return None
    return Occurrence(tau, tuple(j + 1 for j in best), tuple(values[j] for j in best))


def avoids(sigma: AffinePermutation, tau: OrdinaryPermutation) -> bool:
    """Pattern avoidance, by ranks for decreasing tau and by search otherwise."""
    if tau.size == 1:
        return False
    if tau.is_decreasing:
        return avoids_decreasing(sigma, tau.size)
    return contains_affine(sigma, tau, minimal=False) is None
