"""The Ψ correspondence between decomposition tuples and affine permutations.

A tuple (n, G, H, Δ) splits [N] into k blocks twice (G for positions, H for
values) and gives each block a cyclic offset Δ_i. Ψ sends the j-th element
of G_i to the (j + Δ_i)-th element of H_i, with blocks extended
periodically: h_{i, j + t n_i} = h_{i, j} + tN.

Dom restricts tuples to nearly uniform block sizes and spacings and well
separated offsets. On Dom, Ψ is exactly k!-to-1 and its image is bounded.
All Dom predicates use exact rationals.
"""

import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, permutations, product

import numpy as np

from .config import resolve_cap
from .core import AffinePermutation, evaluate
from .counting import compositions, z_count
from .errors import CapExceeded, EmptyDomain, InvalidTuple, MalformedInput
from .patterns import decompose_increasing, increasing_partitions


def _as_fraction(x: float | int | Fraction) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    return Fraction(str(x))


def _check_partition(name: str, blocks: Sequence[Sequence[int]], sizes: Sequence[int]) -> None:
    for i, (block, size) in enumerate(zip(blocks, sizes), start=1):
        if len(block) != size:
            raise InvalidTuple(f"|{name}_{i}| = {len(block)} but n_{i} = {size}")
        if len(set(block)) != len(block):
            raise InvalidTuple(f"{name}_{i} has repeated elements")
    n = sum(sizes)
    covered = sorted(x for b in blocks for x in b)
    if covered != list(range(1, n + 1)):
        raise InvalidTuple(f"{name} is not a partition of [{n}]")


@dataclass(frozen=True)
class DecompTuple:
    """A tuple in D₀: Σn_i = N, G and H partition [N] with |G_i| = |H_i| = n_i,
    |Δ_i| <= n_i and ΣΔ_i = 0. Blocks are stored sorted."""
    n: tuple[int, ...]
    G: tuple[tuple[int, ...], ...]
    H: tuple[tuple[int, ...], ...]
    delta: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "n", tuple(self.n))
        object.__setattr__(self, "delta", tuple(self.delta))
        object.__setattr__(self, "G", tuple(tuple(sorted(b)) for b in self.G))
        object.__setattr__(self, "H", tuple(tuple(sorted(b)) for b in self.H))
        k = len(self.n)
        if k == 0:
            raise InvalidTuple("k must be >= 1")
        if not len(self.G) == len(self.H) == len(self.delta) == k:
            raise InvalidTuple(f"n, G, H and delta must all have {k} entries")
        for i, size in enumerate(self.n, start=1):
            if size < 1:
                raise InvalidTuple(f"n_{i} = {size} must be positive")
        _check_partition("G", self.G, self.n)
        _check_partition("H", self.H, self.n)
        for i, (d, size) in enumerate(zip(self.delta, self.n), start=1):
            if abs(d) > size:
                raise InvalidTuple(f"|Δ_{i}| = {abs(d)} exceeds n_{i} = {size}")
        if sum(self.delta) != 0:
            raise InvalidTuple(f"ΣΔ_i = {sum(self.delta)}, expected 0")

    @property
    def k(self) -> int:
        return len(self.n)

    @property
    def N(self) -> int:
        return sum(self.n)

    def g(self, i: int, j: int) -> int:
        """g_{i,j} for block i (0-based) and any integer j."""
        q, r = divmod(j - 1, self.n[i])
        return self.G[i][r] + q * self.N

    def h(self, i: int, j: int) -> int:
        q, r = divmod(j - 1, self.n[i])
        return self.H[i][r] + q * self.N


@dataclass(frozen=True)
class DomParams:
    """Parameters (α, A, B) of the restricted domain, held as exact rationals."""
    alpha: Fraction
    A: Fraction
    B: Fraction

    def __post_init__(self):
        for name in ("alpha", "A", "B"):
            value = _as_fraction(getattr(self, name))
            if value <= 0:
                raise InvalidTuple(f"{name} must be positive, got {value}")
            object.__setattr__(self, name, value)

    @classmethod
    def scaled(cls, n: int, alpha: float | Fraction) -> "DomParams":
        """A = αN, B = 2αN."""
        a = _as_fraction(alpha)
        return cls(a, a * n, 2 * a * n)

    def check(self, k: int) -> None:
        if not self.alpha < Fraction(1, k):
            raise InvalidTuple(f"alpha = {self.alpha} must be below 1/{k}")

    def strip_width(self, k: int) -> Fraction:
        """A + k/(1 - kα)."""
        return self.A + k / (1 - k * self.alpha)

    def separation(self, k: int) -> Fraction:
        """4(2A + 2k/(1 - kα)), the minimum offset gap between blocks."""
        return 8 * self.strip_width(k)

    def bounded_guarantee(self, k: int) -> bool:
        """kB/(1 + kα) >= 2A + 2k/(1 - kα), which makes Ψ(Dom) bounded."""
        return k * self.B / (1 + k * self.alpha) >= 2 * self.strip_width(k)

    def wass1_bound(self, n: int, k: int) -> float:
        """(2A + 4k/(1 - kα))/N + 4kα."""
        return float((2 * self.A + 4 * k / (1 - k * self.alpha)) / n + 4 * k * self.alpha)


# --- Ψ and its inverse ---


def psi(t: DecompTuple) -> AffinePermutation:
    """σ(g_{i,j}) = h_{i,j+Δ_i}; may be unbounded."""
    window = [0] * t.N
    for i in range(t.k):
        for j, g in enumerate(t.G[i], start=1):
            window[g - 1] = t.h(i, j + t.delta[i])
    return AffinePermutation(tuple(window))


def tuple_for_blocks(sigma: AffinePermutation, blocks: Sequence[Sequence[int]]) -> DecompTuple:
    """The tuple with position blocks G that Ψ sends to σ, given increasing
    periodic blocks in order. Raises InvalidTuple when it falls outside D₀."""
    n_total = sigma.size
    H, delta = [], []
    for block in blocks:
        values = [evaluate(sigma, g) for g in block]
        residues = sorted((v - 1) % n_total + 1 for v in values)
        first = values[0]
        r = (first - 1) % n_total + 1
        q = (first - r) // n_total
        J = residues.index(r) + 1 + q * len(block)
        H.append(tuple(residues))
        delta.append(J - 1)
    return DecompTuple(tuple(len(b) for b in blocks), tuple(tuple(b) for b in blocks), tuple(H), tuple(delta))


def psi_inverse(sigma: AffinePermutation, k: int) -> DecompTuple:
    """Canonical preimage: G from the rank decomposition, blocks by min G_i."""
    return tuple_for_blocks(sigma, decompose_increasing(sigma, k).blocks)


def relabel(t: DecompTuple, order: Sequence[int]) -> DecompTuple:
    """Simultaneously permute block subscripts: new block j is old block order[j]."""
    return DecompTuple(
        tuple(t.n[i] for i in order),
        tuple(t.G[i] for i in order),
        tuple(t.H[i] for i in order),
        tuple(t.delta[i] for i in order),
    )


def canonical(t: DecompTuple) -> DecompTuple:
    order = sorted(range(t.k), key=lambda i: t.G[i][0])
    return relabel(t, order)


def _ordered_partitions(items: tuple[int, ...], sizes: Sequence[int]) -> Iterable[tuple[tuple[int, ...], ...]]:
    if not sizes:
        yield ()
        return
    for block in combinations(items, sizes[0]):
        rest = tuple(x for x in items if x not in block)
        for tail in _ordered_partitions(rest, sizes[1:]):
            yield (block, *tail)


def iter_d0_tuples(n_total: int, k: int) -> Iterable[DecompTuple]:
    """Every tuple of D₀ with k blocks over [N]. Grows super-exponentially; small N only."""
    universe = tuple(range(1, n_total + 1))
    for n in compositions(n_total, k, minimum=1):
        deltas = [
            d for d in product(*(range(-size, size + 1) for size in n))
            if sum(d) == 0
        ]
        for G in _ordered_partitions(universe, n):
            for H in _ordered_partitions(universe, n):
                for delta in deltas:
                    yield DecompTuple(n, G, H, delta)


# --- Dom membership ---


def _near(position: int, ell: int, width: int, n_total: int, A: Fraction) -> bool:
    """|position - ℓN/(w+1)| < A."""
    return abs(position * (width + 1) - ell * n_total) < A * (width + 1)


def in_seq_star_A(subset: Iterable[int], n_total: int, A: float | Fraction) -> bool:
    """Is the ℓ-th smallest element within A of ℓN/(w+1) for every ℓ?"""
    xs = sorted(subset)
    if not xs:
        raise InvalidTuple("subset must be non-empty")
    a = _as_fraction(A)
    w = len(xs)
    return all(_near(x, ell, w, n_total, a) for ell, x in enumerate(xs, start=1))


def in_sizes(n: Sequence[int], n_total: int, alpha: float | Fraction) -> bool:
    """n ∈ 𝔑(N, α): every |n_i - N/k| <= αN."""
    a = _as_fraction(alpha)
    k = len(n)
    return all(abs(Fraction(x) - Fraction(n_total, k)) <= a * n_total for x in n)


def _offsets_separated(n: Sequence[int], delta: Sequence[int], n_total: int, gap: Fraction) -> bool:
    offsets = [Fraction(d * n_total, size) for d, size in zip(delta, n)]
    return all(abs(x - y) > gap for x, y in combinations(offsets, 2))


def _delta_bound(size: int, B: Fraction) -> int:
    """Largest |Δ| with |Δ| < size - B, or -1 if none."""
    limit = size - B
    if limit <= 0:
        return -1
    return math.ceil(limit) - 1


def in_dom(t: DecompTuple, p: DomParams) -> bool:
    k, n_total = t.k, t.N
    if not in_sizes(t.n, n_total, p.alpha):
        return False
    if any(abs(d) > _delta_bound(size, p.B) for d, size in zip(t.delta, t.n)):
        return False
    if not all(in_seq_star_A(b, n_total, p.A) for b in (*t.G, *t.H)):
        return False
    return _offsets_separated(t.n, t.delta, n_total, p.separation(k))


def enumerate_W(n: Sequence[int], p: DomParams, cap: int | None = None) -> list[tuple[int, ...]]:
    """Offset vectors with ΣΔ = 0, |Δ_i| < n_i - B and separated offsets.

    Loops over Δ_1..Δ_{k-1}; Δ_k is forced. Lexicographic order.
    """
    k, n_total = len(n), sum(n)
    limit = resolve_cap(cap, "w_cap")
    if k * max(n) > limit:
        raise CapExceeded(f"k * max(n_i) = {k * max(n)} exceeds the W enumeration cap {limit}")
    bounds = [_delta_bound(size, p.B) for size in n]
    if min(bounds) < 0:
        return []
    gap = p.separation(k)
    found = []
    for head in product(*(range(-b, b + 1) for b in bounds[:-1])):
        last = -sum(head)
        if abs(last) > bounds[-1]:
            continue
        delta = (*head, last)
        if _offsets_separated(n, delta, n_total, gap):
            found.append(delta)
    return found


def w_lower_bound(n_total: int, k: int, p: DomParams) -> float:
    """Z(t_N,...,t_N) - C(k,2)(2N)^(k-2)(2Θ_N + 1), a lower bound on |W(n)| over n ∈ 𝔑."""
    t = math.floor(Fraction(n_total, k) - p.alpha * n_total - p.B)
    z = z_count([t] * k) if t >= 0 else 0
    theta = p.separation(k)
    if k < 2:
        return float(z)
    return float(z - math.comb(k, 2) * (2 * n_total) ** (k - 2) * (2 * theta + 1))


# --- Counting and sampling Dom ---


def _completion_counts(n: tuple[int, ...], n_total: int, A: Fraction) -> dict[tuple[int, ...], int]:
    """For each fill state c, the number of ways to finish an ordered Seq*A partition.

    State c counts the elements placed in each block; the next position is Σc + 1.
    """
    k = len(n)
    counts: dict[tuple[int, ...], int] = {}
    for c in sorted(product(*(range(x + 1) for x in n)), key=sum, reverse=True):
        if c == n:
            counts[c] = 1
            continue
        position = sum(c) + 1
        total = 0
        for i in range(k):
            if c[i] < n[i] and _near(position, c[i] + 1, n[i], n_total, A):
                total += counts[c[:i] + (c[i] + 1,) + c[i + 1:]]
        counts[c] = total
    return counts


def count_seq_star_partitions(n: Sequence[int], n_total: int, A: float | Fraction) -> int:
    """|V**_A(n)|: ordered partitions of [N] into blocks of sizes n, all in Seq*A."""
    n = tuple(n)
    if sum(n) != n_total:
        raise InvalidTuple(f"block sizes sum to {sum(n)}, not N = {n_total}")
    return _completion_counts(n, n_total, _as_fraction(A))[(0,) * len(n)]


def _dom_rows(n_total: int, k: int, p: DomParams) -> list[tuple[tuple[int, ...], int, list]]:
    """(n, |V**|^2 |W(n)|, W(n)) for every n ∈ 𝔑 contributing to Dom."""
    p.check(k)
    rows = []
    for n in compositions(n_total, k, minimum=1):
        if not in_sizes(n, n_total, p.alpha):
            continue
        W = enumerate_W(n, p)
        if not W:
            continue
        v = count_seq_star_partitions(n, n_total, p.A)
        if v:
            rows.append((n, v * v * len(W), W))
    return rows


def dom_size(n_total: int, k: int, p: DomParams) -> int:
    """|Dom| = Σ_{n ∈ 𝔑} |V**_A(n)|^2 |W(n)|."""
    return sum(weight for _, weight, _ in _dom_rows(n_total, k, p))


def dom_lower_bound(n_total: int, k: int, p: DomParams) -> Fraction:
    """|Dom| / k!, a lower bound on the avoider count when p.bounded_guarantee(k)."""
    return Fraction(dom_size(n_total, k, p), math.factorial(k))


def _pick(weights: Sequence[int], rng: np.random.Generator) -> int:
    total = sum(weights)
    probs = np.array([w / total for w in weights], dtype=float)
    return int(rng.choice(len(weights), p=probs / probs.sum()))


class DomSampler:
    """Uniform sampler on Dom(N, α, A, B).

    Picks n with probability proportional to |V**_A(n)|^2 |W(n)|, then G and
    H uniformly from the completion counts, then Δ uniformly from W(n).
    """

    def __init__(self, n_total: int, k: int, p: DomParams):
        self.n_total = n_total
        self.k = k
        self.params = p
        self.rows = _dom_rows(n_total, k, p)
        if not self.rows:
            raise EmptyDomain(
                f"Dom is empty for N={n_total}, k={k}, alpha={p.alpha}, A={p.A}, B={p.B}"
            )
        self._counts: dict[tuple[int, ...], dict[tuple[int, ...], int]] = {}

    @property
    def size(self) -> int:
        return sum(weight for _, weight, _ in self.rows)

    def _blocks(self, n: tuple[int, ...], rng: np.random.Generator) -> tuple[tuple[int, ...], ...]:
        if n not in self._counts:
            self._counts[n] = _completion_counts(n, self.n_total, self.params.A)
        counts = self._counts[n]
        k = len(n)
        blocks: list[list[int]] = [[] for _ in range(k)]
        c = (0,) * k
        for position in range(1, self.n_total + 1):
            options, weights = [], []
            for i in range(k):
                if c[i] < n[i] and _near(position, c[i] + 1, n[i], self.n_total, self.params.A):
                    nxt = c[:i] + (c[i] + 1,) + c[i + 1:]
                    if counts[nxt]:
                        options.append(i)
                        weights.append(counts[nxt])
            i = options[_pick(weights, rng)]
            blocks[i].append(position)
            c = c[:i] + (c[i] + 1,) + c[i + 1:]
        return tuple(tuple(b) for b in blocks)

    def sample(self, rng: np.random.Generator) -> DecompTuple:
        n, _, W = self.rows[_pick([weight for _, weight, _ in self.rows], rng)]
        G = self._blocks(n, rng)
        H = self._blocks(n, rng)
        delta = W[int(rng.integers(len(W)))]
        return DecompTuple(n, G, H, delta)


def sample_dom_tuple(n_total: int, k: int, p: DomParams, rng: np.random.Generator) -> DecompTuple:
    """A uniformly random element of Dom(N, α, A, B)."""
    return DomSampler(n_total, k, p).sample(rng)


def strip_deviation(t: DecompTuple) -> Fraction:
    """max over plotted points of |σ(g_{i,j}) - (g_{i,j} + Δ_i N/n_i)| for σ = Ψ(t)."""
    worst = Fraction(0)
    for i in range(t.k):
        offset = Fraction(t.delta[i] * t.N, t.n[i])
        for j, g in enumerate(t.G[i], start=1):
            worst = max(worst, abs(t.h(i, j + t.delta[i]) - g - offset))
    return worst


# --- k!-to-1 verification ---


@dataclass
class KFactorialReport:
    passed: bool
    samples: int
    images: int
    preimages: int
    counterexample: str | None = None


def dom_preimages(sigma: AffinePermutation, k: int, p: DomParams) -> list[DecompTuple]:
    """Every tuple in Dom that Ψ sends to σ, canonical labelling only.

    Each comes from a partition of [N] into k increasing periodic blocks;
    the full labelled preimage set is the k! relabelings of each.
    """
    found = []
    for partition in increasing_partitions(sigma, k):
        try:
            t = tuple_for_blocks(sigma, partition.blocks)
        except InvalidTuple:
            continue
        if in_dom(t, p):
            found.append(t)
    return found


def verify_k_factorial(
    p: DomParams,
    n_total: int,
    k: int,
    sample_size: int,
    rng_seed: int,
) -> KFactorialReport:
    """Check on sampled Dom tuples that Ψ is exactly k!-to-1 and decodes canonically.

    For each sample: every relabeling maps to the same σ, the k! relabelings
    are distinct, psi_inverse(σ) is the canonical relabeling and lies in Dom,
    the exhaustive Dom preimage set of σ is exactly those k! relabelings, and
    no other sampled tuple class shares the image.
    """
    sampler = DomSampler(n_total, k, p)
    rng = np.random.default_rng(rng_seed)
    orders = list(permutations(range(k)))
    images: dict[AffinePermutation, DecompTuple] = {}
    done = 0

    def fail(message: str) -> KFactorialReport:
        return KFactorialReport(False, done, len(images), len(orders), message)

    for _ in range(sample_size):
        t = sampler.sample(rng)
        sigma = psi(t)
        relabeled = {relabel(t, order) for order in orders}
        if len(relabeled) != len(orders):
            return fail(f"relabelings of {t} are not distinct")
        for other in relabeled:
            if psi(other) != sigma:
                return fail(f"relabeling {other} maps to {psi(other)}, not {sigma}")
        decoded = psi_inverse(sigma, k)
        if decoded != canonical(t):
            return fail(f"{sigma} decodes to {decoded}, expected {canonical(t)}")
        if not in_dom(decoded, p):
            return fail(f"decoded tuple {decoded} is outside Dom")
        preimages = dom_preimages(sigma, k, p)
        if preimages != [decoded]:
            count = len(preimages) * len(orders)
            return fail(f"{sigma} has {count} labelled Dom preimages, expected {len(orders)}")
        seen = images.setdefault(sigma, decoded)
        if seen != decoded:
            return fail(f"{seen} and {decoded} both map to {sigma}")
        done += 1
    return KFactorialReport(True, done, len(images), len(orders))


# --- JSON ---


def tuple_to_json(t: DecompTuple) -> dict:
    return {
        "n": list(t.n),
        "G": [list(b) for b in t.G],
        "H": [list(b) for b in t.H],
        "delta": list(t.delta),
    }


def _ints(values: object) -> tuple[int, ...]:
    if not isinstance(values, list) or not all(isinstance(x, int) and not isinstance(x, bool) for x in values):
        raise MalformedInput(f"expected a list of integers, got {values!r}")
    return tuple(values)


def tuple_from_json(data: object) -> DecompTuple:
    if not isinstance(data, dict) or not {"n", "G", "H", "delta"} <= data.keys():
        raise MalformedInput('expected an object {"n": [...], "G": [[...]], "H": [[...]], "delta": [...]}')
    for key in ("G", "H"):
        if not isinstance(data[key], list):
            raise MalformedInput(f"{key} must be a list of blocks")
    return DecompTuple(
        _ints(data["n"]),
        tuple(_ints(b) for b in data["G"]),
        tuple(_ints(b) for b in data["H"]),
        _ints(data["delta"]),
    )
