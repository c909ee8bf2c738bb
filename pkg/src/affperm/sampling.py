"""Uniform random avoiders: exact sampling from the enumerated universe at
small N, a Metropolis chain beyond.

The chain moves are a value swap σ(i) <-> σ(j), a shift pair
σ(i) += N, σ(j) -= N, and (for τ = (k+1)...1 with k >= 2) an offset move
that decodes σ into its canonical k-block tuple, sets Δ_i += 1 and
Δ_j -= 1 and encodes again. Swaps and shifts keep the residues and the
window sum; Ψ of a tuple in D₀ is affine. The acceptance filter keeps the
state bounded and τ-avoiding, and an offset move is accepted only when the
new state decodes to the modified tuple, which makes it its own reverse.
Proposals are symmetric, so the stationary law is uniform on the class
reachable from the identity.

In practice swaps and shifts alone do not leave the zero-offset sector once
N is large.
"""

from collections import Counter, deque
from collections.abc import Iterator, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Literal, Protocol, runtime_checkable

import numpy as np
from scipy.special import gammaincc

from .config import resolve_cap
from .core import AffinePermutation, OrdinaryPermutation, decreasing, identity, is_bounded
from .counting import avoiding_windows
from .decomposition import DecompTuple, psi, psi_inverse
from .errors import CapExceeded, SampleOutsideUniverse
from .patterns import avoids

_BATCH = 4096


@dataclass(frozen=True)
class McmcConfig:
    steps: int
    burn_in: int
    thin: int
    seed: int
    swap_prob: float = 0.8
    offset_prob: float = 0.1

    def __post_init__(self):
        if self.steps < 1 or self.thin < 1 or self.burn_in < 0:
            raise ValueError(f"need steps >= 1, thin >= 1, burn_in >= 0; got {self}")
        if not 0 <= self.swap_prob <= 1:
            raise ValueError(f"swap_prob must lie in [0, 1], got {self.swap_prob}")
        if not 0 <= self.offset_prob < 1:
            raise ValueError(f"offset_prob must lie in [0, 1), got {self.offset_prob}")

    @classmethod
    def for_size(
        cls,
        n: int,
        steps: int,
        seed: int,
        swap_prob: float = 0.8,
        burn_in: int | None = None,
        thin: int | None = None,
        offset_prob: float = 0.1,
    ) -> "McmcConfig":
        """Defaults burn_in = 50 N² and thin = N²."""
        return cls(
            steps=steps,
            burn_in=50 * n * n if burn_in is None else burn_in,
            thin=n * n if thin is None else thin,
            seed=seed,
            swap_prob=swap_prob,
            offset_prob=offset_prob,
        )


@dataclass(frozen=True)
class Move:
    """A proposal on 1-based positions i != j, or on 1-based blocks i != j
    of the canonical k-block tuple when kind is "offset"."""
    kind: Literal["swap", "shift", "offset"]
    i: int
    j: int
    k: int = 0

    def apply(self, window: Sequence[int]) -> tuple[int, ...]:
        """The proposed window; an offset move the chain would reject leaves it unchanged."""
        if self.kind == "offset":
            return _offset_target(window, self) or tuple(window)
        n = len(window)
        w = list(window)
        if self.kind == "swap":
            w[self.i - 1], w[self.j - 1] = w[self.j - 1], w[self.i - 1]
        else:
            w[self.i - 1] += n
            w[self.j - 1] -= n
        return tuple(w)

    @property
    def inverse(self) -> "Move":
        if self.kind == "swap":
            return self
        return Move(self.kind, self.j, self.i, self.k)


def offset_blocks(n: int, tau: OrdinaryPermutation) -> int:
    """k when offset moves apply to avoiders of τ at size N, else 0."""
    k = tau.size - 1
    if k < 2 or n < k or tau != decreasing(tau.size):
        return 0
    return k


def _offset_target(window: Sequence[int], move: Move) -> tuple[int, ...] | None:
    t = psi_inverse(AffinePermutation(tuple(window)), move.k)
    delta = list(t.delta)
    delta[move.i - 1] += 1
    delta[move.j - 1] -= 1
    if abs(delta[move.i - 1]) > t.n[move.i - 1] or abs(delta[move.j - 1]) > t.n[move.j - 1]:
        return None
    target = DecompTuple(t.n, t.G, t.H, tuple(delta))
    sigma = psi(target)
    if not is_bounded(sigma) or not avoids(sigma, decreasing(move.k + 1)):
        return None
    if psi_inverse(sigma, move.k) != target:
        return None
    return sigma.window


def _entry_bounded(value: int, i: int, n: int) -> bool:
    return abs(value - i) < n


def _accepts(window: tuple[int, ...], move: Move, tau: OrdinaryPermutation) -> bool:
    n = len(window)
    if not (_entry_bounded(window[move.i - 1], move.i, n) and _entry_bounded(window[move.j - 1], move.j, n)):
        return False
    return avoids(AffinePermutation(window), tau)


def _step(window: tuple[int, ...], move: Move, tau: OrdinaryPermutation) -> tuple[int, ...] | None:
    """The accepted successor of window, or None if the chain stays put."""
    if move.kind == "offset":
        return _offset_target(window, move)
    candidate = move.apply(window)
    return candidate if _accepts(candidate, move, tau) else None


def neighbors(sigma: AffinePermutation, k: int = 0) -> Iterator[Move]:
    """Every proposal with non-zero probability from any state of size N;
    offset moves on k blocks when k >= 2."""
    n = sigma.size
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if i < j:
                yield Move("swap", i, j)
            if i != j:
                yield Move("shift", i, j)
    if k >= 2:
        for i in range(1, k + 1):
            for j in range(1, k + 1):
                if i != j:
                    yield Move("offset", i, j, k)

# --- exact ---


@lru_cache(maxsize=32)
def _universe(n: int, tau: OrdinaryPermutation, workers: int) -> tuple[AffinePermutation, ...]:
    return tuple(AffinePermutation(w) for w in avoiding_windows(n, tau, cap=n, workers=workers))


def enumerate_avoiders(
    n: int,
    tau: OrdinaryPermutation,
    cap: int | None = None,
    workers: int = 1,
) -> list[AffinePermutation]:
    """All bounded τ-avoiders of size N, by window in lexicographic order."""
    limit = resolve_cap(cap)
    if n > limit:
        raise CapExceeded(f"N = {n} exceeds the brute-force cap {limit} (set AFFPERM_CAP to raise it)")
    return list(_universe(n, tau, workers))


def sample_exact(
    n: int,
    tau: OrdinaryPermutation,
    rng: np.random.Generator,
    cap: int | None = None,
) -> AffinePermutation:
    universe = enumerate_avoiders(n, tau, cap)
    return universe[int(rng.integers(len(universe)))]


# --- MCMC ---


def _proposals(n: int, k: int, cfg: McmcConfig, rng: np.random.Generator) -> Iterator[Move]:
    pairs = [(i, j) for i in range(1, k + 1) for j in range(1, k + 1) if i != j]
    offset_prob = cfg.offset_prob if pairs else 0.0
    while True:
        offsets = rng.random(_BATCH) < offset_prob
        kinds = rng.random(_BATCH) < cfg.swap_prob
        first = rng.integers(0, n, size=_BATCH)
        second = rng.integers(0, n - 1, size=_BATCH)
        picks = rng.integers(0, max(len(pairs), 1), size=_BATCH)
        for is_offset, is_swap, a, b, pick in zip(offsets, kinds, first, second, picks):
            if is_offset:
                yield Move("offset", *pairs[int(pick)], k)
                continue
            a, b = int(a), int(b)
            b += b >= a
            if is_swap:
                a, b = min(a, b), max(a, b)
            yield Move("swap" if is_swap else "shift", a + 1, b + 1)


def mcmc_sample(n: int, tau: OrdinaryPermutation, cfg: McmcConfig) -> list[AffinePermutation]:
    """Run burn_in + steps proposals from the identity; keep every thin-th
    post-burn-in state."""
    state = identity(n).window
    count = cfg.steps // cfg.thin
    if n < 2:
        return [identity(n)] * count

    total = sum(state)
    residues = sorted(v % n for v in state)
    rng = np.random.default_rng(cfg.seed)
    proposals = _proposals(n, offset_blocks(n, tau), cfg, rng)
    out: list[AffinePermutation] = []
    for step in range(cfg.burn_in + cfg.steps):
        candidate = _step(state, next(proposals), tau)
        if candidate is not None:
            assert sum(candidate) == total
            assert sorted(v % n for v in candidate) == residues
            state = candidate
        after = step - cfg.burn_in + 1
        if after > 0 and after % cfg.thin == 0:
            out.append(AffinePermutation(state))
    return out


def _run_chain(args: tuple[int, OrdinaryPermutation, McmcConfig]) -> list[AffinePermutation]:
    return mcmc_sample(*args)


def mcmc_chains(
    n: int,
    tau: OrdinaryPermutation,
    cfg: McmcConfig,
    chains: int,
    workers: int = 1,
) -> list[list[AffinePermutation]]:
    """Independent chains seeded cfg.seed ^ index, returned in index order."""
    jobs = [(n, tau, replace(cfg, seed=cfg.seed ^ index)) for index in range(chains)]
    if workers > 1 and chains > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_run_chain, jobs))
    return [_run_chain(job) for job in jobs]


def reachable_set(n: int, tau: OrdinaryPermutation) -> set[AffinePermutation]:
    """States reachable from the identity along accepted moves."""
    start = identity(n)
    k = offset_blocks(n, tau)
    seen = {start}
    queue = deque([start])
    while queue:
        sigma = queue.popleft()
        for move in neighbors(sigma, k):
            window = _step(sigma.window, move, tau)
            if window is None:
                continue
            nxt = AffinePermutation(window)
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return seen


# --- uniformity test ---


@dataclass(frozen=True)
class ChiSquareResult:
    statistic: float
    dof: int
    p_value: float


def chi_square_uniformity(
    samples: Sequence[AffinePermutation],
    universe: Sequence[AffinePermutation],
) -> ChiSquareResult:
    """Pearson's test of samples against the uniform law on universe."""
    if not universe:
        raise SampleOutsideUniverse("universe is empty")
    if not samples:
        raise SampleOutsideUniverse("no samples to test")
    members = set(universe)
    counts = Counter(samples)
    for sigma in counts:
        if sigma not in members:
            raise SampleOutsideUniverse(f"{sigma} is not in the universe")

    expected = len(samples) / len(members)
    statistic = sum((counts.get(sigma, 0) - expected) ** 2 for sigma in members) / expected
    dof = len(members) - 1
    p_value = float(gammaincc(dof / 2, statistic / 2)) if dof > 0 else 1.0
    return ChiSquareResult(float(statistic), dof, p_value)


# --- samplers ---


@runtime_checkable
class Sampler(Protocol):
    """Draws count avoiders of size n."""

    def sample(self, n: int, count: int, rng: np.random.Generator) -> list[AffinePermutation]: ...


@dataclass(frozen=True)
class ExactSampler:
    pattern: OrdinaryPermutation
    cap: int | None = None

    def sample(self, n: int, count: int, rng: np.random.Generator) -> list[AffinePermutation]:
        universe = enumerate_avoiders(n, self.pattern, self.cap)
        return [universe[int(i)] for i in rng.integers(len(universe), size=count)]


@dataclass(frozen=True)
class McmcSampler:
    """Heuristic at large N: mixing is not certified."""
    pattern: OrdinaryPermutation
    swap_prob: float = 0.8
    burn_in: int | None = None
    thin: int | None = None
    offset_prob: float = 0.1

    def sample(self, n: int, count: int, rng: np.random.Generator) -> list[AffinePermutation]:
        thin = n * n if self.thin is None else self.thin
        cfg = McmcConfig.for_size(
            n,
            steps=count * thin,
            seed=int(rng.integers(2**63)),
            swap_prob=self.swap_prob,
            burn_in=self.burn_in,
            thin=thin,
            offset_prob=self.offset_prob,
        )
        return mcmc_sample(n, self.pattern, cfg)


def default_sampler(
    tau: OrdinaryPermutation,
    n: int,
    cap: int | None = None,
    swap_prob: float = 0.8,
    offset_prob: float = 0.1,
) -> Sampler:
    """Exact up to the brute-force cap, MCMC above it."""
    if n <= resolve_cap(cap):
        return ExactSampler(tau, cap)
    return McmcSampler(tau, swap_prob, offset_prob=offset_prob)
