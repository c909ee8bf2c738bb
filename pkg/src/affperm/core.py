"""Affine and bounded affine permutations.

An affine permutation of size N is stored as its window σ(1..N). Every
other value follows from periodicity σ(i + tN) = σ(i) + tN and is computed
on demand. Python integers keep evaluation exact at any |i|.
"""

from collections.abc import Iterable, Sequence
from dataclasses import dataclass

from .errors import BadSum, DuplicateResidue, InvalidPattern, MalformedInput


@dataclass(frozen=True)
class AffinePermutation:
    """A validated window. Build with :func:`validate_affine`."""
    window: tuple[int, ...]

    def __post_init__(self):
        _check_window(self.window)

    @property
    def size(self) -> int:
        return len(self.window)

    def __len__(self) -> int:
        return len(self.window)

    def __str__(self) -> str:
        return "[" + ",".join(str(v) for v in self.window) + "]"


@dataclass(frozen=True)
class OrdinaryPermutation:
    """A permutation of 1..m in one-line notation."""
    values: tuple[int, ...]

    def __post_init__(self):
        m = len(self.values)
        if m == 0:
            raise InvalidPattern("pattern must be non-empty")
        if sorted(self.values) != list(range(1, m + 1)):
            raise InvalidPattern(f"{list(self.values)} is not a permutation of 1..{m}")

    @property
    def size(self) -> int:
        return len(self.values)

    @property
    def is_decreasing(self) -> bool:
        return self.values == tuple(range(self.size, 0, -1))

    def __str__(self) -> str:
        if self.size < 10:
            return "".join(str(v) for v in self.values)
        return ",".join(str(v) for v in self.values)


def _check_window(window: Sequence[int]) -> None:
    n = len(window)
    if n == 0:
        raise MalformedInput("window must be non-empty")
    for v in window:
        if isinstance(v, bool) or not isinstance(v, int):
            raise MalformedInput(f"window entries must be integers, got {v!r}")

    seen: dict[int, int] = {}
    for i, v in enumerate(window, start=1):
        r = v % n
        if r in seen:
            j = seen[r]
            raise DuplicateResidue(
                f"entries at indices {j} and {i} ({window[j - 1]} and {v}) are congruent mod {n}",
                indices=(j, i),
            )
        seen[r] = i

    total = sum(window)
    expected = n * (n + 1) // 2
    if total != expected:
        shifted = tuple(i for i, v in enumerate(window, start=1) if not 1 <= v <= n)
        raise BadSum(
            f"window sums to {total}, expected {expected}; shifted entries at indices "
            f"{', '.join(str(i) for i in shifted)}",
            indices=shifted,
        )


def validate_affine(window: Iterable[int]) -> AffinePermutation:
    """Construct an affine permutation, checking residues and centering."""
    return AffinePermutation(tuple(window))


def identity(n: int) -> AffinePermutation:
    return AffinePermutation(tuple(range(1, n + 1)))


def is_bounded(sigma: AffinePermutation) -> bool:
    """|σ(i) - i| < N for all i; the window check suffices by periodicity."""
    n = sigma.size
    return all(abs(v - i) < n for i, v in enumerate(sigma.window, start=1))


def evaluate(sigma: AffinePermutation, i: int) -> int:
    q, r = divmod(i - 1, sigma.size)
    return sigma.window[r] + q * sigma.size


def infinite_sum(pi: OrdinaryPermutation) -> AffinePermutation:
    """The periodic extension ⊕π of an ordinary permutation."""
    return AffinePermutation(pi.values)


def parse_pattern(text: str) -> OrdinaryPermutation:
    """Parse '4321' or '10,2,1,...' into an ordinary permutation."""
    text = text.strip()
    try:
        if "," in text:
            values = tuple(int(part) for part in text.split(","))
        else:
            values = tuple(int(ch) for ch in text)
    except ValueError:
        raise InvalidPattern(f"cannot parse pattern {text!r}") from None
    return OrdinaryPermutation(values)


def decreasing(m: int) -> OrdinaryPermutation:
    """The pattern m(m-1)...1."""
    return OrdinaryPermutation(tuple(range(m, 0, -1)))


def perm_to_json(sigma: AffinePermutation) -> dict:
    return {"size": sigma.size, "window": list(sigma.window)}


def perm_from_json(data: object) -> AffinePermutation:
    """Read {"size": N, "window": [...]}, rejecting a size mismatch."""
    if not isinstance(data, dict) or "window" not in data:
        raise MalformedInput('expected an object {"size": N, "window": [...]}')
    window = data["window"]
    if not isinstance(window, list):
        raise MalformedInput("window must be a list of integers")
    size = data.get("size", len(window))
    if size != len(window):
        raise MalformedInput(f"size {size} does not match window length {len(window)}")
    return validate_affine(window)
