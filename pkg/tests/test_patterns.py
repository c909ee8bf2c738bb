"""Tests for pattern containment, ranks and the increasing decomposition."""

from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from affperm.core import AffinePermutation, OrdinaryPermutation, decreasing, identity, parse_pattern, validate_affine
from affperm.counting import iter_bounded_windows
from affperm.errors import CapExceeded, InvalidPattern, SizeTooSmall, TooManyRanks, UnboundedInput
from affperm.patterns import (
    avoids,
    avoids_decreasing,
    contains_affine,
    contains_ordinary,
    decompose_increasing,
    default_limit,
    increasing_partitions,
    is_increasing_block,
    longest_decreasing,
    rank,
)

WINDOWS_5 = list(iter_bounded_windows(5))
WINDOWS_6 = list(iter_bounded_windows(6))


@pytest.fixture
def witness_perm():
    return validate_affine([2, 7, -2, -1, 9, 6])


@pytest.fixture
def two_block():
    return validate_affine([6, -2, -1, 1, 10, 12, 4, 5, 13, 7])


def _order_isomorphic(values, pattern):
    ranked = sorted(range(len(values)), key=lambda i: values[i])
    return all(pattern[i] == r + 1 for r, i in enumerate(ranked))


class TestContainsOrdinary:
    def test_occurrence(self):
        pi = OrdinaryPermutation((4, 9, 3, 1, 2, 5, 8, 7, 6))
        tau = parse_pattern("4123")
        found = contains_ordinary(pi, tau)
        assert found is not None
        assert _order_isomorphic(found.values, tau.values)
        assert found.values[:3] == (9, 3, 5)

    def test_avoids(self):
        pi = OrdinaryPermutation((4, 9, 3, 1, 2, 5, 8, 7, 6))
        assert contains_ordinary(pi, parse_pattern("3142")) is None

    def test_single(self):
        found = contains_ordinary(OrdinaryPermutation((2, 1, 3)), parse_pattern("1"))
        assert found.positions == (1,)


class TestRank:
    def test_two_block(self, two_block):
        assert rank(two_block, 1) == 2

    def test_identity(self):
        assert all(rank(identity(4), a) == 1 for a in range(-3, 9))

    @given(st.sampled_from(WINDOWS_5), st.integers(-10, 10))
    def test_periodic(self, window, a):
        sigma = AffinePermutation(window)
        assert rank(sigma, a + 5) == rank(sigma, a)

    def test_unbounded(self):
        with pytest.raises(UnboundedInput):
            rank(validate_affine([4, 0, 2]), 1)


class TestAvoidsDecreasing:
    def test_witness_perm(self, witness_perm):
        assert not avoids_decreasing(witness_perm, 3)

    def test_identity(self):
        assert avoids_decreasing(identity(6), 2)

    def test_infinite_sum_21(self):
        assert avoids_decreasing(validate_affine([2, 1]), 3)
        assert not avoids_decreasing(validate_affine([2, 1]), 2)

    def test_longest_decreasing_matches_ranks(self):
        for n in range(1, 5):
            for w in iter_bounded_windows(n):
                sigma = AffinePermutation(w)
                assert longest_decreasing(sigma) == max(rank(sigma, a) for a in range(1, n + 1))

    def test_short_pattern(self):
        with pytest.raises(InvalidPattern):
            avoids_decreasing(identity(3), 1)


class TestDecompose:
    def test_two_block(self, two_block):
        partition = decompose_increasing(two_block, 2)
        assert partition.blocks == ((1, 5, 6, 9), (2, 3, 4, 7, 8, 10))
        assert partition.sizes == (4, 6)

    def test_identity_one_block(self):
        assert decompose_increasing(identity(5), 1).blocks == ((1, 2, 3, 4, 5),)

    def test_identity_split(self):
        assert decompose_increasing(identity(3), 2).blocks == ((1,), (2, 3))

    def test_too_many_ranks(self, witness_perm):
        with pytest.raises(TooManyRanks):
            decompose_increasing(witness_perm, 2)

    def test_size_too_small(self):
        with pytest.raises(SizeTooSmall):
            decompose_increasing(identity(1), 2)

    def test_blocks_increasing(self):
        tau = decreasing(3)
        for n in range(2, 6):
            for w in iter_bounded_windows(n):
                sigma = AffinePermutation(w)
                if not avoids(sigma, tau):
                    continue
                partition = decompose_increasing(sigma, 2)
                assert sorted(x for b in partition.blocks for x in b) == list(range(1, n + 1))
                assert all(is_increasing_block(sigma, b) for b in partition.blocks)


def _brute_partitions(sigma, k):
    n = sigma.size
    found = set()
    for colours in product(range(k), repeat=n):
        blocks = [tuple(a for a in range(1, n + 1) if colours[a - 1] == c) for c in range(k)]
        if all(blocks) and all(is_increasing_block(sigma, b) for b in blocks):
            found.add(tuple(sorted(blocks)))
    return found


class TestIncreasingPartitions:
    def test_identity(self):
        got = {p.blocks for p in increasing_partitions(identity(3), 2)}
        assert got == {((1,), (2, 3)), ((1, 2), (3,)), ((1, 3), (2,))}

    def test_one_block(self, two_block):
        assert [p.blocks for p in increasing_partitions(identity(4), 1)] == [((1, 2, 3, 4),)]
        assert list(increasing_partitions(two_block, 1)) == []

    def test_contains_canonical(self, two_block):
        got = [p.blocks for p in increasing_partitions(two_block, 2)]
        assert decompose_increasing(two_block, 2).blocks in got
        assert len(got) == len(set(got))

    @pytest.mark.parametrize("k", [2, 3])
    def test_matches_colourings(self, k):
        for n in range(k, 6):
            for w in iter_bounded_windows(n):
                sigma = AffinePermutation(w)
                if longest_decreasing(sigma) > k:
                    continue
                got = {p.blocks for p in increasing_partitions(sigma, k)}
                assert got == _brute_partitions(sigma, k), sigma

    def test_limit(self):
        with pytest.raises(CapExceeded):
            list(increasing_partitions(identity(8), 2, limit=10))

    def test_size_too_small(self):
        with pytest.raises(SizeTooSmall):
            list(increasing_partitions(identity(1), 2))


class TestContainsAffine:
    def test_witness_perm_minimal_witness(self, witness_perm):
        found = contains_affine(witness_perm, decreasing(3))
        assert found.positions == (5, 6, 9)
        assert found.values == (9, 6, 4)
        assert found.span == 4

    def test_single_point(self, witness_perm):
        assert contains_affine(witness_perm, parse_pattern("1")) is not None
        assert not avoids(witness_perm, parse_pattern("1"))

    def test_unbounded(self):
        with pytest.raises(UnboundedInput):
            contains_affine(validate_affine([4, 0, 2]), decreasing(3))

    @pytest.mark.parametrize("m", [3, 4])
    def test_agrees_with_ranks(self, m):
        tau = decreasing(m)
        for n in range(1, 5):
            for w in iter_bounded_windows(n):
                sigma = AffinePermutation(w)
                assert (contains_affine(sigma, tau) is None) == avoids_decreasing(sigma, m)

    @settings(max_examples=200, deadline=None)
    @given(st.sampled_from(WINDOWS_6), st.sampled_from(["21", "132", "213", "2143", "3412"]))
    def test_window_doubling(self, window, pattern):
        sigma, tau = AffinePermutation(window), parse_pattern(pattern)
        base = contains_affine(sigma, tau, minimal=False)
        doubled = contains_affine(sigma, tau, limit=2 * default_limit(6, tau.size), minimal=False)
        assert (base is None) == (doubled is None)

    def test_witness_is_occurrence(self):
        tau = parse_pattern("2143")
        for w in iter_bounded_windows(4):
            found = contains_affine(AffinePermutation(w), tau)
            if found is not None:
                assert 1 <= found.positions[0] <= 4
                assert _order_isomorphic(found.values, tau.values)
