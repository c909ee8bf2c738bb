"""Tests for exact and MCMC sampling of bounded avoiders."""

from collections import Counter

import numpy as np
import pytest

from affperm.core import AffinePermutation, decreasing, identity, is_bounded, parse_pattern, validate_affine
from affperm.decomposition import psi_inverse
from affperm.errors import CapExceeded, SampleOutsideUniverse
from affperm.patterns import avoids_decreasing
from affperm.sampling import (
    ExactSampler,
    McmcConfig,
    McmcSampler,
    Move,
    Sampler,
    chi_square_uniformity,
    default_sampler,
    enumerate_avoiders,
    mcmc_chains,
    mcmc_sample,
    neighbors,
    offset_blocks,
    reachable_set,
    sample_exact,
)

TAU = decreasing(3)


class TestMcmcConfig:
    def test_defaults(self):
        cfg = McmcConfig.for_size(3, steps=100, seed=0)
        assert cfg.burn_in == 450
        assert cfg.thin == 9
        assert cfg.swap_prob == 0.8

    def test_overrides(self):
        cfg = McmcConfig.for_size(3, steps=100, seed=0, burn_in=0, thin=1)
        assert (cfg.burn_in, cfg.thin) == (0, 1)

    @pytest.mark.parametrize("kwargs", [
        dict(steps=0, burn_in=0, thin=1, seed=0),
        dict(steps=10, burn_in=-1, thin=1, seed=0),
        dict(steps=10, burn_in=0, thin=0, seed=0),
        dict(steps=10, burn_in=0, thin=1, seed=0, swap_prob=1.5),
        dict(steps=10, burn_in=0, thin=1, seed=0, offset_prob=1.0),
    ])
    def test_invalid(self, kwargs):
        with pytest.raises(ValueError):
            McmcConfig(**kwargs)


class TestMoves:
    def test_swap(self):
        move = Move("swap", 1, 3)
        assert move.apply((1, 2, 3)) == (3, 2, 1)
        assert move.inverse == move

    def test_shift(self):
        move = Move("shift", 1, 2)
        shifted = move.apply((1, 2, 3))
        assert shifted == (4, -1, 3)
        assert sum(shifted) == 6
        assert move.inverse.apply(shifted) == (1, 2, 3)

    def test_neighbors(self):
        moves = list(neighbors(identity(3)))
        assert sum(m.kind == "swap" for m in moves) == 3
        assert sum(m.kind == "shift" for m in moves) == 6
        assert not any(m.kind == "offset" for m in moves)
        offsets = [m for m in neighbors(identity(3), k=2) if m.kind == "offset"]
        assert offsets == [Move("offset", 1, 2, 2), Move("offset", 2, 1, 2)]

    def test_offset_blocks(self):
        assert offset_blocks(5, TAU) == 2
        assert offset_blocks(5, decreasing(4)) == 3
        assert offset_blocks(5, decreasing(2)) == 0
        assert offset_blocks(5, parse_pattern("2143")) == 0
        assert offset_blocks(2, decreasing(4)) == 0

    def test_offset(self):
        window = (6, -2, -1, 1, 10, 12, 4, 5, 13, 7)
        move = Move("offset", 2, 1, 2)
        moved = move.apply(window)
        assert moved == (3, -1, 1, 4, 6, 10, 5, 7, 12, 8)
        assert psi_inverse(AffinePermutation(moved), 2).delta == (1, -1)
        assert move.inverse == Move("offset", 1, 2, 2)
        assert move.inverse.apply(moved) == window

    def test_offset_rejected(self):
        # Δ = (1, -1) on blocks {1}, {2, 3, 4} sends σ(1) to 5
        move = Move("offset", 1, 2, 2)
        assert move.apply(identity(4).window) == identity(4).window


class TestExact:
    def test_size_two(self):
        windows = [s.window for s in enumerate_avoiders(2, TAU)]
        assert windows == [(0, 3), (1, 2), (2, 1)]

    def test_increasing_only(self):
        assert enumerate_avoiders(4, decreasing(2)) == [identity(4)]

    def test_members(self):
        universe = enumerate_avoiders(4, TAU)
        assert len(set(universe)) == len(universe)
        assert all(is_bounded(s) and avoids_decreasing(s, 3) for s in universe)

    def test_cap(self):
        with pytest.raises(CapExceeded):
            enumerate_avoiders(9, TAU, cap=7)

    def test_sample_exact(self):
        universe = set(enumerate_avoiders(4, TAU))
        rng = np.random.default_rng(0)
        assert all(sample_exact(4, TAU, rng) in universe for _ in range(20))

    def test_exact_sampler(self):
        sampler = ExactSampler(TAU, cap=7)
        assert isinstance(sampler, Sampler)
        a = sampler.sample(4, 10, np.random.default_rng(6))
        b = sampler.sample(4, 10, np.random.default_rng(6))
        assert a == b
        assert len(a) == 10

    def test_exact_frequencies(self):
        draws = ExactSampler(TAU, cap=7).sample(2, 100_000, np.random.default_rng(13))
        counts = Counter(s.window for s in draws)
        assert sorted(counts) == [(0, 3), (1, 2), (2, 1)]
        assert all(c / len(draws) == pytest.approx(1 / 3, abs=0.02) for c in counts.values())


class TestMcmc:
    def test_states_valid(self):
        n = 5
        cfg = McmcConfig(steps=2000, burn_in=100, thin=10, seed=1)
        samples = mcmc_sample(n, TAU, cfg)
        assert len(samples) == 200
        for sigma in samples:
            validate_affine(sigma.window)
            assert is_bounded(sigma)
            assert avoids_decreasing(sigma, 3)

    def test_emitted_count(self):
        cfg = McmcConfig(steps=1000, burn_in=0, thin=7, seed=0)
        assert len(mcmc_sample(4, TAU, cfg)) == 1000 // 7

    def test_size_one(self):
        cfg = McmcConfig(steps=10, burn_in=0, thin=2, seed=0)
        assert mcmc_sample(1, TAU, cfg) == [identity(1)] * 5

    def test_deterministic(self):
        cfg = McmcConfig(steps=500, burn_in=50, thin=5, seed=9)
        assert mcmc_sample(4, TAU, cfg) == mcmc_sample(4, TAU, cfg)

    def test_chains(self):
        cfg = McmcConfig(steps=300, burn_in=30, thin=3, seed=4)
        chains = mcmc_chains(4, TAU, cfg, chains=3)
        assert len(chains) == 3
        assert chains[0] == mcmc_sample(4, TAU, cfg)
        assert chains[2] == mcmc_sample(4, TAU, McmcConfig(300, 30, 3, 4 ^ 2))

    def test_reachable(self):
        for n in (2, 3):
            assert reachable_set(n, TAU) == set(enumerate_avoiders(n, TAU, cap=n))

    def test_uniform(self):
        n = 3
        cfg = McmcConfig(steps=120_000, burn_in=500, thin=30, seed=2)
        result = chi_square_uniformity(mcmc_sample(n, TAU, cfg), enumerate_avoiders(n, TAU))
        assert result.p_value > 0.001

    def test_uniform_with_offsets(self):
        n, tau = 4, decreasing(3)
        cfg = McmcConfig(steps=200_000, burn_in=800, thin=64, seed=5, offset_prob=0.3)
        result = chi_square_uniformity(mcmc_sample(n, tau, cfg), enumerate_avoiders(n, tau))
        assert result.p_value > 0.001

    def test_leaves_zero_offsets(self):
        n = 16
        cfg = McmcConfig.for_size(n, steps=20 * n * n, seed=3, offset_prob=0.2)
        samples = mcmc_sample(n, TAU, cfg)
        assert all(is_bounded(s) and avoids_decreasing(s, 3) for s in samples)
        assert any(psi_inverse(s, 2).delta != (0, 0) for s in samples)

    def test_mcmc_sampler(self):
        sampler = McmcSampler(TAU, thin=4, burn_in=20)
        assert isinstance(sampler, Sampler)
        samples = sampler.sample(6, 8, np.random.default_rng(0))
        assert len(samples) == 8
        assert all(avoids_decreasing(s, 3) for s in samples)

    def test_default_sampler(self):
        assert isinstance(default_sampler(TAU, 5, cap=7), ExactSampler)
        assert isinstance(default_sampler(TAU, 12, cap=7), McmcSampler)


class TestChiSquare:
    def test_exact_counts(self):
        universe = enumerate_avoiders(2, TAU)
        result = chi_square_uniformity(universe * 4, universe)
        assert result.statistic == 0
        assert result.dof == 2
        assert result.p_value == pytest.approx(1)

    def test_skewed(self):
        universe = enumerate_avoiders(2, TAU)
        result = chi_square_uniformity([universe[0]] * 300, universe)
        assert result.p_value < 1e-6

    def test_outside(self):
        universe = enumerate_avoiders(2, TAU)
        with pytest.raises(SampleOutsideUniverse):
            chi_square_uniformity([AffinePermutation((3, 0))], universe)

    def test_empty(self):
        with pytest.raises(SampleOutsideUniverse):
            chi_square_uniformity([], enumerate_avoiders(2, TAU))
        with pytest.raises(SampleOutsideUniverse):
            chi_square_uniformity([identity(2)], [])
