"""Tests for the self-verification suites."""

from fractions import Fraction

import numpy as np
import pytest
from scipy.spatial.distance import cdist

import affperm.counting
from affperm import verify
from affperm.core import decreasing
from affperm.counting import brute_avoiders, upper_bound_avoiders
from affperm.measures import DiscreteMeasure, wass1
from affperm.verify import Suite, brute_transport, run_suites, selected_suites


class TestBruteTransport:
    def test_single_target(self):
        a = [Fraction(1, 4), Fraction(3, 4)]
        b = [Fraction(1)]
        cost = np.array([[2.0], [4.0]])
        assert brute_transport(a, b, cost) == pytest.approx(3.5)

    def test_matches_solver(self):
        rng = np.random.default_rng(12)
        for _ in range(25):
            m, n = (int(x) for x in rng.integers(1, 4, size=2))
            a = verify._random_weights(rng, m)
            b = verify._random_weights(rng, n)
            mu = DiscreteMeasure(verify._random_points(rng, m), np.array([float(x) for x in a]))
            nu = DiscreteMeasure(verify._random_points(rng, n), np.array([float(x) for x in b]))
            oracle = brute_transport(a, b, cdist(mu.points, nu.points))
            assert wass1(mu, nu).distance == pytest.approx(oracle, abs=1e-9)


class TestSuites:
    def test_levels(self):
        quick = [s.name for s in selected_suites("quick")]
        full = [s.name for s in selected_suites("full")]
        assert "convergence trend" not in quick
        assert "convergence trend" in full
        assert len(full) == len(quick) + 1
        with pytest.raises(ValueError):
            selected_suites("medium")

    @pytest.mark.parametrize("check", [
        verify._check_totals,
        verify._check_z_star,
        verify._check_upper_bound,
        verify._check_psi,
        verify._check_k_factorial,
        verify._check_pattern_methods,
        verify._check_mcmc,
    ])
    def test_quick_checks_pass(self, check):
        passed, detail = check(False, 0)
        assert passed, detail

    def test_upper_bound_ratio_dips_first(self):
        tau = decreasing(3)
        ratios = [Fraction(brute_avoiders(n, tau, cap=5), upper_bound_avoiders(2, n)) for n in range(2, 6)]
        assert ratios[0] == Fraction(1, 2)
        assert ratios[1] == Fraction(10, 27)
        assert ratios[0] > ratios[1] > ratios[2] < ratios[3]

    def test_exceptions_fail(self):
        def boom(full, seed):
            raise RuntimeError("broken")

        results = list(run_suites("quick", suites=[Suite("boom", boom), Suite("ok", lambda f, s: (True, "fine"))]))
        assert [r.passed for r in results] == [False, True]
        assert results[0].detail == "RuntimeError: broken"
        assert results[1].elapsed >= 0

    def test_detects_wrong_formula(self, monkeypatch):
        original = affperm.counting.eulerian
        monkeypatch.setattr(
            affperm.counting, "eulerian", lambda m, j: original(m, j) + (1 if (m, j) == (3, 1) else 0)
        )
        passed, detail = verify._check_totals(False, 0)
        assert not passed
        assert "N=" in detail
