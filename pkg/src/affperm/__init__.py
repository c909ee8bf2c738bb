"""Bounded affine permutations avoiding decreasing patterns: exact counts,
the Ψ decomposition, random generation and scaling-limit experiments."""

from .core import (
    AffinePermutation,
    OrdinaryPermutation,
    decreasing,
    evaluate,
    identity,
    infinite_sum,
    is_bounded,
    parse_pattern,
    validate_affine,
)
from .counting import (
    AsymptoticEstimate,
    asymptotic_avoiders,
    asymptotic_total,
    brute_avoiders,
    brute_total,
    exact_total,
    upper_bound_avoiders,
    z_count,
    z_star,
)
from .decomposition import DecompTuple, DomParams, in_dom, psi, psi_inverse
from .errors import AffpermError
from .measures import DiscreteMeasure, SlopeOneMixture, empirical_measure, wass1
from .patterns import avoids, avoids_decreasing, contains_affine, decompose_increasing, rank
from .sampling import McmcConfig, enumerate_avoiders, mcmc_sample, sample_exact

__all__ = [
    'AffinePermutation',
    'AffpermError',
    'AsymptoticEstimate',
    'DecompTuple',
    'DiscreteMeasure',
    'DomParams',
    'McmcConfig',
    'OrdinaryPermutation',
    'SlopeOneMixture',
    'asymptotic_avoiders',
    'asymptotic_total',
    'avoids',
    'avoids_decreasing',
    'brute_avoiders',
    'brute_total',
    'contains_affine',
    'decompose_increasing',
    'decreasing',
    'empirical_measure',
    'enumerate_avoiders',
    'evaluate',
    'exact_total',
    'identity',
    'in_dom',
    'infinite_sum',
    'is_bounded',
    'mcmc_sample',
    'parse_pattern',
    'psi',
    'psi_inverse',
    'rank',
    'sample_exact',
    'upper_bound_avoiders',
    'validate_affine',
    'wass1',
    'z_count',
    'z_star',
]
