"""Clustering the complex roots of univariate polynomials.

Subdivision with a Pellet-style counting test finds natural clusters of
roots in a square region; found clusters can be deflated through power
sums so that later searches work with a lower-degree factor.
"""
from .benchmarks import bernoulli, mandelbrot, mignotte, oracle_roots, spiral
from .clustering import (
    Cluster,
    ClusterSet,
    SearchDomain,
    UnresolvableRegionError,
    cluster_pol,
    refine,
    solve_lcp,
    subdivision_stats,
)
from .counting import count_with_confirmation, pellet_test
from .deflation import (
    DeflationError,
    cluster_with_deflation,
    coeffs_to_power_sums,
    oracle_for_q,
    power_sums_to_coeffs,
)
from .geometry import Box, Disc, clean, containing_disc, quadrisect
from .polynomial import (
    DensePolynomial,
    ExactPolynomial,
    OraclePolynomial,
    parse_polynomial,
    read_polynomial_file,
)

__version__ = "0.1.0"

__all__ = [
    "Box", "Cluster", "ClusterSet", "DeflationError", "DensePolynomial", "Disc",
    "ExactPolynomial", "OraclePolynomial", "SearchDomain", "UnresolvableRegionError",
    "bernoulli", "clean", "cluster_pol", "cluster_with_deflation", "coeffs_to_power_sums",
    "containing_disc", "count_with_confirmation", "mandelbrot", "mignotte", "oracle_for_q",
    "oracle_roots", "parse_polynomial", "pellet_test", "power_sums_to_coeffs", "quadrisect",
    "read_polynomial_file", "refine", "solve_lcp", "spiral", "subdivision_stats",
]
