"""Gaussian trace estimator for implicitly defined PSD operators.

The estimator never materializes the operator: it only needs the
quadratic form g -> g^T A g, supplied by a :class:`QuadraticFormOracle`.
Probe i draws its Gaussian vector from ``stream.child(i)`` and the probe
contributions are reduced in fixed index order, so results are bitwise
reproducible no matter how the probes are scheduled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .rng import RngStream, gaussian_vector


@dataclass(frozen=True)
class QuadraticFormOracle:
    """Evaluator for g^T A g of an implicit symmetric PSD operator A.

    The evaluator must be deterministic in g and safe to share read-only;
    quadratic forms should only dip below zero by noise (>= -1e-8 |g|^2).
    """

    dimension: int
    evaluate: Callable[[np.ndarray], float]


def for_matrix(a: np.ndarray) -> QuadraticFormOracle:
    """Oracle wrapping an explicit dense symmetric matrix (test helper)."""
    a = np.asarray(a, dtype=np.float64)
    return QuadraticFormOracle(dimension=a.shape[0], evaluate=lambda g: float(g @ (a @ g)))


def default_s(epsilon: float, delta: float) -> int:
    """Probe count ceil(20 ln(2/delta) / epsilon^2)."""
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    return math.ceil(20.0 * math.log(2.0 / delta) / epsilon**2)


def estimate_trace(oracle: QuadraticFormOracle, s: int, stream: RngStream) -> float:
    """Mean of s Gaussian quadratic forms: unbiased estimate of trace(A)."""
    if s < 1:
        raise ValueError("s must be at least 1")
    contributions = np.empty(s, dtype=np.float64)
    for i in range(s):
        g = gaussian_vector(stream.child(i), oracle.dimension)
        contributions[i] = oracle.evaluate(g)
    return float(contributions.sum() / s)
