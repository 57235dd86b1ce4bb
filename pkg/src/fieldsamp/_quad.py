"""Shared Gauss-Legendre quadrature helpers."""

from __future__ import annotations

from functools import lru_cache

import numpy as np


class ConvergenceError(RuntimeError):
    """Adaptive refinement exhausted its budget before reaching the tolerance.

    Carries the best estimate and the achieved error so callers can report
    how far the computation got.
    """

    def __init__(self, message: str, estimate: float | complex | None = None,
                 achieved: float | None = None):
        super().__init__(message)
        self.estimate = estimate
        self.achieved = achieved


@lru_cache(maxsize=64)
def gauss_legendre(n: int, a: float, b: float) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the n-point Gauss-Legendre rule on [a, b]."""
    x, w = np.polynomial.legendre.leggauss(n)
    half = 0.5 * (b - a)
    nodes = a + half * (x + 1.0)
    weights = half * w
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights
