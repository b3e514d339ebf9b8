"""Chebyshev-Lobatto collocation on the unit interval."""

from __future__ import annotations

import numpy as np


def nodes(n: int) -> np.ndarray:
    """n Lobatto points on [0, 1], ascending, with z[0] = 0 and z[-1] = 1."""
    j = np.arange(n)
    return 0.5 * (1.0 - np.cos(np.pi * j / (n - 1)))


def diff_matrix(n: int) -> np.ndarray:
    """First-derivative matrix on ``nodes(n)``."""
    m = n - 1
    x = np.cos(np.pi * np.arange(n) / m)
    cw = np.ones(n)
    cw[0] = cw[-1] = 2.0
    cw *= (-1.0) ** np.arange(n)
    dx = x[:, None] - x[None, :]
    D = np.outer(cw, 1.0 / cw) / (dx + np.eye(n))
    D -= np.diag(D.sum(axis=1))
    # x runs from 1 down to -1 while z = (1 - x)/2 runs up, so d/dz = -2 d/dx.
    return -2.0 * D


def quadrature_weights(n: int) -> np.ndarray:
    """Clenshaw-Curtis weights on [0, 1] for ``nodes(n)``."""
    m = n - 1
    theta = np.pi * np.arange(n) / m
    w = np.zeros(n)
    interior = np.arange(1, m)
    v = np.ones(m - 1)
    if m % 2 == 0:
        w[0] = w[m] = 1.0 / (m**2 - 1)
        for k in range(1, m // 2):
            v -= 2.0 * np.cos(2 * k * theta[interior]) / (4 * k**2 - 1)
        v -= np.cos(m * theta[interior]) / (m**2 - 1)
    else:
        w[0] = w[m] = 1.0 / m**2
        for k in range(1, (m - 1) // 2 + 1):
            v -= 2.0 * np.cos(2 * k * theta[interior]) / (4 * k**2 - 1)
    w[interior] = 2.0 * v / m
    return 0.5 * w
