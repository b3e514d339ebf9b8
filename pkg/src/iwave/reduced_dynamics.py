"""Truncated planar Hamiltonian system on the two-dimensional center manifold.

    Q' = P,    P' = Q + (3K/2) Q^2,    H = P^2/2 - Q^2/2 - (K/2) Q^3

The rescaled amplitude Q relates to the center-manifold coordinate q by
q = beta_star^2 epsilon^2 Q, and X = epsilon x / sqrt(beta_star).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericalFault, ValidationError
from .params import NondimParams

BLOWUP = 1e6


@dataclass(frozen=True)
class ReducedState:
    Q: float
    P: float
    X: float = 0.0


@dataclass(frozen=True)
class ReducedSystem:
    K: float
    epsilon: float = 0.0
    beta_star: float = 1.0

    @classmethod
    def from_params(cls, q: NondimParams) -> "ReducedSystem":
        if not q.beta_star > 0:
            raise ValidationError("beta: reduction needs beta > beta0")
        return cls(K=q.coeff_K, epsilon=q.epsilon, beta_star=q.beta_star)

    def amplitude_scale(self) -> float:
        """Factor taking Q to the center-manifold coordinate q."""
        return self.beta_star**2 * self.epsilon**2

    def momentum_scale(self) -> float:
        """Factor taking P to the center-manifold coordinate p."""
        return self.epsilon**3 * self.beta_star**1.5

    def length_scale(self) -> float:
        """Factor taking X back to the dimensionless spatial variable x."""
        return math.sqrt(self.beta_star) / self.epsilon

    def equilibria(self) -> list[tuple[float, float]]:
        if self.K == 0:
            return [(0.0, 0.0)]
        return [(0.0, 0.0), (-2.0 / (3.0 * self.K), 0.0)]


def vector_field(s: ReducedState, sys: ReducedSystem) -> tuple[float, float]:
    return s.P, s.Q + 1.5 * sys.K * s.Q**2


def jacobian(Q: float, sys: ReducedSystem) -> np.ndarray:
    return np.array([[0.0, 1.0], [1.0 + 3.0 * sys.K * Q, 0.0]])


def homoclinic(X, sys: ReducedSystem):
    """Orbit biasymptotic to the origin, centred at X = 0.

    Scalar X gives a ReducedState; an array gives a tuple of arrays (Q, P).
    """
    if sys.K == 0:
        raise ValidationError("K: homoclinic requires a nonzero cubic coefficient")
    X_arr = np.asarray(X, dtype=float)
    sech2 = 1.0 / np.cosh(0.5 * X_arr) ** 2
    Q = -sech2 / sys.K
    P = sech2 * np.tanh(0.5 * X_arr) / sys.K
    if X_arr.ndim == 0:
        return ReducedState(float(Q), float(P), float(X_arr))
    return Q, P


def homoclinic_derivatives(X, sys: ReducedSystem):
    """Exact X-derivatives (dQ/dX, dP/dX) of the closed-form homoclinic."""
    X = np.asarray(X, dtype=float)
    sech2 = 1.0 / np.cosh(0.5 * X) ** 2
    t = np.tanh(0.5 * X)
    dQ = sech2 * t / sys.K
    dP = 0.5 * sech2 * (1.0 - 3.0 * t**2) / sys.K
    return dQ, dP


def homoclinic_residual(X, sys: ReducedSystem) -> float:
    Q, P = homoclinic(np.atleast_1d(X), sys)
    dQ, dP = homoclinic_derivatives(np.atleast_1d(X), sys)
    return float(max(np.max(np.abs(dQ - P)), np.max(np.abs(dP - Q - 1.5 * sys.K * Q**2))))


def reduced_hamiltonian(s: ReducedState, sys: ReducedSystem) -> float:
    return 0.5 * s.P**2 - 0.5 * s.Q**2 - 0.5 * sys.K * s.Q**3


def _rhs(y: np.ndarray, K: float) -> np.ndarray:
    return np.array([y[1], y[0] + 1.5 * K * y[0] ** 2])


def integrate(s0: ReducedState, sys: ReducedSystem, X_span: tuple[float, float], step: float = 1e-3) -> np.ndarray:
    """Fixed-step classical RK4.

    Returns an array with columns (X, Q, P, H).  A negative span direction
    integrates backwards.  The final step is shortened to land on the end.
    """
    if not step > 0:
        raise ValidationError("step: must be positive")
    X0, X1 = map(float, X_span)
    length = abs(X1 - X0)
    n = max(1, int(math.ceil(length / step - 1e-9)))
    h = (X1 - X0) / n
    K = sys.K
    y = np.array([s0.Q, s0.P], dtype=float)
    out = np.empty((n + 1, 4))
    out[0] = (X0, y[0], y[1], 0.0)
    for i in range(1, n + 1):
        k1 = _rhs(y, K)
        k2 = _rhs(y + 0.5 * h * k1, K)
        k3 = _rhs(y + 0.5 * h * k2, K)
        k4 = _rhs(y + h * k3, K)
        y = y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.all(np.isfinite(y)) or abs(y[0]) + abs(y[1]) > BLOWUP:
            raise NumericalFault("reduced_dynamics", f"trajectory blew up at X={X0 + i * h:.6g}", abs(y[0]) + abs(y[1]))
        out[i, :3] = (X0 + i * h, y[0], y[1])
    out[-1, 0] = X1
    Q, P = out[:, 1], out[:, 2]
    out[:, 3] = 0.5 * P**2 - 0.5 * Q**2 - 0.5 * K * Q**3
    return out
