"""Leading-order solitary-wave profile in physical variables."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .params import DEGENERATE_TOL, SUPERCRITICAL_TOL, NondimParams, PhysicalParams, nondim
from .reduced_dynamics import ReducedSystem, homoclinic

DEFAULT_POINTS = 4096
DEFAULT_HALF_WIDTH = 10.0  # in decay scales
MAX_EPSILON = 0.5


class Polarity(str, enum.Enum):
    ELEVATION = "Elevation"
    DEPRESSION = "Depression"
    DEGENERATE = "Degenerate"


@dataclass
class WaveProfile:
    x_grid: np.ndarray
    eta: np.ndarray
    epsilon: float
    polarity: Polarity
    decay_scale: float

    @property
    def amplitude(self) -> float:
        return float(self.eta[np.argmax(np.abs(self.eta))]) if self.eta.size else 0.0

    def metadata(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "polarity": self.polarity.value,
            "decay_scale": self.decay_scale,
            "amplitude": self.amplitude,
        }


def polarity(q: NondimParams) -> Polarity:
    if abs(q.frak_B) <= DEGENERATE_TOL:
        return Polarity.DEGENERATE
    return Polarity.ELEVATION if q.frak_B > 0 else Polarity.DEPRESSION


def at_epsilon(p: PhysicalParams, epsilon: float) -> PhysicalParams:
    """Adjust gravity so that alpha = alpha0 + epsilon^2 at the current speed."""
    if p.rho_plus == p.rho_minus:
        raise ValidationError("rho_plus: equal densities leave alpha independent of g")
    q = nondim(p)
    alpha = q.alpha0 + epsilon**2
    g = alpha * p.rho_minus * p.c**2 / ((p.rho_minus - p.rho_plus) * p.d_plus)
    return PhysicalParams(**{**p.to_dict(), "g": g})


def _checked(p: PhysicalParams) -> NondimParams:
    q = nondim(p)
    if not q.beta_star > SUPERCRITICAL_TOL:
        raise ValidationError("beta: profile requires beta > beta0")
    eps = q.epsilon
    if not (eps > 0 and eps <= MAX_EPSILON):
        raise ValidationError(f"epsilon: must lie in (0, {MAX_EPSILON}], got {eps!r}")
    return q


def decay_scale(p: PhysicalParams) -> float:
    q = _checked(p)
    return 2.0 * p.d_plus * math.sqrt(q.beta_star) / q.epsilon


def default_grid(p: PhysicalParams, points: int = DEFAULT_POINTS) -> np.ndarray:
    half = DEFAULT_HALF_WIDTH * decay_scale(p)
    return np.linspace(-half, half, points)


def leading_order(p: PhysicalParams, x_grid: np.ndarray | None = None) -> WaveProfile:
    q = _checked(p)
    scale = 2.0 * p.d_plus * math.sqrt(q.beta_star) / q.epsilon
    x = default_grid(p) if x_grid is None else np.asarray(x_grid, dtype=float)
    pol = polarity(q)
    if pol is Polarity.DEGENERATE:
        return WaveProfile(x, np.zeros_like(x), q.epsilon, pol, scale)
    eta = p.d_plus * q.epsilon**2 / np.cosh(x / scale) ** 2 / q.frak_B
    return WaveProfile(x, eta, q.epsilon, pol, scale)


def profile_from_reduced(sys: ReducedSystem, p: PhysicalParams, x_grid: np.ndarray | None = None) -> WaveProfile:
    """Rebuild the profile from the homoclinic of the reduced system.

    X = epsilon x / (d_plus sqrt(beta_star)); q = beta_star^2 epsilon^2 Q; the
    interface component of q f1 is q / sqrt(beta_star), made dimensional by d_plus.
    """
    q = _checked(p)
    x = default_grid(p) if x_grid is None else np.asarray(x_grid, dtype=float)
    scale = 2.0 * p.d_plus * math.sqrt(q.beta_star) / q.epsilon
    if polarity(q) is Polarity.DEGENERATE or sys.K == 0:
        return WaveProfile(x, np.zeros_like(x), q.epsilon, Polarity.DEGENERATE, scale)
    X = x / (p.d_plus * sys.length_scale())
    Q, _ = homoclinic(X, sys)
    eta = p.d_plus * sys.amplitude_scale() * Q / math.sqrt(sys.beta_star)
    pol = Polarity.ELEVATION if eta[np.argmax(np.abs(eta))] > 0 else Polarity.DEPRESSION
    return WaveProfile(x, eta, q.epsilon, pol, scale)
