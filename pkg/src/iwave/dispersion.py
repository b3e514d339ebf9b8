"""Linear dispersion relation in dimensionless form.

    residual(k) = varrho k coth k + k coth(k d) + shear - alpha - beta k^2

Rescaling the dimensional relation by rho_minus and d_plus turns
rho_pm/rho_minus * k coth(d_pm k / d_plus) into the two coth terms above.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NumericalFault, ValidationError
from .params import NondimParams

ROOT_TOL = 1e-12
_SERIES_CUTOFF = 1e-4


def kcoth(k, a: float):
    """k*coth(a*k), continuous through k = 0 where it equals 1/a."""
    k = np.asarray(k, dtype=float)
    small = np.abs(a * k) < _SERIES_CUTOFF
    safe = np.where(small, 1.0, k)
    direct = safe / np.tanh(a * safe)
    k2 = k * k
    series = 1.0 / a + a * k2 / 3.0 - a**3 * k2 * k2 / 45.0
    out = np.where(small, series, direct)
    return out if out.ndim else float(out)


def residual(k, q: NondimParams):
    k = np.asarray(k, dtype=float)
    out = q.varrho * kcoth(k, 1.0) + kcoth(k, q.d_ratio) + q.shear - q.alpha - q.beta * k * k
    return out if np.ndim(out) else float(out)


def residual_second_derivative_at_zero(q: NondimParams) -> float:
    """Exact value of residual''(0) = 2(beta0 - beta)."""
    return 2.0 * (q.varrho / 3.0 + q.d_ratio / 3.0) - 2.0 * q.beta


@dataclass
class DispersionCurve:
    k_samples: np.ndarray
    residuals: np.ndarray
    roots: list[float] = field(default_factory=list)


def _bisect(q: NondimParams, lo: float, hi: float, f_lo: float) -> float:
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        f_mid = residual(mid, q)
        if f_mid == 0.0:
            return mid
        if np.sign(f_mid) == np.sign(f_lo):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
        if hi - lo <= 4 * np.finfo(float).eps * max(1.0, abs(hi)):
            break
    return 0.5 * (lo + hi)


def find_roots(q: NondimParams, k_max: float, n_seeds: int = 2048) -> list[float]:
    """Nonnegative real roots of the residual on [0, k_max], sorted.

    Sign changes between seeds are refined by bisection.  A seed that touches
    zero (such as k = 0 at criticality) is reported directly.
    """
    if not k_max > 0:
        raise ValidationError("k_max: must be positive")
    if n_seeds < 8:
        raise ValidationError("n_seeds: need at least 8 seeds")
    ks = np.linspace(0.0, k_max, n_seeds)
    rs = residual(ks, q)
    scale = max(1.0, float(np.max(np.abs(rs))))
    roots: list[float] = []
    for i, (k, r) in enumerate(zip(ks, rs)):
        if abs(r) <= ROOT_TOL:
            roots.append(float(k))
            continue
        if i + 1 < len(ks) and abs(rs[i + 1]) > ROOT_TOL and np.sign(r) != np.sign(rs[i + 1]):
            root = _bisect(q, float(k), float(ks[i + 1]), float(r))
            if abs(residual(root, q)) > ROOT_TOL * scale:
                raise NumericalFault("dispersion", "bisection did not reach tolerance", abs(residual(root, q)))
            roots.append(root)
    _check_near_tangency(q, ks, rs)
    roots.sort()
    deduped: list[float] = []
    for r in roots:
        if not deduped or r - deduped[-1] > 1e-8:
            deduped.append(r)
    return deduped


def _check_near_tangency(q: NondimParams, ks: np.ndarray, rs: np.ndarray) -> None:
    # A local extremum of |residual| that dips close to zero between two
    # same-signed seeds may hide a pair of roots.
    h = ks[1] - ks[0]
    for i in range(1, len(ks) - 1):
        if np.sign(rs[i - 1]) != np.sign(rs[i]) or np.sign(rs[i]) != np.sign(rs[i + 1]):
            continue
        if abs(rs[i]) < abs(rs[i - 1]) and abs(rs[i]) < abs(rs[i + 1]):
            curvature = abs(rs[i + 1] - 2 * rs[i] + rs[i - 1]) / h**2
            if abs(rs[i]) < 0.125 * curvature * h**2:
                raise NumericalFault(
                    "dispersion",
                    f"grid too coarse near k={ks[i]:.6g}: possible unresolved root pair",
                    abs(float(rs[i])),
                )


def curve(q: NondimParams, k_max: float, n_samples: int = 512) -> DispersionCurve:
    ks = np.linspace(0.0, k_max, n_samples)
    return DispersionCurve(ks, residual(ks, q), find_roots(q, k_max, max(n_samples, 8)))


def double_root_certificate(q: NondimParams, fd_step: float = 1e-4) -> dict[str, float]:
    """Certify the k = 0 root and its multiplicity at alpha = alpha0.

    The second derivative is reported analytically and by a central
    difference of the residual, which is even so the stencil is symmetric.
    """
    if abs(q.alpha - q.alpha0) > 1e-12:
        raise ValidationError("alpha: double-root certificate requires alpha = alpha0")
    r0 = residual(0.0, q)
    analytic = residual_second_derivative_at_zero(q)
    h = fd_step
    fd = (residual(h, q) - 2.0 * r0 + residual(-h, q)) / h**2
    return {
        "residual_0": r0,
        "second_derivative": analytic,
        "second_derivative_fd": fd,
        "expected": 2.0 * (q.beta0 - q.beta),
        "tangency_order": 4 if abs(analytic) <= 1e-12 else 2,
    }
