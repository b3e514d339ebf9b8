"""Physical and nondimensional parameters for two-layer waves with constant vorticity.

Layer ``plus`` is the upper fluid (0 < y < d_plus), layer ``minus`` the lower
fluid (-d_minus < y < 0).  Jumps are always taken as upper minus lower.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields
from typing import Any, Mapping

from .errors import ValidationError

SUPERCRITICAL_TOL = 1e-12
DEGENERATE_TOL = 1e-12


def jump(plus: float, minus: float) -> float:
    """Jump across the interface, upper value minus lower value."""
    return plus - minus


@dataclass(frozen=True)
class PhysicalParams:
    rho_plus: float
    rho_minus: float
    d_plus: float
    d_minus: float
    omega_plus: float
    omega_minus: float
    sigma: float
    g: float
    c: float

    def __post_init__(self) -> None:
        for f in fields(self):
            value = getattr(self, f.name)
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ValidationError(f"{f.name}: expected a number, got {value!r}")
            if not math.isfinite(value):
                raise ValidationError(f"{f.name}: must be finite, got {value!r}")
            object.__setattr__(self, f.name, float(value))
        if not self.rho_plus > 0:
            raise ValidationError("rho_plus: must be positive")
        if self.rho_plus > self.rho_minus:
            raise ValidationError("rho_plus: exceeds rho_minus (unstable stratification)")
        if not (self.d_plus > 0 and self.d_minus > 0):
            raise ValidationError("d_plus/d_minus: layer depths must be positive")
        if not self.sigma > 0:
            raise ValidationError("sigma: must be positive")
        if not self.g > 0:
            raise ValidationError("g: must be positive")
        if self.c == 0:
            raise ValidationError("c: wave speed must be nonzero")

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any]) -> "PhysicalParams":
        """Build from a JSON-style mapping, rejecting unknown or missing keys."""
        if not isinstance(data, Mapping):
            raise ValidationError("config: expected a JSON object")
        names = [f.name for f in fields(cls)]
        unknown = sorted(set(data) - set(names))
        if unknown:
            raise ValidationError(f"config.{unknown[0]}: unknown key")
        missing = [n for n in names if n not in data]
        if missing:
            raise ValidationError(f"config.{missing[0]}: missing key")
        return cls(**{n: data[n] for n in names})

    def to_dict(self) -> dict[str, float]:
        return asdict(self)

    def with_speed(self, c: float) -> "PhysicalParams":
        return PhysicalParams(**{**asdict(self), "c": c})

    def depth(self, layer: str) -> float:
        if layer == "plus":
            return self.d_plus
        if layer == "minus":
            return self.d_minus
        raise ValidationError(f"layer: expected 'plus' or 'minus', got {layer!r}")

    def density(self, layer: str) -> float:
        self.depth(layer)
        return self.rho_plus if layer == "plus" else self.rho_minus

    def vorticity(self, layer: str) -> float:
        self.depth(layer)
        return self.omega_plus if layer == "plus" else self.omega_minus


@dataclass(frozen=True)
class NondimParams:
    """Dimensionless groups.

    ``w_plus`` and ``w_minus`` are the scaled vorticities omega*d_plus/c.
    ``epsilon`` and ``coeff_K`` are NaN where they are undefined
    (alpha below alpha0, or beta at or below beta0).
    """

    alpha: float
    beta: float
    varrho: float
    d_ratio: float
    w_plus: float
    w_minus: float
    alpha0: float
    beta0: float
    beta_star: float
    epsilon: float
    frak_A: float
    frak_B: float
    coeff_K: float

    @property
    def shear(self) -> float:
        """Vorticity shift of the long-wave limit, (omega_+ d_+ varrho - omega_- d_+)/c."""
        return self.w_plus * self.varrho - self.w_minus

    @property
    def supercritical(self) -> bool:
        return self.beta_star > SUPERCRITICAL_TOL

    def with_alpha(self, alpha: float) -> "NondimParams":
        return groups(self.varrho, self.d_ratio, self.beta, self.w_plus, self.w_minus, alpha=alpha)


@dataclass(frozen=True)
class FamilyDerivatives:
    d_alpha_c: float
    d_beta_c: float
    d_alpha0: float
    d_epsilon: float
    d_frak_A: float
    d_frak_B: float


def _alpha0(varrho: float, d: float, w_plus: float, w_minus: float) -> float:
    return varrho + 1.0 / d + w_plus * varrho - w_minus


def _frak_A(varrho: float, d: float, w_plus: float, w_minus: float) -> float:
    return varrho + 1.0 / d + 0.5 * (w_plus * varrho - w_minus)


def _frak_B(varrho: float, d: float, w_plus: float, w_minus: float) -> float:
    return (
        varrho
        - 1.0 / d**2
        + w_plus * varrho
        + w_minus / d
        + (w_plus**2 * varrho - w_minus**2) / 3.0
    )


def groups(
    varrho: float,
    d_ratio: float,
    beta: float,
    w_plus: float = 0.0,
    w_minus: float = 0.0,
    alpha: float | None = None,
) -> NondimParams:
    """Assemble every derived group from the primitive ones.

    Passing ``alpha=None`` places the state exactly at criticality.
    """
    if not (varrho > 0 and d_ratio > 0):
        raise ValidationError("varrho and d_ratio must be positive")
    alpha0 = _alpha0(varrho, d_ratio, w_plus, w_minus)
    if alpha is None:
        alpha = alpha0
    beta0 = (varrho + d_ratio) / 3.0
    beta_star = beta - beta0
    gap = alpha - alpha0
    epsilon = math.sqrt(gap) if gap >= 0 else math.nan
    frak_B = _frak_B(varrho, d_ratio, w_plus, w_minus)
    coeff_K = -(beta_star**1.5) * frak_B if beta_star > 0 else math.nan
    return NondimParams(
        alpha=alpha,
        beta=beta,
        varrho=varrho,
        d_ratio=d_ratio,
        w_plus=w_plus,
        w_minus=w_minus,
        alpha0=alpha0,
        beta0=beta0,
        beta_star=beta_star,
        epsilon=epsilon,
        frak_A=_frak_A(varrho, d_ratio, w_plus, w_minus),
        frak_B=frak_B,
        coeff_K=coeff_K,
    )


def nondim(p: PhysicalParams) -> NondimParams:
    alpha = -p.g * jump(p.rho_plus, p.rho_minus) * p.d_plus / (p.rho_minus * p.c**2)
    beta = p.sigma / (p.d_plus * p.rho_minus * p.c**2)
    return groups(
        varrho=p.rho_plus / p.rho_minus,
        d_ratio=p.d_minus / p.d_plus,
        beta=beta,
        w_plus=p.omega_plus * p.d_plus / p.c,
        w_minus=p.omega_minus * p.d_plus / p.c,
        alpha=alpha,
    )


def critical_pair(p: PhysicalParams) -> tuple[float, float]:
    """Return (beta0, alpha0), where k=0 becomes a double root of the dispersion relation."""
    q = nondim(p)
    return q.beta0, q.alpha0


def family_derivatives(p: PhysicalParams, frozen_alpha0: bool = False) -> FamilyDerivatives:
    """Closed-form derivatives in c at fixed densities, depths, vorticities, sigma and g.

    With ``frozen_alpha0`` the critical value alpha0 is held at its value at the
    current speed, so epsilon only moves through alpha.
    """
    q = nondim(p)
    if not q.epsilon > 0:
        raise ValidationError("epsilon: must be positive (alpha > alpha0) for c-derivatives")
    c = p.c
    rho = q.varrho
    d = q.d_ratio
    wp, wm = p.omega_plus * p.d_plus, p.omega_minus * p.d_plus
    d_alpha_c = -2.0 * q.alpha / c
    d_beta_c = -2.0 * q.beta / c
    d_alpha0 = 0.0 if frozen_alpha0 else (wm - wp * rho) / c**2
    return FamilyDerivatives(
        d_alpha_c=d_alpha_c,
        d_beta_c=d_beta_c,
        d_alpha0=d_alpha0,
        d_epsilon=(d_alpha_c - d_alpha0) / (2.0 * q.epsilon),
        d_frak_A=(wm - wp * rho) / (2.0 * c**2),
        d_frak_B=(
            -wp * rho / c**2
            - wm / (c**2 * d)
            - 2.0 * wp**2 * rho / (3.0 * c**3)
            + 2.0 * wm**2 / (3.0 * c**3)
        ),
    )


def from_groups(
    varrho: float,
    d_ratio: float,
    alpha: float,
    beta: float,
    w_plus: float = 0.0,
    w_minus: float = 0.0,
    *,
    c: float = 1.0,
    rho_minus: float = 1.0,
    d_plus: float = 1.0,
) -> PhysicalParams:
    """Pick dimensional inputs that reproduce the requested dimensionless groups."""
    if not 0 < varrho < 1:
        raise ValidationError("varrho: must lie in (0, 1) to give positive gravity")
    rho_plus = varrho * rho_minus
    return PhysicalParams(
        rho_plus=rho_plus,
        rho_minus=rho_minus,
        d_plus=d_plus,
        d_minus=d_ratio * d_plus,
        omega_plus=w_plus * c / d_plus,
        omega_minus=w_minus * c / d_plus,
        sigma=beta * d_plus * rho_minus * c**2,
        g=alpha * rho_minus * c**2 / ((rho_minus - rho_plus) * d_plus),
        c=c,
    )
