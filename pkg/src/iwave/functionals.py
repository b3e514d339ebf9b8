"""Energy, momentum and the slope identity d'(c) = -P(U_c) on discrete states."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import dno_operators as dno
from .dno_operators import InterfaceField
from .errors import NumericalFault, ValidationError
from .params import PhysicalParams, jump, nondim
from .profile import at_epsilon, decay_scale, leading_order

KINEMATIC_TOL = 1e-9


@dataclass(frozen=True)
class DiscreteState:
    """Interface and layer traces on one periodic grid.

    ``slope_plus`` and ``slope_minus`` are the mean values of the trace
    derivatives on the line.  A localized wave drives a uniform far-field
    current, which makes the line traces tend to different constants at the
    two ends; a periodic field cannot carry that mean, so it is kept here.
    """

    eta: InterfaceField
    xi_plus: InterfaceField
    xi_minus: InterfaceField
    slope_plus: float = 0.0
    slope_minus: float = 0.0

    def __post_init__(self) -> None:
        for f in (self.xi_plus, self.xi_minus):
            if f.M != self.eta.M or f.period != self.eta.period:
                raise ValidationError("DiscreteState: fields must share one grid")

    def xi_tilde(self, p: PhysicalParams) -> InterfaceField:
        return self.eta.like(-(p.rho_plus * self.xi_plus.values - p.rho_minus * self.xi_minus.values))

    def shifted(self, steps: int) -> "DiscreteState":
        """Translate every field by a whole number of grid cells."""
        roll = lambda f: f.like(np.roll(f.values, steps))
        return DiscreteState(roll(self.eta), roll(self.xi_plus), roll(self.xi_minus),
                             self.slope_plus, self.slope_minus)

    @classmethod
    def zero(cls, M: int, period: float) -> "DiscreteState":
        z = InterfaceField(np.zeros(M), period)
        return cls(z, z, z)


def _shear_source(eta: InterfaceField) -> np.ndarray:
    """eta eta', written as (eta^2/2)' so that it is exactly mean-free."""
    return dno.derivative(0.5 * eta.values**2, eta.period, 1)


def _surface_terms(eta: InterfaceField, p: PhysicalParams) -> np.ndarray:
    e = eta.values
    ex = dno.derivative(e, eta.period, 1)
    rw2 = jump(p.rho_plus * p.omega_plus**2, p.rho_minus * p.omega_minus**2)
    return (
        -p.g * jump(p.rho_plus, p.rho_minus) * e**2
        - e**3 * rw2 / 3.0
        + 2.0 * p.sigma * (np.sqrt(1.0 + ex**2) - 1.0)
    )


def energy(s: DiscreteState, p: PhysicalParams, nz: int = dno.DEFAULT_NZ) -> float:
    """Energy written with the two layer traces (periodic parts only)."""
    eta = s.eta
    if not np.any(s.xi_plus.values) and not np.any(s.xi_minus.values) and not np.any(eta.values):
        return 0.0
    gm = dno.dno_apply(eta, s.xi_minus, "minus", p, nz).values
    gp = dno.dno_apply(eta, s.xi_plus, "plus", p, nz).values
    xm, xp = s.xi_minus.values, s.xi_plus.values
    rxw = p.rho_plus * xp * p.omega_plus - p.rho_minus * xm * p.omega_minus
    integrand = (
        p.rho_minus * xm * gm
        + p.rho_plus * xp * gp
        - 2.0 * rxw * eta.values * dno.derivative(eta.values, eta.period, 1)
        + _surface_terms(eta, p)
    )
    return 0.5 * dno.integrate(integrand, eta.period)


def traces_from_tilde(eta: InterfaceField, xi_tilde: InterfaceField, p: PhysicalParams,
                      nz: int = dno.DEFAULT_NZ) -> DiscreteState:
    """Recover the layer traces from xi_tilde through B^-1 and the kinematic constraint."""
    src = eta.like(jump(p.omega_plus, p.omega_minus) * _shear_source(eta))
    b_src = dno.b_solve(eta, src, p, nz).values
    gm = dno.dno_apply(eta, xi_tilde, "minus", p, nz)
    gp = dno.dno_apply(eta, xi_tilde, "plus", p, nz)
    xi_plus = -dno.b_solve(eta, gm, p, nz).values + p.rho_minus * b_src
    xi_minus = dno.b_solve(eta, gp, p, nz).values + p.rho_plus * b_src
    return DiscreteState(eta, eta.like(xi_plus), eta.like(xi_minus))


def energy_tilde_form(eta: InterfaceField, xi_tilde: InterfaceField, p: PhysicalParams,
                      nz: int = dno.DEFAULT_NZ) -> float:
    """Energy written with xi_tilde.  Needs several B^-1 solves, so it is a check path only."""
    jw = jump(p.omega_plus, p.omega_minus)
    src = eta.like(jw * _shear_source(eta))
    xt = xi_tilde.values
    a_xt = dno.a_apply(eta, xi_tilde, p, "plus", nz).values
    b_src = dno.b_solve(eta, src, p, nz)
    g_b_src = dno.dno_apply(eta, b_src, "minus", p, nz).values
    b_src = b_src.values
    integrand = (
        xt * a_xt
        + 2.0 * p.rho_plus * xt * g_b_src
        - p.rho_plus * p.rho_minus * src.values * b_src
        + 2.0 * xt * p.omega_minus * eta.values * dno.derivative(eta.values, eta.period, 1)
        + _surface_terms(eta, p)
    )
    return 0.5 * dno.integrate(integrand, eta.period)


def momentum(s: DiscreteState, p: PhysicalParams) -> float:
    """Total momentum.  The far-field slopes enter through -int eta' x dx = int eta dx."""
    eta = s.eta
    ex = dno.derivative(eta.values, eta.period, 1)
    rw = jump(p.rho_plus * p.omega_plus, p.rho_minus * p.omega_minus)
    slope_tilde = -(p.rho_plus * s.slope_plus - p.rho_minus * s.slope_minus)
    periodic = -dno.integrate(ex * s.xi_tilde(p).values - 0.5 * rw * eta.values**2, eta.period)
    return periodic + slope_tilde * dno.integrate(eta.values, eta.period)


def kinematic_residual(s: DiscreteState, p: PhysicalParams, nz: int = dno.DEFAULT_NZ) -> float:
    eta = s.eta
    gm = dno.dno_apply(eta, s.xi_minus, "minus", p, nz).values
    gp = dno.dno_apply(eta, s.xi_plus, "plus", p, nz).values
    target = jump(p.omega_plus, p.omega_minus) * _shear_source(eta)
    return float(np.max(np.abs(gm + gp - target)))


def steady_traces(eta: InterfaceField, p: PhysicalParams, nz: int = dno.DEFAULT_NZ) -> DiscreteState:
    """Layer traces of a wave travelling at speed c with interface eta."""
    ex = dno.derivative(eta.values, eta.period, 1)
    src = _shear_source(eta)
    xi, slope = {}, {}
    for layer, sign in (("plus", 1.0), ("minus", -1.0)):
        rhs = eta.like(p.c * ex + p.vorticity(layer) * src)
        xi[layer] = eta.like(sign * dno.dno_solve(eta, rhs, layer, p, nz).values)
        # The source is F' with F = c eta + omega eta^2 / 2.  At k = 0 the symbol of
        # d/dx G^-1 d/dx is -1/depth, which sets the mean of xi' on the line.
        F = p.c * eta.values + 0.5 * p.vorticity(layer) * eta.values**2
        slope[layer] = -sign * float(np.mean(F)) / p.depth(layer)
    s = DiscreteState(eta, xi["plus"], xi["minus"], slope["plus"], slope["minus"])
    res = kinematic_residual(s, p, nz)
    scale = max(1.0, abs(p.c) * float(np.max(np.abs(ex))))
    if res > KINEMATIC_TOL * scale:
        raise NumericalFault("functionals", "kinematic condition not met by steady traces", res)
    return s


@dataclass
class DPrimeRow:
    epsilon: float
    momentum: float
    m: float
    ratio: float
    relative_error: float


@dataclass
class DPrimeReport:
    rows: list[DPrimeRow]
    order: float
    settings: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "rows": [vars(r) for r in self.rows],
            "order": self.order,
            "settings": self.settings,
        }


def wave_state(p: PhysicalParams, M: int = 256, widths: float = 24.0, nz: int = 16) -> DiscreteState:
    """Leading-order travelling wave on a periodic grid ``widths`` decay scales long."""
    L = widths * decay_scale(p)
    x = dno.grid(M, L) - 0.5 * L
    eta = InterfaceField(leading_order(p, x).eta, L)
    return steady_traces(eta, p, nz)


def dprime_check(p: PhysicalParams, eps_list=(0.1, 0.05, 0.025), M: int = 256, widths: float = 24.0,
                 nz: int = 16) -> DPrimeReport:
    """Compare -P on the leading-order wave with m(c) at each epsilon.

    Gravity is adjusted so that alpha = alpha0 + epsilon^2 at the given speed.
    ``order`` is the least-squares slope of log(relative error) against log(epsilon).
    """
    from .stability import m_of_c

    rows = []
    for eps in eps_list:
        pe = at_epsilon(p, eps)
        s = wave_state(pe, M, widths, nz)
        P = momentum(s, pe)
        m = m_of_c(pe)
        rows.append(DPrimeRow(eps, P, m, -P / m, abs(-P - m) / abs(m)))
    if len(rows) >= 2 and all(r.relative_error > 0 for r in rows):
        le = np.log([r.epsilon for r in rows])
        lr = np.log([r.relative_error for r in rows])
        order = float(np.polyfit(le, lr, 1)[0])
    else:
        order = math.nan
    q = nondim(p)
    return DPrimeReport(rows, order, {"M": M, "widths": widths, "Nz": nz, "frak_A": q.frak_A, "frak_B": q.frak_B})
