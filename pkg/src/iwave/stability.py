"""Moment-of-instability slope m(c), its c-derivative, and stability verdicts.

m(c) = -4 A c eps^3 rho_minus d_plus^2 sqrt(beta_star) / B^2, where A and B are
the vorticity-corrected coefficients frak_A and frak_B.  A wave is stable when
m'(c) > 0 and unstable when m'(c) < 0.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import NumericalFault, ValidationError
from .params import DEGENERATE_TOL, SUPERCRITICAL_TOL, PhysicalParams, family_derivatives, nondim
from .profile import Polarity, polarity

FD_CONSISTENCY = 1e-4
VERDICT_TOL = 1e-12


class Verdict(str, enum.Enum):
    STABLE = "Stable"
    UNSTABLE = "Unstable"
    INCONCLUSIVE = "Inconclusive"


@dataclass
class StabilityReport:
    m: float
    m_prime: float
    bracket: float
    verdict: Verdict
    polarity: Polarity
    frozen_alpha0: bool
    inputs: dict

    def to_dict(self) -> dict:
        out = asdict(self)
        out["verdict"] = self.verdict.value
        out["polarity"] = self.polarity.value
        return out


def _require(p: PhysicalParams, alpha0: float | None = None):
    q = nondim(p)
    if alpha0 is None:
        eps = q.epsilon
    else:
        gap = q.alpha - alpha0
        eps = math.sqrt(gap) if gap > 0 else math.nan
    if not q.beta_star > SUPERCRITICAL_TOL:
        raise ValidationError("beta: stability index requires beta > beta0")
    if not eps > 0:
        raise ValidationError("epsilon: requires alpha > alpha0")
    if abs(q.frak_B) <= DEGENERATE_TOL:
        raise ValidationError("frak_B: degenerate, no leading-order wave")
    return q, eps


def m_of_c(p: PhysicalParams, alpha0: float | None = None) -> float:
    """m(c).  Passing ``alpha0`` holds the critical value fixed instead of using its value at c."""
    q, eps = _require(p, alpha0)
    return (
        -4.0 * q.frak_A * p.c * eps**3 * p.rho_minus * p.d_plus**2 * math.sqrt(q.beta_star) / q.frak_B**2
    )


def _bracket_terms(p: PhysicalParams, frozen_alpha0: bool) -> tuple[np.ndarray, float]:
    q, eps = _require(p)
    fd = family_derivatives(p, frozen_alpha0=frozen_alpha0)
    A, B, c, bs = q.frak_A, q.frak_B, p.c, q.beta_star
    terms = np.array([
        B**2 * fd.d_frak_A * eps**3 * c * bs,
        B**2 * A * eps**3 * bs,
        B**2 * 3.0 * A * c * eps**2 * fd.d_epsilon * bs,
        B**2 * A * c * eps**3 * fd.d_beta_c / 2.0,
        -2.0 * A * B * fd.d_frak_B * c * eps**3 * bs,
    ])
    # The bracket is written per unit rho_minus d_plus^2; that constant factor is restored here.
    prefactor = -4.0 * p.rho_minus * p.d_plus**2 / (B**4 * math.sqrt(bs))
    return terms, prefactor


def m_prime_fd(p: PhysicalParams, frozen_alpha0: bool = False, rel_step: float = 1e-6) -> float:
    """Central difference of m in c at fixed physical parameters.

    The step is capped at a hundredth of the distance in c to beta = beta0 and
    to alpha = alpha0, so the stencil never leaves the region where m exists.
    """
    q, eps = _require(p)
    fd = family_derivatives(p, frozen_alpha0=frozen_alpha0)
    h = min(
        rel_step * abs(p.c),
        0.01 * q.beta_star / abs(fd.d_beta_c),
        0.01 * eps**2 / max(abs(fd.d_alpha_c - fd.d_alpha0), 1e-300),
    )
    a0 = nondim(p).alpha0 if frozen_alpha0 else None
    return (m_of_c(p.with_speed(p.c + h), a0) - m_of_c(p.with_speed(p.c - h), a0)) / (2.0 * h)


def m_prime(p: PhysicalParams, frozen_alpha0: bool = False, check: bool = True) -> tuple[float, float]:
    """(m'(c), bracket) from the closed-form family derivatives.

    With ``check`` the value is compared with ``m_prime_fd`` and a relative
    disagreement above 1e-4 raises a consistency fault.
    """
    terms, prefactor = _bracket_terms(p, frozen_alpha0)
    bracket = float(terms.sum())
    value = prefactor * bracket
    if check:
        fd = m_prime_fd(p, frozen_alpha0)
        scale = abs(prefactor) * float(np.abs(terms).sum())
        if abs(fd - value) > FD_CONSISTENCY * max(abs(value), VERDICT_TOL * scale):
            raise NumericalFault("stability", "closed-form m' disagrees with finite difference",
                                 abs(fd - value) / max(abs(value), 1e-300))
    return value, bracket


def classify(p: PhysicalParams, frozen_alpha0: bool = False) -> StabilityReport:
    terms, prefactor = _bracket_terms(p, frozen_alpha0)
    value, bracket = m_prime(p, frozen_alpha0)
    tol = VERDICT_TOL * abs(prefactor) * float(np.abs(terms).sum())
    if value > tol:
        verdict = Verdict.STABLE
    elif value < -tol:
        verdict = Verdict.UNSTABLE
    else:
        verdict = Verdict.INCONCLUSIVE
    return StabilityReport(
        m=m_of_c(p),
        m_prime=value,
        bracket=bracket,
        verdict=verdict,
        polarity=polarity(nondim(p)),
        frozen_alpha0=frozen_alpha0,
        inputs=p.to_dict(),
    )


# -- regime tables ---------------------------------------------------------

@dataclass(frozen=True)
class RegimeRow:
    """One cell of a regime table.

    ``layer`` is the rotational layer, the other vorticity is zero.  The
    hypothesis is lo < r < hi on r = c omega / g, with each bound a function of
    varrho; ``closed`` marks a bound that is included.
    """

    name: str
    table: str
    polarity: Polarity
    layer: str
    lo: object
    hi: object
    closed: str
    expected: Verdict

    def contains(self, varrho: float, r: float) -> bool:
        lo, hi = self.lo(varrho), self.hi(varrho)
        above = r >= lo if self.closed == "lo" else r > lo
        below = r <= hi if self.closed == "hi" else r < hi
        return above and below


REGIME_TABLES = {
    "stability": (
        RegimeRow("elevation/omega_minus", "stability", Polarity.ELEVATION, "minus",
                  lambda v: 2.0 * (v - 1.0), lambda v: 0.0, "hi", Verdict.STABLE),
        RegimeRow("depression/omega_plus", "stability", Polarity.DEPRESSION, "plus",
                  lambda v: 0.0, lambda v: 2.0 * (1.0 - v) / v, "lo", Verdict.STABLE),
    ),
    "instability": (
        RegimeRow("elevation/omega_plus", "instability", Polarity.ELEVATION, "plus",
                  lambda v: max(0.0, 2.0 * (v - 1.0) / v), lambda v: math.inf, "", Verdict.UNSTABLE),
        RegimeRow("depression/omega_minus", "instability", Polarity.DEPRESSION, "minus",
                  lambda v: -math.inf, lambda v: min(0.0, 2.0 * (v - 1.0)), "", Verdict.UNSTABLE),
    ),
}


def regime_point(varrho: float, d_ratio: float, r: float, c_sign: float, layer: str, epsilon: float,
                 beta_star: float) -> PhysicalParams | None:
    """Physical parameters with c omega / g = r in ``layer`` and alpha = alpha0 + epsilon^2.

    Units: rho_minus = d_plus = |c| = 1.  Gravity follows from the requested
    epsilon; None means no positive gravity reaches alpha > alpha0 at this r.
    """
    s = varrho if layer == "plus" else -1.0
    den = (1.0 - varrho) - r * s
    # Near the bound gravity blows up and alpha - alpha0 is lost to cancellation.
    if den <= 1e-9 * (1.0 - varrho):
        return None
    g = (varrho + 1.0 / d_ratio + epsilon**2) / den
    c = float(c_sign)
    omega = r * g / c
    beta = (varrho + d_ratio) / 3.0 + beta_star
    return PhysicalParams(
        rho_plus=varrho, rho_minus=1.0, d_plus=1.0, d_minus=d_ratio,
        omega_plus=omega if layer == "plus" else 0.0,
        omega_minus=omega if layer == "minus" else 0.0,
        sigma=beta, g=g, c=c,
    )


@dataclass
class SweepRow:
    table: str
    row: str
    varrho: float
    d_ratio: float
    r: float
    c_sign: float
    status: str  # inside, infeasible, polarity, degenerate
    expected: str
    verdict: str
    m: float
    m_prime: float
    match: bool


@dataclass
class SweepResult:
    rows: list[SweepRow]

    def inside(self, table: str | None = None) -> list[SweepRow]:
        return [r for r in self.rows if r.status == "inside" and (table is None or r.table == table)]

    def mismatches(self, table: str | None = None) -> list[SweepRow]:
        return [r for r in self.inside(table) if not r.match]

    def summary(self) -> dict:
        out = {}
        for t in sorted({r.table for r in self.rows}):
            rows = [r for r in self.rows if r.table == t]
            inside = self.inside(t)
            out[t] = {
                "points": len(rows),
                "inside": len(inside),
                "matched": sum(r.match for r in inside),
                "infeasible": sum(r.status == "infeasible" for r in rows),
                "wrong_polarity": sum(r.status == "polarity" for r in rows),
                "degenerate": sum(r.status == "degenerate" for r in rows),
            }
        return out


DEFAULT_GRID = {
    "varrho": [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9],
    "d_ratio": [0.5, 0.8, 1.25, 2.0, 3.0, 5.0],
    "r_fractions": [0.05, 0.2, 0.35, 0.5, 0.65, 0.8, 0.95],
    "c_sign": [1.0, -1.0],
    "epsilon": 0.1,
    "beta_star": 0.5,
    "r_span": 4.0,
}


def feasible_r(layer: str, varrho: float) -> tuple[float, float]:
    """Open interval of r = c omega / g on which some g > 0 gives alpha > alpha0."""
    if layer == "plus":
        return -math.inf, (1.0 - varrho) / varrho
    return varrho - 1.0, math.inf


def _r_values(row: RegimeRow, varrho: float, fractions, span: float) -> list[float]:
    """Sample the hypothesis interval, clipped to where waves exist when that is nonempty."""
    lo, hi = row.lo(varrho), row.hi(varrho)
    f_lo, f_hi = feasible_r(row.layer, varrho)
    if max(lo, f_lo) < min(hi, f_hi):
        lo, hi = max(lo, f_lo), min(hi, f_hi)
    if math.isinf(lo):
        lo = hi - span
    if math.isinf(hi):
        hi = lo + span
    return [lo + f * (hi - lo) for f in fractions]


def regime_sweep(grid: dict | None = None, tables=("stability", "instability"),
                 frozen_alpha0: bool = False) -> SweepResult:
    """Classify every grid point of the requested regime tables.

    A point counts as inside a row when a wave exists there (positive gravity)
    and its polarity is the one the row is about.  Mismatches are returned as
    data, never raised.
    """
    spec = {**DEFAULT_GRID, **(grid or {})}
    unknown = set(spec) - set(DEFAULT_GRID)
    if unknown:
        raise ValidationError(f"grid: unknown keys {sorted(unknown)}")
    out = []
    for table in tables:
        if table not in REGIME_TABLES:
            raise ValidationError(f"table: unknown regime table {table!r}")
        for row in REGIME_TABLES[table]:
            for varrho, d_ratio, c_sign in itertools.product(spec["varrho"], spec["d_ratio"], spec["c_sign"]):
                for r in _r_values(row, varrho, spec["r_fractions"], spec["r_span"]):
                    out.append(_sweep_point(row, varrho, d_ratio, r, c_sign, spec, frozen_alpha0))
    return SweepResult(out)


def _sweep_point(row: RegimeRow, varrho, d_ratio, r, c_sign, spec, frozen_alpha0) -> SweepRow:
    base = dict(table=row.table, row=row.name, varrho=varrho, d_ratio=d_ratio, r=r, c_sign=c_sign,
                expected=row.expected.value)
    nan = dict(verdict="", m=math.nan, m_prime=math.nan, match=False)
    p = regime_point(varrho, d_ratio, r, c_sign, row.layer, spec["epsilon"], spec["beta_star"])
    if p is None:
        return SweepRow(status="infeasible", **base, **nan)
    pol = polarity(nondim(p))
    if pol is Polarity.DEGENERATE:
        return SweepRow(status="degenerate", **base, **nan)
    if pol is not row.polarity:
        return SweepRow(status="polarity", **base, **nan)
    rep = classify(p, frozen_alpha0)
    return SweepRow(status="inside", **base, verdict=rep.verdict.value, m=rep.m, m_prime=rep.m_prime,
                    match=rep.verdict is row.expected)
