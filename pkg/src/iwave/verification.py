"""Self-checks shared by the ``verify`` command and the acceptance tests.

Each suite returns ledger entries {suite, name, value, tolerance, passed}.
Values are errors compared against the tolerance with ``<=``, except where an
entry names a lower bound.
"""

from __future__ import annotations

import math

import numpy as np

from . import dispersion, dno_operators as dno, functionals, params, spatial_linear
from .params import PhysicalParams

SUITES = ("operators", "jordan", "dprime")


def entry(suite: str, name: str, value: float, tolerance: float, lower_bound: bool = False) -> dict:
    ok = math.isfinite(value) and (value >= tolerance if lower_bound else value <= tolerance)
    return {"suite": suite, "name": name, "value": float(value), "tolerance": tolerance, "passed": bool(ok)}


def smooth_field(rng: np.random.Generator, M: int, L: float, modes: int = 5, scale: float = 1.0) -> dno.InterfaceField:
    x = dno.grid(M, L)
    v = np.zeros(M)
    for j in range(1, modes + 1):
        v += rng.normal() / j * np.cos(2 * np.pi * j * x / L + rng.uniform(0, 2 * np.pi))
    return dno.InterfaceField(scale * v, L)


def operator_case(p: PhysicalParams, seed: int, M: int = 64, nz: int = 24):
    """A random smooth interface with amplitude a tenth of the thinner layer, plus data fields."""
    rng = np.random.default_rng(seed)
    L = 8.0 * max(p.d_plus, p.d_minus)
    dmin = min(p.d_plus, p.d_minus)
    eta = smooth_field(rng, M, L, 3)
    eta = eta.like(0.1 * dmin * eta.values / np.max(np.abs(eta.values)))
    xi, zeta, eta_dot = (smooth_field(rng, M, L) for _ in range(3))
    return eta, xi, zeta, eta_dot


def shape_derivative_errors(p: PhysicalParams, seed: int, layer: str, h1: float = 1e-4, h2: float = 1e-3):
    eta, xi, zeta, eta_dot = operator_case(p, seed)
    shift = lambda s: eta.like(eta.values + s * eta_dot.values)
    f1 = lambda s: dno.pairing(zeta, dno.dno_apply(shift(s), xi, layer, p))
    fd1 = (f1(h1) - f1(-h1)) / (2 * h1)
    an1 = dno.shape_derivative_pairing(eta, eta_dot, xi, zeta, layer, p)
    f2 = lambda s: dno.pairing(xi, dno.dno_apply(shift(s), xi, layer, p))
    fd2 = (f2(h2) - 2 * f2(0.0) + f2(-h2)) / h2**2
    an2 = dno.second_shape_derivative_pairing(eta, eta_dot, xi, layer, p)
    return abs(fd1 - an1) / abs(an1), abs(fd2 - an2) / abs(an2)


def flat_symbol_error(p: PhysicalParams, layer: str, M: int = 64) -> float:
    L = 8.0 * max(p.d_plus, p.d_minus)
    eta = dno.InterfaceField(np.zeros(M), L)
    worst = 0.0
    for m in range(1, M // 4 + 1):
        k = 2 * np.pi * m / L
        xi = dno.InterfaceField.from_function(lambda x: np.cos(k * x), M, L)
        g = dno.dno_apply(eta, xi, layer, p).values
        sym = dno.flat_symbol_G(k, layer, p)
        worst = max(worst, float(np.max(np.abs(g - sym * xi.values))) / sym)
    return worst


def operators_suite(p: PhysicalParams, cases: int = 3) -> list[dict]:
    s = "operators"
    out = []
    for layer in ("plus", "minus"):
        out.append(entry(s, f"flat_symbol_{layer}", flat_symbol_error(p, layer), 1e-10))
        eta, xi, zeta, _ = operator_case(p, 0)
        a = dno.pairing(zeta, dno.dno_apply(eta, xi, layer, p))
        b = dno.pairing(xi, dno.dno_apply(eta, zeta, layer, p))
        out.append(entry(s, f"self_adjoint_{layer}", abs(a - b), 1e-9))
        e1 = e2 = 0.0
        for seed in range(cases):
            r1, r2 = shape_derivative_errors(p, seed, layer)
            e1, e2 = max(e1, r1), max(e2, r2)
        out.append(entry(s, f"shape_derivative_{layer}", e1, 1e-6))
        out.append(entry(s, f"second_shape_derivative_{layer}", e2, 1e-4))
    eta, xi, _, _ = operator_case(p, 1)
    w1 = dno.a_apply(eta, xi, p, "plus").values
    w2 = dno.a_apply(eta, xi, p, "minus").values
    out.append(entry(s, "a_orderings", float(np.max(np.abs(w1 - w2))), 1e-8))
    return out


def critical_groups(p: PhysicalParams) -> params.NondimParams:
    q = params.nondim(p)
    return params.groups(q.varrho, q.d_ratio, q.beta, q.w_plus, q.w_minus)


def eigen_root_error(q: params.NondimParams, n: int = 64, window: float = 10.0) -> tuple[float, int]:
    """Largest gap between imaginary eigenvalues of the operator and dispersion roots."""
    op = spatial_linear.assemble(q, n)
    ks = spatial_linear.imaginary_wavenumbers(spatial_linear.spectrum(op, window))
    ks = ks[ks > 1e-6]
    roots = np.array(dispersion.find_roots(q, window))
    roots = roots[roots > 1e-6]
    if roots.size == 0 and ks.size == 0:
        return 0.0, 0
    if roots.size == 0 or ks.size == 0:
        return math.inf, int(roots.size)
    err = max(np.min(np.abs(ks - r)) for r in roots)
    err = max(err, max(np.min(np.abs(roots - k)) for k in ks))
    return float(err), int(roots.size)


def jordan_suite(p: PhysicalParams) -> list[dict]:
    s = "jordan"
    q0 = critical_groups(p)
    chain = spatial_linear.jordan_chain_check(q0, 64)
    cert = dispersion.double_root_certificate(q0)
    out = [
        entry(s, "residual_e1", chain["residual_e1"], 1e-8),
        entry(s, "residual_e2", chain["residual_e2"], 1e-8),
        entry(s, "pairing_minus_beta_star", abs(chain["pairing"] - chain["beta_star"]), 1e-10),
        entry(s, "dispersion_residual_at_zero", abs(cert["residual_0"]), 1e-12),
        entry(s, "second_derivative_fd",
              abs(cert["second_derivative_fd"] - cert["expected"]) / max(1.0, abs(cert["expected"])), 1e-6),
    ]
    err, _ = eigen_root_error(params.nondim(p))
    out.append(entry(s, "eigenvalues_vs_roots", err, 1e-6))
    return out


def dprime_suite(p: PhysicalParams) -> list[dict]:
    s = "dprime"
    rep = functionals.dprime_check(p)
    first = rep.rows[0]
    return [
        entry(s, f"relative_error_eps_{first.epsilon:g}", first.relative_error, 0.2),
        entry(s, "fitted_order", rep.order, 0.8, lower_bound=True),
    ]


def run_suite(name: str, p: PhysicalParams) -> list[dict]:
    return {"operators": operators_suite, "jordan": jordan_suite, "dprime": dprime_suite}[name](p)
