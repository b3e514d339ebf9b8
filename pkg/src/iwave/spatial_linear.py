"""Linearized spatial-dynamics operator on the flattened two-layer strip.

The state is (eta, gamma, phi_plus, Gamma_plus, phi_minus, Gamma_minus), with
the four profile components sampled at Chebyshev-Lobatto points in z.  Each
layer is mapped to z in [0, 1] with z = 0 at the rigid wall and z = 1 at the
interface.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import chebyshev
from .errors import NumericalFault, ValidationError
from .params import NondimParams


@dataclass
class StateVector:
    eta: float
    gamma: float
    phi_plus: np.ndarray
    Gamma_plus: np.ndarray
    phi_minus: np.ndarray
    Gamma_minus: np.ndarray

    def flat(self) -> np.ndarray:
        return np.concatenate(
            [[self.eta, self.gamma], self.phi_plus, self.Gamma_plus, self.phi_minus, self.Gamma_minus]
        )

    @classmethod
    def unflatten(cls, u: np.ndarray, n: int) -> "StateVector":
        blocks = [u[2 + i * n : 2 + (i + 1) * n] for i in range(4)]
        return cls(float(u[0]), float(u[1]), *blocks)


@dataclass
class DiscreteOperator:
    """Collocation matrix of the operator plus its side conditions.

    ``matrix`` holds the operator rows at every collocation point.
    ``constraints`` holds, in order: phi+_z(0), phi+_z(1), phi-_z(0),
    phi-_z(1), Gamma+(0), Gamma-(0), Gamma+(1), Gamma-(1), mean phi+,
    mean phi-.
    """

    params: NondimParams
    n: int
    z: np.ndarray
    D: np.ndarray
    weights: np.ndarray
    matrix: np.ndarray
    constraints: np.ndarray
    s_row: np.ndarray

    @property
    def size(self) -> int:
        return 2 + 4 * self.n

    def block(self, i: int) -> slice:
        return slice(2 + i * self.n, 2 + (i + 1) * self.n)

    def apply(self, u: np.ndarray) -> np.ndarray:
        return self.matrix @ u

    def constraint_residual(self, u: np.ndarray) -> np.ndarray:
        return self.constraints @ u

    def pencil(self) -> tuple[np.ndarray, np.ndarray]:
        """Generalized eigenproblem A v = lambda B v with the side conditions built in.

        Rows are replaced, not appended.  The phi rows at the wall and the
        interface carry the Neumann conditions.  The Gamma rows at the two
        ends carry Gamma(0) = 0 and Gamma(1) = 0, and the middle Gamma row
        carries the zero-mean condition on phi.  Gamma(1) and the mean of phi
        are the conjugate pair removed with the layer-averaged potentials, so
        both must go for the zero eigenvalue to keep its true multiplicity.
        """
        n = self.n
        A = self.matrix.copy()
        B = np.eye(self.size)
        phi_p, gam_p, phi_m, gam_m = (self.block(i) for i in range(4))
        mid = n // 2
        rows = [
            phi_p.start,
            phi_p.stop - 1,
            phi_m.start,
            phi_m.stop - 1,
            gam_p.start,
            gam_m.start,
            gam_p.stop - 1,
            gam_m.stop - 1,
            gam_p.start + mid,
            gam_m.start + mid,
        ]
        for row, c in zip(rows, self.constraints):
            A[row] = c
            B[row] = 0.0
        return A, B


def assemble(q: NondimParams, n: int = 64) -> DiscreteOperator:
    if n < 16:
        raise ValidationError("N: need at least 16 collocation points")
    if q.beta == 0:
        raise ValidationError("beta: must be nonzero")
    z = chebyshev.nodes(n)
    D = chebyshev.diff_matrix(n)
    wts = chebyshev.quadrature_weights(n)
    if np.any(wts <= 0):
        raise NumericalFault("spatial_linear", "non-positive quadrature weight")
    rho, d, beta = q.varrho, q.d_ratio, q.beta
    wp, wm = q.w_plus, q.w_minus
    size = 2 + 4 * n
    ph_p, ga_p, ph_m, ga_m = (slice(2 + i * n, 2 + (i + 1) * n) for i in range(4))

    # Linear functional shared by the eta row, the Gamma rows and the interface conditions.
    s = np.zeros(size)
    s[1] = 1.0
    s[ph_p] += 2.0 * wp * rho * z * wts
    s[ph_p.stop - 1] += rho
    s[ph_m] += 2.0 * wm * d * z * wts
    s[ph_m.stop - 1] -= 1.0

    L = np.zeros((size, size))
    L[0] = s / beta
    L[1, ga_p] = 2.0 * wp * wts
    L[1, ga_m] = 2.0 * wm * wts
    # Coefficient read with the grouping as displayed; at alpha = alpha0 the
    # eta-column of the gamma row cancels the Gamma integrals on e1 exactly.
    L[1, 0] = (
        -(wp**2 * rho**2 / 3.0 + wp * rho**2 + rho**2) / rho
        - (wm**2 * d**4 / 3.0 - wm * d**3 + d**2) / d**3
        + q.alpha
    )
    L[ph_p, ga_p] = D / rho
    L[ph_p, 0] = wp * (2.0 * z - 1.0)
    L[ga_p] = np.outer(z * (rho - wp * rho * (z - 1.0)), s / beta)
    L[ga_p, ph_p] -= rho * D
    L[ph_m, ga_m] = D / d
    L[ph_m, 0] = wm * (2.0 * z - 1.0)
    L[ga_m] = np.outer(z * (-d + wm * d**2 * (1.0 - z)), s / (d * beta))
    L[ga_m, ph_m] -= D / d

    C = np.zeros((10, size))
    C[0, ph_p] = D[0]
    C[1, ph_p] = D[-1]
    C[1] -= s / beta
    C[2, ph_m] = D[0]
    C[3, ph_m] = D[-1]
    C[3] += d * s / beta
    C[4, ga_p.start] = 1.0
    C[5, ga_m.start] = 1.0
    C[6, ga_p.stop - 1] = 1.0
    C[7, ga_m.stop - 1] = 1.0
    C[8, ph_p] = wts
    C[9, ph_m] = wts
    return DiscreteOperator(q, n, z, D, wts, L, C, s)


def jordan_vectors(op: DiscreteOperator) -> tuple[np.ndarray, np.ndarray]:
    """The kernel vector e1 and generalized vector e2, sampled on the grid."""
    q, z = op.params, op.z
    rho, d = q.varrho, q.d_ratio
    zero = np.zeros_like(z)
    e1 = StateVector(1.0, 0.0, zero, q.w_plus * rho * (z - z**2), zero, q.w_minus * d * (z - z**2))
    gamma2 = q.beta - (rho + d) / 3.0 - (q.w_plus * rho - q.w_minus * d**2) / 12.0
    bump = 0.5 * (z**2 - 1.0 / 3.0)
    e2 = StateVector(0.0, gamma2, bump, zero, -d * bump, zero)
    return e1.flat(), e2.flat()


def symplectic_pairing(op: DiscreteOperator, v: np.ndarray, w: np.ndarray) -> float:
    """Omega(v, w) = gamma_w eta_v - eta_w gamma_v + sum over layers of int(Gamma_w' phi_v - phi_w Gamma_v')."""
    total = w[1] * v[0] - w[0] * v[1]
    for phi_idx, gam_idx in ((0, 1), (2, 3)):
        phi_v, gam_v = v[op.block(phi_idx)], v[op.block(gam_idx)]
        phi_w, gam_w = w[op.block(phi_idx)], w[op.block(gam_idx)]
        integrand = (op.D @ gam_w) * phi_v - phi_w * (op.D @ gam_v)
        total += op.weights @ integrand
    return float(total)


def jordan_chain_check(q: NondimParams, n: int = 64) -> dict[str, float]:
    if abs(q.alpha - q.alpha0) > 1e-12:
        raise ValidationError("alpha: Jordan chain exists only at alpha = alpha0")
    op = assemble(q, n)
    e1, e2 = jordan_vectors(op)
    r1 = np.concatenate([op.apply(e1), op.constraint_residual(e1)])
    r2 = np.concatenate([op.apply(e2) - e1, op.constraint_residual(e2)])
    return {
        "N": n,
        "residual_e1": float(np.max(np.abs(r1))),
        "residual_e2": float(np.max(np.abs(r2))),
        "pairing": symplectic_pairing(op, e1, e2),
        "beta_star": q.beta_star,
    }


def spectrum(op: DiscreteOperator, window: float = 10.0) -> np.ndarray:
    """Finite eigenvalues with |Im| <= window, sorted by (|Im|, Re)."""
    A, B = op.pencil()
    try:
        alpha, beta = scipy.linalg.eig(A, B, right=False, homogeneous_eigvals=True)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericalFault("spatial_linear", f"eigensolver failed: {exc}") from exc
    finite = np.abs(beta) > 1e-10 * np.abs(alpha)
    lam = alpha[finite] / beta[finite]
    lam = lam[np.isfinite(lam) & (np.abs(lam.imag) <= window)]
    return lam[np.lexsort((lam.real, np.abs(lam.imag)))]


def imaginary_wavenumbers(lam: np.ndarray, tol: float = 1e-8) -> np.ndarray:
    """Nonnegative k for eigenvalues lambda = i k (real part below tol)."""
    on_axis = np.abs(lam.real) <= tol * np.maximum(1.0, np.abs(lam))
    return np.sort(np.abs(lam[on_axis].imag))
