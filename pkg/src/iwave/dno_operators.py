"""Dirichlet-Neumann operators of the two layers on a periodic interface.

Each layer is flattened onto z in [0, 1] by y = y_wall + z (eta - y_wall), so
z = 0 is the rigid wall and z = 1 the interface.  The mapped Laplace equation
is collocated with Fourier modes in x and Chebyshev-Lobatto points in z.

Sign conventions:  G_minus xi = phi_y - eta' phi_x on the interface, and
G_plus xi = -(phi_y - eta' phi_x), so both are outward normal derivatives
scaled by sqrt(1 + eta'^2).  Their flat symbols are k tanh(d k).
"""

from __future__ import annotations

import threading
from collections import OrderedDict
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse.linalg as spla

from . import chebyshev
from .errors import NumericalFault, ValidationError
from .params import PhysicalParams

LAYERS = ("plus", "minus")
DEFAULT_NZ = 24
DIRECT_LIMIT = 4096
GMRES_RTOL = 1e-12
# True residual, relative to the right-hand side, above which an iterative solve is a fault.
RESIDUAL_FAULT = 1e-8
WALL_MARGIN = 1e-3


@dataclass(frozen=True)
class InterfaceField:
    values: np.ndarray
    period: float

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1:
            raise ValidationError("InterfaceField: values must be one-dimensional")
        m = v.size
        if m < 4 or m & (m - 1):
            raise ValidationError(f"InterfaceField: size must be a power of two, got {m}")
        if not self.period > 0:
            raise ValidationError("InterfaceField: period must be positive")
        object.__setattr__(self, "values", v)

    @property
    def M(self) -> int:
        return self.values.size

    @property
    def x(self) -> np.ndarray:
        return grid(self.M, self.period)

    @classmethod
    def from_function(cls, f, M: int, period: float) -> "InterfaceField":
        return cls(np.asarray(f(grid(M, period)), dtype=float), period)

    def like(self, values: np.ndarray) -> "InterfaceField":
        return InterfaceField(values, self.period)

    def mean_free(self) -> "InterfaceField":
        return self.like(self.values - self.values.mean())


@dataclass
class StripSolution:
    x: np.ndarray
    z: np.ndarray
    y: np.ndarray
    values: np.ndarray
    laplace_residual: float
    wall_residual: float


def grid(M: int, period: float) -> np.ndarray:
    return period * np.arange(M) / M


def wavenumbers(M: int, period: float) -> np.ndarray:
    return 2.0 * np.pi / period * np.arange(M // 2 + 1)


def derivative(f: np.ndarray, period: float, order: int = 1, axis: int = 0) -> np.ndarray:
    """Spectral derivative of a periodic array along ``axis``."""
    M = f.shape[axis]
    k = wavenumbers(M, period)
    symbol = (1j * k) ** order
    if order % 2:
        symbol[-1] = 0.0
    shape = [1] * f.ndim
    shape[axis] = k.size
    fh = np.fft.rfft(f, axis=axis) * symbol.reshape(shape)
    return np.fft.irfft(fh, n=M, axis=axis)


def integrate(f: np.ndarray, period: float) -> float:
    """Trapezoid rule on the periodic grid."""
    return float(period * np.mean(f))


def pairing(f: InterfaceField, g: InterfaceField) -> float:
    return integrate(f.values * g.values, f.period)


def flat_symbol_G(k, layer: str, p: PhysicalParams):
    k = np.asarray(k, dtype=float)
    out = k * np.tanh(p.depth(layer) * k)
    return out if out.ndim else float(out)


def flat_symbol_B(k, p: PhysicalParams):
    k = np.asarray(k, dtype=float)
    out = p.rho_plus * k * np.tanh(p.d_minus * k) + p.rho_minus * k * np.tanh(p.d_plus * k)
    return out if out.ndim else float(out)


def flat_symbol_A(k, p: PhysicalParams):
    """Symbol of G_plus B^-1 G_minus at a flat interface, zero at k = 0."""
    k = np.asarray(k, dtype=float)
    tp, tm = np.tanh(p.d_plus * k), np.tanh(p.d_minus * k)
    den = p.rho_plus * tm + p.rho_minus * tp
    safe = np.where(den == 0, 1.0, den)
    out = np.where(den == 0, 0.0, np.abs(k) * tp * tm / safe)
    return out if out.ndim else float(out)


class _EquilibratedLU:
    """LU of a row-equilibrated matrix with one step of iterative refinement.

    Wall, interior and interface rows differ in scale by several orders of
    magnitude; equilibration plus refinement keeps solves accurate enough for
    finite-difference checks in the interface shape.
    """

    def __init__(self, A: np.ndarray):
        self.row_scale = 1.0 / np.max(np.abs(A), axis=1)
        self.lu = scipy.linalg.lu_factor(A * self.row_scale[:, None])

    def solve(self, rhs: np.ndarray, matvec) -> np.ndarray:
        u = scipy.linalg.lu_solve(self.lu, rhs * self.row_scale)
        r = rhs - matvec(u)
        return u + scipy.linalg.lu_solve(self.lu, r * self.row_scale)


class LayerSolver:
    """Mapped Laplace problem in one layer for a fixed interface shape."""

    def __init__(self, eta: np.ndarray, period: float, layer: str, p: PhysicalParams, nz: int = DEFAULT_NZ,
                 method: str = "auto"):
        if layer not in LAYERS:
            raise ValidationError(f"layer: expected 'plus' or 'minus', got {layer!r}")
        if nz < 4:
            raise ValidationError("Nz: need at least 4 points")
        self.eta = np.asarray(eta, dtype=float)
        self.period = float(period)
        self.layer = layer
        self.M = self.eta.size
        self.nz = nz
        self.y_wall = p.d_plus if layer == "plus" else -p.d_minus
        self.sign = -1.0 if layer == "plus" else 1.0
        h = self.eta - self.y_wall
        depth = p.depth(layer)
        if np.any(self.sign * h <= WALL_MARGIN * depth):
            raise ValidationError(f"eta: interface touches the {layer} wall")
        self.h = h
        self.eta_x = derivative(self.eta, period, 1)
        eta_xx = derivative(self.eta, period, 2)
        self.z = chebyshev.nodes(nz)
        self.Dz = chebyshev.diff_matrix(nz)
        self.Dzz = self.Dz @ self.Dz
        z = self.z[None, :]
        hx = self.h[:, None]
        ex = self.eta_x[:, None]
        self.c_xz = -2.0 * z * ex / hx
        self.c_zz = (1.0 + z**2 * ex**2) / hx**2
        self.c_z = 2.0 * z * ex**2 / hx**2 - z * eta_xx[:, None] / hx
        self.k = wavenumbers(self.M, period)
        self.h0 = float(np.mean(h))
        n_unknown = self.M * (nz - 1)
        if method == "auto":
            method = "direct" if self.M * nz <= DIRECT_LIMIT else "iterative"
        if method not in ("direct", "iterative"):
            raise ValidationError(f"method: unknown solver {method!r}")
        self.method = method
        self._n_unknown = n_unknown
        self._dirichlet_lu = None
        self._neumann_lu = None
        self._flat_dirichlet = None
        self._flat_neumann = None

    # -- operator pieces -------------------------------------------------
    def laplacian(self, phi: np.ndarray) -> np.ndarray:
        phi_z = phi @ self.Dz.T
        return (
            derivative(phi, self.period, 2)
            + self.c_xz * derivative(phi_z, self.period, 1)
            + self.c_zz * (phi @ self.Dzz.T)
            + self.c_z * phi_z
        )

    def interface_flux(self, phi: np.ndarray) -> np.ndarray:
        """Scaled outward normal derivative at z = 1."""
        phi_z = phi @ self.Dz[-1]
        xi_x = derivative(phi[:, -1], self.period, 1)
        ex = self.eta_x
        return self.sign * ((1.0 + ex**2) * phi_z / self.h - ex * xi_x)

    def _dirichlet_rows(self, phi: np.ndarray) -> np.ndarray:
        rows = np.empty((self.M, self.nz - 1))
        rows[:, 0] = phi @ self.Dz[0]
        rows[:, 1:] = self.laplacian(phi)[:, 1:-1]
        return rows

    def _dirichlet_matrix(self) -> np.ndarray:
        M, nz = self.M, self.nz
        Ix, Iz = np.eye(M), np.eye(nz)
        Dx1 = derivative(Ix, self.period, 1)
        Dx2 = derivative(Ix, self.period, 2)
        full = (
            np.kron(Dx2, Iz)
            + self.c_xz.reshape(-1, 1) * np.kron(Dx1, self.Dz)
            + self.c_zz.reshape(-1, 1) * np.kron(Ix, self.Dzz)
            + self.c_z.reshape(-1, 1) * np.kron(Ix, self.Dz)
        )
        wall = np.kron(Ix, self.Dz[0:1])
        full = full.reshape(M, nz, M * nz)
        full[:, 0, :] = wall
        return full

    # -- Dirichlet problem -----------------------------------------------
    def _flat_dirichlet_inverse(self) -> np.ndarray:
        if self._flat_dirichlet is None:
            nz = self.nz
            base = np.zeros((nz - 1, nz - 1))
            base[0] = self.Dz[0, :-1]
            base[1:] = self.Dzz[1:-1, :-1] / self.h0**2
            eye = np.eye(nz - 1)
            eye[0] = 0.0
            self._flat_dirichlet = np.array([np.linalg.inv(base - kk**2 * eye) for kk in self.k])
        return self._flat_dirichlet

    def _precondition_dirichlet(self, r: np.ndarray) -> np.ndarray:
        R = np.fft.rfft(r.reshape(self.M, self.nz - 1), axis=0)
        U = np.einsum("kij,kj->ki", self._flat_dirichlet_inverse(), R)
        return np.fft.irfft(U, n=self.M, axis=0).ravel()

    def _assemble_dirichlet(self, U: np.ndarray, xi: np.ndarray) -> np.ndarray:
        phi = np.empty((self.M, self.nz))
        phi[:, :-1] = U.reshape(self.M, self.nz - 1)
        phi[:, -1] = xi
        return phi

    def extend(self, xi: np.ndarray) -> np.ndarray:
        """Harmonic extension of interface data xi, returned on the (x, z) grid."""
        xi = np.asarray(xi, dtype=float)
        rhs = -self._dirichlet_rows(self._assemble_dirichlet(np.zeros(self._n_unknown), xi)).ravel()
        if self.method == "direct":
            if self._dirichlet_lu is None:
                full = self._dirichlet_matrix()
                A = full[:, :-1, :].reshape(self._n_unknown, self.M, self.nz)[:, :, :-1]
                self._dirichlet_lu = _EquilibratedLU(A.reshape(self._n_unknown, self._n_unknown))
            U = self._dirichlet_lu.solve(
                rhs, lambda u: self._dirichlet_rows(self._assemble_dirichlet(u, np.zeros(self.M))).ravel())
        else:
            U = self._gmres(
                lambda u: self._dirichlet_rows(self._assemble_dirichlet(u, np.zeros(self.M))).ravel(),
                rhs,
                self._precondition_dirichlet,
            )
        return self._assemble_dirichlet(U, xi)

    def apply(self, xi: np.ndarray) -> np.ndarray:
        return self.interface_flux(self.extend(xi))

    # -- Neumann problem (inverse operator) ------------------------------
    def _neumann_rows(self, phi: np.ndarray, shift: float) -> np.ndarray:
        out = np.empty(self.M * self.nz + 1)
        rows = np.empty((self.M, self.nz))
        rows[:, 0] = phi @ self.Dz[0]
        rows[:, 1:-1] = self.laplacian(phi)[:, 1:-1]
        rows[:, -1] = self.interface_flux(phi) + shift
        out[:-1] = rows.ravel()
        out[-1] = phi[:, -1].mean()
        return out

    def _flat_neumann_inverse(self) -> np.ndarray:
        if self._flat_neumann is None:
            nz = self.nz
            base = np.zeros((nz + 1, nz + 1))
            base[0, :nz] = self.Dz[0]
            base[1:-2, :nz] = self.Dzz[1:-1] / self.h0**2
            base[-2, :nz] = self.sign * self.Dz[-1] / self.h0
            eye = np.zeros((nz + 1, nz + 1))
            eye[1:-2, :nz] = np.eye(nz)[1:-1]
            mats = []
            for kk in self.k:
                A = base - kk**2 * eye
                if kk == 0:
                    A[-2, -1] = 1.0
                    A[-1, nz - 1] = 1.0
                else:
                    A[-1, -1] = 1.0
                mats.append(np.linalg.inv(A))
            self._flat_neumann = np.array(mats)
        return self._flat_neumann

    def _precondition_neumann(self, r: np.ndarray) -> np.ndarray:
        M, nz = self.M, self.nz
        R = np.fft.rfft(r[:-1].reshape(M, nz), axis=0)
        ext = np.zeros((R.shape[0], nz + 1), dtype=complex)
        ext[:, :nz] = R
        ext[0, nz] = r[-1] * M
        U = np.einsum("kij,kj->ki", self._flat_neumann_inverse(), ext)
        out = np.empty(M * nz + 1)
        out[:-1] = np.fft.irfft(U[:, :nz], n=M, axis=0).ravel()
        out[-1] = U[0, nz].real / M
        return out

    def solve(self, f: np.ndarray) -> np.ndarray:
        """Mean-free xi with G xi = f (f should be mean-free)."""
        f = np.asarray(f, dtype=float)
        rhs = np.zeros(self.M * self.nz + 1)
        rhs[:-1].reshape(self.M, self.nz)[:, -1] = f
        if self.method == "direct":
            if self._neumann_lu is None:
                self._neumann_lu = _EquilibratedLU(self._neumann_matrix())
            sol = self._neumann_lu.solve(
                rhs, lambda u: self._neumann_rows(u[:-1].reshape(self.M, self.nz), u[-1]))
        else:
            sol = self._gmres(
                lambda u: self._neumann_rows(u[:-1].reshape(self.M, self.nz), u[-1]),
                rhs,
                self._precondition_neumann,
            )
        xi = sol[:-1].reshape(self.M, self.nz)[:, -1]
        return xi - xi.mean()

    def _neumann_matrix(self) -> np.ndarray:
        M, nz = self.M, self.nz
        n = M * nz
        full = self._dirichlet_matrix().reshape(M, nz, n)
        A = np.zeros((n + 1, n + 1))
        body = A[:n, :n].reshape(M, nz, n)
        body[:, :-1, :] = full[:, :-1, :]
        Ix = np.eye(M)
        ex = self.eta_x
        Dx1 = derivative(Ix, self.period, 1)
        flux = self.sign * (
            ((1.0 + ex**2) / self.h)[:, None] * np.kron(Ix, self.Dz[-1:])
            - ex[:, None] * np.kron(Dx1, np.eye(nz)[-1:])
        )
        body[:, -1, :] = flux
        A[:n, :n] = body.reshape(n, n)
        A[np.arange(nz - 1, n, nz), n] = 1.0
        A[n, np.arange(nz - 1, n, nz)] = 1.0 / M
        return A

    # -- shared ------------------------------------------------------------
    def _gmres(self, matvec, rhs: np.ndarray, precond) -> np.ndarray:
        n = rhs.size
        A = spla.LinearOperator((n, n), matvec=matvec, dtype=float)
        P = spla.LinearOperator((n, n), matvec=precond, dtype=float)
        scale = float(np.linalg.norm(rhs))
        if scale == 0.0:
            return np.zeros(n)
        history: list[float] = []
        x, info = spla.gmres(A, rhs, M=P, rtol=GMRES_RTOL, atol=0.0, restart=60, maxiter=8,
                             callback=history.append, callback_type="pr_norm")
        res = float(np.linalg.norm(matvec(x) - rhs)) / scale
        if info != 0 and res > RESIDUAL_FAULT:
            raise NumericalFault("dno_operators", f"GMRES did not converge after {len(history)} iterations", res)
        return x

    def strip_solution(self, xi: np.ndarray) -> StripSolution:
        phi = self.extend(xi)
        lap = self.laplacian(phi)[:, 1:-1]
        wall = phi @ self.Dz[0]
        y = self.y_wall + self.z[None, :] * self.h[:, None]
        return StripSolution(
            x=grid(self.M, self.period),
            z=self.z,
            y=y,
            values=phi,
            laplace_residual=float(np.max(np.abs(lap))),
            wall_residual=float(np.max(np.abs(wall))),
        )


_CACHE: "OrderedDict[tuple, LayerSolver]" = OrderedDict()
_CACHE_LOCK = threading.Lock()
_CACHE_SIZE = 8


def layer_solver(eta: InterfaceField, layer: str, p: PhysicalParams, nz: int = DEFAULT_NZ,
                 method: str = "auto") -> LayerSolver:
    key = (eta.values.tobytes(), eta.period, layer, tuple(p.to_dict().values()), nz, method)
    with _CACHE_LOCK:
        solver = _CACHE.get(key)
        if solver is not None:
            _CACHE.move_to_end(key)
            return solver
    solver = LayerSolver(eta.values, eta.period, layer, p, nz, method)
    with _CACHE_LOCK:
        _CACHE[key] = solver
        while len(_CACHE) > _CACHE_SIZE:
            _CACHE.popitem(last=False)
    return solver


def _check_pair(eta: InterfaceField, xi: InterfaceField) -> None:
    if eta.M != xi.M or eta.period != xi.period:
        raise ValidationError("fields must share one periodic grid")


def harmonic_extension(eta: InterfaceField, xi: InterfaceField, layer: str, p: PhysicalParams,
                       nz: int = DEFAULT_NZ) -> StripSolution:
    _check_pair(eta, xi)
    return layer_solver(eta, layer, p, nz).strip_solution(xi.values)


def dno_apply(eta: InterfaceField, xi: InterfaceField, layer: str, p: PhysicalParams,
              nz: int = DEFAULT_NZ) -> InterfaceField:
    _check_pair(eta, xi)
    return xi.like(layer_solver(eta, layer, p, nz).apply(xi.values))


def dno_solve(eta: InterfaceField, f: InterfaceField, layer: str, p: PhysicalParams,
              nz: int = DEFAULT_NZ) -> InterfaceField:
    """Mean-free solution of G(eta) xi = f."""
    _check_pair(eta, f)
    return f.like(layer_solver(eta, layer, p, nz).solve(f.values - f.values.mean()))


def b_apply(eta: InterfaceField, xi: InterfaceField, p: PhysicalParams, nz: int = DEFAULT_NZ) -> InterfaceField:
    gm = dno_apply(eta, xi, "minus", p, nz).values
    gp = dno_apply(eta, xi, "plus", p, nz).values
    return xi.like(p.rho_plus * gm + p.rho_minus * gp)


def b_solve(eta: InterfaceField, f: InterfaceField, p: PhysicalParams, nz: int = DEFAULT_NZ) -> InterfaceField:
    """Mean-free w with B(eta) w = f, by GMRES preconditioned with the flat symbol."""
    _check_pair(eta, f)
    M, L = f.M, f.period
    sym = flat_symbol_B(wavenumbers(M, L), p)
    inv = np.where(sym > 0, 1.0 / np.where(sym > 0, sym, 1.0), 0.0)

    def project(v):
        return v - v.mean()

    def matvec(v):
        return project(b_apply(eta, f.like(project(v)), p, nz).values)

    def precond(v):
        return np.fft.irfft(np.fft.rfft(project(v)) * inv, n=M)

    rhs = project(f.values)
    scale = float(np.linalg.norm(rhs))
    if scale == 0.0:
        return f.like(np.zeros(M))
    A = spla.LinearOperator((M, M), matvec=matvec, dtype=float)
    P = spla.LinearOperator((M, M), matvec=precond, dtype=float)
    history: list[float] = []
    w, info = spla.gmres(A, rhs, M=P, rtol=GMRES_RTOL, atol=0.0, restart=min(M, 200), maxiter=5,
                         callback=history.append, callback_type="pr_norm")
    res = float(np.linalg.norm(matvec(w) - rhs)) / scale
    if info != 0 and res > RESIDUAL_FAULT:
        raise NumericalFault("dno_operators", f"B solve stalled; residual history {history[-5:]}", res)
    return f.like(project(w))


def a_apply(eta: InterfaceField, xi: InterfaceField, p: PhysicalParams, order: str = "plus",
            nz: int = DEFAULT_NZ) -> InterfaceField:
    """A(eta) xi = G_order B^-1 G_other xi; ``order`` names the outer operator."""
    if order not in LAYERS:
        raise ValidationError(f"order: expected 'plus' or 'minus', got {order!r}")
    inner = "minus" if order == "plus" else "plus"
    w = b_solve(eta, dno_apply(eta, xi, inner, p, nz), p, nz)
    return dno_apply(eta, w, order, p, nz)


def a_inverse_apply(eta: InterfaceField, f: InterfaceField, p: PhysicalParams, nz: int = DEFAULT_NZ) -> InterfaceField:
    """A^-1 f = rho_plus G_plus^-1 f + rho_minus G_minus^-1 f."""
    gp = dno_solve(eta, f, "plus", p, nz).values
    gm = dno_solve(eta, f, "minus", p, nz).values
    return f.like(p.rho_plus * gp + p.rho_minus * gm)


def velocity_traces(eta: InterfaceField, xi: InterfaceField, layer: str, p: PhysicalParams,
                    nz: int = DEFAULT_NZ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(a1, a2, G xi) on the interface.

    a1 is the horizontal velocity (sign-flipped in the upper layer) and a2
    minus the vertical velocity, both written in terms of xi' and G xi.
    """
    gxi = dno_apply(eta, xi, layer, p, nz).values
    xi_x = derivative(xi.values, xi.period, 1)
    ex = derivative(eta.values, eta.period, 1)
    w = 1.0 + ex**2
    s = 1.0 if layer == "plus" else -1.0
    a1 = (-s * xi_x - ex * gxi) / w
    a2 = (s * gxi - ex * xi_x) / w
    return a1, a2, gxi


def shape_derivative_pairing(eta: InterfaceField, eta_dot: InterfaceField, xi: InterfaceField,
                             zeta: InterfaceField, layer: str, p: PhysicalParams,
                             nz: int = DEFAULT_NZ) -> float:
    """int zeta (DG(eta)[eta_dot] xi) dx through the velocity-trace representation."""
    a1, a2, _ = velocity_traces(eta, xi, layer, p, nz)
    g_zeta = dno_apply(eta, zeta, layer, p, nz).values
    zeta_x = derivative(zeta.values, zeta.period, 1)
    return integrate((a1 * zeta_x + a2 * g_zeta) * eta_dot.values, eta.period)


def second_shape_derivative_pairing(eta: InterfaceField, eta_dot: InterfaceField, xi: InterfaceField,
                                    layer: str, p: PhysicalParams, nz: int = DEFAULT_NZ) -> float:
    """int xi (D^2 G(eta)[eta_dot, eta_dot] xi) dx."""
    a1, a2, _ = velocity_traces(eta, xi, layer, p, nz)
    a4 = -2.0 * derivative(a1, eta.period, 1) * a2
    v = a2 * eta_dot.values
    gv = dno_apply(eta, eta.like(v), layer, p, nz).values
    return integrate(a4 * eta_dot.values**2 + 2.0 * v * gv, eta.period)
