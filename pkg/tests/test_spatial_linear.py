import numpy as np
import pytest

from iwave import dispersion, spatial_linear
from iwave.errors import ValidationError
from iwave.params import groups

CRITICAL = [
    (0.5, 2.0, 1.0, 0.0, 0.0),
    (0.5, 2.0, 1.0, 0.2, 0.0),
    (0.3, 1.2, 0.9, -0.1, 0.25),
    (0.8, 0.7, 0.6, 0.15, -0.2),
]


@pytest.mark.parametrize("case", CRITICAL)
def test_jordan_chain(case):
    q = groups(*case)
    rep = spatial_linear.jordan_chain_check(q, 64)
    assert rep["residual_e1"] <= 1e-8
    assert rep["residual_e2"] <= 1e-8
    assert abs(rep["pairing"] - q.beta_star) <= 1e-10


def test_jordan_rejects_off_critical():
    q = groups(0.5, 2.0, 1.0)
    with pytest.raises(ValidationError):
        spatial_linear.jordan_chain_check(q.with_alpha(q.alpha0 + 0.01))


def test_assemble_rejects_small_n():
    with pytest.raises(ValidationError):
        spatial_linear.assemble(groups(0.5, 2.0, 1.0), 8)


def test_state_vector_roundtrip():
    n = 16
    u = np.arange(2 + 4 * n, dtype=float)
    assert np.array_equal(spatial_linear.StateVector.unflatten(u, n).flat(), u)


@pytest.mark.parametrize("case", CRITICAL[:2])
def test_zero_is_double_eigenvalue(case):
    q = groups(*case)
    lam = spatial_linear.spectrum(spatial_linear.assemble(q, 64), 10.0)
    near_zero = lam[np.abs(lam) < 1e-4]
    assert near_zero.size == 2
    op = spatial_linear.assemble(q, 64)
    A, B = op.pencil()
    # Geometric multiplicity one: the pencil A - 0 B has a one-dimensional kernel.
    s = np.linalg.svd(A, compute_uv=False)
    assert np.sum(s < 1e-8 * s[0]) == 1


@pytest.mark.parametrize("eps", [0.05, 0.02, 0.01])
def test_real_pair_above_criticality(eps):
    q0 = groups(0.5, 2.0, 1.0, 0.2, 0.0)
    q = q0.with_alpha(q0.alpha0 + eps**2)
    lam = spatial_linear.spectrum(spatial_linear.assemble(q, 64), 10.0)
    real = np.sort(lam[(np.abs(lam.imag) < 1e-8) & (np.abs(lam) < 0.5)].real)
    assert real.size == 2
    assert real[0] == pytest.approx(-real[1], abs=1e-10)
    mu = eps / np.sqrt(q.beta_star)
    assert abs(real[1] - mu) <= 2.0 * eps**2


@pytest.mark.parametrize("varrho,d,beta", [(0.5, 2.0, 0.3), (0.3, 1.0, 0.1), (0.5, 2.0, 1.0)])
def test_imaginary_eigenvalues_match_roots(varrho, d, beta):
    q0 = groups(varrho, d, beta)
    q = q0.with_alpha(q0.alpha0 - 0.1) if beta < q0.beta0 else q0
    ks = spatial_linear.imaginary_wavenumbers(spatial_linear.spectrum(spatial_linear.assemble(q, 64), 10.0))
    ks = ks[ks > 1e-6]
    roots = np.array([r for r in dispersion.find_roots(q, 10.0) if r > 1e-6])
    # Each root k shows up as the pair +ik, -ik.
    assert ks.size == 2 * roots.size
    assert np.all(np.abs(ks[::2] - roots) <= 1e-6) and np.all(np.abs(ks[1::2] - roots) <= 1e-6)


def test_hamiltonian_quadruple_symmetry():
    q0 = groups(0.4, 1.5, 0.3, 0.1, -0.1)
    lam = spatial_linear.spectrum(spatial_linear.assemble(q0.with_alpha(q0.alpha0 + 0.02), 64), 10.0)
    for mirror in (-lam, np.conj(lam), -np.conj(lam)):
        gaps = np.min(np.abs(lam[:, None] - mirror[None, :]), axis=1)
        assert np.all(gaps <= 1e-6 * np.maximum(1.0, np.abs(lam)))


def test_eigenvalues_converge_in_n():
    q0 = groups(0.5, 2.0, 0.3)
    q = q0.with_alpha(q0.alpha0 - 0.1)

    def tracked(n):
        ks = spatial_linear.imaginary_wavenumbers(spatial_linear.spectrum(spatial_linear.assemble(q, n), 5.0))
        return np.sort(ks[ks > 1e-6])

    a, b = tracked(64), tracked(128)
    assert a.size == b.size >= 2
    assert np.max(np.abs(a - b)) <= 1e-8
