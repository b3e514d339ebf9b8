import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from iwave import dno_operators as dno
from iwave import verification
from iwave.dno_operators import InterfaceField
from iwave.errors import ValidationError
from iwave.params import PhysicalParams

LAYERS = ["plus", "minus"]
L = 16.0


def flat(M=32, period=L):
    return InterfaceField(np.zeros(M), period)


def mode(m, M=32, period=L):
    k = 2 * np.pi * m / period
    return k, InterfaceField.from_function(lambda x: np.cos(k * x), M, period)


def case(p, seed=0, M=32):
    return verification.operator_case(p, seed, M=M)


@pytest.mark.parametrize("size", [3, 6, 0])
def test_interface_field_rejects_bad_sizes(size):
    with pytest.raises(ValidationError):
        InterfaceField(np.zeros(size), 1.0)


def test_layer_validation(rotational):
    with pytest.raises(ValidationError):
        dno.dno_apply(flat(), flat(), "middle", rotational)
    eta = InterfaceField(np.full(32, 0.9999), L)
    with pytest.raises(ValidationError, match="wall"):
        dno.dno_apply(eta, flat(), "plus", rotational)
    with pytest.raises(ValidationError):
        dno.dno_apply(flat(32), flat(64), "plus", rotational)


@pytest.mark.parametrize("layer", LAYERS)
def test_flat_symbol_limits(rotational, layer):
    d = rotational.depth(layer)
    assert dno.flat_symbol_G(1e-4, layer, rotational) / 1e-8 == pytest.approx(d, rel=1e-7)
    assert dno.flat_symbol_G(200.0, layer, rotational) / 200.0 == pytest.approx(1.0, rel=1e-14)
    k = np.linspace(0.1, 5, 50)
    assert np.allclose(-k**2 / dno.flat_symbol_G(k, layer, rotational), -k / np.tanh(d * k), rtol=1e-13)


def test_flat_symbol_B(rotational):
    p = rotational
    one = PhysicalParams(**{**p.to_dict(), "rho_plus": 1e-300})
    k = np.linspace(0.1, 5, 50)
    assert np.allclose(dno.flat_symbol_B(k, one), p.rho_minus * dno.flat_symbol_G(k, "plus", p), rtol=1e-14)
    assert dno.flat_symbol_B(1e-4, p) / 1e-8 == pytest.approx(p.rho_plus * p.d_minus + p.rho_minus * p.d_plus,
                                                              rel=1e-7)
    b = -k / (p.rho_plus * np.tanh(p.d_minus * k) + p.rho_minus * np.tanh(p.d_plus * k))
    assert np.allclose(-k**2 / dno.flat_symbol_B(k, p), b, rtol=1e-13)


@pytest.mark.parametrize("layer", LAYERS)
@pytest.mark.parametrize("m", [1, 3, 8])
def test_flat_dno_matches_symbol(rotational, layer, m):
    k, xi = mode(m)
    g = dno.dno_apply(flat(), xi, layer, rotational)
    assert np.max(np.abs(g.values - dno.flat_symbol_G(k, layer, rotational) * xi.values)) <= 1e-10


@pytest.mark.parametrize("layer", LAYERS)
def test_flat_extension_matches_separation_of_variables(rotational, layer):
    p = rotational
    k, xi = mode(2)
    sol = dno.harmonic_extension(flat(), xi, layer, p)
    wall = p.d_plus if layer == "plus" else -p.d_minus
    exact = np.cos(k * sol.x)[:, None] * np.cosh(k * (sol.y - wall)) / np.cosh(k * p.depth(layer))
    assert np.max(np.abs(sol.values - exact)) <= 1e-12
    assert sol.wall_residual <= 1e-10 and sol.laplace_residual <= 1e-9


@pytest.mark.parametrize("layer", LAYERS)
def test_extension_converges_under_refinement(rotational, layer):
    p = rotational
    errs = []
    for nz in (6, 12):
        k, xi = mode(3)
        sol = dno.harmonic_extension(flat(), xi, layer, p, nz=nz)
        wall = p.d_plus if layer == "plus" else -p.d_minus
        exact = np.cos(k * sol.x)[:, None] * np.cosh(k * (sol.y - wall)) / np.cosh(k * p.depth(layer))
        errs.append(np.max(np.abs(sol.values - exact)))
    # Chebyshev collocation converges faster than any algebraic order; ask for more than fourth order.
    assert errs[1] <= errs[0] / 2**4


@pytest.mark.parametrize("layer", LAYERS)
def test_constants_are_annihilated(rotational, layer):
    eta, *_ = case(rotational)
    g = dno.dno_apply(eta, eta.like(np.full(eta.M, 3.0)), layer, rotational)
    assert np.max(np.abs(g.values)) <= 1e-10


@pytest.mark.parametrize("layer", LAYERS)
def test_outputs_are_mean_free(rotational, layer):
    eta, xi, _, _ = case(rotational, 1)
    assert abs(dno.dno_apply(eta, xi, layer, rotational).values.mean()) <= 1e-12
    assert abs(dno.b_apply(eta, xi, rotational).values.mean()) <= 1e-12
    assert abs(dno.a_apply(eta, xi, rotational).values.mean()) <= 1e-12


@settings(max_examples=8)
@given(st.integers(0, 10_000), st.sampled_from(LAYERS))
def test_self_adjoint_and_nonnegative(seed, layer):
    p = PhysicalParams(rho_plus=1.0, rho_minus=2.0, d_plus=1.0, d_minus=2.0, omega_plus=0.2, omega_minus=0.0,
                       sigma=2.0, g=2.42, c=1.0)
    eta, xi, zeta, _ = case(p, seed)
    a = dno.pairing(zeta, dno.dno_apply(eta, xi, layer, p))
    b = dno.pairing(xi, dno.dno_apply(eta, zeta, layer, p))
    assert abs(a - b) <= 1e-9
    assert dno.pairing(xi, dno.dno_apply(eta, xi, layer, p)) >= -1e-10
    assert dno.pairing(xi, dno.b_apply(eta, xi, p)) >= -1e-10
    assert dno.pairing(xi, dno.a_apply(eta, xi, p)) >= -1e-10


@pytest.mark.parametrize("layer", LAYERS)
def test_dno_solve_inverts(rotational, layer):
    eta, xi, _, _ = case(rotational, 2)
    xi = xi.mean_free()
    back = dno.dno_solve(eta, dno.dno_apply(eta, xi, layer, rotational), layer, rotational)
    assert abs(back.values.mean()) <= 1e-12
    assert np.max(np.abs(back.values - xi.values)) <= 1e-9


def test_iterative_path_matches_direct(rotational):
    eta, xi, _, _ = case(rotational, 3)
    for layer in LAYERS:
        a = dno.LayerSolver(eta.values, eta.period, layer, rotational, method="direct")
        b = dno.LayerSolver(eta.values, eta.period, layer, rotational, method="iterative")
        assert np.max(np.abs(a.apply(xi.values) - b.apply(xi.values))) <= 1e-9
        f = a.apply(xi.values)
        assert np.max(np.abs(a.solve(f) - b.solve(f))) <= 1e-9


def test_b_solve_inverts(rotational):
    eta, xi, _, _ = case(rotational, 4)
    xi = xi.mean_free()
    back = dno.b_solve(eta, dno.b_apply(eta, xi, rotational), rotational)
    assert np.max(np.abs(back.values - xi.values)) <= 1e-9


@pytest.mark.parametrize("m", [1, 4])
def test_flat_a_symbol(rotational, m):
    p = rotational
    k, xi = mode(m)
    tp, tm = np.tanh(p.d_plus * k), np.tanh(p.d_minus * k)
    expected = k * tp * tm / (p.rho_plus * tm + p.rho_minus * tp)
    assert dno.flat_symbol_A(k, p) == pytest.approx(expected, rel=1e-14)
    a = dno.a_apply(flat(), xi, p)
    assert np.max(np.abs(a.values - expected * xi.values)) <= 1e-10


def test_a_orderings_agree(rotational):
    eta, xi, _, _ = case(rotational, 5)
    a = dno.a_apply(eta, xi, rotational, "plus").values
    b = dno.a_apply(eta, xi, rotational, "minus").values
    assert np.max(np.abs(a - b)) <= 1e-8


def test_a_inverse(rotational):
    eta, xi, _, _ = case(rotational, 6)
    xi = xi.mean_free()
    back = dno.a_inverse_apply(eta, dno.a_apply(eta, xi, rotational), rotational)
    assert np.max(np.abs(back.values - xi.values)) <= 1e-8


def test_a_one_layer_limit(rotational):
    p = PhysicalParams(**{**rotational.to_dict(), "rho_plus": 1e-12})
    eta, xi, _, _ = case(p, 7)
    a = dno.a_apply(eta, xi, p).values
    g = dno.dno_apply(eta, xi, "minus", p).values / p.rho_minus
    assert np.max(np.abs(a - g)) <= 1e-9


@pytest.mark.parametrize("layer", LAYERS)
def test_shape_derivative_against_differences(rotational, layer):
    first, second = verification.shape_derivative_errors(rotational, 11, layer)
    assert first <= 1e-6
    assert second <= 1e-4


@pytest.mark.parametrize("layer", LAYERS)
def test_shape_derivatives_vanish_for_zero_variation(rotational, layer):
    eta, xi, zeta, _ = case(rotational)
    zero = eta.like(np.zeros(eta.M))
    assert dno.shape_derivative_pairing(eta, zero, xi, zeta, layer, rotational) == 0.0
    assert dno.second_shape_derivative_pairing(eta, zero, xi, layer, rotational) == 0.0


@pytest.mark.parametrize("layer", LAYERS)
def test_shape_derivative_is_bilinear(rotational, layer):
    eta, xi, zeta, eta_dot = case(rotational)
    a = dno.shape_derivative_pairing(eta, eta_dot, xi, zeta, layer, rotational)
    b = dno.shape_derivative_pairing(eta, eta_dot, xi.like(2.5 * xi.values), zeta, layer, rotational)
    c = dno.shape_derivative_pairing(eta, eta_dot, xi, zeta.like(-0.5 * zeta.values), layer, rotational)
    assert b == pytest.approx(2.5 * a, rel=1e-12)
    assert c == pytest.approx(-0.5 * a, rel=1e-12)


@pytest.mark.parametrize("layer", LAYERS)
@pytest.mark.parametrize("m", [1, 3])
def test_uniform_lift_matches_depth_change(rotational, layer, m):
    # A uniform lift eta_dot = 1 of a flat interface changes the layer depth by -+1.
    p = rotational
    k, xi = mode(m)
    d = p.depth(layer)
    s = -1.0 if layer == "plus" else 1.0
    sech2 = 1.0 / np.cosh(d * k) ** 2
    first = s * k**2 * sech2 * L / 2
    second = -2.0 * k**3 * np.tanh(d * k) * sech2 * L / 2
    lift = flat().like(np.ones(32))
    assert dno.shape_derivative_pairing(flat(), lift, xi, xi, layer, p) == pytest.approx(first, rel=1e-10)
    assert dno.second_shape_derivative_pairing(flat(), lift, xi, layer, p) == pytest.approx(second, rel=1e-10)


def test_derivative_and_integrate():
    x = dno.grid(64, 2 * np.pi)
    assert np.allclose(dno.derivative(np.sin(3 * x), 2 * np.pi), 3 * np.cos(3 * x), atol=1e-12)
    assert np.allclose(dno.derivative(np.sin(3 * x), 2 * np.pi, 2), -9 * np.sin(3 * x), atol=1e-11)
    assert dno.integrate(np.cos(x) ** 2, 2 * np.pi) == pytest.approx(np.pi, rel=1e-14)


@pytest.mark.parametrize("layer", LAYERS)
def test_second_shape_derivative_against_wide_fit(rotational, layer):
    # A polynomial fit over a wide window sits far above the rounding floor of
    # the three-point stencil, so it checks the formula to tighter tolerance.
    eta, xi, _, eta_dot = verification.operator_case(rotational, 15)
    f = lambda s: dno.pairing(xi, dno.dno_apply(eta.like(eta.values + s * eta_dot.values), xi, layer, rotational))
    hs = np.linspace(-2e-2, 2e-2, 21)
    coef = np.polynomial.polynomial.polyfit(hs, [f(h) for h in hs], 8)
    an = dno.second_shape_derivative_pairing(eta, eta_dot, xi, layer, rotational)
    assert abs(2 * coef[2] - an) <= 1e-5 * abs(an)
