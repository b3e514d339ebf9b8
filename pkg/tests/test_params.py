import math

import pytest
from hypothesis import given, strategies as st

from iwave import params
from iwave.errors import ValidationError
from iwave.params import PhysicalParams, critical_pair, family_derivatives, groups, jump, nondim
from strategies import wave_params


def test_jump_is_plus_minus_minus():
    assert jump(3.0, 1.0) == 2.0


def test_irrotational_reference(irrotational):
    q = nondim(irrotational)
    assert q.varrho == 0.5 and q.d_ratio == 2.0
    assert q.beta0 == pytest.approx(5 / 6, abs=1e-15)
    assert q.alpha0 == pytest.approx(1.0, abs=1e-15)
    assert q.beta == pytest.approx(1.0, abs=1e-15)


def test_rotational_reference(rotational):
    q = nondim(rotational)
    assert q.alpha0 == pytest.approx(1.1, abs=1e-14)
    assert q.frak_B == pytest.approx(0.5 - 0.25 + 0.1 + 0.02 / 3, abs=1e-14)
    assert q.alpha == pytest.approx(1.21, abs=1e-14)
    assert q.epsilon == pytest.approx(math.sqrt(0.11), abs=1e-14)


@pytest.mark.parametrize("varrho,d,wp,expected", [
    (0.5, 2.0, 0.0, (5 / 6, 1.0)),
    (0.5, 2.0, 0.2, (5 / 6, 1.1)),
    (1.0, 1.0, 0.0, (2 / 3, 2.0)),
])
def test_critical_pair(varrho, d, wp, expected):
    p = PhysicalParams(rho_plus=varrho, rho_minus=1.0, d_plus=1.0, d_minus=d, omega_plus=wp, omega_minus=0.0,
                       sigma=1.0, g=1.0, c=1.0)
    beta0, alpha0 = critical_pair(p)
    assert beta0 == pytest.approx(expected[0], abs=1e-14)
    assert alpha0 == pytest.approx(expected[1], abs=1e-14)


@pytest.mark.parametrize("field,value", [
    ("rho_plus", 3.0), ("rho_plus", 0.0), ("d_plus", -1.0), ("d_minus", 0.0), ("sigma", 0.0),
    ("g", -1.0), ("c", 0.0), ("g", math.nan), ("c", math.inf),
])
def test_invalid_inputs_rejected(irrotational, field, value):
    with pytest.raises(ValidationError, match=field):
        PhysicalParams(**{**irrotational.to_dict(), field: value})


def test_from_mapping_rejects_unknown_and_missing(irrotational):
    data = irrotational.to_dict()
    with pytest.raises(ValidationError):
        PhysicalParams.from_mapping({**data, "extra": 1.0})
    data.pop("sigma")
    with pytest.raises(ValidationError):
        PhysicalParams.from_mapping(data)


def test_irrotational_coefficient_derivatives_vanish(irrotational):
    fd = family_derivatives(irrotational)
    assert fd.d_frak_A == 0.0 and fd.d_frak_B == 0.0


def test_family_derivatives_reject_critical_speed(irrotational):
    p = irrotational
    q = nondim(p)
    g0 = q.alpha0 * p.rho_minus * p.c**2 / ((p.rho_minus - p.rho_plus) * p.d_plus)
    with pytest.raises(ValidationError):
        family_derivatives(PhysicalParams(**{**p.to_dict(), "g": g0 * 0.99}))


def _base(p, name):
    q = nondim(p)
    return {"d_alpha_c": q.alpha, "d_beta_c": q.beta, "d_alpha0": q.alpha0, "d_epsilon": q.epsilon,
            "d_frak_A": q.frak_A, "d_frak_B": q.frak_B}[name]


FIELDS = ["d_alpha_c", "d_beta_c", "d_alpha0", "d_epsilon", "d_frak_A", "d_frak_B"]


# The central-difference truncation error grows like h^2 / eps^4, so draws stay at eps >= 0.2.
@given(wave_params(eps_min=0.2))
def test_family_derivatives_match_central_differences(p):
    fd = family_derivatives(p)
    h = 1e-5 * abs(p.c)
    for name in FIELDS:
        num = (_base(p.with_speed(p.c + h), name) - _base(p.with_speed(p.c - h), name)) / (2 * h)
        ana = getattr(fd, name)
        assert abs(num - ana) <= 1e-6 * max(abs(ana), 1e-3), name


@pytest.mark.parametrize("name", ["d_epsilon", "d_frak_B"])
def test_derivative_error_is_second_order(rotational, name):
    p = rotational
    ana = getattr(family_derivatives(p), name)
    errs = []
    for h in (1e-2, 5e-3):
        num = (_base(p.with_speed(p.c + h), name) - _base(p.with_speed(p.c - h), name)) / (2 * h)
        errs.append(abs(num - ana))
    assert 3.5 < errs[0] / errs[1] < 4.5


@given(wave_params())
def test_group_invariants(p):
    q = nondim(p)
    assert q.beta0 == pytest.approx((q.varrho + q.d_ratio) / 3, rel=1e-14)
    assert q.beta_star == pytest.approx(q.beta - q.beta0, abs=1e-14)
    assert q.epsilon**2 == pytest.approx(q.alpha - q.alpha0, rel=1e-9)
    assert q.coeff_K == pytest.approx(-q.beta_star**1.5 * q.frak_B, rel=1e-14)
    assert q.coeff_K * q.frak_B < 0


@given(wave_params(), st.floats(0.2, 5.0))
def test_beta0_independent_of_speed_and_vorticity(p, factor):
    q1 = nondim(p)
    q2 = nondim(PhysicalParams(**{**p.to_dict(), "c": p.c * factor, "omega_plus": 0.0, "omega_minus": 0.0}))
    assert q1.beta0 == q2.beta0


@given(wave_params(), st.floats(0.2, 5.0))
def test_alpha0_depends_on_vorticity_only_through_shear(p, factor):
    q = nondim(p)
    same = PhysicalParams(**{**p.to_dict(), "c": p.c * factor, "omega_plus": p.omega_plus * factor,
                             "omega_minus": p.omega_minus * factor})
    assert nondim(same).alpha0 == pytest.approx(q.alpha0, rel=1e-13)


def test_groups_places_state_at_criticality():
    q = groups(0.5, 2.0, 1.0, 0.1, -0.2)
    assert q.alpha == q.alpha0 and q.epsilon == 0.0


def test_from_groups_roundtrip():
    p = params.from_groups(0.4, 1.5, 2.0, 1.2, 0.1, -0.05, c=-1.3, rho_minus=2.0, d_plus=0.7)
    q = nondim(p)
    assert (q.varrho, q.d_ratio) == pytest.approx((0.4, 1.5), rel=1e-14)
    assert (q.alpha, q.beta, q.w_plus, q.w_minus) == pytest.approx((2.0, 1.2, 0.1, -0.05), rel=1e-13)
