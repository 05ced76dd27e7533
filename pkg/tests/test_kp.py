import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from solibound import kp
from solibound.errors import DomainError, ParameterError, PoleError
from solibound.field_eval import Axis, grid
from solibound.verify import check_kp_equation, check_kp_lax

P = kp.KPParams(alpha=1, y0=1.0, p=0.5)
SMALL = grid(Axis("x", -3, 3, 7), Axis("Y", -1.5, 1.5, 7), Axis("T", 0.6, 1.8, 7))


def contour(params, n=25, product=None):
    T = np.linspace(0.5, 2, n)
    x = np.linspace(-4, 4, n)[::-1]
    return x, (params.y0 ** 2 if product is None else product) / T, T


def test_alpha_restricted():
    with pytest.raises(ParameterError) as exc:
        kp.KPParams(alpha=2)
    assert exc.value.code == "alpha-in-{1,i}"
    assert kp.KPParams(alpha=1j).alpha == 1j


def test_dressed_invariants():
    with pytest.raises(ParameterError, match="q == p"):
        P.replace(q=0.4).check_dressed()
    with pytest.raises(ParameterError, match="d\\*l"):
        P.replace(d=2).check_dressed()
    with pytest.raises(ParameterError, match="Re"):
        P.replace(p=-0.5).check_dressed()


def test_wave_sum_needs_distinct_parameters():
    with pytest.raises(ParameterError):
        kp.WaveSum(((1, 0.5), (2, 0.5)))
    with pytest.raises(ParameterError):
        kp.WaveSum(())


def test_hyperbolic_jacobian_entries():
    Y, T, j = kp.hyperbolic_transform(np.array(2.0), np.array(0.5))
    assert (Y, T) == (1.0, 4.0)
    assert j.f11 == 1.0 and j.f12 == 0.25 and j.f21 == 0.25 and j.f22 == -1 / 16
    assert j.delta == pytest.approx(-1 / 8)
    assert j.ratio == pytest.approx(0.25)


def test_hyperbolic_jacobian_inverts_forward_map():
    y, t, h = 1.3, 0.8, 1e-6
    Y, T, j = kp.hyperbolic_transform(y, t)
    fwd = np.array([[t, y], [1 / t, -y / t ** 2]])  # d(Y, T)/d(y, t)
    inv = np.linalg.inv(fwd)  # d(y, t)/d(Y, T)
    assert np.allclose([[j.f11, j.f12], [j.f21, j.f22]], [[inv[0, 0], inv[1, 0]], [inv[0, 1], inv[1, 1]]])


def test_degenerate_transform():
    with pytest.raises(DomainError):
        kp.hyperbolic_transform(0.0, 1.0)


def test_multiplier_at_origin_is_gauge():
    _, _, j = kp.hyperbolic_transform(1.0, 1.3)
    assert kp.multiplier_B(0.0, 1.3, j, P) == 1
    assert kp.multiplier_B(2.0, 1.3, j, P) == pytest.approx(np.exp(2 * 1.3 ** 2 / 6))


def test_seed_satisfies_kp():
    for o in check_kp_equation(kp.seed_fields(P), SMALL, threshold=1e-8):
        assert o.passed, o


@pytest.mark.parametrize("alpha", [1, 1j])
def test_dressed_satisfies_kp(alpha):
    Q = P.replace(alpha=alpha)
    for o in check_kp_equation(kp.dressed_fields(Q), SMALL, alpha=alpha, threshold=1e-8):
        assert o.passed, o


def test_misprinted_phase_fails_kp():
    bad = check_kp_equation(kp.dressed_fields(P, y_divisor=4), SMALL, threshold=1e-8, probe=False)
    assert bad[0].report.max_abs > 1e-3


def test_wavefunctions_solve_linear_systems():
    pw, qw = kp.psi_waves(P), kp.psi_hat_waves(P)
    psi = lambda x, Y, T: kp.kp_psi(x, Y, T, pw, P)
    psi_hat = lambda x, Y, T: kp.kp_psi_hat(x, Y, T, qw, P)
    F = kp.seed_fields(P)
    for which, f in (("original", psi), ("conjugate", psi_hat)):
        for o in check_kp_lax(f, F, which, SMALL, threshold=1e-6):
            assert o.passed, o


def test_two_term_wave_sum_is_still_a_solution():
    waves = kp.WaveSum(((1.0, 0.5), (0.3, 0.9)))
    psi = lambda x, Y, T: kp.kp_psi(x, Y, T, waves, P)
    for o in check_kp_lax(psi, kp.seed_fields(P), "original", SMALL, threshold=1e-6):
        assert o.passed, o


def test_misprinted_time_power_fails_only_when_p_not_one():
    Q = P.replace(p=1.0)
    psi = lambda x, Y, T: kp.kp_psi(x, Y, T, kp.psi_waves(Q), Q, time_power=2)
    outs = check_kp_lax(psi, kp.seed_fields(Q), "original", SMALL, threshold=1e-6)
    assert all(o.passed for o in outs)


@pytest.mark.parametrize("fields", [kp.seed_fields(P), kp.dressed_fields(P)])
def test_boundary_constraint_on_contour(fields):
    x, Y, T = contour(P)
    assert np.max(np.abs(kp.kp_boundary_residual(x, Y, T, fields, P))) < 1e-12


def test_boundary_constraint_is_boundary_local():
    x, Y, T = contour(P, product=2.0)
    r = kp.unchecked_boundary_expression(x, Y, T, kp.dressed_fields(P), P)
    assert np.max(np.abs(r)) > 1e-3


def test_boundary_guards():
    x, Y, T = contour(P, product=2.0)
    with pytest.raises(DomainError) as exc:
        kp.kp_boundary_residual(x, Y, T, kp.seed_fields(P), P)
    assert exc.value.code == "off-contour"
    with pytest.raises(DomainError):
        kp.kp_boundary_residual(0.0, 1.0, 1.0, kp.seed_fields(P), P.replace(y0=0.0))


@settings(max_examples=30, deadline=None)
@given(st.floats(-4, 4), st.floats(0.5, 2.0), st.sampled_from([1, 1j]), st.floats(0.3, 1.5))
def test_generic_constraint_is_scaled_specialized(x, t, alpha, y0):
    Q = P.replace(alpha=alpha, y0=y0)
    Y, T = kp.HYPERBOLIC.forward(y0, t)
    g = kp.generic_boundary_residual(x, t, kp.dressed_fields(Q), Q)
    s = kp.kp_boundary_residual(x, Y, T, kp.dressed_fields(Q), Q)
    assert abs(g - t / (2 * alpha) * s) < 1e-12 * (1 + abs(g))


def test_numerical_ratio_derivative_matches_analytic():
    numeric = kp.KPTransform(kp.HYPERBOLIC.forward, kp.HYPERBOLIC.jacobian)
    assert numeric.ratio_derivative(1.0, 0.7) == pytest.approx(1.4, rel=1e-9)


def test_definition1_relation():
    x, Y, T = contour(P)
    t = P.y0 / T
    psi = kp.kp_psi(x, Y, T, kp.psi_waves(P), P)
    psi_hat = kp.kp_psi_hat(x, Y, T, kp.psi_hat_waves(P), P)
    B = kp.multiplier_B(x, t, kp.HYPERBOLIC.jacobian(P.y0, t), P)
    assert np.max(np.abs(psi_hat - B * psi) / np.abs(psi)) < 1e-12


def test_kernel_matches_product_formula():
    x, Y, T = np.array([0.3, -1.2]), np.array([0.5, -0.2]), np.array([1.1, 0.7])
    prod = kp.kp_psi(x, Y, T, kp.psi_waves(P), P) * kp.kp_psi_hat(x, Y, T, kp.psi_hat_waves(P), P)
    assert np.allclose(kp.chi(x, Y, T, P), 1 / prod, rtol=1e-13)
    K = kp.kp_kernel_closed(x, Y, T, P)
    assert np.allclose(K, -prod / (1 + prod / (2 * P.p)), rtol=1e-13)


def test_reduction_to_kdv_soliton():
    Q = P.replace(y0=0.0)
    x, Y, T = SMALL.points()
    u1 = kp.kp_dressed(x, Y, T, Q)[0]
    assert np.max(np.abs(u1 - kp.soliton_reference(x, T, Q.p))) < 1e-14


def test_singular_T():
    with pytest.raises(DomainError) as exc:
        kp.kp_seed(1.0, 1.0, 0.0, P)
    assert exc.value.code == "singular-T"


def test_solution_pole_located():
    # y0 = 0, x = 0, T = 1: tau = 4 p^3 + log(2p)/2 = i pi/2
    Q = kp.KPParams(y0=0.0, p=0.5806033860791031 + 0.36768578236282806j)
    with pytest.raises(PoleError) as exc:
        kp.kp_dressed(np.array([0.0, 1.0]), np.array([0.0, 0.0]), np.array([1.0, 1.0]), Q)
    assert exc.value.code == "solution-pole"
    assert exc.value.locations[0][:1] == (0.0,)
