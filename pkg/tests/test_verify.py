import math

import numpy as np
import pytest

from solibound import verify
from solibound.errors import DomainError
from solibound.field_eval import Axis, GridSpec, ResidualReport

GRID3 = GridSpec((Axis("x", -2, 2, 7), Axis("Y", -1, 1, 5), Axis("T", 0.5, 1.5, 5)))
TODA_GRID = GridSpec((Axis("X", -1, 1, 5), Axis("Y", -1, 1, 5), Axis("n", -3, 3, 7, integer=True)))


def vacuum(x, Y, T):
    z = np.zeros_like(np.asarray(x) + Y + T)
    return z, z


def kdv_soliton(x, Y, T):
    u = -2 / np.cosh(x - 4 * T) ** 2
    return u + 0 * Y, np.zeros_like(u + Y)


def plane_wave(p, alpha=1):
    return lambda x, Y, T: np.exp(p * x + p * p * Y / alpha - 4 * p ** 3 * T)


def test_vacuum_kp_equation_zero():
    for out in verify.check_kp_equation(vacuum, GRID3, probe=False):
        assert out.passed and out.report.max_abs == 0.0


def test_kdv_soliton_solves_kp():
    outs = verify.check_kp_equation(kdv_soliton, GRID3, threshold=1e-8)
    assert all(o.passed for o in outs), [o.as_dict() for o in outs]
    assert outs[0].order == math.inf or outs[0].order >= verify.MIN_ORDER


def test_kdv_soliton_wrong_sign_fails():
    flipped = lambda x, Y, T: (-kdv_soliton(x, Y, T)[0], kdv_soliton(x, Y, T)[1])
    outs = verify.check_kp_equation(flipped, GRID3, probe=False)
    assert not outs[0].passed and outs[0].report.max_abs > 1e-2


@pytest.mark.parametrize("alpha", [1, 1j])
def test_vacuum_lax(alpha):
    psi = plane_wave(0.7, alpha)
    outs = verify.check_kp_lax(psi, vacuum, "original", GRID3, alpha=alpha, threshold=1e-6)
    assert all(o.passed for o in outs), [o.as_dict() for o in outs]
    assert outs[0].equation == verify.KP_LAX_SYSTEMS["original"]


def test_vacuum_conjugate_lax():
    psi_hat = lambda x, Y, T: np.exp(-0.7 * x - 0.49 * Y + 4 * 0.343 * T)
    outs = verify.check_kp_lax(psi_hat, vacuum, "conjugate", GRID3, threshold=1e-6)
    assert all(o.passed for o in outs)


def test_toda_vacuum():
    zero = lambda X, Y, n: np.zeros_like(X + Y + n)
    out = verify.check_toda_equation(zero, TODA_GRID, threshold=1e-12, probe=False)
    assert out.passed and out.report.max_abs == 0.0
    psi = lambda X, Y, n: 0.8 ** n * np.exp(0.8 * X - Y / 0.8)
    for i in range(2):
        rep = verify.toda_lax_residuals(psi, zero, "original")[i]
        vals = np.abs(rep(*[g.ravel() for g in np.meshgrid([0.0, 0.5], [0.0, 0.3], [-1, 2])]))
        assert np.max(vals) < 1e-9


def test_unknown_system():
    with pytest.raises(ValueError):
        verify.kp_lax_residuals(plane_wave(1.0), vacuum, "sideways")
    with pytest.raises(ValueError):
        verify.toda_lax_residuals(None, None, "sideways")


def fake_run(c, order, floor_only=False):
    def run(h):
        v = verify.rounding_floor(h, 3) / 10 if floor_only else c * h ** order
        return ResidualReport(max_abs=v, rms=v, argmax_point=(0.0,), h=h, n_points=1)
    return run


def test_measure_order_synthetic():
    _, order, probe = verify.measure_order(fake_run(1.0, 4), 1e-2)
    assert abs(order - 4) < 1e-9
    assert set(probe) == {1e-2, 2e-2}
    _, order, _ = verify.measure_order(fake_run(1.0, 2), 1e-2)
    assert abs(order - 2) < 1e-9


def test_measure_order_rounding_limited():
    _, order, probe = verify.measure_order(fake_run(1.0, 4, floor_only=True), 1e-3)
    assert order == math.inf and len(probe) == 3
    out = verify._outcome("x", "eq", fake_run(1.0, 4, True)(1e-3), 1.0, order)
    assert out.passed and out.as_dict()["convergence_order"] == "rounding-limited"


def test_low_order_fails_even_below_threshold():
    report, order, pr = verify.measure_order(fake_run(1.0, 2), 1e-3)
    assert not verify._outcome("x", "eq", report, 1.0, order, probe=pr).passed


def test_definition1_degenerate():
    zero = lambda s: np.zeros_like(s)
    with pytest.raises(DomainError) as err:
        verify.definition1_residual(zero, zero, lambda s: np.ones_like(s), (np.arange(3.0),))
    assert err.value.code == "degenerate-sample"


def test_definition1_exact_and_wrong_multiplier():
    s = (np.linspace(0, 1, 11),)
    psi = lambda z: np.exp(z)
    B = lambda z: 2 + z
    good = verify.check_definition1(psi, lambda z: (2 + z) * np.exp(z), B, s, names=("z",))
    bad = verify.check_definition1(psi, lambda z: (2.1 + z) * np.exp(z), B, s)
    assert good.passed and good.report.max_abs < 1e-15
    assert not bad.passed


def _dummy(value, kind="residual", threshold=1e-3):
    rep = ResidualReport(max_abs=value, rms=value, argmax_point=(0.0,), n_points=1)
    return verify.Check(f"c{value}", "eq", lambda h: rep, threshold, kind=kind)


def test_suite_validation():
    with pytest.raises(ValueError):
        verify.CheckSuite("s", [verify.Check("a", "eq", lambda h: None, 0.0)])
    with pytest.raises(ValueError):
        verify.CheckSuite("s", [verify.Check("a", "", lambda h: None, 1.0)])


def test_check_kinds_and_error_capture():
    def boom(h):
        raise DomainError("nope", code="out-of-domain")
    suite = verify.CheckSuite("s", [
        _dummy(1e-6), _dummy(1e-2), _dummy(1e-2, "witness"), _dummy(1e-6, "witness"),
        verify.Check("neg", "eq", lambda h: (_dummy(1e-12).run(h), _dummy(1e-3).run(h)), 1e6,
                     kind="negative"),
        verify.Check("err", "eq", boom, 1.0),
    ])
    outs = verify.run_suite(suite, workers=1)
    assert [o.passed for o in outs] == [True, False, True, False, True, False]
    assert outs[-1].error.startswith("out-of-domain")
    assert outs[4].details["ratio"] == pytest.approx(1e9)


def test_parallel_matches_serial():
    suite = verify.CheckSuite("s", [_dummy(10.0 ** -k) for k in range(1, 9)])
    a = [o.as_dict() for o in verify.run_suite(suite, workers=1)]
    b = [o.as_dict() for o in verify.run_suite(suite, workers=4)]
    assert a == b
