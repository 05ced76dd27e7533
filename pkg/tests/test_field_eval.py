from fractions import Fraction
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from solibound.errors import DomainError, NonFiniteError
from solibound.field_eval import (Axis, central_weights, diff, grid, residual_scan, summarize,
                                  worker_count)


def test_first_derivative_weights():
    offs, w = central_weights(1)
    assert list(offs) == [-2, -1, 0, 1, 2]
    assert list(w) == [Fraction(1, 12), Fraction(-2, 3), 0, Fraction(2, 3), Fraction(-1, 12)]


def test_third_derivative_weights_sum_to_zero():
    _, w = central_weights(3)
    assert sum(w) == 0
    assert sum(Fraction(k) ** 3 * c for k, c in zip(range(-3, 4), w)) == 6


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-3, 3), min_size=5, max_size=5), st.floats(-2, 2),
       st.integers(1, 3))
def test_polynomials_differentiated_exactly(coef, x0, k):
    # a 4th-order central stencil is exact for polynomials of degree <= 4 + k - 1
    p = np.polynomial.Polynomial(coef)
    got = diff(lambda x: p(x), (np.array(x0),), (k,), 1e-2)
    want = p.deriv(k)(x0)
    assert abs(complex(got) - want) <= 1e-9 * (1 + abs(want))


def test_fourth_order_convergence():
    f = lambda x: np.sin(3 * x)
    errs = [abs(complex(diff(f, (np.array(0.3),), (1,), h)) - 3 * math.cos(0.9))
            for h in (4e-2, 2e-2)]
    assert math.log2(errs[0] / errs[1]) == pytest.approx(4, abs=0.1)


def test_mixed_partial():
    f = lambda x, y: np.exp(x * y)
    got = diff(f, (np.array(0.4), np.array(0.7)), (1, 1), 1e-3)
    want = (1 + 0.28) * math.exp(0.28)
    assert abs(complex(got) - want) < 1e-11


def test_extended_precision_lowers_rounding_floor():
    f = lambda x: np.exp(x)
    pt = (np.array(0.5),)
    ext = abs(complex(diff(f, pt, (3,), 1e-4)) - math.exp(0.5))
    dbl = abs(complex(diff(f, pt, (3,), 1e-4, extended=False)) - math.exp(0.5))
    assert ext < 1e-6 < dbl


def test_stencil_out_of_domain():
    with pytest.raises(DomainError) as exc:
        diff(lambda x: np.log(x), (np.array([0.001, 1.0]),), (1,), 1e-3,
             exclude=lambda x: x <= 0)
    assert exc.value.code == "stencil-out-of-domain"
    assert exc.value.locations


def test_non_finite_sample_reported():
    with pytest.raises(NonFiniteError):
        diff(lambda x: np.where(x > 1, np.inf, x), (np.array(1.0),), (1,))


def test_grid_and_exclusion():
    g = grid(Axis("x", 0, 1, 3), Axis("n", -1, 1, 3, integer=True), exclude=lambda x, n: n == 0)
    x, n = g.points()
    assert x.size == 6 and set(n.tolist()) == {-1, 1}


def test_axis_validation():
    with pytest.raises(ValueError):
        Axis("x", 1, 0, 5)
    with pytest.raises(ValueError):
        Axis("n", 0, 3, 3, integer=True)
    assert Axis("x", 2, 2, 1).values().tolist() == [2.0]


def test_empty_grid():
    g = grid(Axis("x", 0, 1, 3), exclude=lambda x: x >= 0)
    with pytest.raises(DomainError) as exc:
        residual_scan(lambda x: x, g)
    assert exc.value.code == "empty-grid"


def test_zero_field_gives_zero_report():
    g = grid(Axis("x", -1, 1, 5), Axis("y", -1, 1, 5))
    rep = residual_scan(lambda x, y: 0 * x, g)
    assert rep.max_abs == 0 and rep.rms == 0 and rep.n_points == 25


def test_scan_is_deterministic_across_workers(monkeypatch):
    g = grid(Axis("x", -1, 1, 41), Axis("y", -1, 1, 41))
    f = lambda x, y: np.sin(x * 7) * np.cos(y * 3)
    serial = residual_scan(f, g, workers=1)
    parallel = residual_scan(f, g, workers=4)
    assert serial.as_dict() == parallel.as_dict()
    monkeypatch.setenv("SOLIBOUND_THREADS", "3")
    assert worker_count() == 3


def test_summarize_argmax():
    rep = summarize(np.array([0.1, -2.0, 0.5]), (np.array([1.0, 2.0, 3.0]),), names=("x",))
    assert rep.max_abs == 2.0 and rep.argmax_point == (2.0,)
