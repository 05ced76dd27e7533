import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from solibound import glm
from solibound.errors import ConvergenceError, ParameterError, PoleError
from solibound.glm import QuadratureSpec, TruncationSpec


def exp_wave(k):
    return lambda z: np.exp(k * np.asarray(z, dtype=float))


def geometric(r):
    return lambda j: r ** np.asarray(j, dtype=float)


def closed_diag(x, a=1.0, b=1.0):
    prod = np.exp((a + b) * x)
    return -prod / (1 + prod / (a + b))


def test_quadrature_spec_validation():
    with pytest.raises(ParameterError):
        QuadratureSpec(n_nodes=100)
    with pytest.raises(ParameterError):
        QuadratureSpec(n_nodes=1)
    with pytest.raises(ParameterError):
        QuadratureSpec(rule="gauss")
    with pytest.raises(ParameterError):
        TruncationSpec(max_terms=0)
    with pytest.raises(ParameterError):
        TruncationSpec(tail_tol=0.0)


def test_integrate_tail_exponential():
    x = np.linspace(-2, 2, 9)
    got = glm.integrate_tail(exp_wave(1.0), exp_wave(0.5), x, QuadratureSpec(n_nodes=8001))
    assert np.max(np.abs(got - np.exp(1.5 * x) / 1.5)) < 1e-10


def test_fixed_cutoff_must_lie_below_x():
    with pytest.raises(ParameterError):
        glm.integrate_tail(exp_wave(1.0), exp_wave(1.0), np.array([0.0, -50.0]),
                           QuadratureSpec(lower_cutoff=-40.0))


def test_non_decaying_integrand():
    with pytest.raises(ConvergenceError) as err:
        glm.integrate_tail(exp_wave(-1.0), exp_wave(0.5), 0.0)
    assert err.value.code == "tail-not-converged"


def test_continuous_oracle_matches_closed_form():
    x = np.linspace(-3, 3, 13)
    got = glm.glm_continuous_solve(exp_wave(1.0), exp_wave(1.0), x, QuadratureSpec(n_nodes=20001))
    assert np.max(np.abs(got - closed_diag(x))) < 1e-10


def test_refinement_reduces_error():
    x = np.linspace(-1, 1, 5)
    errs = [np.max(np.abs(glm.glm_continuous_solve(exp_wave(1.0), exp_wave(1.0), x,
                                                   QuadratureSpec(lower_cutoff=-40.0, n_nodes=n))
                          - closed_diag(x)))
            for n in (101, 201, 401)]
    assert errs[0] > errs[1] > errs[2]
    assert errs[1] / errs[2] > 10


def test_kernel_pole_detected():
    # 1 + int = 0 happens at x = 0 when psi*psi_hat = -2 exp(2z)
    with pytest.raises(PoleError) as err:
        glm.glm_continuous_solve(lambda z: -2 * np.exp(np.asarray(z, dtype=float)),
                                 exp_wave(1.0), np.array([0.0]), QuadratureSpec(n_nodes=20001))
    assert err.value.code == "kernel-pole"


@settings(max_examples=25, deadline=None)
@given(a=st.floats(0.2, 0.9), b=st.floats(0.2, 0.9), sa=st.sampled_from([1, -1]),
       n=st.integers(-5, 5))
def test_lattice_sum_geometric(a, b, sa, n):
    a *= sa
    r = a * b
    got = glm.lattice_tail_sum(geometric(a), geometric(b), np.array([n]))
    want = r ** n / (1 - r)
    assert abs(got[0] - want) <= 1e-13 * max(1.0, abs(want))


def test_lattice_divergence():
    with pytest.raises(ConvergenceError):
        glm.lattice_tail_sum(geometric(1.5), geometric(1.0), np.array([0]))
    with pytest.raises(ConvergenceError):
        glm.lattice_tail_sum(geometric(0.9999), geometric(1.0), np.array([0]),
                             TruncationSpec(max_terms=50))


def test_discrete_oracle():
    n = np.arange(-4, 5)
    got = glm.glm_discrete_solve(geometric(0.5), geometric(0.6), n)
    r = 0.3
    want = -r ** n / (1 + r ** n / (1 - r))
    assert np.max(np.abs(got - want)) < 1e-14


def test_zero_data_zero_residual():
    zero = lambda z: np.zeros_like(np.asarray(z, dtype=float))
    rep = glm.glm_residual(zero, zero, lambda x, z: zero(np.asarray(x) + np.asarray(z)),
                           (np.linspace(-1, 1, 5), np.linspace(-1, 1, 5)),
                           QuadratureSpec(lower_cutoff=-10.0, n_nodes=101))
    assert rep.max_abs == 0.0


def test_full_identity_continuous():
    psi, psi_hat = exp_wave(1.0), exp_wave(1.0)
    kernel = glm.rank1_kernel(psi, psi_hat, closed_diag)
    x = np.linspace(-2, 2, 5)
    rep = glm.glm_residual(psi, psi_hat, kernel, (x, x - 0.3), QuadratureSpec(n_nodes=20001))
    assert rep.max_abs < 1e-10
    bad = lambda x, z: 0.9 * kernel(x, z)
    assert glm.glm_residual(psi, psi_hat, bad, (x, x - 0.3)).max_abs > 1e-3


def test_full_identity_lattice():
    psi, psi_hat = geometric(0.5), geometric(0.6)
    diag = lambda n: -0.3 ** np.asarray(n, dtype=float) / (1 + 0.3 ** np.asarray(n, dtype=float) / 0.7)
    kernel = glm.rank1_kernel(psi, psi_hat, diag)
    n = np.arange(-3, 4)
    rep = glm.glm_residual(psi, psi_hat, kernel, (n, n + 2), TruncationSpec())
    assert rep.max_abs < 1e-13
    with pytest.raises(ParameterError):
        glm.glm_residual(psi, psi_hat, kernel, (n, n - 1), TruncationSpec())
