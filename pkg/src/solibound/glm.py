"""Numerical Gelfand-Levitan-Marchenko solvers for rank-1 kernels.

With a product kernel ``F(x, z) = psi(x) psi_hat(z)`` the continuous equation

    K(x, z) + F(x, z) + int_{-inf}^{x} K(x, z') F(z', z) dz' = 0

is solved by ``K(x, z) = -psi(x) psi_hat(z) / (1 + int_{-inf}^{x} psi psi_hat)``
and the lattice equation (sum over ``k >= n``) analogously.  These routines
form the integral/sum numerically from samples of ``psi`` and ``psi_hat``;
they are oracles for the closed-form kernels and must never call them.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import simpson

from .errors import ConvergenceError, ParameterError, PoleError
from .field_eval import as_complex, check_finite, summarize

POLE_TOL = 1e-12


@dataclass(frozen=True)
class QuadratureSpec:
    """Composite Simpson on ``[lower_cutoff, x]``.

    With ``lower_cutoff=None`` the cutoff is found by stepping left from the
    evaluation point (doubling the window) until the integrand has dropped
    below ``tail_tol`` relative to its value at ``x``.
    """

    lower_cutoff: float | None = None
    n_nodes: int = 4001
    tail_tol: float = 1e-15
    rule: str = "composite-simpson"
    max_window: float = 1e4

    def __post_init__(self):
        if self.n_nodes < 3 or self.n_nodes % 2 == 0:
            raise ParameterError("n_nodes must be odd and >= 3", code="n-nodes-odd")
        if self.rule != "composite-simpson":
            raise ParameterError(f"unsupported rule {self.rule!r}", code="rule")


@dataclass(frozen=True)
class TruncationSpec:
    max_terms: int = 10_000
    tail_tol: float = 1e-17

    def __post_init__(self):
        if self.max_terms < 1:
            raise ParameterError("max_terms must be >= 1", code="max-terms")
        if not self.tail_tol > 0:
            raise ParameterError("tail_tol must be positive", code="tail-tol")


def _product(psi, psi_hat, z):
    return as_complex(psi(z)) * as_complex(psi_hat(z))


def _cutoff(psi, psi_hat, x, quad: QuadratureSpec):
    """Lower integration limit for every evaluation point in ``x``."""
    x = np.asarray(x, dtype=float)
    if quad.lower_cutoff is not None:
        if np.any(quad.lower_cutoff >= x):
            raise ParameterError("lower_cutoff must lie below the evaluation point",
                                 code="cutoff-below-x")
        return np.full_like(x, quad.lower_cutoff)
    ref = np.maximum(np.abs(_product(psi, psi_hat, x)), 1e-300)
    width = np.ones_like(x)
    todo = np.ones(x.shape, dtype=bool)
    while np.any(todo):
        if np.any(width > quad.max_window):
            raise ConvergenceError("integrand does not decay to the left",
                                   locations=[(float(v),) for v in np.ravel(x[todo])[:20]])
        with np.errstate(over="ignore", invalid="ignore"):
            mag = np.abs(_product(psi, psi_hat, x - width))
        todo = ~(mag <= quad.tail_tol * ref)
        width = np.where(todo, 2 * width, width)
    return x - width


def integrate_tail(psi: Callable, psi_hat: Callable, x, quad: QuadratureSpec = QuadratureSpec()):
    """``int_{cutoff}^{x} psi(z) psi_hat(z) dz`` by composite Simpson.

    ``psi`` and ``psi_hat`` take a ``z`` array; ``x`` may be an array (each
    point gets its own node set).
    """
    x = np.asarray(x, dtype=float)
    lo = _cutoff(psi, psi_hat, x, quad)
    mag_lo = np.abs(_product(psi, psi_hat, lo))
    mag_x = np.abs(_product(psi, psi_hat, x))
    if np.any(mag_lo > quad.tail_tol * np.maximum(mag_x, 1e-300)):
        raise ConvergenceError("integrand has not decayed at the cutoff",
                               locations=[(float(v),) for v in np.ravel(x)[:20]])
    s = np.linspace(0.0, 1.0, quad.n_nodes)
    z = lo[..., None] + (x - lo)[..., None] * s
    vals = check_finite(_product(psi, psi_hat, z), (z,), what="GLM integrand")
    return simpson(vals, x=z, axis=-1)


def glm_continuous_solve(psi: Callable, psi_hat: Callable, x, quad: QuadratureSpec = QuadratureSpec()):
    """Diagonal kernel ``K(x, x)`` of the continuous rank-1 GLM equation."""
    x = np.asarray(x, dtype=float)
    integral = integrate_tail(psi, psi_hat, x, quad)
    den = 1 + integral
    if np.any(np.abs(den) <= POLE_TOL):
        raise PoleError("1 + integral vanishes", code="kernel-pole",
                        locations=[(float(v),) for v in np.ravel(x)[np.ravel(np.abs(den) <= POLE_TOL)]])
    return -_product(psi, psi_hat, x) / den


def lattice_tail_sum(psi: Callable, psi_hat: Callable, n, trunc: TruncationSpec = TruncationSpec()):
    """``sum_{j >= n} psi(j) psi_hat(j)`` term by term.

    Stops once the next term is below ``tail_tol`` times the partial sum.
    Three consecutive non-decreasing term ratios with the cap reached, or the
    cap reached without meeting the tolerance, raise ``tail-not-converged``.
    """
    n = np.asarray(n)
    total = np.zeros(np.broadcast(n, psi(n)).shape, dtype=np.complex128)
    active = np.ones(total.shape, dtype=bool)
    prev = None
    growing = np.zeros(total.shape, dtype=int)
    for step in range(trunc.max_terms):
        term = np.broadcast_to(_product(psi, psi_hat, n + step), total.shape)
        check_finite(term, what="GLM summand")
        total = np.where(active, total + term, total)
        mag = np.abs(term)
        if prev is not None:
            with np.errstate(divide="ignore", invalid="ignore"):
                ratio = np.where(prev > 0, mag / prev, 0.0)
            growing = np.where(active & (ratio >= 1) & (mag > 0), growing + 1, 0)
            if np.any(growing >= 3):
                raise ConvergenceError("summand ratio >= 1: lattice tail diverges")
        prev = mag
        nxt = np.abs(np.broadcast_to(_product(psi, psi_hat, n + step + 1), total.shape))
        active &= ~(nxt <= trunc.tail_tol * np.abs(total))
        if not np.any(active):
            return total
    raise ConvergenceError(f"tail above tolerance after {trunc.max_terms} terms")


def glm_discrete_solve(psi: Callable, psi_hat: Callable, n, trunc: TruncationSpec = TruncationSpec()):
    """Diagonal kernel ``K(n, n)`` of the lattice rank-1 GLM equation.

    ``psi(j)`` and ``psi_hat(j)`` take an integer array ``j`` (the continuous
    coordinates are closed over by the caller).
    """
    n = np.asarray(n)
    den = 1 + lattice_tail_sum(psi, psi_hat, n, trunc)
    if np.any(np.abs(den) <= POLE_TOL):
        raise PoleError("1 + sum vanishes", code="kernel-pole")
    return -_product(psi, psi_hat, n) / den


def rank1_kernel(psi: Callable, psi_hat: Callable, diagonal: Callable):
    """Full kernel ``K(x, z) = K(x, x) psi_hat(z) / psi_hat(x)`` of a rank-1 solution."""
    return lambda x, z: as_complex(diagonal(x)) * as_complex(psi_hat(z)) / as_complex(psi_hat(x))


def glm_residual(psi: Callable, psi_hat: Callable, kernel: Callable, points, spec=None):
    """Residual of the full two-argument GLM identity at ``points``.

    ``kernel(x, z)`` is the candidate; ``points`` is a pair of arrays.  With a
    :class:`QuadratureSpec` (default) the continuous identity is checked by
    Simpson quadrature over ``z'``; with a :class:`TruncationSpec` the
    lattice identity (``m >= n``) is checked by direct summation.
    """
    first, second = (np.asarray(v) for v in points)
    if isinstance(spec, TruncationSpec):
        if np.any(second < first):
            raise ParameterError("lattice GLM identity needs m >= n", code="m-at-least-n")
        n, m = np.broadcast_arrays(first, second)
        tail = lattice_tail_sum(lambda j: as_complex(kernel(n, j)) * as_complex(psi(j)),
                                lambda j: 1.0, n, spec)
        res = (as_complex(kernel(n, m)) + as_complex(psi(n)) * as_complex(psi_hat(m))
               + tail * as_complex(psi_hat(m)))
        return summarize(res, (n, m), names=("n", "m"))
    quad = QuadratureSpec() if spec is None else spec
    x, z = np.broadcast_arrays(first.astype(float), second.astype(float))
    def row(s):
        return kernel(x[..., None] if np.ndim(s) > np.ndim(x) else x, s)

    integral = integrate_tail(row, psi, x, quad)
    res = as_complex(kernel(x, z)) + as_complex(psi(x)) * as_complex(psi_hat(z)) \
        + integral * as_complex(psi_hat(z))
    return summarize(res, (x, z), names=("x", "z"))
