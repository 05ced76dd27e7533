"""Closed-form KP boundary-problem objects on the hyperbolic contour.

The KP system in unknowns ``u, w`` over ``(x, Y, T)`` is::

    u_T + u_xxx - 6 u u_x = -3 alpha^2 w_Y,    w_x = u_Y,     alpha in {1, i}

Under ``Y = y t, T = y / t`` the line ``y = y0`` maps to the hyperbola
``Y T = y0^2``.  This module holds that transform, the boundary multiplier,
the boundary constraint (generic and specialized), the elementary seed
solution, the seed wavefunctions, the closed-form rank-1 GLM kernel and the
dressed one-soliton solution.

Functions take numpy arrays and broadcast; nothing forces ``float64`` so the
finite-difference checks can sample in extended precision.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DomainError, ParameterError, PoleError
from .field_eval import _locations, as_complex, check_finite, diff
from .transforms import Jacobian

POLE_TOL = 1e-10
CONTOUR_TOL = 1e-9


@dataclass(frozen=True)
class KPParams:
    """Parameters of the KP boundary problem.

    ``q`` defaults to ``p``; ``g_const`` is the constant gauge factor of the
    boundary multiplier.
    """

    alpha: complex = 1
    y0: float = 1.0
    p: complex = 0.5
    q: complex | None = None
    d: complex = 1
    l: complex = 1
    g_const: complex = 1

    def __post_init__(self):
        alpha = complex(self.alpha)
        if alpha not in (1, 1j):
            raise ParameterError(f"alpha must be 1 or i, got {self.alpha!r}", code="alpha-in-{1,i}")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "y0", float(self.y0))
        for name in ("p", "d", "l", "g_const"):
            object.__setattr__(self, name, complex(getattr(self, name)))
        object.__setattr__(self, "q", self.p if self.q is None else complex(self.q))

    def check_dressed(self):
        """Invariants needed by the one-soliton pipeline (kernel, dressing)."""
        if self.q != self.p:
            raise ParameterError("dressed pipeline needs q == p", code="q-equals-p")
        if abs(self.d * self.l - 1) > 1e-14:
            raise ParameterError("dressed pipeline needs d*l == 1", code="d-times-l-equals-1")
        if not self.p.real > 0:
            raise ParameterError("dressed pipeline needs Re(p) > 0", code="re-p-positive")
        return self

    def replace(self, **changes):
        data = {k: getattr(self, k) for k in self.__dataclass_fields__}
        if "p" in changes and "q" not in changes and self.q == self.p:
            data["q"] = None  # keep q tied to p
        data.update(changes)
        return KPParams(**data)


@dataclass(frozen=True)
class WaveSum:
    """Terms ``(amplitude, spectral parameter)`` of a wavefunction sum."""

    terms: tuple

    def __post_init__(self):
        terms = tuple((complex(a), complex(k)) for a, k in self.terms)
        if not terms:
            raise ParameterError("a wave sum needs at least one term", code="empty-wave-sum")
        ks = [k for _, k in terms]
        if len(set(ks)) != len(ks):
            raise ParameterError("spectral parameters must be pairwise distinct",
                                 code="distinct-spectral-parameters")
        object.__setattr__(self, "terms", terms)

    @classmethod
    def single(cls, amplitude, spectral):
        return cls(((amplitude, spectral),))

    def __len__(self):
        return len(self.terms)


def psi_waves(params: KPParams) -> WaveSum:
    return WaveSum.single(params.d, params.p)


def psi_hat_waves(params: KPParams) -> WaveSum:
    return WaveSum.single(params.l, params.q)


# ---------------------------------------------------------------------------
# transform, multiplier, boundary constraint


def hyperbolic_transform(y, t):
    """``Y = y t, T = y / t`` and the Jacobian of the inverse map."""
    y = np.asarray(y)
    t = np.asarray(t)
    if np.any(y == 0) or np.any(t == 0):
        raise DomainError("y and t must be non-zero", code="degenerate-transform")
    jac = Jacobian.from_entries(1 / (2 * t), 1 / (2 * y), t / 2, -t * t / (2 * y))
    return y * t, y / t, jac


@dataclass(frozen=True)
class KPTransform:
    """A transform ``(y, t) -> (Y, T)`` for the generic boundary machinery.

    ``ratio_dt(y, t)`` returns ``d/dt (f21/f11)``; when omitted it is taken by
    finite differences of ``jacobian``.
    """

    forward: Callable
    jacobian: Callable
    ratio_dt: Callable | None = None

    def ratio_derivative(self, y, t, h=1e-4):
        if self.ratio_dt is not None:
            return self.ratio_dt(y, t)
        ratio = lambda tt: self.jacobian(y, tt).ratio
        return np.asarray(diff(ratio, (t,), (1,), h), dtype=np.complex128)


HYPERBOLIC = KPTransform(
    forward=lambda y, t: hyperbolic_transform(y, t)[:2],
    jacobian=lambda y, t: hyperbolic_transform(y, t)[2],
    ratio_dt=lambda y, t: 2 * np.asarray(t),
)


def multiplier_B(x, t, jac: Jacobian, params: KPParams):
    """Scalar boundary multiplier ``g exp(x f21 / (6 alpha f11))``."""
    return params.g_const * np.exp(np.asarray(x) * jac.ratio / (6 * params.alpha))


def generic_boundary_residual(x, t, fields, params: KPParams, transform: KPTransform = HYPERBOLIC,
                              log_g_t=0.0):
    """Left side of the generic boundary constraint at ``(x, y0, t)``.

    ``fields(x, Y, T) -> (u, w)``.  ``log_g_t`` is ``d/dt log g``; zero for a
    constant gauge.
    """
    y = params.y0
    Y, T = transform.forward(y, t)
    jac = transform.jacobian(y, t)
    u, w = fields(x, Y, T)
    a = params.alpha
    x = np.asarray(x)
    return (jac.delta * log_g_t
            + x * jac.delta / (6 * a) * transform.ratio_derivative(y, t)
            + jac.f21 * u / a
            + 6 * a * jac.f11 * w
            - jac.f21 ** 3 / (108 * a ** 3 * jac.f11 ** 2))


def on_contour(Y, T, params: KPParams, tol=CONTOUR_TOL):
    return np.abs(np.asarray(Y) * np.asarray(T) - params.y0 ** 2) <= tol * max(1.0, params.y0 ** 2)


def kp_boundary_residual(x, Y, T, fields, params: KPParams, tol=CONTOUR_TOL):
    """Boundary constraint specialized to the hyperbola ``Y T = y0^2``.

    Equals ``(2 alpha / t)`` times :func:`generic_boundary_residual` under the
    hyperbolic transform.
    """
    Y = np.asarray(Y)
    T = np.asarray(T)
    if params.y0 == 0:
        raise DomainError("y0 = 0 collapses the contour to Y T = 0", code="off-contour")
    if np.any(T == 0) or np.any(Y == 0) or not np.all(on_contour(Y, T, params, tol)):
        raise DomainError("point is not on Y T = y0^2", code="off-contour")
    u, w = fields(x, Y, T)
    a2 = params.alpha ** 2
    return -np.asarray(x) / (3 * T) + u + 6 * a2 * (T / Y) * w - a2 / 108 * (Y / T) ** 2


def unchecked_boundary_expression(x, Y, T, fields, params: KPParams):
    """The specialized constraint expression without the on-contour guard.

    Only meaningful as a witness that the constraint fails off the contour.
    """
    Y = np.asarray(Y)
    T = np.asarray(T)
    u, w = fields(x, Y, T)
    a2 = params.alpha ** 2
    return -np.asarray(x) / (3 * T) + u + 6 * a2 * (T / Y) * w - a2 / 108 * (Y / T) ** 2


# ---------------------------------------------------------------------------
# solutions and wavefunctions


def _require_T(T):
    T = np.asarray(T)
    if np.any(T == 0):
        raise DomainError("formula is singular at T = 0", code="singular-T")
    return T


def kp_seed(x, Y, T, params: KPParams):
    """Elementary seed solution ``(u0, w0)``."""
    T = _require_T(T)
    x = np.asarray(x)
    Y = np.asarray(Y)
    a2 = params.alpha ** 2
    y2 = params.y0 ** 2
    u0 = a2 * Y * y2 / (18 * T ** 3) + 0 * x
    w0 = a2 * x * y2 / (18 * T ** 3) + Y ** 2 * y2 / (36 * T ** 4) - 23 * y2 ** 3 / (648 * T ** 6)
    return as_complex(u0), as_complex(w0)


def seed_fields(params: KPParams):
    return lambda x, Y, T: kp_seed(x, Y, T, params)


def _sum_exponentials(exponents, amplitudes, coords):
    total = None
    for amp, ex in zip(amplitudes, exponents):
        term = amp * np.exp(ex)
        total = term if total is None else total + term
    return check_finite(as_complex(total), coords, what="wavefunction")


def kp_psi(x, Y, T, waves: WaveSum, params: KPParams, time_power: int = 3):
    """Seed wavefunction: a sum of exponentials solving the Lax pair.

    ``time_power`` is the power of ``p_j`` in the ``-4 T p_j^k`` term; only
    ``3`` solves the linear system (``2`` reproduces a known misprint and is
    kept for regression checks).
    """
    T = _require_T(T)
    x = np.asarray(x)
    Y = np.asarray(Y)
    a = params.alpha
    y2 = params.y0 ** 2
    s = y2 / (12 * a * T ** 2)
    common = -a * Y ** 2 * y2 / (36 * T ** 3) + a * y2 ** 3 / (48 * T ** 5)
    exps = []
    for _, pj in waves.terms:
        k = pj - s
        exps.append(x * k + Y / a * k ** 2 + common + a ** 2 * y2 ** 2 * pj / (36 * T ** 3)
                    - y2 * pj ** 2 / (a * T) - 4 * T * pj ** time_power)
    return _sum_exponentials(exps, [d for d, _ in waves.terms], (x, Y, T))


def kp_psi_hat(x, Y, T, waves: WaveSum, params: KPParams):
    """Seed wavefunction of the conjugate linear system."""
    T = _require_T(T)
    x = np.asarray(x)
    Y = np.asarray(Y)
    a = params.alpha
    y2 = params.y0 ** 2
    s = y2 / (12 * a * T ** 2)
    common = a * Y ** 2 * y2 / (36 * T ** 3) - a * y2 ** 3 / (48 * T ** 5)
    exps = []
    for _, qj in waves.terms:
        k = qj + s
        exps.append(x * k - Y / a * k ** 2 + common + a ** 2 * y2 ** 2 * qj / (36 * T ** 3)
                    + y2 * qj ** 2 / (a * T) - 4 * T * qj ** 3)
    return _sum_exponentials(exps, [l for l, _ in waves.terms], (x, Y, T))


def chi(x, Y, T, params: KPParams):
    """Exponential ``chi`` of the closed-form kernel ``-(1/(2p) + chi)^-1``."""
    T = _require_T(T)
    p = params.p
    a2 = params.alpha ** 2
    y2 = params.y0 ** 2
    return np.exp(-2 * np.asarray(x) * p + a2 * np.asarray(Y) * y2 * p / (3 * T ** 2)
                  - a2 * y2 ** 2 * p / (18 * T ** 3) + 8 * T * p ** 3)


def kp_kernel_closed(x, Y, T, params: KPParams):
    """Diagonal GLM kernel ``K(x, x)`` for the one-soliton data."""
    params.check_dressed()
    c = as_complex(chi(x, Y, T, params))
    check_finite(c, (x, Y, T), what="chi")
    den = 1 / (2 * params.p) + c
    bad = np.abs(den) <= POLE_TOL * (abs(1 / (2 * params.p)) + np.abs(c))
    if np.any(bad):
        raise PoleError("1/(2p) + chi vanishes", code="kernel-pole",
                        locations=_where(bad, x, Y, T))
    return -1 / den


def tau_phase(x, Y, T, params: KPParams, y_divisor=6):
    """Soliton phase; at ``y0 = 0`` it is ``-p x + 4 T p^3 + log(2p)/2``.

    Principal branch of ``log(2p)``.  The ``Y`` term is
    ``alpha^2 Y y0^2 p / (y_divisor T^2)``; only ``6`` (half the coefficient in
    :func:`chi`) solves the KP system, ``4`` is a known misprint kept for
    regression checks.
    """
    T = _require_T(T)
    p = params.p
    a2 = params.alpha ** 2
    y2 = params.y0 ** 2
    return (-p * np.asarray(x) + a2 * np.asarray(Y) * y2 * p / (y_divisor * T ** 2)
            - a2 * y2 ** 2 * p / (36 * T ** 3) + 4 * T * p ** 3 + 0.5 * np.log(2 * p))


def kp_dressed(x, Y, T, params: KPParams, y_divisor=6):
    """Dressed one-soliton solution ``(u1, w1, tau)``."""
    params.check_dressed()
    T = _require_T(T)
    tau = as_complex(tau_phase(x, Y, T, params, y_divisor))
    ch = np.cosh(tau)
    check_finite(ch, (x, Y, T), what="cosh(tau)")
    bad = np.abs(ch) <= POLE_TOL
    if np.any(bad):
        raise PoleError("cosh(tau) vanishes", code="solution-pole", locations=_where(bad, x, Y, T))
    sech2 = 1 / ch ** 2
    u0, w0 = kp_seed(x, Y, T, params)
    p = params.p
    a2 = params.alpha ** 2
    u1 = u0 - 2 * p ** 2 * sech2
    w1 = w0 + a2 * params.y0 ** 2 * p ** 2 * sech2 / (3 * T ** 2)
    return u1, w1, tau


def dressed_fields(params: KPParams, y_divisor=6):
    params.check_dressed()
    return lambda x, Y, T: kp_dressed(x, Y, T, params, y_divisor)[:2]


def soliton_reference(x, T, p):
    """``-2 p^2 sech^2(-p x + 4 T p^3 + log(2p)/2)``, the plain KdV soliton."""
    return -2 * p ** 2 / np.cosh(-p * np.asarray(x) + 4 * np.asarray(T) * p ** 3
                                 + 0.5 * np.log(2 * p)) ** 2


def _where(mask, *coords):
    return _locations(mask, coords)
