"""Closed-form 2D Toda boundary-problem objects.

Lattice equation, for ``u = u(X, Y, n)`` with ``w(n) = exp(u(n) - u(n+1))``::

    u_XY(n) = w(n-1) - w(n)

Four worked boundary problems are built in:

``ex1``    ``X = e^(a+b), Y = e^(c(a-b))``, contour ``Y X^c = D`` (``c != 0, 1``)
``ex1c1``  the same transform at ``c = 1``, contour ``X Y = D``
``ex2``    ``X = e^a sin b, Y = c e^a cos b``, contour ``X^2 + Y^2/c^2 = D``
``ex3``    ``ex1`` at ``c = -1`` with a constant seed, contour ``Y/X = D``

``a(x)`` and ``b(y)`` default to the identity.  Dressed solutions are
``u0(n) - log(1 + K(n, n))`` with the closed-form one-soliton kernels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError, ParameterError, PoleError
from .field_eval import DEFAULT_H, _locations, as_complex, check_finite, diff
from .kp import WaveSum
from .transforms import Jacobian

EXAMPLES = ("ex1", "ex1c1", "ex2", "ex3")
POLE_TOL = 1e-12
CONTOUR_TOL = 1e-9


def _identity(v):
    return v


def _one(v):
    return 1.0 + 0 * np.asarray(v)


@dataclass(frozen=True)
class TodaParams:
    """Parameters of one built-in Toda boundary problem.

    ``a0`` is ``a(x0)`` (equal to ``x0`` for the default ``a``); ``D`` and
    ``nu`` are derived from ``(c, a0, p)`` and re-checked if supplied.
    ``k`` is the wavefunction amplitude (the conjugate amplitude is linked to
    it, ``l = k``), and ``u0`` the constant seed used by ``ex3``.
    """

    example: str = "ex1"
    c: float = 2.0
    x0: float | None = None
    a0: float | None = None
    D: float | None = None
    p: complex = 0.7
    k: complex = 1.0
    nu: complex | None = None
    u0: float = 0.0

    def __post_init__(self):
        ex = self.example
        if ex not in EXAMPLES:
            raise ParameterError(f"unknown example {ex!r}", code="example")
        c = float(self.c)
        if ex == "ex1c1":
            c = 1.0
        elif ex == "ex3":
            c = -1.0
        if c == 0:
            raise ParameterError("c must be non-zero", code="c-nonzero")
        if ex == "ex1" and c == 1:
            raise ParameterError("ex1 needs c != 1 (use ex1c1)", code="c-not-one")
        object.__setattr__(self, "c", c)
        p = complex(self.p)
        if p == 0:
            raise ParameterError("p must be non-zero", code="p-nonzero")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "k", complex(self.k))

        a0 = self.a0
        if a0 is None:
            if self.x0 is not None:
                a0 = self.x0
            elif self.D is not None:
                if self.D <= 0:
                    raise ParameterError("D must be positive", code="D-positive")
                a0 = boundary_value(ex, c, self.D)
            else:
                a0 = 0.0
        a0 = float(a0)
        object.__setattr__(self, "a0", a0)
        object.__setattr__(self, "x0", a0 if self.x0 is None else float(self.x0))

        D = contour_constant(ex, c, a0)
        if self.D is not None and not math.isclose(self.D, D, rel_tol=1e-12):
            raise ParameterError(f"D={self.D} inconsistent with a(x0)={a0}", code="D-consistency")
        object.__setattr__(self, "D", D)

        nu = spectral_ratio(ex, c, D, p)
        if self.nu is not None and abs(complex(self.nu) - nu) > 1e-12 * max(1.0, abs(nu)):
            raise ParameterError(f"nu={self.nu} inconsistent with (p, c, D) -> {nu}",
                                 code="nu-consistency")
        object.__setattr__(self, "nu", nu)

    @property
    def q(self):
        """Conjugate spectral parameter linked to ``p`` (``nu = p q``)."""
        return self.nu / self.p

    def check_dressed(self):
        """``|nu| < 1``: the discrete GLM tail converges geometrically."""
        if not abs(self.nu) < 1:
            raise ParameterError(f"|nu| = {abs(self.nu):.6g} must be < 1", code="nu-below-one")
        return self

    def replace(self, **changes):
        data = {k: getattr(self, k) for k in ("example", "c", "p", "k", "u0")}
        if not any(k in changes for k in ("x0", "a0", "D")):
            data.update(x0=self.x0, a0=self.a0)
        data.update(changes)
        return TodaParams(**data)


def boundary_value(example, c, D):
    """``a(x0)`` from the contour constant ``D``."""
    if example == "ex3":
        return -0.5 * math.log(D)
    if example == "ex2":
        return 0.5 * math.log(D)
    return math.log(D) / (2 * c)


def contour_constant(example, c, a0):
    if example == "ex3":
        return math.exp(-2 * a0)
    if example == "ex2":
        return math.exp(2 * a0)
    return math.exp(2 * c * a0)


def spectral_ratio(example, c, D, p):
    """The geometric ratio ``nu`` of the one-soliton kernel."""
    p = complex(p)
    if example == "ex1":
        return -(p ** 2 / c) * D ** ((1 - c) / (2 * c))
    if example == "ex1c1":
        return -p ** 2
    if example == "ex2":
        return -p ** 2 / c ** 2
    return p ** 2 / D


# ---------------------------------------------------------------------------
# transforms


def toda_transform(example, x, y, params: TodaParams, a: Callable = _identity, b: Callable = _identity,
                   da: Callable = _one, db: Callable = _one):
    """Map ``(x, y) -> (X, Y)`` and the Jacobian of the inverse map.

    ``da``/``db`` are the derivatives of ``a``/``b``.
    """
    c = params.c
    av = a(np.asarray(x))
    bv = b(np.asarray(y))
    ap = da(np.asarray(x))
    bp = db(np.asarray(y))
    if example == "ex2":
        X = np.exp(av) * np.sin(bv)
        Y = c * np.exp(av) * np.cos(bv)
        jac = Jacobian.from_forward(ap * X, bp * Y / c, ap * Y, -c * bp * X)
    else:
        X = np.exp(av + bv)
        Y = np.exp(c * (av - bv))
        jac = Jacobian.from_forward(ap * X, bp * X, c * ap * Y, -c * bp * Y)
    return X, Y, jac


def dlog_ratio_dy(example, x, y, params: TodaParams, a=_identity, b=_identity, da=_one, db=_one):
    """``d/dy log(f21/f11)`` for the built-in transforms."""
    if example == "ex2":
        X, Y, _ = toda_transform(example, x, y, params, a, b, da, db)
        bp = db(np.asarray(y))
        c = params.c
        return -c * bp * X / Y - bp * Y / (c * X)
    return (1 + params.c) * db(np.asarray(y))


def on_contour(example, X, Y, params: TodaParams, tol=CONTOUR_TOL):
    X = np.asarray(X)
    Y = np.asarray(Y)
    c, D = params.c, params.D
    with np.errstate(all="ignore"):
        if example == "ex1":
            val = Y * np.abs(X) ** c
        elif example == "ex1c1":
            val = X * Y
        elif example == "ex2":
            val = X ** 2 + Y ** 2 / c ** 2
        else:
            val = Y / X
    return np.abs(val - D) <= tol * max(1.0, D)


def contour_points(example, y, params: TodaParams):
    """Image of the boundary line ``x = x0`` sampled at ``y`` (default ``a, b``).

    Keeps the floating type of ``y`` (pass ``longdouble`` for extended precision).
    """
    y = np.asarray(y)
    if not np.issubdtype(y.dtype, np.floating):
        y = y.astype(float)
    X, Y, _ = toda_transform(example, params.x0 + 0 * y, y, params)
    return X, Y


# ---------------------------------------------------------------------------
# multiplier and boundary constraints


def toda_multiplier_B(n, jac: Jacobian, u_n, d_gauge=1.0):
    """``B(n) = e^{u(n)} (-f21/f11)^n d`` on the boundary."""
    n = np.asarray(n)
    return np.exp(as_complex(u_n)) * as_complex(-jac.ratio) ** n * d_gauge


def ex1_multiplier(n, y, params: TodaParams, b=_identity):
    """Specialized ex1 multiplier ``(-1)^n e^{n(2 a(x0) - log c + (1+c) b(y))}``."""
    n = np.asarray(n)
    c = complex(params.c)
    return (-1.0) ** n * np.exp(n * (2 * params.a0 - np.log(c) + (1 + params.c) * b(np.asarray(y))))


def generic_toda_boundary_residual(example, n, y, u: Callable, params: TodaParams, *,
                                   a=_identity, b=_identity, da=_one, db=_one,
                                   dlog_d=0.0, h=DEFAULT_H):
    """Generic lattice boundary constraint at ``(x0, y, n)``.

    ``u(X, Y, n)`` is differentiated in the original variables ``(x, y)``
    through the transform.  ``dlog_d`` is ``d/dy log d(y)``.
    """
    x0 = params.x0

    def composed(x, yy, nn):
        X, Y, _ = toda_transform(example, x, yy, params, a, b, da, db)
        return u(X, Y, nn)

    x0a = np.asarray(x0) + 0 * np.asarray(y, dtype=float)
    u_x = diff(composed, (x0a, y), (1, 0), h, args=(n,))
    u_y = diff(composed, (x0a, y), (0, 1), h, args=(n,))
    _, _, jac = toda_transform(example, x0a, y, params, a, b, da, db)
    return (np.asarray(n) * dlog_ratio_dy(example, x0a, y, params, a, b, da, db) + u_y
            + 2 * jac.f21 / jac.delta * (jac.f11 * u_x + jac.f12 * u_y) + dlog_d)


def toda_boundary_residual(example, X, Y, n, u: Callable, params: TodaParams, *,
                           grad: Callable | None = None, h=DEFAULT_H, require_contour=True,
                           tol=CONTOUR_TOL):
    """Specialized boundary constraint of ``example`` in ``(X, Y)``.

    Derivatives come from ``grad(X, Y, n) -> (u_X, u_Y)`` when given, else
    from finite differences of ``u``.
    """
    X = np.asarray(X)
    Y = np.asarray(Y)
    n = np.asarray(n)
    if require_contour and not np.all(on_contour(example, X, Y, params, tol)):
        raise DomainError(f"point is not on the {example} contour", code="off-contour")
    if grad is not None:
        uX, uY = grad(X, Y, n)
    else:
        uX = diff(u, (X, Y), (1, 0), h, args=(n,))
        uY = diff(u, (X, Y), (0, 1), h, args=(n,))
    c = params.c
    if example == "ex1":
        return X * uX + c * Y * uY - (1 + c) * n
    if example == "ex1c1":
        return X * uX + Y * uY - 2 * n
    if example == "ex2":
        return Y * uX + c ** 2 * X * uY + n * (Y / X + c ** 2 * X / Y)
    return X * uX - Y * uY


# ---------------------------------------------------------------------------
# seeds


def _chart_logs(example, X, Y):
    X = np.asarray(X)
    Y = np.asarray(Y)
    if example == "ex2":
        if np.any(X * Y <= 0):
            raise DomainError("log(XY) needs X Y > 0", code="out-of-chart",
                              locations=_locations(X * Y <= 0, (X, Y)))
    elif example in ("ex1", "ex1c1"):
        bad = (X <= 0) | (Y <= 0)
        if np.any(bad):
            raise DomainError("needs X > 0 and Y > 0", code="out-of-chart",
                              locations=_locations(bad, (X, Y)))


def toda_seed(example, X, Y, n, params: TodaParams):
    """Elementary seed ``u0(n)`` of ``example``."""
    _chart_logs(example, X, Y)
    X = np.asarray(X)
    Y = np.asarray(Y)
    n = np.asarray(n)
    c = params.c
    if example == "ex1":
        val = 0.5 * (1 + c) * n * (np.log(X) + np.log(Y) / c)
    elif example == "ex1c1":
        val = n * (np.log(X) + np.log(Y))
    elif example == "ex2":
        val = -n * np.log(X * Y)
    else:
        val = params.u0 + 0 * (X + Y + n)
    return as_complex(val)


def toda_seed_grad(example, X, Y, n, params: TodaParams):
    """Analytic ``(u0_X, u0_Y)``."""
    X = np.asarray(X)
    Y = np.asarray(Y)
    n = np.asarray(n)
    c = params.c
    if example == "ex1":
        g = (0.5 * (1 + c) * n / X, 0.5 * (1 + c) * n / (c * Y))
    elif example == "ex1c1":
        g = (n / X, n / Y)
    elif example == "ex2":
        g = (-n / X, -n / Y)
    else:
        g = (0 * X, 0 * Y)
    return tuple(as_complex(v + 0 * (X + Y)) for v in g)


def seed_field(example, params: TodaParams):
    return lambda X, Y, n: toda_seed(example, X, Y, n, params)


# ---------------------------------------------------------------------------
# wavefunctions (c != 1)


def _wave_coords(X, Y, c):
    """``X^((1-c)/2)``, ``Y^((c-1)/(2c))`` and the prefactor base ``X^((1+c)/2)``.

    These are ``e^{(1-c)(a+b)/2}``, ``e^{(1-c)(b-a)/2}`` and ``e^{(1+c)(a+b)/2}``
    written in ``(X, Y)``; at ``c = -1`` all powers are integers and any real
    ``X, Y`` is allowed, otherwise the chart ``X, Y > 0`` is required.
    """
    X = np.asarray(X)
    Y = np.asarray(Y)
    if c == -1:
        return X, Y, np.ones_like(X)
    bad = (X <= 0) | (Y <= 0)
    if np.any(bad):
        raise DomainError("wavefunctions need X > 0 and Y > 0", code="out-of-chart",
                          locations=_locations(bad, (X, Y)))
    return X ** ((1 - c) / 2), Y ** ((c - 1) / (2 * c)), X ** ((1 + c) / 2)


def _wave_params(params):
    if params.c == 1:
        raise ParameterError("wavefunctions are only available for c != 1", code="c-not-one")
    return params.c


def toda_psi(X, Y, n, waves: WaveSum, params: TodaParams):
    """Seed wavefunction of the ex1 family (``c != 1``)."""
    c = _wave_params(params)
    xs, ys, base = _wave_coords(X, Y, c)
    n = np.asarray(n)
    pref = as_complex(base) ** (-n)
    total = None
    for kj, pj in waves.terms:
        term = kj * as_complex(pj) ** n * np.exp(2 / (1 - c) * (pj * xs + c / pj * ys))
        total = term if total is None else total + term
    return check_finite(as_complex(pref * total), (X, Y, n), what="wavefunction")


def toda_psi_hat(X, Y, n, waves: WaveSum, params: TodaParams):
    """Conjugate seed wavefunction of the ex1 family."""
    c = _wave_params(params)
    xs, ys, base = _wave_coords(X, Y, c)
    n = np.asarray(n)
    pref = as_complex(base) ** n
    total = None
    for lj, qj in waves.terms:
        term = lj * as_complex(qj) ** n * np.exp(-2 / (1 - c) * (xs / qj + c * qj * ys))
        total = term if total is None else total + term
    return check_finite(as_complex(pref * total), (X, Y, n), what="wavefunction")


def linked_conjugate(waves: WaveSum, params: TodaParams) -> WaveSum:
    """Conjugate terms satisfying the boundary link ``l = k``,
    ``q = -(p/c) e^{(1-c) a(x0)}``."""
    c = params.c
    factor = -math.exp((1 - c) * params.a0) / c
    return WaveSum(tuple((k, p * factor) for k, p in waves.terms))


def one_soliton_waves(params: TodaParams):
    psi = WaveSum.single(params.k, params.p)
    return psi, linked_conjugate(psi, params)


# ---------------------------------------------------------------------------
# kernels and dressing


def kernel_denominator(example, X, Y, n, params: TodaParams):
    """``1 / K(n, n)`` for the closed-form one-soliton kernel."""
    X = np.asarray(X)
    Y = np.asarray(Y)
    n = np.asarray(n)
    c, p, nu, k2 = params.c, params.p, params.nu, params.k ** 2
    nu_pow = as_complex(nu) ** (-n)
    if example in ("ex1", "ex3"):
        if example == "ex1":
            _chart_logs("ex1", X, Y)
            phi = 2 / (c - 1) * (c / p * (1 - nu) * Y ** ((c - 1) / (2 * c))
                                 + p * (1 - 1 / nu) * X ** ((1 - c) / 2))
        else:
            phi = (1 - nu) / p * Y - p * (1 - 1 / nu) * X
        return 1 / (nu - 1) - nu_pow * np.exp(phi) / k2
    if example == "ex1c1":
        _chart_logs("ex1c1", X, Y)
        return -(nu_pow * (Y / X) ** (p + 1 / p) / k2 + 1 / (1 + p ** 2))
    g = p ** 2 / c ** 2
    return -(nu_pow * np.exp(0.5 * (p + c ** 2 / p) * (Y ** 2 / c ** 2 - X ** 2)) / k2
             + 1 / (1 + g))


def toda_kernel_closed(example, X, Y, n, params: TodaParams):
    """Closed-form diagonal kernel ``K(n, n)``."""
    den = as_complex(kernel_denominator(example, X, Y, n, params))
    check_finite(den, (X, Y, n), what="kernel denominator")
    bad = np.abs(den) <= POLE_TOL
    if np.any(bad):
        raise PoleError("kernel denominator vanishes", code="kernel-pole",
                        locations=_locations(bad, (X, Y, n)))
    return 1 / den


def toda_dressed(example, X, Y, n, params: TodaParams, *, principal=False):
    """Dressed solution ``u0(n) - log(1 + K(n, n))``.

    With real data a negative ``1 + K`` raises ``branch-violation`` unless
    ``principal`` asks for the principal complex logarithm.
    """
    one_plus_k = 1 + toda_kernel_closed(example, X, Y, n, params)
    mag = np.abs(one_plus_k)
    bad = mag <= POLE_TOL
    if np.any(bad):
        raise PoleError("1 + K(n, n) vanishes", code="solution-pole",
                        locations=_locations(bad, (X, Y, n)))
    if not principal:
        negative = (np.abs(one_plus_k.imag) <= 1e-14 * mag) & (one_plus_k.real < 0)
        if np.any(negative):
            raise DomainError("1 + K(n, n) is on the negative real axis", code="branch-violation",
                              locations=_locations(negative, (X, Y, n)))
    return toda_seed(example, X, Y, n, params) - np.log(one_plus_k)


def dressed_field(example, params: TodaParams, principal=False):
    return lambda X, Y, n: toda_dressed(example, X, Y, n, params, principal=principal)


def dressed_grad(example, params: TodaParams, h=DEFAULT_H):
    """``(u1_X, u1_Y)``: analytic seed gradient plus differenced ``-log(1 + K)``.

    Keeps the steep logarithmic seed out of the stencil near the chart edges.
    """
    def correction(X, Y, n):
        return toda_dressed(example, X, Y, n, params) - toda_seed(example, X, Y, n, params)

    def grad(X, Y, n):
        sX, sY = toda_seed_grad(example, X, Y, n, params)
        cX = diff(correction, (X, Y), (1, 0), h, args=(n,))
        cY = diff(correction, (X, Y), (0, 1), h, args=(n,))
        return sX + cX, sY + cY

    return grad


def w_of(u: Callable):
    """Lattice coupling ``w(n) = exp(u(n) - u(n+1))`` of a field ``u(X, Y, n)``."""
    return lambda X, Y, n: np.exp(u(X, Y, n) - u(X, Y, np.asarray(n) + 1))


@dataclass
class RegularityScan:
    min_abs_one_plus_k: float
    poles: list
    sign_changes: int

    @property
    def regular(self):
        return not self.poles


def scan_regularity(example, params: TodaParams, Xs, Ys, ns):
    """Scan ``1 + K(n, n)`` over a tensor grid for poles.

    For real data a pole shows up as a sign change of ``1/K`` between grid
    neighbours (or an exactly vanishing denominator); each is reported as the
    pair of bracketing points.
    """
    n3, X3, Y3 = np.meshgrid(np.asarray(ns), np.asarray(Xs, dtype=float),
                             np.asarray(Ys, dtype=float), indexing="ij")
    den = as_complex(kernel_denominator(example, X3, Y3, n3, params))
    poles = []
    sign_changes = 0
    real = np.all(np.abs(den.imag) <= 1e-14 * np.abs(den))
    exact = np.abs(den) <= POLE_TOL
    for idx in np.argwhere(exact):
        i = tuple(idx)
        poles.append(((float(X3[i]), float(Y3[i]), int(n3[i])),) * 2)
    if real:
        d = den.real
        for axis in (1, 2):
            a = np.moveaxis(d, axis, -1)
            flips = np.sign(a[..., :-1]) * np.sign(a[..., 1:]) < 0
            sign_changes += int(flips.sum())
            for idx in np.argwhere(flips)[:50]:
                lo = list(idx)
                hi = list(idx)
                hi[-1] += 1
                lo_i = tuple(np.insert(np.delete(lo, -1), axis, lo[-1]))
                hi_i = tuple(np.insert(np.delete(hi, -1), axis, hi[-1]))
                poles.append(((float(X3[lo_i]), float(Y3[lo_i]), int(n3[lo_i])),
                              (float(X3[hi_i]), float(Y3[hi_i]), int(n3[hi_i]))))
    with np.errstate(all="ignore"):
        opk = np.abs(1 + 1 / den)
    finite = opk[np.isfinite(opk)]
    return RegularityScan(float(finite.min()) if finite.size else float("nan"), poles, sign_changes)
