"""Residual checks: nonlinear equations, Lax systems, boundary relations.

Each ``*_residuals`` builder returns plain residual fields for a given step
``h``; the ``check_*`` functions scan them over a grid and return
:class:`CheckOutcome` records.  A :class:`CheckSuite` bundles checks with
frozen thresholds and is run by :func:`run_suite`.

Convergence is probed by doubling the step: the order is
``log2(r(2s) / r(s))`` on the finest pair not swamped by rounding noise (see
:func:`measure_order`).  A residual at the rounding floor at every probed
step is reported as rounding-limited; a polynomial dependence differentiated
by a 4th-order stencil leaves nothing to converge.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DomainError, SoliboundError
from .field_eval import DEFAULT_H, GridSpec, ResidualReport, as_complex, diff, residual_scan, \
    summarize, worker_count
from .kp import HYPERBOLIC, KPTransform
from .toda import toda_transform

MIN_ORDER = 3.5
EPS_EXTENDED = float(np.finfo(np.longdouble).eps)
FLOOR_FACTOR = 100.0


@dataclass
class CheckOutcome:
    name: str
    equation: str
    report: ResidualReport | None
    threshold: float
    passed: bool
    order: float | None = None
    kind: str = "residual"
    details: dict = field(default_factory=dict)
    error: str | None = None

    def as_dict(self):
        order = self.order
        if order is not None and math.isinf(order):
            order = "rounding-limited"
        return {
            "name": self.name,
            "equation": self.equation,
            "kind": self.kind,
            "max_residual": None if self.report is None else self.report.max_abs,
            "threshold": self.threshold,
            "convergence_order": order,
            "pass": self.passed,
            "report": None if self.report is None else self.report.as_dict(),
            "details": self.details,
            "error": self.error,
        }


# ---------------------------------------------------------------------------
# convergence helpers


def rounding_floor(h, deriv_order):
    """Rough size of stencil rounding noise for a ``deriv_order`` derivative."""
    return FLOOR_FACTOR * EPS_EXTENDED / float(h) ** deriv_order


def measure_order(run: Callable[[float], ResidualReport], h, deriv_order=3, levels=3):
    """Residual at ``h`` plus an observed convergence order.

    Residuals are computed at ``h, 2h, 4h, ...``; the order is
    ``log2(r(2s) / r(s))`` for the finest ``s`` whose residual stands clear of
    the rounding floor.  When every level sits at the floor the residual is
    rounding-limited and the order is reported as ``inf``.
    Returns ``(report, order, probe)`` with ``probe`` mapping step to max residual.
    """
    steps = [h * 2 ** i for i in range(levels)]
    reports = {steps[0]: run(steps[0])}
    probe = {steps[0]: reports[steps[0]].max_abs}
    for fine, coarse in zip(steps, steps[1:]):
        if probe[fine] > rounding_floor(fine, deriv_order):
            probe[coarse] = run(coarse).max_abs
            if probe[fine] <= 0:
                return reports[steps[0]], math.inf, probe
            return reports[steps[0]], math.log2(probe[coarse] / probe[fine]), probe
        probe[coarse] = run(coarse).max_abs
    return reports[steps[0]], math.inf, probe


def scan_with_order(factory: Callable[[float], Callable], grid: GridSpec, h=DEFAULT_H, probe=True,
                    deriv_order=3):
    """Scan ``factory(h)`` on ``grid``; with ``probe`` also measure the order."""
    run = lambda hh: residual_scan(factory(hh), grid, h=hh)
    if not probe:
        return run(h), None, {}
    return measure_order(run, h, deriv_order)


def _outcome(name, equation, report, threshold, order, min_order=MIN_ORDER, probe=None):
    ok = report.max_abs < threshold and (order is None or order >= min_order)
    details = {"probe": {repr(k): v for k, v in probe.items()}} if probe else {}
    return CheckOutcome(name, equation, report, threshold, bool(ok), order, details=details)


def _components(fields):
    return (lambda *c: fields(*c)[0]), (lambda *c: fields(*c)[1])


# ---------------------------------------------------------------------------
# KP


def kp_equation_residuals(fields, alpha=1, h=DEFAULT_H, exclude=None):
    """Both lines of the KP system for ``fields(x, Y, T) -> (u, w)``."""
    u, w = _components(fields)
    a2 = complex(alpha) ** 2

    def line1(x, Y, T):
        pt = (x, Y, T)
        return (diff(u, pt, (0, 0, 1), h, exclude=exclude) + diff(u, pt, (3, 0, 0), h, exclude=exclude)
                - 6 * u(*pt) * diff(u, pt, (1, 0, 0), h, exclude=exclude)
                + 3 * a2 * diff(w, pt, (0, 1, 0), h, exclude=exclude))

    def line2(x, Y, T):
        pt = (x, Y, T)
        return diff(w, pt, (1, 0, 0), h, exclude=exclude) - diff(u, pt, (0, 1, 0), h, exclude=exclude)

    return line1, line2


def check_kp_equation(fields, grid: GridSpec, h=DEFAULT_H, *, alpha=1, threshold=1e-8, probe=True,
                      label="KP"):
    outs = []
    for i, eq in enumerate(("u_T+u_xxx-6uu_x=-3a^2 w_Y (1.1)", "w_x=u_Y (1.1)")):
        report, order, pr = scan_with_order(lambda hh: kp_equation_residuals(fields, alpha, hh)[i],
                                            grid, h, probe, deriv_order=3)
        outs.append(_outcome(f"{label} line {i + 1}", eq, report, threshold, order, probe=pr))
    return outs


def _kp_operators(psi, u, w, x, Y, T, alpha, h, conjugate):
    pt = (x, Y, T)
    uu = u(*pt)
    ps = psi(*pt)
    L = diff(psi, pt, (2, 0, 0), h) - uu * ps
    sign = -1 if conjugate else 1
    A = (-4 * diff(psi, pt, (3, 0, 0), h) + 6 * uu * diff(psi, pt, (1, 0, 0), h)
         + 3 * (diff(u, pt, (1, 0, 0), h) + sign * alpha * w(*pt)) * ps)
    return ps, L, A


KP_LAX_SYSTEMS = {
    "original": "(1.3)",
    "conjugate": "(2.8a)",
    "transformed": "(3.2)",
    "transformed-conjugate": "(3.3)",
}


def kp_lax_residuals(psi, fields, which="original", alpha=1, h=DEFAULT_H,
                     transform: KPTransform = HYPERBOLIC):
    """Residuals of a KP linear system, normalized by ``|psi|``.

    ``original``/``conjugate`` take ``(x, Y, T)`` coordinates;
    ``transformed``/``transformed-conjugate`` take ``(x, y, t)`` and differentiate
    the composed wavefunction in ``y`` and ``t``.
    """
    if which not in KP_LAX_SYSTEMS:
        raise ValueError(f"unknown KP linear system {which!r}")
    u, w = _components(fields)
    a = complex(alpha)
    conj = which.endswith("conjugate")

    if which in ("original", "conjugate"):
        def line1(x, Y, T):
            ps, L, _ = _kp_operators(psi, u, w, x, Y, T, a, h, conj)
            lhs = (-a if conj else a) * diff(psi, (x, Y, T), (0, 1, 0), h)
            return (lhs - L) / np.abs(ps)

        def line2(x, Y, T):
            ps, _, A = _kp_operators(psi, u, w, x, Y, T, a, h, conj)
            return (diff(psi, (x, Y, T), (0, 0, 1), h) - A) / np.abs(ps)

        return line1, line2

    def composed(x, y, t):
        Y, T = transform.forward(y, t)
        return psi(x, Y, T)

    def pieces(x, y, t):
        Y, T = transform.forward(y, t)
        jac = transform.jacobian(y, t)
        ps, L, A = _kp_operators(psi, u, w, x, Y, T, a, h, conj)
        return ps, L, A, jac

    def line1(x, y, t):
        ps, L, A, j = pieces(x, y, t)
        psi_y = diff(composed, (x, y, t), (0, 1, 0), h)
        if conj:
            rhs = -(j.f22 / a * L + j.f12 * A) / j.delta
        else:
            rhs = (j.f22 / a * L - j.f12 * A) / j.delta
        return (psi_y - rhs) / np.abs(ps)

    def line2(x, y, t):
        ps, L, A, j = pieces(x, y, t)
        psi_t = diff(composed, (x, y, t), (0, 0, 1), h)
        if conj:
            rhs = (j.f21 / a * L + j.f11 * A) / j.delta
        else:
            rhs = -(j.f21 / a * L - j.f11 * A) / j.delta
        return (psi_t - rhs) / np.abs(ps)

    return line1, line2


def check_kp_lax(psi, fields, which, grid: GridSpec, h=DEFAULT_H, *, alpha=1, threshold=1e-8,
                 probe=True, transform=HYPERBOLIC, label=None):
    outs = []
    label = label or f"KP Lax {which}"
    for i in range(2):
        report, order, pr = scan_with_order(
            lambda hh: kp_lax_residuals(psi, fields, which, alpha, hh, transform)[i], grid, h, probe,
            deriv_order=3)
        outs.append(_outcome(f"{label} line {i + 1}", KP_LAX_SYSTEMS[which], report, threshold, order,
                             probe=pr))
    return outs


# ---------------------------------------------------------------------------
# Toda


def _shift(f, k):
    return lambda X, Y, n: f(X, Y, np.asarray(n) + k)


def toda_equation_residual(u, h=DEFAULT_H, exclude=None):
    """``u_XY(n) - w(n-1) + w(n)`` with ``w(n) = exp(u(n) - u(n+1))``."""
    def res(X, Y, n):
        n = np.asarray(n)
        u_m, u_0, u_p = u(X, Y, n - 1), u(X, Y, n), u(X, Y, n + 1)
        return (diff(u, (X, Y), (1, 1), h, args=(n,), exclude=exclude)
                - np.exp(u_m - u_0) + np.exp(u_0 - u_p))
    return res


def check_toda_equation(u, grid: GridSpec, h=DEFAULT_H, *, threshold, probe=True, label="Toda"):
    report, order, pr = scan_with_order(lambda hh: toda_equation_residual(u, hh), grid, h, probe,
                                        deriv_order=2)
    return _outcome(f"{label} lattice equation", "u_XY(n)=w(n-1)-w(n) (1.2a)", report, threshold,
                    order, probe=pr)


TODA_LAX_SYSTEMS = {
    "original": "(5.0)",
    "conjugate": "(5.9)",
    "transformed": "(6.2)",
    "transformed-conjugate": "(6.3)",
    "ex1": "(7.4)",
    "ex1-conjugate": "(7.5)",
}


def toda_lax_residuals(psi, u, which="original", h=DEFAULT_H, *, example="ex1", params=None,
                       coupling="w"):
    """Residuals of a Toda linear system, normalized by ``|psi(n)|``.

    ``original``/``conjugate`` take ``(X, Y, n)``; the transformed variants
    take ``(x, y, n)`` and need ``example``/``params`` for the transform.
    ``coupling="u"`` substitutes ``u`` for ``w`` in the ``ex1`` systems,
    reproducing a misprint (regression use only).
    """
    if which not in TODA_LAX_SYSTEMS:
        raise ValueError(f"unknown Toda linear system {which!r}")
    w = lambda X, Y, n: np.exp(u(X, Y, n) - u(X, Y, np.asarray(n) + 1))
    coup = w if coupling == "w" else u

    if which in ("original", "conjugate"):
        def line1(X, Y, n):
            n = np.asarray(n)
            ps = psi(X, Y, n)
            dX = diff(psi, (X, Y), (1, 0), h, args=(n,))
            uX = diff(u, (X, Y), (1, 0), h, args=(n,))
            if which == "original":
                r = dX + uX * ps - psi(X, Y, n + 1)
            else:
                r = dX - uX * ps + psi(X, Y, n - 1)
            return r / np.abs(ps)

        def line2(X, Y, n):
            n = np.asarray(n)
            ps = psi(X, Y, n)
            dY = diff(psi, (X, Y), (0, 1), h, args=(n,))
            if which == "original":
                r = dY + w(X, Y, n - 1) * psi(X, Y, n - 1)
            else:
                r = dY - w(X, Y, n) * psi(X, Y, n + 1)
            return r / np.abs(ps)

        return line1, line2

    def fwd(x, y):
        return toda_transform(example, x, y, params)

    def comp(f):
        def g(x, y, n):
            X, Y, _ = fwd(x, y)
            return f(X, Y, n)
        return g

    psi_c, u_c = comp(psi), comp(u)

    def common(x, y, n):
        n = np.asarray(n)
        X, Y, j = fwd(x, y)
        ux = diff(u_c, (x, y), (1, 0), h, args=(n,))
        uy = diff(u_c, (x, y), (0, 1), h, args=(n,))
        return n, X, Y, j, ux, uy

    if which in ("transformed", "transformed-conjugate"):
        conj = which == "transformed-conjugate"

        def brackets(X, Y, n, j, ux, uy):
            uX = j.f11 * ux + j.f12 * uy
            if conj:
                core = uX * psi(X, Y, n) - psi(X, Y, n - 1)
                side = -w(X, Y, n) * psi(X, Y, n + 1)
            else:
                core = -uX * psi(X, Y, n) + psi(X, Y, n + 1)
                side = w(X, Y, n - 1) * psi(X, Y, n - 1)
            return core, side

        def line1(x, y, n):
            n, X, Y, j, ux, uy = common(x, y, n)
            core, side = brackets(X, Y, n, j, ux, uy)
            rhs = (j.f22 * core + j.f12 * side) / j.delta
            return (diff(psi_c, (x, y), (1, 0), h, args=(n,)) - rhs) / np.abs(psi(X, Y, n))

        def line2(x, y, n):
            n, X, Y, j, ux, uy = common(x, y, n)
            core, side = brackets(X, Y, n, j, ux, uy)
            rhs = -(j.f21 * core + j.f11 * side) / j.delta
            return (diff(psi_c, (x, y), (0, 1), h, args=(n,)) - rhs) / np.abs(psi(X, Y, n))

        return line1, line2

    c = params.c
    conj = which == "ex1-conjugate"

    def line1(x, y, n):
        n, X, Y, _, ux, uy = common(x, y, n)
        ap, bp = 1.0, 1.0
        S = 0.5 * (ux + ap * uy / bp)
        if conj:
            rhs = (c * ap * Y * coup(X, Y, n) * psi(X, Y, n + 1) + S * psi(X, Y, n)
                   - ap * X * psi(X, Y, n - 1))
        else:
            rhs = (ap * X * psi(X, Y, n + 1) - S * psi(X, Y, n)
                   - c * ap * Y * coup(X, Y, n - 1) * psi(X, Y, n - 1))
        return (diff(psi_c, (x, y), (1, 0), h, args=(n,)) - rhs) / np.abs(psi(X, Y, n))

    def line2(x, y, n):
        n, X, Y, _, ux, uy = common(x, y, n)
        ap, bp = 1.0, 1.0
        S = 0.5 * (ux + ap * uy / bp)
        if conj:
            rhs = (-c * bp * Y * coup(X, Y, n) * psi(X, Y, n + 1) + bp / ap * S * psi(X, Y, n)
                   - bp * X * psi(X, Y, n - 1))
        else:
            rhs = (bp * X * psi(X, Y, n + 1) - bp / ap * S * psi(X, Y, n)
                   + c * bp * Y * coup(X, Y, n - 1) * psi(X, Y, n - 1))
        return (diff(psi_c, (x, y), (0, 1), h, args=(n,)) - rhs) / np.abs(psi(X, Y, n))

    return line1, line2


def check_toda_lax(psi, u, which, grid: GridSpec, h=DEFAULT_H, *, threshold, probe=True,
                   example="ex1", params=None, coupling="w", label=None):
    outs = []
    label = label or f"Toda Lax {which}"
    for i in range(2):
        report, order, pr = scan_with_order(
            lambda hh: toda_lax_residuals(psi, u, which, hh, example=example, params=params,
                                          coupling=coupling)[i], grid, h, probe, deriv_order=1)
        outs.append(_outcome(f"{label} line {i + 1}", TODA_LAX_SYSTEMS[which], report, threshold,
                             order, probe=pr))
    return outs


# ---------------------------------------------------------------------------
# boundary relation


def definition1_residual(psi, psi_hat, B, samples, floor=1e-300):
    """``|psi_hat - B psi| / max(|psi_hat|, |psi|)`` at ``samples``."""
    ps = as_complex(psi(*samples))
    ph = as_complex(psi_hat(*samples))
    b = as_complex(B(*samples))
    scale = np.maximum(np.abs(ps), np.abs(ph))
    if np.any(scale <= floor):
        raise DomainError("psi and psi_hat both underflow", code="degenerate-sample")
    return np.abs(ph - b * ps) / scale


def check_definition1(psi, psi_hat, B, samples, *, threshold=1e-12, names=(), label="psi_hat = B psi",
                      equation="psi_hat = B psi on the boundary"):
    res = definition1_residual(psi, psi_hat, B, samples)
    report = summarize(res, samples, names=names)
    return _outcome(label, equation, report, threshold, None)


# ---------------------------------------------------------------------------
# suites


@dataclass
class Check:
    """One suite member.

    ``kind`` is ``"residual"`` (pass if below threshold), ``"witness"`` (pass
    if above: demonstrates that something genuinely fails) or ``"negative"``
    (a misprinted form must be worse than the corrected one by ``threshold``x).
    ``run(h)`` returns a :class:`ResidualReport`; for negative checks it
    returns ``(corrected, misprinted)`` reports.
    """

    name: str
    equation: str
    run: Callable
    threshold: float
    kind: str = "residual"
    probe: bool = False
    min_order: float = MIN_ORDER
    deriv_order: int = 3


@dataclass
class CheckSuite:
    name: str
    checks: list
    h: float = DEFAULT_H

    def __post_init__(self):
        for c in self.checks:
            if not c.threshold > 0:
                raise ValueError(f"check {c.name!r}: threshold must be positive")
            if not c.equation:
                raise ValueError(f"check {c.name!r}: must name its equation")


def run_check(check: Check, h=DEFAULT_H) -> CheckOutcome:
    try:
        if check.kind == "negative":
            good, bad = check.run(h)
            ratio = bad.max_abs / max(good.max_abs, 1e-300)
            return CheckOutcome(check.name, check.equation, bad, check.threshold,
                                bool(ratio >= check.threshold), kind="negative",
                                details={"corrected_max": good.max_abs, "misprint_max": bad.max_abs,
                                         "ratio": ratio})
        if check.probe:
            report, order, pr = measure_order(check.run, h, check.deriv_order)
        else:
            report, order, pr = check.run(h), None, None
        if check.kind == "witness":
            return CheckOutcome(check.name, check.equation, report, check.threshold,
                                bool(report.max_abs > check.threshold), kind="witness")
        return _outcome(check.name, check.equation, report, check.threshold, order, check.min_order,
                        probe=pr)
    except SoliboundError as exc:
        return CheckOutcome(check.name, check.equation, None, check.threshold, False,
                            kind=check.kind, error=str(exc),
                            details={"locations": exc.locations[:10]})


def run_suite(suite: CheckSuite, h=None, workers=None):
    """Run every check; outcomes come back in check order."""
    h = suite.h if h is None else h
    workers = worker_count() if workers is None else workers
    if workers <= 1:
        return [run_check(c, h) for c in suite.checks]
    with ThreadPoolExecutor(workers) as pool:
        return list(pool.map(lambda c: run_check(c, h), suite.checks))
