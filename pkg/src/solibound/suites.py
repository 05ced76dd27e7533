"""Named verification suites with frozen desk configurations.

Finite-difference thresholds are ``C * h**4`` with ``C`` fixed per suite from
calibration runs at ``h = 1e-3`` (a few times the measured residual).  Exact
identities use fixed absolute tolerances.  Changing any constant here changes
what "pass" means; keep them pinned.
"""

from __future__ import annotations

from dataclasses import replace

import numpy as np

from . import glm, kp, toda
from .field_eval import DEFAULT_H, Axis, ResidualReport, diff, grid, residual_scan, summarize
from .verify import (KP_LAX_SYSTEMS, TODA_LAX_SYSTEMS, Check, CheckSuite, definition1_residual,
                     kp_equation_residuals, kp_lax_residuals, toda_equation_residual,
                     toda_lax_residuals)

# C such that threshold = C * h**4
C_FROZEN = {
    "kp-equation": 1e4,
    "kp-lax": 1e6,
    "toda-ex1": 2e5,
    "toda-ex1c1": 3e3,
    "toda-ex2": 1e3,
    "toda-ex3": 1e1,
    "toda-lax": 5e5,
}

EXACT_TOL = 1e-12
BOUNDARY_TOL_KP = 1e-9
BOUNDARY_TOL_TODA = 1e-8
ORACLE_TOL = 1e-8
CLOSURE_TOL_KP = 1e-6
CLOSURE_TOL_TODA = 1e-8
WITNESS_MIN = 1e-3
NEGATIVE_RATIO = 1e6
REGULARITY_MIN = 0.1
POLE_FLOOR = toda.POLE_TOL
N_CONTOUR = 100
N_SAMPLES = 50
SAMPLE_SEED = 20240601

KP_DESK = dict(alpha=1, y0=1.0, p=0.5)
KP_GRID = grid(Axis("x", -4, 4, 21), Axis("Y", -2, 2, 21), Axis("T", 0.5, 2, 21))
# (x, y, t) block mapping into the KP desk range under Y = y t, T = y / t
KP_GRID_YT = grid(Axis("x", -4, 4, 21), Axis("y", 0.8, 1.2, 11), Axis("t", 0.7, 1.4, 11))
KP_NEG_GRID_YT = grid(Axis("x", -2, 2, 11), Axis("y", 0.8, 1.2, 7), Axis("t", 0.7, 1.0, 7))

N_AXIS = Axis("n", -5, 5, 11, integer=True)

# per example: parameters, (X range), (Y range), contour window in y
TODA_DESK = {
    "ex1": (dict(c=2.0, x0=0.0, p=0.7), (1.0, 2.0), (0.1, 0.5), (-0.5, 0.5)),
    "ex1c1": (dict(x0=0.0, p=0.8), (0.2, 0.5), (2.0, 3.0), (-1.1, -0.7)),
    "ex2": (dict(c=1.0, D=9.5, p=0.5), (0.2, 0.6), (2.8, 3.4), (0.07, 0.19)),
    "ex3": (dict(D=4.0, p=1.0), (-2.0, 2.0), (-2.0, 2.0), (-0.5, 0.5)),
}
TODA_GRID_POINTS = 21
TODA_LAX_GRID_XY = grid(Axis("x", -0.5, 0.5, 9), Axis("y", -0.5, 0.5, 9), N_AXIS)
EX3_POLE_PARAMS = dict(D=0.5, p=1.0)  # nu = 2

SUITE_NAMES = ("kp-seed", "kp-dressed", "kp-lax", "kp-boundary", "kp-glm", "kp-reduction",
               "toda-ex1", "toda-ex1c1", "toda-ex2", "toda-ex3", "toda-lax", "toda-glm",
               "negative-typos")


def threshold(key, h=DEFAULT_H):
    return C_FROZEN[key] * h ** 4


def kp_params(overrides=None):
    return kp.KPParams(**{**KP_DESK, **(overrides or {})})


def toda_params(example, overrides=None):
    """Desk parameters of ``example`` with ``overrides``; a boundary given by
    any of ``D, x0, a0`` replaces the desk boundary."""
    overrides = dict(overrides or {})
    base = dict(TODA_DESK[example][0])
    if any(k in overrides for k in ("D", "x0", "a0")):
        for k in ("D", "x0", "a0"):
            base.pop(k, None)
    return toda.TodaParams(example=example, **{**base, **overrides})


def toda_grid(example, count=TODA_GRID_POINTS):
    _, (xl, xh), (yl, yh), _ = TODA_DESK[example]
    return grid(Axis("X", xl, xh, count), Axis("Y", yl, yh, count), N_AXIS)


# ---------------------------------------------------------------------------
# small builders


def _fd(name, equation, factory, g, thr, deriv_order, probe=True):
    return Check(name, equation, lambda h: residual_scan(factory(h), g, h=h), thr, probe=probe,
                 deriv_order=deriv_order)


def _static(name, equation, values_fn, thr, kind="residual"):
    """Check whose residual does not depend on the step.

    ``values_fn()`` returns a ready :class:`ResidualReport` or a
    ``(values, coords, names)`` triple.
    """
    def run(_h):
        out = values_fn()
        if isinstance(out, ResidualReport):
            return out
        values, coords, names = out
        return summarize(values, coords, names=names)
    return Check(name, equation, run, thr, kind=kind)


def _rng():
    return np.random.default_rng(SAMPLE_SEED)


def kp_contour_samples(params, count=N_CONTOUR, product=None):
    """``count`` points ``(x, Y, T)`` with ``Y T = product`` (default ``y0^2``), ``T in [0.5, 2]``."""
    product = params.y0 ** 2 if product is None else product
    T = np.linspace(0.5, 2.0, count)
    x = _rng().uniform(-4, 4, count)
    return x, product / T, T


def kp_desk_samples(count=N_SAMPLES):
    r = _rng()
    return r.uniform(-4, 4, count), r.uniform(-2, 2, count), r.uniform(0.5, 2, count)


def _pad(a, z):
    a = np.asarray(a)
    return a.reshape(a.shape + (1,) * (np.ndim(z) - a.ndim))


def kp_wave_pair(params):
    """``psi(x, Y, T)`` and ``psi_hat(x, Y, T)`` for the one-soliton data."""
    pw, qw = kp.psi_waves(params), kp.psi_hat_waves(params)
    return (lambda x, Y, T: kp.kp_psi(x, Y, T, pw, params),
            lambda x, Y, T: kp.kp_psi_hat(x, Y, T, qw, params))


def bind_yt(f, Y, T):
    """``z -> f(z, Y, T)`` with ``Y, T`` padded to broadcast against ``z``."""
    return lambda z: f(z, _pad(Y, z), _pad(T, z))


# ---------------------------------------------------------------------------
# KP suites


def _kp_eq_checks(fields, label, params, thr):
    return [
        _fd(f"{label} KP line {i + 1}", eq,
            lambda h, i=i: kp_equation_residuals(fields, params.alpha, h)[i], KP_GRID, thr, 3)
        for i, eq in enumerate(("u_T+u_xxx-6uu_x=-3a^2 w_Y (1.1)", "w_x=u_Y (1.1)"))
    ]


def suite_kp_seed(overrides=None, h=DEFAULT_H):
    P = kp_params(overrides)
    return CheckSuite("kp-seed", _kp_eq_checks(kp.seed_fields(P), "seed", P,
                                               threshold("kp-equation", h)), h)


def _pole_scan(params):
    def values():
        x, Y, T = KP_GRID.points()
        tau = kp.kp_dressed(x, Y, T, params)[2]
        return 1 / np.abs(np.cosh(tau)), (x, Y, T), KP_GRID.names
    return _static("dressed pole-free scan (1/|cosh tau|)", "cosh(tau) != 0 (4.9)", values,
                   1 / kp.POLE_TOL)


def suite_kp_dressed(overrides=None, h=DEFAULT_H):
    P = kp_params(overrides).check_dressed()
    checks = [_pole_scan(P)] + _kp_eq_checks(kp.dressed_fields(P), "dressed", P,
                                             threshold("kp-equation", h))
    return CheckSuite("kp-dressed", checks, h)


def _kp_lax_checks(psi, fields, which, g, thr, alpha, label):
    return [
        _fd(f"{label} line {i + 1}", f"{which} {_kp_tag(which)}",
            lambda h, i=i: kp_lax_residuals(psi, fields, which, alpha, h)[i], g, thr, 3)
        for i in range(2)
    ]


def _kp_tag(which):
    return KP_LAX_SYSTEMS[which]


def suite_kp_lax(overrides=None, h=DEFAULT_H):
    P = kp_params(overrides)
    thr = threshold("kp-lax", h)
    psi, psi_hat = kp_wave_pair(P)
    F = kp.seed_fields(P)
    vac = P.replace(y0=0.0)
    vac_psi = lambda x, Y, T: kp.kp_psi(x, Y, T, kp.psi_waves(vac), vac)
    checks = []
    checks += _kp_lax_checks(psi, F, "original", KP_GRID, thr, P.alpha, "psi under original system")
    checks += _kp_lax_checks(psi_hat, F, "conjugate", KP_GRID, thr, P.alpha,
                             "psi_hat under conjugate system")
    checks += _kp_lax_checks(psi, F, "transformed", KP_GRID_YT, thr, P.alpha,
                             "psi under transformed system")
    checks += _kp_lax_checks(psi_hat, F, "transformed-conjugate", KP_GRID_YT, thr, P.alpha,
                             "psi_hat under transformed conjugate system")
    checks += _kp_lax_checks(vac_psi, kp.seed_fields(vac), "original", KP_GRID, thr, P.alpha,
                             "vacuum wave under original system")
    return CheckSuite("kp-lax", checks, h)


def suite_kp_boundary(overrides=None, h=DEFAULT_H):
    P = kp_params(overrides).check_dressed()
    seed, dressed = kp.seed_fields(P), kp.dressed_fields(P)
    names = ("x", "Y", "T")

    def on(fields):
        def values():
            x, Y, T = kp_contour_samples(P)
            return kp.kp_boundary_residual(x, Y, T, fields, P), (x, Y, T), names
        return values

    def off():
        x, Y, T = kp_contour_samples(P, product=2 * P.y0 ** 2)
        return kp.unchecked_boundary_expression(x, Y, T, dressed, P), (x, Y, T), names

    def generic_vs_specialized():
        x, Y, T = kp_contour_samples(P)
        t = P.y0 / T  # y0 = y t with y = y0 on the line, T = y0 / t
        g = kp.generic_boundary_residual(x, t, dressed, P)
        s = kp.kp_boundary_residual(x, Y, T, dressed, P)
        return g - t / (2 * P.alpha) * s, (x, Y, T), names

    psi, psi_hat = kp_wave_pair(P)

    def B(x, Y, T):
        t = P.y0 / T
        return kp.multiplier_B(x, t, kp.HYPERBOLIC.jacobian(P.y0, t), P)

    def def1(params):
        ps, ph = kp_wave_pair(params)
        return lambda: (definition1_residual(ps, ph, B, kp_contour_samples(params)),
                        kp_contour_samples(params), names)

    broken = P.replace(q=P.p * 1.1)
    checks = [
        _static("seed boundary constraint on Y T = y0^2", "(4.2)", on(seed), BOUNDARY_TOL_KP),
        _static("dressed boundary constraint on Y T = y0^2", "(4.2)", on(dressed), BOUNDARY_TOL_KP),
        _static("dressed constraint off contour (Y T = 2 y0^2) must fail", "(4.2)", off,
                WITNESS_MIN, kind="witness"),
        _static("generic constraint = t/(2 alpha) x specialized", "(3.5) vs (4.2)",
                generic_vs_specialized, EXACT_TOL),
        _static("integrable boundary: psi_hat = B psi on contour", "(4.6)", def1(P), EXACT_TOL),
        _static("psi_hat = B psi with q != p must fail", "(4.6)", def1(broken), WITNESS_MIN,
                kind="witness"),
    ]
    return CheckSuite("kp-boundary", checks, h)


KP_QUAD = glm.QuadratureSpec(n_nodes=20001)
KP_QUAD_FIXED = glm.QuadratureSpec(lower_cutoff=-60.0, n_nodes=20001)


def kp_numeric_kernel(params, x, Y, T, quad=KP_QUAD):
    psi, psi_hat = kp_wave_pair(params)
    return glm.glm_continuous_solve(bind_yt(psi, Y, T), bind_yt(psi_hat, Y, T), x, quad)


def suite_kp_glm(overrides=None, h=DEFAULT_H):
    P = kp_params(overrides).check_dressed()
    names = ("x", "Y", "T")
    psi, psi_hat = kp_wave_pair(P)

    def oracle():
        x, Y, T = kp_desk_samples()
        diffv = kp_numeric_kernel(P, x, Y, T) - kp.kp_kernel_closed(x, Y, T, P)
        return diffv, (x, Y, T), names

    def off_diagonal():
        x, Y, T = kp_desk_samples()
        z = x + _rng().uniform(0.1, 2.0, x.size)
        ps, ph = bind_yt(psi, Y, T), bind_yt(psi_hat, Y, T)
        diag = lambda xx: kp.kp_kernel_closed(xx, _pad(Y, xx), _pad(T, xx), P)
        kern = glm.rank1_kernel(ps, ph, diag)
        return glm.glm_residual(ps, ph, kern, (x, z), KP_QUAD)

    def closure():
        x, Y, T = kp_desk_samples()
        kx = diff(lambda xx: kp_numeric_kernel(P, xx, Y, T, KP_QUAD_FIXED), (x,), (1,), h,
                  extended=False)
        u0 = kp.kp_seed(x, Y, T, P)[0]
        u1 = kp.kp_dressed(x, Y, T, P)[0]
        return u0 + 2 * kx - u1, (x, Y, T), names

    checks = [
        _static("continuous oracle vs closed-form kernel", "(2.9) vs (4.7)", oracle, ORACLE_TOL),
        _static("off-diagonal GLM identity (z > x)", "(2.7)", off_diagonal, ORACLE_TOL),
        _static("dressing closure u0 + 2 d/dx K_numeric = u1", "(2.6) vs (4.9)", closure,
                CLOSURE_TOL_KP),
    ]
    return CheckSuite("kp-glm", checks, h)


def suite_kp_reduction(overrides=None, h=DEFAULT_H):
    P = kp_params({**(overrides or {}), "y0": 0.0}).check_dressed()

    def soliton():
        x, Y, T = KP_GRID.points()
        u1 = kp.kp_dressed(x, Y, T, P)[0]
        return u1 - kp.soliton_reference(x, T, P.p), (x, Y, T), KP_GRID.names

    u = lambda x, Y, T: kp.kp_dressed(x, Y, T, P)[0]
    checks = [
        _static("y0 = 0 dressed field is the KdV soliton", "(4.9) at y0=0", soliton, EXACT_TOL),
        Check("y0 = 0 dressed field is Y-independent", "(4.9) at y0=0",
              lambda hh: residual_scan(lambda x, Y, T: diff(u, (x, Y, T), (0, 1, 0), hh), KP_GRID,
                                       h=hh), 1e-10),
    ]
    return CheckSuite("kp-reduction", checks, h)


# ---------------------------------------------------------------------------
# Toda suites


def toda_contour_samples(example, params, count=N_CONTOUR):
    """``(X, Y, n)`` on the contour: ``count`` points in ``y`` times ``n in [-5, 5]``."""
    lo, hi = TODA_DESK[example][3]
    y = np.linspace(lo, hi, count)
    X, Y = toda.contour_points(example, y, params)
    n = np.arange(-5, 6)[:, None]
    X, Y, n = np.broadcast_arrays(X[None, :], Y[None, :], n)
    return X.ravel(), Y.ravel(), n.ravel(), y


def toda_desk_samples(example, count=N_SAMPLES):
    _, (xl, xh), (yl, yh), _ = TODA_DESK[example]
    r = _rng()
    return r.uniform(xl, xh, count), r.uniform(yl, yh, count), r.integers(-5, 6, count)


def toda_wave_pair(params):
    pw, qw = toda.one_soliton_waves(params)
    return (lambda X, Y, n: toda.toda_psi(X, Y, n, pw, params),
            lambda X, Y, n: toda.toda_psi_hat(X, Y, n, qw, params))


def toda_numeric_kernel(params, X, Y, n, trunc=glm.TruncationSpec()):
    psi, psi_hat = toda_wave_pair(params)
    return glm.glm_discrete_solve(lambda j: psi(X, Y, j), lambda j: psi_hat(X, Y, j), n, trunc)


def suite_toda_example(example, overrides=None, h=DEFAULT_H):
    P = toda_params(example, overrides)
    P.check_dressed()
    g = toda_grid(example)
    thr = threshold(f"toda-{example}", h)
    u1 = toda.dressed_field(example, P)
    u0 = toda.seed_field(example, P)
    names = ("X", "Y", "n")
    eq = "u_XY(n)=w(n-1)-w(n) (1.2a)"
    tag = {"ex1": "(7.14)", "ex1c1": "(7.19)", "ex2": "(7.27)", "ex3": "(7.14) c=-1"}[example]

    def regular():
        _, (xl, xh), (yl, yh), _ = TODA_DESK[example]
        scan = toda.scan_regularity(example, P, np.linspace(xl, xh, 41), np.linspace(yl, yh, 41),
                                    np.arange(-5, 6))
        val = 1 / scan.min_abs_one_plus_k if scan.regular else np.inf
        return np.array([val]), (np.array([0.0]),), ("scan",)

    def boundary(u, grad):
        def values():
            X, Y, n, _ = toda_contour_samples(example, P)
            return toda.toda_boundary_residual(example, X, Y, n, u, P, grad=grad), (X, Y, n), names
        return values

    seed_grad = lambda X, Y, n: toda.toda_seed_grad(example, X, Y, n, P)
    checks = [
        _static("pole-free scan (1/min|1+K|)", "1+K(n,n) != 0 (7.13)", regular, 1 / POLE_FLOOR),
        _fd(f"{example} dressed lattice equation", eq, lambda hh: toda_equation_residual(u1, hh), g,
            thr, 2),
        _fd(f"{example} seed lattice equation", eq, lambda hh: toda_equation_residual(u0, hh), g,
            thr, 2),
        _static(f"{example} dressed boundary constraint on contour", tag,
                boundary(u1, toda.dressed_grad(example, P, h)), BOUNDARY_TOL_TODA),
        _static(f"{example} seed boundary constraint on contour", tag, boundary(u0, seed_grad),
                EXACT_TOL),
    ]
    if example in ("ex1", "ex3"):
        def off():
            X, Y, n, _ = toda_contour_samples(example, P)
            r = toda.toda_boundary_residual(example, 1.3 * X, Y, n, u1, P,
                                            grad=toda.dressed_grad(example, P, h),
                                            require_contour=False)
            return r, (1.3 * X, Y, n), names
        checks.append(_static(f"{example} dressed constraint off contour must fail", tag, off,
                              WITNESS_MIN, kind="witness"))
    if example == "ex1":
        psi, psi_hat = toda_wave_pair(P)

        def def1():
            X, Y, n, y = toda_contour_samples(example, P)
            yy = np.broadcast_to(y[None, :], (11, y.size)).ravel()
            B = lambda X, Y, n: toda.ex1_multiplier(n, yy, P)
            return definition1_residual(psi, psi_hat, B, (X, Y, n)), (X, Y, n), names

        def def1_generic():
            X, Y, n, y = toda_contour_samples(example, P)
            yy = np.broadcast_to(y[None, :], (11, y.size)).ravel()
            _, _, jac = toda.toda_transform(example, P.x0 + 0 * yy, yy, P)
            B = toda.toda_multiplier_B(n, jac, toda.toda_seed(example, X, Y, n, P))
            return np.abs(B - toda.ex1_multiplier(n, yy, P)) / np.abs(B), (X, Y, n), names

        checks.append(_static("integrable boundary: psi_hat = B psi on x = x0", "(7.9)-(7.11)", def1,
                              EXACT_TOL))
        checks.append(_static("generic multiplier = ex1 multiplier on x = x0", "(6.4) vs (7.10)",
                              def1_generic, EXACT_TOL))
    if example == "ex3":
        def contrast():
            scan = toda.scan_regularity("ex3", P, np.linspace(-2, 2, 41), np.linspace(-2, 2, 41),
                                        np.arange(-5, 6))
            return np.array([scan.min_abs_one_plus_k]), (np.array([0.0]),), ("scan",)

        def pole():
            bad = toda.TodaParams(example="ex3", **EX3_POLE_PARAMS)
            scan = toda.scan_regularity("ex3", bad, np.linspace(-2, 2, 41), np.linspace(-2, 2, 41),
                                        np.arange(-5, 6))
            return np.array([float(len(scan.poles))]), (np.array([0.0]),), ("scan",)

        checks.append(_static("min |1+K(n,n)| for 0 < nu < 1", "(7.30)", contrast, REGULARITY_MIN,
                              kind="witness"))
        checks.append(_static("nu > 1 parameters: pole detected", "(7.30)", pole, 0.5,
                              kind="witness"))
    return CheckSuite(f"toda-{example}", checks, h)


def suite_toda_lax(overrides=None, h=DEFAULT_H):
    P = toda_params("ex1", overrides)
    thr = threshold("toda-lax", h)
    psi, psi_hat = toda_wave_pair(P)
    u0 = toda.seed_field("ex1", P)
    g = toda_grid("ex1", 9)
    plan = [(psi, "original", g), (psi_hat, "conjugate", g), (psi, "transformed", TODA_LAX_GRID_XY),
            (psi_hat, "transformed-conjugate", TODA_LAX_GRID_XY), (psi, "ex1", TODA_LAX_GRID_XY),
            (psi_hat, "ex1-conjugate", TODA_LAX_GRID_XY)]
    checks = []
    for f, which, gg in plan:
        label = ("psi" if f is psi else "psi_hat") + f" under {which} system"
        for i in range(2):
            checks.append(_fd(f"{label} line {i + 1}", f"{which} {TODA_LAX_SYSTEMS[which]}",
                              lambda hh, f=f, which=which, i=i: toda_lax_residuals(
                                  f, u0, which, hh, example="ex1", params=P)[i], gg, thr, 1))
    p = P.p
    vac_psi = lambda X, Y, n: np.asarray(p, dtype=np.complex128) ** np.asarray(n) * np.exp(p * X - Y / p)
    vac_u = lambda X, Y, n: 0 * (X + Y + n) + 0j
    for i in range(2):
        checks.append(_fd(f"vacuum wave under original system line {i + 1}", "original (5.0)",
                          lambda hh, i=i: toda_lax_residuals(vac_psi, vac_u, "original", hh)[i], g,
                          thr, 1))
    return CheckSuite("toda-lax", checks, h)


def suite_toda_glm(overrides=None, h=DEFAULT_H):
    names = ("X", "Y", "n")
    checks = []
    for example, tag in (("ex1", "(7.17)"), ("ex3", "(7.30)")):
        P = toda_params(example, overrides if example == "ex1" else None).check_dressed()

        def oracle(P=P, example=example):
            X, Y, n = toda_desk_samples(example)
            d = toda_numeric_kernel(P, X, Y, n) - toda.toda_kernel_closed(example, X, Y, n, P)
            return d, (X, Y, n), names

        def closure(P=P, example=example):
            X, Y, n = toda_desk_samples(example)
            u1 = toda.toda_seed(example, X, Y, n, P) - np.log(1 + toda_numeric_kernel(P, X, Y, n))
            return u1 - toda.toda_dressed(example, X, Y, n, P), (X, Y, n), names

        checks.append(_static(f"{example} discrete oracle vs closed-form kernel",
                              f"(5.10) vs {tag}", oracle, ORACLE_TOL))
        checks.append(_static(f"{example} dressing closure u0 - log(1 + K_numeric) = u1",
                              "(5.6) vs (7.13)", closure, CLOSURE_TOL_TODA))
    P = toda_params("ex1", overrides).check_dressed()
    psi, psi_hat = toda_wave_pair(P)

    def off_diagonal():
        X, Y, n = toda_desk_samples("ex1")
        m = n + _rng().integers(1, 4, n.size)
        ps = lambda j: psi(X, Y, j)
        ph = lambda j: psi_hat(X, Y, j)
        diag = lambda j: toda.toda_kernel_closed("ex1", X, Y, j, P)
        kern = glm.rank1_kernel(ps, ph, diag)
        return glm.glm_residual(ps, ph, kern, (n, m), glm.TruncationSpec())

    checks.append(_static("ex1 off-diagonal lattice GLM identity (m > n)", "(5.7)", off_diagonal,
                          ORACLE_TOL))
    return CheckSuite("toda-glm", checks, h)


# ---------------------------------------------------------------------------
# misprint regressions


def _negative(name, equation, good_factory, bad_factory, g, ratio=NEGATIVE_RATIO):
    def run(h):
        return (residual_scan(good_factory(h), g, h=h), residual_scan(bad_factory(h), g, h=h))
    return Check(name, equation, run, ratio, kind="negative")


def suite_negative(overrides=None, h=DEFAULT_H):
    P = kp_params(overrides)
    F = kp.seed_fields(P)
    pw = kp.psi_waves(P)
    good = lambda x, Y, T: kp.kp_psi(x, Y, T, pw, P, time_power=3)
    bad = lambda x, Y, T: kp.kp_psi(x, Y, T, pw, P, time_power=2)
    dressed_good = kp.dressed_fields(P.check_dressed())
    dressed_bad = kp.dressed_fields(P, y_divisor=4)
    T1 = toda_params("ex1")
    tpsi = toda_wave_pair(T1)[0]
    u0 = toda.seed_field("ex1", T1)
    checks = [
        _negative("psi exponent -4Tp^2 fails the transformed system", "(4.4) under (3.2)",
                  lambda hh: kp_lax_residuals(good, F, "transformed", P.alpha, hh)[1],
                  lambda hh: kp_lax_residuals(bad, F, "transformed", P.alpha, hh)[1], KP_NEG_GRID_YT),
        _negative("ex1 system with u(n-1) in place of w(n-1)", "(7.4)",
                  lambda hh: toda_lax_residuals(tpsi, u0, "ex1", hh, example="ex1", params=T1)[0],
                  lambda hh: toda_lax_residuals(tpsi, u0, "ex1", hh, example="ex1", params=T1,
                                                coupling="u")[0], TODA_LAX_GRID_XY),
        _negative("soliton phase with Y/(4T^2) fails the KP equation", "(4.9)",
                  lambda hh: kp_equation_residuals(dressed_good, P.alpha, hh)[0],
                  lambda hh: kp_equation_residuals(dressed_bad, P.alpha, hh)[0],
                  grid(Axis("x", -4, 4, 11), Axis("Y", -2, 2, 11), Axis("T", 0.5, 2, 11))),
    ]
    return CheckSuite("negative-typos", checks, h)


BUILDERS = {
    "kp-seed": suite_kp_seed,
    "kp-dressed": suite_kp_dressed,
    "kp-lax": suite_kp_lax,
    "kp-boundary": suite_kp_boundary,
    "kp-glm": suite_kp_glm,
    "kp-reduction": suite_kp_reduction,
    "toda-ex1": lambda o=None, h=DEFAULT_H: suite_toda_example("ex1", o, h),
    "toda-ex1c1": lambda o=None, h=DEFAULT_H: suite_toda_example("ex1c1", o, h),
    "toda-ex2": lambda o=None, h=DEFAULT_H: suite_toda_example("ex2", o, h),
    "toda-ex3": lambda o=None, h=DEFAULT_H: suite_toda_example("ex3", o, h),
    "toda-lax": suite_toda_lax,
    "toda-glm": suite_toda_glm,
    "negative-typos": suite_negative,
}


def build_suite(name, overrides=None, h=DEFAULT_H):
    """Suite by name; ``all`` concatenates every suite in catalogue order."""
    if name == "all":
        checks = []
        for n in SUITE_NAMES:
            checks += [_prefixed(n, c) for c in BUILDERS[n](None, h).checks]
        return CheckSuite("all", checks, h)
    if name not in BUILDERS:
        raise KeyError(name)
    return BUILDERS[name](overrides, h)


def _prefixed(suite, check):
    return replace(check, name=f"[{suite}] {check.name}")
