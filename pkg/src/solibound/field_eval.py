"""Complex field sampling and 4th-order finite differences.

Fields are plain callables ``f(*coords, *args)`` that accept numpy arrays and
broadcast.  Continuous coordinates come first; trailing ``args`` (the Toda
lattice index ``n``, for instance) are passed through untouched.

Stencil samples are evaluated in extended precision (``np.longdouble``) by
default.  Third derivatives at ``h = 1e-3`` in double precision have a
rounding floor of ~1e-7, which would swamp the O(h^4) truncation error that
the residual checks are meant to expose.  Field code must therefore avoid
forcing ``float64`` on its inputs.
"""

from __future__ import annotations

import itertools
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, NonFiniteError

DEFAULT_H = 1e-3
STENCIL_ORDER = 4
MAX_REPORTED_LOCATIONS = 20


def as_complex(a):
    """Promote to the complex dtype matching ``a``'s precision."""
    a = np.asarray(a)
    if np.iscomplexobj(a):
        return a
    if a.dtype == np.longdouble:
        return a.astype(np.clongdouble)
    return a.astype(np.complex128)


def check_finite(value, coords=(), what="field"):
    """Raise :class:`NonFiniteError` listing where ``value`` is NaN/Inf."""
    value = np.asarray(value)
    bad = ~np.isfinite(value)
    if np.any(bad):
        raise NonFiniteError(f"{what} produced non-finite values",
                             locations=_locations(bad, coords))
    return value


def _locations(mask, coords):
    idx = np.argwhere(np.atleast_1d(mask))[:MAX_REPORTED_LOCATIONS]
    if not coords:
        return [tuple(int(i) for i in row) for row in idx]
    bcoords = np.broadcast_arrays(*[np.asarray(c) for c in coords], np.atleast_1d(mask))[:-1]
    return [tuple(float(np.real(c[tuple(row)])) for c in bcoords) for row in idx]


@lru_cache(maxsize=None)
def central_weights(deriv: int, accuracy: int = STENCIL_ORDER):
    """Exact central-difference weights for ``d^deriv/dx^deriv``.

    Returns ``(offsets, weights)`` with ``weights`` as :class:`Fraction`.
    """
    if deriv < 0:
        raise ValueError("derivative order must be non-negative")
    if deriv == 0:
        return (0,), (Fraction(1),)
    half = (deriv + 1) // 2 - 1 + accuracy // 2
    offsets = tuple(range(-half, half + 1))
    n = len(offsets)
    # Solve sum_k w_k * k^j = j! * delta_{j,deriv} for j < n (exact arithmetic).
    rows = [[Fraction(k) ** j for k in offsets] for j in range(n)]
    rhs = [Fraction(0)] * n
    fact = 1
    for j in range(2, deriv + 1):
        fact *= j
    rhs[deriv] = Fraction(fact)
    weights = _solve_exact(rows, rhs)
    return offsets, tuple(weights)


def _solve_exact(a, b):
    n = len(b)
    m = [row[:] + [b[i]] for i, row in enumerate(a)]
    for col in range(n):
        piv = next(r for r in range(col, n) if m[r][col] != 0)
        m[col], m[piv] = m[piv], m[col]
        for r in range(n):
            if r != col and m[r][col] != 0:
                f = m[r][col] / m[col][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return [m[i][n] / m[i][i] for i in range(n)]


def diff(field: Callable, point: Sequence, orders: Sequence[int], h=DEFAULT_H, *,
         args: tuple = (), exclude: Callable | None = None, extended: bool = True):
    """Partial derivative of ``field`` at ``point`` by central differences.

    ``orders`` gives the derivative order along each continuous axis (at most
    3 per axis); mixed partials are tensor products of the 1-D stencils.
    ``h`` is a scalar or one step per axis.  ``exclude(*coords)`` marks
    forbidden coordinates; a stencil touching one raises
    ``stencil-out-of-domain``.

    The result has O(h^4) truncation error and is exact (to rounding) on
    polynomials of degree <= 4 in each differentiated variable.
    """
    if len(orders) != len(point):
        raise ValueError("need one derivative order per coordinate")
    if any(o < 0 or o > 3 for o in orders):
        raise ValueError("derivative order per axis must be in 0..3")
    steps = np.broadcast_to(np.asarray(h, dtype=float), (len(point),))
    if np.any(steps <= 0):
        raise ValueError("step size must be positive")

    real = np.longdouble if extended else np.float64
    base = [np.asarray(c).astype(real) if not np.iscomplexobj(c) else np.asarray(c)
            for c in point]
    hs = [real(s) for s in steps]
    stencils = [central_weights(o) for o in orders]

    total = None
    for combo in itertools.product(*[range(len(s[0])) for s in stencils]):
        w = Fraction(1)
        for ax, i in enumerate(combo):
            w *= stencils[ax][1][i]
        if w == 0:
            continue
        coords = [c + stencils[ax][0][i] * hs[ax] if orders[ax] else c
                  for ax, (c, i) in enumerate(zip(base, combo))]
        if exclude is not None:
            bad = np.asarray(exclude(*coords), dtype=bool)
            if np.any(bad):
                raise DomainError("finite-difference stencil touches an excluded region",
                                  code="stencil-out-of-domain",
                                  locations=_locations(bad, base))
        val = as_complex(field(*coords, *args))
        check_finite(val, base, what="stencil sample")
        term = (real(w.numerator) / real(w.denominator)) * val
        total = term if total is None else total + term
    scale = real(1)
    for o, s in zip(orders, hs):
        scale *= s ** o
    return total / scale


# ---------------------------------------------------------------------------
# grids and residual reports


@dataclass(frozen=True)
class Axis:
    name: str
    lo: float
    hi: float
    count: int
    integer: bool = False

    def __post_init__(self):
        if self.count < 1:
            raise ValueError(f"axis {self.name!r}: need at least 1 point")
        if self.count == 1 and self.lo != self.hi:
            raise ValueError(f"axis {self.name!r}: a single point needs min == max")
        if self.count > 1 and not self.lo < self.hi:
            raise ValueError(f"axis {self.name!r}: need min < max")
        if self.integer and (int(self.lo) != self.lo or int(self.hi) != self.hi
                             or self.count != int(self.hi - self.lo) + 1):
            raise ValueError(f"integer axis {self.name!r} must list every integer in [min, max]")

    def values(self):
        if self.integer:
            return np.arange(int(self.lo), int(self.hi) + 1)
        return np.linspace(self.lo, self.hi, self.count)


@dataclass(frozen=True)
class GridSpec:
    """Tensor-product grid with optional exclusion predicates.

    Each predicate receives the coordinate arrays (axis order) and returns a
    boolean mask of points to drop.
    """

    axes: tuple[Axis, ...]
    exclude: tuple[Callable, ...] = ()

    def __post_init__(self):
        if not self.axes:
            raise ValueError("grid needs at least one axis")

    @property
    def names(self):
        return tuple(a.name for a in self.axes)

    def points(self):
        mesh = np.meshgrid(*[a.values() for a in self.axes], indexing="ij")
        flat = [m.ravel() for m in mesh]
        keep = np.ones(flat[0].shape, dtype=bool)
        for pred in self.exclude:
            keep &= ~np.asarray(pred(*flat), dtype=bool)
        return tuple(f[keep] for f in flat)


def grid(*axes, exclude=()):
    """Shorthand: ``grid(("x", -4, 4, 21), ("T", .5, 2, 21))``."""
    built = tuple(a if isinstance(a, Axis) else Axis(*a) for a in axes)
    if callable(exclude):
        exclude = (exclude,)
    return GridSpec(built, tuple(exclude))


@dataclass
class ResidualReport:
    max_abs: float
    rms: float
    argmax_point: tuple
    h: float | None = None
    stencil_order: int = STENCIL_ORDER
    n_points: int = 0
    names: tuple = field(default=(), repr=False)

    def as_dict(self):
        return {
            "max_abs": self.max_abs,
            "rms": self.rms,
            "argmax_point": dict(zip(self.names, self.argmax_point)) if self.names
            else list(self.argmax_point),
            "h": self.h,
            "stencil_order": self.stencil_order,
            "n_points": self.n_points,
        }


def summarize(values, coords, *, h=None, names=()):
    """Build a :class:`ResidualReport` from residual samples at ``coords``."""
    values = np.asarray(values)
    coords = np.broadcast_arrays(*[np.asarray(c) for c in coords], values)[:-1]
    check_finite(values, coords, what="residual")
    if values.size == 0:
        raise DomainError("no points to evaluate", code="empty-grid")
    mag = np.abs(values.astype(np.complex128)).ravel()
    i = int(np.argmax(mag))
    point = tuple(float(np.real(np.ravel(c)[i])) if not np.issubdtype(np.asarray(c).dtype, np.integer)
                  else int(np.ravel(c)[i]) for c in coords)
    return ResidualReport(
        max_abs=float(mag[i]),
        rms=float(np.sqrt(np.mean(mag ** 2))),
        argmax_point=point,
        h=h,
        n_points=int(mag.size),
        names=tuple(names),
    )


def worker_count():
    """Thread cap from ``SOLIBOUND_THREADS`` (default 1)."""
    try:
        return max(1, int(os.environ.get("SOLIBOUND_THREADS", "1")))
    except ValueError:
        return 1


def residual_scan(residual_field: Callable, grid: GridSpec, *, h=None, workers=None):
    """Evaluate ``residual_field`` on every kept grid point and summarize.

    The field is called once per chunk with flat coordinate arrays; chunks
    may run on a thread pool, but results are reassembled in grid order so
    the report does not depend on scheduling.
    """
    pts = grid.points()
    if pts[0].size == 0:
        raise DomainError("every grid point is excluded", code="empty-grid")
    workers = worker_count() if workers is None else max(1, workers)
    if workers == 1 or pts[0].size < 2 * workers:
        vals = np.broadcast_to(np.asarray(residual_field(*pts)), pts[0].shape)
    else:
        chunks = np.array_split(np.arange(pts[0].size), workers)
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(lambda ix: np.broadcast_to(
                np.asarray(residual_field(*[p[ix] for p in pts])), ix.shape), chunks))
        vals = np.concatenate(parts)
    return summarize(vals, pts, h=h, names=grid.names)
