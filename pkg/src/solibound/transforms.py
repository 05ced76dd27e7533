"""Jacobians of variable transforms.

Both models rewrite their Lax systems in new variables.  For a forward map
``(r, s) -> (P, Q)`` the coefficients entering the transformed systems are the
partials of the *inverse* map::

    f11 = r_P   f12 = s_P   f21 = r_Q   f22 = s_Q   delta = f11 f22 - f12 f21

(KP: r, s, P, Q = y, t, Y, T.  Toda: r, s, P, Q = x, y, X, Y.)
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError

_DEGENERACY_TOL = 1e-300


@dataclass(frozen=True)
class Jacobian:
    f11: np.ndarray
    f12: np.ndarray
    f21: np.ndarray
    f22: np.ndarray
    delta: np.ndarray

    def __post_init__(self):
        expected = self.f11 * self.f22 - self.f12 * self.f21
        scale = np.maximum(np.abs(self.f11 * self.f22) + np.abs(self.f12 * self.f21), 1e-300)
        if np.any(np.abs(np.asarray(self.delta) - expected) > 1e-12 * scale):
            raise ValueError("delta is inconsistent with f11 f22 - f12 f21")
        for name in ("f11", "f21", "delta"):
            if np.any(np.abs(getattr(self, name)) <= _DEGENERACY_TOL):
                raise DomainError(f"{name} vanishes", code="degenerate-transform")

    @classmethod
    def from_entries(cls, f11, f12, f21, f22):
        return cls(f11, f12, f21, f22, f11 * f22 - f12 * f21)

    @classmethod
    def from_forward(cls, P_r, P_s, Q_r, Q_s):
        """Invert the forward Jacobian ``d(P, Q)/d(r, s)``."""
        det = P_r * Q_s - P_s * Q_r
        if np.any(np.abs(det) <= _DEGENERACY_TOL):
            raise DomainError("forward Jacobian is singular", code="degenerate-transform")
        r_P = Q_s / det
        r_Q = -P_s / det
        s_P = -Q_r / det
        s_Q = P_r / det
        return cls.from_entries(r_P, s_P, r_Q, s_Q)

    @property
    def ratio(self):
        """``f21 / f11``, the combination driving the boundary multipliers."""
        return self.f21 / self.f11
