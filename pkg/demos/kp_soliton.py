# A one-soliton KP solution that respects a boundary on the hyperbola Y*T = y0^2.
#
# Run:  python3 demos/kp_soliton.py

import numpy as np

from solibound import kp
from solibound.suites import kp_params

#-------------------------------------------------------------------------
# Parameters and the dressed field
#-------------------------------------------------------------------------

P = kp_params(None)          # alpha = 1, y0 = 1, p = 1/2, d*l = 1
print(P)

x = np.linspace(-4, 4, 9)
u, w, tau = kp.kp_dressed(x, 0.5, 1.0, P)
print("u along x at Y=0.5, T=1:")
print(np.round(u.real, 6))

#-------------------------------------------------------------------------
# Boundary: t -> (Y, T) = (y0 t, y0 / t)
#-------------------------------------------------------------------------

t = np.linspace(0.5, 2.0, 7)
Y, T = kp.HYPERBOLIC.forward(P.y0, t)
print("Y*T on the contour:", Y * T)

fields = kp.dressed_fields(P)
X, TT = np.meshgrid(x, T)
YY = np.broadcast_to(Y[:, None], X.shape)
res = kp.kp_boundary_residual(X, YY, TT, fields, P)
print("max boundary residual on contour: %.2e" % np.max(np.abs(res)))

# away from the contour the same expression is far from zero
off = kp.unchecked_boundary_expression(X, 2 * YY, TT, fields, P)
print("max of the same expression at Y*T = 2: %.2e" % np.max(np.abs(off)))

#-------------------------------------------------------------------------
# y0 = 0 collapses to a KdV soliton
#-------------------------------------------------------------------------

P0 = P.replace(y0=0.0)
u0, _, _ = kp.kp_dressed(x, 0.0, 1.0, P0)
ref = kp.soliton_reference(x, 1.0, P0.p)
print("KdV reduction error: %.2e" % np.max(np.abs(u0 - ref)))
