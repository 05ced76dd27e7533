# The four Toda lattice examples: contours, dressed fields and regularity.
#
# Run:  python3 demos/toda_examples.py

import numpy as np

from solibound import toda
from solibound.suites import TODA_DESK, toda_params

for ex in toda.EXAMPLES:
    P = toda_params(ex, None)
    _, (xl, xh), (yl, yh), (cl, ch) = TODA_DESK[ex]
    print("=" * 60)
    print(ex, P)

    # a few field values in the chart
    X = np.linspace(xl, xh, 4)
    u = toda.toda_dressed(ex, X, 0.5 * (yl + yh), 0, P)
    print("  u(X, Ymid, n=0):", np.round(np.real(u), 6))

    # contour samples and the boundary constraint on them
    y = np.linspace(cl, ch, 25)
    Xc, Yc = toda.contour_points(ex, y, P)
    n = np.arange(-5, 6)[:, None]
    Xc, Yc, n = np.broadcast_arrays(Xc[None, :], Yc[None, :], n)
    res = toda.toda_boundary_residual(ex, Xc, Yc, n, toda.dressed_field(ex, P), P,
                                      grad=toda.dressed_grad(ex, P))
    print("  max dressed boundary residual: %.2e" % np.max(np.abs(res)))

#-------------------------------------------------------------------------
# Regularity of example 3: 0 < nu < 1 is pole free, nu > 1 is not
#-------------------------------------------------------------------------

g = np.linspace(-2, 2, 41)
ns = np.arange(-5, 6)
for D in (4.0, 0.5):
    P = toda_params("ex3", {"D": D, "p": 1.0})
    scan = toda.scan_regularity("ex3", P, g, g, ns)
    print("ex3 D=%.1f nu=%.2f: min|1+K|=%.3g, regular=%s, %d pole brackets"
          % (D, P.nu.real, scan.min_abs_one_plus_k, scan.regular, len(scan.poles)))
