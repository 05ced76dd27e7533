# Solving the GLM equations numerically and comparing with the closed forms.
#
# Run:  python3 demos/glm_oracle.py

import numpy as np

from solibound import glm, kp, toda
from solibound.suites import (kp_desk_samples, kp_numeric_kernel, kp_params,
                              toda_desk_samples, toda_numeric_kernel, toda_params)

# continuous: quadrature of psi * psi_hat from -inf to x
P = kp_params(None)
x, Y, T = kp_desk_samples(10)
for n_nodes in (201, 2001, 20001):
    K = kp_numeric_kernel(P, x, Y, T, glm.QuadratureSpec(n_nodes=n_nodes))
    err = np.max(np.abs(K - kp.kp_kernel_closed(x, Y, T, P)))
    print("KP oracle, %5d nodes: max error %.2e" % (n_nodes, err))

# discrete: the lattice tail sum
for ex in ("ex1", "ex3"):
    Q = toda_params(ex, None)
    X, Yt, n = toda_desk_samples(ex, 10)
    K = toda_numeric_kernel(Q, X, Yt, n)
    err = np.max(np.abs(K - toda.toda_kernel_closed(ex, X, Yt, n, Q)))
    print("Toda %s oracle: max error %.2e" % (ex, err))
