"""Pure-NumPy fallback for :mod:`diracbound._kernels`."""

import numpy as np


def rk4_shoot(q, w, h, lam, f0, g0):
    q = np.asarray(q, dtype=float)
    w = np.asarray(w, dtype=float)
    il = 1j * np.asarray(lam, dtype=complex)
    f = np.array(f0, dtype=complex)
    g = np.array(g0, dtype=complex)
    nsteps = (q.shape[0] - 1) // 2
    hh = 0.5 * h

    def rhs(i, f, g):
        return q[i] * f - il * g, -(w[i] + q[i]) * g - il * f

    for k in range(nsteps):
        k1f, k1g = rhs(2 * k, f, g)
        k2f, k2g = rhs(2 * k + 1, f + hh * k1f, g + hh * k1g)
        k3f, k3g = rhs(2 * k + 1, f + hh * k2f, g + hh * k2g)
        k4f, k4g = rhs(2 * k + 2, f + h * k3f, g + h * k3g)
        f = f + h / 6.0 * (k1f + 2 * k2f + 2 * k3f + k4f)
        g = g + h / 6.0 * (k1g + 2 * k2g + 2 * k3g + k4g)
    return np.vstack([f, g])
