"""Hot-loop kernels, compiled when available.

The extension ``diracbound._kernels`` is built by ``setup.py`` when Cython
and a C compiler are present. Set ``DIRACBOUND_PURE_PYTHON=1`` to force the
NumPy fallback.
"""

import os

import numpy as np

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py
_compiled = None

if not os.environ.get("DIRACBOUND_PURE_PYTHON"):
    try:
        from . import _kernels as _compiled
    except ImportError:  # pragma: no cover - depends on build
        _compiled = None
    else:
        _impl = _compiled
        BACKEND = "cython"


def rk4_shoot(q, w, h, lam, f0, g0, backend=None):
    """Integrate the reduced Dirac system for a batch of spectral parameters.

    Returns an array of shape ``(2, len(lam))`` holding ``(F, G)`` at the
    end of the mesh.
    """
    impl = _impl
    if backend == "python":
        impl = _kernels_py
    elif backend == "cython":
        if _compiled is None:
            raise RuntimeError("compiled kernels are not built")
        impl = _compiled
    lam = np.ascontiguousarray(np.atleast_1d(lam), dtype=np.complex128)
    f0 = np.ascontiguousarray(np.broadcast_to(f0, lam.shape), dtype=np.complex128)
    g0 = np.ascontiguousarray(np.broadcast_to(g0, lam.shape), dtype=np.complex128)
    q = np.ascontiguousarray(q, dtype=np.float64)
    w = np.ascontiguousarray(w, dtype=np.float64)
    return impl.rk4_shoot(q, w, float(h), lam, f0, g0)
