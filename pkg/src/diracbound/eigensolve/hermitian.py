"""Hermitian eigensolvers: LAPACK for small matrices, Lanczos above.

Both paths return the ``k`` eigenpairs of smallest modulus, ordered by
``(|lambda|, Re, Im)``. Operators carry a diagonal quadrature weight ``W``;
the solve runs on the Euclidean form ``W^(1/2) A W^(-1/2)`` and vectors are
mapped back before residuals are measured against the original matrix.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

from ..errors import ConvergenceError, ParameterError, SymmetryError
from ..operators.types import HERMITIAN, OperatorMatrix

DENSE_LIMIT = 4096


@dataclass
class EigenResult:
    eigenvalues: np.ndarray
    vectors: Optional[list] = None
    residuals: np.ndarray = field(default_factory=lambda: np.zeros(0))
    method: str = ""
    info: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.eigenvalues)

    @property
    def smallest(self) -> complex:
        return self.eigenvalues[0]


def spectral_order(values) -> np.ndarray:
    v = np.asarray(values, dtype=complex)
    return np.lexsort((np.round(v.imag, 12), np.round(v.real, 12), np.round(np.abs(v), 12)))


def cluster_counts(values, rel_gap: float = 1e-6) -> list[tuple[float, int]]:
    """Group sorted moduli into clusters closer than ``rel_gap`` times the spectral scale."""
    mags = np.sort(np.abs(np.asarray(values)))
    if mags.size == 0:
        return []
    gap = rel_gap * max(mags[-1], 1.0)
    out = [[mags[0], 1]]
    for m in mags[1:]:
        if m - out[-1][0] <= gap:
            out[-1][1] += 1
        else:
            out.append([m, 1])
    return [(float(a), int(b)) for a, b in out]


def _check_hermitian(A: np.ndarray):
    scale = np.abs(A).max() if A.size else 0.0
    if scale and np.abs(A - A.conj().T).max() > 1e-12 * scale:
        raise SymmetryError("operator is not Hermitian in its quadrature inner product")


def _residuals(op: OperatorMatrix, lam, vecs) -> np.ndarray:
    w = op.weights if op.weights is not None else np.ones(op.size)
    out = []
    for l, v in zip(lam, vecs):
        r = op.matvec(v) - l * v
        out.append(np.sqrt(np.sum(w * np.abs(r) ** 2) / np.sum(w * np.abs(v) ** 2)))
    return np.array(out)


def _sym_operator(op: OperatorMatrix):
    """Euclidean form of ``op`` as a dense array or a sparse-friendly matvec."""
    w = op.weights if op.weights is not None else np.ones(op.size)
    r = np.sqrt(w)
    if sp.issparse(op.entries):
        S = sp.diags(r) @ op.entries @ sp.diags(1.0 / r)
        return S.tocsr(), r
    return op.symmetric(), r


def hermitian_eigs(op: OperatorMatrix, k: int, tol: float = 1e-10,
                   method: str | None = None, seed: int = 0) -> EigenResult:
    """``k`` smallest-modulus eigenpairs of a Hermitian operator.

    ``method`` is ``"dense"``, ``"lanczos"``, ``"blocks"`` or ``None`` (pick by
    size; operators that carry exact 2x2 blocks are solved block by block).
    """
    if op.symmetryFlag != HERMITIAN:
        raise SymmetryError(f"operator is flagged {op.symmetryFlag}")
    n = op.size
    if not 1 <= k <= n:
        raise ParameterError(f"k must be in [1, {n}], got {k}")
    if method is None:
        if "blocks" in op.meta and n > DENSE_LIMIT:
            method = "blocks"
        else:
            method = "dense" if n <= DENSE_LIMIT else "lanczos"
    S, r = _sym_operator(op)
    if method == "blocks":
        lam, U = _block_eigs(op.meta["blocks"], k)
    elif method == "dense":
        Sd = S.toarray() if sp.issparse(S) else S
        _check_hermitian(Sd)
        lam, U = sla.eigh(Sd)
        order = spectral_order(lam)[:k]
        lam, U = lam[order], U[:, order]
    elif method == "lanczos":
        if not sp.issparse(S):
            _check_hermitian(S)
        lam, U = lanczos_smallest_modulus(lambda v: S @ v, n, k, tol=tol, seed=seed)
    else:
        raise ParameterError(f"unknown method {method!r}")
    vecs = [U[:, i] / r for i in range(U.shape[1])]
    res = _residuals(op, lam, vecs)
    scale = max(1.0, float(np.max(np.abs(lam))) if len(lam) else 1.0)
    bad = res > max(tol, 1e-12) * scale
    if np.any(bad):
        raise ConvergenceError(f"{int(bad.sum())} eigenpairs above tolerance {tol}",
                               float(res.max()))
    return EigenResult(np.asarray(lam, dtype=complex), [op.field(v) for v in vecs], res, method)


def _block_eigs(blocks, k):
    blocks = np.asarray(blocks)
    nb, m, _ = blocks.shape
    lam, V = np.linalg.eigh(blocks)
    flat = lam.ravel()
    order = spectral_order(flat)[:k]
    U = np.zeros((nb * m, len(order)), dtype=complex)
    for col, idx in enumerate(order):
        b, j = divmod(int(idx), m)
        U[b * m:(b + 1) * m, col] = V[b, :, j]
    return flat[order], U


# -- Lanczos -------------------------------------------------------------------

def lanczos(matvec: Callable, n: int, k: int, which: str = "SA", tol: float = 1e-10,
            krylov: int | None = None, max_restarts: int = 500, seed: int = 0):
    """Extremal eigenpairs of a Hermitian map by thick-restart Lanczos.

    Each new Krylov vector is reorthogonalized twice against the whole basis.
    At a restart the best ``p`` Ritz vectors are kept and the basis is
    continued from the common residual direction, so no Krylov information
    about the wanted pairs is discarded.

    Parameters
    ----------
    which : {"SA", "LA"}
        Smallest or largest algebraic eigenvalues.
    tol : float
        Residual threshold relative to ``max(1, |theta|_max)``.

    Returns
    -------
    values, vectors
        Ritz values in the requested order and orthonormal Ritz vectors.
    """
    if which not in ("SA", "LA"):
        raise ParameterError("which must be 'SA' or 'LA'")
    rng = np.random.default_rng(seed)
    m = min(n, krylov or max(2 * k + 30, 80))
    keep = min(m - 1, k + (m - k) // 2)

    def orth(w, V):
        for _ in range(2):
            w = w - V @ (V.conj().T @ w)
        return w

    v = rng.normal(size=n) + 1j * rng.normal(size=n)
    V = (v / np.linalg.norm(v))[:, None]
    AV = np.zeros((n, 0), dtype=complex)
    best = np.inf
    for _ in range(max_restarts):
        while True:
            w = matvec(V[:, -1])
            AV = np.concatenate([AV, w[:, None]], axis=1)
            if V.shape[1] == m:
                break
            w = orth(w, V)
            nw = np.linalg.norm(w)
            if nw < 1e-12 * max(1.0, np.linalg.norm(AV[:, -1])):
                # invariant subspace reached: continue with a fresh direction
                w = orth(rng.normal(size=n) + 1j * rng.normal(size=n), V)
                nw = np.linalg.norm(w)
            V = np.concatenate([V, (w / nw)[:, None]], axis=1)
        H = V.conj().T @ AV
        theta, S = np.linalg.eigh(0.5 * (H + H.conj().T))
        if which == "LA":
            theta, S = theta[::-1], S[:, ::-1]
        X, AX = V @ S, AV @ S
        R = AX - X * theta[None, :]
        resid = np.linalg.norm(R, axis=0)
        scale = max(1.0, float(np.abs(theta).max()))
        best = min(best, float(resid[:k].max()))
        if np.all(resid[:k] <= tol * scale) or m == n:
            return theta[:k], X[:, :k]
        j = int(np.argmax(resid[:k] > tol * scale))
        r = orth(R[:, j], X[:, :keep])
        V = np.concatenate([X[:, :keep], (r / np.linalg.norm(r))[:, None]], axis=1)
        AV = AX[:, :keep]
    raise ConvergenceError(f"Lanczos did not converge {k} pairs", best)


def lanczos_smallest_modulus(matvec: Callable, n: int, k: int, tol: float = 1e-10, seed: int = 0):
    """Smallest-``|lambda|`` pairs: Lanczos on ``A^2`` then Rayleigh-Ritz with ``A``.

    The ``A^2`` eigenspaces pair ``+lambda`` with ``-lambda``. The last
    cluster returned by Lanczos may be cut short, and a partial cluster is not
    invariant under ``A``, so it is discarded and more pairs are requested
    until ``k`` pairs from complete clusters are available.
    """
    kk = min(n, k + 4)
    sq_tol = max(tol * 1e-2, 1e-14)
    while True:
        theta, X = lanczos(lambda v: matvec(matvec(v)), n, kk, "SA", tol=sq_tol, seed=seed)
        if kk == n:
            complete = kk
        else:
            gap = 1e-8 * max(1.0, float(abs(theta).max()))
            last = theta[-1]
            complete = int(np.sum(theta < last - gap))
        if complete >= k:
            break
        kk = min(n, 2 * kk)
    Q, _ = np.linalg.qr(X[:, :complete])
    AQ = np.stack([matvec(Q[:, j]) for j in range(Q.shape[1])], axis=1)
    H = Q.conj().T @ AQ
    lam, S = np.linalg.eigh(0.5 * (H + H.conj().T))
    order = spectral_order(lam)[:k]
    return lam[order], Q @ S[:, order]
