"""Small dense symmetric-matrix kernels used by the curvature and flow code.

The eigensolver is the cyclic Jacobi rotation method. It is exact on
diagonal input (no rotation is ever applied), which keeps the diagonal
metric fast path free of rounding noise.
"""

from __future__ import annotations

import numpy as np

_MAX_SWEEPS = 64


def jacobi_eigh(a, tol: float = 1e-15) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a real symmetric matrix by cyclic Jacobi sweeps.

    Returns ``(w, v)`` with ``a @ v == v @ diag(w)`` and ``v`` orthogonal.
    Eigenvalues are returned in the order the rotations leave them (not
    sorted); callers that need an ordering sort themselves.
    """
    a = np.array(a, dtype=float)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    a = 0.5 * (a + a.T)
    v = np.eye(n)
    scale = np.abs(a).max() if n else 0.0
    if scale == 0.0:
        return np.diag(a).copy(), v

    for _ in range(_MAX_SWEEPS):
        off = np.sqrt(np.sum(np.tril(a, -1) ** 2))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                app, aqq = a[p, p], a[q, q]
                theta = (aqq - app) / (2.0 * apq)
                t = np.sign(theta) / (abs(theta) + np.hypot(theta, 1.0)) if theta else 1.0
                c = 1.0 / np.hypot(t, 1.0)
                s = t * c
                rp, rq = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * rp - s * rq
                a[q, :] = s * rp + c * rq
                cp, cq = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * cp - s * cq
                a[:, q] = s * cp + c * cq
                a[p, q] = a[q, p] = 0.0
                vp, vq = v[:, p].copy(), v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    else:
        raise np.linalg.LinAlgError("Jacobi iteration did not converge")
    return np.diag(a).copy(), v


def is_diagonal(a, atol: float = 0.0) -> bool:
    a = np.asarray(a)
    off = a - np.diag(np.diag(a))
    return bool(np.all(np.abs(off) <= atol))


def sym_function(a, f) -> np.ndarray:
    """Apply a scalar function to a symmetric matrix through its spectrum."""
    a = np.asarray(a, dtype=float)
    if is_diagonal(a):
        return np.diag(f(np.diag(a)))
    w, v = jacobi_eigh(a)
    return (v * f(w)) @ v.T


def sym_sqrt(a) -> np.ndarray:
    return sym_function(a, np.sqrt)


def sym_inv_sqrt(a) -> np.ndarray:
    return sym_function(a, lambda w: 1.0 / np.sqrt(w))


def sym_expm(a) -> np.ndarray:
    return sym_function(a, np.exp)
