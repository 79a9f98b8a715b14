"""Dense symmetric eigensolver: Householder tridiagonalisation + implicit QL.

Desk-scale only (n up to a couple of thousand). The QL sweep applies each
Givens rotation to two rows of the transposed eigenvector matrix, so the
inner loop is one vectorised update per rotation.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import ConvergenceFailure

MAX_QL_ITERATIONS = 60


def tridiagonalize(a: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Reduce symmetric ``a`` to tridiagonal form ``T = Q^T a Q``.

    Returns ``(diag, offdiag, q)`` where ``offdiag[i] = T[i, i+1]``.
    """
    a = np.array(a, dtype=np.float64, copy=True)
    n = a.shape[0]
    q = np.eye(n)
    for k in range(n - 2):
        x = a[k + 1 :, k]
        tail = np.linalg.norm(x[1:])
        if tail == 0.0:
            continue
        alpha = -math.copysign(math.hypot(x[0], tail), x[0])
        v = x.copy()
        v[0] -= alpha
        v /= np.linalg.norm(v)
        sub = a[k + 1 :, k + 1 :]
        p = sub @ v
        w = p - (v @ p) * v
        sub -= 2.0 * (np.outer(v, w) + np.outer(w, v))
        a[k + 1 :, k] = 0.0
        a[k, k + 1 :] = 0.0
        a[k + 1, k] = a[k, k + 1] = alpha
        qs = q[:, k + 1 :]
        qs -= 2.0 * np.outer(qs @ v, v)
    return np.diag(a).copy(), np.diag(a, 1).copy(), q


def tridiagonal_ql(d: np.ndarray, e: np.ndarray, zt: np.ndarray) -> np.ndarray:
    """Implicit QL with Wilkinson-type shifts on a symmetric tridiagonal matrix.

    ``d`` (diagonal) and ``e`` (superdiagonal, length n-1) are overwritten;
    on exit ``d`` holds the eigenvalues, unsorted. ``zt`` holds basis
    vectors as rows and is rotated in place, so passing ``Q^T`` from
    :func:`tridiagonalize` yields eigenvectors of the original matrix as rows.
    """
    n = d.shape[0]
    e = np.append(e, 0.0)
    eps = np.finfo(np.float64).eps
    for l in range(n):
        iteration = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= eps * dd:
                    break
                m += 1
            if m == l:
                break
            iteration += 1
            if iteration > MAX_QL_ITERATIONS:
                raise ConvergenceFailure(
                    f"QL iteration did not converge for eigenvalue {l} "
                    f"(off-diagonal {abs(e[l]):.3e})",
                    residual=abs(e[l]),
                )
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            i = m - 1
            underflow = False
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                zi = zt[i].copy()
                zt[i] = c * zi - s * zt[i + 1]
                zt[i + 1] = s * zi + c * zt[i + 1]
                i -= 1
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return d


def eigh(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a real symmetric matrix.

    Returns ascending eigenvalues and a matrix whose columns are the
    corresponding orthonormal eigenvectors.
    """
    a = np.asarray(a, dtype=np.float64)
    n = a.shape[0]
    if n == 0:
        return np.zeros(0), np.zeros((0, 0))
    if n == 1:
        return a[0].copy(), np.ones((1, 1))
    d, e, q = tridiagonalize(a)
    zt = np.ascontiguousarray(q.T)
    vals = tridiagonal_ql(d, e, zt)
    order = np.argsort(vals, kind="stable")
    return vals[order], zt[order].T.copy()
