"""Self-contained numerical kernels: quadrature, root finding, symmetric
eigensolvers and a small-matrix SVD.

These are deliberately written from scratch (no LAPACK calls) so that the
rest of the package can cross-check them against library routines in the
test suite rather than depending on them.
"""
from __future__ import annotations

import numpy as np

__all__ = [
    "adaptive_simpson",
    "bisect",
    "jacobi_eigh",
    "lanczos_topk",
    "topk_symmetric",
    "svd_small",
]


def _simpson(f, a, fa, b, fb):
    m = 0.5 * (a + b)
    fm = f(m)
    return m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb)


def _simpson_rec(f, a, fa, b, fb, m, fm, whole, tol, depth):
    lm, flm, left = _simpson(f, a, fa, m, fm)
    rm, frm, right = _simpson(f, m, fm, b, fb)
    err = (left + right - whole) / 15.0
    if abs(err) <= tol or depth <= 0:
        # Richardson extrapolation of the two half-interval estimates
        return left + right + err, abs(err)
    lv, le = _simpson_rec(f, a, fa, m, fm, lm, flm, left, tol / 2.0, depth - 1)
    rv, re = _simpson_rec(f, m, fm, b, fb, rm, frm, right, tol / 2.0, depth - 1)
    return lv + rv, le + re


def adaptive_simpson(f, a, b, tol=1e-10, max_depth=48):
    """Integrate f on [a, b] by adaptive Simpson with a Richardson check.

    Returns (value, error_estimate).  The integrand is assumed smooth on the
    open interval; split at known kinks before calling.
    """
    if a == b:
        return 0.0, 0.0
    fa, fb = f(a), f(b)
    m, fm, whole = _simpson(f, a, fa, b, fb)
    return _simpson_rec(f, a, fa, b, fb, m, fm, whole, tol, max_depth)


def bisect(f, lo, hi, xtol=1e-13, max_iter=200):
    """Root of f on [lo, hi] by bisection; f(lo) and f(hi) must bracket."""
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0:
        raise ValueError("bisect: interval does not bracket a root")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0 or (hi - lo) * 0.5 < xtol:
            return mid
        if flo * fm < 0:
            hi = mid
        else:
            lo, flo = mid, fm
    return 0.5 * (lo + hi)


def jacobi_eigh(A, tol=1e-13, max_sweeps=60):
    """Cyclic Jacobi eigendecomposition of a symmetric matrix.

    Returns (eigenvalues, eigenvectors) sorted in descending order, with
    eigenvectors in columns.  Cost is O(m^3) per sweep; intended for the
    small, dense symmetric matrices this package produces (Gram factors,
    cross-covariances, Lanczos tridiagonals).
    """
    A = np.array(A, dtype=float)
    m = A.shape[0]
    if A.shape != (m, m):
        raise ValueError("jacobi_eigh: square matrix required")
    if not np.allclose(A, A.T, atol=1e-12 * (1.0 + np.abs(A).max())):
        raise ValueError("jacobi_eigh: symmetric matrix required")
    A = 0.5 * (A + A.T)
    V = np.eye(m)
    if m == 1:
        return A.diagonal().copy(), V
    scale = np.abs(A).max() + 1.0
    for _ in range(max_sweeps):
        off = np.sqrt(np.sum(np.tril(A, -1) ** 2))
        if off <= tol * scale:
            break
        for p in range(m - 1):
            for q in range(p + 1, m):
                apq = A[p, q]
                if abs(apq) <= 1e-300:
                    continue
                theta = 0.5 * (A[q, q] - A[p, p]) / apq
                t = np.sign(theta) / (abs(theta) + np.hypot(1.0, theta))
                if theta == 0.0:
                    t = 1.0
                c = 1.0 / np.hypot(1.0, t)
                s = t * c
                rp, rq = A[p, :].copy(), A[q, :].copy()
                A[p, :] = c * rp - s * rq
                A[q, :] = s * rp + c * rq
                cp, cq = A[:, p].copy(), A[:, q].copy()
                A[:, p] = c * cp - s * cq
                A[:, q] = s * cp + c * cq
                vp, vq = V[:, p].copy(), V[:, q].copy()
                V[:, p] = c * vp - s * vq
                V[:, q] = s * vp + c * vq
    w = A.diagonal().copy()
    order = np.argsort(-w)
    return w[order], V[:, order]


def lanczos_topk(matvec, m, k, seed=0, n_iter=None, tol=1e-12):
    """Top-k eigenpairs of a symmetric PSD operator by Lanczos iteration.

    `matvec` maps a length-m vector to A @ v.  Full reorthogonalization is
    used, which is affordable at the Krylov sizes we need (tens).
    Returns (eigenvalues desc, eigenvectors in columns).
    """
    if n_iter is None:
        n_iter = min(m, max(2 * k + 12, 24))
    n_iter = min(n_iter, m)
    rng = np.random.default_rng(seed)
    Q = np.zeros((m, n_iter))
    alpha = np.zeros(n_iter)
    beta = np.zeros(n_iter)
    q = rng.standard_normal(m)
    q /= np.linalg.norm(q)
    used = n_iter
    for j in range(n_iter):
        Q[:, j] = q
        w = matvec(q)
        alpha[j] = q @ w
        w -= alpha[j] * q
        if j > 0:
            w -= beta[j - 1] * Q[:, j - 1]
        # full reorthogonalization against all previous Lanczos vectors
        w -= Q[:, : j + 1] @ (Q[:, : j + 1].T @ w)
        b = np.linalg.norm(w)
        if b <= tol * (1.0 + abs(alpha[j])):
            used = j + 1
            break
        beta[j] = b
        q = w / b
    T = np.diag(alpha[:used])
    for j in range(used - 1):
        T[j, j + 1] = T[j + 1, j] = beta[j]
    w, S = jacobi_eigh(T)
    k = min(k, used)
    vecs = Q[:, :used] @ S[:, :k]
    # normalize for safety; Q columns are orthonormal to machine precision
    vecs /= np.linalg.norm(vecs, axis=0, keepdims=True)
    return w[:k], vecs


def topk_symmetric(A, k, jacobi_cutoff=2000, seed=0):
    """Top-k eigenpairs of a dense symmetric matrix.

    Uses cyclic Jacobi below `jacobi_cutoff` rows and Lanczos with full
    reorthogonalization above.
    """
    A = np.asarray(A, dtype=float)
    m = A.shape[0]
    if m <= jacobi_cutoff and m <= 400:
        # Jacobi is O(m^3) per sweep in pure numpy; keep it to modest sizes
        # and let Lanczos handle the rest (same results to tolerance).
        w, V = jacobi_eigh(A)
        return w[:k], V[:, :k]
    return lanczos_topk(lambda v: A @ v, m, k, seed=seed)


def svd_small(C, tol=1e-14, max_sweeps=60):
    """One-sided Jacobi SVD of a small square matrix C = U @ diag(s) @ V.T.

    Intended for the d x d cross-covariance matrices of Procrustes
    alignment (d <= 3 at desk scale, but any small d works).
    """
    C = np.array(C, dtype=float)
    d = C.shape[0]
    if C.shape != (d, d):
        raise ValueError("svd_small: square matrix required")
    U = C.copy()
    V = np.eye(d)
    scale = np.abs(C).max() + 1.0
    for _ in range(max_sweeps):
        converged = True
        for p in range(d - 1):
            for q in range(p + 1, d):
                up, uq = U[:, p], U[:, q]
                a = up @ up
                b = uq @ uq
                c = up @ uq
                if abs(c) <= tol * scale * scale:
                    continue
                converged = False
                zeta = (b - a) / (2.0 * c)
                t = np.sign(zeta) / (abs(zeta) + np.hypot(1.0, zeta))
                if zeta == 0.0:
                    t = 1.0
                cs = 1.0 / np.hypot(1.0, t)
                sn = t * cs
                U[:, p], U[:, q] = cs * up - sn * uq, sn * up + cs * uq
                vp, vq = V[:, p].copy(), V[:, q].copy()
                V[:, p], V[:, q] = cs * vp - sn * vq, sn * vp + cs * vq
        if converged:
            break
    s = np.linalg.norm(U, axis=0)
    order = np.argsort(-s)
    s = s[order]
    U = U[:, order]
    V = V[:, order]
    for j in range(d):
        if s[j] > tol * scale:
            U[:, j] /= s[j]
        else:
            # complete to an orthonormal basis deterministically
            U[:, j] = 0.0
            U[j, j] = 1.0
            for i in range(j):
                U[:, j] -= (U[:, i] @ U[:, j]) * U[:, i]
            nrm = np.linalg.norm(U[:, j])
            if nrm > 0:
                U[:, j] /= nrm
    return U, s, V.T
