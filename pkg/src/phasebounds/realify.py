"""Real coordinates for complex and Hermitian matrix spaces.

Trace inner products Re tr(X* Y) become Euclidean dot products under
``tau`` (Hermitian k x k -> R^{k^2}) and ``mu`` (C^{p x q} -> R^{2pq}).
"""

import numpy as np

from .linalg import hermitian_defect

SQRT2 = np.sqrt(2.0)


def triu_index(k):
    """Strict upper-triangle positions ordered (1,2),(1,3),(2,3),...,(k-1,k)."""
    rows, cols = [], []
    for j in range(1, k):
        for i in range(j):
            rows.append(i)
            cols.append(j)
    return np.array(rows, dtype=int), np.array(cols, dtype=int)


def vec(X):
    """Column-major vectorization."""
    return np.asarray(X).reshape(-1, order="F")


def tau(X, check=True):
    X = np.asarray(X)
    if X.ndim != 2 or X.shape[0] != X.shape[1]:
        raise ValueError("tau expects a square matrix")
    if check and hermitian_defect(X) > 1e-10:
        raise ValueError("tau expects a Hermitian matrix")
    k = X.shape[0]
    i, j = triu_index(k)
    upper = X[i, j]
    return np.concatenate([np.real(np.diagonal(X)), SQRT2 * upper.real, SQRT2 * upper.imag])


def tau_inv(v):
    v = np.asarray(v, dtype=float)
    k = int(round(np.sqrt(v.size)))
    if k * k != v.size:
        raise ValueError("tau_inv expects a vector of length k^2")
    i, j = triu_index(k)
    p = i.size
    X = np.diag(v[:k]).astype(complex)
    upper = (v[k : k + p] + 1j * v[k + p :]) / SQRT2
    X[i, j] = upper
    X[j, i] = upper.conj()
    return X


def mu(X):
    X = np.atleast_2d(np.asarray(X))
    return vec(np.vstack([X.real, X.imag])).astype(float)


def mu_inv(v, p, q):
    M = np.asarray(v, dtype=float).reshape((2 * p, q), order="F")
    return M[:p] + 1j * M[p:]


def jmap(X):
    X = np.atleast_2d(np.asarray(X))
    return np.block([[X.real, -X.imag], [X.imag, X.real]])


def lmap(X):
    X = np.atleast_2d(np.asarray(X))
    return np.vstack([X.real, X.imag])


def symplectic(n):
    I = np.eye(n)
    Z = np.zeros((n, n))
    return np.block([[Z, -I], [I, Z]])


def frame_lift(A, k):
    """F = I_k kron j(A), so that F mu(z) = mu(A z) for z with k columns."""
    return np.kron(np.eye(k), jmap(A))
