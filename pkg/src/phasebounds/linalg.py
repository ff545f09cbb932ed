"""Small dense linear-algebra helpers shared across the package."""

import numpy as np

RANK_TOL = 1e-10


def as_tall(x, name="x"):
    """Return ``x`` as a finite complex 2-D array with rows >= cols >= 1."""
    a = np.asarray(x)
    if a.ndim == 1:
        a = a[:, None]
    if a.ndim != 2:
        raise ValueError(f"{name} must be a 2-D matrix, got ndim={a.ndim}")
    n, r = a.shape
    if r < 1 or n < r:
        raise ValueError(f"{name} must be tall with at least one column, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} has non-finite entries")
    return a.astype(complex)


def check_same_shape(x, y):
    if x.shape != y.shape:
        raise ValueError(f"shape mismatch: {x.shape} vs {y.shape}")


def hermitian_defect(A):
    """Relative distance of ``A`` from the Hermitian matrices."""
    scale = max(np.linalg.norm(A), 1.0)
    return np.linalg.norm(A - A.conj().T) / scale


def is_hermitian(A, tol=1e-12):
    A = np.asarray(A)
    return A.ndim == 2 and A.shape[0] == A.shape[1] and hermitian_defect(A) <= tol


def herm(A):
    return 0.5 * (A + A.conj().T)


def inner(X, Y):
    """Real trace inner product Re tr(X^* Y)."""
    return float(np.real(np.vdot(X, Y)))


def nuclear_norm(X):
    return float(np.sum(np.linalg.svd(X, compute_uv=False)))


def eigh_desc(A):
    """Eigen-decomposition of a symmetric/Hermitian matrix, largest first."""
    w, V = np.linalg.eigh(A)
    return w[::-1], V[:, ::-1]


def range_split(z, tol=RANK_TOL):
    """Orthonormal bases for Ran(z) and its complement plus the singular values.

    Returns ``(U1, U2, s)`` with ``U1`` of shape (n, k), ``U2`` of shape
    (n, n - k) and ``s`` the k nonzero singular values in descending order.
    """
    U, s, _ = np.linalg.svd(z)
    k = int(np.sum(s > tol * s[0])) if s.size and s[0] > 0 else 0
    return U[:, :k], U[:, k:], s[:k]


def haar_unitary(n, rng):
    """Haar-distributed element of U(n) via QR with the phase fix."""
    G = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    return qr_unitary(G)


def qr_unitary(M):
    """Q factor of M with R's diagonal made real positive (QR retraction)."""
    Q, R = np.linalg.qr(M)
    d = np.diagonal(R)
    ph = np.where(np.abs(d) > 0, d / np.where(np.abs(d) > 0, np.abs(d), 1.0), 1.0)
    return Q * ph[None, :]


def random_complex(shape, rng):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_hermitian(n, rng):
    G = random_complex((n, n), rng) / np.sqrt(2)
    return herm(G)
