"""Metrics and embeddings on C^{n x r} modulo right multiplication by U(r)."""

from dataclasses import dataclass

import numpy as np

from .linalg import RANK_TOL, as_tall, check_same_shape, herm, hermitian_defect, nuclear_norm

METRICS = ("D", "d", "Dprime")
EMBEDDINGS = ("pi", "theta", "psi")


def numerical_rank(x, tol=RANK_TOL):
    """Number of singular values above ``tol * sigma_1``; 0 for the zero matrix."""
    if not 0 < tol < 1:
        raise ValueError("tol must lie in (0, 1)")
    s = np.linalg.svd(np.asarray(x), compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > tol * s[0]))


@dataclass(frozen=True)
class QuotientPoint:
    representative: np.ndarray
    numerical_rank: int
    rank_tolerance: float = RANK_TOL

    @classmethod
    def from_matrix(cls, x, tol=RANK_TOL):
        x = as_tall(x)
        return cls(x, numerical_rank(x, tol), tol)

    def equivalent(self, other, tol=1e-8):
        return distance(self.representative, other.representative, "D") <= tol


@dataclass(frozen=True)
class PsdPoint:
    matrix: np.ndarray
    rank: int

    @classmethod
    def from_matrix(cls, A, tol=RANK_TOL):
        A = np.asarray(A, dtype=complex)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ValueError("PSD matrix must be square")
        if not np.all(np.isfinite(A)):
            raise ValueError("PSD matrix has non-finite entries")
        if hermitian_defect(A) > 1e-10:
            raise ValueError("matrix is not Hermitian")
        A = herm(A)
        w = np.linalg.eigvalsh(A)
        top = max(w[-1], 0.0)
        if w[0] < -1e-10 * max(top, 1e-300) and w[0] < -1e-14:
            raise ValueError(f"matrix is not PSD (min eigenvalue {w[0]:.3e})")
        rank = int(np.sum(w > tol * top)) if top > 0 else 0
        return cls(A, rank)


def _norms(x, y):
    x = as_tall(x, "x")
    y = as_tall(y, "y")
    check_same_shape(x, y)
    nx2 = float(np.linalg.norm(x) ** 2)
    ny2 = float(np.linalg.norm(y) ** 2)
    nuc = nuclear_norm(x.conj().T @ y)
    return nx2, ny2, nuc


def distance_closed_form(x, y, kind="D"):
    """Quotient distance from norms and the nuclear norm of x* y."""
    nx2, ny2, nuc = _norms(x, y)
    if kind == "D":
        v = nx2 + ny2 - 2 * nuc
    elif kind == "d":
        v = (nx2 + ny2) ** 2 - 4 * nuc**2
    elif kind == "Dprime":
        v = nx2 + ny2 + 2 * nuc
    else:
        raise ValueError(f"unknown metric {kind!r}; expected one of {METRICS}")
    return float(np.sqrt(max(v, 0.0)))


def distance(x, y, kind="D"):
    """Quotient distance between the classes of ``x`` and ``y``.

    Same values as :func:`distance_closed_form`, but evaluated as
    ||x - yU|| and ||x + yU|| with the aligner U, so that D close to zero
    keeps full relative accuracy (d = D * D').
    """
    if kind not in METRICS:
        raise ValueError(f"unknown metric {kind!r}; expected one of {METRICS}")
    x = as_tall(x, "x")
    y = as_tall(y, "y")
    check_same_shape(x, y)
    yU = y @ align(x, y)
    D = float(np.linalg.norm(x - yU))
    Dp = float(np.linalg.norm(x + yU))
    return {"D": D, "Dprime": Dp, "d": D * Dp}[kind]


def align(x, y):
    """Unitary U minimizing ||x - yU||, i.e. with x* y U positive semidefinite.

    With the SVD x* y = W S V*, U = V W*. Null singular directions are paired
    in index order, which gives a deterministic completion.
    """
    x = as_tall(x, "x")
    y = as_tall(y, "y")
    check_same_shape(x, y)
    W, _, Vh = np.linalg.svd(x.conj().T @ y)
    return Vh.conj().T @ W.conj().T


def embed(x, kind="pi"):
    x = as_tall(x)
    k = numerical_rank(x)
    if kind == "pi":
        return PsdPoint(herm(x @ x.conj().T), k)
    # (xx*)^{1/2} = U S U* from the SVD of x; avoids squaring the condition number
    U, s, _ = np.linalg.svd(x, full_matrices=False)
    theta = herm((U * s) @ U.conj().T)
    if kind == "theta":
        return PsdPoint(theta, k)
    if kind == "psi":
        return PsdPoint(np.linalg.norm(x) * theta, k)
    raise ValueError(f"unknown embedding {kind!r}; expected one of {EMBEDDINGS}")


def _phase_fix(V, tol=1e-12):
    V = V.copy()
    for c in range(V.shape[1]):
        col = V[:, c]
        idx = np.flatnonzero(np.abs(col) > tol)
        if idx.size:
            a = col[idx[0]]
            V[:, c] = col * (abs(a) / a)
    return V


def canonical_factor(A, r, tol=RANK_TOL):
    """Deterministic z in C^{n x r} with z z* = A, from the top-r eigenpairs."""
    P = A if isinstance(A, PsdPoint) else PsdPoint.from_matrix(A, tol)
    M = P.matrix
    n = M.shape[0]
    if r < 1 or r > n:
        raise ValueError(f"r must lie in [1, {n}]")
    if P.rank > r:
        raise ValueError(f"rank {P.rank} exceeds r = {r}")
    w, V = np.linalg.eigh(M)
    w, V = w[::-1], V[:, ::-1]
    V = _phase_fix(V)
    lam = np.clip(w[:r], 0.0, None)
    lam[P.rank:] = 0.0
    return V[:, :r] * np.sqrt(lam)[None, :]
