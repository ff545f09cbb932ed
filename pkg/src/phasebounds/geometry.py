"""Bundles of the submersion z -> zz*, the Bures-Wasserstein metric and geodesics."""

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .linalg import RANK_TOL, as_tall, herm, hermitian_defect, range_split
from .quotient import PsdPoint, align, canonical_factor


def hat_reduce(z, tol=RANK_TOL):
    """Drop null singular directions: z = [zhat | 0] V* with zhat of full column rank.

    Returns ``(zhat, V)`` where ``V`` is the r x r unitary from the SVD.
    """
    z = as_tall(z, "z")
    U, s, Vh = np.linalg.svd(z)
    if s[0] == 0:
        raise ValueError("z must be nonzero")
    k = int(np.sum(s > tol * s[0]))
    V = Vh.conj().T
    return z @ V[:, :k], V


def tangent_map(z, w):
    """Differential of z -> zz* in direction w."""
    return herm(2 * z @ w.conj().T)


@dataclass(frozen=True)
class SubspaceProjectors:
    """Orthogonal projectors on C^{n x r} at a base point z.

    V is the vertical space {zK : K skew}, H the horizontal space and
    Gamma = {y : P_Ran(z) y = 0, y P_ker(z) = y}. The three are mutually
    orthogonal and sum to C^{n x r}.
    """

    project_vertical: Callable
    project_horizontal: Callable
    project_gamma: Callable
    rank: int


def subspace_projectors(z, tol=RANK_TOL):
    z = as_tall(z, "z")
    U, s, Vh = np.linalg.svd(z)
    if s[0] == 0:
        raise ValueError("z must be nonzero")
    k = int(np.sum(s > tol * s[0]))
    s = s[:k]
    V = Vh.conj().T
    denom = s[:, None] ** 2 + s[None, :] ** 2

    def rotate(w):
        return U.conj().T @ np.asarray(w, dtype=complex) @ V

    def back(wr):
        return U @ wr @ V.conj().T

    # all maps act on the trailing two axes, so batches of w broadcast
    def vertical_rot(wr):
        out = np.zeros_like(wr)
        B = s[:, None] * wr[..., :k, :k]
        K = (B - np.swapaxes(B, -1, -2).conj()) / denom
        out[..., :k, :k] = s[:, None] * K
        out[..., :k, k:] = wr[..., :k, k:]
        return out

    def gamma_rot(wr):
        out = np.zeros_like(wr)
        out[..., k:, k:] = wr[..., k:, k:]
        return out

    def pv(w):
        return back(vertical_rot(rotate(w)))

    def pg(w):
        return back(gamma_rot(rotate(w)))

    def ph(w):
        wr = rotate(w)
        return back(wr - vertical_rot(wr) - gamma_rot(wr))

    return SubspaceProjectors(pv, ph, pg, k)


def sylvester_range_solve(z, W1, tol=1e-10):
    """Solve zz* H + H zz* = W1 for H supported on Ran(z)."""
    z = as_tall(z, "z")
    U1, _, s = range_split(z)
    W1 = np.asarray(W1, dtype=complex)
    P = U1 @ U1.conj().T
    scale = max(np.linalg.norm(W1), 1.0)
    if np.linalg.norm(W1 - P @ W1 @ P) > tol * scale:
        raise ValueError("W1 must be supported on Ran(z)")
    lam = s**2
    Wr = U1.conj().T @ W1 @ U1
    H = Wr / (lam[:, None] + lam[None, :])
    return U1 @ H @ U1.conj().T


@dataclass(frozen=True)
class TangentVector:
    base: np.ndarray
    W: np.ndarray
    Z_par: np.ndarray
    Z_perp: np.ndarray


def make_tangent(z, W, tol=1e-10):
    """Split a Hermitian W at pi(z) into range block and off-range block."""
    z = as_tall(z, "z")
    W = np.asarray(W, dtype=complex)
    if hermitian_defect(W) > 1e-10:
        raise ValueError("tangent vectors must be Hermitian")
    U1, _, _ = range_split(z)
    P = U1 @ U1.conj().T
    Pp = np.eye(z.shape[0]) - P
    if np.linalg.norm(Pp @ W @ Pp) > tol * max(np.linalg.norm(W), 1.0):
        raise ValueError("W has a component outside the tangent space")
    return TangentVector(z, W, P @ W @ P, Pp @ W @ P)


def bw_metric(z, Z1, Z2):
    """Bures-Wasserstein inner product h(Z1, Z2) at zz*.

    h = 1/2 tr(Z2par H1) + Re tr(Z1perp* Z2perp (zz*)^+), where H1 solves
    zz* H + H zz* = Z1par on Ran(z).
    """
    z = as_tall(z, "z")
    s = np.linalg.svd(z, compute_uv=False)
    if s[-1] <= RANK_TOL * s[0]:
        raise ValueError("base must have full column rank; hat-reduce first")
    H1 = sylvester_range_solve(z, Z1.Z_par)
    G = np.linalg.pinv(z @ z.conj().T, hermitian=True)
    par = 0.5 * np.real(np.trace(Z2.Z_par @ H1))
    perp = np.real(np.trace(Z1.Z_perp.conj().T @ Z2.Z_perp @ G))
    return float(par + perp)


@dataclass(frozen=True)
class GeodesicPath:
    x: np.ndarray
    y: np.ndarray
    aligner: np.ndarray
    samples: list


def geodesic_factor(x, y, U, t):
    return (1 - t) * x + t * (y @ U)


def _psd_sample(M):
    M = herm(M)
    w = np.linalg.eigvalsh(M)
    top = max(w[-1], 0.0)
    if w[0] < -1e-9 * top - 1e-14:
        raise ValueError("geodesic sample lost positivity")
    rank = int(np.sum(w > RANK_TOL * top)) if top > 0 else 0
    return PsdPoint(M, rank)


def geodesic(A, B, ts, r=None):
    """Bures-Wasserstein geodesic between PSD matrices A and B sampled at ``ts``."""
    A = A if isinstance(A, PsdPoint) else PsdPoint.from_matrix(A)
    B = B if isinstance(B, PsdPoint) else PsdPoint.from_matrix(B)
    if A.matrix.shape != B.matrix.shape:
        raise ValueError("A and B must have the same size")
    ts = np.asarray(ts, dtype=float)
    if np.any(ts < 0) or np.any(ts > 1):
        raise ValueError("sample times must lie in [0, 1]")
    if r is None:
        r = max(A.rank, B.rank, 1)
    x = canonical_factor(A, r)
    y = canonical_factor(B, r)
    U = align(x, y)
    samples = []
    for t in ts:
        s = geodesic_factor(x, y, U, t)
        samples.append((float(t), _psd_sample(s @ s.conj().T)))
    return GeodesicPath(x, y, U, samples)


@dataclass(frozen=True)
class StratificationReport:
    gap: float
    raw_gap: float
    limit_ranks: list
    target_rank: int
    ts: list
    limit_samples: np.ndarray


def _extrapolation_weights(h):
    # Lagrange weights of the interpolating polynomial in h evaluated at h = 0
    h = np.asarray(h, dtype=float)
    w = np.ones_like(h)
    for a in range(h.size):
        for b in range(h.size):
            if a != b:
                w[a] *= h[b] / (h[b] - h[a])
    return w


def stratification_limit_check(A_seq, B_seq, A, B, ts, indices=None, order=2, rank_tol=1e-6):
    """Compare limits of rank-p geodesics with the direct rank-q geodesic.

    ``A_seq``, ``B_seq`` converge to ``A``, ``B``. When ``indices`` are given
    (A_seq[i] is the term of index indices[i], with error expanding in powers
    of 1/index), the pointwise limit curve is estimated by polynomial
    extrapolation to 1/index = 0 from the last ``order + 1`` terms; otherwise
    the last term is used as is.
    """
    ts = np.asarray(ts, dtype=float)
    if len(A_seq) != len(B_seq) or not A_seq:
        raise ValueError("sequences must be nonempty and of equal length")
    Ap = PsdPoint.from_matrix(A) if not isinstance(A, PsdPoint) else A
    Bp = PsdPoint.from_matrix(B) if not isinstance(B, PsdPoint) else B
    q = max(Ap.rank, Bp.rank)
    direct = np.array([s.matrix for _, s in geodesic(Ap, Bp, ts).samples])

    def curve(Ai, Bi):
        return np.array([s.matrix for _, s in geodesic(Ai, Bi, ts).samples])

    last = curve(A_seq[-1], B_seq[-1])
    if indices is None:
        limit = last
    else:
        use = min(order + 1, len(A_seq))
        h = 1.0 / np.asarray(indices[-use:], dtype=float)
        w = _extrapolation_weights(h)
        curves = [curve(a, b) for a, b in zip(A_seq[-use:], B_seq[-use:])]
        limit = sum(wi * c for wi, c in zip(w, curves))
    limit = np.array([herm(M) for M in limit])

    def gap_of(c):
        return float(max(np.linalg.norm(M - D) for M, D in zip(c, direct)))

    ranks = []
    for M in limit:
        ev = np.linalg.eigvalsh(M)
        top = max(ev[-1], 0.0)
        ranks.append(int(np.sum(ev > rank_tol * top)) if top > 0 else 0)
    return StratificationReport(gap_of(limit), gap_of(last), ranks, q, ts.tolist(), limit)
