"""Quadratic forms whose ordered eigenvalues give local Lipschitz bounds."""

import warnings
from dataclasses import dataclass

import numpy as np

from .frames import beta_values, frame_bounds
from .geometry import hat_reduce
from .linalg import RANK_TOL, as_tall, range_split
from .realify import SQRT2, frame_lift, triu_index

KINDS = ("Qz", "Qhat", "That", "Rhat", "ThatPlusRhat")


@dataclass(frozen=True)
class QuadForm:
    matrix: np.ndarray
    kind: str
    base_rank: int
    n: int
    m: int

    @property
    def size(self):
        return self.matrix.shape[0]

    def eigvals(self):
        """Eigenvalues in descending order."""
        return np.linalg.eigvalsh(self.matrix)[::-1]

    def lam(self, i):
        """The i-th largest eigenvalue (1-based)."""
        return float(self.eigvals()[i - 1])


@dataclass(frozen=True)
class LocalBounds:
    a_z: float = float("nan")
    ahat_z: float = float("nan")
    ahat1_z: float = float("nan")
    ahat2_z: float = float("nan")
    A1hat_z: float = float("nan")
    A2hat_z: float = float("nan")
    sandwich: tuple = (float("nan"), float("nan"))
    rank: int = 0


def check_unitary_split(U1, U2, tol=1e-10):
    U = np.hstack([U1, U2])
    if U.shape[0] != U.shape[1]:
        raise ValueError("[U1|U2] must be square")
    if np.linalg.norm(U.conj().T @ U - np.eye(U.shape[0])) > tol:
        raise ValueError("[U1|U2] must be unitary")


def qz_vectors(F, U1, U2, corrected=True):
    """Rows v_j = [tau(U1* A_j U1); c mu(U2* A_j U1)], c = sqrt(2) when corrected."""
    c = SQRT2 if corrected else 1.0
    S = F.stack()
    AU1 = S @ U1
    top = U1.conj().T @ AU1
    bot = U2.conj().T @ AU1
    k = U1.shape[1]
    i, j = triu_index(k)
    up = top[:, i, j]
    # mu is column-major over [Re; Im] stacked blocks
    bot_ri = np.concatenate([bot.real, bot.imag], axis=1)
    mu_bot = bot_ri.transpose(0, 2, 1).reshape(F.m, -1)
    diag = np.real(np.diagonal(top, axis1=1, axis2=2))
    return np.hstack([diag, SQRT2 * up.real, SQRT2 * up.imag, c * mu_bot])


def assemble_Qz(F, U1, U2, corrected=True):
    U1 = np.atleast_2d(np.asarray(U1, dtype=complex))
    U2 = np.asarray(U2, dtype=complex).reshape(U1.shape[0], -1)
    check_unitary_split(U1, U2)
    V = qz_vectors(F, U1, U2, corrected)
    return QuadForm(V.T @ V, "Qz", U1.shape[1], U1.shape[0], F.m)


def _full_rank(zhat):
    zhat = as_tall(zhat, "zhat")
    s = np.linalg.svd(zhat, compute_uv=False)
    if s[-1] <= RANK_TOL * s[0]:
        raise ValueError("zhat must have full column rank")
    return zhat


def lifted_columns(F, zhat):
    """Rows g_j = F_j mu(zhat) = mu(A_j zhat)."""
    AZ = F.stack() @ zhat
    return np.concatenate([AZ.real, AZ.imag], axis=1).transpose(0, 2, 1).reshape(F.m, -1)


def assemble_Qhat(F, zhat):
    zhat = _full_rank(zhat)
    G = lifted_columns(F, zhat)
    n, k = zhat.shape
    return QuadForm(4 * G.T @ G, "Qhat", k, n, F.m)


def split_tolerance(beta):
    return 1e-12 * (float(np.max(beta)) + 1.0)


def assemble_alpha_forms(F, zhat):
    """(That, Rhat) for a PSD frame at a full-rank base point."""
    if not F.is_psd:
        raise ValueError("alpha forms require a PSD frame")
    zhat = _full_rank(zhat)
    n, k = zhat.shape
    beta = beta_values(F, zhat)
    zero = beta <= split_tolerance(beta)
    G = lifted_columns(F, zhat)
    live = ~zero
    T = (G[live].T / beta[live]) @ G[live]
    R = np.zeros((2 * n * k, 2 * n * k))
    for j in np.flatnonzero(zero):
        R += frame_lift(F.members[j], k)
    return QuadForm(T, "That", k, n, F.m), QuadForm(R, "Rhat", k, n, F.m)


def _horizontal_eig(Q, k):
    """lambda_{2nk-k^2} of a 2nk-dim form whose trailing k^2 block is structurally null."""
    w = Q.eigvals()
    N = w.size - k * k
    tail = w[N:]
    if Q.kind == "Qhat" and tail.size and np.max(np.abs(tail)) > 1e-8 * max(w[0], 1e-300):
        warnings.warn("trailing eigenvalues of Qhat are not numerically zero", RuntimeWarning)
    return float(w[N - 1])


def base_split(zhat):
    U1, U2, _ = range_split(zhat)
    return U1, U2


def beta_local_bounds(F, z):
    zhat, _ = hat_reduce(z)
    k = zhat.shape[1]
    U1, U2 = base_split(zhat)
    Qz = assemble_Qz(F, U1, U2)
    a_z = float(Qz.eigvals()[-1])
    ahat = _horizontal_eig(assemble_Qhat(F, zhat), k)
    s = np.linalg.svd(zhat, compute_uv=False)
    nz2 = float(np.sum(s**2))
    ahat1 = ahat / (4 * nz2)
    return LocalBounds(
        a_z=a_z,
        ahat_z=ahat,
        ahat1_z=ahat1,
        ahat2_z=ahat1,
        sandwich=(ahat1, float(ahat / (2 * s[-1] ** 2))),
        rank=k,
    )


def alpha_local_bounds(F, z):
    if not F.is_psd:
        raise ValueError("alpha bounds require a PSD frame")
    zhat, _ = hat_reduce(z)
    k = zhat.shape[1]
    T, R = assemble_alpha_forms(F, zhat)
    N = T.size - k * k
    A1 = float(np.linalg.eigvalsh(T.matrix + R.matrix)[::-1][N - 1])
    A2 = float(T.eigvals()[N - 1])
    return LocalBounds(A1hat_z=A1, A2hat_z=A2, rank=k)


def local_bounds(F, z):
    """Beta bounds, plus alpha bounds when the frame is PSD."""
    b = beta_local_bounds(F, z)
    if not F.is_psd:
        return b
    a = alpha_local_bounds(F, z)
    return LocalBounds(b.a_z, b.ahat_z, b.ahat1_z, b.ahat2_z, a.A1hat_z, a.A2hat_z, b.sandwich, b.rank)


def beta_upper_local(F, U1, U2):
    return float(assemble_Qz(F, U1, U2).eigvals()[0])


def _b01_ascent(S, x, shift, iters, tol):
    # Shifted fixed-point ascent: f(x) + shift*|x|^4 is convex, so each step increases f on the sphere.
    f_old = -np.inf
    for _ in range(iters):
        beta = np.real(np.einsum("i,jik,k->j", x.conj(), S, x))
        f = float(beta @ beta)
        if f - f_old <= tol * max(f, 1.0):
            break
        f_old = f
        g = np.einsum("j,jik,k->i", beta, S, x) + shift * x
        x = g / np.linalg.norm(g)
    beta = np.real(np.einsum("i,jik,k->j", x.conj(), S, x))
    return float(beta @ beta), x


def estimate_b01(F, starts=32, seed=0, iters=5000, tol=1e-15):
    """sup over unit x of sum_j <xx*, A_j>^2 by multistart ascent on the sphere."""
    S = F.stack()
    n = F.dim_n
    shift = float(sum(np.linalg.norm(A, 2) ** 2 for A in F.members))
    rng = np.random.default_rng(seed)
    best, best_x = -np.inf, None
    for _ in range(starts):
        x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        val, x = _b01_ascent(S, x / np.linalg.norm(x), shift, iters, tol)
        if val > best:
            best, best_x = val, x
    return best, best_x


def global_upper_bounds(F, starts=32, seed=0):
    """B0 = lambda_max(sum A_j) and b01 = ||A||_{1->2}^2 over rank-one unit inputs."""
    _, B0 = frame_bounds(F)
    b01, _ = estimate_b01(F, starts, seed)
    return {"B0": B0, "b01": b01}
