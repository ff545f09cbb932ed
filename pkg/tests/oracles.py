"""Brute-force sampling oracles for the eigenvalue formulas.

Each quotient is built from explicit directions (tangent matrices W or
horizontal vectors w), never from the quadratic forms under test.
"""

import numpy as np
from scipy.optimize import minimize

from phasebounds.frames import alpha_map
from phasebounds.geometry import hat_reduce, subspace_projectors
from phasebounds.linalg import range_split

SQRT2 = np.sqrt(2.0)


def _pairing(W, S):
    # <W_b, A_j>_R for a batch of matrices W (b, n, n) and members S (m, n, n)
    return np.real(np.einsum("bik,jik->bj", W.conj(), S))


def _alpha_batch(S, Z):
    beta = np.real(np.einsum("bic,jik,bkc->bj", Z.conj(), S, Z))
    return np.sqrt(np.clip(beta, 0.0, None))


def tangent_quotient(F, U1, U2):
    """Batch map p -> sum_j <W, A_j>^2 / ||W||^2 with the isometric W(A, C)."""
    n, k = U1.shape
    S = F.stack()

    def f(P):
        P = np.atleast_2d(P)
        b = P.shape[0]
        G = (P[:, : k * k] + 1j * P[:, k * k : 2 * k * k]).reshape(b, k, k)
        A = (G + G.conj().transpose(0, 2, 1)) / 2
        rest = P[:, 2 * k * k :]
        C = (rest[:, : (n - k) * k] + 1j * rest[:, (n - k) * k :]).reshape(b, n - k, k)
        W = U1 @ A @ U1.conj().T
        off = U2 @ C @ U1.conj().T / SQRT2
        W = W + off + off.conj().transpose(0, 2, 1)
        v = _pairing(W, S)
        return np.sum(v**2, axis=1) / np.linalg.norm(W, axis=(1, 2)) ** 2

    return f, 2 * k * k + 2 * (n - k) * k


def horizontal_quotient(F, zhat, kind="beta", fd_step=None):
    """Batch map over horizontal w = P_H(raw(p)).

    kind "beta": sum_j <zw* + wz*, A_j>^2 / ||w||^2.
    kind "alpha": sum over nonvanishing j of |D alpha_j(z) w|^2 / ||w||^2; with
    ``fd_step`` the derivative is a central finite difference of alpha itself.
    """
    n, k = zhat.shape
    P = subspace_projectors(zhat)
    S = F.stack()
    if kind == "alpha":
        a0 = alpha_map(F, zhat).values
        live = a0 > 1e-6 * max(a0.max(), 1.0)

    def f(Pm):
        Pm = np.atleast_2d(Pm)
        w = P.project_horizontal((Pm[:, : n * k] + 1j * Pm[:, n * k :]).reshape(-1, n, k))
        nrm = np.linalg.norm(w, axis=(1, 2)) ** 2
        if kind == "beta" or fd_step is None:
            T = zhat @ w.conj().transpose(0, 2, 1)
            vals = _pairing(T + T.conj().transpose(0, 2, 1), S)
            if kind == "alpha":
                vals = vals[:, live] / (2 * a0[live])
        else:
            ap = _alpha_batch(S, zhat + fd_step * w)
            am = _alpha_batch(S, zhat - fd_step * w)
            vals = ((ap - am) / (2 * fd_step))[:, live]
        return np.sum(vals**2, axis=1) / nrm

    return f, 2 * n * k


def sampled_minimum(f, dim, rng, samples, refine=True):
    """(raw sampled minimum, minimum after a BFGS polish of the best sample)."""
    P = rng.standard_normal((samples, dim))
    vals = f(P)
    best = int(np.argmin(vals))
    raw_min = float(vals[best])
    if not refine:
        return raw_min, raw_min
    res = minimize(lambda p: float(f(p)[0]), P[best], method="BFGS", options={"gtol": 1e-12, "maxiter": 2000})
    return raw_min, float(min(res.fun, raw_min))


def base_frames(z):
    zhat, _ = hat_reduce(z)
    U1, U2, _ = range_split(zhat)
    return zhat, U1, U2
