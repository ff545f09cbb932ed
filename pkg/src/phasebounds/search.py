"""Global constants a0, b0 by eigenvalue optimization over U(n), and certification."""

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .bounds import assemble_Qhat, lifted_columns, qz_vectors
from .frames import beta_values
from .linalg import haar_unitary, herm, qr_unitary
from .realify import SQRT2, mu_inv, tau_inv

CLUSTER_TOL = 1e-8


@dataclass(frozen=True)
class SearchConfig:
    starts: int = 64
    max_iters: int = 500
    step: float = 1.0
    grad_tol: float = 1e-10
    seed: int = 0
    retraction: str = "qr"
    tol: float = 1e-9
    n_check: int = 8
    threads: int | None = None

    def __post_init__(self):
        if self.starts < 1:
            raise ValueError("starts must be at least 1")
        if self.retraction != "qr":
            raise ValueError("only the qr retraction is supported")


@dataclass
class StartRecord:
    value: float
    iterations: int
    converged: bool
    history: list = field(default_factory=list)


@dataclass
class SearchResult:
    value: float
    witness_U: np.ndarray
    starts: list

    @property
    def total_iterations(self):
        return sum(s.iterations for s in self.starts)


def block_matrix(v, n, r):
    """Hermitian M = [[A, C*/sqrt2], [C/sqrt2, 0]] with v = [tau(A); mu(C)]."""
    A = tau_inv(v[: r * r])
    M = np.zeros((n, n), dtype=complex)
    M[:r, :r] = A
    if n > r:
        C = mu_inv(v[r * r :], n - r, r) / SQRT2
        M[r:, :r] = C
        M[:r, r:] = C.conj().T
    return M


def _weights(n, r, hat):
    # on the Stiefel manifold the horizontal form is D Q_U D with these weights
    if not hat:
        return None
    return np.concatenate([2.0 * np.ones(r * r), SQRT2 * np.ones(2 * r * (n - r))])


def eig_objective(F, U, r, which="min", hat=False, with_grad=True):
    """Extremal eigenvalue of Q_U (or D Q_U D) and its Riemannian gradient.

    The gradient is returned in the Lie algebra u(n): moving U -> U exp(t Om)
    changes the value at rate <grad, Om>. Eigenvalues within CLUSTER_TOL
    (relative) of the extreme are averaged.
    """
    n = U.shape[0]
    V = qz_vectors(F, U[:, :r], U[:, r:])
    D = _weights(n, r, hat)
    Vw = V if D is None else V * D
    w, E = np.linalg.eigh(Vw.T @ Vw)
    scale = max(1.0, abs(w[-1]))
    if which == "min":
        val = w[0]
        idx = np.flatnonzero(w <= val + CLUSTER_TOL * scale)
    else:
        val = w[-1]
        idx = np.flatnonzero(w >= val - CLUSTER_TOL * scale)
    if not with_grad:
        return float(val), None
    S = F.stack()
    grad = np.zeros((n, n), dtype=complex)
    for i in idx:
        v = E[:, i] if D is None else D * E[:, i]
        M = block_matrix(v, n, r)
        c = V @ v
        B = U.conj().T @ np.tensordot(c, S, axes=1) @ U
        grad += 2 * (B @ M - M @ B)
    return float(val), grad / idx.size


def _descend(F, U, r, which, hat, cfg):
    sign = 1.0 if which == "min" else -1.0
    val, g = eig_objective(F, U, r, which, hat)
    history = [val]
    t = cfg.step
    it = 0
    converged = False
    for it in range(1, cfg.max_iters + 1):
        gn2 = float(np.real(np.vdot(g, g)))
        if np.sqrt(gn2) <= cfg.grad_tol * max(1.0, abs(val)):
            converged = True
            break
        t = min(2 * t, cfg.step)
        while True:
            Un = qr_unitary(U @ (np.eye(U.shape[0]) - sign * t * g))
            vn, _ = eig_objective(F, Un, r, which, hat, with_grad=False)
            if sign * (vn - val) <= -1e-4 * t * gn2:
                break
            t *= 0.5
            if t < 1e-14:
                break
        if t < 1e-14:
            converged = True
            break
        U = Un
        val, g = eig_objective(F, U, r, which, hat)
        history.append(val)
    return StartRecord(val, it, converged, history), U


def _start_points(n, cfg):
    seqs = np.random.SeedSequence(cfg.seed).spawn(cfg.starts)
    return [haar_unitary(n, np.random.default_rng(s)) for s in seqs]


def _threads(cfg):
    return cfg.threads or os.cpu_count() or 1


def _multistart(F, r, which, hat, cfg, extra=()):
    n = F.dim_n
    starts = _start_points(n, cfg) + [np.asarray(U) for U in extra]

    def run(U0):
        return _descend(F, U0, r, which, hat, cfg)

    if _threads(cfg) > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=_threads(cfg)) as ex:
            results = list(ex.map(run, starts))
    else:
        results = [run(U0) for U0 in starts]
    vals = np.array([rec.value for rec, _ in results])
    # ties broken by start index so the reduction is order-independent
    best = int(np.argmin(vals) if which == "min" else np.argmax(vals))
    return SearchResult(float(vals[best]), results[best][1], [rec for rec, _ in results])


def _target_r(F, r):
    r = F.target_r if r is None else r
    if not 1 <= r <= F.dim_n:
        raise ValueError(f"r must lie in [1, {F.dim_n}]")
    return r


def estimate_a0(F, cfg=SearchConfig(), r=None, extra_starts=()):
    """Incumbent minimum of lambda_min(Q_U) over U(n); an upper estimate of a0."""
    return _multistart(F, _target_r(F, r), "min", False, cfg, extra_starts)


def estimate_b0(F, cfg=SearchConfig(), r=None, extra_starts=()):
    """Incumbent maximum of lambda_max(Q_U) over U(n); a lower estimate of b0."""
    return _multistart(F, _target_r(F, r), "max", False, cfg, extra_starts)


def stiefel_ahat(F, U, r):
    """ahat(z) at z = U[:, :r] through the reduced form lambda_min(D Q_U D)."""
    return eig_objective(F, U, r, "min", hat=True, with_grad=False)[0]


@dataclass
class Bracket:
    lower: float
    upper: float
    inf_ahat: float
    witness_U: np.ndarray
    search: SearchResult


def bracket_a0(F, cfg=SearchConfig(), r=None, extra_starts=()):
    """(inf ahat / 4, inf ahat / 2) with ahat minimized over orthonormal z."""
    r = _target_r(F, r)
    res = _multistart(F, r, "min", True, cfg, extra_starts)
    U = res.witness_U
    inf_ahat = max(res.value, 0.0)
    return Bracket(inf_ahat / 4, inf_ahat / 2, inf_ahat, U, res)


def frame_scale(F):
    return float(sum(np.linalg.norm(A) ** 2 for A in F.members))


@dataclass
class PointChecks:
    qz_min: float
    qhat_nullity: int
    solvable: bool
    span_dim: int
    ii: bool
    iii: bool
    iv: bool
    v: bool

    @property
    def agree(self):
        return self.ii == self.iii == self.iv == self.v


def condition_checks(F, U, r, null_tol):
    """Evaluate the equivalent retrievability conditions at one point [U1|U2]."""
    n = U.shape[0]
    U1, U2 = U[:, :r], U[:, r:]
    N = 2 * n * r - r * r
    V = qz_vectors(F, U1, U2)
    qz_min = float(np.linalg.eigvalsh(V.T @ V)[0])
    # (iv): every basis target (H, B) is reachable by a real combination of the
    # members; directions with sigma^2 <= null_tol count as unreachable
    P, s, Qh = np.linalg.svd(V.T, full_matrices=False)
    keep = s**2 > null_tol
    c = (Qh[keep].T / s[keep]) @ P[:, keep].T
    resid = float(np.max(np.abs(V.T @ c - np.eye(N)))) if N else 0.0
    solvable = resid <= 1e-6
    # (iii) and (v) share the lifted columns mu(A_j U1); Qhat = 4 G^T G
    G = lifted_columns(F, U1)
    qhat = 4 * np.linalg.svd(G, compute_uv=False) ** 2
    qhat = np.concatenate([qhat, np.zeros(max(0, 2 * n * r - qhat.size))])
    live = int(np.sum(qhat > 3 * null_tol))
    nullity = 2 * n * r - live
    return PointChecks(
        qz_min=qz_min,
        qhat_nullity=nullity,
        solvable=solvable,
        span_dim=live,
        ii=qz_min > null_tol,
        iii=nullity == r * r,
        iv=solvable,
        v=live == N,
    )


@dataclass
class CollisionWitness:
    x: np.ndarray
    y: np.ndarray
    beta_gap: float
    diff_norm: float


def collision_witness(F, U, r):
    """Two inequivalent inputs with equal beta values from a null direction of Q_U."""
    n = U.shape[0]
    V = qz_vectors(F, U[:, :r], U[:, r:])
    w, E = np.linalg.eigh(V.T @ V)
    W = herm(U @ block_matrix(E[:, 0], n, r) @ U.conj().T)
    W /= np.linalg.norm(W)
    lam, P = np.linalg.eigh(W)
    pos, neg = lam > 0, lam < 0
    x = np.zeros((n, r), dtype=complex)
    y = np.zeros((n, r), dtype=complex)
    xp = P[:, pos] * np.sqrt(lam[pos])
    yn = P[:, neg] * np.sqrt(-lam[neg])
    x[:, : min(r, xp.shape[1])] = xp[:, -r:]
    y[:, : min(r, yn.shape[1])] = yn[:, :r]
    gap = float(np.linalg.norm(beta_values(F, x) - beta_values(F, y)))
    diff = float(np.linalg.norm(x @ x.conj().T - y @ y.conj().T))
    return CollisionWitness(x, y, gap, diff)


@dataclass
class Certificate:
    verdict: str
    a0_estimate: float
    bracket: tuple
    inf_ahat: float
    witness_U: np.ndarray
    condition_checks: list
    checks_agree: bool
    null_tol: float
    scale: float
    collision: CollisionWitness | None = None
    a0_search: SearchResult | None = None
    bracket_search: SearchResult | None = None


def certify(F, cfg=SearchConfig(), r=None):
    """Run the a0 search and the Stiefel bracket, then test the retrievability conditions."""
    r = _target_r(F, r)
    n = F.dim_n
    scale = frame_scale(F)
    null_tol = cfg.tol * max(scale, 1.0)

    a0 = estimate_a0(F, cfg, r)
    br = bracket_a0(F, cfg, r)
    # share witnesses: on orthonormal z, ahat/4 <= a <= ahat/2 pointwise
    a_at_br = eig_objective(F, br.witness_U, r, "min", with_grad=False)[0]
    ahat_at_a0 = stiefel_ahat(F, a0.witness_U, r)
    a0_val, U_a0 = a0.value, a0.witness_U
    if a_at_br < a0_val:
        a0_val, U_a0 = a_at_br, br.witness_U
    inf_ahat, U_br = br.inf_ahat, br.witness_U
    if ahat_at_a0 < inf_ahat:
        inf_ahat, U_br = max(ahat_at_a0, 0.0), a0.witness_U
    lower, upper = inf_ahat / 4, inf_ahat / 2

    rng = np.random.default_rng(np.random.SeedSequence(cfg.seed).spawn(cfg.starts + 1)[-1])
    points = [haar_unitary(n, rng) for _ in range(cfg.n_check)] + [U_a0, U_br]
    checks = [condition_checks(F, U, r, null_tol) for U in points]
    agree = all(c.agree for c in checks)

    collision = None
    if a0_val <= null_tol:
        collision = collision_witness(F, U_a0, r)
        ok = collision.beta_gap <= 1e-6 and abs(collision.diff_norm - 1) <= 1e-8
        verdict = "not_retrievable" if ok else "inconclusive"
    elif (
        lower > 1e-8 * scale
        and a0_val > 1e-8 * scale
        and all(c.ii and c.iii and c.iv and c.v for c in checks)
    ):
        verdict = "retrievable"
    else:
        verdict = "inconclusive"
    return Certificate(
        verdict=verdict,
        a0_estimate=float(max(a0_val, 0.0)),
        bracket=(float(lower), float(upper)),
        inf_ahat=float(inf_ahat),
        witness_U=U_a0,
        condition_checks=checks,
        checks_agree=agree,
        null_tol=null_tol,
        scale=scale,
        collision=collision,
        a0_search=a0,
        bracket_search=br.search,
    )


def ahat_via_qhat(F, U, r):
    """ahat at z = U[:, :r] from the full 2nr-dim form, for cross-checking."""
    w = assemble_Qhat(F, U[:, :r]).eigvals()
    return float(w[2 * U.shape[0] * r - r * r - 1])
