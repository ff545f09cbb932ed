"""Hermitian frames, the alpha/beta analysis maps and frame generators."""

from dataclasses import dataclass, field

import numpy as np

from .linalg import as_tall, herm, hermitian_defect, random_complex, random_hermitian
from .realify import tau

FRAME_TYPES = ("pauli", "random_hermitian", "random_rank1")

PAULI = (
    np.eye(2, dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


@dataclass(frozen=True)
class HermitianFrame:
    members: tuple
    target_r: int = 1
    psd_flags: tuple = ()
    spanning: bool = False
    metadata: dict = field(default_factory=dict)

    @property
    def dim_n(self):
        return self.members[0].shape[0]

    @property
    def m(self):
        return len(self.members)

    @property
    def is_psd(self):
        return all(self.psd_flags)

    def stack(self):
        return np.stack(self.members)


def make_frame(members, r=1, metadata=None, tol=1e-12):
    """Validate and wrap a list of Hermitian matrices."""
    mats = []
    if len(members) < 1:
        raise ValueError("a frame needs at least one member")
    for j, A in enumerate(members):
        A = np.asarray(A, dtype=complex)
        if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] == 0:
            raise ValueError(f"member {j + 1} is not a nonempty square matrix")
        if mats and A.shape != mats[0].shape:
            raise ValueError(f"member {j + 1} has shape {A.shape}, expected {mats[0].shape}")
        if not np.all(np.isfinite(A)):
            raise ValueError(f"member {j + 1} has non-finite entries")
        if hermitian_defect(A) > tol:
            raise ValueError(f"member {j + 1} is not Hermitian")
        mats.append(herm(A))
    n = mats[0].shape[0]
    if not 1 <= r <= n:
        raise ValueError(f"target r must lie in [1, {n}]")
    flags = []
    for A in mats:
        w = np.linalg.eigvalsh(A)
        flags.append(bool(w[0] >= -1e-10 * max(abs(w[-1]), 1.0)))
    G = np.array([tau(A, check=False) for A in mats])
    spanning = bool(np.linalg.matrix_rank(G, tol=1e-10 * max(np.linalg.norm(G), 1.0)) == n * n)
    return HermitianFrame(tuple(mats), r, tuple(flags), spanning, dict(metadata or {}))


@dataclass(frozen=True)
class AnalysisResult:
    values: np.ndarray
    map_kind: str


def _check_z(F, z):
    z = as_tall(z, "z")
    if z.shape[0] != F.dim_n:
        raise ValueError(f"z has {z.shape[0]} rows, frame acts on C^{F.dim_n}")
    return z


def beta_values(F, z):
    z = _check_z(F, z)
    S = F.stack()
    # Re tr(A_j z z*) = sum over columns of z_c* A_j z_c
    return np.real(np.einsum("ic,jik,kc->j", z.conj(), S, z))


def beta_map(F, z):
    return AnalysisResult(beta_values(F, z), "beta")


def alpha_map(F, z):
    if not F.is_psd:
        raise ValueError("alpha map requires every frame member to be PSD")
    return AnalysisResult(np.sqrt(np.clip(beta_values(F, z), 0.0, None)), "alpha")


def analysis_operator(F, X):
    """The linear map X -> (<A_j, X>)_j on Hermitian matrices."""
    X = np.asarray(X)
    return np.real(np.einsum("jik,ik->j", F.stack().conj(), X))


def frame_bounds(F):
    """Extremal Rayleigh quotients (lower, upper) of sum_j A_j.

    For a PSD frame these are the optimal frame bounds. For general Hermitian
    members the lower value may be nonpositive.
    """
    w = np.linalg.eigvalsh(sum(F.members))
    return float(w[0]), float(w[-1])


def generate_frame(kind, n, m, seed=0, r=1):
    kind = kind.replace("-", "_")
    meta = {"generator": kind, "seed": int(seed)}
    if m < 1:
        raise ValueError("m must be at least 1")
    if kind == "pauli":
        if n != 2 or m != 4:
            raise ValueError("the pauli frame requires n = 2 and m = 4")
        return make_frame(PAULI, r, meta)
    rng = np.random.default_rng(seed)
    if kind == "random_hermitian":
        members = [random_hermitian(n, rng) for _ in range(m)]
    elif kind == "random_rank1":
        members = []
        for _ in range(m):
            f = random_complex((n, 1), rng) / np.sqrt(2)
            members.append(f @ f.conj().T)
    else:
        raise ValueError(f"unknown frame type {kind!r}; expected one of {FRAME_TYPES}")
    return make_frame(members, r, meta)
