import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm
from scipy.optimize import minimize

from conftest import cgauss
from phasebounds.linalg import haar_unitary
from phasebounds.quotient import (
    PsdPoint,
    QuotientPoint,
    align,
    canonical_factor,
    distance,
    distance_closed_form,
    embed,
    numerical_rank,
)

shapes = st.tuples(st.integers(1, 5), st.integers(1, 3)).filter(lambda t: t[1] <= t[0])
seeds = st.integers(0, 2**32 - 1)


def pair(seed, n, r):
    g = np.random.default_rng(seed)
    return cgauss(g, (n, r)), cgauss(g, (n, r))


# distance


def test_distance_zero_on_orbit(rng):
    x = cgauss(rng, (4, 2))
    U = haar_unitary(2, rng)
    assert distance(x, x @ U, "D") < 1e-12
    assert distance_closed_form(x, x @ U, "D") < 1e-6


def test_distance_orthogonal_unit_vectors():
    e1, e2 = np.array([[1.0], [0]]), np.array([[0.0], [1]])
    assert distance(e1, e2, "D") == pytest.approx(np.sqrt(2), abs=1e-15)
    assert distance(e1, e2, "d") == pytest.approx(2, abs=1e-15)
    assert distance(e1, e2, "Dprime") == pytest.approx(np.sqrt(2), abs=1e-15)


def test_rank_one_d_is_nuclear_norm_of_difference(rng):
    for _ in range(20):
        x, y = cgauss(rng, (4, 1)), cgauss(rng, (4, 1))
        M = x @ x.conj().T - y @ y.conj().T
        assert distance(x, y, "d") == pytest.approx(np.abs(np.linalg.eigvalsh(M)).sum(), abs=1e-10)


def test_distance_D_matches_phase_grid_r1(rng):
    x, y = cgauss(rng, (3, 1)), cgauss(rng, (3, 1))
    ph = np.exp(1j * np.linspace(0, 2 * np.pi, 10**6, endpoint=False))
    vals = np.linalg.norm(x - y * ph[None, :], axis=0)
    D = distance(x, y, "D")
    assert vals.min() >= D - 1e-12
    assert vals.min() - D < 1e-9


def test_distance_D_matches_haar_search_r2(rng):
    x, y = cgauss(rng, (4, 2)), cgauss(rng, (4, 2))
    D = distance(x, y, "D")
    Us = [haar_unitary(2, rng) for _ in range(20000)]
    vals = np.array([np.linalg.norm(x - y @ U) for U in Us])
    assert vals.min() >= D - 1e-12
    U0 = Us[int(np.argmin(vals))]

    def f(p):
        K = np.array([[1j * p[0], p[1] + 1j * p[2]], [-p[1] + 1j * p[2], 1j * p[3]]])
        return np.linalg.norm(x - y @ U0 @ expm(K))

    res = minimize(f, np.zeros(4), method="Nelder-Mead", options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 4000})
    assert res.fun >= D - 1e-12
    assert res.fun - D < 1e-7


def test_closed_form_agrees_with_aligned(rng):
    for _ in range(50):
        x, y = cgauss(rng, (5, 3)), cgauss(rng, (5, 3))
        for k in ("D", "d", "Dprime"):
            assert distance(x, y, k) == pytest.approx(distance_closed_form(x, y, k), rel=1e-10)


def test_distance_errors(rng):
    with pytest.raises(ValueError):
        distance(cgauss(rng, (3, 1)), cgauss(rng, (4, 1)))
    with pytest.raises(ValueError):
        distance(cgauss(rng, (3, 1)), cgauss(rng, (3, 1)), "L1")
    with pytest.raises(ValueError):
        distance(np.array([[np.nan]]), np.array([[1.0]]))


# align


def test_align_recovers_unitary(rng):
    x = cgauss(rng, (5, 3))
    V = haar_unitary(3, rng)
    U = align(x, x @ V)
    assert np.allclose(U, V.conj().T, atol=1e-10)


def test_align_is_minimizer_and_psd(rng):
    for _ in range(20):
        x, y = cgauss(rng, (5, 2)), cgauss(rng, (5, 2))
        U = align(x, y)
        P = x.conj().T @ y @ U
        assert np.allclose(P, P.conj().T, atol=1e-12)
        assert np.linalg.eigvalsh((P + P.conj().T) / 2).min() > -1e-12
        assert np.linalg.norm(x - y @ U) == pytest.approx(distance_closed_form(x, y, "D"), abs=1e-10)


def test_align_orthogonal_ranges_rank_one():
    U = align(np.array([[1.0], [0]]), np.array([[0.0], [1]]))
    assert np.allclose(U, [[1.0]])


# embeddings


def test_theta_squares_to_pi(rng):
    x = cgauss(rng, (4, 2))
    th = embed(x, "theta").matrix
    assert np.allclose(th @ th, embed(x, "pi").matrix, atol=1e-10)


def test_psi_equals_pi_for_r1(rng):
    x = cgauss(rng, (4, 1))
    assert np.allclose(embed(x, "psi").matrix, embed(x, "pi").matrix, atol=1e-12)


def test_embedding_eigenvalues_for_known_singular_values(rng):
    Q = haar_unitary(4, rng)[:, :2]
    V = haar_unitary(2, rng)
    x = Q @ np.diag([2.0, 1.0]) @ V
    top = lambda P: np.sort(np.linalg.eigvalsh(P.matrix))[-2:][::-1]
    assert np.allclose(top(embed(x, "theta")), [2, 1], atol=1e-12)
    assert np.allclose(top(embed(x, "pi")), [4, 1], atol=1e-12)
    assert np.allclose(top(embed(x, "psi")), [2 * np.sqrt(5), np.sqrt(5)], atol=1e-12)
    assert embed(x, "pi").rank == 2


def test_embed_preserves_rank(rng):
    x = cgauss(rng, (5, 1)) @ cgauss(rng, (1, 3))
    for kind in ("pi", "theta", "psi"):
        assert embed(x, kind).rank == 1
    with pytest.raises(ValueError):
        embed(x, "sqrt")


# canonical factor


def test_canonical_factor_round_trip(rng):
    for r in (1, 2, 3):
        z = cgauss(rng, (5, r))
        assert distance(canonical_factor(embed(z, "pi"), r), z, "D") < 1e-8


def test_canonical_factor_zero_and_identity():
    assert np.all(canonical_factor(np.zeros((3, 3)), 2) == 0)
    z = canonical_factor(np.eye(2), 2)
    assert np.allclose(z @ z.conj().T, np.eye(2), atol=1e-12)


def test_canonical_factor_deterministic_phase(rng):
    z = cgauss(rng, (4, 2))
    A = embed(z, "pi")
    a, b = canonical_factor(A, 2), canonical_factor(A, 2)
    assert np.array_equal(a, b)
    for c in range(2):
        first = a[np.flatnonzero(np.abs(a[:, c]) > 1e-12)[0], c]
        assert abs(first.imag) < 1e-12 and first.real > 0


def test_canonical_factor_pads_lower_rank(rng):
    z = cgauss(rng, (4, 1))
    f = canonical_factor(embed(z, "pi"), 3)
    assert f.shape == (4, 3)
    assert np.all(f[:, 1:] == 0)


def test_canonical_factor_errors(rng):
    z = cgauss(rng, (4, 3))
    with pytest.raises(ValueError):
        canonical_factor(embed(z, "pi"), 2)
    with pytest.raises(ValueError):
        canonical_factor(-np.eye(3), 3)


# rank


def test_numerical_rank_examples(rng):
    assert numerical_rank(np.zeros((3, 2))) == 0
    Q = haar_unitary(3, rng)[:, :2]
    assert numerical_rank(Q @ np.diag([1.0, 1e-14]), 1e-10) == 1
    assert numerical_rank(cgauss(rng, (5, 3)), 1e-10) == 3
    with pytest.raises(ValueError):
        numerical_rank(np.eye(2), 0.0)


def test_quotient_point_equivalence(rng):
    x = cgauss(rng, (4, 2))
    p = QuotientPoint.from_matrix(x)
    q = QuotientPoint.from_matrix(x @ haar_unitary(2, rng))
    assert p.numerical_rank == 2 and p.equivalent(q)
    assert not p.equivalent(QuotientPoint.from_matrix(2 * x))


def test_psd_point_validation():
    with pytest.raises(ValueError):
        PsdPoint.from_matrix(np.array([[0, 1], [0, 0]]))
    with pytest.raises(ValueError):
        PsdPoint.from_matrix(np.diag([1.0, -1.0]))
    assert PsdPoint.from_matrix(np.diag([1.0, 0.0])).rank == 1


# properties


@settings(max_examples=60, deadline=None)
@given(seeds, shapes)
def test_triangle_inequalities(seed, shape):
    g = np.random.default_rng(seed)
    x, y, z = (cgauss(g, shape) for _ in range(3))
    for k in ("D", "d", "Dprime"):
        assert distance(x, z, k) <= (distance(x, y, k) + distance(y, z, k)) * (1 + 1e-9) + 1e-12
        assert distance(x, y, k) == pytest.approx(distance(y, x, k), rel=1e-10, abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(seeds, shapes)
def test_d_is_product_of_D_and_Dprime(seed, shape):
    x, y = pair(seed, *shape)
    assert distance(x, y, "d") == pytest.approx(distance(x, y, "D") * distance(x, y, "Dprime"), rel=1e-10)
    assert distance_closed_form(x, y, "d") == pytest.approx(
        distance_closed_form(x, y, "D") * distance_closed_form(x, y, "Dprime"), rel=1e-8
    )


@settings(max_examples=60, deadline=None)
@given(seeds, shapes)
def test_embedding_inequality_chains(seed, shape):
    n, r = shape
    x, y = pair(seed, n, r)
    D = distance(x, y, "D")
    d = distance(x, y, "d")
    th = np.linalg.norm(embed(x, "theta").matrix - embed(y, "theta").matrix)
    Pd = embed(x, "pi").matrix - embed(y, "pi").matrix
    p2 = np.linalg.norm(Pd)
    p1 = np.abs(np.linalg.eigvalsh(Pd)).sum()
    ps = np.linalg.norm(embed(x, "psi").matrix - embed(y, "psi").matrix)
    c = np.sqrt(2) if r == 1 else 2.0
    slack = 1e-9
    if n > 1:
        assert th / np.sqrt(2) <= D * (1 + slack)
    assert D <= th * (1 + slack)
    assert p2 <= p1 * (1 + slack)
    assert p1 <= d * (1 + slack)
    assert d <= c * ps * (1 + slack)


@settings(max_examples=60, deadline=None)
@given(seeds, shapes)
def test_refined_psi_inequality(seed, shape):
    x, y = pair(seed, *shape)
    nx, ny = np.linalg.norm(x), np.linalg.norm(y)
    nuc = np.linalg.svd(x.conj().T @ y, compute_uv=False).sum()
    lhs = np.linalg.norm(embed(x, "psi").matrix - embed(y, "psi").matrix) ** 2
    rhs = distance(x, y, "d") ** 2 / 4 + distance(x, y, "D") ** 4 / 4 + (nx - ny) ** 2 * (nuc + (nx + ny) ** 2 / 2)
    assert lhs >= rhs * (1 - 1e-9)


def test_pi_cannot_dominate_d_for_r2():
    ratios = []
    for delta in (1.0, 10.0, 100.0, 1000.0):
        x = np.diag([delta, 1.0]).astype(complex)
        y = np.diag([delta, 0.5]).astype(complex)
        num = distance(x, y, "d")
        den = np.linalg.norm(embed(x, "pi").matrix - embed(y, "pi").matrix)
        ratios.append(num / den)
    assert all(b > 5 * a for a, b in zip(ratios, ratios[1:]))
