import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from chemtau.eigen import EigenError, balance, eigenvalues, eigenvector, hessenberg
from chemtau.reactor import species_jacobian


def charpoly_roots(A, dps=60):
    """Eigenvalues as roots of det(zI - A), built by Faddeev-LeVerrier in high precision."""
    mpmath.mp.dps = dps
    n = A.shape[0]
    M = mpmath.matrix(A.tolist())
    I = mpmath.eye(n)
    coeffs = [mpmath.mpf(1)]
    Mk = mpmath.zeros(n, n)
    c = mpmath.mpf(1)
    for k in range(1, n + 1):
        Mk = M * Mk + c * I
        AM = M * Mk
        c = -sum(AM[i, i] for i in range(n)) / k
        coeffs.append(c)
    roots = mpmath.polyroots(coeffs, maxsteps=400, extraprec=400)
    return np.array([complex(r) for r in roots])


def match(a, b):
    """Greedy pairing distance between two spectra."""
    b = list(b)
    worst = 0.0
    for z in sorted(a, key=lambda z: -abs(z)):
        j = int(np.argmin([abs(z - w) for w in b]))
        worst = max(worst, abs(z - b.pop(j)))
    return worst


def test_diagonal():
    lam = eigenvalues(np.diag([-1.0, -100.0]))
    assert sorted(lam.real) == [-100.0, -1.0]
    assert np.all(lam.imag == 0)


def test_triangular_first_order():
    kappa = 1e3
    J = np.array([[-kappa, 0.0], [kappa * 1.0, 0.0]])
    lam = eigenvalues(J)
    assert sorted(lam.real) == [-kappa, 0.0]


def test_complex_pair():
    lam = eigenvalues(np.array([[0.0, -2.0], [2.0, 0.0]]))
    np.testing.assert_allclose(sorted(lam.imag), [-2.0, 2.0])
    np.testing.assert_allclose(lam.real, 0.0, atol=1e-15)


@pytest.mark.parametrize("seed", range(5))
def test_random_against_charpoly(seed):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((10, 10))
    lam = eigenvalues(A)
    ref = charpoly_roots(A)
    assert match(lam, ref) <= 1e-8 * max(1.0, np.abs(ref).max())


@pytest.mark.parametrize("seed", range(5))
def test_residuals(seed):
    rng = np.random.default_rng(100 + seed)
    n = 12
    # badly scaled rows and columns, as in kinetics Jacobians
    D = 10.0 ** rng.uniform(-4, 4, n)
    A = (rng.standard_normal((n, n)) * D[:, None]) / D[None, :]
    lam = eigenvalues(A)
    norm = np.linalg.norm(A, 2)
    for z in lam:
        v = eigenvector(A, z)
        assert np.linalg.norm(A @ v - z * v) <= 1e-8 * norm


def test_gri_jacobian_residuals_and_numpy(builtin):
    m, traj = builtin("co-isothermal", t_end=1e-5)
    J = species_jacobian(m, traj.samples[-1].state)
    lam = eigenvalues(J)
    norm = np.linalg.norm(J, 2)
    for z in lam:
        v = eigenvector(J, z)
        assert np.linalg.norm(J @ v - z * v) <= 1e-8 * norm
    assert np.abs(lam).max() == pytest.approx(np.abs(np.linalg.eigvals(J)).max(), rel=1e-9)


def test_permutation_invariance():
    rng = np.random.default_rng(7)
    A = rng.standard_normal((15, 15)) * 10.0 ** rng.uniform(-3, 3, (15, 1))
    p = rng.permutation(15)
    a = eigenvalues(A)
    b = eigenvalues(A[np.ix_(p, p)])
    assert match(a, b) <= 1e-10 * np.abs(a).max()
    assert np.abs(a).max() == pytest.approx(np.abs(b).max(), rel=1e-12)


@settings(max_examples=40, deadline=None)
@given(arrays(np.float64, (6, 6), elements=st.floats(-1e3, 1e3, allow_subnormal=False)))
def test_trace_and_spectral_radius(A):
    lam = eigenvalues(A)
    scale = max(1.0, np.abs(A).max())
    assert abs(lam.sum().real - np.trace(A)) <= 1e-9 * 6 * scale
    assert abs(lam.sum().imag) <= 1e-9 * 6 * scale
    # backward error: each lambda is an exact eigenvalue of a nearby matrix.
    # comparing spectral radii directly fails on defective matrices, where
    # eigenvalues move by sqrt(eps) under an eps perturbation
    I = np.eye(6)
    for z in lam:
        assert np.linalg.svd(A - z * I, compute_uv=False)[-1] <= 1e-10 * scale


@pytest.mark.parametrize("scale", [1.6e-304, 1e-200, 1e200, 1e300])
def test_extreme_magnitudes(scale):
    lam = eigenvalues(np.full((6, 6), scale))
    # rank one: one eigenvalue 6*scale, the rest zero
    assert np.abs(lam).max() == pytest.approx(6 * scale, rel=1e-12)
    assert np.sort(np.abs(lam))[-2] <= 1e-12 * 6 * scale
    assert np.all(eigenvalues(np.zeros((4, 4))) == 0)


def test_tiny_block_beside_unit_entry():
    # column norms of the tiny block underflow if squared directly
    A = np.full((6, 6), 2.0543774e-179)
    A[0, 0] = 1.0
    assert np.all(np.tril(hessenberg(A), -2) == 0)
    lam = eigenvalues(A)
    assert np.abs(lam).max() == pytest.approx(1.0, rel=1e-15)
    assert abs(lam.sum().real - np.trace(A)) <= 1e-15


def test_balance_is_similarity():
    rng = np.random.default_rng(3)
    A = rng.standard_normal((8, 8)) * 10.0 ** rng.uniform(-6, 6, (8, 1))
    B, d = balance(A)
    np.testing.assert_allclose(B, A * d[None, :] / d[:, None], rtol=1e-15)
    assert np.all(np.log2(d) == np.round(np.log2(d)))


def test_hessenberg_form():
    rng = np.random.default_rng(4)
    A = rng.standard_normal((9, 9))
    H = hessenberg(A)
    assert np.all(np.tril(H, -2) == 0)
    np.testing.assert_allclose(np.trace(H), np.trace(A), atol=1e-12)
    np.testing.assert_allclose(np.linalg.norm(H), np.linalg.norm(A), rtol=1e-13)


def test_input_errors():
    with pytest.raises(EigenError):
        eigenvalues(np.array([[1.0, np.nan], [0.0, 1.0]]))
    with pytest.raises(ValueError):
        eigenvalues(np.ones((2, 3)))
    assert eigenvalues(np.zeros((0, 0))).size == 0
    assert eigenvalues(np.array([[-4.0]]))[0] == -4.0
