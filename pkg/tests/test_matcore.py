import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_hermitian, random_psd
from opjensen.errors import DimensionError, DomainError, PositivityError
from opjensen.matcore import (
    Interval,
    SpectralInterval,
    apply_function,
    hermitian,
    inv_sqrt,
    loewner_leq,
    spectral_decompose,
)


def test_hermitian_symmetrizes_small_defects():
    X = np.array([[1.0, 2.0 + 1e-10], [2.0, 3.0]])
    H = hermitian(X)
    assert np.array_equal(H, H.conj().T)
    assert H.dtype == complex
    assert not H.flags.writeable


def test_hermitian_rejects_large_defect():
    with pytest.raises(DimensionError, match=r"entry \(0,1\)|entry \(1,0\)"):
        hermitian([[1.0, 2.0], [2.1, 3.0]])


def test_hermitian_rejects_non_square():
    with pytest.raises(DimensionError):
        hermitian(np.ones((2, 3)))


@pytest.mark.parametrize(
    "A, expected",
    [
        (np.diag([3.0, 1.0]), [1.0, 3.0]),
        (np.eye(2), [1.0, 1.0]),
        # lambda^2 - 4 lambda + 3 = 0
        (np.array([[2.0, 1.0], [1.0, 2.0]]), [1.0, 3.0]),
    ],
)
def test_spectral_decompose_examples(A, expected):
    dec = spectral_decompose(hermitian(A))
    np.testing.assert_allclose(dec.eigenvalues, expected, atol=1e-14)


def test_spectral_decompose_diag_eigenvectors_are_permuted_identity():
    dec = spectral_decompose(hermitian(np.diag([3.0, 1.0])))
    np.testing.assert_allclose(np.abs(dec.eigenvectors), [[0, 1], [1, 0]], atol=1e-14)


def test_spectral_decompose_invariants(rng):
    for d in range(1, 7):
        A = hermitian(random_hermitian(rng, d, scale=3.0))
        dec = spectral_decompose(A)
        lam = dec.eigenvalues
        assert np.all(np.diff(lam) >= 0)
        U = dec.eigenvectors
        np.testing.assert_allclose(U.conj().T @ U, np.eye(d), atol=1e-10)
        assert np.abs(dec.reconstruct() - A).max() <= 1e-10 * (1 + np.abs(lam).max())
        again = spectral_decompose(A)
        assert np.array_equal(again.eigenvalues, lam) and np.array_equal(again.eigenvectors, U)


def test_apply_function_examples():
    np.testing.assert_allclose(apply_function(hermitian(np.diag([1.0, 4.0])), np.sqrt), np.diag([1.0, 2.0]), atol=1e-14)
    A = hermitian([[2.0, 1.0], [1.0, 2.0]])
    np.testing.assert_allclose(apply_function(A, lambda t: t), A, atol=1e-14)
    # oracle: direct matrix product
    np.testing.assert_allclose(apply_function(A, lambda t: t ** 2), A @ A, atol=1e-13)
    np.testing.assert_allclose(A @ A, [[5, 4], [4, 5]])


def test_apply_function_commutes_with_argument(rng):
    A = hermitian(random_hermitian(rng, 5))
    G = apply_function(A, np.exp)
    assert np.linalg.norm(G @ A - A @ G, 2) <= 1e-9


def test_apply_function_domain_violation_names_eigenvalue():
    A = hermitian(np.diag([-0.5, 1.0]))
    with pytest.raises(DomainError, match=r"-0\.5.*\[0, inf\)"):
        apply_function(A, np.sqrt, Interval(0.0, np.inf, lo_closed=True))


def test_apply_function_clamps_near_closed_endpoint():
    A = hermitian(np.diag([-1e-11, 1.0]))
    out = apply_function(A, np.sqrt, Interval(0.0, np.inf, lo_closed=True))
    np.testing.assert_allclose(out, np.diag([0.0, 1.0]), atol=1e-14)


def test_apply_function_is_basis_independent_in_degenerate_eigenspace(rng):
    # eigenvalue 1 has multiplicity 2; two different eigenbases must give the same f(A)
    lam = np.array([1.0, 1.0, 3.0])
    U = np.linalg.qr(rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3)))[0]
    A = hermitian((U * lam) @ U.conj().T)
    expected = (U * np.exp(lam)) @ U.conj().T
    np.testing.assert_allclose(apply_function(A, np.exp), expected, atol=1e-12)


@pytest.mark.parametrize(
    "A, B, verdict, margin",
    [
        (np.eye(2), 2 * np.eye(2), True, 1.0),
        (np.diag([0.0, 2.0]), np.diag([1.0, 1.0]), False, -1.0),
        (np.array([[2.0, 1.0], [1.0, 2.0]]), np.array([[2.0, 1.0], [1.0, 2.0]]), True, 0.0),
    ],
)
def test_loewner_leq_examples(A, B, verdict, margin):
    ok, m = loewner_leq(hermitian(A), hermitian(B), 1e-10)
    assert ok is verdict
    assert m == pytest.approx(margin, abs=1e-14)


def test_loewner_leq_dimension_mismatch():
    with pytest.raises(DimensionError):
        loewner_leq(np.eye(2), np.eye(3))


def test_inv_sqrt_examples():
    np.testing.assert_allclose(inv_sqrt(hermitian(np.diag([4.0, 9.0]))), np.diag([0.5, 1 / 3]), atol=1e-15)
    np.testing.assert_allclose(inv_sqrt(hermitian(np.eye(3))), np.eye(3), atol=1e-15)
    A = hermitian([[2.0, 1.0], [1.0, 2.0]])
    S = inv_sqrt(A)
    # oracle: square the result, invert, compare with A
    np.testing.assert_allclose(np.linalg.inv(S @ S), A, atol=1e-12)
    np.testing.assert_allclose(np.linalg.eigvalsh(S), [1 / np.sqrt(3), 1.0], atol=1e-14)
    assert np.abs(S @ A @ S - np.eye(2)).max() <= 1e-8 * np.linalg.cond(A)


def test_inv_sqrt_requires_strict_positivity():
    with pytest.raises(PositivityError, match="minimum eigenvalue"):
        inv_sqrt(hermitian(np.diag([0.0, 1.0])))


def test_spectral_interval():
    iv = SpectralInterval.hull(hermitian(np.diag([1.0, 3.0])), hermitian(np.diag([-1.0, 2.0])))
    assert (iv.m, iv.M) == pytest.approx((-1.0, 3.0))
    with pytest.raises(DomainError):
        SpectralInterval(2.0, 1.0)


# properties ------------------------------------------------------------------

seeds = st.integers(min_value=0, max_value=2 ** 32 - 1)
dims = st.integers(min_value=1, max_value=6)


@settings(max_examples=60, deadline=None)
@given(seeds, dims, st.lists(st.floats(-2, 2), min_size=4, max_size=4))
def test_cubic_polynomials_match_matrix_products(seed, d, c):
    rng = np.random.default_rng(seed)
    A = hermitian(random_hermitian(rng, d))
    explicit = c[0] * np.eye(d) + c[1] * A + c[2] * A @ A + c[3] * A @ A @ A
    via_calculus = apply_function(A, lambda t: c[0] + c[1] * t + c[2] * t ** 2 + c[3] * t ** 3)
    assert np.abs(via_calculus - explicit).max() <= 1e-8


@settings(max_examples=40, deadline=None)
@given(seeds, dims)
def test_loewner_reflexive_and_transitive_on_chains(seed, d):
    rng = np.random.default_rng(seed)
    A = hermitian(random_hermitian(rng, d))
    B = hermitian(A + random_psd(rng, d))
    C = hermitian(B + random_psd(rng, d))
    assert loewner_leq(A, A, 1e-10)[0]
    assert loewner_leq(A, B, 1e-10)[0] and loewner_leq(B, C, 1e-10)[0]
    assert loewner_leq(A, C, 1e-10)[0]


@settings(max_examples=40, deadline=None)
@given(seeds, dims)
def test_pointwise_order_transfers_to_operators(seed, d):
    rng = np.random.default_rng(seed)
    A = hermitian(random_hermitian(rng, d))
    # cosh(t) >= 1 + t^2/2 >= 1 for every real t
    g = lambda t: 1 + t ** 2 / 2  # noqa: E731
    assert loewner_leq(apply_function(A, g), apply_function(A, np.cosh), 1e-9)[0]
    assert loewner_leq(np.eye(d), apply_function(A, g), 1e-9)[0]
