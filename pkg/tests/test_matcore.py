import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from charur.matcore import (
    NotPositiveDefiniteError,
    SingularTransformError,
    char_coeffs_faddeev,
    char_coeffs_minors,
    congruence,
    is_hermitian,
    is_psd,
    minors_of_order,
    principal_minor,
    symplectic_form,
    williamson,
)


@pytest.mark.parametrize(
    "M, idx, expected",
    [
        (np.eye(3), (0, 1), 1.0),
        (np.diag([2.0, 3.0, 4.0]), (0, 2), 8.0),
        (np.array([[0, 0.25], [-0.25, 0]]), (0, 1), 1 / 16),
    ],
)
def test_principal_minor_values(M, idx, expected):
    assert principal_minor(M, idx) == pytest.approx(expected, rel=1e-14)


def test_principal_minor_rejects_bad_indices():
    with pytest.raises(ValueError):
        principal_minor(np.eye(3), (1, 1))
    with pytest.raises(IndexError):
        principal_minor(np.eye(3), (0, 3))
    with pytest.raises(ValueError):
        principal_minor(np.eye(3), ())


def test_minors_of_order_keys_are_lexicographic():
    minors = minors_of_order(np.diag([1.0, 2.0, 3.0]), 2)
    assert list(minors) == [(0, 1), (0, 2), (1, 2)]
    assert minors[(1, 2)] == pytest.approx(6.0)


@pytest.mark.parametrize("fn", [char_coeffs_minors, char_coeffs_faddeev])
@pytest.mark.parametrize(
    "M, expected",
    [
        (np.eye(3), [1, 3, 3, 1]),
        (np.diag([2.0, 3.0, 4.0]), [1, 9, 26, 24]),
    ],
)
def test_char_coeffs_known(fn, M, expected):
    np.testing.assert_allclose(fn(M), expected, atol=1e-12)


def test_antisymmetric_coefficients():
    a, b, c = 0.3, -1.2, 0.7
    M = np.array([[0, c, -b], [-c, 0, a], [b, -a, 0]])
    coeffs = char_coeffs_minors(M)
    np.testing.assert_allclose(coeffs, [1, 0, a * a + b * b + c * c, 0], atol=1e-14)
    assert coeffs[1] == 0 and coeffs[3] == 0


def test_char_coeffs_rejects_non_square_and_large():
    with pytest.raises(ValueError):
        char_coeffs_minors(np.ones((2, 3)))
    with pytest.raises(ValueError):
        char_coeffs_minors(np.eye(13))


def test_char_coeffs_agree_with_polynomial():
    rng = np.random.default_rng(0)
    M = rng.normal(size=(5, 5))
    M = M + M.T
    # det(M - x) = sum C_r (-x)^(n-r); numpy's poly gives det(x - M)
    poly = np.poly(M)
    n = 5
    expected = [poly[r] * (-1) ** r for r in range(n + 1)]
    np.testing.assert_allclose(char_coeffs_minors(M), expected, rtol=1e-10, atol=1e-10)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 8), st.integers(0, 2**32 - 1))
def test_faddeev_matches_minors(n, seed):
    rng = np.random.default_rng(seed)
    M = rng.normal(size=(n, n))
    a, b = char_coeffs_minors(M), char_coeffs_faddeev(M)
    scale = max(1.0, np.abs(a).max())
    np.testing.assert_allclose(a, b, atol=1e-9 * scale)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 7), st.integers(0, 2**32 - 1))
def test_psd_principal_minors_nonnegative(n, seed):
    rng = np.random.default_rng(seed)
    G = rng.normal(size=(n, n))
    S = G @ G.T
    for r in range(1, n + 1):
        assert min(minors_of_order(S, r).values()) >= -1e-10 * np.abs(S).max() ** r


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 6), st.integers(0, 2**32 - 1))
def test_congruence_transformation_law(n, seed):
    # C_n(L M L^T) = det(L)^2 C_n(M); orthogonal L preserves every C_r
    rng = np.random.default_rng(seed)
    M = rng.normal(size=(n, n))
    M = M + M.T
    L = rng.normal(size=(n, n))
    top = char_coeffs_minors(congruence(L, M))[n]
    assert top == pytest.approx(np.linalg.det(L) ** 2 * np.linalg.det(M), rel=1e-8, abs=1e-10)
    Q, _ = np.linalg.qr(rng.normal(size=(n, n)))
    np.testing.assert_allclose(
        char_coeffs_minors(congruence(Q, M)), char_coeffs_minors(M), atol=1e-9
    )


def test_hermitian_and_psd():
    assert is_hermitian(np.eye(2))
    assert is_psd(np.eye(2))
    assert not is_psd(np.diag([1.0, -1.0]))
    with pytest.raises(ValueError):
        is_psd(np.array([[0, 1], [0, 0]]))


def test_gram_matrix_is_psd():
    rng = np.random.default_rng(1)
    V = rng.normal(size=(3, 5)) + 1j * rng.normal(size=(3, 5))
    assert is_psd(V.conj() @ V.T)


def test_congruence_identity_and_singular():
    M = np.arange(9.0).reshape(3, 3)
    np.testing.assert_array_equal(congruence(np.eye(3), M), M)
    with pytest.raises(SingularTransformError):
        congruence(np.zeros((3, 3)), M)


@pytest.mark.parametrize(
    "sigma, nus",
    [
        (np.eye(2), [1.0]),
        (np.diag([2.0, 0.5]), [1.0]),
        (0.5 * np.eye(2), [0.5]),
        # (q1, q2, p1, p2) ordering: modes pair entries 0,2 and 1,3
        (np.diag([1.0, 3.0, 2.0, 0.5]), [np.sqrt(2.0), np.sqrt(1.5)]),
    ],
)
def test_williamson(sigma, nus):
    L, got = williamson(sigma)
    np.testing.assert_allclose(got, nus, rtol=1e-12)
    N = sigma.shape[0] // 2
    J = symplectic_form(N)
    np.testing.assert_allclose(L @ J @ L.T, J, atol=1e-12)
    np.testing.assert_allclose(L @ sigma @ L.T, np.diag(np.concatenate([got, got])), atol=1e-12)


def test_williamson_identity_gives_identity():
    L, _ = williamson(np.eye(2))
    np.testing.assert_allclose(L, np.eye(2), atol=1e-12)


def test_williamson_random_two_mode():
    rng = np.random.default_rng(7)
    G = rng.normal(size=(4, 4))
    sigma = G @ G.T + 0.1 * np.eye(4)
    L, nus = williamson(sigma)
    J = symplectic_form(2)
    np.testing.assert_allclose(L @ J @ L.T, J, atol=1e-10)
    np.testing.assert_allclose(L @ sigma @ L.T, np.diag(np.tile(nus, 2)), atol=1e-10)
    # symplectic eigenvalues are the moduli of the eigenvalues of i J sigma
    ev = np.sort(np.abs(np.linalg.eigvals(1j * J @ sigma)))[::2]
    np.testing.assert_allclose(np.sort(nus), ev, rtol=1e-10)


def test_williamson_rejects_singular():
    with pytest.raises(NotPositiveDefiniteError):
        williamson(np.diag([1.0, 0.0]))
