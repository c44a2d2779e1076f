import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fusiongram.errors import AllZero, NotHermitian
from fusiongram.frames import frame_operator
from fusiongram.corpus import InstanceSpec, generate
from fusiongram.linalg import (
    DEFAULT_TOL, NotInvertible, TolerancePolicy, hermitian_eigenvalues,
    inverse_checked, kernel_basis, numerical_rank, operator_norm,
    orthonormal_basis, principal_angle, pseudo_inverse, singular_values,
)

from conftest import random_matrix


def test_orthonormal_basis_of_identity_is_identity():
    np.testing.assert_allclose(orthonormal_basis(np.eye(3)), np.eye(3), atol=1e-15)


def test_orthonormal_basis_collapses_duplicate_columns():
    q = orthonormal_basis(np.array([[1.0, 1.0], [0.0, 0.0]]))
    np.testing.assert_allclose(q, [[1.0], [0.0]], atol=1e-15)


def test_orthonormal_basis_rank_three_product():
    m = random_matrix(11, 6, 3) @ random_matrix(12, 3, 4)
    q = orthonormal_basis(m)
    s = np.linalg.svd(m, compute_uv=False)
    assert q.shape == (6, int(np.sum(s > 1e-12 * s[0] * 6)))
    np.testing.assert_allclose(q.conj().T @ q, np.eye(3), atol=1e-12)
    np.testing.assert_allclose(q @ q.conj().T @ m, m, atol=1e-12)


def test_orthonormal_basis_phase_convention():
    q = orthonormal_basis(random_matrix(3, 5, 2))
    for col in q.T:
        first = col[np.flatnonzero(np.abs(col) > 1e-14)[0]]
        assert first.imag == 0 and first.real > 0


def test_orthonormal_basis_rejects_zero():
    with pytest.raises(AllZero):
        orthonormal_basis(np.zeros((3, 2)))


@pytest.mark.parametrize("m, expected", [
    (np.diag([4.0, 1.0]), [1.0, 4.0]),
    (np.array([[1.5, 0.5], [0.5, 1.5]]), [1.0, 2.0]),
])
def test_hermitian_eigenvalues_small(m, expected):
    np.testing.assert_allclose(hermitian_eigenvalues(m), expected, atol=1e-14)


def test_frame_operator_is_positive_definite():
    W = generate(InstanceSpec(5, 8, (2, 2, 2, 3), "generic_frame"))
    s = frame_operator(W)
    np.linalg.cholesky(s)
    assert hermitian_eigenvalues(s)[0] > 0


def test_hermitian_eigenvalues_rejects_nonhermitian():
    with pytest.raises(NotHermitian):
        hermitian_eigenvalues(np.array([[1.0, 2.0], [0.0, 1.0]]))


def test_singular_values_simple():
    np.testing.assert_allclose(singular_values(np.eye(3)), [1, 1, 1])
    np.testing.assert_allclose(singular_values(np.diag([3.0, 0.0])), [3, 0])


def test_singular_values_frobenius_identity():
    m = random_matrix(4, 5, 3)
    s = singular_values(m)
    assert np.all(np.diff(s) <= 0)
    assert abs(np.sum(s ** 2) - np.linalg.norm(m) ** 2) <= 1e-12 * np.linalg.norm(m) ** 2


def _power_iteration(m, iters=500):
    x = np.ones(m.shape[1], dtype=complex)
    for _ in range(iters):
        x = m.conj().T @ (m @ x)
        x /= np.linalg.norm(x)
    return np.linalg.norm(m @ x)


def test_operator_norm():
    assert operator_norm(np.eye(4)) == pytest.approx(1.0)
    assert operator_norm(2 * np.eye(4)) == pytest.approx(2.0)
    m = random_matrix(8, 5, 5)
    assert operator_norm(m) == pytest.approx(_power_iteration(m), rel=1e-9)


def test_pseudo_inverse_examples():
    np.testing.assert_allclose(pseudo_inverse(np.diag([2.0, 4.0])), np.diag([0.5, 0.25]), atol=1e-15)
    np.testing.assert_array_equal(pseudo_inverse(np.zeros((3, 2))), np.zeros((2, 3)))


def test_pseudo_inverse_penrose_identities():
    m = random_matrix(21, 6, 3) @ random_matrix(22, 3, 4)
    p = pseudo_inverse(m)
    fro = np.linalg.norm(m)
    assert np.linalg.norm(m @ p @ m - m) <= 1e-10 * fro
    assert np.linalg.norm(p @ m @ p - p) <= 1e-10 * np.linalg.norm(p)
    assert np.linalg.norm(m @ p - (m @ p).conj().T) <= 1e-10
    assert np.linalg.norm(p @ m - (p @ m).conj().T) <= 1e-10


def test_inverse_checked():
    np.testing.assert_array_equal(inverse_checked(np.eye(3)), np.eye(3))
    r = inverse_checked(np.diag([1.0, 1e-15]))
    assert isinstance(r, NotInvertible) and not r
    m = random_matrix(9, 5, 5) + 5 * np.eye(5)
    assert np.linalg.norm(m @ inverse_checked(m) - np.eye(5)) <= 1e-10


def test_tolerance_policy_validation():
    with pytest.raises(ValueError):
        TolerancePolicy(rank_rel=-1.0)
    assert DEFAULT_TOL.rank_cutoff(2.0, (3, 4)) == pytest.approx(2.0 * 4 * 1e-12)


def test_kernel_and_principal_angle():
    m = np.array([[1.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    k = kernel_basis(m)
    assert k.shape == (3, 1)
    expected = np.array([[1.0], [-1.0], [0.0]]) / np.sqrt(2)
    assert principal_angle(k, expected) <= 1e-12
    assert principal_angle(np.eye(3)[:, :1], np.eye(3)[:, 1:2]) == pytest.approx(np.pi / 2)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2 ** 32), rows=st.integers(1, 7), cols=st.integers(1, 7),
       rank=st.integers(1, 7))
def test_rank_and_pinv_properties(seed, rows, cols, rank):
    rank = min(rank, rows, cols)
    m = random_matrix(seed, rows, rank) @ random_matrix(seed + 1, rank, cols)
    assert numerical_rank(m) == rank
    p = pseudo_inverse(m)
    assert np.linalg.norm(m @ p @ m - m) <= 1e-9 * max(1.0, np.linalg.norm(m))
    assert orthonormal_basis(m).shape[1] == rank
    assert operator_norm(m) == pytest.approx(np.linalg.norm(m, 2), rel=1e-12)
