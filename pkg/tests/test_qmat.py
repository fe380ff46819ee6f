import numpy as np
import pytest
from hypothesis import given, strategies as st

from qtradeoff import qmat
from qtradeoff.errors import NotHermitian, NotPsd, WrongDim

from conftest import random_hermitian


def hermitian_from_seed(d, seed):
    return random_hermitian(d, np.random.default_rng(seed))


@given(st.integers(2, 6), st.integers(0, 2**32 - 1))
def test_eig_reconstructs_and_is_unitary(d, seed):
    m = hermitian_from_seed(d, seed)
    vals, vecs = qmat.eig_hermitian(m)
    assert np.all(np.diff(vals) <= 0)
    assert np.max(np.abs(vecs @ np.diag(vals) @ vecs.conj().T - m)) < 1e-12 * max(1.0, np.abs(m).max())
    assert np.max(np.abs(vecs.conj().T @ vecs - np.eye(d))) < 1e-12


@given(st.integers(2, 5), st.integers(0, 2**32 - 1))
def test_eigvalsh_agrees_with_lapack(d, seed):
    m = hermitian_from_seed(d, seed)
    assert np.allclose(qmat.eigvalsh(m), np.linalg.eigvalsh(m)[::-1], atol=1e-12)


def test_eig_degenerate_qubit():
    vals, vecs = qmat.eig_hermitian(np.eye(2))
    assert np.allclose(vals, [1, 1])
    assert np.allclose(vecs.conj().T @ vecs, np.eye(2))


def test_eig_rejects_non_hermitian():
    with pytest.raises(NotHermitian):
        qmat.eig_hermitian(np.array([[0, 1], [0, 0]], dtype=complex))


@given(st.integers(2, 4), st.integers(0, 2**32 - 1))
def test_psd_sqrt_squares_back(d, seed):
    g = hermitian_from_seed(d, seed)
    m = g @ g
    root = qmat.psd_sqrt(m)
    assert qmat.is_psd(root)
    assert np.max(np.abs(root @ root - m)) < 1e-10 * max(1.0, np.abs(m).max())


def test_psd_sqrt_rejects_negative():
    with pytest.raises(NotPsd):
        qmat.psd_sqrt(np.diag([1.0, -0.1]))


def test_psd_sqrt_clamps_rounding():
    root = qmat.psd_sqrt(np.diag([1.0, -1e-13]))
    assert np.allclose(root, np.diag([1.0, 0.0]))


def test_predicates():
    assert qmat.is_hermitian(np.diag([1.0, 2.0]))
    assert not qmat.is_hermitian(np.array([[0, 1j], [1j, 0]]))
    assert qmat.is_unitary(np.array([[0, 1], [1, 0]]))
    assert not qmat.is_unitary(2 * np.eye(2))
    assert qmat.is_psd(np.eye(3))
    assert not qmat.is_psd(np.diag([1.0, -1.0]))


def test_singular_values_and_norms(rng):
    a = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    sv = qmat.singular_values(a)
    assert np.isclose(np.sqrt(np.sum(sv**2)), qmat.frobenius_norm(a))
    assert np.isclose(qmat.largest_eigenvalue(a.conj().T @ a), sv[0] ** 2)


def test_top_eigenvector():
    v = qmat.top_eigenvector(np.diag([0.2, 3.0, 1.0]))
    assert np.isclose(abs(v[1]), 1.0)


def test_as_matrix_rejects_non_square():
    with pytest.raises(WrongDim):
        qmat.as_matrix(np.ones((2, 3)))
