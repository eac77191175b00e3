import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from bethekit import tensoralg as ta
from bethekit.chain import pauli_hamiltonian, pauli_hamiltonian_sparse


def test_unit_matrix_labels():
    e12 = ta.unit_matrix(1, 2)
    assert e12[0, 1] == 1 and np.count_nonzero(e12) == 1
    assert np.allclose(ta.unit_matrix(1, 1) + ta.unit_matrix(2, 2), np.eye(2))


def test_site_one_is_rightmost_factor():
    # flipping site 1 toggles bit 0
    flip = ta.embed_site(ta.SIGMA_X, 1, 3)
    psi = np.zeros(8)
    psi[0] = 1
    assert np.argmax(np.abs(flip @ psi)) == 1
    flip3 = ta.embed_site(ta.SIGMA_X, 3, 3)
    assert np.argmax(np.abs(flip3 @ psi)) == 4


def test_embed_operator_matches_embed_site_products():
    n = 4
    pair = np.kron(ta.SIGMA_Z, ta.SIGMA_PLUS)
    full = ta.embed_operator(pair, (3, 1), n)
    expected = ta.embed_site(ta.SIGMA_Z, 3, n) @ ta.embed_site(ta.SIGMA_PLUS, 1, n)
    assert np.allclose(full, expected)


def test_embed_operator_rejects_bad_sites():
    with pytest.raises(ta.PreconditionError):
        ta.embed_operator(np.eye(4), (1, 1), 3)
    with pytest.raises(ta.PreconditionError):
        ta.embed_operator(np.eye(4), (1, 5), 3)
    with pytest.raises(ta.PreconditionError):
        ta.embed_operator(np.eye(2), (1, 2), 3)


def test_dense_budget_enforced():
    with pytest.raises(ta.BudgetError):
        ta.embed_site(ta.SIGMA_Z, 1, ta.N_MAX_DENSE + 1)


def test_permutation_swaps_factors():
    a = np.array([1.0, 2.0])
    b = np.array([3.0, -1.0])
    assert np.allclose(ta.permutation_matrix() @ np.kron(a, b), np.kron(b, a))


def test_partial_trace_of_product():
    a = np.array([[1, 2], [3, 4]], dtype=complex)
    b = np.array([[0, 1j], [2, 5]], dtype=complex)
    ab = np.kron(a, b)
    assert np.allclose(ta.partial_trace(ab, "first"), np.trace(a) * b)
    assert np.allclose(ta.partial_trace(ab, "second"), np.trace(b) * a)


def test_trace_site_removes_one_site():
    n = 3
    op = ta.embed_site(ta.SIGMA_Z, 3, n) + ta.embed_site(ta.SIGMA_X, 1, n)
    # tracing site 2 leaves twice the two-site operator
    expected = 2 * (np.kron(ta.SIGMA_Z, np.eye(2)) + np.kron(np.eye(2), ta.SIGMA_X))
    assert np.allclose(ta.trace_site(op, 2), expected)


@given(st.integers(1, 8).flatmap(lambda n: st.tuples(st.just(n), st.integers(0, n))))
def test_sector_indices_have_fixed_popcount(args):
    n, k = args
    idx = ta.sector_indices(n, k)
    from math import comb

    assert len(idx) == comb(n, k)
    assert np.all(ta.popcount(idx) == k)
    assert np.all(np.diff(idx) > 0)


def test_ground_state_sector_dense_and_sparse_agree():
    n = 8
    dense = pauli_hamiltonian(n, 0.3)
    sparse = pauli_hamiltonian_sparse(n, 0.3)
    e1, v1 = ta.hermitian_ground_state(dense, sector=n // 2)
    e2, v2 = ta.hermitian_ground_state(sparse, sector=n // 2)
    assert abs(e1 - e2) < 1e-10
    assert abs(abs(np.vdot(v1, v2)) - 1) < 1e-9
    assert np.linalg.norm(dense @ v1 - e1 * v1) < 1e-9


def test_ground_state_rejects_non_hermitian_and_leaking_sector():
    with pytest.raises(ta.PreconditionError):
        ta.hermitian_ground_state(np.array([[0, 1], [0, 0]], dtype=complex))
    leak = ta.embed_site(ta.SIGMA_X, 1, 2)
    with pytest.raises(ta.PreconditionError):
        ta.hermitian_ground_state(leak, sector=1)


def test_sector_budget():
    big = sp.identity(2 ** (ta.N_MAX_SECTOR + 1), format="csr")
    with pytest.raises(ta.BudgetError):
        ta.hermitian_ground_state(big, sector=1)


def test_determinant_edge_cases():
    assert ta.determinant(np.zeros((0, 0))) == 1
    assert ta.determinant(np.array([[3 + 1j]])) == 3 + 1j
    with pytest.raises(ta.PreconditionError):
        ta.determinant(np.zeros((2, 3)))


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 6), st.integers(0, 10_000))
def test_cauchy_determinant_closed_form(n, seed):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=n) + 1j * rng.normal(size=n)
    y = rng.normal(size=n) + 1j * rng.normal(size=n) + 5
    m = 1.0 / np.subtract.outer(x, y)
    direct = ta.determinant(m)
    closed = ta.cauchy_determinant_closed(x, y)
    # LU accuracy degrades with the condition number of the Cauchy matrix
    assert abs(direct - closed) <= 1e-13 * np.linalg.cond(m) * abs(closed)
