import pytest
from hypothesis import given

import oracles
from conftest import matrices, square_matrices
from opcouple.decomp import RelRegDecomposition, core_padded, decompose, verify_decomposition
from opcouple.errors import DimensionMismatch
from opcouple.ratmat import identity, inverse, matrix, zeros


def test_identity_has_trivial_kernel_and_cokernel():
    d = decompose(identity(3))
    assert d.x2.dim == 0 and d.x2p.dim == 0
    assert d.core == identity(3)


def test_zero_matrix_is_all_kernel():
    d = decompose(zeros(3, 3))
    assert d.core.shape == (0, 0)
    assert d.x2.vectors == identity(3)
    assert d.x2p.vectors == identity(3)


def test_nilpotent_example():
    U = matrix([[0, 1], [0, 0]])
    d = decompose(U)
    assert d.x2.vectors == matrix([[1], [0]])
    assert d.x1.vectors == matrix([[0], [1]])
    assert d.x1p.vectors == matrix([[1], [0]])
    assert d.x2p.vectors == matrix([[0], [1]])
    assert d.core == matrix([[1]])
    # oracle: the conjugation computed with Fraction arithmetic
    s_inv = oracles.to_grid(inverse(d.s))
    conj = oracles.mul(oracles.mul(s_inv, oracles.to_grid(U)), oracles.to_grid(d.r))
    assert conj == oracles.grid([[1, 0], [0, 0]])


def test_verify_round_trip_and_mismatch():
    U = matrix([[1, 2], [2, 4]])
    d = decompose(U)
    assert verify_decomposition(U, d)
    other = decompose(matrix([[1, 0], [0, 0]]))
    assert not verify_decomposition(U, other)


def test_scaled_core_is_rejected():
    U = matrix([[2, 1, 0], [4, 2, 1]])
    d = decompose(U)
    forged = RelRegDecomposition(d.x1, d.x2, d.x1p, d.x2p, d.core.scale(2), d.r, d.s)
    assert not verify_decomposition(U, forged)


def test_verify_rejects_wrong_dimensions():
    with pytest.raises(DimensionMismatch):
        verify_decomposition(identity(3), decompose(identity(2)))


def test_rectangular_counts():
    U = matrix([[1, 2, 3], [2, 4, 6]])
    d = decompose(U)
    assert (d.rank, d.kernel_dim, d.cokernel_dim) == (1, 2, 1)
    assert d.r.shape == (3, 3) and d.s.shape == (2, 2)
    assert core_padded(d).shape == (2, 3)


def test_json_keys():
    d = decompose(matrix([[0, 1], [0, 0]]))
    obj = d.to_json()
    assert set(obj) == {"x1", "x2", "x1p", "x2p", "core", "r", "s"}
    assert RelRegDecomposition.from_json(obj) == d


def test_zero_dimensional_operators():
    for shape in ((0, 0), (0, 3), (2, 0)):
        U = zeros(*shape)
        d = decompose(U)
        assert verify_decomposition(U, d)
        assert d.rank == 0


@given(matrices(max_rows=5, max_cols=5))
def test_decompose_then_verify(U):
    d = decompose(U)
    assert verify_decomposition(U, d)
    assert d.kernel_dim - d.cokernel_dim == U.cols - U.rows


@given(square_matrices(max_dim=6))
def test_square_kernel_matches_cokernel(U):
    d = decompose(U)
    assert d.x2.dim == d.x2p.dim
