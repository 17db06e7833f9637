import json
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from conftest import matrices, square_matrices
from opcouple.errors import DimensionMismatch, MatrixFormatError, NotSquare, RankDeficient, SingularMatrix
from opcouple.ratmat import (
    Basis,
    RatMatrix,
    block,
    complement,
    diag,
    hstack,
    identity,
    inverse,
    is_invertible,
    kernel_basis,
    left_inverse,
    matrix,
    random_rank_matrix,
    rank,
    rank_nullity,
    rat,
    rref,
    row_reduce_with_transform,
    vstack,
    zeros,
)


def test_rationals_are_normalised():
    x = rat("-6/4")
    assert (int(x.numerator), int(x.denominator)) == (-3, 2)
    assert rat("0/7") == 0 and int(rat("0/7").denominator) == 1
    assert rat(5) == rat("5/1")


@pytest.mark.parametrize("bad", ["1.5", "1/0", "", "a", "1//2", "2/-3"])
def test_malformed_entry_strings(bad):
    with pytest.raises(MatrixFormatError):
        rat(bad)


@pytest.mark.parametrize("bad", [0.5, True])
def test_inexact_scalars_refused(bad):
    with pytest.raises(TypeError):
        rat(bad)


def test_rank_nullity_examples():
    assert rank_nullity(identity(2)) == (2, 0)
    assert rank_nullity(zeros(2, 2)) == (0, 2)
    A = matrix([[1, 2], [2, 4]])
    assert rank_nullity(A) == (1, 1)
    assert oracles.rank_by_minors(oracles.to_grid(A), 2) == 1


def test_kernel_basis_examples():
    assert kernel_basis(zeros(2, 2)).vectors == identity(2)
    k = kernel_basis(matrix([[0, 1], [0, 0]]))
    assert k.vectors == matrix([[1], [0]])
    assert kernel_basis(matrix([[1, 1], [0, -1]])).dim == 0
    assert kernel_basis(matrix([[1, 2], [2, 4]])).vectors == matrix([[-2], [1]])


def test_kernel_uses_free_columns_in_order():
    # free columns 1 and 3 of the RREF
    A = matrix([[1, 2, 0, 3], [0, 0, 1, 4]])
    assert kernel_basis(A).vectors == matrix([[-2, -3], [1, 0], [0, -4], [0, 1]])


def test_complement_examples():
    assert complement(Basis.of(matrix([[1], [0]]))).vectors == matrix([[0], [1]])
    assert complement(Basis.of(matrix([[1], [1]]))).vectors == matrix([[1], [0]])
    assert complement(Basis.of(identity(3))).dim == 0
    assert complement(Basis.of(zeros(2, 0))).vectors == identity(2)


def test_rank_deficient_basis_rejected():
    with pytest.raises(RankDeficient):
        Basis.of(matrix([[1, 2], [2, 4]]))
    with pytest.raises(RankDeficient):
        complement(matrix([[1, 1], [1, 1]]))


def test_inverse_examples():
    assert inverse(identity(3)) == identity(3)
    A = matrix([[1, 1], [0, -1]])
    assert inverse(A) == A
    with pytest.raises(SingularMatrix):
        inverse(matrix([[1, 2], [2, 4]]))
    with pytest.raises(NotSquare):
        inverse(zeros(2, 3))
    assert inverse(zeros(0, 0)) == zeros(0, 0)


def test_block_examples():
    u = matrix([[5]])
    assert diag(u, identity(1)) == matrix([[5, 0], [0, 1]])
    one = matrix([[1]])
    assert block([[one, one], [one, matrix([[2]])]]) == matrix([[1, 1], [1, 2]])
    g = block([[zeros(0, 2), zeros(0, 1)], [matrix([[1, 2]]), matrix([[3]])]])
    assert g == matrix([[1, 2, 3]])


def test_block_rejects_inconsistent_grids():
    with pytest.raises(DimensionMismatch):
        block([[identity(1), identity(2)]])
    with pytest.raises(DimensionMismatch):
        block([[identity(1), identity(1)], [identity(1)]])
    with pytest.raises(DimensionMismatch):
        identity(2) @ identity(3)
    with pytest.raises(DimensionMismatch):
        identity(2) + identity(3)


def test_zero_dimensional_products():
    assert zeros(2, 0) @ zeros(0, 3) == zeros(2, 3)
    assert zeros(0, 2) @ zeros(2, 0) == identity(0)
    assert identity(0).is_identity()


def test_random_rank_matrix_examples():
    assert is_invertible(random_rank_matrix(1, 3, 3, 3))
    assert random_rank_matrix(1, 3, 3, 0) == zeros(3, 3)
    assert rank_nullity(random_rank_matrix(1, 4, 2, 2)) == (2, 0)
    assert random_rank_matrix(5, 4, 4, 2) == random_rank_matrix(5, 4, 4, 2)
    with pytest.raises(DimensionMismatch):
        random_rank_matrix(0, 2, 3, 3)


def test_json_encoding():
    A = matrix([["1/2", -3], [0, "4/6"]])
    obj = A.to_json()
    assert obj == {"rows": 2, "cols": 2, "entries": [["1/2", "-3"], ["0", "2/3"]]}
    assert RatMatrix.from_json(json.loads(json.dumps(obj))) == A
    assert zeros(3, 0).to_json() == {"rows": 3, "cols": 0, "entries": []}
    assert RatMatrix.from_json({"rows": 0, "cols": 2, "entries": []}) == zeros(0, 2)


@pytest.mark.parametrize(
    "payload",
    [
        [],
        {"rows": 1, "cols": 1},
        {"rows": -1, "cols": 1, "entries": []},
        {"rows": 1, "cols": 2, "entries": [["1"]]},
        {"rows": 1, "cols": 1, "entries": [["x"]]},
        {"rows": 1, "cols": 1, "entries": [[1.5]]},
        {"rows": 0, "cols": 1, "entries": [["1"]]},
    ],
)
def test_json_rejects_malformed(payload):
    with pytest.raises((MatrixFormatError, TypeError)):
        RatMatrix.from_json(payload)


def test_rref_transform():
    A = matrix([[0, 2, 4], [1, 1, 1], [1, 3, 5]])
    R, pivots, P = row_reduce_with_transform(A)
    assert P @ A == R
    assert rref(A) == (R, pivots)
    assert pivots == [0, 1]


# -- properties ---------------------------------------------------------------


@given(matrices())
def test_rank_plus_nullity_and_transpose(A):
    r, n = rank_nullity(A)
    assert r + n == A.cols
    assert rank(A.T) == r
    assert r == oracles.rank_by_minors(oracles.to_grid(A), A.cols)


@given(matrices(max_rows=5, max_cols=5))
def test_kernel_is_annihilated(A):
    k = kernel_basis(A)
    assert (A @ k.vectors).is_zero()
    assert k.dim == A.cols - rank(A)


@given(matrices(max_rows=5, max_cols=4))
def test_complement_completes_a_basis(A):
    S = kernel_basis(A)
    assert is_invertible(hstack([S.vectors, complement(S).vectors]))


@given(square_matrices(max_dim=5))
def test_inverse_round_trip(A):
    if not is_invertible(A):
        with pytest.raises(SingularMatrix):
            inverse(A)
        return
    Ai = inverse(A)
    assert (A @ Ai).is_identity() and (Ai @ A).is_identity()
    assert inverse(Ai) == A
    assert oracles.det(oracles.to_grid(A)) != 0


@given(st.integers(0, 3), st.integers(0, 3), st.integers(0, 3), st.integers(0, 3), st.data())
def test_nested_block_assembly(r1, r2, c1, c2, data):
    a, b = data.draw(matrices(rows=r1, cols=c1)), data.draw(matrices(rows=r1, cols=c2))
    c, d = data.draw(matrices(rows=r2, cols=c1)), data.draw(matrices(rows=r2, cols=c2))
    whole = block([[a, b], [c, d]])
    assert whole.shape == (r1 + r2, c1 + c2)
    assert whole == vstack([hstack([a, b]), hstack([c, d])])
    assert whole == hstack([vstack([a, c]), vstack([b, d])])
    assert whole.split([r1, r2], [c1, c2]) == [[a, b], [c, d]]


@given(st.integers(0, 10_000), st.integers(0, 5), st.integers(0, 5), st.data())
def test_random_rank_is_exact(seed, m, n, data):
    r = data.draw(st.integers(0, min(m, n)))
    assert rank(random_rank_matrix(seed, m, n, r)) == r


@given(matrices(max_rows=5, max_cols=3))
def test_left_inverse_of_full_column_rank(A):
    if rank(A) != A.cols:
        return
    assert (left_inverse(A) @ A).is_identity()


@given(matrices(bound=5))
def test_json_round_trip(A):
    assert RatMatrix.from_json(json.loads(json.dumps(A.to_json()))) == A


def test_matmul_against_schoolbook():
    rng = random.Random(3)
    for _ in range(20):
        m, t, n = rng.randint(0, 4), rng.randint(0, 4), rng.randint(0, 4)
        A = matrix([[rng.randint(-5, 5) for _ in range(t)] for _ in range(m)], cols=t)
        B = matrix([[rng.randint(-5, 5) for _ in range(n)] for _ in range(t)], cols=n)
        assert (A @ B).shape == (m, n)
        assert oracles.to_grid(A @ B) == oracles.mul(oracles.to_grid(A), oracles.to_grid(B), cols=n)
