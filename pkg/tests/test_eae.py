import random
from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from conftest import eae_pairs, rectangular_eae_pairs
from opcouple.decomp import decompose
from opcouple.eae import (
    DerivedBlocks,
    KernelCokernelIso,
    WitnessParams,
    assemble_witness,
    build_eae_witness,
    check_special_form,
    derive_blocks,
    e_to_decomposed,
    eae_test,
    eblock,
    eblock_factorization,
    f_to_original,
    f_decomposed,
    middle_factor,
    verify_eae,
    verify_eae_condition,
    verify_eae_condition_decomposed,
)
from opcouple.errors import DimensionMismatch, NotEae, NotInForm, SingularCore
from opcouple.ratmat import block, diag, identity, inverse, is_invertible, matrix, rank, zeros


def test_eae_test_examples():
    iso = eae_test(diag(identity(1), zeros(1, 1)), diag(identity(2), zeros(1, 1)))
    assert iso is not None and iso.e_prime == identity(1) and iso.f_prime == identity(1)
    assert eae_test(zeros(2, 2), zeros(3, 3)) is None
    U = matrix([[1, 2], [2, 4]])
    same = eae_test(U, U)
    assert same.e_prime.is_identity() and same.f_prime.is_identity()


def test_scalar_zero_witness():
    U = V = matrix([[0]])
    w = build_eae_witness(U, V, KernelCokernelIso(identity(1), identity(1)))
    assert w.e == matrix([[1, 0], [0, -1]])
    assert w.f == matrix([[1, 1], [0, -1]])
    # oracle: diag(0, 1) == E diag(0, 1) F with Fraction arithmetic
    lhs = oracles.mul(oracles.mul(oracles.to_grid(w.e), oracles.grid([[0, 0], [0, 1]])), oracles.to_grid(w.f))
    assert lhs == oracles.grid([[0, 0], [0, 1]])
    assert verify_eae(U, V, w.e, w.f)


def test_invertible_pair_zero_params():
    U = matrix([[2, 1], [1, 1]])
    V = matrix([[3]])
    # both invertible but of different sizes: still EAE (no kernel, no cokernel)
    w = build_eae_witness(U, V)
    dv = decompose(V)
    assert w.derived.x1.is_zero()
    assert w.derived.x5 == inverse(dv.core)
    assert verify_eae(U, V, w.e, w.f)


def test_build_rejects_non_eae_and_bad_shapes():
    with pytest.raises(NotEae):
        build_eae_witness(zeros(2, 2), zeros(3, 3))
    U = matrix([[1, 0], [0, 0]])
    du = decompose(U)
    bad = WitnessParams.zeros(du, du).replace(y1=zeros(2, 2))
    with pytest.raises(DimensionMismatch):
        build_eae_witness(U, U, params=bad)
    with pytest.raises(DimensionMismatch):
        build_eae_witness(U, U, iso=KernelCokernelIso(identity(2), identity(1)))


def test_verify_eae_negative_cases():
    U, V = matrix([[1]]), matrix([[2]])
    assert not verify_eae(U, V, identity(2), identity(2))
    w = build_eae_witness(matrix([[1, 0], [0, 0]]), matrix([[0, 0], [0, 3]]))
    Upair, Vpair = matrix([[1, 0], [0, 0]]), matrix([[0, 0], [0, 3]])
    assert verify_eae(Upair, Vpair, w.e, w.f)
    rows = [list(r) for r in w.f.entries]
    # rows of F landing in the identity block of diag(V, I) always reach the product
    rows[-1][0] += 1
    assert not verify_eae(Upair, Vpair, w.e, matrix(rows))
    with pytest.raises(DimensionMismatch):
        verify_eae(U, V, identity(3), identity(2))


def test_special_form_rejects_plain_witnesses():
    U = matrix([[1]])
    # E = F = I relates U to itself but F12 is not the identity
    assert verify_eae(U, U, identity(2), identity(2))
    assert not check_special_form(identity(2), identity(2), U, U)
    w = build_eae_witness(U, U)
    assert check_special_form(w.e, w.f, U, U)
    doubled = block([[w.f.submatrix(0, 1, 0, 1), matrix([[2]])], [w.f.submatrix(1, 2, 0, 1), w.f.submatrix(1, 2, 1, 2)]])
    assert not check_special_form(w.e, doubled, U, U)


def test_eblock_examples():
    u, v = matrix([[2]]), matrix([[3]])
    e = eblock(u, v, zeros(1, 1), inverse(v), zeros(1, 1), zeros(1, 1))
    assert e == matrix([[0, 2], [Fraction(1, 3), 0]])
    assert is_invertible(e)
    singular = eblock(matrix([[1]]), matrix([[1]]), zeros(1, 1), zeros(1, 1), zeros(1, 1), zeros(1, 1))
    assert not is_invertible(singular)
    with pytest.raises(DimensionMismatch):
        eblock(u, v, zeros(2, 1), zeros(1, 1), zeros(1, 1), zeros(1, 1))


def test_factorization_examples():
    u, v = matrix([[2]]), matrix([[5]])
    x1, x5, mid = eblock_factorization(u, v, zeros(1, 1), zeros(1, 1))
    assert mid == matrix([[0, 1], [1, 0]]) and x1.is_zero() and x5 == inverse(v)
    i2 = identity(2)
    mid = middle_factor(i2, i2)
    assert mid == block([[-i2, i2], [i2.scale(2), -i2]])
    assert oracles.det(oracles.to_grid(mid)) != 0
    with pytest.raises(SingularCore):
        eblock_factorization(zeros(1, 1), v, zeros(1, 1), zeros(1, 1))


def test_condition_detects_broken_y4():
    U = matrix([[1, 0, 0], [0, 0, 0], [0, 0, 2]])
    V = matrix([[0, 0], [0, 5]])
    w = build_eae_witness(U, V)
    du, dv = decompose(U), decompose(V)
    assert verify_eae_condition(U, V, w.e, w.f)
    broken = DerivedBlocks(w.derived.x1, w.derived.x5, w.derived.y4 + identity(1))
    bad = assemble_witness(du, dv, w.iso, w.params, broken)
    assert not verify_eae_condition(U, V, bad.e, bad.f)


def test_condition_structural_errors():
    U = matrix([[1, 0], [0, 0]])
    with pytest.raises(NotInForm):
        verify_eae_condition(U, U, identity(4), identity(4))
    with pytest.raises(NotInForm):
        verify_eae_condition(U, zeros(2, 2), identity(4), identity(4))


def test_singular_core_witness():
    # U' = V' = [0] treated as an (uncompressed) core: 1 + Y1 Y3 = 0 forces Y1 = 1, Y3 = -1
    core = matrix([[0]])
    y1, y3 = matrix([[1]]), matrix([[-1]])
    f_dec = f_decomposed(y1, zeros(0, 1), y3, zeros(0, 1), identity(0))
    e_dec = block([[matrix([[1]]), core], [matrix([[0]]), -y1]])
    assert f_dec == matrix([[1, 1], [0, -1]])
    assert verify_eae_condition_decomposed(core, core, e_dec, f_dec, 0, 0)
    assert verify_eae(core, core, e_dec, f_dec)
    lhs = oracles.mul(oracles.mul(oracles.to_grid(e_dec), oracles.grid([[0, 0], [0, 1]])), oracles.to_grid(f_dec))
    assert lhs == oracles.grid([[0, 0], [0, 1]])
    # and the first identity fails for Y3 = 0
    f_bad = f_decomposed(y1, zeros(0, 1), zeros(1, 1), zeros(0, 1), identity(0))
    assert not verify_eae_condition_decomposed(core, core, e_dec, f_bad, 0, 0)


GRID = [Fraction(x) for x in (-2, -1, Fraction(-1, 2), 0, Fraction(1, 2), 1, 2)]


def test_special_form_necessity_scalar_brute_force():
    """Every scalar special-form witness satisfies the characterising identities."""
    valid = 0
    for u, v in product((-1, 0, 1, 2), repeat=2):
        U, V = matrix([[u]]), matrix([[v]])
        if eae_test(U, V) is None:
            continue
        for f11, f22, e11, e21 in product(GRID, repeat=4):
            F = matrix([[f11, 1], [1 + f22 * f11, f22]])
            E = matrix([[e11, u], [e21, -f11]])
            if not verify_eae(U, V, E, F):
                continue
            valid += 1
            assert check_special_form(E, F, U, V)
            assert verify_eae_condition(U, V, E, F)
    assert valid > 0


def test_condition_sufficiency_scalar_brute_force():
    """Conversely, the identities plus invertibility of E give a witness."""
    core_u, core_v = matrix([[2]]), matrix([[-1]])
    for y1, y3, x1, x5 in product(GRID, repeat=4):
        f_dec = f_decomposed(matrix([[y1]]), zeros(0, 1), matrix([[y3]]), zeros(0, 1), identity(0))
        e_dec = block([[matrix([[x1]]), core_u], [matrix([[x5]]), matrix([[-y1]])]])
        if verify_eae_condition_decomposed(core_u, core_v, e_dec, f_dec, 0, 0) and is_invertible(e_dec):
            assert verify_eae(core_u, core_v, e_dec, f_dec)


@given(eae_pairs(), st.integers(0, 2**32 - 1))
def test_every_parameter_choice_gives_a_witness(pair, seed):
    U, V = pair
    du, dv = decompose(U), decompose(V)
    rng = random.Random(seed)
    iso = KernelCokernelIso.random(rng, du.kernel_dim, du.cokernel_dim, 3)
    w = build_eae_witness(U, V, iso, WitnessParams.random(rng, du, dv, 3))
    assert verify_eae(U, V, w.e, w.f)
    assert check_special_form(w.e, w.f, U, V)
    assert verify_eae_condition(U, V, w.e, w.f)
    assert (w.f @ w.f_inv_claimed).is_identity()


@given(rectangular_eae_pairs(), st.integers(0, 2**32 - 1))
def test_rectangular_witnesses(pair, seed):
    U, V = pair
    du, dv = decompose(U), decompose(V)
    rng = random.Random(seed)
    w = build_eae_witness(U, V, KernelCokernelIso.random(rng, du.kernel_dim, du.cokernel_dim, 2), WitnessParams.random(rng, du, dv, 2))
    assert w.e.shape == (U.rows + V.cols, V.rows + U.cols)
    assert verify_eae(U, V, w.e, w.f) and verify_eae_condition(U, V, w.e, w.f)


def _adversarial(U, V, rng):
    """Valid parameters but a column of [X1; X5] replaced by a combination of the others."""
    du, dv = decompose(U), decompose(V)
    params = WitnessParams.random(rng, du, dv, 3)
    iso = eae_test(U, V)
    good = derive_blocks(du, dv, iso, params)
    blk = eblock(du.core, dv.core, good.x1, good.x5, params.y1, params.y3)
    n = blk.rows
    coeffs = [rng.randint(-2, 2) for _ in range(n - 1)]
    col = [sum(c * blk[i, j + 1] for j, c in enumerate(coeffs)) for i in range(n)]
    rows = [list(r) for r in blk.entries]
    for i in range(n):
        rows[i][0] = col[i]
    forged = matrix(rows)
    a, bp = du.rank, dv.rank
    x1 = forged.submatrix(0, a, 0, bp)
    x5 = forged.submatrix(a, n, 0, bp)
    return du, dv, iso, params, DerivedBlocks(x1, x5, good.y4), forged


@given(eae_pairs(), st.integers(0, 2**32 - 1))
def test_e_invertible_iff_eblock_invertible(pair, seed):
    U, V = pair
    if decompose(V).rank == 0:
        return
    du, dv, iso, params, derived, blk = _adversarial(U, V, random.Random(seed))
    w = assemble_witness(du, dv, iso, params, derived)
    assert not is_invertible(blk)
    assert not is_invertible(w.e)


@given(st.integers(0, 4), st.integers(0, 4), st.integers(0, 2**32 - 1))
def test_middle_factor_always_invertible(a, b, seed):
    rng = random.Random(seed)
    from opcouple.ratmat import random_matrix

    mid = middle_factor(random_matrix(rng, b, a, 4), random_matrix(rng, a, b, 4))
    assert rank(mid) == a + b


@given(eae_pairs(max_dim=4), eae_pairs(max_dim=4))
def test_eae_is_an_equivalence(p, q):
    U, V = p
    assert eae_test(U, U) is not None
    assert (eae_test(U, V) is None) == (eae_test(V, U) is None)
    w = build_eae_witness(V, U)
    assert verify_eae(V, U, w.e, w.f)
    # transitivity through dimension counts: U ~ V and V ~ W give U ~ W
    W = q[0]
    if eae_test(V, W) is not None:
        assert eae_test(U, W) is not None
        w2 = build_eae_witness(U, W)
        assert verify_eae(U, W, w2.e, w2.f)


def test_witness_json_bundle():
    U = matrix([[1, 0], [0, 0]])
    w = build_eae_witness(U, U)
    obj = w.to_json()
    assert {"e", "f", "f_inv_claimed", "params", "iso"} <= set(obj)
    assert set(obj["iso"]) == {"e_prime", "f_prime"}
    assert set(obj["params"]) == {"y1", "y2", "y3", "x2", "x3", "x4", "x6"}


def test_decomposed_coordinates_round_trip():
    U = matrix([[1, 2], [2, 4]])
    w = build_eae_witness(U, U)
    du = decompose(U)
    dec = e_to_decomposed(w.e, du, du)
    assert dec.shape == w.e.shape
    f_dec = f_decomposed(w.params.y1, w.params.y2, w.params.y3, w.derived.y4, w.iso.e_prime)
    assert f_to_original(f_dec, du, du) == w.f
