"""Equivalence after extension: decision, witness construction, verification.

Conventions.  ``U`` is ``m_U x n_U`` and ``V`` is ``m_V x n_V``.  A witness is a
pair of invertible matrices ``E``, ``F`` with::

    diag(U, I_{n_V}) == E @ diag(V, I_{n_U}) @ F

so the extension attached to ``U`` is a copy of the domain of ``V`` and the
extension attached to ``V`` is a copy of the domain of ``U``.  ``E`` maps
``(codomain V) + (domain U)`` to ``(codomain U) + (domain V)`` and ``F`` maps
``(domain U) + (domain V)`` to ``(domain V) + (domain U)``.

Witnesses are built in *decomposed coordinates*: both operators are split as
``diag(core, 0)`` by :func:`opcouple.decomp.decompose` and the witness blocks
are laid out against those splittings.  Writing ``a``/``b`` for the ranks of
``U``/``V``, ``k`` for the common kernel dimension and ``c`` for the common
cokernel dimension, the decomposed ``F`` acts on ``(X1, X2, Y1, Y2)`` of sizes
``(a, k, b, k)`` and lands in ``(Y1, Y2, X1, X2)``; the decomposed ``E`` acts on
``(Y1', Y2', X1, X2)`` of sizes ``(b, c, a, k)`` and lands in
``(X1', X2', Y1, Y2)`` of sizes ``(a, c, b, k)``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Any

from .decomp import RelRegDecomposition, decompose
from .errors import DimensionMismatch, NotEae, NotInForm, SingularCore, SingularMatrix
from .ratmat import (
    DEFAULT_ENTRY_BOUND,
    RatMatrix,
    block,
    corank,
    diag,
    identity,
    inverse,
    is_invertible,
    nullity,
    random_matrix,
    random_rank_from_rng,
    zeros,
)


@dataclass(frozen=True)
class KernelCokernelIso:
    """``e_prime``: Ker U -> Ker V and ``f_prime``: Coker U -> Coker V, in basis coordinates."""

    e_prime: RatMatrix
    f_prime: RatMatrix

    def to_json(self) -> dict[str, Any]:
        return {"e_prime": self.e_prime.to_json(), "f_prime": self.f_prime.to_json()}

    @classmethod
    def from_json(cls, obj: dict[str, Any]) -> KernelCokernelIso:
        return cls(RatMatrix.from_json(obj["e_prime"]), RatMatrix.from_json(obj["f_prime"]))

    @classmethod
    def random(cls, rng: random.Random, k: int, c: int, bound: int = DEFAULT_ENTRY_BOUND) -> KernelCokernelIso:
        return cls(random_rank_from_rng(rng, k, k, k, bound), random_rank_from_rng(rng, c, c, c, bound))


_PARAM_NAMES = ("y1", "y2", "y3", "x2", "x3", "x4", "x6")


def param_shapes(du: RelRegDecomposition, dv: RelRegDecomposition) -> dict[str, tuple[int, int]]:
    a, b = du.rank, dv.rank
    k, c = du.kernel_dim, du.cokernel_dim
    return {
        "y1": (b, a),
        "y2": (k, a),
        "y3": (a, b),
        "x2": (a, c),
        "x3": (b, c),
        "x4": (k, c),
        "x6": (k, b),
    }


@dataclass(frozen=True)
class WitnessParams:
    """The freely choosable blocks of a special-form witness."""

    y1: RatMatrix
    y2: RatMatrix
    y3: RatMatrix
    x2: RatMatrix
    x3: RatMatrix
    x4: RatMatrix
    x6: RatMatrix

    @classmethod
    def zeros(cls, du: RelRegDecomposition, dv: RelRegDecomposition) -> WitnessParams:
        return cls(**{name: zeros(*shape) for name, shape in param_shapes(du, dv).items()})

    @classmethod
    def random(
        cls,
        rng: random.Random,
        du: RelRegDecomposition,
        dv: RelRegDecomposition,
        bound: int = DEFAULT_ENTRY_BOUND,
    ) -> WitnessParams:
        return cls(**{name: random_matrix(rng, *shape, bound) for name, shape in param_shapes(du, dv).items()})

    def replace(self, **changes: RatMatrix) -> WitnessParams:
        fields = {name: getattr(self, name) for name in _PARAM_NAMES}
        fields.update(changes)
        return WitnessParams(**fields)

    def check_shapes(self, du: RelRegDecomposition, dv: RelRegDecomposition) -> None:
        for name, shape in param_shapes(du, dv).items():
            got = getattr(self, name).shape
            if got != shape:
                raise DimensionMismatch(f"parameter {name} has shape {got}, expected {shape}")

    def to_json(self) -> dict[str, Any]:
        return {name: getattr(self, name).to_json() for name in _PARAM_NAMES}

    @classmethod
    def from_json(cls, obj: dict[str, Any]) -> WitnessParams:
        return cls(**{name: RatMatrix.from_json(obj[name]) for name in _PARAM_NAMES})


@dataclass(frozen=True)
class DerivedBlocks:
    x1: RatMatrix
    x5: RatMatrix
    y4: RatMatrix

    def to_json(self) -> dict[str, Any]:
        return {"x1": self.x1.to_json(), "x5": self.x5.to_json(), "y4": self.y4.to_json()}


@dataclass(frozen=True)
class EaeWitness:
    e: RatMatrix
    f: RatMatrix
    f_inv_claimed: RatMatrix
    derived: DerivedBlocks
    params: WitnessParams
    iso: KernelCokernelIso
    du: RelRegDecomposition
    dv: RelRegDecomposition

    def to_json(self) -> dict[str, Any]:
        return {
            "e": self.e.to_json(),
            "f": self.f.to_json(),
            "f_inv_claimed": self.f_inv_claimed.to_json(),
            "params": self.params.to_json(),
            "iso": self.iso.to_json(),
            "derived": self.derived.to_json(),
        }


# -- deciding -----------------------------------------------------------------


def eae_test(U: RatMatrix, V: RatMatrix) -> KernelCokernelIso | None:
    """Canonical kernel/cokernel isomorphisms, or ``None`` when the dimensions differ."""
    k, c = nullity(U), corank(U)
    if k != nullity(V) or c != corank(V):
        return None
    return KernelCokernelIso(identity(k), identity(c))


# -- decomposed block layouts -------------------------------------------------


def f_decomposed(y1: RatMatrix, y2: RatMatrix, y3: RatMatrix, y4: RatMatrix, e_prime: RatMatrix) -> RatMatrix:
    """The special-form ``F`` on ``(X1, X2, Y1, Y2) -> (Y1, Y2, X1, X2)``."""
    b, a = y1.shape
    k = e_prime.rows
    ei = inverse(e_prime)
    return block([
        [y1, zeros(b, k), identity(b), zeros(b, k)],
        [y2, e_prime, zeros(k, b), identity(k)],
        [identity(a) + y3 @ y1, zeros(a, k), y3, zeros(a, k)],
        [y4 @ y1 - ei @ y2, zeros(k, k), y4, -ei],
    ])


def f_inverse_decomposed(y1: RatMatrix, y2: RatMatrix, y3: RatMatrix, y4: RatMatrix, e_prime: RatMatrix) -> RatMatrix:
    """Closed-form inverse of :func:`f_decomposed`, on ``(Y1, Y2, X1, X2) -> (X1, X2, Y1, Y2)``."""
    b, a = y1.shape
    k = e_prime.rows
    return block([
        [-y3, zeros(a, k), identity(a), zeros(a, k)],
        [-y4, inverse(e_prime), zeros(k, a), identity(k)],
        [identity(b) + y1 @ y3, zeros(b, k), -y1, zeros(b, k)],
        [y2 @ y3 + e_prime @ y4, zeros(k, k), -y2, -e_prime],
    ])


def e_decomposed(
    u_core: RatMatrix,
    x1: RatMatrix,
    x2: RatMatrix,
    x3: RatMatrix,
    x4: RatMatrix,
    x5: RatMatrix,
    x6: RatMatrix,
    y1: RatMatrix,
    y2: RatMatrix,
    e_prime: RatMatrix,
    f_prime: RatMatrix,
) -> RatMatrix:
    """The special-form ``E`` on ``(Y1', Y2', X1, X2) -> (X1', X2', Y1, Y2)``."""
    ap, a = u_core.shape
    bp = x1.cols
    b = y1.rows
    k, c = e_prime.rows, f_prime.rows
    return block([
        [x1, x2, u_core, zeros(ap, k)],
        [zeros(c, bp), inverse(f_prime), zeros(c, a), zeros(c, k)],
        [x5, x3, -y1, zeros(b, k)],
        [x6, x4, -y2, -e_prime],
    ])


# -- coordinate changes -------------------------------------------------------


def e_to_original(e_dec: RatMatrix, du: RelRegDecomposition, dv: RelRegDecomposition) -> RatMatrix:
    return diag(du.s, dv.r) @ e_dec @ diag(dv.s_inv, du.r_inv)


def f_to_original(f_dec: RatMatrix, du: RelRegDecomposition, dv: RelRegDecomposition) -> RatMatrix:
    return diag(dv.r, du.r) @ f_dec @ diag(du.r_inv, dv.r_inv)


def f_inv_to_original(g_dec: RatMatrix, du: RelRegDecomposition, dv: RelRegDecomposition) -> RatMatrix:
    return diag(du.r, dv.r) @ g_dec @ diag(dv.r_inv, du.r_inv)


def e_to_decomposed(e: RatMatrix, du: RelRegDecomposition, dv: RelRegDecomposition) -> RatMatrix:
    return diag(du.s_inv, dv.r_inv) @ e @ diag(dv.s, du.r)


def f_to_decomposed(f: RatMatrix, du: RelRegDecomposition, dv: RelRegDecomposition) -> RatMatrix:
    return diag(dv.r_inv, du.r_inv) @ f @ diag(du.r, dv.r)


# -- the invertible 2x2 core of E ---------------------------------------------


def eblock(
    u_core: RatMatrix,
    v_core: RatMatrix,
    x1: RatMatrix,
    x5: RatMatrix,
    y1: RatMatrix,
    y3: RatMatrix,
) -> RatMatrix:
    """``[[X1, U'], [X5, -Y1]]``; ``E`` is invertible exactly when this is."""
    ap, a = u_core.shape
    bp, b = v_core.shape
    expected = {"x1": (ap, bp), "x5": (b, bp), "y1": (b, a), "y3": (a, b)}
    for name, m in (("x1", x1), ("x5", x5), ("y1", y1), ("y3", y3)):
        if m.shape != expected[name]:
            raise DimensionMismatch(f"{name} has shape {m.shape}, expected {expected[name]}")
    return block([[x1, u_core], [x5, -y1]])


def middle_factor(y1: RatMatrix, y3: RatMatrix) -> RatMatrix:
    """``[[-Y3, I], [I + Y1 Y3, -Y1]]``.

    Invertible for every ``Y1``, ``Y3``: eliminating against the upper-right
    identity leaves ``(I + Y1 Y3) - Y1 Y3 = I``.
    """
    b, a = y1.shape
    if y3.shape != (a, b):
        raise DimensionMismatch(f"y3 has shape {y3.shape}, expected {(a, b)}")
    return block([[-y3, identity(a)], [identity(b) + y1 @ y3, -y1]])


def eblock_factorization(
    u_core: RatMatrix, v_core: RatMatrix, y1: RatMatrix, y3: RatMatrix
) -> tuple[RatMatrix, RatMatrix, RatMatrix]:
    """Solve for ``X1``, ``X5`` so that ``eblock = diag(U', I) @ middle @ diag(V'^-1, I)``.

    Returns ``(X1, X5, middle)`` with ``X1 = -U' Y3 V'^-1`` and
    ``X5 = (I + Y1 Y3) V'^-1``.
    """
    if not (is_invertible(u_core) and is_invertible(v_core)):
        raise SingularCore("eblock_factorization needs invertible cores")
    vi = inverse(v_core)
    middle = middle_factor(y1, y3)
    x1 = -(u_core @ y3 @ vi)
    x5 = (identity(y1.rows) + y1 @ y3) @ vi
    return x1, x5, middle


# -- building -----------------------------------------------------------------


def derive_blocks(
    du: RelRegDecomposition, dv: RelRegDecomposition, iso: KernelCokernelIso, params: WitnessParams
) -> DerivedBlocks:
    x1, x5, _ = eblock_factorization(du.core, dv.core, params.y1, params.y3)
    y4 = inverse(iso.e_prime) @ (params.x6 @ dv.core - params.y2 @ params.y3)
    return DerivedBlocks(x1, x5, y4)


def assemble_witness(
    du: RelRegDecomposition,
    dv: RelRegDecomposition,
    iso: KernelCokernelIso,
    params: WitnessParams,
    derived: DerivedBlocks,
) -> EaeWitness:
    """Lay the blocks out in decomposed coordinates and conjugate back.

    No consistency between ``derived`` and ``params`` is enforced here, so
    adversarial blocks can be substituted; :func:`build_eae_witness` is the
    path that guarantees a valid witness.
    """
    p = params
    f_dec = f_decomposed(p.y1, p.y2, p.y3, derived.y4, iso.e_prime)
    g_dec = f_inverse_decomposed(p.y1, p.y2, p.y3, derived.y4, iso.e_prime)
    e_dec = e_decomposed(
        du.core, derived.x1, p.x2, p.x3, p.x4, derived.x5, p.x6, p.y1, p.y2, iso.e_prime, iso.f_prime
    )
    return EaeWitness(
        e=e_to_original(e_dec, du, dv),
        f=f_to_original(f_dec, du, dv),
        f_inv_claimed=f_inv_to_original(g_dec, du, dv),
        derived=derived,
        params=params,
        iso=iso,
        du=du,
        dv=dv,
    )


def _check_iso(iso: KernelCokernelIso, k: int, c: int) -> None:
    if iso.e_prime.shape != (k, k) or iso.f_prime.shape != (c, c):
        raise DimensionMismatch(
            f"iso blocks {iso.e_prime.shape}, {iso.f_prime.shape} do not match kernel {k}, cokernel {c}"
        )
    if not (is_invertible(iso.e_prime) and is_invertible(iso.f_prime)):
        raise SingularMatrix("kernel/cokernel isomorphisms must be invertible")


def build_eae_witness(
    U: RatMatrix,
    V: RatMatrix,
    iso: KernelCokernelIso | None = None,
    params: WitnessParams | None = None,
) -> EaeWitness:
    """Construct ``E``, ``F`` in special form from free parameters (default all zero)."""
    canonical = eae_test(U, V)
    if canonical is None:
        raise NotEae(
            f"kernel dims {nullity(U)} vs {nullity(V)}, cokernel dims {corank(U)} vs {corank(V)}"
        )
    du, dv = decompose(U), decompose(V)
    iso = canonical if iso is None else iso
    _check_iso(iso, du.kernel_dim, du.cokernel_dim)
    params = WitnessParams.zeros(du, dv) if params is None else params
    params.check_shapes(du, dv)
    return assemble_witness(du, dv, iso, params, derive_blocks(du, dv, iso, params))


# -- verification -------------------------------------------------------------


def _witness_shapes(U: RatMatrix, V: RatMatrix) -> tuple[tuple[int, int], tuple[int, int]]:
    (mu, nu), (mv, nv) = U.shape, V.shape
    return (mu + nv, mv + nu), (nv + nu, nu + nv)


def verify_eae(U: RatMatrix, V: RatMatrix, E: RatMatrix, F: RatMatrix) -> bool:
    """``E``, ``F`` invertible and ``diag(U, I) == E @ diag(V, I) @ F`` exactly."""
    e_shape, f_shape = _witness_shapes(U, V)
    if E.shape != e_shape or F.shape != f_shape:
        raise DimensionMismatch(
            f"E {E.shape} / F {F.shape} do not fit U {U.shape}, V {V.shape}; expected {e_shape} / {f_shape}"
        )
    if not (is_invertible(E) and is_invertible(F)):
        return False
    return E @ diag(V, identity(U.cols)) @ F == diag(U, identity(V.cols))


def check_special_form(E: RatMatrix, F: RatMatrix, U: RatMatrix, V: RatMatrix) -> bool:
    """Whether ``F = [[F11, I], [I + F22 F11, F22]]``, ``E = [[*, U], [*, -F11]]``
    and ``F^-1 = [[-F22, I], [I + F11 F22, -F11]]``."""
    e_shape, f_shape = _witness_shapes(U, V)
    if E.shape != e_shape or F.shape != f_shape:
        raise DimensionMismatch(f"E {E.shape} / F {F.shape} do not fit U {U.shape}, V {V.shape}")
    (mu, nu), (mv, nv) = U.shape, V.shape
    (f11, f12), (f21, f22) = F.split([nv, nu], [nu, nv])
    (_, e12), (_, e22) = E.split([mu, nv], [mv, nu])
    if not f12.is_identity() or f21 != identity(nu) + f22 @ f11:
        return False
    if e12 != U or e22 != -f11:
        return False
    claimed = block([[-f22, identity(nu)], [identity(nv) + f11 @ f22, -f11]])
    return (F @ claimed).is_identity()


def verify_eae_condition_decomposed(
    u_core: RatMatrix,
    v_core: RatMatrix,
    e_dec: RatMatrix,
    f_dec: RatMatrix,
    kernel_dim: int,
    cokernel_dim: int,
) -> bool:
    """Check the characterising identities for blocks laid out in decomposed coordinates.

    The cores need not be invertible: this covers operators that are merely
    split as ``diag(core, 0)``.  Raises :class:`NotInForm` when the matrices
    do not carry the structural zeros and identities of the special form.
    """
    ap, a = u_core.shape
    bp, b = v_core.shape
    k, c = kernel_dim, cokernel_dim
    try:
        F = f_dec.split([b, k, a, k], [a, k, b, k])
        E = e_dec.split([ap, c, b, k], [bp, c, a, k])
    except DimensionMismatch as exc:
        raise NotInForm(str(exc)) from None

    def need(ok: bool, what: str) -> None:
        if not ok:
            raise NotInForm(what)

    y1, y2, y3, y4 = F[0][0], F[1][0], F[2][2], F[3][2]
    e_prime = F[1][1]
    need(is_invertible(e_prime), "E' block of F is not invertible")
    ei = inverse(e_prime)
    for i, j in ((0, 1), (0, 3), (1, 2), (2, 1), (2, 3), (3, 1)):
        need(F[i][j].is_zero(), f"F block ({i},{j}) must vanish")
    need(F[0][2].is_identity() and F[1][3].is_identity(), "F must carry identity blocks onto Y")
    need(F[3][3] == -ei, "F block (3,3) must be -E'^-1")
    need(F[2][0] == identity(a) + y3 @ y1, "F block (2,0) must be I + Y3 Y1")
    need(F[3][0] == y4 @ y1 - ei @ y2, "F block (3,0) must be Y4 Y1 - E'^-1 Y2")

    x1, x5, x6 = E[0][0], E[2][0], E[3][0]
    need(E[0][2] == u_core, "E block (0,2) must be the core of U")
    for i, j in ((0, 3), (1, 0), (1, 2), (1, 3), (2, 3)):
        need(E[i][j].is_zero(), f"E block ({i},{j}) must vanish")
    need(is_invertible(E[1][1]), "F'^-1 block of E is not invertible")
    need(E[2][2] == -y1 and E[3][2] == -y2, "E must carry -F11 in its lower right corner")
    need(E[3][3] == -e_prime, "E block (3,3) must be -E'")

    lhs = block([[x1, u_core], [x5, -y1]]) @ diag(v_core, identity(a))
    rhs = diag(u_core, identity(b)) @ block([[-y3, identity(a)], [identity(b) + y1 @ y3, -y1]])
    return lhs == rhs and y4 == ei @ (x6 @ v_core - y2 @ y3)


def verify_eae_condition(
    U: RatMatrix,
    V: RatMatrix,
    E: RatMatrix,
    F: RatMatrix,
    du: RelRegDecomposition | None = None,
    dv: RelRegDecomposition | None = None,
) -> bool:
    """The characterising identities, after moving ``E``, ``F`` to decomposed coordinates."""
    du = decompose(U) if du is None else du
    dv = decompose(V) if dv is None else dv
    if du.kernel_dim != dv.kernel_dim or du.cokernel_dim != dv.cokernel_dim:
        raise NotInForm("kernel/cokernel dimensions differ, no special-form layout exists")
    e_shape, f_shape = _witness_shapes(U, V)
    if E.shape != e_shape or F.shape != f_shape:
        raise NotInForm(f"E {E.shape} / F {F.shape} do not fit U {U.shape}, V {V.shape}")
    return verify_eae_condition_decomposed(
        du.core,
        dv.core,
        e_to_decomposed(E, du, dv),
        f_to_decomposed(F, du, dv),
        du.kernel_dim,
        du.cokernel_dim,
    )
