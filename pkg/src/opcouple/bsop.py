"""The block-operator problem behind strong equivalence, in finite dimensions.

Given spaces ``V``, ``W``, ``Z1``, ``Z2`` (carried as dimensions), find
``B1: W -> V``, ``B2: V -> W``, ``A12: Z1 -> V``, ``A21: V -> Z2`` and
``A22: Z1 -> Z2`` with::

    T = [[I - B1 B2, A12],
         [A21,       A22]]        V + Z1 -> V + Z2

invertible.  Operators of the form ``I - B1 B2`` on ``V`` make up the set
called K below.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

from .decomp import RelRegDecomposition, decompose
from .eae import WitnessParams
from .errors import BanPropsViolated, DimensionMismatch, NotSquare, SingularCore
from .ratmat import (
    RatMatrix,
    block,
    column_space_basis,
    diag,
    identity,
    inverse,
    is_invertible,
    rank,
    rref,
    vstack,
    hstack,
    zeros,
)


@dataclass(frozen=True)
class BsopInstance:
    dim_v: int
    dim_w: int
    dim_z1: int
    dim_z2: int

    def __post_init__(self) -> None:
        for name in ("dim_v", "dim_w", "dim_z1", "dim_z2"):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool) or value < 0:
                raise ValueError(f"{name} must be a non-negative integer, got {value!r}")

    def to_json(self) -> dict[str, int]:
        return {"v": self.dim_v, "w": self.dim_w, "z1": self.dim_z1, "z2": self.dim_z2}

    @classmethod
    def from_json(cls, obj: dict[str, Any]) -> BsopInstance:
        return cls(obj["v"], obj["w"], obj["z1"], obj["z2"])


def assemble_t(b1: RatMatrix, b2: RatMatrix, a12: RatMatrix, a21: RatMatrix, a22: RatMatrix) -> RatMatrix:
    v = b1.rows
    if b1.shape != (v, b2.rows) or b2.shape != (b1.cols, v):
        raise DimensionMismatch(f"B1 {b1.shape} and B2 {b2.shape} do not compose to an operator on V")
    return block([[identity(v) - b1 @ b2, a12], [a21, a22]])


@dataclass(frozen=True)
class BsopSolution:
    b1: RatMatrix
    b2: RatMatrix
    a12: RatMatrix
    a21: RatMatrix
    a22: RatMatrix
    t: RatMatrix

    @classmethod
    def assemble(
        cls, b1: RatMatrix, b2: RatMatrix, a12: RatMatrix, a21: RatMatrix, a22: RatMatrix
    ) -> BsopSolution:
        return cls(b1, b2, a12, a21, a22, assemble_t(b1, b2, a12, a21, a22))

    @property
    def instance(self) -> BsopInstance:
        return BsopInstance(self.b1.rows, self.b1.cols, self.a12.cols, self.a21.rows)

    def verify(self) -> bool:
        """``t`` has the required block form and is invertible."""
        try:
            expected = assemble_t(self.b1, self.b2, self.a12, self.a21, self.a22)
        except DimensionMismatch:
            return False
        return self.t == expected and is_invertible(self.t)

    def to_json(self) -> dict[str, Any]:
        return {k: getattr(self, k).to_json() for k in ("b1", "b2", "a12", "a21", "a22", "t")}

    @classmethod
    def from_json(cls, obj: dict[str, Any]) -> BsopSolution:
        return cls(*(RatMatrix.from_json(obj[k]) for k in ("b1", "b2", "a12", "a21", "a22", "t")))


def bsop_to_json(inst: BsopInstance, sol: BsopSolution | None) -> dict[str, Any]:
    return {"dims": inst.to_json(), "solution": None if sol is None else sol.to_json()}


def _dims(dims: BsopInstance | tuple[int, int, int, int]) -> BsopInstance:
    return dims if isinstance(dims, BsopInstance) else BsopInstance(*dims)


def check_banprops(dims: BsopInstance | tuple[int, int, int, int]) -> bool:
    # V + Z1 ~ V + Z2 between finite-dimensional spaces forces equal dimensions
    inst = _dims(dims)
    return inst.dim_z1 == inst.dim_z2


def solve_bsop(inst: BsopInstance | tuple[int, int, int, int]) -> BsopSolution:
    """Everything zero except an identity ``A22``."""
    inst = _dims(inst)
    if not check_banprops(inst):
        raise BanPropsViolated(f"dim Z1 = {inst.dim_z1} but dim Z2 = {inst.dim_z2}")
    v, w, z = inst.dim_v, inst.dim_w, inst.dim_z1
    return BsopSolution.assemble(zeros(v, w), zeros(w, v), zeros(v, z), zeros(z, v), identity(z))


# -- the set K ----------------------------------------------------------------


def k_membership(X: RatMatrix, dim_w: int) -> tuple[RatMatrix, RatMatrix] | None:
    """Factor ``I - X = B1 @ B2`` through a ``dim_w``-dimensional space, if possible.

    Possible exactly when ``rank(I - X) <= dim_w``.  ``B1`` holds the pivot
    columns of ``I - X`` and ``B2`` the nonzero rows of its RREF, both padded
    with zeros up to ``dim_w``.
    """
    if not X.is_square:
        raise NotSquare(f"X must be square, got {X.shape}")
    if dim_w < 0:
        raise ValueError("dim_w must be non-negative")
    n = X.rows
    d = identity(n) - X
    r_mat, pivots = rref(d)
    r = len(pivots)
    if r > dim_w:
        return None
    cols = column_space_basis(d).vectors
    b1 = hstack([cols, zeros(n, dim_w - r)])
    b2 = vstack([r_mat.submatrix(0, r, 0, n), zeros(dim_w - r, n)])
    return b1, b2


def embedding_factorization(X: RatMatrix, dim_w: int) -> tuple[RatMatrix, RatMatrix] | None:
    """When ``dim V <= dim W``, factor ``I - X`` through a left-invertible ``R: V -> W``.

    ``B1 = (I - X) R^+`` and ``B2 = R`` with ``R`` the coordinate embedding,
    so every ``X`` is reachable; ``None`` when ``V`` does not embed in ``W``.
    """
    if not X.is_square:
        raise NotSquare(f"X must be square, got {X.shape}")
    n = X.rows
    if n > dim_w:
        return None
    r = vstack([identity(n), zeros(dim_w - n, n)])
    r_plus = r.T
    return (identity(n) - X) @ r_plus, r


def normalize_to_k(F: RatMatrix, dim_w: int) -> RatMatrix | None:
    """An invertible ``G`` with ``G @ F`` in K, or ``None`` if none exists.

    ``F`` is corrected by ``K`` sending ``Ker F`` onto the chosen cokernel and
    vanishing on the kernel complement; ``G = (F + K)^-1``.  Then
    ``I - G F`` has rank ``nullity(F)``, which is also the least rank possible.
    """
    if not F.is_square:
        raise NotSquare(f"F must be square, got {F.shape}")
    d = decompose(F)
    k = d.kernel_dim
    if k > dim_w:
        return None
    a = d.rank
    correction = d.s @ diag(zeros(a, a), identity(k)) @ d.r_inv
    return inverse(F + correction)


# -- bridge to witness parameters ---------------------------------------------


def e21_from_t(sol: BsopSolution | RatMatrix, v_core: RatMatrix) -> RatMatrix:
    """``T @ diag(V'^-1, I)``, the lower-left witness block matching ``T``."""
    t = sol.t if isinstance(sol, BsopSolution) else sol
    if not v_core.is_square:
        raise DimensionMismatch(f"core of V must be square, got {v_core.shape}")
    b = v_core.rows
    if t.cols < b:
        raise DimensionMismatch(f"T with {t.cols} columns cannot absorb a {b}x{b} core")
    if not is_invertible(v_core):
        raise SingularCore("core of V is singular")
    return t @ diag(inverse(v_core), identity(t.cols - b))


def eae_pair_from_bsop(
    inst: BsopInstance | tuple[int, int, int, int], u_core: RatMatrix, v_core: RatMatrix
) -> tuple[RatMatrix, RatMatrix]:
    """``U = diag(U', 0)`` on ``W + Z1`` and ``V = diag(V', 0)`` on ``V + Z1``."""
    inst = _dims(inst)
    if not check_banprops(inst):
        raise BanPropsViolated(f"dim Z1 = {inst.dim_z1} but dim Z2 = {inst.dim_z2}")
    if u_core.shape != (inst.dim_w, inst.dim_w) or v_core.shape != (inst.dim_v, inst.dim_v):
        raise DimensionMismatch(
            f"cores {u_core.shape}, {v_core.shape} do not match dim W = {inst.dim_w}, dim V = {inst.dim_v}"
        )
    if not is_invertible(u_core) or not is_invertible(v_core):
        raise SingularCore("cores must be invertible")
    z = inst.dim_z1
    return diag(u_core, zeros(z, z)), diag(v_core, zeros(z, z))


def bsop_instance_for(du: RelRegDecomposition, dv: RelRegDecomposition) -> BsopInstance:
    """The problem whose solutions are the strong witnesses for the decomposed pair.

    ``V`` is the kernel complement of the second operator, ``W`` that of the
    first, ``Z1`` the cokernel and ``Z2`` the kernel of the second operator.
    """
    return BsopInstance(dv.rank, du.rank, dv.cokernel_dim, dv.kernel_dim)


def params_from_bsop(sol: BsopSolution, du: RelRegDecomposition, dv: RelRegDecomposition) -> WitnessParams:
    """Witness parameters whose ``E21`` equals ``e21_from_t(sol, V')`` in decomposed coordinates.

    ``Y1 = -B1``, ``Y3 = B2``, ``X3 = A12``, ``X4 = A22``, ``X6 = A21 V'^-1``;
    the remaining free parameters are zero.
    """
    if sol.instance != bsop_instance_for(du, dv):
        raise DimensionMismatch(f"solution for {sol.instance} does not fit {bsop_instance_for(du, dv)}")
    if not is_invertible(dv.core):
        raise SingularCore("core of V is singular")
    return WitnessParams.zeros(du, dv).replace(
        y1=-sol.b1,
        y3=sol.b2,
        x3=sol.a12,
        x4=sol.a22,
        x6=sol.a21 @ inverse(dv.core),
    )


def rank_of_correction(X: RatMatrix) -> int:
    """``rank(I - X)``: the least ``dim W`` through which ``I - X`` factors."""
    return rank(identity(X.rows) - X)
