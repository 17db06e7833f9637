"""Schur coupling and strong equivalence after extension."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

from .decomp import decompose
from .eae import KernelCokernelIso, WitnessParams, eae_test
from .errors import DimensionMismatch, NotEae, NotSquare, SingularBlock
from .ratmat import RatMatrix, block, diag, identity, inverse, is_invertible, zeros


@dataclass(frozen=True)
class ScWitness:
    """Blocks of ``M = [[A, B], [C, D]]`` acting on ``(domain U) + (domain V)``."""

    a: RatMatrix
    b: RatMatrix
    c: RatMatrix
    d: RatMatrix

    @property
    def m(self) -> RatMatrix:
        return block([[self.a, self.b], [self.c, self.d]])

    def swapped(self) -> ScWitness:
        """``[[D, C], [B, A]]``, a coupling of the pair in the other order."""
        return ScWitness(self.d, self.c, self.b, self.a)

    def to_json(self) -> dict[str, Any]:
        return {k: getattr(self, k).to_json() for k in "abcd"}

    @classmethod
    def from_json(cls, obj: dict[str, Any]) -> ScWitness:
        return cls(*(RatMatrix.from_json(obj[k]) for k in "abcd"))


def _check_coupling_shapes(m: ScWitness) -> None:
    n, p = m.a.rows, m.d.rows
    if not m.a.is_square or not m.d.is_square:
        raise DimensionMismatch("diagonal blocks of a coupling must be square")
    if m.b.shape != (n, p) or m.c.shape != (p, n):
        raise DimensionMismatch(f"off-diagonal blocks {m.b.shape}, {m.c.shape} do not fit {n}+{p}")


def schur_complements(m: ScWitness) -> tuple[RatMatrix, RatMatrix]:
    """``(A - B D^-1 C, D - C A^-1 B)``."""
    _check_coupling_shapes(m)
    if not is_invertible(m.a):
        raise SingularBlock("block A is singular")
    if not is_invertible(m.d):
        raise SingularBlock("block D is singular")
    u = m.a - m.b @ inverse(m.d) @ m.c
    v = m.d - m.c @ inverse(m.a) @ m.b
    return u, v


def sc_checks(U: RatMatrix, V: RatMatrix, m: ScWitness) -> dict[str, bool]:
    """Per-identity verification results, for reports."""
    if not U.is_square or not V.is_square:
        raise DimensionMismatch("Schur coupling is defined for square operators only")
    if m.a.shape != U.shape or m.d.shape != V.shape:
        raise DimensionMismatch(f"coupling blocks {m.a.shape}, {m.d.shape} do not fit {U.shape}, {V.shape}")
    _check_coupling_shapes(m)
    a_ok, d_ok = is_invertible(m.a), is_invertible(m.d)
    checks = {"a_invertible": a_ok, "d_invertible": d_ok}
    if a_ok and d_ok:
        u, v = schur_complements(m)
        checks["u_is_schur_complement_of_d"] = u == U
        checks["v_is_schur_complement_of_a"] = v == V
    else:
        checks["u_is_schur_complement_of_d"] = False
        checks["v_is_schur_complement_of_a"] = False
    return checks


def verify_sc(U: RatMatrix, V: RatMatrix, m: ScWitness) -> bool:
    if not U.is_square or not V.is_square:
        raise DimensionMismatch("Schur coupling is defined for square operators only")
    if m.a.shape != U.shape or m.d.shape != V.shape:
        raise DimensionMismatch(f"coupling blocks {m.a.shape}, {m.d.shape} do not fit {U.shape}, {V.shape}")
    u, v = schur_complements(m)
    return u == U and v == V


@dataclass(frozen=True)
class EaeSplit:
    """Shapes of ``U`` and ``V``, which fix every block boundary of a witness."""

    u_rows: int
    u_cols: int
    v_rows: int
    v_cols: int

    @classmethod
    def of(cls, U: RatMatrix, V: RatMatrix) -> EaeSplit:
        return cls(U.rows, U.cols, V.rows, V.cols)


def seae_corners(E: RatMatrix, F: RatMatrix, split: EaeSplit) -> tuple[RatMatrix, RatMatrix]:
    """``(E21, F12)``: E from the codomain of V into the extension, F from the extension into the domain of V."""
    mu, nu, mv, nv = split.u_rows, split.u_cols, split.v_rows, split.v_cols
    if E.shape != (mu + nv, mv + nu) or F.shape != (nv + nu, nu + nv):
        raise DimensionMismatch(f"E {E.shape} / F {F.shape} do not match split {split}")
    e21 = E.submatrix(mu, mu + nv, 0, mv)
    f12 = F.submatrix(0, nv, nu, nu + nv)
    return e21, f12


def seae_test(E: RatMatrix, F: RatMatrix, split: EaeSplit) -> bool:
    e21, f12 = seae_corners(E, F, split)
    return is_invertible(e21) and is_invertible(f12)


def seae_params(U: RatMatrix, V: RatMatrix) -> tuple[WitnessParams, KernelCokernelIso]:
    """Parameters making the special-form witness strong.

    Everything is zero except ``X4``, the identity between cokernel and kernel
    coordinates; in decomposed coordinates ``E21`` is then
    ``diag(V'^-1, I)``.
    """
    if not U.is_square or not V.is_square:
        raise NotSquare("strong witnesses are built for square operators")
    iso = eae_test(U, V)
    if iso is None:
        raise NotEae("kernel or cokernel dimensions differ")
    du, dv = decompose(U), decompose(V)
    params = WitnessParams.zeros(du, dv).replace(x4=identity(du.kernel_dim))
    return params, iso


def sc_construct(
    U: RatMatrix,
    V: RatMatrix,
    b0: RatMatrix | None = None,
    c0: RatMatrix | None = None,
    h: RatMatrix | None = None,
) -> ScWitness:
    """Couple two square EAE operators through their kernels and cokernels.

    In decomposed coordinates ``A = diag(U', G)``, ``D = diag(V', H)`` and the
    off-diagonal blocks only connect ``Ker V -> Coker U`` (``B0``) and
    ``Ker U -> Coker V`` (``C0``); ``G = B0 H^-1 C0`` makes both Schur
    complements come out as ``diag(core, 0)``.  ``B0``, ``C0``, ``H`` default
    to identities and must be invertible.
    """
    if not U.is_square or not V.is_square:
        raise NotSquare("Schur coupling needs square operators")
    if eae_test(U, V) is None:
        raise NotEae("kernel or cokernel dimensions differ")
    du, dv = decompose(U), decompose(V)
    k = du.kernel_dim
    a, b = du.rank, dv.rank
    b0 = identity(k) if b0 is None else b0
    c0 = identity(k) if c0 is None else c0
    h = identity(k) if h is None else h
    for name, blk in (("b0", b0), ("c0", c0), ("h", h)):
        if blk.shape != (k, k):
            raise DimensionMismatch(f"{name} must be {k}x{k}, got {blk.shape}")
        if not is_invertible(blk):
            raise SingularBlock(f"{name} must be invertible")
    g = b0 @ inverse(h) @ c0
    a_dec = diag(du.core, g)
    d_dec = diag(dv.core, h)
    b_dec = block([[zeros(a, b), zeros(a, k)], [zeros(k, b), b0]])
    c_dec = block([[zeros(b, a), zeros(b, k)], [zeros(k, a), c0]])
    # A: X (r_U coords) -> X (s_U coords), B: Y (r_V) -> X (s_U), etc.
    return ScWitness(
        a=du.s @ a_dec @ du.r_inv,
        b=du.s @ b_dec @ dv.r_inv,
        c=dv.s @ c_dec @ du.r_inv,
        d=dv.s @ d_dec @ dv.r_inv,
    )
