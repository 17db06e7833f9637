"""Fredholm-index constructions over rectangular rational matrices."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

from .decomp import decompose
from .errors import CorrectionTooLarge, DimensionMismatch, NotInvertible, NotSquare, NotSurjective, RankDeficient
from .ratmat import (
    Basis,
    RatMatrix,
    block,
    complement,
    corank,
    diag,
    hstack,
    identity,
    inverse,
    is_invertible,
    kernel_basis,
    left_inverse,
    nullity,
    rank,
    zeros,
)


@dataclass(frozen=True)
class IndexCert:
    index: int
    nullity: int
    corank: int

    def to_json(self) -> dict[str, Any]:
        return {"index": self.index, "nullity": self.nullity, "corank": self.corank}


def index(A: RatMatrix) -> IndexCert:
    n, c = nullity(A), corank(A)
    return IndexCert(n - c, n, c)


def complete_to_invertible(F: RatMatrix) -> RatMatrix:
    """``Xi`` with ``[F; Xi]`` invertible, for surjective ``F``.

    ``Xi`` sends the kernel basis of ``F`` to the standard basis of
    ``Q^k`` and kills the greedy complement of the kernel.
    """
    m, n = F.shape
    if rank(F) != m:
        raise NotSurjective(f"rank {rank(F)} < {m} rows")
    ker = kernel_basis(F)
    k = ker.dim
    q = hstack([complement(ker).vectors, ker.vectors])
    return hstack([zeros(k, n - k), identity(k)]) @ inverse(q)


def extract_fredholm_from_iso(T: RatMatrix, k: int) -> RatMatrix:
    """The top ``n - k`` rows of an invertible ``T``: a surjection of index ``k``."""
    if not T.is_square:
        raise NotInvertible(f"T has shape {T.shape}")
    n = T.rows
    if not 0 <= k <= n:
        raise DimensionMismatch(f"k = {k} outside 0..{n}")
    if not is_invertible(T):
        raise NotInvertible("T is singular")
    return T.submatrix(0, n - k, 0, n)


# -- coupling normalisation ---------------------------------------------------


@dataclass(frozen=True)
class NormalizationCert:
    """A finite-rank correction ``R`` making ``I - B1 B2`` injective, with new factors.

    ``Z`` is the span of ``tau``, which contains the range of ``R``; ``pi`` is
    a left inverse of ``tau`` and ``l_iso`` acts on ``W + Z``.
    """

    r: RatMatrix
    tau: RatMatrix
    pi: RatMatrix
    l_iso: RatMatrix
    b1_new: RatMatrix
    b2_new: RatMatrix

    @property
    def x_tilde(self) -> RatMatrix:
        return identity(self.b1_new.rows) - self.b1_new @ self.b2_new

    def to_json(self) -> dict[str, Any]:
        return {k: getattr(self, k).to_json() for k in ("r", "tau", "pi", "l_iso", "b1_new", "b2_new")}


def _check_coupling(b1: RatMatrix, b2: RatMatrix) -> None:
    if b2.shape != (b1.cols, b1.rows):
        raise DimensionMismatch(f"B1 {b1.shape} and B2 {b2.shape} do not compose to an operator on V")


def normalize_injective(b1: RatMatrix, b2: RatMatrix) -> NormalizationCert:
    """Correct ``X = I - B1 B2`` by a finite-rank ``R`` so that ``X - R`` is injective.

    ``B2`` is injective on ``Ker X`` (there ``x = B1 B2 x``), so with ``K`` a
    kernel basis and ``Psi`` a left inverse of ``B2 K`` the correction
    ``R = -tau Psi B2`` sends ``Ker X`` onto the cokernel ``Z = span(tau)``.
    With ``L = [[I, 0], [Psi, I]]`` on ``W + Z`` the lifted factors
    ``[B1 | tau] L^-1`` and ``L [B2; pi R]`` have a vanishing ``Z`` part, so
    the new factorisation runs through ``W`` itself.
    """
    _check_coupling(b1, b2)
    v, w = b1.shape
    x = identity(v) - b1 @ b2
    d = decompose(x)
    ker = d.x2.vectors
    k = d.kernel_dim
    tau = d.x2p.vectors
    pi = d.s_inv.submatrix(d.rank, v, 0, v)
    try:
        psi = left_inverse(b2 @ ker)
    except RankDeficient:
        # unreachable: B2 x = 0 and X x = 0 force x = 0
        raise CorrectionTooLarge("kernel of I - B1 B2 does not inject into W") from None
    r = -(tau @ psi @ b2)
    l_iso = block([[identity(w), zeros(w, k)], [psi, identity(k)]])
    l_inv = block([[identity(w), zeros(w, k)], [-psi, identity(k)]])
    lifted_b1 = hstack([b1, tau]) @ l_inv
    lifted_b2 = l_iso @ block([[b2], [pi @ r]])
    if not lifted_b2.submatrix(w, w + k, 0, v).is_zero():
        raise CorrectionTooLarge("correction does not fold back into W")
    return NormalizationCert(
        r=r,
        tau=tau,
        pi=pi,
        l_iso=l_iso,
        b1_new=lifted_b1.submatrix(0, v, 0, w),
        b2_new=lifted_b2.submatrix(0, w, 0, v),
    )


def verify_normalization(b1: RatMatrix, b2: RatMatrix, cert: NormalizationCert) -> dict[str, bool]:
    v = b1.rows
    x = identity(v) - b1 @ b2
    x_tilde = cert.x_tilde
    return {
        "pi_tau_identity": (cert.pi @ cert.tau).is_identity(),
        "l_invertible": is_invertible(cert.l_iso),
        "range_of_r_in_z": cert.tau @ cert.pi @ cert.r == cert.r,
        "decomposition_exact": x - cert.r == x_tilde,
        "x_tilde_injective": nullity(x_tilde) == 0,
    }


def k_from_split(
    v1: int, v2: int, w1: int, w2: int, t1: RatMatrix, s1: RatMatrix | None = None
) -> tuple[RatMatrix, RatMatrix]:
    """Factors with ``I - B1 B2 = diag(T1, I)`` for ``V = V1 + V2``, ``W = W1 + W2``.

    ``B1 = [[S1^-1, 0], [0, 0]]`` and ``B2 = [[S1 (I - T1), 0], [0, 0]]``
    where ``S1: V1 -> W1`` is invertible (identity by default).
    """
    if min(v1, v2, w1, w2) < 0:
        raise DimensionMismatch("dimensions must be non-negative")
    if v1 != w1:
        raise DimensionMismatch(f"V1 has dimension {v1} but W1 has {w1}")
    if t1.shape != (v1, v1):
        raise DimensionMismatch(f"T1 must be {v1}x{v1}, got {t1.shape}")
    s1 = identity(v1) if s1 is None else s1
    if s1.shape != (v1, v1):
        raise DimensionMismatch(f"S1 must be {v1}x{v1}, got {s1.shape}")
    if not is_invertible(s1):
        raise NotInvertible("S1 must be invertible")
    b1 = block([[inverse(s1), zeros(v1, w2)], [zeros(v2, w1), zeros(v2, w2)]])
    b2 = block([[s1 @ (identity(v1) - t1), zeros(w1, v2)], [zeros(w2, v1), zeros(w2, v2)]])
    return b1, b2


# -- corner blocks of isomorphisms --------------------------------------------


def corner_extract(
    T: RatMatrix, domain_split: tuple[int, int], codomain_split: tuple[int, int]
) -> tuple[Basis, RatMatrix]:
    """Kernel of the corner ``T12: T1 -> S2`` and its restriction to the kernel complement.

    ``T`` maps ``S1 + T1`` (sizes ``domain_split``) to ``S2 + T2`` (sizes
    ``codomain_split``).  The restriction is ``T12`` applied to the greedy
    complement of its kernel, an injective ``s2 x (t1 - nullity)`` matrix.
    """
    (s1, t1), (s2, t2) = domain_split, codomain_split
    if min(s1, t1, s2, t2) < 0 or T.shape != (s2 + t2, s1 + t1):
        raise DimensionMismatch(f"T {T.shape} does not match splits {domain_split} -> {codomain_split}")
    if not is_invertible(T):
        raise NotInvertible("T is singular")
    t12 = T.submatrix(0, s2, s1, s1 + t1)
    ker = kernel_basis(t12)
    restricted = t12 @ complement(ker).vectors
    return ker, restricted


@dataclass(frozen=True)
class KernelBookkeeping:
    nullity_t1: int
    nullity_t11: int
    corank_t1: int
    corank_t11: int
    f_dim: int

    @property
    def kernel_identity(self) -> bool:
        return self.nullity_t1 == self.nullity_t11 + self.f_dim

    @property
    def cokernel_identity(self) -> bool:
        return self.corank_t1 == self.corank_t11 + self.f_dim

    @property
    def ok(self) -> bool:
        return self.kernel_identity and self.cokernel_identity

    def to_json(self) -> dict[str, Any]:
        return {
            "nullity_t1": self.nullity_t1,
            "nullity_t11": self.nullity_t11,
            "corank_t1": self.corank_t1,
            "corank_t11": self.corank_t11,
            "f_dim": self.f_dim,
            "kernel_identity": self.kernel_identity,
            "cokernel_identity": self.cokernel_identity,
        }


def kernel_bookkeeping(T: RatMatrix, f_dim: int) -> KernelBookkeeping:
    """Drop the coupling to the last ``f_dim`` coordinates and count kernels.

    ``T1 = diag(T11, 0)`` where ``T11`` is the leading block.
    """
    if not T.is_square:
        raise NotSquare(f"T must be square, got {T.shape}")
    n = T.rows
    if not 0 <= f_dim <= n:
        raise DimensionMismatch(f"f_dim = {f_dim} outside 0..{n}")
    t11 = T.submatrix(0, n - f_dim, 0, n - f_dim)
    t1 = diag(t11, zeros(f_dim, f_dim))
    return KernelBookkeeping(nullity(t1), nullity(t11), corank(t1), corank(t11), f_dim)
