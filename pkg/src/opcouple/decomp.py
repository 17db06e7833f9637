"""Kernel/range splitting of a matrix into an invertible core.

For ``U: Q^n -> Q^m`` of rank ``r`` the splitting picks

* ``x2``  -- a basis of ``Ker U`` (free RREF columns),
* ``x1``  -- the greedy complement of ``x2``,
* ``x1p`` -- the pivot columns of ``U`` (a basis of its range),
* ``x2p`` -- the greedy complement of ``x1p`` (the chosen cokernel),

so that with ``r_mat = [x1 | x2]`` and ``s_mat = [x1p | x2p]``::

    inverse(s_mat) @ U @ r_mat == diag(core, 0)

where ``core`` is an invertible ``r x r`` matrix.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Any

from .errors import DimensionMismatch, SingularMatrix
from .ratmat import (
    Basis,
    RatMatrix,
    column_space_basis,
    complement,
    diag,
    hstack,
    inverse,
    is_invertible,
    kernel_basis,
    rank,
    zeros,
)


@dataclass(frozen=True)
class RelRegDecomposition:
    x1: Basis
    x2: Basis
    x1p: Basis
    x2p: Basis
    core: RatMatrix
    r: RatMatrix
    s: RatMatrix

    @property
    def rank(self) -> int:
        return self.core.rows

    @property
    def kernel_dim(self) -> int:
        return self.x2.dim

    @property
    def cokernel_dim(self) -> int:
        return self.x2p.dim

    @cached_property
    def r_inv(self) -> RatMatrix:
        return inverse(self.r)

    @cached_property
    def s_inv(self) -> RatMatrix:
        return inverse(self.s)

    @property
    def domain_dim(self) -> int:
        return self.r.rows

    @property
    def codomain_dim(self) -> int:
        return self.s.rows

    def to_json(self) -> dict[str, Any]:
        return {
            "x1": self.x1.vectors.to_json(),
            "x2": self.x2.vectors.to_json(),
            "x1p": self.x1p.vectors.to_json(),
            "x2p": self.x2p.vectors.to_json(),
            "core": self.core.to_json(),
            "r": self.r.to_json(),
            "s": self.s.to_json(),
        }

    @classmethod
    def from_json(cls, obj: dict[str, Any]) -> RelRegDecomposition:
        m = {k: RatMatrix.from_json(obj[k]) for k in ("x1", "x2", "x1p", "x2p", "core", "r", "s")}
        return cls(
            x1=Basis.of(m["x1"]),
            x2=Basis.of(m["x2"]),
            x1p=Basis.of(m["x1p"]),
            x2p=Basis.of(m["x2p"]),
            core=m["core"],
            r=m["r"],
            s=m["s"],
        )


def decompose(U: RatMatrix) -> RelRegDecomposition:
    x2 = kernel_basis(U)
    x1 = complement(x2)
    x1p = column_space_basis(U)
    x2p = complement(x1p)
    r_mat = hstack([x1.vectors, x2.vectors])
    s_mat = hstack([x1p.vectors, x2p.vectors])
    k = x1.dim
    core = (inverse(s_mat) @ U @ x1.vectors).submatrix(0, k, 0, k)
    return RelRegDecomposition(x1, x2, x1p, x2p, core, r_mat, s_mat)


def core_padded(d: RelRegDecomposition) -> RatMatrix:
    """``diag(core, 0)`` with the shape of the decomposed operator."""
    k = d.rank
    return diag(d.core, zeros(d.codomain_dim - k, d.domain_dim - k))


def verify_decomposition(U: RatMatrix, d: RelRegDecomposition) -> bool:
    """Check every structural claim of ``d`` against ``U`` exactly."""
    n, m = U.cols, U.rows
    if d.r.shape != (n, n) or d.s.shape != (m, m):
        raise DimensionMismatch(
            f"decomposition of shape r={d.r.shape}, s={d.s.shape} does not fit a {m}x{n} operator"
        )
    if d.x1.ambient_dim != n or d.x2.ambient_dim != n or d.x1p.ambient_dim != m or d.x2p.ambient_dim != m:
        return False
    if d.r != hstack([d.x1.vectors, d.x2.vectors]) or d.s != hstack([d.x1p.vectors, d.x2p.vectors]):
        return False
    if not d.core.is_square or d.core.rows != d.x1.dim or d.core.rows != d.x1p.dim:
        return False
    if not (is_invertible(d.core) and is_invertible(d.r) and is_invertible(d.s)):
        return False
    rk = rank(U)
    if d.x2.dim != n - rk or d.x1p.dim != rk:
        return False
    if not (U @ d.x2.vectors).is_zero():
        return False
    # x1p inside the column space: appending it must not raise the rank
    if rank(hstack([U, d.x1p.vectors])) != rk:
        return False
    try:
        conj = inverse(d.s) @ U @ d.r
    except SingularMatrix:
        return False
    return conj == core_padded(d)
