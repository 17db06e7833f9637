"""Dense exact rational matrices.

Every operator in the library is a :class:`RatMatrix`: an immutable,
row-major grid of ``gmpy2.mpq`` rationals.  Zero-dimensional shapes
(``0 x n``, ``n x 0``, ``0 x 0``) are ordinary values, so block formulas keep
working when a kernel or cokernel vanishes.

Row reduction always takes the leftmost available pivot and the first row
holding it, which makes kernel bases, range bases and complements
reproducible.
"""

from __future__ import annotations

import random
import re
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from typing import Any

from gmpy2 import mpq

from .errors import (
    DimensionMismatch,
    MatrixFormatError,
    NotSquare,
    RankDeficient,
    SingularMatrix,
)

Rational = type(mpq())

ZERO = mpq(0)
ONE = mpq(1)

DEFAULT_ENTRY_BOUND = 3

_ENTRY_RE = re.compile(r"^[+-]?\d+(/\d+)?$")


def rat(x: Any) -> Rational:
    """Convert ``x`` to an exact rational, refusing floats and bools."""
    if isinstance(x, Rational):
        return x
    if isinstance(x, bool) or isinstance(x, float):
        raise TypeError(f"refusing inexact or boolean scalar {x!r}")
    if isinstance(x, str):
        s = x.strip()
        if not _ENTRY_RE.match(s):
            raise MatrixFormatError(f"malformed rational entry {x!r}")
        if "/" in s and int(s.split("/")[1]) == 0:
            raise MatrixFormatError(f"zero denominator in {x!r}")
        return mpq(s)
    try:
        return mpq(x)
    except (TypeError, ValueError) as exc:
        raise TypeError(f"cannot convert {x!r} to a rational") from exc


@dataclass(frozen=True)
class RatMatrix:
    rows: int
    cols: int
    entries: tuple[tuple[Rational, ...], ...]

    def __post_init__(self) -> None:
        if self.rows < 0 or self.cols < 0:
            raise DimensionMismatch("negative matrix dimension")
        if len(self.entries) != self.rows or any(len(r) != self.cols for r in self.entries):
            raise DimensionMismatch(
                f"entries do not form a {self.rows}x{self.cols} grid"
            )

    # -- construction -------------------------------------------------------

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable[Any]], cols: int | None = None) -> RatMatrix:
        """Build from nested rows.  ``cols`` is needed only when there are no rows."""
        data = tuple(tuple(rat(x) for x in row) for row in rows)
        if cols is None:
            cols = len(data[0]) if data else 0
        return cls(len(data), cols, data)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> RatMatrix:
        row = (ZERO,) * cols
        return cls(rows, cols, (row,) * rows)

    @classmethod
    def identity(cls, n: int) -> RatMatrix:
        return cls(n, n, tuple(tuple(ONE if i == j else ZERO for j in range(n)) for i in range(n)))

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[Any]], rows: int) -> RatMatrix:
        if not columns:
            return cls.zeros(rows, 0)
        return cls.from_rows(zip(*columns), cols=len(columns)) if rows else cls.zeros(0, len(columns))

    # -- basic access -------------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def __getitem__(self, ij: tuple[int, int]) -> Rational:
        i, j = ij
        return self.entries[i][j]

    def column(self, j: int) -> tuple[Rational, ...]:
        return tuple(r[j] for r in self.entries)

    def tolist(self) -> list[list[Rational]]:
        return [list(r) for r in self.entries]

    def submatrix(self, r0: int, r1: int, c0: int, c1: int) -> RatMatrix:
        """Rows ``r0:r1`` and columns ``c0:c1``."""
        if not (0 <= r0 <= r1 <= self.rows and 0 <= c0 <= c1 <= self.cols):
            raise DimensionMismatch(
                f"slice [{r0}:{r1}, {c0}:{c1}] out of range for {self.rows}x{self.cols}"
            )
        return RatMatrix(r1 - r0, c1 - c0, tuple(r[c0:c1] for r in self.entries[r0:r1]))

    def split(self, row_sizes: Sequence[int], col_sizes: Sequence[int]) -> list[list[RatMatrix]]:
        """Cut into a grid of blocks with the given block heights and widths."""
        if sum(row_sizes) != self.rows or sum(col_sizes) != self.cols:
            raise DimensionMismatch(
                f"block sizes {list(row_sizes)} x {list(col_sizes)} do not tile {self.rows}x{self.cols}"
            )
        grid = []
        r0 = 0
        for h in row_sizes:
            c0 = 0
            line = []
            for w in col_sizes:
                line.append(self.submatrix(r0, r0 + h, c0, c0 + w))
                c0 += w
            grid.append(line)
            r0 += h
        return grid

    # -- arithmetic ---------------------------------------------------------

    @property
    def T(self) -> RatMatrix:
        if self.rows == 0:
            return RatMatrix.zeros(self.cols, 0)
        return RatMatrix(self.cols, self.rows, tuple(zip(*self.entries)))

    def _check_same_shape(self, other: RatMatrix) -> None:
        if self.shape != other.shape:
            raise DimensionMismatch(f"shapes {self.shape} and {other.shape} differ")

    def __add__(self, other: RatMatrix) -> RatMatrix:
        self._check_same_shape(other)
        return RatMatrix(self.rows, self.cols, tuple(
            tuple(a + b for a, b in zip(r, s)) for r, s in zip(self.entries, other.entries)
        ))

    def __sub__(self, other: RatMatrix) -> RatMatrix:
        self._check_same_shape(other)
        return RatMatrix(self.rows, self.cols, tuple(
            tuple(a - b for a, b in zip(r, s)) for r, s in zip(self.entries, other.entries)
        ))

    def __neg__(self) -> RatMatrix:
        return RatMatrix(self.rows, self.cols, tuple(tuple(-a for a in r) for r in self.entries))

    def scale(self, c: Any) -> RatMatrix:
        c = rat(c)
        return RatMatrix(self.rows, self.cols, tuple(tuple(c * a for a in r) for r in self.entries))

    def __rmul__(self, c: Any) -> RatMatrix:
        return self.scale(c)

    def __matmul__(self, other: RatMatrix) -> RatMatrix:
        if self.cols != other.rows:
            raise DimensionMismatch(f"cannot multiply {self.shape} by {other.shape}")
        n = other.cols
        rhs = other.entries
        out = []
        for row in self.entries:
            acc = [ZERO] * n
            for k, a in enumerate(row):
                if a:
                    for j, b in enumerate(rhs[k]):
                        if b:
                            acc[j] += a * b
            out.append(tuple(acc))
        return RatMatrix(self.rows, n, tuple(out))

    # -- predicates ---------------------------------------------------------

    def is_zero(self) -> bool:
        return not any(a for r in self.entries for a in r)

    def is_identity(self) -> bool:
        return self.is_square and all(
            a == (ONE if i == j else ZERO) for i, r in enumerate(self.entries) for j, a in enumerate(r)
        )

    # -- serialization ------------------------------------------------------

    def to_json(self) -> dict[str, Any]:
        if self.rows == 0 or self.cols == 0:
            entries: list[list[str]] = []
        else:
            entries = [[str(a) for a in r] for r in self.entries]
        return {"rows": self.rows, "cols": self.cols, "entries": entries}

    @classmethod
    def from_json(cls, obj: Any) -> RatMatrix:
        if not isinstance(obj, dict):
            raise MatrixFormatError("matrix payload must be a JSON object")
        try:
            rows, cols, entries = obj["rows"], obj["cols"], obj["entries"]
        except KeyError as exc:
            raise MatrixFormatError(f"matrix payload missing key {exc}") from None
        for name, v in (("rows", rows), ("cols", cols)):
            if not isinstance(v, int) or isinstance(v, bool) or v < 0:
                raise MatrixFormatError(f"{name} must be a non-negative integer, got {v!r}")
        if not isinstance(entries, list):
            raise MatrixFormatError("entries must be a list of rows")
        if rows == 0 or cols == 0:
            if entries and not (len(entries) == rows and all(r == [] for r in entries)):
                raise MatrixFormatError(f"{rows}x{cols} matrix must have empty entries")
            return cls.zeros(rows, cols)
        if len(entries) != rows or any(not isinstance(r, list) or len(r) != cols for r in entries):
            raise MatrixFormatError(f"entries do not form a {rows}x{cols} grid")
        try:
            return cls.from_rows(entries, cols=cols)
        except TypeError as exc:
            raise MatrixFormatError(str(exc)) from None

    def __repr__(self) -> str:
        body = "; ".join(" ".join(str(a) for a in r) for r in self.entries)
        return f"RatMatrix({self.rows}x{self.cols}: [{body}])"


def zeros(rows: int, cols: int) -> RatMatrix:
    return RatMatrix.zeros(rows, cols)


def identity(n: int) -> RatMatrix:
    return RatMatrix.identity(n)


def matrix(rows: Iterable[Iterable[Any]], cols: int | None = None) -> RatMatrix:
    """Shorthand for :meth:`RatMatrix.from_rows`."""
    return RatMatrix.from_rows(rows, cols)


@dataclass(frozen=True)
class Basis:
    """Columns of ``vectors`` spanning a subspace of ``Q^ambient_dim``."""

    ambient_dim: int
    vectors: RatMatrix

    def __post_init__(self) -> None:
        if self.vectors.rows != self.ambient_dim:
            raise DimensionMismatch(
                f"basis vectors live in dimension {self.vectors.rows}, not {self.ambient_dim}"
            )
        if rank(self.vectors) != self.vectors.cols:
            raise RankDeficient("basis vectors are linearly dependent")

    @property
    def dim(self) -> int:
        return self.vectors.cols

    @classmethod
    def of(cls, vectors: RatMatrix) -> Basis:
        return cls(vectors.rows, vectors)


# -- row reduction ------------------------------------------------------------


def _eliminate(rows: list[list[Rational]], pivot_cols: int) -> list[int]:
    """Reduce ``rows`` in place to RREF, choosing pivots among the first columns only."""
    m = len(rows)
    pivots: list[int] = []
    r = 0
    for c in range(pivot_cols):
        if r == m:
            break
        p = next((i for i in range(r, m) if rows[i][c]), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        piv = rows[r]
        lead = piv[c]
        if lead != ONE:
            inv = ONE / lead
            piv = rows[r] = [x * inv for x in piv]
        for i in range(m):
            f = rows[i][c]
            if i != r and f:
                rows[i] = [a - f * b if b else a for a, b in zip(rows[i], piv)]
        pivots.append(c)
        r += 1
    return pivots


def rref(A: RatMatrix) -> tuple[RatMatrix, list[int]]:
    """Reduced row echelon form and pivot columns."""
    rows = A.tolist()
    pivots = _eliminate(rows, A.cols)
    return RatMatrix.from_rows(rows, cols=A.cols), pivots


def row_reduce_with_transform(A: RatMatrix) -> tuple[RatMatrix, list[int], RatMatrix]:
    """Return ``(R, pivots, P)`` with ``P`` invertible and ``P @ A == R`` in RREF."""
    m, n = A.shape
    rows = [list(r) + [ONE if i == j else ZERO for j in range(m)] for i, r in enumerate(A.entries)]
    pivots = _eliminate(rows, n)
    R = RatMatrix.from_rows((r[:n] for r in rows), cols=n)
    P = RatMatrix.from_rows((r[n:] for r in rows), cols=m)
    return R, pivots, P


def rank(A: RatMatrix) -> int:
    return len(_eliminate(A.tolist(), A.cols))


def rank_nullity(A: RatMatrix) -> tuple[int, int]:
    r = rank(A)
    return r, A.cols - r


def nullity(A: RatMatrix) -> int:
    return A.cols - rank(A)


def corank(A: RatMatrix) -> int:
    """Dimension of a complement of the column space."""
    return A.rows - rank(A)


def kernel_basis(A: RatMatrix) -> Basis:
    """Basis of ``Ker A``, one vector per free RREF column in ascending order."""
    R, pivots = rref(A)
    n = A.cols
    pivot_set = set(pivots)
    vecs = []
    for f in range(n):
        if f in pivot_set:
            continue
        v = [ZERO] * n
        v[f] = ONE
        for i, p in enumerate(pivots):
            v[p] = -R[i, f]
        vecs.append(v)
    return Basis(n, RatMatrix.from_columns(vecs, n))


def column_space_basis(A: RatMatrix) -> Basis:
    """The pivot columns of ``A``."""
    _, pivots = rref(A)
    return Basis(A.rows, RatMatrix.from_columns([A.column(j) for j in pivots], A.rows))


def complement(S: Basis | RatMatrix) -> Basis:
    """Standard basis vectors, in index order, that extend ``S`` to the whole space.

    Greedy: keep ``e_i`` whenever it raises the rank of what has been kept so far.
    A bare matrix is accepted and must have full column rank.
    """
    if isinstance(S, RatMatrix):
        S = Basis.of(S)
    n = S.ambient_dim
    # pivots of [S | I] beyond the first S.dim columns are exactly the greedy picks
    rows = [list(r) + [ONE if i == j else ZERO for j in range(n)] for i, r in enumerate(S.vectors.entries)]
    pivots = _eliminate(rows, S.dim + n)
    picks = [p - S.dim for p in pivots if p >= S.dim]
    cols = [[ONE if i == j else ZERO for i in range(n)] for j in picks]
    return Basis(n, RatMatrix.from_columns(cols, n))


def inverse(A: RatMatrix) -> RatMatrix:
    if not A.is_square:
        raise NotSquare(f"cannot invert a {A.rows}x{A.cols} matrix")
    n = A.rows
    rows = [list(r) + [ONE if i == j else ZERO for j in range(n)] for i, r in enumerate(A.entries)]
    pivots = _eliminate(rows, n)
    if len(pivots) < n:
        raise SingularMatrix(f"matrix has rank {len(pivots)} < {n}")
    return RatMatrix.from_rows((r[n:] for r in rows), cols=n)


def is_invertible(A: RatMatrix) -> bool:
    return A.is_square and rank(A) == A.rows


def left_inverse(A: RatMatrix) -> RatMatrix:
    """Some ``L`` with ``L @ A == I`` for ``A`` of full column rank."""
    S = Basis.of(A)
    C = complement(S)
    return inverse(hstack([A, C.vectors])).submatrix(0, A.cols, 0, A.rows)


# -- assembly -----------------------------------------------------------------


def block(grid: Sequence[Sequence[RatMatrix]]) -> RatMatrix:
    """Assemble a rectangular grid of blocks into one matrix."""
    if not grid:
        return RatMatrix.zeros(0, 0)
    width = len(grid[0])
    if any(len(line) != width for line in grid):
        raise DimensionMismatch("block grid is ragged")
    heights = [line[0].rows if line else 0 for line in grid]
    widths = [grid[0][j].cols for j in range(width)]
    for i, line in enumerate(grid):
        for j, blk in enumerate(line):
            if blk.rows != heights[i]:
                raise DimensionMismatch(f"block ({i},{j}) has {blk.rows} rows, expected {heights[i]}")
            if blk.cols != widths[j]:
                raise DimensionMismatch(f"block ({i},{j}) has {blk.cols} cols, expected {widths[j]}")
    out = []
    for i, line in enumerate(grid):
        for r in range(heights[i]):
            out.append(tuple(a for blk in line for a in blk.entries[r]))
    return RatMatrix(sum(heights), sum(widths), tuple(out))


def hstack(mats: Sequence[RatMatrix]) -> RatMatrix:
    return block([list(mats)])


def vstack(mats: Sequence[RatMatrix]) -> RatMatrix:
    return block([[m] for m in mats])


def diag(*mats: RatMatrix) -> RatMatrix:
    """Block diagonal matrix; off-diagonal blocks are zero."""
    return block([
        [m if i == j else RatMatrix.zeros(mi.rows, m.cols) for j, m in enumerate(mats)]
        for i, mi in enumerate(mats)
    ])


# -- random instances ---------------------------------------------------------


def random_matrix(rng: random.Random, rows: int, cols: int, bound: int = DEFAULT_ENTRY_BOUND) -> RatMatrix:
    return RatMatrix.from_rows(
        ([rng.randint(-bound, bound) for _ in range(cols)] for _ in range(rows)), cols=cols
    )


def random_unimodular(rng: random.Random, n: int, bound: int = DEFAULT_ENTRY_BOUND) -> RatMatrix:
    """Product of a unit lower and a unit upper triangular integer matrix."""
    lower = RatMatrix.from_rows(
        ([rng.randint(-bound, bound) if j < i else (1 if i == j else 0) for j in range(n)] for i in range(n)),
        cols=n,
    )
    upper = RatMatrix.from_rows(
        ([rng.randint(-bound, bound) if j > i else (1 if i == j else 0) for j in range(n)] for i in range(n)),
        cols=n,
    )
    return lower @ upper


def random_rank_from_rng(
    rng: random.Random, rows: int, cols: int, rank_: int, bound: int = DEFAULT_ENTRY_BOUND
) -> RatMatrix:
    if rank_ < 0 or rank_ > min(rows, cols):
        raise DimensionMismatch(f"rank {rank_} impossible for a {rows}x{cols} matrix")
    P = random_unimodular(rng, rows, bound)
    Q = random_unimodular(rng, cols, bound)
    # P diag(I_r, 0) Q == (first r columns of P) (first r rows of Q)
    return P.submatrix(0, rows, 0, rank_) @ Q.submatrix(0, rank_, 0, cols)


def random_rank_matrix(
    seed: int, rows: int, cols: int, rank: int, bound: int = DEFAULT_ENTRY_BOUND
) -> RatMatrix:
    """A ``rows x cols`` integer matrix of exactly the requested rank, determined by ``seed``."""
    return random_rank_from_rng(random.Random(seed), rows, cols, rank, bound)
