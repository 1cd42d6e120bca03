"""Exact linear algebra over GF(2) with int-bitset rows.

A matrix stores one Python int per row; bit ``c`` of row ``r`` is the entry
at ``(r, c)``.  Column vectors are plain ints with bit ``i`` holding
coordinate ``i``.  Zero-dimensional matrices are legal values throughout.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .errors import PivotZero, ShapeMismatch


def popcount(x: int) -> int:
    return bin(x).count("1")


def bits_of(mask: int) -> Iterator[int]:
    """Yield set bit positions of mask in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class Gf2Matrix:
    """Immutable dense GF(2) matrix."""

    __slots__ = ("rows", "cols", "row_bits")

    def __init__(self, rows: int, cols: int, row_bits: Iterable[int] = ()):
        bits = tuple(row_bits) if row_bits else (0,) * rows
        if rows < 0 or cols < 0:
            raise ShapeMismatch(f"negative shape {rows}x{cols}")
        if len(bits) != rows:
            raise ShapeMismatch(f"{len(bits)} rows given for a {rows}x{cols} matrix")
        mask = (1 << cols) - 1
        for r, b in enumerate(bits):
            if b & ~mask:
                raise ShapeMismatch(f"row {r} has bits beyond column {cols}")
        self.rows = rows
        self.cols = cols
        self.row_bits = bits

    # -- construction -----------------------------------------------------

    @classmethod
    def zeros(cls, rows: int, cols: int) -> Gf2Matrix:
        return cls(rows, cols, (0,) * rows)

    @classmethod
    def identity(cls, n: int) -> Gf2Matrix:
        return cls(n, n, tuple(1 << i for i in range(n)))

    @classmethod
    def from_entries(cls, rows: int, cols: int, entries: Iterable[tuple[int, int]]) -> Gf2Matrix:
        bits = [0] * rows
        for r, c in entries:
            if not (0 <= r < rows and 0 <= c < cols):
                raise ShapeMismatch(f"entry ({r},{c}) outside {rows}x{cols}")
            bits[r] ^= 1 << c
        return cls(rows, cols, bits)

    @classmethod
    def from_dense(cls, dense: list[list[int]], cols: int | None = None) -> Gf2Matrix:
        rows = len(dense)
        if cols is None:
            cols = len(dense[0]) if dense else 0
        bits = []
        for row in dense:
            if len(row) != cols:
                raise ShapeMismatch("ragged dense matrix")
            m = 0
            for c, v in enumerate(row):
                if v & 1:
                    m |= 1 << c
            bits.append(m)
        return cls(rows, cols, bits)

    @classmethod
    def from_columns(cls, columns: list[int], rows: int) -> Gf2Matrix:
        """Matrix whose c-th column is the bitmask columns[c]."""
        bits = [0] * rows
        for c, col in enumerate(columns):
            for r in bits_of(col):
                if r >= rows:
                    raise ShapeMismatch(f"column {c} has bit {r} beyond row {rows}")
                bits[r] |= 1 << c
        return cls(rows, len(columns), bits)

    # -- access -----------------------------------------------------------

    def entry(self, r: int, c: int) -> int:
        if not (0 <= r < self.rows and 0 <= c < self.cols):
            raise IndexError(f"({r},{c}) outside {self.rows}x{self.cols}")
        return (self.row_bits[r] >> c) & 1

    def row(self, r: int) -> int:
        return self.row_bits[r]

    def column(self, c: int) -> int:
        if not 0 <= c < self.cols:
            raise IndexError(c)
        out = 0
        for r, b in enumerate(self.row_bits):
            out |= ((b >> c) & 1) << r
        return out

    def columns(self) -> list[int]:
        return [self.column(c) for c in range(self.cols)]

    def dense(self) -> list[list[int]]:
        return [[(b >> c) & 1 for c in range(self.cols)] for b in self.row_bits]

    def is_zero(self) -> bool:
        return all(b == 0 for b in self.row_bits)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Gf2Matrix)
            and self.rows == other.rows
            and self.cols == other.cols
            and self.row_bits == other.row_bits
        )

    def __hash__(self) -> int:
        return hash((self.rows, self.cols, self.row_bits))

    def __repr__(self) -> str:
        return f"Gf2Matrix({self.rows}x{self.cols})"

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other: Gf2Matrix) -> Gf2Matrix:
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ShapeMismatch(f"add {self.rows}x{self.cols} to {other.rows}x{other.cols}")
        return Gf2Matrix(self.rows, self.cols, tuple(a ^ b for a, b in zip(self.row_bits, other.row_bits)))

    def __matmul__(self, other: Gf2Matrix) -> Gf2Matrix:
        if self.cols != other.rows:
            raise ShapeMismatch(f"mul {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        out = []
        for b in self.row_bits:
            acc = 0
            for k in bits_of(b):
                acc ^= other.row_bits[k]
            out.append(acc)
        return Gf2Matrix(self.rows, other.cols, out)

    def mul_vec(self, v: int) -> int:
        """Matrix times column vector (bitmask of length cols)."""
        if v >> self.cols:
            raise ShapeMismatch(f"vector has bits beyond {self.cols}")
        out = 0
        for r, b in enumerate(self.row_bits):
            out |= (popcount(b & v) & 1) << r
        return out

    def transpose(self) -> Gf2Matrix:
        bits = [0] * self.cols
        for r, b in enumerate(self.row_bits):
            for c in bits_of(b):
                bits[c] |= 1 << r
        return Gf2Matrix(self.cols, self.rows, bits)

    def kron(self, other: Gf2Matrix) -> Gf2Matrix:
        """Kronecker product; rank is multiplicative."""
        bits = []
        for a in self.row_bits:
            for b in other.row_bits:
                acc = 0
                for c in bits_of(a):
                    acc |= b << (c * other.cols)
                bits.append(acc)
        return Gf2Matrix(self.rows * other.rows, self.cols * other.cols, bits)

    # -- elimination --------------------------------------------------------

    def rank(self) -> int:
        return span_dim(self.row_bits)

    def kernel_basis(self) -> list[int]:
        """Basis of {v : Mv = 0}, each vector a cols-bit mask."""
        work = list(self.row_bits)
        pivot_of_col: dict[int, int] = {}
        r = 0
        for c in range(self.cols):
            p = next((i for i in range(r, len(work)) if (work[i] >> c) & 1), None)
            if p is None:
                continue
            work[r], work[p] = work[p], work[r]
            for i in range(len(work)):
                if i != r and (work[i] >> c) & 1:
                    work[i] ^= work[r]
            pivot_of_col[c] = r
            r += 1
        basis = []
        for c in range(self.cols):
            if c in pivot_of_col:
                continue
            v = 1 << c
            for pc, pr in pivot_of_col.items():
                if (work[pr] >> c) & 1:
                    v |= 1 << pc
            basis.append(v)
        return basis

    def cokernel_basis(self) -> list[int]:
        """Basis of the left kernel {w : wM = 0}, each a rows-bit mask."""
        return self.transpose().kernel_basis()

    def h_number(self) -> int:
        """dim Ker + dim Coker = rows + cols - 2*rank."""
        return self.rows + self.cols - 2 * self.rank()

    def cancel(self, r: int, c: int) -> Gf2Matrix:
        """Gaussian cancellation at a unit pivot, deleting row r and column c.

        The result is equivalent to the input: both kernel and cokernel
        dimensions are preserved.
        """
        if not (0 <= r < self.rows and 0 <= c < self.cols):
            raise IndexError(f"({r},{c}) outside {self.rows}x{self.cols}")
        if not (self.row_bits[r] >> c) & 1:
            raise PivotZero(f"entry ({r},{c}) is zero")
        pivot_row = self.row_bits[r]
        low = (1 << c) - 1
        bits = []
        for i, b in enumerate(self.row_bits):
            if i == r:
                continue
            if (b >> c) & 1:
                b ^= pivot_row
            bits.append((b & low) | ((b >> (c + 1)) << c))
        return Gf2Matrix(self.rows - 1, self.cols - 1, bits)

    def inverse(self) -> Gf2Matrix:
        """Inverse of a square invertible matrix (Gauss-Jordan)."""
        if self.rows != self.cols:
            raise ShapeMismatch(f"inverse of non-square {self.rows}x{self.cols}")
        n = self.rows
        work = [b | (1 << (n + r)) for r, b in enumerate(self.row_bits)]
        r = 0
        for c in range(n):
            p = next((i for i in range(r, n) if (work[i] >> c) & 1), None)
            if p is None:
                raise ShapeMismatch("matrix is singular")
            work[r], work[p] = work[p], work[r]
            for i in range(n):
                if i != r and (work[i] >> c) & 1:
                    work[i] ^= work[r]
            r += 1
        return Gf2Matrix(n, n, [b >> n for b in work])

    def hstack(self, other: Gf2Matrix) -> Gf2Matrix:
        if self.rows != other.rows:
            raise ShapeMismatch("hstack row mismatch")
        return Gf2Matrix(
            self.rows,
            self.cols + other.cols,
            tuple(a | (b << self.cols) for a, b in zip(self.row_bits, other.row_bits)),
        )

    def submatrix(self, row_range: range, col_range: range) -> Gf2Matrix:
        lowmask = 0
        for c in col_range:
            lowmask |= 1 << c
        shift = col_range.start if len(col_range) else 0
        bits = [(self.row_bits[r] & lowmask) >> shift for r in row_range]
        return Gf2Matrix(len(row_range), len(col_range), bits)


def rank(m: Gf2Matrix) -> int:
    return m.rank()


def kernel_basis(m: Gf2Matrix) -> list[int]:
    return m.kernel_basis()


def cokernel_basis(m: Gf2Matrix) -> list[int]:
    return m.cokernel_basis()


def h_number(m: Gf2Matrix) -> int:
    return m.h_number()


def kron(a: Gf2Matrix, b: Gf2Matrix) -> Gf2Matrix:
    return a.kron(b)


def cancel(m: Gf2Matrix, r: int, c: int) -> Gf2Matrix:
    return m.cancel(r, c)


# -- spans of bitmask vectors ---------------------------------------------


def span_basis(vectors: Iterable[int]) -> list[int]:
    """Row-reduce vectors to a canonical echelon basis (descending pivots)."""
    basis: dict[int, int] = {}
    for v in vectors:
        v = _reduce(v, basis)
        if v:
            basis[v.bit_length() - 1] = v
    _back_substitute(basis)
    return [basis[p] for p in sorted(basis, reverse=True)]


def _reduce(v: int, basis: dict[int, int]) -> int:
    while v:
        p = v.bit_length() - 1
        if p not in basis:
            return v
        v ^= basis[p]
    return 0


def _back_substitute(basis: dict[int, int]) -> None:
    for p in sorted(basis):
        for q in basis:
            if q > p and (basis[q] >> p) & 1:
                basis[q] ^= basis[p]


def span_dim(vectors: Iterable[int]) -> int:
    basis: dict[int, int] = {}
    for v in vectors:
        v = _reduce(v, basis)
        if v:
            basis[v.bit_length() - 1] = v
    return len(basis)


def in_span(v: int, basis_vectors: Iterable[int]) -> bool:
    basis: dict[int, int] = {}
    for b in basis_vectors:
        b = _reduce(b, basis)
        if b:
            basis[b.bit_length() - 1] = b
    return _reduce(v, basis) == 0


def span_sum_dim(*vector_sets: Iterable[int]) -> int:
    all_vecs: list[int] = []
    for vs in vector_sets:
        all_vecs.extend(vs)
    return span_dim(all_vecs)


def span_intersection(u_vectors: list[int], v_vectors: list[int], ambient: int) -> list[int]:
    """Basis of span(U) ∩ span(V) inside F_2^ambient (Zassenhaus)."""
    rows = [(u << ambient) | u for u in u_vectors]
    rows += [v << ambient for v in v_vectors]
    basis: dict[int, int] = {}
    for r in rows:
        r = _reduce(r, basis)
        if r:
            basis[r.bit_length() - 1] = r
    low = (1 << ambient) - 1
    return span_basis([basis[p] & low for p in basis if p < ambient])


class SpanSolver:
    """Online span with coordinate solving over the inserted generators.

    ``add`` inserts a generator; ``solve`` expresses a vector as a combination
    of previously inserted generators (mask over generator indices) or returns
    None if the vector is outside the span.
    """

    def __init__(self, vectors: Iterable[int] = ()):  # generators in order
        self._pivots: dict[int, tuple[int, int]] = {}
        self.count = 0
        for v in vectors:
            self.add(v)

    def add(self, v: int) -> bool:
        idx = self.count
        self.count += 1
        v, coeff = self._reduce_with_coeffs(v)
        if v == 0:
            return False
        self._pivots[v.bit_length() - 1] = (v, coeff | (1 << idx))
        return True

    def _reduce_with_coeffs(self, v: int) -> tuple[int, int]:
        coeff = 0
        while v:
            p = v.bit_length() - 1
            if p not in self._pivots:
                return v, coeff
            pv, pc = self._pivots[p]
            v ^= pv
            coeff ^= pc
        return 0, coeff

    def solve(self, v: int) -> int | None:
        v, coeff = self._reduce_with_coeffs(v)
        return coeff if v == 0 else None

    @property
    def dim(self) -> int:
        return len(self._pivots)


# -- block assembly ---------------------------------------------------------


@dataclass(frozen=True)
class BlockGrid:
    """Sparse grid of blocks; absent entries are zero blocks."""

    row_dims: tuple[int, ...]
    col_dims: tuple[int, ...]
    blocks: dict[tuple[int, int], Gf2Matrix] = field(default_factory=dict)

    def __post_init__(self):
        for (i, j), b in self.blocks.items():
            if not (0 <= i < len(self.row_dims) and 0 <= j < len(self.col_dims)):
                raise ShapeMismatch(f"block ({i},{j}) outside grid")
            if (b.rows, b.cols) != (self.row_dims[i], self.col_dims[j]):
                raise ShapeMismatch(
                    f"block ({i},{j}) is {b.rows}x{b.cols}, slot needs "
                    f"{self.row_dims[i]}x{self.col_dims[j]}"
                )

    def assemble(self) -> Gf2Matrix:
        row_off = _offsets(self.row_dims)
        col_off = _offsets(self.col_dims)
        total_rows = row_off[-1]
        total_cols = col_off[-1]
        bits = [0] * total_rows
        for (i, j), b in self.blocks.items():
            r0, c0 = row_off[i], col_off[j]
            for r, rb in enumerate(b.row_bits):
                bits[r0 + r] |= rb << c0
        return Gf2Matrix(total_rows, total_cols, bits)

    def slice(self, m: Gf2Matrix, i: int, j: int) -> Gf2Matrix:
        row_off = _offsets(self.row_dims)
        col_off = _offsets(self.col_dims)
        return m.submatrix(
            range(row_off[i], row_off[i + 1]), range(col_off[j], col_off[j + 1])
        )


def _offsets(dims: tuple[int, ...]) -> list[int]:
    out = [0]
    for d in dims:
        out.append(out[-1] + d)
    return out


def assemble(grid: BlockGrid) -> Gf2Matrix:
    return grid.assemble()
