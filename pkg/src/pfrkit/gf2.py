"""GF(2) linear algebra on int bitsets.

Vectors of F_2^n are stored as Python ints (coordinate ``i`` is bit ``i``),
which keeps XOR/AND/popcount cheap at any dimension.  Matrices are tuples of
row bitsets.  Subspaces are kept in reduced row-echelon form so equality and
membership are canonical.
"""

from __future__ import annotations

from typing import Iterable, Iterator, Sequence

from .errors import ContainmentError, DimensionMismatchError
from .rng import RngStream

__all__ = [
    "BitVector",
    "BitMatrix",
    "Subspace",
    "AffineMap",
    "rref_rows",
    "nullspace_rows",
    "random_linear_map",
]


def _parity(x: int) -> int:
    return x.bit_count() & 1


class BitVector:
    """Immutable vector of F_2^n backed by an int bitset."""

    __slots__ = ("n", "bits")

    def __init__(self, n: int, bits: int = 0):
        if n < 0:
            raise DimensionMismatchError("dimension must be nonnegative")
        if bits < 0 or bits >> n:
            raise DimensionMismatchError(f"bits 0x{bits:x} out of range for n={n}")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "bits", bits)

    def __setattr__(self, *a):  # pragma: no cover - immutability guard
        raise AttributeError("BitVector is immutable")

    # -- constructors -------------------------------------------------------

    @classmethod
    def zeros(cls, n: int) -> "BitVector":
        return cls(n, 0)

    @classmethod
    def basis(cls, n: int, i: int) -> "BitVector":
        return cls(n, 1 << i)

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> "BitVector":
        seq = [int(b) & 1 for b in bits]
        value = 0
        for i, b in enumerate(seq):
            value |= b << i
        return cls(len(seq), value)

    @classmethod
    def from_string(cls, s: str) -> "BitVector":
        """Parse a bitstring, most significant coordinate first."""
        s = s.strip()
        return cls(len(s), int(s, 2) if s else 0)

    @classmethod
    def random(cls, n: int, rng: RngStream) -> "BitVector":
        return cls(n, rng.uniform_int(n))

    # -- arithmetic ---------------------------------------------------------

    def _check(self, other: "BitVector") -> None:
        if self.n != other.n:
            raise DimensionMismatchError(f"length {self.n} vs {other.n}")

    def __xor__(self, other: "BitVector") -> "BitVector":
        self._check(other)
        return BitVector(self.n, self.bits ^ other.bits)

    __add__ = __xor__

    def __and__(self, other: "BitVector") -> "BitVector":
        """Entrywise (Hadamard) product."""
        self._check(other)
        return BitVector(self.n, self.bits & other.bits)

    def dot(self, other: "BitVector") -> int:
        self._check(other)
        return _parity(self.bits & other.bits)

    def weight(self) -> int:
        return self.bits.bit_count()

    def is_zero(self) -> bool:
        return self.bits == 0

    def __getitem__(self, i: int) -> int:
        if not 0 <= i < self.n:
            raise IndexError(i)
        return (self.bits >> i) & 1

    def __len__(self) -> int:
        return self.n

    def __iter__(self) -> Iterator[int]:
        return ((self.bits >> i) & 1 for i in range(self.n))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, BitVector) and self.n == other.n and self.bits == other.bits
        )

    def __hash__(self) -> int:
        return hash((self.n, self.bits))

    def to_string(self) -> str:
        """Render as a bitstring, most significant coordinate first."""
        return format(self.bits, f"0{self.n}b") if self.n else ""

    def __repr__(self) -> str:
        return f"BitVector('{self.to_string()}')"

    def support(self) -> tuple[int, ...]:
        return tuple(i for i in range(self.n) if (self.bits >> i) & 1)


class BitMatrix:
    """Immutable matrix over GF(2); ``rows[i]`` is the bitset of row i."""

    __slots__ = ("nrows", "ncols", "rows")

    def __init__(self, nrows: int, ncols: int, rows: Sequence[int]):
        rows = tuple(int(r) for r in rows)
        if len(rows) != nrows:
            raise DimensionMismatchError("row count mismatch")
        for r in rows:
            if r < 0 or r >> ncols:
                raise DimensionMismatchError("row out of range")
        object.__setattr__(self, "nrows", nrows)
        object.__setattr__(self, "ncols", ncols)
        object.__setattr__(self, "rows", rows)

    def __setattr__(self, *a):  # pragma: no cover
        raise AttributeError("BitMatrix is immutable")

    # -- constructors -------------------------------------------------------

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "BitMatrix":
        return cls(nrows, ncols, [0] * nrows)

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls(n, n, [1 << i for i in range(n)])

    @classmethod
    def from_rows(cls, rows: Sequence[BitVector]) -> "BitMatrix":
        if not rows:
            raise DimensionMismatchError("need at least one row")
        ncols = rows[0].n
        return cls(len(rows), ncols, [r.bits for r in rows])

    @classmethod
    def random(cls, nrows: int, ncols: int, rng: RngStream) -> "BitMatrix":
        return cls(nrows, ncols, [rng.uniform_int(ncols) for _ in range(nrows)])

    # -- access -------------------------------------------------------------

    def row(self, i: int) -> BitVector:
        return BitVector(self.ncols, self.rows[i])

    def entry(self, i: int, j: int) -> int:
        return (self.rows[i] >> j) & 1

    def column(self, j: int) -> BitVector:
        bits = 0
        for i in range(self.nrows):
            bits |= ((self.rows[i] >> j) & 1) << i
        return BitVector(self.nrows, bits)

    # -- arithmetic ---------------------------------------------------------

    def apply(self, x: BitVector) -> BitVector:
        if x.n != self.ncols:
            raise DimensionMismatchError(f"matrix is {self.nrows}x{self.ncols}, vector has length {x.n}")
        out = 0
        for i, r in enumerate(self.rows):
            out |= _parity(r & x.bits) << i
        return BitVector(self.nrows, out)

    def __add__(self, other: "BitMatrix") -> "BitMatrix":
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            raise DimensionMismatchError("shape mismatch")
        return BitMatrix(self.nrows, self.ncols, [a ^ b for a, b in zip(self.rows, other.rows)])

    def matmul(self, other: "BitMatrix") -> "BitMatrix":
        if self.ncols != other.nrows:
            raise DimensionMismatchError("inner dimension mismatch")
        ot = other.transpose()
        rows = []
        for r in self.rows:
            bits = 0
            for j, c in enumerate(ot.rows):
                bits |= _parity(r & c) << j
            rows.append(bits)
        return BitMatrix(self.nrows, other.ncols, rows)

    def transpose(self) -> "BitMatrix":
        rows = [0] * self.ncols
        for i, r in enumerate(self.rows):
            rr = r
            while rr:
                j = (rr & -rr).bit_length() - 1
                rows[j] |= 1 << i
                rr &= rr - 1
        return BitMatrix(self.ncols, self.nrows, rows)

    def is_symmetric(self) -> bool:
        return self.nrows == self.ncols and self.rows == self.transpose().rows

    def strict_upper(self) -> "BitMatrix":
        mask = [~((1 << (i + 1)) - 1) & ((1 << self.ncols) - 1) for i in range(self.nrows)]
        return BitMatrix(self.nrows, self.ncols, [r & m for r, m in zip(self.rows, mask)])

    def diagonal(self) -> BitVector:
        k = min(self.nrows, self.ncols)
        bits = 0
        for i in range(k):
            bits |= ((self.rows[i] >> i) & 1) << i
        return BitVector(k, bits)

    def rank(self) -> int:
        _, pivots = rref_rows(list(self.rows), self.ncols)
        return len(pivots)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, BitMatrix)
            and (self.nrows, self.ncols) == (other.nrows, other.ncols)
            and self.rows == other.rows
        )

    def __hash__(self) -> int:
        return hash((self.nrows, self.ncols, self.rows))

    def __repr__(self) -> str:
        body = ",".join(self.row(i).to_string() for i in range(self.nrows))
        return f"BitMatrix[{body}]"


def rref_rows(rows: list[int], ncols: int) -> tuple[list[int], list[int]]:
    """Reduced row-echelon form of int-bitset rows.

    Returns:
        (reduced nonzero rows ordered by pivot, pivot column indices).
    """
    work = [r for r in rows if r]
    out: list[int] = []
    pivots: list[int] = []
    for col in range(ncols):
        pivot_row = None
        for idx, r in enumerate(work):
            if (r >> col) & 1:
                pivot_row = idx
                break
        if pivot_row is None:
            continue
        p = work.pop(pivot_row)
        work = [r ^ p if (r >> col) & 1 else r for r in work]
        work = [r for r in work if r]
        out = [r ^ p if (r >> col) & 1 else r for r in out]
        out.append(p)
        pivots.append(col)
        if not work:
            break
    # out rows are already mutually reduced; order by pivot (ascending).
    order = sorted(range(len(out)), key=lambda i: pivots[i])
    return [out[i] for i in order], sorted(pivots)


def nullspace_rows(rows: Sequence[int], ncols: int) -> list[int]:
    """Basis (bitsets) of {x : Mx = 0} for the matrix with the given rows."""
    red, pivots = rref_rows(list(rows), ncols)
    pivot_set = set(pivots)
    basis = []
    for j in range(ncols):
        if j in pivot_set:
            continue
        vec = 1 << j
        for p, r in zip(pivots, red):
            if (r >> j) & 1:
                vec |= 1 << p
        basis.append(vec)
    return basis


class Subspace:
    """A linear subspace of F_2^n held in canonical reduced echelon form."""

    __slots__ = ("ambient_dim", "_rows", "_pivots")

    def __init__(self, ambient_dim: int, rows: Sequence[int] = ()):
        red, pivots = rref_rows(list(rows), ambient_dim)
        object.__setattr__(self, "ambient_dim", ambient_dim)
        object.__setattr__(self, "_rows", tuple(red))
        object.__setattr__(self, "_pivots", tuple(pivots))

    def __setattr__(self, *a):  # pragma: no cover
        raise AttributeError("Subspace is immutable")

    # -- constructors -------------------------------------------------------

    @classmethod
    def span(cls, vectors: Sequence[BitVector], ambient_dim: int | None = None) -> "Subspace":
        if not vectors:
            if ambient_dim is None:
                raise DimensionMismatchError("ambient_dim required for empty span")
            return cls(ambient_dim)
        n = vectors[0].n
        if ambient_dim is not None and ambient_dim != n:
            raise DimensionMismatchError("ambient_dim disagrees with vectors")
        for v in vectors:
            if v.n != n:
                raise DimensionMismatchError("mixed vector lengths")
        return cls(n, [v.bits for v in vectors])

    @classmethod
    def full(cls, n: int) -> "Subspace":
        return cls(n, [1 << i for i in range(n)])

    @classmethod
    def zero(cls, n: int) -> "Subspace":
        return cls(n)

    # -- queries ------------------------------------------------------------

    @property
    def dim(self) -> int:
        return len(self._rows)

    @property
    def basis_rows(self) -> tuple[int, ...]:
        return self._rows

    @property
    def pivots(self) -> tuple[int, ...]:
        return self._pivots

    def basis_vectors(self) -> list[BitVector]:
        return [BitVector(self.ambient_dim, r) for r in self._rows]

    def reduce_bits(self, bits: int) -> int:
        """Canonical representative of ``bits + V`` (zero iff member)."""
        for p, r in zip(self._pivots, self._rows):
            if (bits >> p) & 1:
                bits ^= r
        return bits

    def contains(self, v: BitVector) -> bool:
        if v.n != self.ambient_dim:
            raise DimensionMismatchError("ambient dimension mismatch")
        return self.reduce_bits(v.bits) == 0

    def coset_rep(self, v: BitVector) -> BitVector:
        if v.n != self.ambient_dim:
            raise DimensionMismatchError("ambient dimension mismatch")
        return BitVector(self.ambient_dim, self.reduce_bits(v.bits))

    def contains_subspace(self, other: "Subspace") -> bool:
        if other.ambient_dim != self.ambient_dim:
            raise DimensionMismatchError("ambient dimension mismatch")
        return all(self.reduce_bits(r) == 0 for r in other._rows)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Subspace)
            and self.ambient_dim == other.ambient_dim
            and self._rows == other._rows
        )

    def __hash__(self) -> int:
        return hash((self.ambient_dim, self._rows))

    def __repr__(self) -> str:
        return f"Subspace(dim={self.dim}, ambient={self.ambient_dim})"

    def enumerate_bits(self) -> Iterator[int]:
        """Yield all 2^dim elements as bitsets (use only at desk scale)."""
        k = self.dim
        for mask in range(1 << k):
            x = 0
            m = mask
            while m:
                i = (m & -m).bit_length() - 1
                x ^= self._rows[i]
                m &= m - 1
            yield x

    def enumerate_vectors(self) -> Iterator[BitVector]:
        for bits in self.enumerate_bits():
            yield BitVector(self.ambient_dim, bits)

    # -- constructions ------------------------------------------------------

    def orthogonal_complement(self) -> "Subspace":
        """{x : x . v = 0 for all v in V}."""
        return Subspace(self.ambient_dim, nullspace_rows(self._rows, self.ambient_dim))

    def complement_in(self, w: "Subspace") -> "Subspace":
        """A direct complement C with self (+) C = w.

        Raises:
            ContainmentError: if self is not contained in w.
        """
        if not w.contains_subspace(self):
            raise ContainmentError("subspace is not contained in the claimed superspace")
        added: list[int] = []
        current = list(self._rows)
        rank = self.dim
        for r in w._rows:
            trial, piv = rref_rows(current + [r], self.ambient_dim)
            if len(piv) > rank:
                current = trial
                rank = len(piv)
                added.append(r)
        return Subspace(self.ambient_dim, added)

    def sum(self, other: "Subspace") -> "Subspace":
        if other.ambient_dim != self.ambient_dim:
            raise DimensionMismatchError("ambient dimension mismatch")
        return Subspace(self.ambient_dim, self._rows + other._rows)

    def intersection(self, other: "Subspace") -> "Subspace":
        # V cap W = (V^perp + W^perp)^perp
        return self.orthogonal_complement().sum(other.orthogonal_complement()).orthogonal_complement()


class AffineMap:
    """x |-> Mx + v from F_2^m to F_2^n (M is n x m, v has length n)."""

    __slots__ = ("matrix", "offset")

    def __init__(self, matrix: BitMatrix, offset: BitVector | None = None):
        if offset is None:
            offset = BitVector.zeros(matrix.nrows)
        if offset.n != matrix.nrows:
            raise DimensionMismatchError("offset length must equal matrix row count")
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "offset", offset)

    def __setattr__(self, *a):  # pragma: no cover
        raise AttributeError("AffineMap is immutable")

    @property
    def domain_dim(self) -> int:
        return self.matrix.ncols

    @property
    def codomain_dim(self) -> int:
        return self.matrix.nrows

    def __call__(self, x: BitVector) -> BitVector:
        return self.matrix.apply(x) ^ self.offset

    def is_linear(self) -> bool:
        return self.offset.is_zero()

    def kernel(self) -> Subspace:
        """Kernel of the linear part."""
        return Subspace(self.domain_dim, nullspace_rows(self.matrix.rows, self.domain_dim))

    def image(self) -> Subspace:
        """Column space of the linear part."""
        return Subspace(self.codomain_dim, self.matrix.transpose().rows)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, AffineMap)
            and self.matrix == other.matrix
            and self.offset == other.offset
        )

    def __repr__(self) -> str:
        return f"AffineMap({self.domain_dim}->{self.codomain_dim})"


def random_linear_map(n: int, m: int, rng: RngStream) -> AffineMap:
    """Uniformly random linear map F_2^n -> F_2^m (zero offset)."""
    return AffineMap(BitMatrix.random(m, n, rng))
