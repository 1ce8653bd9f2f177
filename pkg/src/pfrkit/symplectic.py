"""The symplectic space F_2^{2n} of phase points.

A phase point u = (a, b) indexes the Weyl operator W(a, b).  The symplectic
form is [(a, b), (c, d)] = a.d + b.c; Lagrangians are the maximal isotropic
subspaces, and each admits a graph normal form {(h, Mh + w) : h in V,
w in V^perp} with M symmetric.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DimensionMismatchError, IsotropyError
from .gf2 import BitMatrix, BitVector, Subspace, rref_rows
from .rng import RngStream

__all__ = [
    "PhasePoint",
    "symplectic_form",
    "is_isotropic",
    "Lagrangian",
    "extend_to_lagrangian",
    "kappa",
    "weyl_cocycle",
]


@dataclass(frozen=True)
class PhasePoint:
    """A point (a, b) of F_2^n x F_2^n."""

    a: BitVector
    b: BitVector

    def __post_init__(self):
        if self.a.n != self.b.n:
            raise DimensionMismatchError("a and b must have the same length")

    @property
    def n(self) -> int:
        return self.a.n

    @classmethod
    def zero(cls, n: int) -> "PhasePoint":
        return cls(BitVector.zeros(n), BitVector.zeros(n))

    @classmethod
    def from_bits(cls, n: int, bits: int) -> "PhasePoint":
        """Unpack from a 2n-bit bitset (a in the low n bits)."""
        mask = (1 << n) - 1
        return cls(BitVector(n, bits & mask), BitVector(n, (bits >> n) & mask))

    def to_bits(self) -> int:
        return self.a.bits | (self.b.bits << self.n)

    def to_vector(self) -> BitVector:
        return BitVector(2 * self.n, self.to_bits())

    @classmethod
    def random(cls, n: int, rng: RngStream) -> "PhasePoint":
        return cls(BitVector.random(n, rng), BitVector.random(n, rng))

    def __xor__(self, other: "PhasePoint") -> "PhasePoint":
        return PhasePoint(self.a ^ other.a, self.b ^ other.b)

    __add__ = __xor__

    def is_zero(self) -> bool:
        return self.a.is_zero() and self.b.is_zero()


def symplectic_form(u: PhasePoint, v: PhasePoint) -> int:
    """[(a, b), (c, d)] = a.d + b.c in F_2."""
    return u.a.dot(v.b) ^ u.b.dot(v.a)


def is_isotropic(points) -> bool:
    """True iff the symplectic form vanishes pairwise on the given points."""
    pts = list(points)
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            if symplectic_form(pts[i], pts[j]):
                return False
    return True


def kappa(u: PhasePoint) -> int:
    """|a o b|: Hamming weight of the entrywise product of the two halves."""
    return (u.a.bits & u.b.bits).bit_count()


def weyl_cocycle(x: PhasePoint, y: PhasePoint) -> int:
    """Exponent beta(x, y) in W(x)W(y) = i^beta W(x + y), reduced mod 4."""
    cross = (x.b.bits & y.a.bits).bit_count()
    return (kappa(x) + kappa(y) - kappa(x + y) + 2 * cross) % 4


def _subspace_points(sub: Subspace) -> list[PhasePoint]:
    if sub.ambient_dim % 2:
        raise DimensionMismatchError("phase-space subspace needs even ambient dimension")
    n = sub.ambient_dim // 2
    return [PhasePoint.from_bits(n, r) for r in sub.basis_rows]


def _is_isotropic_subspace(sub: Subspace) -> bool:
    return is_isotropic(_subspace_points(sub))


class Lagrangian:
    """A Lagrangian of F_2^{2n}, with its graph normal form (V, M).

    The graph form satisfies L = {(h, Mh + w) : h in V, w in V^perp} with M
    symmetric and supported on the pivot coordinates of V.
    """

    __slots__ = ("subspace", "graph_domain", "graph_matrix")

    def __init__(self, subspace: Subspace):
        if subspace.ambient_dim % 2:
            raise DimensionMismatchError("Lagrangian lives in even dimension 2n")
        n = subspace.ambient_dim // 2
        if subspace.dim != n:
            raise IsotropyError(f"dimension {subspace.dim} != n = {n}")
        if not _is_isotropic_subspace(subspace):
            raise IsotropyError("subspace is not isotropic")
        v_sub, m_mat = _graph_form(subspace, n)
        object.__setattr__(self, "subspace", subspace)
        object.__setattr__(self, "graph_domain", v_sub)
        object.__setattr__(self, "graph_matrix", m_mat)

    def __setattr__(self, *a):  # pragma: no cover
        raise AttributeError("Lagrangian is immutable")

    @property
    def n(self) -> int:
        return self.subspace.ambient_dim // 2

    @classmethod
    def from_graph(cls, domain: Subspace, matrix: BitMatrix) -> "Lagrangian":
        """Build {(h, Mh + w) : h in V, w in V^perp} from (V, M)."""
        n = domain.ambient_dim
        if matrix.nrows != n or matrix.ncols != n:
            raise DimensionMismatchError("matrix must be n x n")
        if not matrix.is_symmetric():
            raise IsotropyError("graph matrix must be symmetric")
        rows = []
        for h_bits in domain.basis_rows:
            h = BitVector(n, h_bits)
            rows.append(h.bits | (matrix.apply(h).bits << n))
        for w_bits in domain.orthogonal_complement().basis_rows:
            rows.append(w_bits << n)
        return cls(Subspace(2 * n, rows))

    def contains(self, u: PhasePoint) -> bool:
        return self.subspace.contains(u.to_vector())

    def points(self):
        """All 2^n phase points (desk scale only)."""
        n = self.n
        return [PhasePoint.from_bits(n, bits) for bits in self.subspace.enumerate_bits()]

    def __eq__(self, other) -> bool:
        return isinstance(other, Lagrangian) and self.subspace == other.subspace

    def __hash__(self) -> int:
        return hash(self.subspace)

    def __repr__(self) -> str:
        return f"Lagrangian(n={self.n}, dim V={self.graph_domain.dim})"


def _graph_form(sub: Subspace, n: int) -> tuple[Subspace, BitMatrix]:
    """Extract (V, M) from a Lagrangian subspace given in echelon form.

    V is the projection onto the first n coordinates.  M is the unique
    symmetric matrix supported on V's pivot coordinates with h_i^T M h_j =
    h_i . y_j for the echelon basis pairs (h_i, y_i).
    """
    mask = (1 << n) - 1
    first: list[tuple[int, int]] = []  # (h, y) with h != 0
    second: list[int] = []  # w with (0, w) in L
    for r in sub.basis_rows:
        h = r & mask
        y = r >> n
        if h:
            first.append((h, y))
        else:
            second.append(y)
    v_rows, v_pivots = rref_rows([h for h, _ in first], n)
    if len(v_rows) != len(first):
        # Echelon form over 2n columns guarantees independent first halves
        # for rows whose pivot lies in the first block; re-reduce to be safe.
        raise IsotropyError("unexpected dependence among graph-part rows")
    # Re-express (h_i, y_i) over the echelon basis of V so pivots line up:
    # solve each echelon row as a combination of the original first halves
    # and combine the second halves the same way.
    basis_pairs: list[tuple[int, int]] = []
    for target in v_rows:
        cur_y = 0
        res = target
        avail = list(first)
        for col in range(n):
            if not (res >> col) & 1:
                continue
            pick = None
            for idx, (h, y) in enumerate(avail):
                if (h >> col) & 1:
                    pick = idx
                    break
            if pick is None:
                raise IsotropyError("graph-part solve failed")
            h, y = avail.pop(pick)
            res ^= h
            cur_y ^= y
            avail = [(hh ^ h, yy ^ y) if (hh >> col) & 1 else (hh, yy) for hh, yy in avail]
        basis_pairs.append((target, cur_y))
    v_sub = Subspace(n, v_rows)
    k = len(v_rows)
    # G_{ij} = h_i . y_j (symmetric by isotropy); M = D^T G D with D the
    # pivot-coordinate selector, so M is zero outside pivot rows/columns.
    g = [[_dot_bits(basis_pairs[i][0], basis_pairs[j][1]) for j in range(k)] for i in range(k)]
    m_rows = [0] * n
    for i in range(k):
        for j in range(k):
            if g[i][j]:
                m_rows[v_pivots[i]] |= 1 << v_pivots[j]
    m_mat = BitMatrix(n, n, m_rows)
    if not m_mat.is_symmetric():
        raise IsotropyError("graph matrix failed symmetry (input not Lagrangian)")
    return v_sub, m_mat


def _dot_bits(x: int, y: int) -> int:
    return (x & y).bit_count() & 1


def extend_to_lagrangian(iso: Subspace) -> Lagrangian:
    """Extend an isotropic subspace of F_2^{2n} to a full Lagrangian.

    Repeatedly adjoins a vector of the symplectic complement not already in
    the span until the dimension reaches n.

    Raises:
        IsotropyError: if the input is not isotropic.
    """
    if iso.ambient_dim % 2:
        raise DimensionMismatchError("ambient dimension must be even")
    n = iso.ambient_dim // 2
    if not _is_isotropic_subspace(iso):
        raise IsotropyError("input subspace is not isotropic")
    current = iso
    while current.dim < n:
        # Symplectic complement = ordinary complement of J(current), where J
        # swaps the two halves.
        mask = (1 << n) - 1
        swapped = [((r & mask) << n) | (r >> n) for r in current.basis_rows]
        comp = Subspace(2 * n, swapped).orthogonal_complement()
        new_bits = None
        for r in comp.basis_rows:
            if current.reduce_bits(r):
                new_bits = r
                break
        if new_bits is None:  # pragma: no cover - impossible below dim n
            raise IsotropyError("could not extend isotropic subspace")
        current = Subspace(2 * n, current.basis_rows + (new_bits,))
    return Lagrangian(current)
