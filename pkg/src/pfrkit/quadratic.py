"""Quadratic phases and stabilizer states.

A quadratic polynomial over F_2^n is q(x) = x^T Q x + l.x + c with Q strictly
upper triangular.  A stabilizer state is the explicit normal form

    phi(x) = alpha * 2^((n-k)/2) * 1_V(x + r)
             * (-1)^((x+r)^T A (x+r) + s.(x+r)) * i^(|d o (x+r)|),

with V <= F_2^n of dimension k, A strictly upper triangular, and d normalized
so that d = 0 or d lies outside V^perp.  Such states are unit vectors whose
characteristic support is the Lagrangian with graph matrix M = A + A^T +
Diag(d) over V.
"""

from __future__ import annotations

import math

import numpy as np

from .config import check_dense
from .errors import DimensionMismatchError, IsotropyError, ParameterError
from .funcspace import DenseFunction, parity_u64
from .gf2 import BitMatrix, BitVector, Subspace
from .rng import RngStream
from .symplectic import Lagrangian, PhasePoint, kappa

__all__ = [
    "QuadraticPolynomial",
    "StabilizerState",
    "declassify",
    "stabilizer_to_quadratics",
    "fit_stabilizer_dense",
    "neighbor",
]


def _pairs_of(mat: BitMatrix) -> list[tuple[int, int]]:
    out = []
    for i in range(mat.nrows):
        row = mat.rows[i]
        while row:
            j = (row & -row).bit_length() - 1
            out.append((i, j))
            row &= row - 1
    return out


def _fold_strict_upper(mat: BitMatrix) -> tuple[BitMatrix, BitVector]:
    """Split x^T M x into a strict-upper quadratic part plus a linear part.

    Over F_2, x_i^2 = x_i, so the diagonal contributes linearly; the lower
    triangle folds onto the upper one.
    """
    n = mat.nrows
    diag = mat.diagonal()
    folded = mat.strict_upper() + mat.transpose().strict_upper()
    return folded, diag


class QuadraticPolynomial:
    """q(x) = x^T Q x + l.x + c with Q strictly upper triangular."""

    __slots__ = ("n", "quad", "linear", "constant")

    def __init__(self, n: int, quad: BitMatrix, linear: BitVector, constant: int = 0):
        if quad.nrows != n or quad.ncols != n or linear.n != n:
            raise DimensionMismatchError("quadratic parts must be n x n / length n")
        folded, diag = _fold_strict_upper(quad)
        self.n = n
        self.quad = folded
        self.linear = linear ^ BitVector(n, diag.bits)
        self.constant = int(constant) & 1

    @classmethod
    def zero(cls, n: int) -> "QuadraticPolynomial":
        return cls(n, BitMatrix.zeros(n, n), BitVector.zeros(n))

    @classmethod
    def linear_form(cls, y: BitVector) -> "QuadraticPolynomial":
        return cls(y.n, BitMatrix.zeros(y.n, y.n), y)

    @classmethod
    def random(cls, n: int, rng: RngStream) -> "QuadraticPolynomial":
        return cls(
            n,
            BitMatrix.random(n, n, rng.child("Q")).strict_upper(),
            BitVector.random(n, rng.child("l")),
            int(rng.child("c").integers(0, 2)),
        )

    # -- evaluation ---------------------------------------------------------

    def eval_bits(self, pts: np.ndarray) -> np.ndarray:
        """Evaluate on packed uint64 points; returns uint64 values in {0, 1}."""
        acc = np.full(pts.shape, self.constant, dtype=np.uint64)
        one = np.uint64(1)
        # x^T Q x = sum_i x_i (Q_i . x) over the strict upper rows Q_i.
        for i, row in enumerate(self.quad.rows):
            if row:
                acc ^= (pts >> np.uint64(i)) & one & parity_u64(pts & np.uint64(row))
        acc ^= parity_u64(pts & np.uint64(self.linear.bits))
        return acc

    def __call__(self, x: BitVector) -> int:
        if x.n != self.n:
            raise DimensionMismatchError("point length mismatch")
        return int(self.eval_bits(np.array([x.bits], dtype=np.uint64))[0])

    def phase_values(self, pts: np.ndarray) -> np.ndarray:
        """(-1)^q on packed points, as float64."""
        return 1.0 - 2.0 * self.eval_bits(pts).astype(np.float64)

    def dense_phase(self) -> DenseFunction:
        check_dense(self.n)
        pts = np.arange(1 << self.n, dtype=np.uint64)
        return DenseFunction(self.n, self.phase_values(pts).astype(np.complex128))

    # -- algebra --------------------------------------------------------------

    def __add__(self, other) -> "QuadraticPolynomial":
        if isinstance(other, int):
            return QuadraticPolynomial(self.n, self.quad, self.linear, self.constant ^ (other & 1))
        if isinstance(other, BitVector):
            return QuadraticPolynomial(self.n, self.quad, self.linear ^ other, self.constant)
        if not isinstance(other, QuadraticPolynomial) or other.n != self.n:
            raise DimensionMismatchError("cannot add")
        return QuadraticPolynomial(
            self.n, self.quad + other.quad, self.linear ^ other.linear, self.constant ^ other.constant
        )

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, QuadraticPolynomial)
            and self.n == other.n
            and self.quad == other.quad
            and self.linear == other.linear
            and self.constant == other.constant
        )

    def __hash__(self) -> int:
        return hash((self.n, self.quad, self.linear, self.constant))

    def __repr__(self) -> str:
        return f"QuadraticPolynomial(n={self.n}, rank~{self.quad.rank()}, l={self.linear.to_string()}, c={self.constant})"

    # -- serialization ----------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "quad_rows": [self.quad.row(i).to_string() for i in range(self.n)],
            "linear": self.linear.to_string(),
            "constant": self.constant,
        }

    @classmethod
    def from_json(cls, data: dict) -> "QuadraticPolynomial":
        n = int(data["n"])
        rows = [BitVector.from_string(s) for s in data["quad_rows"]]
        return cls(n, BitMatrix.from_rows(rows), BitVector.from_string(data["linear"]), int(data["constant"]))


def _entrywise(a: BitVector, b: BitVector) -> BitVector:
    return BitVector(a.n, a.bits & b.bits)


def _pairs_matrix(n: int, support: BitVector) -> BitMatrix:
    """Strict-upper matrix with ones on pairs (i < j) inside the support."""
    rows = [0] * n
    sup = support.support()
    for ii, i in enumerate(sup):
        for j in sup[ii + 1 :]:
            rows[i] |= 1 << j
    return BitMatrix(n, n, rows)


class StabilizerState:
    """Explicit stabilizer state; see the module docstring for the formula.

    The constructor normalizes: A is folded to strict-upper (diagonal and
    lower parts pushed into s), r is replaced by the canonical coset
    representative of r + V, and a nonzero d lying in V^perp is folded into
    the quadratic part (on the support of the state the two agree).
    """

    __slots__ = ("n", "domain", "shift", "quad", "linear", "nc", "alpha")

    def __init__(
        self,
        n: int,
        domain: Subspace,
        shift: BitVector,
        quad: BitMatrix,
        linear: BitVector,
        nc: BitVector,
        alpha: complex = 1.0,
    ):
        if domain.ambient_dim != n or shift.n != n or linear.n != n or nc.n != n:
            raise DimensionMismatchError("all parts must live in F_2^n")
        if quad.nrows != n or quad.ncols != n:
            raise DimensionMismatchError("quadratic matrix must be n x n")
        quad, diag = _fold_strict_upper(quad)
        linear = linear ^ diag
        # Canonicalize the coset representative: replacing r by r + h with
        # h in V shifts y = x + r by h, which re-expresses the phases as
        #   s   -> s + (A + A^T) h + (d o h)
        #   alpha -> alpha * (-1)^(h^T A h + s.h) * i^(|d o h|).
        r_c = domain.coset_rep(shift)
        h = shift ^ r_c
        if not h.is_zero():
            sym = quad + quad.transpose()
            exponent = (2 * (int(_q_eval(quad, h)) ^ linear.dot(h)) + (nc & h).weight()) % 4
            alpha = alpha * (1j**exponent)
            linear = linear ^ sym.apply(h) ^ _entrywise(nc, h)
            shift = r_c
        else:
            shift = r_c
        # Fold d into the quadratic part when d in V^perp: on V, |d o y| is
        # even and i^{|d o y|} = (-1)^{sum of pairs in supp(d)}.
        if not nc.is_zero() and domain.orthogonal_complement().contains(nc):
            quad = quad + _pairs_matrix(n, nc)
            nc = BitVector.zeros(n)
        self.n = n
        self.domain = domain
        self.shift = shift
        self.quad = quad
        self.linear = linear
        self.nc = nc
        self.alpha = complex(alpha)

    # -- constructors -----------------------------------------------------------

    @classmethod
    def from_global(
        cls,
        n: int,
        domain: Subspace,
        coset_point: BitVector,
        quad: BitMatrix,
        linear: BitVector,
        nc: BitVector,
        alpha: complex = 1.0,
    ) -> "StabilizerState":
        """Build from the global parametrization
        ``alpha' 2^((n-k)/2) 1_{w+V}(x) (-1)^(x^T Q x + c.x) i^(|d o x|)``.

        Substituting x = y + w converts to the shifted form used internally.
        """
        quad, diag = _fold_strict_upper(quad)
        linear = linear ^ diag
        w = coset_point
        sym = quad + quad.transpose()
        s_shift = linear ^ sym.apply(w) ^ _entrywise(nc, w)
        exponent = (2 * (int(_q_eval(quad, w)) ^ linear.dot(w)) + (nc & w).weight()) % 4
        return cls(n, domain, w, quad, s_shift, nc, alpha * (1j**exponent))

    @classmethod
    def random(cls, n: int, rng: RngStream, *, dim: int | None = None) -> "StabilizerState":
        k = int(rng.child("k").integers(0, n + 1)) if dim is None else dim
        vecs = [BitVector.random(n, rng.child("v", i)) for i in range(k)]
        domain = Subspace.span(vecs, ambient_dim=n)
        return cls(
            n,
            domain,
            BitVector.random(n, rng.child("r")),
            BitMatrix.random(n, n, rng.child("A")).strict_upper(),
            BitVector.random(n, rng.child("s")),
            BitVector.random(n, rng.child("d")),
        )

    # -- evaluation ----------------------------------------------------------------

    @property
    def dim(self) -> int:
        return self.domain.dim

    def evaluate(self, pts: np.ndarray) -> np.ndarray:
        y = pts ^ np.uint64(self.shift.bits)
        member = np.ones(pts.shape, dtype=bool)
        for w_bits in self.domain.orthogonal_complement().basis_rows:
            member &= parity_u64(y & np.uint64(w_bits)) == 0
        exponent = np.zeros(pts.shape, dtype=np.int64)
        one = np.uint64(1)
        for i, j in _pairs_of(self.quad):
            exponent += 2 * ((y >> np.uint64(i)) & (y >> np.uint64(j)) & one).astype(np.int64)
        exponent += 2 * parity_u64(y & np.uint64(self.linear.bits)).astype(np.int64)
        exponent += np.bitwise_count(y & np.uint64(self.nc.bits)).astype(np.int64)
        pref = self.alpha * 2.0 ** ((self.n - self.dim) / 2.0)
        return np.where(member, pref * 1j ** (exponent % 4), 0.0 + 0.0j)

    def __call__(self, x: BitVector) -> complex:
        return complex(self.evaluate(np.array([x.bits], dtype=np.uint64))[0])

    def dense(self) -> DenseFunction:
        check_dense(self.n)
        pts = np.arange(1 << self.n, dtype=np.uint64)
        return DenseFunction(self.n, self.evaluate(pts))

    # -- structure ---------------------------------------------------------------

    def lagrangian(self) -> Lagrangian:
        """L(phi) with graph matrix M = A + A^T + Diag(d) over V."""
        m = self.quad + self.quad.transpose()
        rows = list(m.rows)
        for i in self.nc.support():
            rows[i] ^= 1 << i
        return Lagrangian.from_graph(self.domain, BitMatrix(self.n, self.n, rows))

    def global_form(self) -> tuple[BitVector, BitMatrix, BitVector, BitVector]:
        """(w, Q, c, d) such that phi(x) ~ 1_{w+V}(x) (-1)^(x^T Q x + c.x) i^(|d o x|)."""
        sym = self.quad + self.quad.transpose()
        c = self.linear ^ sym.apply(self.shift) ^ _entrywise(self.nc, self.shift)
        return self.shift, self.quad, c, self.nc

    def projective_key(self) -> tuple:
        """Canonical key identifying the state up to global phase."""
        basis = self.domain.basis_vectors()
        k = len(basis)

        def t_of(h: BitVector) -> int:
            return (2 * (int(_q_eval(self.quad, h)) ^ self.linear.dot(h)) + (self.nc & h).weight()) % 4

        singles = tuple(t_of(h) for h in basis)
        pairs = tuple(t_of(basis[i] ^ basis[j]) for i in range(k) for j in range(i + 1, k))
        return (self.n, self.domain.basis_rows, self.shift.bits, singles, pairs)

    def projectively_equal(self, other: "StabilizerState") -> bool:
        return self.projective_key() == other.projective_key()

    def __repr__(self) -> str:
        return f"StabilizerState(n={self.n}, dim V={self.dim}, r={self.shift.to_string()})"

    # -- serialization --------------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "domain_rows": [BitVector(self.n, b).to_string() for b in self.domain.basis_rows],
            "shift": self.shift.to_string(),
            "quad_rows": [self.quad.row(i).to_string() for i in range(self.n)],
            "linear": self.linear.to_string(),
            "nonclassical": self.nc.to_string(),
            "alpha": [self.alpha.real, self.alpha.imag],
        }

    @classmethod
    def from_json(cls, data: dict) -> "StabilizerState":
        n = int(data["n"])
        domain = Subspace.span(
            [BitVector.from_string(s) for s in data["domain_rows"]], ambient_dim=n
        )
        return cls(
            n,
            domain,
            BitVector.from_string(data["shift"]),
            BitMatrix.from_rows([BitVector.from_string(s) for s in data["quad_rows"]])
            if data["quad_rows"]
            else BitMatrix.zeros(n, n),
            BitVector.from_string(data["linear"]),
            BitVector.from_string(data["nonclassical"]),
            complex(data["alpha"][0], data["alpha"][1]),
        )


def _q_eval(quad: BitMatrix, x: BitVector) -> int:
    """x^T Q x over F_2 for a strict-upper Q."""
    acc = 0
    for i, j in _pairs_of(quad):
        acc ^= ((x.bits >> i) & (x.bits >> j)) & 1
    return acc


def declassify(c: BitVector, v: BitVector) -> QuadraticPolynomial:
    """The classical quadratic r with (-1)^{r(z + bv)} = i^{|c o z| - 2|c o z o (bv)|}.

    Here z ranges over the hyperplane {c}^perp and b over F_2 (so every x
    decomposes as z + bv with b = c.x).  Requires c.v = 1.
    """
    n = c.n
    if v.n != n:
        raise DimensionMismatchError("length mismatch")
    if c.dot(v) != 1:
        raise ParameterError("declassify requires c.v = 1")

    def r_val(x_bits: int) -> int:
        b = BitVector(n, x_bits).dot(c)
        z = x_bits ^ (v.bits if b else 0)
        w = (c.bits & z).bit_count()
        if b:
            w -= 2 * (c.bits & z & v.bits).bit_count()
        exp = w % 4
        if exp == 0:
            return 0
        if exp == 2:
            return 1
        raise IsotropyError("declassify target value is not a sign")  # pragma: no cover

    lin = 0
    quad_rows = [0] * n
    base = [r_val(1 << i) for i in range(n)]
    for i in range(n):
        lin |= base[i] << i
    for i in range(n):
        for j in range(i + 1, n):
            if r_val((1 << i) | (1 << j)) ^ base[i] ^ base[j]:
                quad_rows[i] |= 1 << j
    return QuadraticPolynomial(n, BitMatrix(n, n, quad_rows), BitVector(n, lin), 0)


def stabilizer_to_quadratics(state: StabilizerState) -> list[QuadraticPolynomial]:
    """Classical quadratic candidates correlating with a stabilizer state.

    With phi of codimension n - k, at least one returned polynomial q has
    |<f, (-1)^q>|^2 >= 2^{-(n-k+1)} |<f, phi>|^2 for any 1-bounded f.  The
    list has size 2^{n-k} when d = 0 and 2^{n-k+1} otherwise.
    """
    n = state.n
    _, quad, c_lin, d = state.global_form()
    base = QuadraticPolynomial(n, quad, c_lin, 0)
    perp = state.domain.orthogonal_complement()
    if d.is_zero():
        return [base + BitVector(n, y) for y in perp.enumerate_bits()]
    v = BitVector.basis(n, d.support()[0])
    r_poly = declassify(d, v)
    out = []
    for y in perp.enumerate_bits():
        shifted = base + BitVector(n, y) + r_poly
        out.append(shifted)
        out.append(shifted + d)
    return out


def fit_stabilizer_dense(values: np.ndarray) -> StabilizerState:
    """Recover explicit stabilizer parameters from a dense unit vector.

    Raises:
        IsotropyError: if the table is not a stabilizer state (up to 1e-6).
    """
    size = len(values)
    n = size.bit_length() - 1
    if 1 << n != size:
        raise DimensionMismatchError("table length must be a power of two")
    support = [x for x in range(size) if abs(values[x]) > 1e-8]
    if not support:
        raise IsotropyError("zero vector is not a stabilizer state")
    r_bits = support[0]
    domain = Subspace(n, [x ^ r_bits for x in support])
    k = domain.dim
    if len(support) != 1 << k:
        raise IsotropyError("support is not an affine subspace")
    base_val = values[r_bits]
    # Unit norm in the expectation convention: sum |v|^2 / 2^n = 1.
    total = float(np.sum(np.abs(np.asarray(values)) ** 2)) / size
    if abs(total - 1.0) > 1e-6:
        raise IsotropyError("table is not normalized")

    def t_of(h_bits: int) -> int:
        ratio = values[r_bits ^ h_bits] / base_val
        for e in range(4):
            if abs(ratio - 1j**e) < 1e-6:
                return e
        raise IsotropyError("phase ratio is not a power of i")

    basis = list(domain.basis_rows)
    pivots = list(domain.pivots)
    singles = [t_of(h) for h in basis]
    d_bits = 0
    s_bits = 0
    quad_rows = [0] * n
    for i, t in enumerate(singles):
        if t % 2:
            d_bits |= 1 << pivots[i]
        if ((t - (t % 2)) // 2) % 2:
            s_bits |= 1 << pivots[i]
    # t(sum c_i h_i) = (integer sum of t_i c_i) + 2 sum m_ij c_i c_j mod 4;
    # the integer sum already contributes the odd-pair cross terms that
    # |d o y| produces, so the quadratic matrix takes m_ij verbatim.
    for i in range(k):
        for j in range(i + 1, k):
            t_pair = t_of(basis[i] ^ basis[j])
            diff = (t_pair - singles[i] - singles[j]) % 4
            if diff % 2:
                raise IsotropyError("phase function is not quadratic")
            if (diff // 2) % 2:
                quad_rows[pivots[i]] |= 1 << pivots[j]
    alpha = base_val / 2.0 ** ((n - k) / 2.0)
    state = StabilizerState(
        n,
        domain,
        BitVector(n, r_bits),
        BitMatrix(n, n, quad_rows),
        BitVector(n, s_bits),
        BitVector(n, d_bits),
        alpha,
    )
    pts = np.arange(size, dtype=np.uint64)
    if not np.allclose(state.evaluate(pts), values, atol=1e-6):
        raise IsotropyError("table is not a stabilizer state")
    return state


def neighbor(state: StabilizerState, v: PhasePoint, sigma: int) -> StabilizerState:
    """The neighboring state sqrt(2) * Pi_v^sigma phi for v outside L(phi).

    Raises:
        ParameterError: if sigma is not +-1 or v lies in L(phi) (where the
            projection is not norm-halving).
    """
    if sigma not in (1, -1):
        raise ParameterError("sigma must be +1 or -1")
    if v.n != state.n:
        raise DimensionMismatchError("dimension mismatch")
    if state.lagrangian().contains(v):
        raise ParameterError("v lies in L(phi); projection is degenerate")
    check_dense(state.n)
    pts = np.arange(1 << state.n, dtype=np.uint64)
    phi = state.evaluate(pts)
    phase = (-1j) ** kappa(v)
    wphi = phase * (1.0 - 2.0 * parity_u64(pts & np.uint64(v.b.bits)).astype(np.float64)) * phi[
        (pts ^ np.uint64(v.a.bits)).astype(np.intp)
    ]
    psi = (phi + sigma * wphi) / math.sqrt(2.0)
    norm = math.sqrt(float(np.mean(np.abs(psi) ** 2)))
    if abs(norm - 1.0) > 1e-9:
        raise ParameterError("projection did not halve the norm; v may be in L(phi)")
    return fit_stabilizer_dense(psi)
