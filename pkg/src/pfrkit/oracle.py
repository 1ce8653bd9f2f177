"""Exhaustive reference computations for small n.

Everything here is brute force by design: these routines are the ground
truth the randomized pipelines are tested against, and they deliberately
avoid sharing code paths with the estimators they validate.
"""

from __future__ import annotations

import itertools
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionMismatchError, ParameterError
from .funcspace import DenseFunction, fwht, weyl_inner
from .gf2 import AffineMap, BitMatrix, BitVector, Subspace
from .quadratic import QuadraticPolynomial, StabilizerState
from .symplectic import Lagrangian, PhasePoint

__all__ = [
    "u3_norm_exact",
    "max_quadratic_correlation",
    "sumset_stats",
    "enumerate_subspaces",
    "enumerate_lagrangians",
    "stabilizer_basis",
    "verify_cover",
    "freiman_iso_check",
]


def u3_norm_exact(f: DenseFunction, method: str = "fourier") -> float:
    """The U^3 norm of a dense function, by one of three equivalent routes.

    * ``fourier``:  ||f||_{U3}^8 = E_a sum_b |hat(Delta_a f)(b)|^4
    * ``definition``:  E_{a,b} |E_x Delta_a Delta_b f(x)|^2  (slow; n <= 8)
    * ``weyl``:  2^{-n} sum_u |<f, W(u) f>|^4
    """
    n = f.n
    size = 1 << n
    vals = f.values
    idx = np.arange(size, dtype=np.uint64)
    if method == "fourier":
        total = 0.0
        for a in range(size):
            deriv = vals[(idx ^ np.uint64(a)).astype(np.intp)] * np.conj(vals)
            coeffs = fwht(deriv) / size
            total += float(np.sum(np.abs(coeffs) ** 4))
        return (total / size) ** 0.125
    if method == "definition":
        if n > 8:
            raise ParameterError("definition route is O(4^n 2^n); use n <= 8")
        total = 0.0
        for a in range(size):
            fa = vals[(idx ^ np.uint64(a)).astype(np.intp)] * np.conj(vals)
            for b in range(size):
                g = fa[(idx ^ np.uint64(b)).astype(np.intp)] * np.conj(fa)
                total += abs(np.mean(g)) ** 2
        return (total / size**2) ** 0.125
    if method == "weyl":
        total = 0.0
        for a in range(size):
            for b in range(size):
                u = PhasePoint(BitVector(n, a), BitVector(n, b))
                total += abs(weyl_inner(f, u)) ** 4
        return (total / size) ** 0.125
    raise ParameterError(f"unknown method {method!r}")


def max_quadratic_correlation(f: DenseFunction) -> tuple[float, QuadraticPolynomial]:
    """argmax over all quadratics of |<f, (-1)^q>|, by exhaustion (n <= 6)."""
    n = f.n
    if n > 6:
        raise ParameterError("exhaustive quadratic search supports n <= 6")
    size = 1 << n
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    idx = np.arange(size, dtype=np.uint64)
    best = -1.0
    best_q = None
    for mask in range(1 << len(pairs)):
        acc = np.zeros(size, dtype=np.uint64)
        rows = [0] * n
        m = mask
        while m:
            t = (m & -m).bit_length() - 1
            i, j = pairs[t]
            rows[i] |= 1 << j
            acc ^= (idx >> np.uint64(i)) & (idx >> np.uint64(j)) & np.uint64(1)
            m &= m - 1
        phase = (1.0 - 2.0 * acc.astype(np.float64)) * f.values
        coeffs = np.abs(fwht(phase)) / size  # |<f, (-1)^{x^TQx + l.x}>| for all l
        arg = int(np.argmax(coeffs))
        if coeffs[arg] > best:
            best = float(coeffs[arg])
            best_q = QuadraticPolynomial(n, BitMatrix(n, n, rows), BitVector(n, arg))
    return best, best_q


def sumset_stats(points: Iterable[int], n: int) -> dict:
    """Doubling and span statistics of a finite A <= F_2^n."""
    a = sorted(set(int(p) for p in points))
    if not a:
        raise ParameterError("empty set")
    a_arr = np.array(a, dtype=np.uint64)
    # Over F_2, A + A (sumset) coincides with the difference set A - A.
    aa_arr = np.unique((a_arr[:, None] ^ a_arr[None, :]).ravel())
    sums2 = set(int(v) for v in aa_arr)
    span = Subspace(n, list(a))
    four_arr = np.unique((aa_arr[:, None] ^ aa_arr[None, :]).ravel())
    four = set(int(v) for v in four_arr)
    return {
        "size": len(a),
        "doubling_size": len(sums2),
        "doubling_constant": len(sums2) / len(a),
        "fourfold_size": len(four),
        "span_dim": span.dim,
        "span_size": 1 << span.dim,
    }


def enumerate_subspaces(ambient: int, dim: int) -> Iterable[Subspace]:
    """All dim-dimensional subspaces of F_2^ambient via RREF enumeration."""
    for pivots in itertools.combinations(range(ambient), dim):
        free_positions = []
        for i, p in enumerate(pivots):
            cols = [j for j in range(p + 1, ambient) if j not in pivots]
            free_positions.append(cols)
        slots = [(i, j) for i, cols in enumerate(free_positions) for j in cols]
        for mask in range(1 << len(slots)):
            rows = [1 << p for p in pivots]
            for t, (i, j) in enumerate(slots):
                if (mask >> t) & 1:
                    rows[i] |= 1 << j
            yield Subspace(ambient, rows)


def enumerate_lagrangians(n: int) -> list[Lagrangian]:
    """All Lagrangians of F_2^{2n} (exhaustive; n <= 3)."""
    if n > 3:
        raise ParameterError("exhaustive Lagrangian enumeration supports n <= 3")
    out = []
    for sub in enumerate_subspaces(2 * n, n):
        pts = [PhasePoint.from_bits(n, r) for r in sub.basis_rows]
        ok = True
        for i in range(len(pts)):
            for j in range(i + 1, len(pts)):
                if pts[i].a.dot(pts[j].b) ^ pts[i].b.dot(pts[j].a):
                    ok = False
                    break
            if not ok:
                break
        if ok:
            out.append(Lagrangian(sub))
    return out


def stabilizer_basis(lag: Lagrangian) -> list[StabilizerState]:
    """The 2^n orthonormal stabilizer states sharing the given Lagrangian."""
    n = lag.n
    v = lag.graph_domain
    m = lag.graph_matrix
    quad = m.strict_upper()
    d = BitVector(n, m.diagonal().bits)
    coset_reps = list(v.complement_in(Subspace.full(n)).enumerate_bits())
    dual_reps = list(v.orthogonal_complement().complement_in(Subspace.full(n)).enumerate_bits())
    out = []
    for w in coset_reps:
        for s in dual_reps:
            out.append(
                StabilizerState.from_global(n, v, BitVector(n, w), quad, BitVector(n, s), d)
            )
    return out


def verify_cover(
    points: Iterable[int], n: int, subspace: Subspace, translates: Sequence[int]
) -> dict:
    """Check that A is covered by the given translates of the subspace."""
    if subspace.ambient_dim != n:
        raise DimensionMismatchError("subspace ambient mismatch")
    reps = set(subspace.reduce_bits(int(t)) for t in translates)
    missed = [x for x in points if subspace.reduce_bits(int(x)) not in reps]
    return {
        "covered": not missed,
        "missed": len(missed),
        "translate_count": len(reps),
        "subspace_dim": subspace.dim,
    }


def freiman_iso_check(pi: AffineMap, points: Iterable[int]) -> bool:
    """True iff the linear map pi is a Freiman 2-isomorphism on A.

    Equivalent to pi(x) != 0 for every nonzero x in A + A + A + A.
    """
    if not pi.is_linear():
        raise ParameterError("freiman_iso_check expects a linear map")
    a = sorted(set(int(p) for p in points))
    a_arr = np.array(a, dtype=np.uint64)
    aa = np.unique((a_arr[:, None] ^ a_arr[None, :]).ravel())
    four = np.unique((aa[:, None] ^ aa[None, :]).ravel())
    ker = pi.kernel()
    for x in four:
        if x and ker.contains(BitVector(pi.domain_dim, int(x))):
            return False
    return True
