"""1-bounded functions on F_2^n with counted query access.

Points of F_2^n are packed into uint64 (coordinate i = bit i), matching
:class:`~pfrkit.gf2.BitVector`.  A :class:`BoundedFunction` wraps a
vectorized evaluator together with a query counter; derived functions
(derivatives, Weyl images, projections) route their evaluations through the
base function so every logical base-query is tallied.

Inner products and norms use the expectation convention:
``<f, g> = E_x f(x) conj(g(x))`` and ``||f||_2^2 = E_x |f(x)|^2``.
"""

from __future__ import annotations

import csv
import math
from typing import Callable, Iterable

import numpy as np

from .config import check_dense
from .errors import (
    BoundednessError,
    DepthLimitError,
    DimensionMismatchError,
    ParameterError,
)
from .estimation import mc_mean
from .gf2 import BitVector, Subspace
from .rng import RngStream
from .symplectic import PhasePoint, kappa

__all__ = [
    "QueryCounter",
    "BoundedFunction",
    "DenseFunction",
    "fwht",
    "weyl_apply",
    "derivative",
    "project",
    "weyl_inner",
    "CharDistribution",
    "char_distribution_exact",
    "l2_norm_estimate",
    "spec_membership",
    "spectrum",
    "save_table",
    "load_table",
]

_BOUND_TOL = 1e-9
DEFAULT_MAX_DEPTH = 24


def parity_u64(x: np.ndarray) -> np.ndarray:
    """Parity of the popcount of each uint64 entry, as uint64 in {0, 1}."""
    return np.bitwise_count(x) & np.uint64(1)


def signs_u64(x: np.ndarray) -> np.ndarray:
    """(-1)^popcount(x) as float64."""
    return 1.0 - 2.0 * parity_u64(x).astype(np.float64)


class QueryCounter:
    """Tally of logical base-queries and cache hits."""

    __slots__ = ("base_queries", "cache_hits")

    def __init__(self):
        self.base_queries = 0
        self.cache_hits = 0

    def snapshot(self) -> dict:
        return {"base_queries": self.base_queries, "cache_hits": self.cache_hits}

    def __repr__(self) -> str:
        return f"QueryCounter(base={self.base_queries}, hits={self.cache_hits})"


def _as_points(n: int, x) -> tuple[np.ndarray, bool]:
    """Normalize a point or batch of points to a uint64 array."""
    if isinstance(x, BitVector):
        if x.n != n:
            raise DimensionMismatchError(f"point has length {x.n}, function has n={n}")
        return np.array([x.bits], dtype=np.uint64), True
    if isinstance(x, (int, np.integer)):
        return np.array([int(x)], dtype=np.uint64), True
    arr = np.asarray(x, dtype=np.uint64)
    return arr, False


class BoundedFunction:
    """Query access to f : F_2^n -> {z : |z| <= 1}.

    Args:
        n: dimension (n <= 64 for packed evaluation).
        eval_array: vectorized evaluator on uint64 point arrays.
        counter: shared query counter; derived functions reuse the base one.
        depth: projection depth (each projection layer doubles query cost).
        check: verify |f(x)| <= 1 on every batch.
    """

    __slots__ = ("n", "_eval_array", "counter", "depth", "max_depth", "_check")

    def __init__(
        self,
        n: int,
        eval_array: Callable[[np.ndarray], np.ndarray],
        *,
        counter: QueryCounter | None = None,
        depth: int = 0,
        max_depth: int = DEFAULT_MAX_DEPTH,
        check: bool = True,
    ):
        if n > 64:
            raise DimensionMismatchError("packed query access supports n <= 64")
        self.n = n
        self._eval_array = eval_array
        self.counter = counter if counter is not None else QueryCounter()
        self.depth = depth
        self.max_depth = max_depth
        self._check = check

    def __call__(self, x):
        pts, scalar = _as_points(self.n, x)
        vals = np.asarray(self._eval_array(pts), dtype=np.complex128)
        if self._check and vals.size and float(np.abs(vals).max()) > 1.0 + _BOUND_TOL:
            raise BoundednessError(
                f"|f(x)| = {float(np.abs(vals).max()):.6g} exceeds the 1-bounded contract"
            )
        return complex(vals[0]) if scalar else vals

    # -- constructors -------------------------------------------------------

    @classmethod
    def from_callable(
        cls,
        n: int,
        fn: Callable,
        *,
        vectorized: bool = True,
        cache_size: int = 0,
        counter: QueryCounter | None = None,
        check: bool = True,
    ) -> "BoundedFunction":
        """Wrap a user evaluator as a counted base function.

        Args:
            fn: maps a uint64 array to complex values if ``vectorized``,
                otherwise maps a single int point to a complex value.
            cache_size: LRU-ish memo capacity for base evaluations (0 = off).
        """
        ctr = counter if counter is not None else QueryCounter()
        if not vectorized:
            scalar_fn = fn

            def fn(pts: np.ndarray) -> np.ndarray:  # noqa: F811
                return np.array([scalar_fn(int(p)) for p in pts], dtype=np.complex128)

        if cache_size <= 0:

            def eval_array(pts: np.ndarray) -> np.ndarray:
                ctr.base_queries += int(pts.size)
                return fn(pts)

        else:
            cache: dict[int, complex] = {}

            def eval_array(pts: np.ndarray) -> np.ndarray:
                ctr.base_queries += int(pts.size)
                out = np.empty(pts.size, dtype=np.complex128)
                missing: list[int] = []
                keys = pts.tolist()
                for i, key in enumerate(keys):
                    got = cache.get(key)
                    if got is None:
                        missing.append(i)
                    else:
                        out[i] = got
                        ctr.cache_hits += 1
                if missing:
                    idx = np.array(missing, dtype=np.intp)
                    fresh = fn(pts[idx])
                    out[idx] = fresh
                    if len(cache) + len(missing) > cache_size:
                        # Drop the oldest half; dict preserves insertion order.
                        for k in list(cache.keys())[: cache_size // 2]:
                            del cache[k]
                    for i, v in zip(missing, fresh):
                        cache[keys[i]] = complex(v)
                return out

        return cls(n, eval_array, counter=ctr, check=check)

    # -- helpers ------------------------------------------------------------

    def sample_points(self, rng: RngStream, size: int) -> np.ndarray:
        return rng.uniform_points(self.n, size)

    def __repr__(self) -> str:
        return f"BoundedFunction(n={self.n}, depth={self.depth})"


class DenseFunction:
    """A full 2^n table of values (desk scale; capped by PFRKIT_DENSE_CAP)."""

    __slots__ = ("n", "values")

    def __init__(self, n: int, values: np.ndarray):
        check_dense(n)
        values = np.asarray(values, dtype=np.complex128)
        if values.shape != (1 << n,):
            raise DimensionMismatchError(f"expected {1 << n} values, got {values.shape}")
        self.n = n
        self.values = values

    @classmethod
    def from_bounded(cls, f: BoundedFunction) -> "DenseFunction":
        check_dense(f.n)
        pts = np.arange(1 << f.n, dtype=np.uint64)
        return cls(f.n, f(pts))

    def as_bounded(
        self, *, counter: QueryCounter | None = None, check: bool = True
    ) -> BoundedFunction:
        ctr = counter if counter is not None else QueryCounter()
        vals = self.values

        def eval_array(pts: np.ndarray) -> np.ndarray:
            ctr.base_queries += int(pts.size)
            return vals[pts.astype(np.intp)]

        return BoundedFunction(self.n, eval_array, counter=ctr, check=check)

    # -- norms and inner products (expectation convention) -------------------

    def l2_norm(self) -> float:
        return math.sqrt(float(np.mean(np.abs(self.values) ** 2)))

    def l1_norm(self) -> float:
        return float(np.mean(np.abs(self.values)))

    def sup_norm(self) -> float:
        return float(np.abs(self.values).max()) if self.values.size else 0.0

    def inner(self, other: "DenseFunction") -> complex:
        if other.n != self.n:
            raise DimensionMismatchError("dimension mismatch")
        return complex(np.mean(self.values * np.conj(other.values)))

    def __repr__(self) -> str:
        return f"DenseFunction(n={self.n})"


def fwht(values: np.ndarray) -> np.ndarray:
    """Unnormalized fast Walsh-Hadamard transform (out-of-place)."""
    a = np.array(values, dtype=np.complex128, copy=True)
    h = 1
    size = a.shape[0]
    while h < size:
        a = a.reshape(-1, 2, h)
        x = a[:, 0, :].copy()
        a[:, 0, :] = x + a[:, 1, :]
        a[:, 1, :] = x - a[:, 1, :]
        a = a.reshape(size)
        h *= 2
    return a


# -- derived functions -------------------------------------------------------

_MEMO_CAP_N = 16  # derived functions on at most 2^16 points keep a value table


def memoize_eval(
    n: int,
    eval_array: Callable[[np.ndarray], np.ndarray],
    counter: QueryCounter,
    cost: int,
) -> Callable[[np.ndarray], np.ndarray]:
    """Dense value cache for a derived evaluator, preserving query accounting.

    A cached point is charged ``cost`` base queries — exactly what the
    uncached recursion would have counted — so query totals are independent
    of caching; only wall time changes.  Above the size cap the evaluator is
    returned unchanged.
    """
    if n > _MEMO_CAP_N:
        return eval_array
    size = 1 << n
    values = np.empty(size, dtype=np.complex128)
    known = np.zeros(size, dtype=bool)

    def wrapped(pts: np.ndarray) -> np.ndarray:
        idx = pts.astype(np.intp)
        missing = np.unique(idx[~known[idx]])
        if missing.size:
            values[missing] = eval_array(missing.astype(np.uint64))
            known[missing] = True
        n_cached = int(pts.size) - int(missing.size)
        counter.base_queries += n_cached * cost
        counter.cache_hits += n_cached
        return values[idx]

    return wrapped


def weyl_apply(u: PhasePoint, f: BoundedFunction) -> BoundedFunction:
    """(W(a, b) f)(x) = (-i)^{|a o b|} (-1)^{b . x} f(x + a)."""
    if u.n != f.n:
        raise DimensionMismatchError("phase point and function dimension mismatch")
    phase = (-1j) ** kappa(u)
    a_bits = np.uint64(u.a.bits)
    b_bits = np.uint64(u.b.bits)

    def eval_array(pts: np.ndarray) -> np.ndarray:
        return phase * signs_u64(pts & b_bits) * f(pts ^ a_bits)

    return BoundedFunction(
        f.n, eval_array, counter=f.counter, depth=f.depth, max_depth=f.max_depth, check=False
    )


def derivative(f: BoundedFunction, a: BitVector) -> BoundedFunction:
    """Multiplicative derivative (Delta_a f)(x) = f(x + a) conj(f(x))."""
    if a.n != f.n:
        raise DimensionMismatchError("shift and function dimension mismatch")
    a_bits = np.uint64(a.bits)

    def eval_array(pts: np.ndarray) -> np.ndarray:
        return f(pts ^ a_bits) * np.conj(f(pts))

    if f.n <= 12:
        eval_array = memoize_eval(f.n, eval_array, f.counter, 2 << f.depth)
    return BoundedFunction(
        f.n, eval_array, counter=f.counter, depth=f.depth, max_depth=f.max_depth, check=False
    )


def phase_derivative(f: BoundedFunction, u: PhasePoint) -> BoundedFunction:
    """x |-> (Delta_a f)(x) (-1)^{b . x}, whose mean is i^{|a o b|} <f, W(u) f>."""
    g = derivative(f, u.a)
    b_bits = np.uint64(u.b.bits)

    def eval_array(pts: np.ndarray) -> np.ndarray:
        return g(pts) * signs_u64(pts & b_bits)

    return BoundedFunction(
        f.n, eval_array, counter=f.counter, depth=f.depth, max_depth=f.max_depth, check=False
    )


def project(f: BoundedFunction, u: PhasePoint, sigma: int) -> BoundedFunction:
    """Projection (f + sigma W(u) f) / 2 onto the sigma-eigenspace of W(u).

    Raises:
        DepthLimitError: if the projection stack would exceed the depth cap.
    """
    if sigma not in (1, -1):
        raise ParameterError("sigma must be +1 or -1")
    if f.depth + 1 > f.max_depth:
        raise DepthLimitError(f"projection depth {f.depth + 1} exceeds cap {f.max_depth}")
    wf = weyl_apply(u, f)

    def eval_array(pts: np.ndarray) -> np.ndarray:
        return 0.5 * (f(pts) + sigma * wf(pts))

    eval_array = memoize_eval(f.n, eval_array, f.counter, 2 << f.depth)
    return BoundedFunction(
        f.n, eval_array, counter=f.counter, depth=f.depth + 1, max_depth=f.max_depth, check=False
    )


def weyl_inner(f: DenseFunction, u: PhasePoint) -> complex:
    """<f, W(u) f> computed exactly from a dense table."""
    g = weyl_apply(u, f.as_bounded(check=False))
    pts = np.arange(1 << f.n, dtype=np.uint64)
    return complex(np.mean(f.values * np.conj(g(pts))))


# -- characteristic distribution ----------------------------------------------


class CharDistribution:
    """The (exact) characteristic distribution P_f on phase space.

    ``table[a, b] = |hat(Delta_a f)(b)|^2 / (2^n ||f||_2^4)``.
    """

    __slots__ = ("n", "table")

    def __init__(self, n: int, table: np.ndarray):
        self.n = n
        self.table = table

    def mass(self, u: PhasePoint) -> float:
        return float(self.table[u.a.bits, u.b.bits])

    def subspace_mass(self, sub: Subspace) -> float:
        if sub.ambient_dim != 2 * self.n:
            raise DimensionMismatchError("expected a phase-space subspace")
        total = 0.0
        for bits in sub.enumerate_bits():
            total += float(self.table[bits & ((1 << self.n) - 1), bits >> self.n])
        return total

    def flat(self) -> np.ndarray:
        """Flatten with phase-point index u = a | (b << n)."""
        return self.table.flatten(order="F")

    def convolve(self) -> "CharDistribution":
        """The convoluted distribution Q = P * P on F_2^{2n}."""
        flat = self.flat()
        conv = fwht(fwht(flat) ** 2) / flat.size
        return CharDistribution(self.n, conv.real.reshape(self.table.shape, order="F"))


def char_distribution_exact(f: DenseFunction) -> CharDistribution:
    """Exact characteristic distribution of a dense function."""
    size = 1 << f.n
    check_dense(2 * f.n)  # the table has 4^n entries
    vals = f.values
    l2sq = float(np.mean(np.abs(vals) ** 2))
    if l2sq <= 0:
        raise ParameterError("characteristic distribution undefined for f = 0")
    table = np.empty((size, size), dtype=np.float64)
    idx = np.arange(size, dtype=np.uint64)
    for a in range(size):
        deriv = vals[(idx ^ np.uint64(a)).astype(np.intp)] * np.conj(vals)
        coeffs = fwht(deriv) / size  # hat(Delta_a f)(b) = E_x ...
        table[a] = np.abs(coeffs) ** 2
    table /= size * l2sq**2
    return CharDistribution(f.n, table)


def spectrum(f: DenseFunction, threshold: float = 0.7) -> list[PhasePoint]:
    """Spec(f): phase points with |hat(Delta_a f)(b)|^2 >= threshold ||f||_2^4."""
    dist = char_distribution_exact(f)
    size = 1 << f.n
    cutoff = threshold / size  # table is normalized by 2^n ||f||_2^4
    out = []
    for a, b in zip(*np.nonzero(dist.table >= cutoff - 1e-12)):
        out.append(PhasePoint(BitVector(f.n, int(a)), BitVector(f.n, int(b))))
    return out


# -- statistical estimates -----------------------------------------------------

_EXACT_MEAN_CAP_N = 6  # below this, enumerate the domain instead of sampling


def l2_norm_estimate(
    f: BoundedFunction,
    accuracy: float,
    delta: float,
    rng: RngStream,
    *,
    strict: bool = False,
) -> float:
    """Estimate ||f||_2^2 = E|f(x)|^2 to additive ``accuracy`` w.p. 1 - delta."""
    if f.n <= _EXACT_MEAN_CAP_N:
        pts = np.arange(1 << f.n, dtype=np.uint64)
        return float(np.mean(np.abs(f(pts)) ** 2))

    def batch(k: int) -> np.ndarray:
        pts = f.sample_points(rng, k)
        return np.abs(f(pts)) ** 2

    return float(mc_mean(batch, accuracy, delta, strict=strict).real)


def spec_membership(
    f: BoundedFunction,
    u: PhasePoint,
    r: float,
    accuracy: float,
    delta: float,
    rng: RngStream,
    *,
    cutoff: float = 0.6,
    strict: bool = False,
) -> bool:
    """Test |hat(Delta_a f)(b)|^2 >= cutoff * r^2 by sampling.

    ``r`` should be an estimate of ||f||_2^2; the 0.6 cutoff sits strictly
    below the 0.7 spectrum threshold to absorb estimation error on both
    sides.
    """
    g = phase_derivative(f, u)
    if f.n <= _EXACT_MEAN_CAP_N:
        pts = np.arange(1 << f.n, dtype=np.uint64)
        est = complex(np.mean(g(pts)))
        return abs(est) ** 2 >= cutoff * r * r

    def batch(k: int) -> np.ndarray:
        return g(f.sample_points(rng, k))

    est = mc_mean(batch, accuracy, delta, strict=strict, threshold_abs=math.sqrt(cutoff) * r)
    return abs(est) ** 2 >= cutoff * r * r


# -- table I/O -----------------------------------------------------------------


def save_table(f: DenseFunction, path) -> None:
    """Write a dense table as CSV rows ``bitstring,re,im``."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        for x in range(1 << f.n):
            v = f.values[x]
            writer.writerow([BitVector(f.n, x).to_string(), repr(float(v.real)), repr(float(v.imag))])


def load_table(path) -> DenseFunction:
    """Read a dense table written by :func:`save_table`."""
    rows: dict[int, complex] = {}
    n = None
    with open(path, newline="") as fh:
        for rec in csv.reader(fh):
            if not rec or rec[0].lstrip().startswith("#"):
                continue
            bits, re_s, im_s = rec
            v = BitVector.from_string(bits)
            if n is None:
                n = v.n
            elif v.n != n:
                raise DimensionMismatchError("inconsistent bitstring lengths in table")
            rows[v.bits] = complex(float(re_s), float(im_s))
    if n is None:
        raise ParameterError("empty table file")
    if len(rows) != 1 << n:
        raise ParameterError(f"table has {len(rows)} rows, expected {1 << n}")
    values = np.array([rows[x] for x in range(1 << n)], dtype=np.complex128)
    return DenseFunction(n, values)
