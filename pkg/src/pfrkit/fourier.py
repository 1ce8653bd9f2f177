"""Linear Fourier analysis: coefficient estimation and Goldreich-Levin.

Fourier coefficients use the expectation convention
``hat f(b) = E_x f(x) (-1)^{b . x}``, so Parseval reads
``sum_b |hat f(b)|^2 = ||f||_2^2 = E|f|^2``.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import ParameterError
from .estimation import mc_mean
from .funcspace import BoundedFunction, DenseFunction, fwht, signs_u64
from .gf2 import BitVector
from .rng import RngStream

__all__ = ["wht_exact", "four_est", "goldreich_levin"]


def wht_exact(f: DenseFunction) -> np.ndarray:
    """All 2^n Fourier coefficients of a dense function."""
    return fwht(f.values) / f.values.size


_EXACT_CAP_N = 6  # below this, enumerate the domain instead of sampling


def four_est(
    f: BoundedFunction,
    b: BitVector,
    accuracy: float,
    delta: float,
    rng: RngStream,
    *,
    strict: bool = False,
    threshold_abs: float | None = None,
) -> complex:
    """Estimate hat f(b) to additive ``accuracy`` w.p. >= 1 - delta.

    ``threshold_abs`` enables early stopping when the caller only needs the
    comparison |hat f(b)| >= threshold_abs.
    """
    if accuracy <= 0 or not 0 < delta < 1:
        raise ParameterError("need accuracy > 0 and delta in (0,1)")
    b_bits = np.uint64(b.bits)
    if f.n <= _EXACT_CAP_N:
        pts = np.arange(1 << f.n, dtype=np.uint64)
        return complex(np.mean(f(pts) * signs_u64(pts & b_bits)))

    def batch(k: int) -> np.ndarray:
        pts = f.sample_points(rng, k)
        return f(pts) * signs_u64(pts & b_bits)

    return mc_mean(batch, accuracy, delta, strict=strict, threshold_abs=threshold_abs)


def _bucket_weight(
    f: BoundedFunction,
    k: int,
    prefix: int,
    accuracy: float,
    delta: float,
    rng: RngStream,
    strict: bool,
    threshold: float | None = None,
) -> float:
    """Estimate sum of |hat f(b)|^2 over b with low-k bits equal to prefix.

    Uses the pair identity: with x = (x1, z), y = (y1, z) sharing the suffix,
    E[f(x) conj(f(y)) (-1)^{prefix . (x1 + y1)}] equals the bucket weight.
    """
    n = f.n
    gen = rng.generator
    p_bits = np.uint64(prefix)
    k_u = np.uint64(k)
    low_mask = np.uint64((1 << k) - 1)

    def batch(m: int) -> np.ndarray:
        if k < n:
            z = gen.integers(0, 1 << (n - k), size=m, dtype=np.uint64) << k_u
        else:
            z = np.zeros(m, dtype=np.uint64)
        if k > 0:
            x1 = gen.integers(0, 1 << k, size=m, dtype=np.uint64)
            y1 = gen.integers(0, 1 << k, size=m, dtype=np.uint64)
        else:
            x1 = y1 = np.zeros(m, dtype=np.uint64)
        chi = signs_u64((x1 ^ y1) & p_bits & low_mask)
        return f(x1 | z) * np.conj(f(y1 | z)) * chi

    return float(mc_mean(batch, accuracy, delta, strict=strict, threshold=threshold).real)


def goldreich_levin(
    f: BoundedFunction,
    tau: float,
    delta: float,
    rng: RngStream,
    *,
    strict: bool = False,
) -> list[tuple[BitVector, complex]]:
    """List all large Fourier coefficients of a 1-bounded function.

    With probability >= 1 - delta the returned list contains every b with
    |hat f(b)| >= tau, and every listed b satisfies |hat f(b)| >= tau / 2.

    Returns:
        Pairs (b, estimate of hat f(b)), sorted by decreasing |estimate|.
    """
    if not 0 < tau <= 1:
        raise ParameterError("tau must lie in (0, 1]")
    if not 0 < delta < 1:
        raise ParameterError("delta must lie in (0, 1)")
    n = f.n
    if n <= _EXACT_CAP_N:
        # Desk scale: read off the coefficients exactly.
        pts = np.arange(1 << n, dtype=np.uint64)
        coeffs = fwht(f(pts)) / (1 << n)
        out = [
            (BitVector(n, b), complex(c))
            for b, c in enumerate(coeffs)
            if abs(c) >= 5.0 * tau / 8.0
        ]
        out.sort(key=lambda t: -abs(t[1]))
        return out
    theta = tau * tau / 4.0  # bucket-weight accuracy
    keep = 3.0 * tau * tau / 4.0  # survive iff estimated weight >= keep
    max_live = max(4, math.ceil(4.0 / (tau * tau)))
    node_budget = 2 * (n + 1) * max_live + 2
    delta_node = delta / (2 * node_budget)

    live: list[tuple[int, float]] = [(0, 1.0)]  # (prefix, estimated weight)
    node_id = 0
    for k in range(n):
        nxt: list[tuple[int, float]] = []
        for prefix, _ in live:
            for child in (prefix, prefix | (1 << k)):
                node_id += 1
                w = _bucket_weight(
                    f,
                    k + 1,
                    child,
                    theta,
                    delta_node,
                    rng.child("gl", node_id),
                    strict,
                    threshold=keep,
                )
                if w >= keep:
                    nxt.append((child, w))
        nxt.sort(key=lambda t: -t[1])
        live = nxt[:max_live]
        if not live:
            return []

    out: list[tuple[BitVector, complex]] = []
    for prefix, _ in live:
        node_id += 1
        b = BitVector(n, prefix)
        est = four_est(
            f,
            b,
            tau / 8.0,
            delta_node,
            rng.child("gl-filter", node_id),
            strict=strict,
            threshold_abs=5.0 * tau / 8.0,
        )
        if abs(est) >= 5.0 * tau / 8.0:
            out.append((b, est))
    out.sort(key=lambda t: -abs(t[1]))
    return out
