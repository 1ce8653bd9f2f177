"""Adaptive Monte Carlo mean estimation.

All statistical estimates in the package go through :func:`mc_mean`.  The
estimator draws samples in growing chunks and stops early once an
empirical-Bernstein confidence radius drops below the requested accuracy;
the worst case is capped by the Hoeffding count for bounded variables.  This
keeps sparse/structured instances cheap without weakening the guarantee.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from .errors import InfeasibleParameterError, ParameterError

__all__ = ["mc_mean", "hoeffding_count"]

# Hard ceiling on samples per single estimate.  Exact parameter schedules
# that exceed it raise when strict=True (the formula-faithful preset) and are
# truncated otherwise.
MAX_SAMPLES_CAP = 1 << 24

_FIRST_CHUNK = 256


def hoeffding_count(accuracy: float, delta: float, bound: float = 1.0) -> int:
    """Samples sufficient for additive ``accuracy`` w.p. 1 - delta (Hoeffding)."""
    if accuracy <= 0 or not 0 < delta < 1:
        raise ParameterError("need accuracy > 0 and delta in (0,1)")
    return max(1, math.ceil((bound**2) * math.log(4.0 / delta) / (2.0 * accuracy**2)))


def mc_mean(
    sample_batch: Callable[[int], np.ndarray],
    accuracy: float,
    delta: float,
    *,
    bound: float = 1.0,
    strict: bool = False,
    max_samples: int | None = None,
    threshold: float | None = None,
    threshold_abs: float | None = None,
) -> complex:
    """Estimate E[Z] for |Z| <= bound to within ``accuracy`` w.p. >= 1 - delta.

    Args:
        sample_batch: callable returning ``k`` fresh i.i.d. samples as a
            (possibly complex) numpy array.
        accuracy: additive accuracy target.
        delta: failure probability.
        bound: almost-sure bound on |Z|.
        strict: if True, raise instead of truncating when the Hoeffding
            count exceeds the sample cap.
        max_samples: optional override of the per-estimate cap.
        threshold: when the caller only needs the comparison
            ``Re E[Z] >= threshold``, stop as soon as the confidence
            interval separates the running mean from the threshold (the
            comparison is then correct under the same confidence budget,
            even though the returned mean may be cruder than ``accuracy``).
        threshold_abs: same, for the comparison ``|E[Z]| >= threshold_abs``.

    Returns:
        The empirical mean (complex; take .real for real-valued Z).
    """
    cap = MAX_SAMPLES_CAP if max_samples is None else int(max_samples)
    target = hoeffding_count(accuracy, delta, bound)
    if target > cap:
        if strict:
            raise InfeasibleParameterError(
                f"estimate needs {target} samples (> cap {cap}); "
                "loosen the accuracy or use the practical preset"
            )
        target = cap
    # Empirical-Bernstein stopping: radius = sqrt(2 v log(6/d) / m) + 3 b log(6/d) / m.
    log_term = math.log(6.0 / delta)
    total = 0
    mean = 0.0 + 0.0j
    m2 = 0.0  # sum of squared deviations (Welford, on |z - mean|)
    chunk = _FIRST_CHUNK
    while total < target:
        k = min(chunk, target - total)
        z = np.asarray(sample_batch(k))
        # Batched Welford merge.
        bmean = complex(z.mean())
        bm2 = float(np.abs(z - bmean).__pow__(2).sum())
        new_total = total + k
        d = bmean - mean
        m2 = m2 + bm2 + (abs(d) ** 2) * total * k / new_total
        mean = mean + d * k / new_total
        total = new_total
        if total >= 64:
            var = m2 / total
            radius = math.sqrt(2.0 * var * log_term / total) + 3.0 * bound * log_term / total
            if radius <= accuracy:
                break
            if threshold is not None and abs(mean.real - threshold) > radius:
                break
            if threshold_abs is not None and abs(abs(mean) - threshold_abs) > radius:
                break
            # Jump close to the predicted stopping point instead of doubling:
            # solve radius(m) <= r_target for the loosest admissible target.
            r_target = accuracy
            if threshold is not None:
                r_target = max(r_target, 0.9 * abs(mean.real - threshold))
            if threshold_abs is not None:
                r_target = max(r_target, 0.9 * abs(abs(mean) - threshold_abs))
            needed = 2.0 * var * log_term / (r_target * r_target) + 6.0 * bound * log_term / r_target
            chunk = max(_FIRST_CHUNK, math.ceil(needed) - total)
        chunk = min(chunk, 1 << 20)
    return mean
