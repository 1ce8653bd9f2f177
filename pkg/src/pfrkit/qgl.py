"""Quadratic Goldreich-Levin and its applications.

Pipeline: list-decode stabilizer states near the local maximizers of
|<f, phi>|, drop the high-codimension ones, expand each survivor into
classical quadratic candidates, and pick the candidate with the largest
estimated correlation on a shared random sample.  On top of that sit the
polynomial-Gowers-inverse wrapper, Reed-Muller order-2 self-correction, and
a greedy quadratic decomposition of dense functions.
"""

from __future__ import annotations

import math

import numpy as np

from .config import PRACTICAL, Preset
from .errors import ParameterError
from .estimation import hoeffding_count, MAX_SAMPLES_CAP
from .funcspace import BoundedFunction, DenseFunction
from .lagsearch import list_decode_stabilizers
from .quadratic import QuadraticPolynomial, stabilizer_to_quadratics
from .rng import RngStream

__all__ = [
    "quadratic_goldreich_levin",
    "pgi",
    "rm_self_correct",
    "quadratic_decompose",
]

# Below this n the whole pipeline switches to exhaustive correlation
# estimates and a longer, cheaper repetition schedule: individual local
# maximizers of weakly correlated functions are only found with small
# per-repetition probability, but each repetition costs microseconds.
_SMALL_N = 6


def _poly_key(q: QuadraticPolynomial) -> tuple:
    return (tuple(q.quad.rows), q.linear.bits, q.constant)


def _estimate_correlations(
    f: BoundedFunction,
    candidates: list[QuadraticPolynomial],
    accuracy: float,
    delta: float,
    rng: RngStream,
) -> tuple[np.ndarray, int]:
    """|Est_q| for every candidate on one shared point sample.

    Returns the vector of complex estimates <f, (-1)^q> and the number of
    points used.  Small n is handled exhaustively.
    """
    n = f.n
    if n <= _SMALL_N:
        pts = np.arange(1 << n, dtype=np.uint64)
    else:
        m = hoeffding_count(accuracy, delta / max(1, len(candidates)))
        m = min(m, MAX_SAMPLES_CAP)
        pts = f.sample_points(rng, m)
    fv = f(pts)
    ests = np.empty(len(candidates), dtype=np.complex128)
    for i, q in enumerate(candidates):
        ests[i] = np.mean(fv * q.phase_values(pts))
    return ests, int(pts.size)


def quadratic_goldreich_levin(
    f: BoundedFunction,
    eps: float,
    delta: float,
    rng: RngStream,
    preset: Preset = PRACTICAL,
) -> tuple[QuadraticPolynomial, dict]:
    """Find a quadratic whose correlation with f is within eps of optimal.

    With probability >= 1 - delta the returned polynomial p satisfies
    |<f, (-1)^p>| >= max_q |<f, (-1)^q>| - eps.  If no stabilizer state
    survives the search, the zero polynomial is returned (its correlation
    E[f] is still entered into the argmax).

    Returns:
        (polynomial, report) with the candidate-list size, the estimated
        correlation of the winner, and the list-decoding summary.
    """
    if not 0 < eps < 1 or not 0 < delta < 1:
        raise ParameterError("need eps, delta in (0, 1)")
    n = f.n
    if n <= _SMALL_N and preset.name != "paper":
        # Long-haul schedule for exhaustive-scale instances (see _SMALL_N).
        preset = preset.with_overrides(
            success_floor=0.02, reps_cap=192, boost_cap=5, stale_window=None
        )
    tau = eps
    gamma = min(1.0, 0.5 + eps * eps)
    if gamma <= 0.5:
        gamma = 0.5 + 1e-9
    states, ld_report = list_decode_stabilizers(f, tau, gamma, delta, rng.child("ld"), preset)

    codim_cap = 2.0 * math.log2(1.0 / eps)
    kept = [s for s in states if (n - s.dim) <= codim_cap]
    candidates: list[QuadraticPolynomial] = [QuadraticPolynomial.zero(n)]
    seen = {_poly_key(candidates[0])}
    for state in kept:
        for q in stabilizer_to_quadratics(state):
            key = _poly_key(q)
            if key not in seen:
                seen.add(key)
                candidates.append(q)

    acc = max(eps / 4.0, preset.accuracy_floor)
    ests, m_est = _estimate_correlations(
        f, candidates, acc, delta, rng.child("est")
    )
    best = int(np.argmax(np.abs(ests)))  # ties: first in list order
    report = {
        "candidates": candidates,
        "candidate_ests": ests,
        "list_size": len(candidates),
        "states": len(states),
        "states_kept": len(kept),
        "est_correlation": float(abs(ests[best])),
        "est_points": m_est,
        "eps": eps,
        "tau": tau,
        "gamma": gamma,
        "list_decode": ld_report,
    }
    return candidates[best], report


def pgi(
    f: BoundedFunction,
    gamma: float,
    rng: RngStream,
    preset: Preset = PRACTICAL,
) -> tuple[QuadraticPolynomial, dict]:
    """Algorithmic inverse theorem for the U^3 norm.

    For f with ||f||_{U3} >= gamma (caller-asserted; not checkable cheaply),
    returns a quadratic p with |<f, (-1)^p>| >= (gamma/2)^{c+1} with
    probability >= 2/3, where c is the configured exponent.
    """
    if not 0 < gamma <= 1:
        raise ParameterError("gamma must lie in (0, 1]")
    c = preset.pgi_exponent
    eps = gamma**c / float(2 ** (c + 1))
    poly, report = quadratic_goldreich_levin(f, eps, 1.0 / 3.0, rng, preset)
    report = dict(report)
    report.update(
        {
            "gamma": gamma,
            "exponent": c,
            "exponent_note": "exponent c is a configured constant, not derived",
            "correlation_target": (gamma / 2.0) ** (c + 1),
        }
    )
    return poly, report


def rm_self_correct(
    f: BoundedFunction,
    eps: float,
    rng: RngStream,
    preset: Preset = PRACTICAL,
) -> tuple[QuadraticPolynomial, dict]:
    """Self-correct a boolean function to its nearest degree-2 polynomial.

    ``f`` must take values in {+1, -1} (the sign encoding (-1)^{f_bool}).
    With probability >= 2/3 the output p satisfies
    dist(f, p) < min_q dist(f, q) + eps, via corr = 1 - 2 dist.
    """
    if not 0 < eps < 1:
        raise ParameterError("eps must lie in (0, 1)")
    poly, report = quadratic_goldreich_levin(f, eps / 4.0, 1.0 / 6.0, rng.child("qgl"), preset)
    # The recovered correlation is only meaningful up to sign; flip to the
    # representative on the near side of f.
    if f.n <= _SMALL_N:
        pts = np.arange(1 << f.n, dtype=np.uint64)
    else:
        m = hoeffding_count(eps / 8.0, 0.05)
        pts = f.sample_points(rng.child("sign"), m)
    est = float(np.mean(f(pts).real * poly.phase_values(pts)))
    flipped = est < -eps / 8.0
    if flipped:
        poly = poly + 1
    report = dict(report)
    report.update({"sign_estimate": est, "flipped": flipped, "sign_points": int(pts.size)})
    return poly, report


_R_MAX = 64
_STOP_FACTOR = 0.5


def quadratic_decompose(
    f: DenseFunction,
    eps: float,
    rng: RngStream,
    preset: Preset = PRACTICAL,
    *,
    r_max: int = _R_MAX,
) -> dict:
    """Greedy decomposition f = sum_i c_i (-1)^{p_i} + g + h.

    Repeatedly recovers a quadratic correlating with the residual and
    subtracts its projection; the energy of the residual drops by |c_i|^2
    each round, which bounds the number of rounds.  The loop stops when the
    recovered correlation falls below eps/2; the remaining residual is split
    into a pointwise-small part g (intended U^3-small) and an L^1-small
    spike part h.  The reconstruction identity is exact by construction.

    Returns:
        dict with coeffs, polys, g, h (DenseFunction), rounds, converged.
    """
    if not 0 < eps < 1:
        raise ParameterError("eps must lie in (0, 1)")
    n = f.n
    residual = f.values.copy()
    coeffs: list[complex] = []
    polys: list[QuadraticPolynomial] = []
    threshold = eps * _STOP_FACTOR
    converged = False
    for i in range(r_max):
        sup = float(np.abs(residual).max()) if residual.size else 0.0
        if sup <= threshold:
            converged = True
            break
        scale = max(1.0, sup)
        bounded = DenseFunction(n, residual / scale).as_bounded(check=False)
        poly, _ = quadratic_goldreich_levin(
            bounded, threshold / (2.0 * scale), 1.0 / 6.0, rng.child("round", i), preset
        )
        c = complex(np.mean(residual * poly.phase_values(np.arange(1 << n, dtype=np.uint64))))
        if abs(c) < threshold:
            converged = True
            break
        coeffs.append(c)
        polys.append(poly)
        residual = residual - c * poly.phase_values(np.arange(1 << n, dtype=np.uint64))
    # Split the residual: h absorbs the largest spikes subject to
    # ||h||_1 <= eps (greedy by magnitude); the pointwise-tamer rest is g.
    mag = np.abs(residual)
    order = np.argsort(mag)[::-1]
    csum = np.cumsum(mag[order]) / mag.size
    k = int(np.searchsorted(csum, eps, side="right"))
    h_vals = np.zeros_like(residual)
    h_vals[order[:k]] = residual[order[:k]]
    g_vals = residual - h_vals
    return {
        "coeffs": coeffs,
        "polys": polys,
        "g": DenseFunction(n, g_vals),
        "h": DenseFunction(n, h_vals),
        "rounds": len(coeffs),
        "converged": converged,
        "g_sup": float(np.abs(g_vals).max()) if g_vals.size else 0.0,
        "h_l1": float(np.mean(np.abs(h_vals))),
    }
