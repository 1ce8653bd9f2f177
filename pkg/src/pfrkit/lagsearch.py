"""Lagrangian search: convoluted sampling, boosting, and list decoding.

The pipeline locates the Lagrangians of approximate local maximizers of the
correlation |<f, phi>| over stabilizer states:

1. :class:`ConvolutedSampler` draws phase points approximately from the
   convoluted characteristic distribution mu_f ~ ||f||_2^8 Q_f (plus a
   deliberate padding component for soundness).
2. :func:`robust_generate` filters samples through a spectral membership
   test and spans the survivors.
3. :func:`lagrangian_sampling` interleaves random energy-increment
   projections (boosting) with robust generation.
4. :func:`stabilizer_sampling` turns a candidate Lagrangian into an explicit
   stabilizer state by Goldreich-Levin on a coset-restricted twist of f.
5. :func:`list_decode_stabilizers` repeats the above and deduplicates.
"""

from __future__ import annotations

import math

import numpy as np

from .config import LocalMaximizerParams, Preset, PRACTICAL
from .errors import IsotropyError, ParameterError
from .estimation import mc_mean
from .fourier import goldreich_levin
from .funcspace import (
    BoundedFunction,
    DenseFunction,
    derivative,
    fwht,
    l2_norm_estimate,
    memoize_eval,
    phase_derivative,
    project,
    spec_membership,
)
from .gf2 import BitVector, Subspace, nullspace_rows, rref_rows
from .quadratic import StabilizerState
from .rng import RngStream
from .symplectic import Lagrangian, PhasePoint, extend_to_lagrangian, is_isotropic, kappa

__all__ = [
    "ConvolutedSampler",
    "robust_generate",
    "lagrangian_sampling",
    "stabilizer_sampling",
    "list_decode_stabilizers",
]

_MAX_COSET_GUESSES = 16

# Descending retry factors applied to a floored Goldreich-Levin threshold
# when the first pass lists nothing (see ConvolutedSampler._heavy_coefficients).
_TAU_LADDER = (1.0, 0.7, 0.5)


class ConvolutedSampler:
    """Sampler for the convoluted characteristic distribution of f.

    A sample is the sum of two independent draws from a distribution nu on
    phase space built lazily per first coordinate ``a``: the heavy Fourier
    coefficients of Delta_a f are listed (by Goldreich-Levin, or exactly at
    desk scale with ``exact=True``), their squared magnitudes become point
    masses, and the leftover probability is spread over a small random
    padding set.

    Two ``a``-marginals are available.  In ``faithful`` mode ``a`` is drawn
    uniformly, so the captured part of one draw approximates
    ||f||_2^4 P_f and a sample approximates ||f||_2^8 Q_f plus padding.  In
    ``importance`` mode ``a`` is drawn proportionally to ||Delta_a f||_2^2
    by rejection (a = x + x' with x, x' drawn from |f|^2), which
    concentrates the samples on the informative part of phase space when
    ||f||_2 is small; the search pipeline uses this mode.
    """

    def __init__(
        self,
        f: BoundedFunction,
        xi: float,
        rng: RngStream,
        preset: Preset = PRACTICAL,
        *,
        mode: str = "faithful",
        exact: bool | None = None,
    ):
        if not 0 < xi <= 1:
            raise ParameterError("xi must lie in (0, 1]")
        if mode not in ("faithful", "importance"):
            raise ParameterError(f"unknown sampler mode {mode!r}")
        if 2 * f.n > 64:
            raise ParameterError("packed phase-space sampling supports n <= 32")
        if exact is None:
            exact = f.n <= preset.exact_sampler_max_n
        self.f = f
        self.xi = xi
        self.mode = mode
        self.exact = exact
        self.preset = preset
        self.rng = rng
        self.eta = xi / 16.0  # per-build failure budget
        self._cache: dict[int, tuple[np.ndarray, np.ndarray]] = {}
        self._builds = 0
        self._dense: np.ndarray | None = None
        if exact:
            self._dense = DenseFunction.from_bounded(f).values
        if mode == "importance":
            acc = max(0.02, preset.accuracy_floor)
            self._l2sq = max(
                l2_norm_estimate(f, acc, 0.05, rng.child("l2"), strict=preset.strict), acc
            )
        else:
            self._l2sq = None

    # -- nu construction ----------------------------------------------------

    def _gl_tau(self) -> float:
        base = self.xi / 4.0
        floor = self.preset.gl_tau_floor
        if floor > 0:
            # Scale the floor with the function's l2 mass so sparse functions
            # keep their (smaller) coefficients listable.
            scale = math.sqrt(self._l2sq) if self._l2sq is not None else 1.0
            return min(1.0, max(base, floor * scale))
        return min(1.0, base)

    def _heavy_coefficients(self, a_bits: int) -> tuple[np.ndarray, np.ndarray]:
        """Support and squared magnitudes of the large coefficients of Delta_a f."""
        if self._dense is not None:
            idx = np.arange(self._dense.size, dtype=np.uint64)
            table = self._dense[(idx ^ np.uint64(a_bits)).astype(np.intp)] * np.conj(self._dense)
            coeffs = fwht(table) / table.size
            keep = np.abs(coeffs) >= self.xi / 4.0
            return idx[keep], np.abs(coeffs[keep]) ** 2
        dfa = derivative(self.f, BitVector(self.f.n, a_bits))
        tau = self._gl_tau()
        # The floored threshold can sit above a split coefficient spectrum
        # (several medium coefficients instead of one large one); descend
        # toward the formula value until something lists.
        listed = []
        for k, factor in enumerate(_TAU_LADDER):
            t = factor * tau
            if k > 0 and t < self.xi / 4.0:
                break
            listed = goldreich_levin(
                dfa, t, self.eta, self.rng.child("nu", a_bits, self._builds, k),
                strict=self.preset.strict,
            )
            if listed or self.preset.gl_tau_floor <= 0:
                break
        support = np.array([b.bits for b, _ in listed], dtype=np.uint64)
        lam = np.array([min(1.0, abs(est) ** 2) for _, est in listed], dtype=np.float64)
        return support, lam

    def _nu(self, a_bits: int) -> tuple[np.ndarray, np.ndarray]:
        cached = self._cache.get(a_bits)
        if cached is not None:
            return cached
        self._builds += 1
        n = self.f.n
        xi = self.xi
        support, lam = self._heavy_coefficients(a_bits)
        total = float(lam.sum())
        if total > 1.0 + xi * xi:
            # Estimation noise produced an impossible mass; discard it all
            # (the draw degenerates to pure padding).
            lam = np.zeros_like(lam)
            total = 0.0
        captured_probs = lam / (1.0 + xi * xi)
        captured = total / (1.0 + xi * xi)
        pad_mass = 1.0 - captured
        if self.mode == "importance" and captured > 0:
            # Keep only a xi-sized relative padding component: the captured
            # mass is renormalized toward 1 (soundness is restored by the
            # spectral membership filter downstream).
            pad_mass = (1.0 - captured) * min(1.0, xi)
            denom = captured + pad_mass
            captured_probs = captured_probs / denom
            pad_mass = pad_mass / denom
        n_pad = math.ceil(4.0 / xi)
        if n <= 30 and n_pad >= (1 << n):
            # The padding set would exhaust the space; pad uniformly over all
            # of F_2^n instead.  (Fewer, heavier pad points would concentrate
            # self-collision mass of nu * nu at the zero phase point.)
            dense_probs = np.full(1 << n, pad_mass / (1 << n))
            np.add.at(dense_probs, support.astype(np.intp), captured_probs)
            dense_probs /= dense_probs.sum()
            out = (np.arange(1 << n, dtype=np.uint64), dense_probs)
            self._cache[a_bits] = out
            return out
        pad_points: list[int] = []
        if pad_mass > 1e-15 and n_pad > 0:
            pad_rng = self.rng.child("pad", a_bits, self._builds)
            seen = set(int(b) for b in support)
            guard = 0
            while len(pad_points) < n_pad and guard < 50 * n_pad:
                guard += 1
                cand = pad_rng.uniform_int(n)
                if cand not in seen:
                    seen.add(cand)
                    pad_points.append(cand)
        if pad_points:
            support = np.concatenate([support, np.array(pad_points, dtype=np.uint64)])
            probs = np.concatenate(
                [captured_probs, np.full(len(pad_points), pad_mass / len(pad_points))]
            )
        else:
            probs = captured_probs
        total_p = float(probs.sum())
        if total_p <= 0:
            support = np.array([0], dtype=np.uint64)
            probs = np.array([1.0])
        else:
            probs = probs / total_p
        out = (support, probs)
        self._cache[a_bits] = out
        return out

    # -- draws ---------------------------------------------------------------

    def _draw_as(self, count: int, rng: RngStream) -> np.ndarray:
        n = self.f.n
        if self.mode == "faithful":
            return rng.uniform_points(n, count)
        # Importance mode: a = x + x' with x, x' drawn by rejection from
        # |f|^2, giving P(a) proportional to ||Delta_a f||_2^2.
        gen = rng.generator
        need = 2 * count
        pts: list[np.ndarray] = []
        have = 0
        batch = max(64, int(need / max(self._l2sq, 0.01)))
        guard = 0
        while have < need and guard < 60:
            guard += 1
            cand = self.f.sample_points(rng, batch)
            accept = gen.random(batch) < np.abs(self.f(cand)) ** 2
            got = cand[accept]
            pts.append(got)
            have += got.size
        flat = np.concatenate(pts) if pts else np.zeros(need, dtype=np.uint64)
        if flat.size < need:  # degenerate f; fall back to uniform points
            flat = np.concatenate([flat, rng.uniform_points(n, need - flat.size)])
        return flat[:count] ^ flat[count : 2 * count]

    def _draw_bs(self, a_vals: np.ndarray, rng: RngStream) -> np.ndarray:
        gen = rng.generator
        out = np.zeros(a_vals.size, dtype=np.uint64)
        uniq, inverse = np.unique(a_vals, return_inverse=True)
        for i, a_bits in enumerate(uniq):
            support, probs = self._nu(int(a_bits))
            where = np.nonzero(inverse == i)[0]
            picks = gen.choice(support.size, size=where.size, p=probs)
            out[where] = support[picks]
        return out

    def sample_bits(self, count: int, rng: RngStream) -> np.ndarray:
        """Draw ``count`` samples of mu_f = nu * nu, packed as a | (b << n)."""
        n = np.uint64(self.f.n)
        a1 = self._draw_as(count, rng.child("a1"))
        b1 = self._draw_bs(a1, rng.child("b1"))
        a2 = self._draw_as(count, rng.child("a2"))
        b2 = self._draw_bs(a2, rng.child("b2"))
        return (a1 ^ a2) | ((b1 ^ b2) << n)

    def sample_half_bits(self, count: int, rng: RngStream) -> np.ndarray:
        """Draw from nu itself (one heavy spectral point, not a convolution)."""
        n = np.uint64(self.f.n)
        a = self._draw_as(count, rng.child("a"))
        b = self._draw_bs(a, rng.child("b"))
        return a | (b << n)

    def sample_one(self, rng: RngStream) -> PhasePoint:
        return PhasePoint.from_bits(self.f.n, int(self.sample_bits(1, rng)[0]))

    def sample_one_half(self, rng: RngStream) -> PhasePoint:
        return PhasePoint.from_bits(self.f.n, int(self.sample_half_bits(1, rng)[0]))

    def sample(self, count: int, rng: RngStream) -> list[PhasePoint]:
        bits = self.sample_bits(count, rng)
        return [PhasePoint.from_bits(self.f.n, int(x)) for x in bits]

    @property
    def cache_size(self) -> int:
        return len(self._cache)


def robust_generate(
    f: BoundedFunction,
    sampler: ConvolutedSampler,
    eps: float,
    tau: float,
    delta: float,
    rng: RngStream,
    preset: Preset = PRACTICAL,
) -> tuple[Subspace, dict]:
    """Span the sampled phase points that pass the spectral membership test."""
    n = f.n
    eps_eff = max(eps, preset.eps_floor)
    m = math.ceil(preset.robust_sample_const * n / eps_eff)
    if preset.robust_samples_cap is not None:
        m = min(m, max(preset.robust_samples_cap, 2 * n + 16))
    acc_l2 = max(tau**4 / 100.0, preset.accuracy_floor)
    r = max(l2_norm_estimate(f, acc_l2, delta / 4.0, rng.child("l2"), strict=preset.strict), 0.0)
    if preset.name != "paper" and r < 0.03:
        # A boosted function that lost essentially all its mass cannot pass
        # the membership filter; skip the sampling work.
        return Subspace(2 * n, []), {"samples": 0, "survivors": 0, "l2sq_estimate": r, "dim": 0}
    acc_spec = max(tau**4 / 100.0, preset.accuracy_floor * max(r, 0.05))
    survivors: list[int] = []
    if preset.name != "paper":
        # Single nu draws are heavy spectral points directly; the
        # convolution halves the capture rate twice over (see the boost
        # draw in lagrangian_sampling) without adding directions, because
        # the good points are closed under addition.
        bits = sampler.sample_half_bits(m, rng.child("draw"))
        samples = [PhasePoint.from_bits(n, int(x)) for x in bits]
    else:
        samples = sampler.sample(m, rng.child("draw"))
    for i, u in enumerate(samples):
        if u.is_zero():
            continue
        if spec_membership(
            f, u, r, acc_spec, delta / (4.0 * m), rng.child("memb", i), strict=preset.strict
        ):
            survivors.append(u.to_bits())
    sub = Subspace(2 * n, survivors)
    return sub, {"samples": m, "survivors": len(survivors), "l2sq_estimate": r, "dim": sub.dim}


def lagrangian_sampling(
    f: BoundedFunction,
    params: LocalMaximizerParams,
    delta: float,
    rng: RngStream,
    preset: Preset = PRACTICAL,
    *,
    mode: str = "importance",
    shared: dict | None = None,
) -> tuple[Subspace, dict]:
    """One round of boosted sampling: returns a candidate isotropic subspace.

    Boosting projects f onto random Weyl eigenspaces at phase points drawn
    from the current convoluted distribution; the boost depth s is uniform
    on {0, ..., t}.  The span of spectrum-filtered samples of the boosted
    function is returned together with a report.  ``shared`` (used by the
    list decoder) carries the unboosted sampler across repetitions so its
    per-derivative distributions are built once.
    """
    t = params.t
    if preset.boost_cap is not None:
        t = min(t, preset.boost_cap)
    t = max(0, min(t, f.max_depth - f.depth))
    s = int(rng.child("depth").integers(0, t + 1))
    eps = max(params.eps, preset.eps_floor)
    xi = max(params.xi, preset.xi_floor)
    current = f
    for i in range(s):
        sampler = ConvolutedSampler(
            current, xi, rng.child("boost-sampler", i), preset, mode=mode
        )
        if preset.name != "paper":
            # A single nu draw is a heavy spectral point directly; the
            # convolution nu * nu squares the chance of hitting one, which
            # wastes boost rounds on mixtures with several weak components.
            # Drawing a few and keeping the strongest overlap further cuts
            # the chance of projecting onto a dead eigenspace.
            cand_bits = sampler.sample_half_bits(preset.boost_draws, rng.child("boost-draw", i))
            cands = [PhasePoint.from_bits(current.n, int(x)) for x in np.unique(cand_bits)]
        else:
            cands = [sampler.sample_one(rng.child("boost-draw", i))]
        # Project onto the eigenspace of W(u) holding more of the energy:
        # ||f'||_2^2 = (||f||_2^2 + sigma Re<f, W(u) f>) / 2.
        best = None
        for ci, u in enumerate(cands):
            g = phase_derivative(current, u)
            est = mc_mean(
                lambda k: g(current.sample_points(rng.child("boost-sign", i, ci), k)),
                max(0.02, preset.accuracy_floor),
                0.05,
                strict=preset.strict,
            )
            overlap = ((-1j) ** kappa(u)) * est  # <f, W(u) f>
            if best is None or abs(overlap.real) > abs(best[1]):
                best = (u, overlap.real)
        u, ov = best
        sigma = 1 if ov >= 0 else -1
        current = project(current, u, sigma)
    if s == 0 and shared is not None:
        sampler = shared.get("base")
        if sampler is None:
            sampler = ConvolutedSampler(current, xi, rng.child("sampler"), preset, mode=mode)
            shared["base"] = sampler
    else:
        sampler = ConvolutedSampler(current, xi, rng.child("sampler"), preset, mode=mode)
    sub, rep = robust_generate(current, sampler, eps, params.tau, delta, rng.child("robust"), preset)
    rep.update({"boost_depth": s, "t": t, "eps": eps, "xi": xi})
    return sub, rep


def _coset_function(f: BoundedFunction, lag: Lagrangian, w_bits: int) -> BoundedFunction:
    """Restrict-and-twist f to the coset w + V, in graph coordinates.

    With V the graph domain, B its basis and M the graph matrix split as
    M = Q + Q^T + Diag(d), the returned function on F_2^{dim V} is
    g(h) = f(x) (-1)^{x^T Q x} i^{-|d o x|} at x = w + Bh.  Its large
    Fourier coefficients are the characters completing (V, w, Q, d) to a
    stabilizer state correlating with f.
    """
    m = lag.graph_matrix
    quad = m.strict_upper()
    d_bits = np.uint64(m.diagonal().bits)
    basis = list(lag.graph_domain.basis_rows)
    pairs = []
    for i, row in enumerate(quad.rows):
        while row:
            j = (row & -row).bit_length() - 1
            pairs.append((np.uint64(i), np.uint64(j)))
            row &= row - 1

    def eval_array(hs: np.ndarray) -> np.ndarray:
        x = np.full(hs.shape, w_bits, dtype=np.uint64)
        one = np.uint64(1)
        for i, row in enumerate(basis):
            x ^= ((hs >> np.uint64(i)) & one) * np.uint64(row)
        expo = np.zeros(hs.shape, dtype=np.int64)
        for i, j in pairs:
            expo += 2 * ((x >> i) & (x >> j) & one).astype(np.int64)
        expo -= np.bitwise_count(x & d_bits).astype(np.int64)
        return f(x) * (1j ** (expo % 4))

    eval_array = memoize_eval(len(basis), eval_array, f.counter, 1 << f.depth)
    return BoundedFunction(
        len(basis), eval_array, counter=f.counter, depth=f.depth, max_depth=f.max_depth, check=False
    )


def stabilizer_sampling(
    f: BoundedFunction,
    lag: Lagrangian,
    tau: float,
    delta: float,
    rng: RngStream,
    preset: Preset = PRACTICAL,
) -> StabilizerState | None:
    """Sample a stabilizer state with the given Lagrangian correlating with f.

    Guesses the supporting coset of the graph domain V, removes the
    quadratic and non-classical phases dictated by the graph form, and
    list-decodes the remaining linear character on the coset.  Returns None
    when every guessed coset yields an empty list.
    """
    n = f.n
    v = lag.graph_domain
    codim = n - v.dim
    tau_gl = min(1.0, max(tau * tau, preset.gl_tau_floor))
    if preset.name != "paper" and codim > 0:
        # One uniform coset guess suffices in expectation over repetitions;
        # scanning a few representatives trades queries for repetitions
        # (a wrong guess dies quickly because the twisted function is tiny).
        if codim <= 4:
            reps = list(v.complement_in(Subspace.full(n)).enumerate_bits())
        else:
            reps = []
            seen: set[int] = set()
            tries = 0
            while len(reps) < _MAX_COSET_GUESSES and tries < 20 * _MAX_COSET_GUESSES:
                tries += 1
                w = v.reduce_bits(rng.child("coset", tries).uniform_int(n))
                if w not in seen:
                    seen.add(w)
                    reps.append(w)
        order = rng.child("coset-order").generator.permutation(len(reps))
        guesses = [reps[i] for i in order]
    else:
        guesses = [v.reduce_bits(rng.child("coset").uniform_int(n))]
    quad = lag.graph_matrix.strict_upper()
    d = BitVector(n, lag.graph_matrix.diagonal().bits)
    for gi, w_bits in enumerate(guesses):
        g = _coset_function(f, lag, w_bits)
        listed = []
        for k, factor in enumerate(_TAU_LADDER):
            t = factor * tau_gl
            if k > 0 and (t < tau * tau or preset.gl_tau_floor <= 0):
                break
            listed = goldreich_levin(g, t, 0.5, rng.child("gl", gi, k), strict=preset.strict)
            if listed:
                break
        if not listed:
            continue
        pick = int(rng.child("pick", gi).integers(0, len(listed)))
        c_tilde = listed[pick][0]
        # Lift the character from graph coordinates back to F_2^n: a vector
        # supported on the pivot coordinates of V reproduces b . h_i =
        # c_tilde_i, and the V^perp component of b does not affect the state.
        b_bits = 0
        for i, p in enumerate(v.pivots):
            if c_tilde[i]:
                b_bits |= 1 << p
        return StabilizerState.from_global(
            n, v, BitVector(n, w_bits), quad, BitVector(n, b_bits), d
        )
    return None


_MAX_SALVAGE = 8
_MAX_QUOTIENT_DIM = 4


def _isotropic_candidates(sub: Subspace, n: int, rng: RngStream) -> list[Subspace]:
    """Isotropic subspaces contained in a (possibly non-isotropic) span.

    An isotropic span is returned unchanged.  Otherwise the symplectic form
    restricted to the span has a radical R; when the defect q = dim - dim R
    is small (a span polluted by a few spurious shift directions around one
    underlying Lagrangian), R plus any maximal isotropic subspace of the
    q-dimensional quotient is a maximal isotropic subspace of the span, and
    one of those lifts recovers the right Lagrangian.  The lifts are
    enumerated, shuffled, and capped.
    """
    rows = list(sub.basis_rows)
    k = len(rows)
    pts = [PhasePoint.from_bits(n, r) for r in rows]
    gram = [
        sum(symplectic_form(pts[i], pts[j]) << j for j in range(k)) for i in range(k)
    ]
    if not any(gram):
        return [sub]

    def combo(bits: int) -> int:
        out = 0
        for i in range(k):
            if (bits >> i) & 1:
                out ^= rows[i]
        return out

    ker = nullspace_rows(gram, k)
    rad_rows = [combo(c) for c in ker]
    ker_rref, ker_pivots = rref_rows(list(ker), k)
    free = [i for i in range(k) if i not in ker_pivots]
    q = len(free)
    if q > _MAX_QUOTIENT_DIM:
        return []
    # Pairing of coefficient combos c, c' under the Gram matrix.
    gram_row = {c: 0 for c in range(1 << q)}
    lift = []
    for c in range(1 << q):
        bits = 0
        for idx, i in enumerate(free):
            if (c >> idx) & 1:
                bits |= 1 << i
        lift.append(bits)
        acc = 0
        for i in range(k):
            if (bits >> i) & 1:
                acc ^= gram[i]
        gram_row[c] = acc

    def pair(c1: int, c2: int) -> int:
        return bin(gram_row[c1] & lift[c2]).count("1") & 1

    half = q // 2
    found: list[Subspace] = []
    seen: set[frozenset[int]] = set()
    elems = list(range(1, 1 << q))
    for start in elems:
        stack = [(Subspace(q, [start]), [start])]
        while stack:
            cur, basis = stack.pop()
            if cur.dim == half:
                key = frozenset(cur.enumerate_bits())
                if key not in seen:
                    seen.add(key)
                    lifted = [combo(lift[c]) for c in basis]
                    found.append(Subspace(2 * n, rad_rows + lifted))
                continue
            for e in elems:
                if cur.contains(BitVector(q, e)):
                    continue
                if any(pair(b, e) for b in basis):
                    continue
                stack.append((Subspace(q, basis + [e]), basis + [e]))
    order = rng.generator.permutation(len(found))
    return [found[i] for i in order[:_MAX_SALVAGE]]


def list_decode_stabilizers(
    f: BoundedFunction,
    tau: float,
    gamma: float,
    delta: float,
    rng: RngStream,
    preset: Preset = PRACTICAL,
) -> tuple[list[StabilizerState], dict]:
    """List stabilizer states covering the gamma-approximate local maximizers.

    Repeats (lagrangian_sampling -> extend -> stabilizer_sampling) enough
    times that any outcome of per-repetition probability >= the preset's
    success floor appears with probability >= 1 - delta, and deduplicates
    projectively.
    """
    params = LocalMaximizerParams(gamma, tau)
    p = preset.success_floor
    reps = math.ceil((1.0 / p) * math.log(1.0 / p) * max(1.0, math.log(1.0 / delta)))
    if preset.reps_cap is not None:
        reps = min(reps, preset.reps_cap)
    reps = max(reps, 1)
    states: list[StabilizerState] = []
    seen = set()
    rounds = []
    stale = 0
    shared_samplers: dict = {}
    for i in range(reps):
        if preset.stale_window is not None and states and stale >= preset.stale_window:
            # Practical early stop: consecutive repetitions stopped adding
            # new states, so further repetitions mostly rediscover the list.
            break
        sub, rep = lagrangian_sampling(
            f, params, delta, rng.child("rep", i), preset, shared=shared_samplers
        )
        rep["stabilizer"] = False
        rounds.append(rep)
        stale += 1
        pts = [PhasePoint.from_bits(f.n, r) for r in sub.basis_rows]
        if is_isotropic(pts):
            candidates = [sub]
        elif preset.name != "paper":
            # Salvage: a span polluted by shift directions of one underlying
            # Lagrangian still contains it as a maximal isotropic subspace.
            candidates = _isotropic_candidates(sub, f.n, rng.child("salvage", i))
        else:
            continue
        for ci, cand in enumerate(candidates):
            try:
                lag = extend_to_lagrangian(cand)
            except IsotropyError:
                continue
            state = stabilizer_sampling(f, lag, tau, delta, rng.child("stab", i, ci), preset)
            if state is not None:
                key = state.projective_key()
                if key not in seen:
                    seen.add(key)
                    states.append(state)
                    stale = 0
                rep["stabilizer"] = True
                break
    return states, {"repetitions": reps, "unique_states": len(states), "rounds": rounds}
