"""Tunable constants and the paper/practical preset split.

The algorithms come with two parameter schedules:

* ``paper`` — every internal accuracy, threshold, and repetition count is
  derived from the stated formulas.  These schedules are astronomically
  conservative; estimates that would exceed the sample cap raise
  :class:`~pfrkit.errors.InfeasibleParameterError` instead of silently
  degrading.
* ``practical`` — the same algorithms with floors on the derived accuracies
  and caps on repetition counts, sized so desk-scale instances finish in
  seconds to minutes.  This is the default for the CLI and the test suite.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, replace

from .errors import DenseCapError, ParameterError

__all__ = ["Preset", "PAPER", "PRACTICAL", "get_preset", "dense_cap", "LocalMaximizerParams"]

_DENSE_CAP_ENV = "PFRKIT_DENSE_CAP"
_DENSE_CAP_DEFAULT = 24


def dense_cap() -> int:
    """Maximum n for which 2^n dense tables may be materialized."""
    raw = os.environ.get(_DENSE_CAP_ENV)
    if raw is None:
        return _DENSE_CAP_DEFAULT
    try:
        return int(raw)
    except ValueError as exc:
        raise DenseCapError(f"bad {_DENSE_CAP_ENV}={raw!r}") from exc


def check_dense(n: int) -> None:
    cap = dense_cap()
    if n > cap:
        raise DenseCapError(f"dense table for n={n} exceeds cap {cap} (set {_DENSE_CAP_ENV})")


@dataclass(frozen=True)
class Preset:
    """Knobs shared by the randomized pipelines.

    Floors are applied as ``max(derived_value, floor)`` on additive
    accuracies / thresholds; caps as ``min(derived_value, cap)``.
    """

    name: str
    # Additive accuracy floor for statistical estimates (0 = use formulas).
    accuracy_floor: float = 0.0
    # Floors on the derived local-maximizer schedule.
    eps_floor: float = 0.0
    xi_floor: float = 0.0
    # Floor on Goldreich-Levin thresholds used inside samplers.
    gl_tau_floor: float = 0.0
    # Cap on boosting rounds (None = formula value).
    boost_cap: int | None = None
    # Boost candidates drawn per round; the strongest overlap is projected.
    boost_draws: int = 1
    # Per-repetition success floor p; repetitions R ~ (1/p) ln(1/p) ln(1/delta).
    success_floor: float = 1e-3
    # Cap on list-decoding repetitions (None = formula value).
    reps_cap: int | None = None
    # Constant C in the robust-generation sample count m = C n / eps.
    robust_sample_const: float = 8.0
    # Cap on robust-generation samples (None = formula value).
    robust_samples_cap: int | None = None
    # Offset-search sample count in affine-agreement recovery.
    offset_samples: int = 256
    # QGL correlation parameter used by the PFR pipeline (None = 1/(2 P2(K))).
    qgl_eps: float | None = None
    # Inverse-theorem exponent c in eps = gamma^c / 2^(c+1).
    pgi_exponent: int = 2
    # Dense-model dimension rule: "paper" uses log|A| + 4 log K + 10;
    # "adaptive" sizes it from |4A| when the set is enumerable.
    dense_model_rule: str = "paper"
    # Up to this n the convoluted sampler builds its per-derivative
    # distributions from an exact transform instead of Goldreich-Levin.
    exact_sampler_max_n: int = 0
    # Stop list decoding after this many consecutive repetitions that add
    # no new state (None = always run the full repetition count).
    stale_window: int | None = None
    # Strict estimates abort (rather than truncate) past the sample cap.
    strict: bool = True

    def floor_acc(self, value: float) -> float:
        return max(value, self.accuracy_floor)

    def floor_tau(self, value: float) -> float:
        return max(value, self.gl_tau_floor)

    def with_overrides(self, **kw) -> "Preset":
        return replace(self, **kw)


PAPER = Preset(name="paper")

PRACTICAL = Preset(
    name="practical",
    accuracy_floor=0.02,
    eps_floor=0.05,
    xi_floor=0.15,
    gl_tau_floor=0.5,
    boost_cap=3,
    boost_draws=4,
    success_floor=0.2,
    reps_cap=8,
    robust_sample_const=4.0,
    robust_samples_cap=24,
    offset_samples=256,
    qgl_eps=0.2,
    pgi_exponent=2,
    dense_model_rule="adaptive",
    exact_sampler_max_n=6,
    stale_window=3,
    strict=False,
)


def get_preset(name: str) -> Preset:
    try:
        return {"paper": PAPER, "practical": PRACTICAL}[name]
    except KeyError as exc:
        raise ParameterError(f"unknown preset {name!r}") from exc


_GROWTH = 1.08  # energy-increment ratio; see lagsearch


@dataclass(frozen=True)
class LocalMaximizerParams:
    """Derived schedule for the local-maximizer search at level (gamma, tau).

    gamma in (1/2, 1] is the approximation quality of the targeted local
    maximizers; tau in (0, 1] is the correlation threshold.
    """

    gamma: float
    tau: float

    def __post_init__(self):
        if not 0.5 < self.gamma <= 1.0:
            raise ParameterError("gamma must lie in (1/2, 1]")
        if not 0.0 < self.tau <= 1.0:
            raise ParameterError("tau must lie in (0, 1]")

    @property
    def t(self) -> int:
        """Boosting rounds: ceil(log_{1.08}(1/tau))."""
        if self.tau >= 1.0:
            return 0
        return math.ceil(math.log(1.0 / self.tau) / math.log(_GROWTH))

    @property
    def eps(self) -> float:
        """Robust-generation accuracy: (gamma - 1/2)^2 tau^8 / 8."""
        return (self.gamma - 0.5) ** 2 * self.tau**8 / 8.0

    @property
    def xi(self) -> float:
        """Convoluted-sampler accuracy: eps * tau^8 / 2."""
        return self.eps * self.tau**8 / 2.0
