"""Test-instance generators with query access at any n <= 64.

Each generator returns (BoundedFunction, info) where ``info`` records the
planted structure.  Noise is produced by a keyed integer mixer so that
functions over large domains stay pure query-access objects: the value at a
point is a deterministic function of the point and the seed.
"""

from __future__ import annotations

import numpy as np

from .config import check_dense
from .errors import ParameterError
from .funcspace import BoundedFunction, DenseFunction, QueryCounter
from .gf2 import BitVector, Subspace
from .quadratic import QuadraticPolynomial
from .rng import RngStream

__all__ = [
    "planted_quadratic",
    "noisy_quadratic",
    "coset_indicator",
    "random_bounded",
    "coset_union",
    "make_instance",
    "make_set_instance",
]

_TABLE_CAP = 18  # precompute a value table below this n (pure speed; counting unchanged)

_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_GOLD = np.uint64(0x9E3779B97F4A7C15)


def _splitmix(x: np.ndarray, key: np.uint64) -> np.ndarray:
    """Keyed 64-bit mixer (splitmix64 finalizer); uniform-looking output."""
    with np.errstate(over="ignore"):
        z = (x ^ key) * _GOLD + key
        z = (z ^ (z >> np.uint64(30))) * _MIX1
        z = (z ^ (z >> np.uint64(27))) * _MIX2
        return z ^ (z >> np.uint64(31))


def planted_quadratic(
    n: int, rng: RngStream, *, counter: QueryCounter | None = None
) -> tuple[BoundedFunction, dict]:
    """f = (-1)^q for a uniformly random quadratic q."""
    q = QuadraticPolynomial.random(n, rng.child("q"))
    ctr = counter if counter is not None else QueryCounter()

    if n <= _TABLE_CAP:
        table = q.phase_values(np.arange(1 << n, dtype=np.uint64)).astype(np.complex128)

        def eval_array(pts: np.ndarray) -> np.ndarray:
            ctr.base_queries += int(pts.size)
            return table[pts.astype(np.intp)]

    else:

        def eval_array(pts: np.ndarray) -> np.ndarray:
            ctr.base_queries += int(pts.size)
            return q.phase_values(pts).astype(np.complex128)

    return BoundedFunction(n, eval_array, counter=ctr), {"kind": "quadratic", "planted": q}


def noisy_quadratic(
    n: int,
    flip_rate: float,
    rng: RngStream,
    *,
    counter: QueryCounter | None = None,
) -> tuple[BoundedFunction, dict]:
    """(-1)^q with each value independently negated with the given rate."""
    if not 0 <= flip_rate < 0.5:
        raise ParameterError("flip_rate must lie in [0, 0.5)")
    q = QuadraticPolynomial.random(n, rng.child("q"))
    key = np.uint64(rng.child("noise").integers(0, 2**63))
    threshold = np.uint64(int(flip_rate * 2.0**64)) if flip_rate > 0 else np.uint64(0)
    ctr = counter if counter is not None else QueryCounter()

    def _values(pts: np.ndarray) -> np.ndarray:
        vals = q.phase_values(pts)
        if flip_rate > 0:
            flips = _splitmix(pts, key) < threshold
            vals = np.where(flips, -vals, vals)
        return vals.astype(np.complex128)

    if n <= _TABLE_CAP:
        table = _values(np.arange(1 << n, dtype=np.uint64))

        def eval_array(pts: np.ndarray) -> np.ndarray:
            ctr.base_queries += int(pts.size)
            return table[pts.astype(np.intp)]

    else:

        def eval_array(pts: np.ndarray) -> np.ndarray:
            ctr.base_queries += int(pts.size)
            return _values(pts)

    return (
        BoundedFunction(n, eval_array, counter=ctr),
        {"kind": "noisy-quadratic", "planted": q, "flip_rate": flip_rate},
    )


def coset_indicator(
    n: int, dim: int, rng: RngStream, *, counter: QueryCounter | None = None
) -> tuple[BoundedFunction, dict]:
    """The 0/1 indicator of a random coset of a random dim-dimensional subspace."""
    if not 0 <= dim <= n:
        raise ParameterError("dim must lie in [0, n]")
    vecs = [BitVector.random(n, rng.child("v", i)) for i in range(2 * dim + 2)]
    sub = Subspace.span(vecs[: 2 * dim + 2], ambient_dim=n)
    # Trim to the requested dimension by dropping basis rows.
    rows = sub.basis_rows[:dim]
    sub = Subspace(n, rows)
    shift = BitVector.random(n, rng.child("r"))
    perp = sub.orthogonal_complement()
    ctr = counter if counter is not None else QueryCounter()
    from .funcspace import parity_u64

    def eval_array(pts: np.ndarray) -> np.ndarray:
        ctr.base_queries += int(pts.size)
        y = pts ^ np.uint64(shift.bits)
        member = np.ones(pts.shape, dtype=bool)
        for w in perp.basis_rows:
            member &= parity_u64(y & np.uint64(w)) == 0
        return member.astype(np.complex128)

    return (
        BoundedFunction(n, eval_array, counter=ctr),
        {"kind": "coset-indicator", "subspace": sub, "shift": shift},
    )


def random_bounded(
    n: int, rng: RngStream, *, counter: QueryCounter | None = None
) -> tuple[BoundedFunction, dict]:
    """A dense random function with values uniform in the unit disk (n <= cap)."""
    check_dense(n)
    gen = rng.child("vals").generator
    mag = np.sqrt(gen.random(1 << n))
    arg = 2.0 * np.pi * gen.random(1 << n)
    dense = DenseFunction(n, mag * np.exp(1j * arg))
    ctr = counter if counter is not None else QueryCounter()
    return dense.as_bounded(counter=ctr), {"kind": "random-bounded", "dense": dense}


def coset_union(n: int, dim: int, count: int, rng: RngStream) -> tuple[np.ndarray, dict]:
    """Members of a union of ``count`` distinct cosets of a random subspace.

    Doubling constant |A+A|/|A| is at most count (shifts in general position),
    making these the canonical bounded-doubling cover instances.
    """
    if not 0 <= dim <= n:
        raise ParameterError("dim must lie in [0, n]")
    if count < 1 or count > 1 << (n - dim):
        raise ParameterError("count must lie in [1, 2^(n-dim)]")
    vecs = [BitVector.random(n, rng.child("v", i)) for i in range(dim + 4)]
    sub = Subspace(n, Subspace.span(vecs, ambient_dim=n).basis_rows[:dim])
    if sub.dim != dim:  # pragma: no cover - random span shortfall
        raise ParameterError("random span fell short; retry with another seed")
    members = np.fromiter(sub.enumerate_bits(), dtype=np.uint64, count=1 << dim)
    shifts = [0]
    guard = 0
    while len(shifts) < count and guard < 100 * count:
        guard += 1
        s = sub.reduce_bits(rng.child("s", guard).uniform_int(n))
        if s not in shifts:
            shifts.append(s)
    if len(shifts) < count:
        raise ParameterError("could not place distinct cosets")
    all_members = np.unique(
        np.concatenate([members ^ np.uint64(s) for s in shifts])
    )
    return all_members, {"kind": "coset-union", "subspace": sub, "shifts": shifts}


def make_set_instance(spec: str) -> tuple[int, np.ndarray, dict]:
    """Parse a set-generator spec like ``cosets:n=16,dim=8,count=4,seed=1``.

    Returns (n, members, info).
    """
    if ":" in spec:
        kind, _, args_str = spec.partition(":")
    else:
        kind, args_str = spec, ""
    args: dict[str, str] = {}
    for part in filter(None, (p.strip() for p in args_str.split(","))):
        key, _, value = part.partition("=")
        args[key.strip()] = value.strip()
    n = int(args.get("n", "16"))
    seed = int(args.get("seed", "0"))
    rng = RngStream(seed)
    if kind == "cosets":
        dim = int(args.get("dim", str(max(0, n // 2))))
        count = int(args.get("count", "1"))
        members, info = coset_union(n, dim, count, rng)
        return n, members, info
    raise ParameterError(f"unknown set generator kind {kind!r}")


def make_instance(spec: str) -> tuple[BoundedFunction, dict]:
    """Parse a generator spec like ``noisy-quadratic:n=10,flip=0.1,seed=3``."""
    if ":" in spec:
        kind, _, args_str = spec.partition(":")
    else:
        kind, args_str = spec, ""
    args: dict[str, str] = {}
    for part in filter(None, (p.strip() for p in args_str.split(","))):
        key, _, value = part.partition("=")
        args[key.strip()] = value.strip()
    n = int(args.get("n", "8"))
    seed = int(args.get("seed", "0"))
    rng = RngStream(seed)
    if kind == "quadratic":
        return planted_quadratic(n, rng)
    if kind == "noisy-quadratic":
        return noisy_quadratic(n, float(args.get("flip", "0.1")), rng)
    if kind == "coset-indicator":
        return coset_indicator(n, int(args.get("dim", str(max(0, n - 2)))), rng)
    if kind == "random-bounded":
        return random_bounded(n, rng)
    raise ParameterError(f"unknown generator kind {kind!r}")
