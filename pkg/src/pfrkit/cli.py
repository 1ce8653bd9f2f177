"""Command-line front end: run each algorithm with seeds, emit JSON reports.

Exit codes: 0 success; 2 parse/input errors; 3 unverified cover; 4 contract
(boundedness) violations; 5 oracle cap exceeded.  Reports carry a ``schema``
version and are byte-identical for identical command + seed, except for the
``wall_ms`` field.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from .config import get_preset
from .errors import (
    BoundednessError,
    DenseCapError,
    DimensionMismatchError,
    ParameterError,
    PfrkitError,
)
from .funcspace import DenseFunction, QueryCounter, load_table
from .generators import make_instance, make_set_instance
from .gf2 import BitMatrix, BitVector, Subspace
from .oracle import (
    enumerate_lagrangians,
    max_quadratic_correlation,
    sumset_stats,
    u3_norm_exact,
    verify_cover,
)
from .pfr import SampleableSet, hom_test, pfr_cover, structured_hom
from .qgl import pgi, quadratic_goldreich_levin, quadratic_decompose, rm_self_correct
from .quadratic import QuadraticPolynomial
from .rng import RngStream

SCHEMA = 1

_EXIT_OK = 0
_EXIT_INPUT = 2
_EXIT_UNVERIFIED = 3
_EXIT_CONTRACT = 4
_EXIT_CAP = 5


class _CliError(Exception):
    def __init__(self, message: str, code: int = _EXIT_INPUT):
        super().__init__(message)
        self.code = code


# -- input loading -------------------------------------------------------------


def _load_function(args) -> tuple:
    """(BoundedFunction, info) from --fn table or --gen spec."""
    if getattr(args, "fn", None):
        try:
            dense = load_table(args.fn)
        except OSError as exc:
            raise _CliError(f"cannot read {args.fn}: {exc}") from exc
        except (ParameterError, DimensionMismatchError, ValueError) as exc:
            raise _CliError(f"bad table {args.fn}: {exc}") from exc
        try:
            return dense.as_bounded(), {"kind": "table", "path": args.fn, "n": dense.n}
        except BoundednessError as exc:
            raise _CliError(f"table violates |f| <= 1: {exc}", _EXIT_CONTRACT) from exc
    if getattr(args, "gen", None):
        try:
            f, info = make_instance(args.gen)
        except PfrkitError as exc:
            raise _CliError(f"bad generator spec {args.gen!r}: {exc}") from exc
        return f, info
    raise _CliError("need --fn or --gen")


def _load_set(args) -> tuple:
    """(n, members ndarray, info) from --set file or --gen spec."""
    if getattr(args, "set", None):
        members = []
        n = None
        try:
            with open(args.set) as fh:
                for line in fh:
                    line = line.strip()
                    if not line or line.startswith("#"):
                        continue
                    v = BitVector.from_string(line)
                    if n is None:
                        n = v.n
                    elif v.n != n:
                        raise _CliError(f"inconsistent bitstring lengths in {args.set}")
                    members.append(v.bits)
        except OSError as exc:
            raise _CliError(f"cannot read {args.set}: {exc}") from exc
        except ValueError as exc:
            raise _CliError(f"bad set file {args.set}: {exc}") from exc
        if n is None:
            raise _CliError(f"empty set file {args.set}")
        return n, np.array(members, dtype=np.uint64), {"kind": "file", "path": args.set}
    if getattr(args, "gen", None):
        try:
            return make_set_instance(args.gen)
        except PfrkitError as exc:
            raise _CliError(f"bad set generator spec {args.gen!r}: {exc}") from exc
    raise _CliError("need --set or --gen")


def _load_map(path) -> tuple[int, int, np.ndarray]:
    """Total map from lines ``x_bits,y_bits``; returns (m, n, values)."""
    pairs: dict[int, int] = {}
    m = n = None
    try:
        with open(path) as fh:
            for line in fh:
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                try:
                    xs, ys = line.split(",")
                except ValueError as exc:
                    raise _CliError(f"bad map line {line!r} in {path}") from exc
                xv = BitVector.from_string(xs.strip())
                yv = BitVector.from_string(ys.strip())
                if m is None:
                    m, n = xv.n, yv.n
                elif xv.n != m or yv.n != n:
                    raise _CliError(f"inconsistent bitstring lengths in {path}")
                pairs[xv.bits] = yv.bits
    except OSError as exc:
        raise _CliError(f"cannot read {path}: {exc}") from exc
    except ValueError as exc:
        raise _CliError(f"bad map file {path}: {exc}") from exc
    if m is None:
        raise _CliError(f"empty map file {path}")
    if len(pairs) != 1 << m:
        raise _CliError(f"map in {path} is not total: {len(pairs)} of {1 << m} points")
    values = np.array([pairs[x] for x in range(1 << m)], dtype=np.uint64)
    return m, n, values


# -- output formatting ---------------------------------------------------------


def _bitstring(n: int, bits: int) -> str:
    return BitVector(n, bits).to_string()


def _poly_json(p: QuadraticPolynomial) -> dict:
    positions = []
    for i, row in enumerate(p.quad.rows):
        for j in range(p.n):
            if (row >> j) & 1:
                positions.append(f"{i},{j}")
    return {
        "n": p.n,
        "Q": positions,
        "c": _bitstring(p.n, p.linear.bits),
        "b0": int(p.constant),
    }


def _sanitize(obj):
    """Drop non-serializable report entries; round-trip the rest to JSON types."""
    if isinstance(obj, dict):
        out = {}
        for k, v in obj.items():
            v = _sanitize(v)
            if v is not _SKIP:
                out[k] = v
        return out
    if isinstance(obj, (list, tuple)):
        items = [_sanitize(v) for v in obj]
        return [v for v in items if v is not _SKIP]
    if isinstance(obj, QuadraticPolynomial):
        return _poly_json(obj)
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, str) or obj is None:
        return obj
    if isinstance(obj, np.ndarray):
        return _SKIP
    return _SKIP


_SKIP = object()


def _emit(args, payload: dict) -> None:
    payload = {"schema": SCHEMA, **payload}
    text = json.dumps(payload, indent=None if args.json else 2, sort_keys=False)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


# -- commands ------------------------------------------------------------------


def _cmd_pfr(args) -> int:
    n, members, info = _load_set(args)
    preset = get_preset(args.preset)
    a = SampleableSet.from_members(n, members)
    rng = RngStream(args.seed)
    t0 = time.perf_counter()
    result = pfr_cover(a, args.k, preset, rng)
    wall_ms = int(1000 * (time.perf_counter() - t0))
    r = result.report
    payload = {
        "command": "pfr",
        "n": n,
        "K_input": args.k,
        "preset": preset.name,
        "seed": args.seed,
        "source": _sanitize(info),
        "V_basis": [_bitstring(n, b) for b in result.v.basis_rows],
        "translates": [_bitstring(n, t.bits) for t in result.translates],
        "translate_count": len(result.translates),
        "verified": bool(result.verified),
        "subspace_dim": r["subspace_dim"],
        "agreement": _sanitize(r["agreement"]),
        "counters": {
            "A_queries": a.queries,
            "A_samples": a.samples,
            "base_fn_queries": r["agreement"].get("g_queries", 0),
        },
        "wall_ms": wall_ms,
    }
    _emit(args, payload)
    return _EXIT_OK if result.verified else _EXIT_UNVERIFIED


def _cmd_qgl(args) -> int:
    f, info = _load_function(args)
    preset = get_preset(args.preset)
    rng = RngStream(args.seed)
    t0 = time.perf_counter()
    poly, report = quadratic_goldreich_levin(f, args.eps, args.delta, rng, preset)
    wall_ms = int(1000 * (time.perf_counter() - t0))
    _emit(args, {
        "command": "qgl",
        "preset": preset.name,
        "seed": args.seed,
        "eps": args.eps,
        "delta": args.delta,
        "source": _sanitize(info),
        "polynomial": _poly_json(poly),
        "correlation": report["est_correlation"],
        "report": _sanitize(report),
        "counters": f.counter.snapshot(),
        "wall_ms": wall_ms,
    })
    return _EXIT_OK


def _cmd_pgi(args) -> int:
    f, info = _load_function(args)
    preset = get_preset(args.preset)
    rng = RngStream(args.seed)
    t0 = time.perf_counter()
    poly, report = pgi(f, args.gamma, rng, preset)
    wall_ms = int(1000 * (time.perf_counter() - t0))
    _emit(args, {
        "command": "pgi",
        "preset": preset.name,
        "seed": args.seed,
        "gamma": args.gamma,
        "source": _sanitize(info),
        "polynomial": _poly_json(poly),
        "correlation": report["est_correlation"],
        "correlation_target": report["correlation_target"],
        "report": _sanitize(report),
        "counters": f.counter.snapshot(),
        "wall_ms": wall_ms,
    })
    return _EXIT_OK


def _cmd_rm_correct(args) -> int:
    f, info = _load_function(args)
    preset = get_preset(args.preset)
    rng = RngStream(args.seed)
    t0 = time.perf_counter()
    poly, report = rm_self_correct(f, args.eps, rng, preset)
    wall_ms = int(1000 * (time.perf_counter() - t0))
    est = report["sign_estimate"]
    corr = -est if report["flipped"] else est
    _emit(args, {
        "command": "rm-correct",
        "preset": preset.name,
        "seed": args.seed,
        "eps": args.eps,
        "source": _sanitize(info),
        "polynomial": _poly_json(poly),
        "distance_estimate": (1.0 - corr) / 2.0,
        "report": _sanitize(report),
        "counters": f.counter.snapshot(),
        "wall_ms": wall_ms,
    })
    return _EXIT_OK


def _cmd_decompose(args) -> int:
    f, info = _load_function(args)
    preset = get_preset(args.preset)
    rng = RngStream(args.seed)
    dense = DenseFunction.from_bounded(f)
    t0 = time.perf_counter()
    result = quadratic_decompose(dense, args.eps, rng, preset)
    wall_ms = int(1000 * (time.perf_counter() - t0))
    _emit(args, {
        "command": "decompose",
        "preset": preset.name,
        "seed": args.seed,
        "eps": args.eps,
        "source": _sanitize(info),
        "rounds": result["rounds"],
        "converged": result["converged"],
        "coeffs": [{"re": c.real, "im": c.imag} for c in result["coeffs"]],
        "polynomials": [_poly_json(p) for p in result["polys"]],
        "g_sup": result["g_sup"],
        "h_l1": result["h_l1"],
        "counters": f.counter.snapshot(),
        "wall_ms": wall_ms,
    })
    return _EXIT_OK


def _cmd_homtest(args) -> int:
    if not args.map:
        raise _CliError("need --map")
    m, n, values = _load_map(args.map)
    preset = get_preset(args.preset)
    rng = RngStream(args.seed)
    t0 = time.perf_counter()
    if args.structured:
        mat, report = structured_hom(values, n, args.k, rng, preset)
        offset = None
        hom_report = report["hom"]
    else:
        mat, off, hom_report = hom_test(values, n, args.k, rng, preset)
        offset = _bitstring(n, off.bits)
        report = None
    wall_ms = int(1000 * (time.perf_counter() - t0))
    payload = {
        "command": "homtest",
        "preset": preset.name,
        "seed": args.seed,
        "K_input": args.k,
        "m": m,
        "n": n,
        "M_rows": [_bitstring(m, row) for row in mat.rows],
        "agreement": hom_report.get("agreement"),
        "report": _sanitize(hom_report),
        "wall_ms": wall_ms,
    }
    if offset is not None:
        payload["v"] = offset
    if report is not None:
        payload["diff_set_size"] = report["diff_set_size"]
        payload["diff_set"] = [_bitstring(n, d) for d in report["diff_set"]]
    _emit(args, payload)
    return _EXIT_OK


def _cmd_oracle(args) -> int:
    try:
        if args.oracle_cmd == "u3":
            f, info = _load_function(args)
            dense = DenseFunction.from_bounded(f)
            value = u3_norm_exact(dense)
            payload = {"command": "oracle.u3", "source": _sanitize(info), "u3_norm": value}
        elif args.oracle_cmd == "maxquad":
            f, info = _load_function(args)
            dense = DenseFunction.from_bounded(f)
            opt, poly = max_quadratic_correlation(dense)
            payload = {
                "command": "oracle.maxquad",
                "source": _sanitize(info),
                "max_correlation": opt,
                "polynomial": _poly_json(poly),
            }
        elif args.oracle_cmd == "sumset":
            n, members, info = _load_set(args)
            stats = sumset_stats([int(x) for x in members], n)
            payload = {"command": "oracle.sumset", "source": _sanitize(info), **_sanitize(stats)}
        elif args.oracle_cmd == "lagrangians":
            lags = enumerate_lagrangians(args.n)
            payload = {"command": "oracle.lagrangians", "n": args.n, "count": len(lags)}
        elif args.oracle_cmd == "verify":
            n, members, info = _load_set(args)
            v_rows = []
            translates = []
            if not args.cover:
                raise _CliError("need --cover (JSON from the pfr command)")
            try:
                with open(args.cover) as fh:
                    cover = json.load(fh)
                v_rows = [BitVector.from_string(s).bits for s in cover["V_basis"]]
                translates = [BitVector.from_string(s).bits for s in cover["translates"]]
            except OSError as exc:
                raise _CliError(f"cannot read {args.cover}: {exc}") from exc
            except (KeyError, ValueError, json.JSONDecodeError) as exc:
                raise _CliError(f"bad cover file {args.cover}: {exc}") from exc
            check = verify_cover([int(x) for x in members], n, Subspace(n, v_rows), translates)
            payload = {"command": "oracle.verify", "source": _sanitize(info), **_sanitize(check)}
        else:  # pragma: no cover - argparse restricts choices
            raise _CliError(f"unknown oracle subcommand {args.oracle_cmd!r}")
    except DenseCapError as exc:
        raise _CliError(str(exc), _EXIT_CAP) from exc
    _emit(args, payload)
    return _EXIT_OK


# -- argument plumbing ---------------------------------------------------------


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0, help="root RNG seed (u64)")
    p.add_argument(
        "--preset", choices=("paper", "practical"), default="practical",
        help="parameter schedule",
    )
    p.add_argument("--threads", type=int, default=1, help="worker cap (1 = sequential)")
    p.add_argument("--out", help="write the JSON report to this path instead of stdout")
    p.add_argument("--json", action="store_true", help="compact single-line JSON")


def _add_fn_inputs(p: argparse.ArgumentParser) -> None:
    p.add_argument("--fn", help="function table file (bitstring,re,im per line)")
    p.add_argument("--gen", help="generator spec, e.g. noisy-quadratic:n=10,flip=0.1,seed=3")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pfrkit",
        description="Quadratic Goldreich-Levin and polynomial Freiman-Ruzsa covers over F_2^n",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pfr", help="cover a bounded-doubling set by subspace translates")
    p.add_argument("--set", help="set file (bitstring per line)")
    p.add_argument("--gen", help="set generator spec, e.g. cosets:n=16,dim=8,count=4,seed=1")
    p.add_argument("--k", type=float, required=True, help="doubling constant K")
    _add_common(p)
    p.set_defaults(func=_cmd_pfr)

    p = sub.add_parser("qgl", help="quadratic Goldreich-Levin")
    _add_fn_inputs(p)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--delta", type=float, default=1.0 / 3.0)
    _add_common(p)
    p.set_defaults(func=_cmd_qgl)

    p = sub.add_parser("pgi", help="algorithmic U^3 inverse theorem")
    _add_fn_inputs(p)
    p.add_argument("--gamma", type=float, required=True)
    _add_common(p)
    p.set_defaults(func=_cmd_pgi)

    p = sub.add_parser("rm-correct", help="Reed-Muller order-2 self-correction")
    _add_fn_inputs(p)
    p.add_argument("--eps", type=float, required=True)
    _add_common(p)
    p.set_defaults(func=_cmd_rm_correct)

    p = sub.add_parser("decompose", help="greedy quadratic decomposition")
    _add_fn_inputs(p)
    p.add_argument("--eps", type=float, required=True)
    _add_common(p)
    p.set_defaults(func=_cmd_decompose)

    p = sub.add_parser("homtest", help="affine/homomorphism recovery from a total map")
    p.add_argument("--map", help="map file (x_bits,y_bits per line)")
    p.add_argument("--k", type=float, default=1.0, help="additive-quadruple parameter K")
    p.add_argument(
        "--structured", action="store_true",
        help="structured mode: report the difference set instead of an offset",
    )
    _add_common(p)
    p.set_defaults(func=_cmd_homtest)

    p = sub.add_parser("oracle", help="brute-force ground-truth oracles")
    osub = p.add_subparsers(dest="oracle_cmd", required=True)
    for name, helptext in (
        ("u3", "exact U^3 norm of a dense table"),
        ("maxquad", "exhaustive best quadratic correlation"),
        ("sumset", "doubling statistics of an enumerated set"),
        ("lagrangians", "count Lagrangians by enumeration"),
        ("verify", "re-verify a cover JSON against a set"),
    ):
        op = osub.add_parser(name, help=helptext)
        if name in ("u3", "maxquad"):
            _add_fn_inputs(op)
        if name in ("sumset", "verify"):
            op.add_argument("--set", help="set file (bitstring per line)")
            op.add_argument("--gen", help="set generator spec")
        if name == "lagrangians":
            op.add_argument("--n", type=int, required=True)
        if name == "verify":
            op.add_argument("--cover", help="cover JSON produced by the pfr command")
        _add_common(op)
        op.set_defaults(func=_cmd_oracle)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except BoundednessError as exc:
        print(f"contract violation: {exc}", file=sys.stderr)
        return _EXIT_CONTRACT
    except DenseCapError as exc:
        print(f"cap exceeded: {exc}", file=sys.stderr)
        return _EXIT_CAP
    except PfrkitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
