"""Quadratic Goldreich-Levin, self-correction, and decomposition."""

import numpy as np
import pytest

from pfrkit.config import PRACTICAL
from pfrkit.errors import ParameterError
from pfrkit.funcspace import DenseFunction
from pfrkit.oracle import max_quadratic_correlation
from pfrkit.qgl import pgi, quadratic_decompose, quadratic_goldreich_levin, rm_self_correct
from pfrkit.quadratic import QuadraticPolynomial
from pfrkit.rng import RngStream


def quad_phase(n, seed):
    q = QuadraticPolynomial.random(n, RngStream(seed).child("q"))
    pts = np.arange(1 << n, dtype=np.uint64)
    return q, DenseFunction(n, q.phase_values(pts).astype(np.complex128))


def same_up_to_constant(p, q):
    return p.n == q.n and p.quad == q.quad and p.linear == q.linear


def test_qgl_parameter_validation():
    f = DenseFunction(4, np.zeros(16, dtype=np.complex128)).as_bounded(check=False)
    with pytest.raises(ParameterError):
        quadratic_goldreich_levin(f, 0.0, 0.5, RngStream(1))
    with pytest.raises(ParameterError):
        quadratic_goldreich_levin(f, 0.1, 1.5, RngStream(1))


def test_qgl_zero_function():
    f = DenseFunction(5, np.zeros(32, dtype=np.complex128)).as_bounded(check=False)
    poly, report = quadratic_goldreich_levin(f, 0.3, 0.2, RngStream(3))
    assert poly.quad.rank() == 0 and poly.linear.is_zero()


def test_qgl_planted_exact():
    hits = 0
    for k in range(5):
        q, f = quad_phase(7, 30 + k)
        poly, report = quadratic_goldreich_levin(
            f.as_bounded(check=False), 0.2, 1.0 / 3.0, RngStream(60 + k)
        )
        if same_up_to_constant(poly, q):
            hits += 1
        assert report["est_correlation"] <= 1.0 + 1e-9
    assert hits >= 4


def test_qgl_list_size_bound():
    # |candidates| <= 2 |states| / eps^2 (step-2 expansion bound)
    q, f = quad_phase(6, 77)
    eps = 0.25
    poly, report = quadratic_goldreich_levin(f.as_bounded(check=False), eps, 0.3, RngStream(5))
    assert report["list_size"] - 1 <= 2 * max(1, report["states_kept"]) / (eps * eps)


def test_pgi_reports_target():
    q, f = quad_phase(6, 91)
    poly, report = pgi(f.as_bounded(check=False), 1.0, RngStream(7))
    assert report["correlation_target"] == 0.5 ** (PRACTICAL.pgi_exponent + 1)
    assert report["est_correlation"] >= report["correlation_target"]


def test_rm_exact_function():
    q, f = quad_phase(6, 101)
    poly, report = rm_self_correct(f.as_bounded(check=False), 0.2, RngStream(11))
    # exact distance 0: recovered polynomial equals q including the constant
    assert same_up_to_constant(poly, q)
    assert poly.constant == q.constant


def test_rm_beats_oracle_distance():
    # random boolean f, n = 4: dist(f, p) < exhaustive min + eps
    n, eps = 4, 0.3
    gen = RngStream(13).generator
    for k in range(3):
        vals = (1.0 - 2.0 * gen.integers(0, 2, size=1 << n)).astype(np.complex128)
        f = DenseFunction(n, vals)
        poly, _ = rm_self_correct(f.as_bounded(check=False), eps, RngStream(120 + k))
        pts = np.arange(1 << n, dtype=np.uint64)
        dist = float(np.mean(f.values.real * poly.phase_values(pts) < 0))
        best_corr, _ = max_quadratic_correlation(f)
        best_dist = (1.0 - best_corr) / 2.0
        assert dist < best_dist + eps + 1e-9


def test_decompose_single_phase():
    q, f = quad_phase(6, 131)
    result = quadratic_decompose(f, 0.2, RngStream(17))
    assert result["rounds"] == 1
    assert abs(result["coeffs"][0]) > 0.9
    assert result["g_sup"] <= 0.2 + 1e-9 or result["h_l1"] <= 0.2 + 1e-9
    # reconstruction identity is algebraic bookkeeping: exact
    pts = np.arange(1 << 6, dtype=np.uint64)
    recon = np.zeros(1 << 6, dtype=np.complex128)
    for c, p in zip(result["coeffs"], result["polys"]):
        recon += c * p.phase_values(pts)
    recon += result["g"].values + result["h"].values
    assert np.allclose(recon, f.values, atol=1e-12)


def test_decompose_zero():
    f = DenseFunction(5, np.zeros(32, dtype=np.complex128))
    result = quadratic_decompose(f, 0.2, RngStream(19))
    assert result["rounds"] == 0
    assert result["g_sup"] == 0.0 and result["h_l1"] == 0.0


def test_decompose_two_phases():
    q1, f1 = quad_phase(6, 141)
    q2, f2 = quad_phase(6, 142)
    vals = 0.5 * (f1.values + f2.values)
    f = DenseFunction(6, vals)
    result = quadratic_decompose(f, 0.2, RngStream(23))
    pts = np.arange(1 << 6, dtype=np.uint64)
    recon = np.zeros(1 << 6, dtype=np.complex128)
    for c, p in zip(result["coeffs"], result["polys"]):
        recon += c * p.phase_values(pts)
    recon += result["g"].values + result["h"].values
    assert np.allclose(recon, f.values, atol=1e-12)
    assert result["rounds"] <= 64
