"""Brute-force ground-truth oracles."""

import numpy as np
import pytest

from pfrkit.errors import ParameterError
from pfrkit.funcspace import DenseFunction
from pfrkit.oracle import (
    enumerate_lagrangians,
    enumerate_subspaces,
    max_quadratic_correlation,
    stabilizer_basis,
    sumset_stats,
    u3_norm_exact,
)
from pfrkit.quadratic import QuadraticPolynomial
from pfrkit.rng import RngStream


def test_u3_methods_agree():
    n = 4
    gen = RngStream(1).generator
    vals = np.sqrt(gen.random(1 << n)) * np.exp(2j * np.pi * gen.random(1 << n))
    f = DenseFunction(n, vals)
    a = u3_norm_exact(f, method="fourier")
    b = u3_norm_exact(f, method="definition")
    c = u3_norm_exact(f, method="weyl")
    assert abs(a - b) < 1e-9 and abs(a - c) < 1e-9


def test_u3_norm_of_character():
    n = 5
    pts = np.arange(1 << n, dtype=np.uint64)
    chi = 1.0 - 2.0 * (np.bitwise_count(pts & np.uint64(0b10101)) % 2).astype(float)
    f = DenseFunction(n, chi.astype(np.complex128))
    assert abs(u3_norm_exact(f) - 1.0) < 1e-9


def test_max_quadratic_correlation_planted():
    q = QuadraticPolynomial.random(5, RngStream(3))
    pts = np.arange(32, dtype=np.uint64)
    f = DenseFunction(5, q.phase_values(pts).astype(np.complex128))
    best, best_q = max_quadratic_correlation(f)
    assert abs(best - 1.0) < 1e-9
    assert best_q.quad == q.quad and best_q.linear == q.linear


def test_subspace_census():
    # Gaussian binomial [4 choose 2]_2 = 35
    assert sum(1 for _ in enumerate_subspaces(4, 2)) == 35
    assert sum(1 for _ in enumerate_subspaces(3, 0)) == 1
    assert sum(1 for _ in enumerate_subspaces(3, 3)) == 1


def test_lagrangian_census_small():
    assert len(enumerate_lagrangians(1)) == 3
    assert len(enumerate_lagrangians(2)) == 15
    with pytest.raises(ParameterError):
        enumerate_lagrangians(4)


def test_stabilizer_basis_orthonormal():
    for lag in enumerate_lagrangians(2)[:6]:
        states = stabilizer_basis(lag)
        assert len(states) == 4
        tables = [s.dense().values for s in states]
        for i in range(4):
            for j in range(4):
                ip = np.mean(tables[i] * np.conj(tables[j]))
                want = 1.0 if i == j else 0.0
                assert abs(abs(ip) - want) < 1e-9
        for s in states:
            assert s.lagrangian() == lag


def test_sumset_stats_subspace():
    stats = sumset_stats(range(8), 5)  # a subspace: K = 1
    assert stats["size"] == 8
    assert stats["doubling_constant"] == 1.0
    assert stats["span_dim"] == 3
    with pytest.raises(ParameterError):
        sumset_stats([], 4)


def test_sumset_stats_doubling():
    # {0, e1, e2, e3} has |A+A| = 7
    pts = [0b000, 0b001, 0b010, 0b100]
    stats = sumset_stats(pts, 3)
    assert stats["doubling_size"] == 7
    assert stats["fourfold_size"] == 8
