"""Fourier estimation and linear Goldreich-Levin list decoding."""

import numpy as np

from pfrkit.fourier import four_est, goldreich_levin, wht_exact
from pfrkit.funcspace import DenseFunction
from pfrkit.gf2 import BitVector
from pfrkit.rng import RngStream


def character(n, a):
    pts = np.arange(1 << n, dtype=np.uint64)
    chi = 1.0 - 2.0 * (np.bitwise_count(pts & np.uint64(a)) % 2).astype(float)
    return DenseFunction(n, chi.astype(np.complex128))


def test_four_est_character():
    n = 8
    a = 0b1011_0010
    f = character(n, a).as_bounded(check=False)
    rng = RngStream(1)
    est = four_est(f, BitVector(n, a), 0.05, 0.01, rng)
    assert abs(est - 1.0) <= 0.05
    est0 = four_est(f, BitVector(n, a ^ 1), 0.05, 0.01, rng.child("other"))
    assert abs(est0) <= 0.05


def test_four_est_zero():
    f = DenseFunction(8, np.zeros(256, dtype=np.complex128)).as_bounded(check=False)
    est = four_est(f, BitVector(8, 3), 0.1, 0.1, RngStream(2))
    assert abs(est) <= 0.1


def test_four_est_statistical_acceptance():
    # scaled character at coefficient 0.5: failure rate <= delta + slack
    n = 8
    a = 0b0110_1001
    f = DenseFunction(n, 0.5 * character(n, a).values).as_bounded(check=False)
    rng = RngStream(5)
    failures = 0
    for k in range(200):
        est = four_est(f, BitVector(n, a), 0.1, 0.1, rng.child(k))
        if abs(est - 0.5) > 0.1:
            failures += 1
    assert failures <= 200 * (0.1 + 0.02)


def test_gl_single_character():
    n = 8
    a = 0b0011_0101
    f = character(n, a).as_bounded(check=False)
    listed = goldreich_levin(f, 0.9, 0.1, RngStream(7))
    assert [b.bits for b, _ in listed] == [a]


def test_gl_zero_function():
    f = DenseFunction(8, np.zeros(256, dtype=np.complex128)).as_bounded(check=False)
    assert goldreich_levin(f, 0.1, 0.1, RngStream(9)) == []


def test_gl_two_coefficients():
    n = 8
    a, b = 0b1100_0011, 0b0001_1000
    vals = 0.6 * character(n, a).values + 0.4 * character(n, b).values
    f = DenseFunction(n, vals).as_bounded(check=False)
    listed = goldreich_levin(f, 0.5, 0.05, RngStream(11))
    got = {b.bits for b, _ in listed}
    assert a in got
    assert got <= {a, b}


def test_gl_completeness_soundness_vs_exact():
    # random sparse spectra, checked against the exact transform
    n = 8
    rng = RngStream(13)
    ok = 0
    runs = 25
    for k in range(runs):
        gen = rng.child("mk", k).generator
        vals = np.zeros(1 << n, dtype=np.complex128)
        support = gen.choice(1 << n, size=4, replace=False)
        weights = gen.dirichlet(np.ones(4))
        pts = np.arange(1 << n, dtype=np.uint64)
        for s, w in zip(support, weights):
            chi = 1.0 - 2.0 * (np.bitwise_count(pts & np.uint64(int(s))) % 2).astype(float)
            vals += np.sqrt(w) * chi
        vals /= np.max(np.abs(vals))
        f = DenseFunction(n, vals)
        exact = wht_exact(f)
        tau = 0.4
        listed = {b.bits for b, _ in goldreich_levin(f.as_bounded(check=False), tau, 0.05, rng.child("gl", k))}
        complete = all(b in listed for b in range(1 << n) if abs(exact[b]) >= tau)
        sound = all(abs(exact[b]) >= tau / 2 for b in listed)
        ok += complete and sound
    assert ok >= runs * 0.9


def test_wht_exact_examples():
    n = 6
    f = DenseFunction(n, np.ones(1 << n, dtype=np.complex128))
    coeffs = wht_exact(f)
    assert abs(coeffs[0] - 1.0) < 1e-12 and np.all(np.abs(coeffs[1:]) < 1e-12)
    g = RngStream(17).generator
    vals = g.random(1 << n) * np.exp(2j * np.pi * g.random(1 << n))
    fd = DenseFunction(n, vals)
    assert abs(np.sum(np.abs(wht_exact(fd)) ** 2) - fd.l2_norm() ** 2) < 1e-9
