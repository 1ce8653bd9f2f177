"""Covering pipeline pieces: localization, dense model, covers, hom recovery."""

import numpy as np
import pytest

from pfrkit.config import PRACTICAL
from pfrkit.errors import ParameterError
from pfrkit.gf2 import BitMatrix, BitVector, Subspace
from pfrkit.oracle import freiman_iso_check, verify_cover
from pfrkit.pfr import (
    SampleableSet,
    dense_model,
    greedy_cover,
    hom_test,
    localize,
    pfr_parameters,
)
from pfrkit.rng import RngStream


def test_sampleable_set_contract():
    s = SampleableSet.from_members(6, [1, 5, 9])
    assert s.size == 3
    draws = s.sample(RngStream(1), 50)
    assert set(int(x) for x in draws) <= {1, 5, 9}
    hits = s.contains(np.array([1, 2, 5], dtype=np.uint64))
    assert list(hits) == [True, False, True]
    assert s.queries == 3 and s.samples == 50


def test_sampleable_set_empty():
    with pytest.raises(ParameterError):
        SampleableSet.from_members(4, [])


def test_localize_trivial():
    s = SampleableSet.from_members(6, [0])
    sub = localize(s, 0.1, 0.1, RngStream(2))
    assert sub.dim == 0
    s2 = SampleableSet.from_members(6, [0b100100])
    sub2 = localize(s2, 0.1, 0.1, RngStream(3))
    assert sub2.dim == 1 and sub2.contains(BitVector(6, 0b100100))


def test_localize_subspace_coverage():
    # A = a dim-10 subspace of F_2^20: the span covers A in >= 90% of runs
    rng = RngStream(5)
    base = Subspace(20, [int(rng.child("b", i).uniform_int(20)) for i in range(12)])
    base = Subspace(20, base.basis_rows[:10])
    members = np.fromiter(base.enumerate_bits(), dtype=np.uint64, count=1 << base.dim)
    s = SampleableSet.from_members(20, members)
    hits = 0
    for k in range(10):
        sub = localize(s, 0.1, 0.1, RngStream(40 + k))
        if sub.contains_subspace(base):
            hits += 1
    assert hits >= 9


def test_dense_model_freiman_iso_rate():
    # m = log2|4A| + 4 gives failure rate <= 10% over seeded trials
    rng = RngStream(7)
    failures = 0
    trials = 200
    n = 16
    for k in range(trials):
        gen = rng.child("set", k).generator
        members = np.unique(gen.integers(0, 1 << n, size=6, dtype=np.uint64))
        s = SampleableSet.from_members(n, members)
        aa = np.unique(members[:, None] ^ members[None, :])
        four = np.unique(aa[:, None] ^ aa[None, :])
        m = int(np.ceil(np.log2(four.size))) + 4
        assert m <= n  # the guarantee needs full headroom
        pi = dense_model(Subspace.full(n), s, 2.0**-4, m, rng.child("pi", k))
        if not freiman_iso_check(pi, [int(x) for x in members]):
            failures += 1
    assert failures <= trials * 0.1


def test_greedy_cover_and_verify():
    v = Subspace(8, [0b0001, 0b0010])
    members = [0b0000, 0b0011, 0b0100, 0b1000, 0b1001]
    s = SampleableSet.from_members(8, members)
    translates, complete = greedy_cover(s, v)
    assert complete
    check = verify_cover(members, 8, v, [t.bits for t in translates])
    assert check["covered"] and check["missed"] == 0
    # distinct cosets needed: {0000,0011} in V, 0100, and {1000,1001}
    assert len(translates) == 3


def test_verify_cover_detects_miss():
    v = Subspace(4, [0b0001])
    check = verify_cover([0b0000, 0b0100], 4, v, [0])
    assert not check["covered"] and check["missed"] == 1


def test_pfr_parameters_bit_exact():
    import math

    for k in (1.0, 2.0, 4.0):
        for log_a in range(4, 13):
            size = 1 << log_a
            p = pfr_parameters(size, k)
            assert p["t"] == 28 * math.log2(size) + 56 * k
            assert p["m"] == math.log2(size) + 4 * math.log2(k) + 10
            assert p["k_prime"] == (2**34) * k**13


def test_hom_test_exact_affine_map():
    # f exactly affine -> recovered exactly
    rng = RngStream(11)
    m = n = 6
    mat = BitMatrix.random(n, m, rng.child("m"))
    v = BitVector.random(n, rng.child("v"))
    values = np.array(
        [mat.apply(BitVector(m, x)).bits ^ v.bits for x in range(1 << m)], dtype=np.uint64
    )
    got_mat, got_v, report = hom_test(values, n, 1.0, rng.child("run"), PRACTICAL)
    assert report["agreement"] == 1.0
    assert got_mat == mat and got_v == v


def test_hom_test_rejects_bad_length():
    with pytest.raises(ParameterError):
        hom_test(np.arange(5, dtype=np.uint64), 4, 1.0, RngStream(1), PRACTICAL)
