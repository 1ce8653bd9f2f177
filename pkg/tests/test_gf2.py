"""GF(2) linear algebra: vectors, matrices, subspaces, affine maps."""

import pytest
from hypothesis import given, strategies as st

from pfrkit.errors import DimensionMismatchError
from pfrkit.gf2 import (
    AffineMap,
    BitMatrix,
    BitVector,
    Subspace,
    nullspace_rows,
    rref_rows,
)
from pfrkit.rng import RngStream

bits8 = st.integers(min_value=0, max_value=255)


@given(bits8, bits8)
def test_xor_is_addition(a, b):
    u, v = BitVector(8, a), BitVector(8, b)
    assert (u ^ v).bits == a ^ b
    assert (u ^ u).is_zero()
    assert u + v == u ^ v


@given(bits8, bits8)
def test_dot_symmetric_and_bilinear(a, b):
    u, v = BitVector(8, a), BitVector(8, b)
    assert u.dot(v) == v.dot(u)
    assert u.dot(v) == bin(a & b).count("1") % 2


@given(bits8)
def test_string_round_trip_msb_first(a):
    v = BitVector(8, a)
    s = v.to_string()
    assert len(s) == 8
    assert int(s, 2) == a
    assert BitVector.from_string(s) == v


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        BitVector(4, 1) ^ BitVector(5, 1)


def test_rref_identity_fixed():
    rows = [1, 2, 4]
    red, pivots = rref_rows(rows, 3)
    assert red == [1, 2, 4]
    assert pivots == [0, 1, 2]


def test_rref_dependent_rows():
    # third row is the sum of the first two
    rows = [0b110, 0b011, 0b101]
    red, pivots = rref_rows(rows, 3)
    assert len(red) == 2 == len(pivots)


def test_rref_zero():
    red, pivots = rref_rows([0, 0], 4)
    assert red == [] and pivots == []


@given(st.lists(bits8, min_size=0, max_size=6))
def test_rref_idempotent_and_span_preserved(rows):
    red, _ = rref_rows(rows, 8)
    again, _ = rref_rows(red, 8)
    assert red == again
    assert Subspace(8, rows) == Subspace(8, red)


@given(st.lists(bits8, min_size=1, max_size=6))
def test_nullspace_annihilates(rows):
    for x in nullspace_rows(rows, 8):
        for r in rows:
            assert bin(r & x).count("1") % 2 == 0


@given(st.lists(bits8, min_size=0, max_size=6), bits8, bits8)
def test_subspace_membership_closed(rows, x, y):
    sub = Subspace(8, rows)
    a = BitVector(8, sub.reduce_bits(x) ^ x)  # a member by construction
    b = BitVector(8, sub.reduce_bits(y) ^ y)
    assert sub.contains(a) and sub.contains(b)
    assert sub.contains(a ^ b)
    assert len(sub.basis_rows) == sub.dim


@given(st.lists(bits8, min_size=0, max_size=6))
def test_orthogonal_complement_dims(rows):
    sub = Subspace(8, rows)
    perp = sub.orthogonal_complement()
    assert sub.dim + perp.dim == 8
    for u in sub.basis_vectors():
        for w in perp.basis_vectors():
            assert u.dot(w) == 0
    assert perp.orthogonal_complement() == sub


@given(st.lists(bits8, min_size=0, max_size=6), bits8)
def test_coset_rep_consistent(rows, x):
    sub = Subspace(8, rows)
    v = BitVector(8, x)
    rep = sub.coset_rep(v)
    assert sub.contains(rep ^ v)
    # same coset -> same representative
    if sub.dim:
        shifted = v ^ sub.basis_vectors()[0]
        assert sub.coset_rep(shifted) == rep


def test_matrix_apply_linear():
    rng = RngStream(5)
    m = BitMatrix.random(6, 6, rng.child("m"))
    x = BitVector.random(6, rng.child("x"))
    y = BitVector.random(6, rng.child("y"))
    assert m.apply(x ^ y) == m.apply(x) ^ m.apply(y)


def test_matmul_matches_composition():
    rng = RngStream(9)
    a = BitMatrix.random(5, 7, rng.child("a"))
    b = BitMatrix.random(7, 4, rng.child("b"))
    x = BitVector.random(4, rng.child("x"))
    assert a.matmul(b).apply(x) == a.apply(b.apply(x))


def test_transpose_involution_and_rank():
    rng = RngStream(2)
    m = BitMatrix.random(6, 6, rng)
    assert m.transpose().transpose() == m
    assert m.rank() == m.transpose().rank()
    assert BitMatrix.identity(6).rank() == 6


def test_affine_map_kernel_and_image():
    rng = RngStream(3)
    mat = BitMatrix.random(4, 6, rng)
    pi = AffineMap(mat)
    assert pi.is_linear()
    ker = pi.kernel()
    for v in ker.basis_vectors():
        assert pi(v).is_zero()
    assert ker.dim + pi.image().dim == 6


def test_subspace_sum_and_intersection():
    a = Subspace(6, [0b000011, 0b001100])
    b = Subspace(6, [0b001100, 0b110000])
    s = a.sum(b)
    i = a.intersection(b)
    assert s.dim == 3 and i.dim == 1
    assert s.dim + i.dim == a.dim + b.dim
