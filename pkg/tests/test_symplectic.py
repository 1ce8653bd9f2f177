"""Phase space F_2^{2n}: symplectic form, isotropy, Lagrangian graph form."""

import pytest
from hypothesis import given, strategies as st

from pfrkit.errors import IsotropyError
from pfrkit.gf2 import BitVector, Subspace
from pfrkit.symplectic import (
    Lagrangian,
    PhasePoint,
    extend_to_lagrangian,
    is_isotropic,
    symplectic_form,
)

bits4 = st.integers(min_value=0, max_value=15)


def pp(n, a, b):
    return PhasePoint(BitVector(n, a), BitVector(n, b))


def test_form_definition():
    # [(e1, 0), (0, e1)] = 1
    assert symplectic_form(pp(4, 1, 0), pp(4, 0, 1)) == 1
    # hand evaluation: a.d = 0, b.c = 1
    assert symplectic_form(pp(4, 0b0011, 0b0100), pp(4, 0b0100, 0b0011)) == 1


@given(bits4, bits4)
def test_form_alternating(a, b):
    u = pp(4, a, b)
    assert symplectic_form(u, u) == 0


@given(bits4, bits4, bits4, bits4)
def test_form_symmetric_over_f2(a, b, c, d):
    u, v = pp(4, a, b), pp(4, c, d)
    assert symplectic_form(u, v) == symplectic_form(v, u)


@given(bits4, bits4, bits4, bits4, bits4, bits4)
def test_form_bilinear(a, b, c, d, e, f):
    u, v, w = pp(4, a, b), pp(4, c, d), pp(4, e, f)
    uv = pp(4, a ^ c, b ^ d)
    assert symplectic_form(uv, w) == symplectic_form(u, w) ^ symplectic_form(v, w)


def test_lagrangian_graph_form_round_trip():
    # every Lagrangian of F_2^{2n} decomposes as {(h, Mh + w) : h in V, w in V_perp}
    from pfrkit.oracle import enumerate_lagrangians

    for lag in enumerate_lagrangians(2):
        n = lag.n
        v = lag.graph_domain
        m = lag.graph_matrix
        assert m.is_symmetric()
        members = set(lag.subspace.enumerate_bits())
        rebuilt = set()
        for h in v.enumerate_bits():
            mh = 0
            for i in range(n):
                if bin(m.rows[i] & h).count("1") % 2:
                    mh |= 1 << i
            for w in v.orthogonal_complement().enumerate_bits():
                rebuilt.add(h | ((mh ^ w) << n))
        assert rebuilt == members


def test_lagrangian_requires_isotropy():
    # span{(e1,0),(0,e1)} is not isotropic
    with pytest.raises(IsotropyError):
        Lagrangian(Subspace(2, [0b01, 0b10]))


def test_extend_to_lagrangian():
    n = 3
    iso = Subspace(2 * n, [0b000001])  # single point is isotropic
    lag = extend_to_lagrangian(iso)
    assert lag.subspace.dim == n
    assert lag.subspace.contains_subspace(iso)
    pts = [PhasePoint.from_bits(n, r) for r in lag.subspace.basis_rows]
    assert is_isotropic(pts)


def test_extend_full_lagrangian_is_identity():
    from pfrkit.oracle import enumerate_lagrangians

    for lag in enumerate_lagrangians(2)[:20]:
        assert extend_to_lagrangian(lag.subspace).subspace == lag.subspace
