from fractions import Fraction as Q

import pytest
from hypothesis import given, settings, strategies as st

from extalg import finite_core as fc
from extalg import module_props as mp
from extalg.errors import NotInvertible
from helpers import finite_ext, mixed_ext, num


def xy_ring():
    return finite_ext([[2, 1, [0, 0, 1]], [2, 1, [0, 0, 1]]], A=[[[0, 1], 0], [0, [0, 1]]]).A


def test_b_regular(z6, z_in_q):
    ext = fc.FiniteExtension(z6, z6)
    assert mp.is_B_regular(ext.A_in_B, ext)
    assert not mp.is_B_regular(ext.submodule([num(z6, 2)]), ext)
    assert mp.is_B_regular(z_in_q.ideal([6]))


def test_b_invertible(z_in_q, z_x_z6, diag_f2):
    v = mp.is_B_invertible(z_in_q.ideal([6]))
    assert v and v.payload.slots == (Q(1, 6),)
    assert not mp.is_B_invertible(diag_f2.submodule([]), diag_f2)
    tail = [z_x_z6.tail_B.one]
    v = mp.is_B_invertible(z_x_z6.ideal([12], tail))
    assert v and v.payload == z_x_z6.ideal([Q(1, 12)], tail)


def test_partition_of_unity(z_in_q, z6):
    ext = fc.FiniteExtension(z6, z6)
    assert mp.partition_of_unity(ext.A_in_B, ext).pairs == ((z6.one, z6.one),)
    for gens in ([6], [4, 6]):
        a = z_in_q.from_generators([((Q(g),), None) for g in gens])
        pou = mp.partition_of_unity(a)
        assert mp.verify_partition(pou, a)
    with pytest.raises(NotInvertible):
        mp.partition_of_unity(ext.submodule([num(z6, 2)]), ext)


def test_hand_made_certificate_accepted(z_in_q):
    a = z_in_q.from_generators([((Q(4),), None), ((Q(6),), None)])
    el = lambda q: ((Q(q),), None)
    pou = mp.PartitionOfUnity(((el(4), el(1)), (el(6), el(Q(-1, 2)))))
    assert mp.verify_partition(pou, a)


def test_locally_principal(z6, z_in_q):
    assert mp.is_locally_principal(z6.ideal([num(z6, 2)]))
    A = xy_ring()
    m = A.maximal_ideals()[0].ideal
    assert not mp.is_locally_principal(m)
    assert mp.is_locally_principal(z_in_q.ideal([12]))


def test_flat(z6, z4, z_in_q):
    assert mp.is_flat(z6.ideal([num(z6, 2)]))
    assert not mp.is_flat(z4.ideal([num(z4, 2)]))
    assert all(mp.is_flat(z_in_q.ideal([n])) for n in (1, 2, 12, 97))


def test_flatness_oracle(z6, z4):
    assert mp.flatness_oracle(z6.ideal([num(z6, 2)]))
    bad = mp.flatness_oracle(z4.ideal([num(z4, 2)]))
    assert not bad and bad.witness is not None
    assert mp.flatness_oracle(z4.zero_ideal)


def test_faithfully_flat(z6, z4, z_in_q):
    two = z6.ideal([num(z6, 2)])
    v = mp.is_faithfully_flat(two)
    assert not v and "maximal_with_am_eq_a" in v.witness
    assert mp.is_faithfully_flat(z_in_q.ideal([12]))
    assert not mp.is_faithfully_flat(z4.ideal([num(z4, 2)]))


def test_regular_ideal(z6, z_x_z6):
    assert not mp.is_regular_ideal(z6.ideal([num(z6, 2)]))
    v = mp.is_regular_ideal(z_x_z6.ideal([12], [z_x_z6.tail_B.one]))
    assert v and v.witness == {"element": {"slots": ["12"], "tail": [1, 1]}}
    assert mp.is_regular_ideal(z6.whole)


SMALL = [
    ([[2, 2, [0, 1]], [3, 1, [0, 1]]], []),
    ([[2, 3, [0, 1]]], []),
    ([[2, 1, [0, 0, 1]], [2, 1, [0, 0, 1]]], [[[0, 1], 0], [0, [0, 1]]]),
    ([[2, 1, [0, 0, 1]], [3, 1, [0, 0, 1]]], [[[0, 1], [0, 1]]]),
]


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(SMALL), st.data())
def test_flat_matches_oracle(ring, data):
    A = finite_ext(*ring).A
    a = data.draw(st.sampled_from(A.ideals()))
    assert bool(mp.is_flat(a)) == bool(mp.flatness_oracle(a))


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(SMALL), st.data())
def test_faithfully_flat_implies_locally_principal(ring, data):
    A = finite_ext(*ring).A
    a = data.draw(st.sampled_from(A.ideals()))
    if mp.is_faithfully_flat(a):
        assert mp.is_locally_principal(a)


@given(st.lists(st.integers(1, 500), min_size=1, max_size=4))
def test_mixed_invertible_iff_regular_and_flat(gens):
    ext = mixed_ext([{"flavor": "Z"}, {"flavor": "local", "p": 3}])
    a = ext.from_generators([((Q(g), Q(g + 1)), None) for g in gens])
    inv = mp.is_B_invertible(a)
    assert bool(inv) == bool(mp.is_B_regular(a) and mp.is_flat(a))
    if inv:
        assert mp.verify_partition(mp.partition_of_unity(a), a)
