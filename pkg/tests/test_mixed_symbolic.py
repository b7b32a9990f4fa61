from fractions import Fraction as Q

import pytest
from hypothesis import given, strategies as st

from extalg import mixed_symbolic as ms
from extalg.errors import InfiniteSupport, MixedOwners
from helpers import Z6_TAIL, mixed_ext


def full_tail(ext):
    return [ext.tail_B.one]


def test_number_helpers():
    assert ms.factorize(360) == {2: 3, 3: 2, 5: 1}
    assert ms.valuation(Q(12, 5), 2) == 2 and ms.valuation(Q(12, 5), 5) == -1
    assert ms.qgcd(Q(4), Q(6)) == 2 and ms.qgcd(Q(1, 2), Q(1, 3)) == Q(1, 6)
    assert ms.qlcm(Q(4), Q(6)) == 12


def test_flavor_canonical_forms():
    assert ms.Flavor("Z").canonical(Q(-12)) == 12
    assert ms.Flavor.local(2).canonical(Q(12)) == 4
    assert ms.Flavor.inverted([2]).canonical(Q(12)) == 3
    with pytest.raises(ValueError):
        ms.Flavor.local(4)


def test_colon_sum_product(z_in_q):
    I = lambda q: z_in_q.ideal([q])
    assert ms.mixed_colon(I(4), I(6)).slots == (Q(2, 3),)
    assert ms.mixed_sum(I(12), I(18)).slots == (Q(6),)
    assert ms.mixed_intersection(I(12), I(18)).slots == (Q(36),)
    assert ms.mixed_ideal_arithmetic("product", I(4), I(6)).slots == (Q(24),)


def test_tail_product_is_whole(z_x_z6):
    a = z_x_z6.ideal([12], full_tail(z_x_z6))
    u = z_x_z6.ideal([Q(1, 12)], full_tail(z_x_z6))
    assert a * u == z_x_z6.whole


def test_support(z_in_q, z_x_z6):
    assert [(M.slot, M.prime) for M in ms.mixed_support(z_in_q.ideal([12]))] == [(0, 2), (0, 3)]
    supp = ms.mixed_support(z_x_z6.ideal([30], full_tail(z_x_z6)))
    assert [(M.slot, M.prime) for M in supp] == [(0, 2), (0, 3), (0, 5)]
    assert ms.mixed_support(z_in_q.whole) == []
    with pytest.raises(InfiniteSupport):
        ms.mixed_support(z_in_q.ideal([0]))


def test_localize_ideal(z_in_q, z_x_z6):
    a = z_in_q.ideal([12])
    assert ms.mixed_localize_ideal(a, z_in_q.maximal_ideal(0, 2)).valuation == 2
    assert ms.mixed_localize_ideal(a, z_in_q.maximal_ideal(0, 5)).valuation == 0
    b = z_x_z6.ideal([12], full_tail(z_x_z6))
    for M in ms.tail_maximals(z_x_z6):
        loc = ms.mixed_localize_ideal(b, M)
        assert len(loc) == len(loc.carrier)


def test_localize_ring(z_in_q):
    assert ms.mixed_localize(z_in_q, z_in_q.maximal_ideal(0, 3)) == ms.Flavor.local(3)


def test_total_quotient_ring(z_x_z6):
    T = ms.total_quotient_ring(z_x_z6.A)
    assert T.tail_B == z_x_z6.A.tail and all(f.kind == "Z" for f in T.flavors)
    finite_only = mixed_ext([], Z6_TAIL)
    assert ms.total_quotient_ring(finite_only.A).tail_B == finite_only.A.tail


def test_tail_must_be_subring():
    A = mixed_ext([{"flavor": "Z"}]).A
    with pytest.raises(MixedOwners):
        ms.MixedExtension(A, mixed_ext([], Z6_TAIL).tail_B)


def test_from_generators(z_in_q):
    one = lambda q: ((Q(q),), None)
    assert z_in_q.from_generators([one(4), one(6)]).slots == (Q(2),)


pos = st.integers(1, 400)


@given(pos, pos, pos)
def test_integer_slot_arithmetic(a, b, c):
    ext = mixed_ext([{"flavor": "Z"}])
    I = lambda q: ext.ideal([q])
    assert (I(a) + I(b)).slots == (Q(ms.qgcd(Q(a), Q(b))),)
    assert I(a) * (I(b) + I(c)) == I(a) * I(b) + I(a) * I(c)
    assert ms.mixed_colon(I(a) * I(b), I(b)) == I(a)


@given(pos, pos, st.sampled_from([2, 3, 5]))
def test_local_slot_ideals_are_prime_powers(a, b, p):
    ext = mixed_ext([{"flavor": "local", "p": p}])
    s = (ext.ideal([a]) * ext.ideal([b])).slots[0]
    assert s == p ** ms.valuation(Q(a * b), p)
