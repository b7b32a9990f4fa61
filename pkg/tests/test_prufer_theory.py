from fractions import Fraction as Q

import pytest

from extalg import finite_core as fc
from extalg import prufer_theory as pt
from extalg.errors import NotComaximal, PartialAssignment
from helpers import Z6_TAIL, field, finite_ext, mixed_ext


def diag(p, n):
    return finite_ext([field(p)] * n, B="ambient")


# --- weak surjectivity, Prufer, almost Prufer --------------------------------------


@pytest.mark.parametrize("p", [2, 3, 5])
@pytest.mark.parametrize("n", [2, 3])
def test_diagonal_example(p, n):
    ext = diag(p, n)
    assert pt.is_almost_prufer(ext)
    ws = pt.is_weakly_surjective(ext)
    assert not ws and ws.witness["x"] == [1] + [0] * (n - 1)
    assert ws.witness["maximal"] == [[0] * n]
    assert not pt.is_prufer(ext)
    assert not pt.direct_weak_surjectivity(ext)
    assert pt.verify_theorem_2_1(ext)


@pytest.mark.parametrize("slots,tail", [
    ([{"flavor": "Z"}], None),
    ([{"flavor": "local", "p": 2}], None),
    ([{"flavor": "local", "p": 3}], None),
    ([{"flavor": "Z"}], Z6_TAIL),
])
def test_prufer_examples(slots, tail):
    ext = mixed_ext(slots, tail)
    assert pt.is_weakly_surjective(ext) and pt.is_prufer(ext) and pt.is_almost_prufer(ext)
    assert pt.verify_theorem_2_1(ext)
    assert pt.verify_main_theorem(ext)


def test_finite_main_theorem_is_vacuous(diag_f2):
    v = pt.verify_main_theorem(diag_f2)
    assert v and v.vacuous


def test_non_weakly_surjective_tail():
    ext = mixed_ext([{"flavor": "Z"}], {"ambient": [field(2), field(2)], "A": [], "B": "ambient"})
    assert not pt.is_weakly_surjective(ext) and not pt.is_prufer(ext)
    assert pt.is_almost_prufer(ext)


def test_weak_surjectivity_agrees_with_fraction_rings(z12):
    ext = fc.FiniteExtension(z12, z12)
    assert bool(pt.is_weakly_surjective(ext)) == bool(pt.direct_weak_surjectivity(ext))


# --- Manis pairs and valuations ----------------------------------------------------


def test_manis_pair_witness(z_in_q):
    v = pt.is_manis_pair(pt.MixedPair((pt.ms.Flavor(),), (Q(2),)), None, z_in_q)
    assert not v and v.witness == {"slot": 0, "x": "1/3"}
    assert pt.is_manis_pair(pt.MixedPair((pt.ms.Flavor.local(2),), (Q(2),)), None, z_in_q)


def test_manis_bruteforce_agrees():
    # the search returns an offending x, or None when the pair is Manis
    assert pt.slot_manis_bruteforce(pt.ms.Flavor(), Q(2)) == Q(1, 3)
    assert pt.slot_manis_bruteforce(pt.ms.Flavor.local(2), Q(2)) is None


def test_p_adic_valuation(z_in_q):
    v = pt.check_manis_valuation(pt.ManisValuationData(1, rule=("p-adic", 0, 2)), z_in_q)
    assert v
    assert v.payload.slot_rings == (pt.ms.Flavor.local(2),)


def test_valuation_on_finite_ring(diag_f2):
    B = diag_f2.B
    a = B.ambient
    table = {x: (pt.INF if x[0] == 0 else (0,)) for x in B.elements}
    v = pt.check_manis_valuation(pt.ManisValuationData(1, table), B)
    assert v
    A_v, p_v = v.payload
    assert set(A_v.elements) == set(B.elements) and p_v == {a.element([0, 0]), a.element([0, 1])}
    with pytest.raises(PartialAssignment):
        pt.check_manis_valuation(pt.ManisValuationData(1, {B.zero: pt.INF}), B)


def test_constant_valuation_rejected(diag_f2):
    B = diag_f2.B
    assert not pt.check_manis_valuation(pt.ManisValuationData(1, {x: (0,) for x in B.elements}), B)


# --- finite character and the i_F lemma -----------------------------------------------


def test_support_and_finite_character(z_x_z6):
    a = z_x_z6.ideal([30], [z_x_z6.tail_B.one])
    assert len(pt.support(a)) == 3
    assert pt.has_finite_character(z_x_z6)


def I(ext, n):
    return ext.ideal([n])


@pytest.mark.parametrize("family,expected", [([3], 4), ([4, 3], 1), ([2], 6)])
def test_i_F_values(z_in_q, family, expected):
    a = I(z_in_q, 12)
    F = pt.comaximal_family(a, [I(z_in_q, n) for n in family], z_in_q)
    assert pt.compute_i_F(a, F, z_in_q).ideal.slots == (Q(expected),)
    assert pt.verify_lemma_technical(a, F, z_in_q)


def test_i_F_with_whole_ring(z_in_q):
    a = I(z_in_q, 12)
    F = pt.comaximal_family(a, [z_in_q.whole], z_in_q)
    assert pt.compute_i_F(a, F, z_in_q).ideal == a


def test_i_F_repeated_members(z_in_q):
    a = I(z_in_q, 12)
    F = pt.comaximal_family(a, [I(z_in_q, 2)], z_in_q)
    assert pt.compute_i_F(a, F, z_in_q, allow_repeats=True).ideal.slots == (Q(3),)


def test_family_must_be_comaximal(z_in_q):
    a = I(z_in_q, 12)
    with pytest.raises(NotComaximal):
        pt.comaximal_family(a, [I(z_in_q, 2), I(z_in_q, 4)], z_in_q)
    with pytest.raises(NotComaximal):
        pt.comaximal_family(a, [I(z_in_q, 5)], z_in_q)


def test_lemma_on_finite_extension(z12):
    ext = fc.FiniteExtension(z12, z12)
    for a in z12.ideals():
        F = pt.comaximal_family(a, [z12.whole], ext)
        assert pt.verify_lemma_technical(a, F, ext)


# --- finite generation -------------------------------------------------------------------


def test_forced_a0_example(z_in_q):
    g = pt.construct_finite_generators(I(z_in_q, 12), z_in_q, a0=I(z_in_q, 24))
    assert [x[0][0] for x in g.generators] == [24, 36, 24]
    assert g.b.slots == (Q(12),) and g.equal


@pytest.mark.parametrize("n", [2, 12, 30, 60, 97])
def test_generators_reconstruct_ideal(z_x_z6, n):
    a = z_x_z6.ideal([n], [z_x_z6.tail_B.one])
    assert pt.construct_finite_generators(a, z_x_z6).equal


# --- Prufer ring corollary --------------------------------------------------------------------


def test_prufer_ring_corollary(z_in_q, z_x_z6):
    assert pt.verify_prufer_ring_corollary(z_in_q.A)
    assert pt.verify_prufer_ring_corollary(z_x_z6.A)


def test_finite_ring_is_its_own_total_quotient_ring():
    ext = mixed_ext([], {"ambient": [[2, 1, [0, 0, 1]], [2, 1, [0, 0, 1]]], "A": [[[0, 1], 0], [0, [0, 1]]]})
    v = pt.verify_prufer_ring_corollary(ext.A)
    assert v.name == "prufer_ring_corollary" and v.holds
