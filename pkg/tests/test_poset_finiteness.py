import random

import pytest
from hypothesis import given, settings, strategies as st

from extalg import poset_finiteness as pf
from extalg.errors import BoundTooSmall, EmptyGamma, HypothesesFail, InvalidPoset
from helpers import Z6_TAIL, mixed_ext


def divisors_of_60():
    divs = [d for d in range(2, 61) if 60 % d == 0]
    return pf.FinitePoset.from_relation([f"{d}Z" for d in divs],
                                        lambda x, y: int(x[:-1]) % int(y[:-1]) == 0)


def test_divisor_poset():
    P = divisors_of_60()
    assert pf.maximal_elements(P) == ["2Z", "3Z", "5Z"]
    assert all(pf.check_hypotheses(P))
    rows = {r["a"]: r for r in pf.check_equivalence(P).evidence["rows"]}
    assert rows["30Z"]["maximal_above"] == ["2Z", "3Z", "5Z"]
    assert rows["30Z"]["count"] == 3 and rows["30Z"]["max_comaximal_size"] == 3


def test_chain_and_antichain():
    chain = pf.FinitePoset.from_covers("abc", [("a", "b"), ("b", "c")])
    row = pf.check_equivalence(chain).evidence["rows"][0]
    assert row["a"] == "a" and row["count"] == 1 and row["max_comaximal_size"] == 1
    anti = pf.FinitePoset.from_covers("abc", [])
    for row in pf.check_equivalence(anti).evidence["rows"]:
        assert row["maximal_above"] == [row["a"]] and row["max_comaximal_size"] == 1


def test_singleton():
    P = pf.FinitePoset.from_covers(["a"], [])
    assert all(pf.check_hypotheses(P)) and pf.check_equivalence(P)


def test_hypothesis_b_violation():
    P = pf.FinitePoset.from_covers(["a1", "a2", "b"], [("a1", "b"), ("a2", "b")], ["a1", "a2"])
    a, b, c = pf.check_hypotheses(P)
    assert a and c and not b
    assert b.witness == {"a1": "a1", "a2": "a2", "b": "b"}
    with pytest.raises(HypothesesFail):
        pf.check_equivalence(P)


def test_invalid_inputs():
    with pytest.raises(InvalidPoset):
        pf.FinitePoset.from_covers("ab", [("a", "b"), ("b", "a")])
    with pytest.raises(EmptyGamma):
        pf.check_hypotheses(pf.FinitePoset.from_covers("ab", [], []))


def random_poset(rng, n):
    labels = [str(i) for i in range(n)]
    covers = [(labels[i], labels[j]) for i in range(n) for j in range(i + 1, n) if rng.random() < 0.25]
    gamma = [x for x in labels if rng.random() < 0.7] or labels[:1]
    return pf.FinitePoset.from_covers(labels, covers, gamma)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 15), st.integers(0, 10**6))
def test_comaximal_enumeration_matches_brute_force(n, seed):
    P = random_poset(random.Random(seed), n)
    for a in [None] + [P.labels[i] for i in sorted(P.gamma)]:
        assert pf.comaximal_subsets(P, a) == pf.brute_force_comaximal_subsets(P, a)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 12), st.integers(0, 10**6))
def test_equivalence_never_disagrees(n, seed):
    P = random_poset(random.Random(seed), n)
    if all(pf.check_hypotheses(P)):
        assert pf.check_equivalence(P)


def test_ideal_poset_z_in_q(z_in_q):
    R = pf.build_regular_ideal_poset(z_in_q, 60)
    assert R.poset.size == 59 and len(R.poset.gamma) == 59
    assert all(R.hypotheses) and all(R.claims.values())
    assert set(R.claims) == {"max_is_max_spec", "sum_interpolates", "refinement_construction"}


def test_ideal_poset_with_tail():
    ext = mixed_ext([{"flavor": "Z"}], Z6_TAIL)
    R = pf.build_regular_ideal_poset(ext, 30)
    assert R.poset.size == 29 and all(R.hypotheses) and all(R.claims.values())


def test_ideal_poset_of_finite_extension(diag_f2):
    R = pf.build_regular_ideal_poset(diag_f2, 60)
    assert R.poset.size == 0 and R.notes


def test_bound_too_small():
    with pytest.raises(BoundTooSmall):
        pf.build_regular_ideal_poset(mixed_ext([{"flavor": "local", "p": 5}]), 4)
