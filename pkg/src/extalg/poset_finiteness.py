"""Finite posets with a distinguished subset, the three order hypotheses, and the
bridge to posets of proper B-regular ideals.

Elements are opaque labels interned to indices; order relations are stored as
bitmasks of the up-set and down-set of each element.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

from . import finite_core as fc
from . import mixed_symbolic as ms
from .errors import BoundTooSmall, EmptyGamma, HypothesesFail, InvalidPoset
from .module_props import PropertyVerdict, is_B_regular

FINITE_NOTE = ("finite-instance check: on a finite poset both sides are finite, "
               "so this confirms the counting machinery rather than the infinite statement")


@dataclass(frozen=True)
class FinitePoset:
    labels: tuple
    up: tuple          # up[i]: bitmask of j with i <= j
    gamma: frozenset   # indices

    def __post_init__(self):
        n = len(self.labels)
        if len(set(self.labels)) != n:
            raise InvalidPoset("duplicate element labels")
        for i in range(n):
            if not self.up[i] >> i & 1:
                raise InvalidPoset(f"{self.labels[i]} is not <= itself")
            for j in _bits(self.up[i]):
                if j != i and self.up[j] >> i & 1:
                    raise InvalidPoset(f"{self.labels[i]} and {self.labels[j]} are mutually <=")
                if self.up[j] & ~self.up[i]:
                    raise InvalidPoset(f"order is not transitive through {self.labels[j]}")
        if not all(0 <= g < n for g in self.gamma):
            raise InvalidPoset("gamma refers to unknown elements")

    @classmethod
    def from_covers(cls, labels: Sequence, covers: Iterable, gamma: Iterable | None = None):
        """``covers`` lists pairs ``(x, y)`` meaning ``x < y``; the closure is taken here."""
        labels = tuple(labels)
        index = _intern(labels)
        n = len(labels)
        succ = [set() for _ in range(n)]
        for pair in covers:
            x, y = pair
            if x not in index or y not in index:
                raise InvalidPoset(f"cover ({x}, {y}) names an unknown element")
            if x == y:
                raise InvalidPoset(f"cover ({x}, {y}) is not strict")
            succ[index[x]].add(index[y])
        up = [None] * n
        state = [0] * n  # 0 new, 1 on stack, 2 done

        def visit(i):
            if state[i] == 1:
                raise InvalidPoset(f"covers contain a cycle through {labels[i]}")
            if state[i] == 2:
                return up[i]
            state[i] = 1
            mask = 1 << i
            for j in sorted(succ[i]):
                mask |= visit(j)
            state[i] = 2
            up[i] = mask
            return mask

        for i in range(n):
            visit(i)
        g = labels if gamma is None else tuple(gamma)
        if any(x not in index for x in g):
            raise InvalidPoset("gamma names an unknown element")
        return cls(labels, tuple(up), frozenset(index[x] for x in g))

    @classmethod
    def from_relation(cls, labels: Sequence, leq, gamma: Iterable | None = None):
        """Build from a predicate ``leq(x, y)``; validity is checked on the full table."""
        labels = tuple(labels)
        index = _intern(labels)
        up = tuple(sum(1 << j for j, y in enumerate(labels) if leq(x, y)) for x in labels)
        g = labels if gamma is None else tuple(gamma)
        return cls(labels, up, frozenset(index[x] for x in g))

    @property
    def size(self) -> int:
        return len(self.labels)

    @property
    def gamma_mask(self) -> int:
        return sum(1 << g for g in self.gamma)

    def index(self, label) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise InvalidPoset(f"unknown element {label!r}") from None

    def leq(self, x, y) -> bool:
        return bool(self.up[self.index(x)] >> self.index(y) & 1)

    @property
    def down(self) -> tuple:
        n = self.size
        return tuple(sum(1 << i for i in range(n) if self.up[i] >> j & 1) for j in range(n))

    def describe(self):
        return {"elements": list(self.labels),
                "gamma": [self.labels[g] for g in sorted(self.gamma)]}


def _intern(labels) -> dict:
    index = {}
    for i, x in enumerate(labels):
        if x in index:
            raise InvalidPoset(f"duplicate element label {x!r}")
        index[x] = i
    return index


def _bits(mask: int):
    i = 0
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


def _max_indices(P: FinitePoset) -> list:
    return [i for i in range(P.size) if P.up[i] == 1 << i]


def maximal_elements(P: FinitePoset) -> list:
    return [P.labels[i] for i in _max_indices(P)]


def are_comaximal(P: FinitePoset, x, y) -> bool:
    """No element lies above both."""
    return P.up[P.index(x)] & P.up[P.index(y)] == 0


def _comax(P, i, j) -> bool:
    return P.up[i] & P.up[j] == 0


def _candidates(P: FinitePoset, above) -> list:
    base = P.up[P.index(above)] if above is not None else (1 << P.size) - 1
    return [i for i in sorted(P.gamma) if base >> i & 1]


def comaximal_subsets(P: FinitePoset, above=None) -> list:
    """Inclusion-maximal pairwise comaximal subsets of Γ among elements ``>= above``.

    Bron-Kerbosch with pivoting on the comaximality graph.
    """
    cand = _candidates(P, above)
    nbr = {i: {j for j in cand if j != i and _comax(P, i, j)} for i in cand}
    out = []

    def expand(R, Pset, Xset):
        if not Pset and not Xset:
            out.append(tuple(sorted(R)))
            return
        pivot = max(Pset | Xset, key=lambda u: (len(nbr[u] & Pset), -u))
        for v in sorted(Pset - nbr[pivot]):
            expand(R | {v}, Pset & nbr[v], Xset & nbr[v])
            Pset = Pset - {v}
            Xset = Xset | {v}

    if cand:
        expand(set(), set(cand), set())
    return sorted([P.labels[i] for i in c] for c in out)


def brute_force_comaximal_subsets(P: FinitePoset, above=None) -> list:
    """Power-set filter; only meant for small posets."""
    cand = _candidates(P, above)
    if len(cand) > 15:
        raise ValueError("brute force is limited to 15 candidates")
    good = []
    for r in range(1, len(cand) + 1):
        for combo in itertools.combinations(cand, r):
            if all(_comax(P, i, j) for i, j in itertools.combinations(combo, 2)):
                good.append(frozenset(combo))
    maximal = [s for s in good if not any(s < t for t in good)]
    return sorted([P.labels[i] for i in sorted(s)] for s in maximal)


def check_hypotheses(P: FinitePoset) -> tuple:
    """Verdicts for (a) maximal elements above everything, (b) Γ-interpolation, (c) Γ-refinement."""
    if not P.gamma:
        raise EmptyGamma("the distinguished subset is empty")
    L = P.labels
    maxmask = sum(1 << i for i in _max_indices(P))
    va = PropertyVerdict("hypothesis_a", True, evidence={"maximal_elements": len(_max_indices(P))})
    for x in range(P.size):
        if not P.up[x] & maxmask:
            va = PropertyVerdict("hypothesis_a", False, {"x": L[x]})
            break

    down = P.down
    gmask = P.gamma_mask
    gam = sorted(P.gamma)
    vb = PropertyVerdict("hypothesis_b", True)
    for a1, a2 in itertools.combinations_with_replacement(gam, 2):
        common = P.up[a1] & P.up[a2]
        between = common & gmask
        bad = next((b for b in _bits(common) if not between & down[b]), None)
        if bad is not None:
            vb = PropertyVerdict("hypothesis_b", False, {"a1": L[a1], "a2": L[a2], "b": L[bad]})
            break

    vc = PropertyVerdict("hypothesis_c", True)
    pairs = 0
    for b1, b2 in itertools.combinations(range(P.size), 2):
        if not _comax(P, b1, b2):
            continue
        pairs += 1
        lows1 = list(_bits(down[b1] & gmask))
        lows2 = list(_bits(down[b2] & gmask))
        if not any(_comax(P, x, y) for x in lows1 for y in lows2):
            vc = PropertyVerdict("hypothesis_c", False, {"b1": L[b1], "b2": L[b2]})
            break
    vc.evidence["comaximal_pairs"] = pairs
    return va, vb, vc


def check_equivalence(P: FinitePoset) -> PropertyVerdict:
    """Count maximal elements above each ``a`` in Γ and the comaximal Γ-subsets above it."""
    hyp = check_hypotheses(P)
    failed = [v.name for v in hyp if not v]
    if failed:
        raise HypothesesFail(f"hypotheses fail: {', '.join(failed)}")
    maxes = set(_max_indices(P))
    rows = []
    for a in sorted(P.gamma):
        above_max = [P.labels[i] for i in sorted(maxes) if P.up[a] >> i & 1]
        subsets = comaximal_subsets(P, P.labels[a])
        rows.append({"a": P.labels[a], "maximal_above": above_max, "count": len(above_max),
                     "comaximal_subsets": len(subsets),
                     "max_comaximal_size": max((len(s) for s in subsets), default=0)})
    side_i = side_ii = True  # finite poset: both sets are finite
    return PropertyVerdict("poset_equivalence", side_i == side_ii,
                           evidence={"side_i": side_i, "side_ii": side_ii, "rows": rows,
                                     "scope": FINITE_NOTE})


# --- the ideal-poset bridge -------------------------------------------------------------------


@dataclass
class RegularIdealPoset:
    poset: FinitePoset
    ideals: list
    hypotheses: tuple = ()
    claims: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    def to_json(self):
        return {"poset": self.poset.describe(),
                "hypotheses": [v.to_json() for v in self.hypotheses],
                "claims": {k: v.to_json() for k, v in self.claims.items()},
                "notes": self.notes}


def _mixed_contains(big, small) -> bool:
    for f, q, s in zip(big.ext.flavors, big.slots, small.slots):
        if s == 0:
            continue
        if q == 0 or not f.contains(s / q):
            return False
    return big.tail is None or small.tail.elements <= big.tail.elements


def _has_proper_regular(ext) -> bool:
    if isinstance(ext, fc.FiniteExtension):
        return False
    return any(f.kind != "Q" for f in ext.flavors)


def _unique_labels(ideals) -> list:
    out, seen = [], {}
    for I in ideals:
        lab = I.label()
        if lab in seen:
            seen[lab] += 1
            lab = f"{lab}#{seen[lab]}"
        else:
            seen[lab] = 0
        out.append(lab)
    return out


def build_regular_ideal_poset(ext, bound: int = 60) -> RegularIdealPoset:
    """Ω = proper B-regular ideals (bounded), ordered by inclusion; Γ = Ω (all finitely generated)."""
    if isinstance(ext, fc.FiniteExtension):
        omega = [I for I in ext.A.ideals()
                 if len(I) < len(ext.A) and is_B_regular(I, ext)]
        if omega:
            labels = [str([ext.A.fmt(x) for x in I.generators]) for I in omega]
            P = FinitePoset.from_relation(
                labels, lambda x, y: omega[labels.index(x)].elements <= omega[labels.index(y)].elements)
            return RegularIdealPoset(P, omega, check_hypotheses(P))
        P = FinitePoset((), (), frozenset())
        return RegularIdealPoset(P, [], (), {}, ["no proper B-regular ideals; order-theoretic check skipped"])
    nums = list(range(0, bound + 1))
    omega = [I for I in ms.ideal_sweep(ext, nums)
             if I != ext.whole and is_B_regular(I, ext)]
    if not omega:
        if _has_proper_regular(ext):
            raise BoundTooSmall(f"no proper B-regular ideal with numerators <= {bound}")
        P = FinitePoset((), (), frozenset())
        return RegularIdealPoset(P, [], (), {}, ["no proper B-regular ideals; order-theoretic check skipped"])
    labels = _unique_labels(omega)
    idx = {lab: i for i, lab in enumerate(labels)}
    P = FinitePoset.from_relation(labels, lambda x, y: _mixed_contains(omega[idx[y]], omega[idx[x]]))
    out = RegularIdealPoset(P, omega, check_hypotheses(P), notes=[FINITE_NOTE])
    out.claims["max_is_max_spec"] = _claim_max(P, omega, ext)
    out.claims["sum_interpolates"] = _claim_sum(P, omega, ext)
    out.claims["refinement_construction"] = _claim_refinement(P, omega, ext)
    return out


def _is_maximal_ideal(I, ext) -> bool:
    try:
        supp = ms.mixed_support(I)
    except Exception:
        return False
    return len(supp) == 1 and supp[0].as_ideal(ext) == I


def _claim_max(P, omega, ext) -> PropertyVerdict:
    poset_max = set(_max_indices(P))
    ring_max = {i for i, I in enumerate(omega) if _is_maximal_ideal(I, ext)}
    if poset_max == ring_max:
        return PropertyVerdict("max_is_max_spec", True, evidence={"count": len(ring_max)})
    diff = sorted(poset_max ^ ring_max)
    return PropertyVerdict("max_is_max_spec", False, {"element": P.labels[diff[0]]})


def _claim_sum(P, omega, ext) -> PropertyVerdict:
    """For ``a1, a2 <= b`` in Ω the sum ``a1 + a2`` lies in Ω and between them."""
    down = P.down
    checked = 0
    for i, j in itertools.combinations(range(P.size), 2):
        common = P.up[i] & P.up[j]
        if not common:
            continue
        s = ms.mixed_sum(omega[i], omega[j])
        for b in _bits(common):
            checked += 1
            ok = (s != ext.whole and is_B_regular(s, ext).holds
                  and _mixed_contains(omega[b], s) and _mixed_contains(s, omega[i])
                  and _mixed_contains(s, omega[j]))
            if not ok:
                return PropertyVerdict("sum_interpolates", False,
                                       {"a1": P.labels[i], "a2": P.labels[j], "b": P.labels[b]})
    return PropertyVerdict("sum_interpolates", True, evidence={"triples": checked})


def _claim_refinement(P, omega, ext) -> PropertyVerdict:
    """For comaximal ``b1, b2``: ``b_i' = (beta_i, regular generators of b_i)`` are comaximal, regular, inside ``b_i``."""
    from .prufer_theory import _mixed_comaximal_pair

    checked = 0
    example = None
    for i, j in itertools.combinations(range(P.size), 2):
        if not _comax(P, i, j):
            continue
        b1, b2 = omega[i], omega[j]
        hit = _mixed_comaximal_pair(b1, b2, ext)
        if hit is None:
            return PropertyVerdict("refinement_construction", False,
                                   {"b1": P.labels[i], "b2": P.labels[j], "reason": "sum is not A"})
        beta1, beta2 = hit
        r1 = ext.from_generators([beta1, *b1.generators])
        r2 = ext.from_generators([beta2, *b2.generators])
        checked += 1
        ok = (_mixed_contains(b1, r1) and _mixed_contains(b2, r2)
              and is_B_regular(r1, ext).holds and is_B_regular(r2, ext).holds
              and ms.mixed_sum(r1, r2) == ext.whole)
        if not ok:
            return PropertyVerdict("refinement_construction", False,
                                   {"b1": P.labels[i], "b2": P.labels[j]})
        if example is None:
            example = {"b1": P.labels[i], "b2": P.labels[j],
                       "beta1": ext.fmt_element(beta1), "beta2": ext.fmt_element(beta2),
                       "b1_refined": r1.describe(), "b2_refined": r2.describe()}
    return PropertyVerdict("refinement_construction", True,
                           evidence={"pairs": checked, "example": example})
