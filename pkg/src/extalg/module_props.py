"""Predicates on ideals and submodules of a ring extension.

Every predicate accepts ideals from either universe: a
:class:`~extalg.finite_core.Submodule` (finite rings) or a
:class:`~extalg.mixed_symbolic.MixedIdeal` (``Z^r x F`` rings).  Local
behaviour is read off :func:`local_views`, which yields one view per maximal
ideal that can behave differently; in the mixed universe all but finitely
many slot primes behave alike and are covered by one representative prime.
"""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from . import finite_core as fc
from . import mixed_symbolic as ms
from .errors import MixedOwners, NotInvertible, SizeCapExceeded

ORACLE_CAP = 36


@dataclass
class PropertyVerdict:
    name: str
    holds: bool
    witness: Any = None
    vacuous: bool = False
    evidence: dict = field(default_factory=dict)
    payload: Any = field(default=None, repr=False, compare=False)

    def __bool__(self):
        return self.holds

    def to_json(self) -> dict:
        out = {"name": self.name, "holds": self.holds}
        if self.witness is not None:
            out["witness"] = self.witness
        if self.vacuous:
            out["vacuous"] = True
        if self.evidence:
            out["evidence"] = self.evidence
        return out


@dataclass(frozen=True)
class PartitionOfUnity:
    """Pairs ``(alpha_i, z_i)`` with ``alpha_i in S``, ``z_i in [A:S]``, ``sum alpha_i z_i = 1``."""

    pairs: tuple


@dataclass(frozen=True)
class LocalView:
    maximal: Any          # JSON-ready description of the maximal ideal
    zero: bool
    principal: bool
    free: bool            # generated by one element with zero annihilator
    absorbed: bool        # a*m*A_m == a*A_m


def _finite_ideal(a: fc.Submodule) -> fc.Submodule:
    if a.is_ideal:
        return a
    A = a.owner
    if not a.elements <= A._members:
        raise MixedOwners("expected an ideal of A, got a submodule reaching outside A")
    return fc.Submodule(A, A, a.generators, a.elements)


def _fmt_ideal(I: fc.Submodule):
    return [I.carrier.fmt(x) for x in I.generators]


def _finite_view(I: fc.Submodule, P: fc.PrimeSpot, label) -> LocalView:
    L = fc.localize_submodule(I, P)
    Q = L.carrier
    g = fc.principal_generator(L)
    free = g is not None and Q.annihilator(g) == frozenset([Q.zero])
    mL = fc.localize_submodule(P.ideal, P)
    absorbed = fc.module_product(L, mL).elements == L.elements
    return LocalView(label, L.elements == frozenset([Q.zero]), g is not None, free, absorbed)


def local_views(a) -> list:
    """Localizations of an ideal of ``A`` at a covering set of maximal ideals."""
    if isinstance(a, fc.Submodule):
        I = _finite_ideal(a)
        return [_finite_view(I, P, _fmt_ideal(P.ideal)) for P in I.owner.maximal_ideals()]
    ext = a.ext
    views = []
    for i, (f, q) in enumerate(zip(ext.flavors, a.slots)):
        if q is ms.WHOLE or q.denominator != 1:
            raise MixedOwners("local views are defined for integral ideals")
        if q == 0:
            primes = list(itertools.islice(f.admissible_primes(), 1))
        else:
            special = [p for p in sorted(ms.factorize(q.numerator)) if f.admits(p)]
            generic = next((p for p in f.admissible_primes() if q.numerator % p), None)
            primes = special + ([generic] if generic is not None else [])
        for p in primes:
            label = {"slot": i, "prime": p}
            if q == 0:
                views.append(LocalView(label, True, True, False, True))
            else:
                views.append(LocalView(label, False, True, True, False))
    if a.tail is not None:
        I = a.tail_ideal
        for P in ext.A.tail.maximal_ideals():
            views.append(_finite_view(I, P, {"tail": _fmt_ideal(P.ideal)}))
    return views


def is_locally_principal(a) -> PropertyVerdict:
    for v in local_views(a):
        if not v.principal:
            return PropertyVerdict("locally_principal", False, {"maximal": v.maximal})
    return PropertyVerdict("locally_principal", True)


def is_flat(a) -> PropertyVerdict:
    """Over an artinian local ring a finitely generated flat ideal is 0 or free of rank one."""
    for v in local_views(a):
        if not (v.zero or v.free):
            return PropertyVerdict("flat", False, {"maximal": v.maximal})
    return PropertyVerdict("flat", True)


def is_faithfully_flat(a) -> PropertyVerdict:
    flat = is_flat(a)
    if not flat:
        return PropertyVerdict("faithfully_flat", False, {"not_flat": flat.witness})
    for v in local_views(a):
        if v.absorbed:
            return PropertyVerdict("faithfully_flat", False, {"maximal_with_am_eq_a": v.maximal})
    return PropertyVerdict("faithfully_flat", True)


def is_regular_element(A, x) -> bool:
    if isinstance(A, ms.MixedExtension):
        return ms.is_regular_element(A, x)
    return not A.is_zero_divisor(x)


def is_regular_ideal(a) -> PropertyVerdict:
    """True iff ``a`` contains a non-zero-divisor of ``A``."""
    if isinstance(a, fc.Submodule):
        I = _finite_ideal(a)
        A = I.owner
        for x in I.sorted_elements:
            if not A.is_zero_divisor(x):
                return PropertyVerdict("regular", True, {"element": A.fmt(x)})
        return PropertyVerdict("regular", False)
    ext = a.ext
    if any(q == 0 for q in a.slots):
        return PropertyVerdict("regular", False)
    t = None
    if a.tail is not None:
        I = a.tail_ideal
        t = next((x for x in I.sorted_elements if not I.owner.is_zero_divisor(x)), None)
        if t is None:
            return PropertyVerdict("regular", False)
    x = (tuple(a.slots), t)
    return PropertyVerdict("regular", True, {"element": ext.fmt_element(x)})


# --- B-regularity and invertibility -------------------------------------------------------


def _express(carrier, terms, target):
    """Labels of terms whose values sum to ``target``, via BFS over their additive span."""
    uniq = {}
    for value, label in terms:
        uniq.setdefault(value, label)
    terms = list(uniq.items())
    prev = {carrier.zero: None}
    queue = deque([carrier.zero])
    while queue and target not in prev:
        v = queue.popleft()
        for value, label in terms:
            w = carrier.add(v, value)
            if w not in prev:
                prev[w] = (v, label)
                queue.append(w)
    if target not in prev:
        return None
    out = []
    v = target
    while prev[v] is not None:
        v, label = prev[v]
        out.append(label)
    out.reverse()
    return out


def _lift(S: fc.Submodule, ext: fc.FiniteExtension) -> fc.Submodule:
    if S.carrier == ext.B:
        return S
    return fc.Submodule(ext.A, ext.B, S.generators, S.elements)


def _ext_of(S, ext):
    if ext is not None:
        return ext
    if isinstance(S, ms.MixedIdeal):
        return S.ext
    return fc.FiniteExtension(S.owner, S.carrier)


def is_B_regular(S, ext=None) -> PropertyVerdict:
    """``S*B == B``; on success the witness is a combination ``sum s_i b_i = 1``."""
    ext = _ext_of(S, ext)
    if isinstance(S, ms.MixedIdeal):
        if any(q is not ms.WHOLE and q == 0 for q in S.slots):
            return PropertyVerdict("B_regular", False, {"zero_slot": [i for i, q in enumerate(S.slots) if q == 0]})
        if S.tail is not None:
            tail = is_B_regular(S.tail, ext.tail_ext)
            if not tail:
                return PropertyVerdict("B_regular", False, {"tail": tail.witness})
        return PropertyVerdict("B_regular", True)
    S = _lift(S, ext)
    B = ext.B
    prod = fc.module_product(S, ext.B_module)
    if prod.elements != B._members:
        return PropertyVerdict("B_regular", False, {"SB_order": len(prod), "B_order": len(B)})
    combo = _express(B, [(B.mul(s, b), (s, b)) for s in S.generators for b in B.elements], B.one)
    return PropertyVerdict("B_regular", True,
                           {"combination": [[B.fmt(s), B.fmt(b)] for s, b in combo]}, payload=combo)


def inverse_candidate(S, ext=None):
    """``[A :_B S]``, the only possible inverse of ``S``."""
    ext = _ext_of(S, ext)
    if isinstance(S, ms.MixedIdeal):
        return ms.mixed_colon(ext.whole, S)
    return fc.colon(ext.A_in_B, _lift(S, ext))


def is_B_invertible(S, ext=None) -> PropertyVerdict:
    ext = _ext_of(S, ext)
    U = inverse_candidate(S, ext)
    if isinstance(S, ms.MixedIdeal):
        holds = ms.mixed_product(S, U) == ext.whole
        desc = U.describe()
    else:
        holds = fc.module_product(_lift(S, ext), U).elements == ext.A._members
        desc = [ext.B.fmt(x) for x in U.generators]
    if holds:
        return PropertyVerdict("B_invertible", True, evidence={"inverse": desc}, payload=U)
    return PropertyVerdict("B_invertible", False, {"SU_differs_from_A": True}, payload=U)


def partition_of_unity(S, ext=None) -> PartitionOfUnity:
    """Explicit certificate ``1 = sum alpha_i z_i`` for an invertible ``S``."""
    ext = _ext_of(S, ext)
    inv = is_B_invertible(S, ext)
    if not inv:
        raise NotInvertible("partition of unity requires a B-invertible submodule")
    U = inv.payload
    if isinstance(S, ms.MixedIdeal):
        return _mixed_partition(S, U, ext)
    S = _lift(S, ext)
    B = ext.B
    combo = _express(B, [(B.mul(s, u), (s, u)) for s in S.generators for u in sorted(U.elements)], B.one)
    return PartitionOfUnity(tuple(combo))


def _mixed_partition(S: ms.MixedIdeal, U: ms.MixedIdeal, ext: ms.MixedExtension) -> PartitionOfUnity:
    gens = list(S.generators)
    n = len(gens)
    z_slots = [[Fraction(0)] * ext.r for _ in range(n)]
    for i in range(ext.r):
        g, coeffs = ms.bezout([x[0][i] for x in gens])
        for j, c in enumerate(coeffs):
            z_slots[j][i] = Fraction(c) / g
    z_tail = [None] * n
    if ext.tail_B is not None:
        Bt = ext.tail_B
        terms = [(Bt.mul(x[1], u), (j, u)) for j, x in enumerate(gens) for u in sorted(U.tail.elements)]
        combo = _express(Bt, terms, Bt.one)
        z_tail = [Bt.zero] * n
        for j, u in combo:
            z_tail[j] = Bt.add(z_tail[j], u)
    pairs = tuple((gens[j], (tuple(z_slots[j]), z_tail[j])) for j in range(n))
    return PartitionOfUnity(pairs)


def verify_partition(pou: PartitionOfUnity, S, ext=None) -> bool:
    """Re-check membership of every pair and the exact sum."""
    ext = _ext_of(S, ext)
    if isinstance(S, ms.MixedIdeal):
        total = ext.zero
        for alpha, z in pou.pairs:
            if not _mixed_member(S, alpha):
                return False
            for g in S.generators:
                if not ext.in_A(ext.mul(z, g)):
                    return False
            total = ext.add(total, ext.mul(alpha, z))
        return total == ext.one
    S = _lift(S, ext)
    A, B = ext.A, ext.B
    total = B.zero
    for alpha, z in pou.pairs:
        if alpha not in S or any(B.mul(z, s) not in A for s in S.generators):
            return False
        total = B.add(total, B.mul(alpha, z))
    return total == B.one


def _mixed_member(S: ms.MixedIdeal, x) -> bool:
    ext = S.ext
    for f, q, v in zip(ext.flavors, S.slots, x[0]):
        if q is ms.WHOLE:
            continue
        if q == 0:
            if v != 0:
                return False
        elif not f.contains(Fraction(v) / q):
            return False
    return S.tail is None or x[1] in S.tail


# --- brute-force flatness oracle -----------------------------------------------------------


class _Power:
    """``R^n`` with componentwise addition, for additive spans of relation vectors."""

    def __init__(self, R, n):
        self.R, self.n = R, n
        self.zero = tuple(R.zero for _ in range(n))

    def add(self, x, y):
        add = self.R.add
        return tuple(add(a, b) for a, b in zip(x, y))

    def scale(self, c, x):
        mul = self.R.mul
        return tuple(mul(c, a) for a in x)


def flatness_oracle(a, cap: int = ORACLE_CAP) -> PropertyVerdict:
    """Decide flatness by checking injectivity of ``a ⊗ b -> a`` for every ideal ``b``.

    ``a`` is presented as ``A^n / R`` with ``R`` the full relation module, so
    ``a ⊗ b = b^n / (R b)``; the map is injective iff the kernel of
    ``b^n -> ab`` (of order ``|b|^n / |ab|``) equals the span of ``R b``.
    """
    I = _finite_ideal(a) if isinstance(a, fc.Submodule) else None
    if I is None:
        raise TypeError("the flatness oracle works on finite rings only")
    A = I.owner
    if len(A) > cap:
        raise SizeCapExceeded(f"oracle cap {cap} is below ring order {len(A)}")
    if len(I) == 1:
        return PropertyVerdict("flatness_oracle", True, evidence={"zero_module": True})
    gens = min((tuple(I.generators), fc.minimal_generators(I)), key=len)
    n = len(gens)
    V = _Power(A, n)
    mul, add = A.mul, A.add
    relations = _relations(A, gens)
    rel_gens, span = [], {V.zero}
    for r in relations:
        if r not in span:
            rel_gens.append(r)
            span = fc.additive_span(V, (V.scale(c, r) for c in A.additive_generators), start=span)
    for b in A.ideals():
        ab = fc.module_product(I, b)
        kernel_order = len(b) ** n // len(ab)
        image = fc.additive_span(
            V, (V.scale(c, V.scale(beta, r)) for r in rel_gens for beta in b.generators
                for c in A.additive_generators))
        if len(image) != kernel_order:
            witness = _oracle_witness(A, gens, b, image)
            return PropertyVerdict(
                "flatness_oracle", False,
                {"ideal_b": _fmt_ideal(b), "tensor": [A.fmt(x) for x in witness],
                 "generators": [A.fmt(g) for g in gens]})
    return PropertyVerdict("flatness_oracle", True, evidence={"generators": len(gens)})


def _half_sums(A, cols) -> dict:
    """Map each value of ``sum r_i g_i`` over the given columns to its coefficient tuples."""
    table = {A.zero: [()]}
    for col in cols:
        nxt = {}
        for s, tuples in table.items():
            for r, v in col.items():
                nxt.setdefault(A.add(s, v), []).extend(t + (r,) for t in tuples)
        table = nxt
    return table


def _relations(A, gens) -> list:
    """All ``r`` in ``A^n`` with ``sum r_i g_i = 0``, joined from two half-sum tables."""
    cols = [{r: A.mul(r, g) for r in A.elements} for g in gens]
    k = len(gens) // 2
    left, right = _half_sums(A, cols[:k]), _half_sums(A, cols[k:])
    out = []
    for s, rights in right.items():
        lefts = left.get(A.sub(A.zero, s))
        if lefts:
            out.extend(l + r for l in lefts for r in rights)
    out.sort()
    return out


def _oracle_witness(A, gens, b, image):
    """A vector of ``b^n`` mapping to 0 in ``ab`` but outside the relation span: a nonzero tensor."""
    for beta in itertools.product(b.sorted_elements, repeat=len(gens)):
        s = A.zero
        for g, x in zip(gens, beta):
            s = A.add(s, A.mul(g, x))
        if s == A.zero and beta not in image:
            return beta
    raise AssertionError("kernel/relation orders differ but no witness found")
