"""The symbolic universe ``Z_S1 x ... x Z_Sr x F`` inside ``Q^r x F'``.

Each integer slot is a localization of ``Z`` (``Z`` itself, ``Z_(p)``, or
``Z`` with finitely many primes inverted), so every fractional ideal of a
slot is ``q * Z_S`` for one canonical non-negative rational ``q``.  The
whole slot ``Q`` of the ambient ring is represented by ``WHOLE``.  The tail
is an explicit finite extension handled by :mod:`extalg.finite_core`.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import gcd
from typing import Iterable, Iterator, Sequence

from . import finite_core as fc
from .errors import (
    FactorBoundExceeded,
    InfiniteSupport,
    MixedOwners,
    NotIntegral,
    NotMaximal,
)

FACTOR_BOUND = 10**6
WHOLE = None  # the slot value standing for all of Q


def factorize(n: int, bound: int = FACTOR_BOUND) -> dict:
    """Trial division; refuses inputs whose cofactor cannot be certified under ``bound``."""
    n = abs(int(n))
    if n == 0:
        raise ValueError("cannot factor 0")
    out = {}
    d = 2
    while d * d <= n:
        if d > bound:
            raise FactorBoundExceeded(f"cofactor {n} needs trial division beyond {bound}")
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def valuation(q: Fraction, p: int) -> int:
    if q == 0:
        raise ValueError("valuation of 0 is infinite")
    v = 0
    num, den = q.numerator, q.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def qgcd(a: Fraction, b: Fraction) -> Fraction:
    a, b = Fraction(a), Fraction(b)
    return Fraction(gcd(a.numerator * b.denominator, b.numerator * a.denominator),
                    a.denominator * b.denominator)


def qlcm(a: Fraction, b: Fraction) -> Fraction:
    if a == 0 or b == 0:
        return Fraction(0)
    return abs(Fraction(a) * Fraction(b)) / qgcd(a, b)


def egcd(a: int, b: int):
    """Return ``(g, x, y)`` with ``a*x + b*y = g = gcd(a, b)``."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        t = a // b
        a, b = b, a - t * b
        x0, x1 = x1, x0 - t * x1
        y0, y1 = y1, y0 - t * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def bezout(values: Sequence[Fraction]) -> tuple:
    """``(g, coeffs)`` with integer ``coeffs`` and ``sum(c*v) = g = gcd(values)``."""
    g, coeffs = Fraction(0), []
    for v in values:
        v = Fraction(v)
        L = g.denominator * v.denominator // gcd(g.denominator, v.denominator)
        a, b = int(g * L), int(v * L)
        h, x, y = egcd(a, b)
        coeffs = [c * x for c in coeffs] + [y]
        g = Fraction(h, L)
    return g, coeffs


@dataclass(frozen=True)
class Flavor:
    """Which primes are *not* inverted in an integer slot.

    kind ``"Z"``: none inverted; ``"local"``: only ``primes`` survive (one
    prime); ``"inverted"``: ``primes`` are inverted; ``"Q"``: everything is.
    """

    kind: str = "Z"
    primes: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "primes", frozenset(self.primes))
        if self.kind not in ("Z", "local", "inverted", "Q"):
            raise ValueError(f"unknown slot flavor {self.kind!r}")
        if self.kind == "local" and len(self.primes) != 1:
            raise ValueError("a local slot names exactly one prime")
        if not all(fc.is_prime(p) for p in self.primes):
            raise ValueError(f"slot flavor lists a non-prime: {sorted(self.primes)}")

    @classmethod
    def local(cls, p: int) -> "Flavor":
        return cls("local", frozenset([p]))

    @classmethod
    def inverted(cls, primes: Iterable[int]) -> "Flavor":
        return cls("inverted", frozenset(primes))

    def admits(self, p: int) -> bool:
        """True iff ``p`` generates a maximal ideal of this slot."""
        if self.kind == "Z":
            return True
        if self.kind == "local":
            return p in self.primes
        if self.kind == "inverted":
            return p not in self.primes
        return False

    def admissible_primes(self) -> Iterator[int]:
        if self.kind == "local":
            yield from sorted(self.primes)
            return
        if self.kind == "Q":
            return
        for p in itertools.count(2):
            if fc.is_prime(p) and self.admits(p):
                yield p

    def canonical(self, q) -> Fraction:
        """Canonical generator of ``q * Z_S``: units of the slot are stripped."""
        q = abs(Fraction(q))
        if q == 0:
            return q
        if self.kind == "Z":
            return q
        if self.kind == "Q":
            return Fraction(1)
        if self.kind == "local":
            (p,) = self.primes
            return Fraction(p) ** valuation(q, p)
        num, den = q.numerator, q.denominator
        for p in self.primes:
            while num % p == 0:
                num //= p
            while den % p == 0:
                den //= p
        return Fraction(num, den)

    def contains(self, q) -> bool:
        """Membership of a rational in the slot ring ``Z_S``."""
        den = Fraction(q).denominator
        if self.kind == "Q":
            return True
        if self.kind == "local":
            return den % next(iter(self.primes)) != 0
        for p in self.primes:
            while den % p == 0:
                den //= p
        return den == 1

    def describe(self):
        if self.kind in ("Z", "Q"):
            return {"flavor": self.kind}
        if self.kind == "local":
            return {"flavor": "local", "p": next(iter(self.primes))}
        return {"flavor": "inverted", "primes": sorted(self.primes)}

    def label(self) -> str:
        if self.kind == "local":
            return f"Z_({next(iter(self.primes))})"
        if self.kind == "inverted":
            return "Z[1/" + ",1/".join(str(p) for p in sorted(self.primes)) + "]"
        return self.kind


@dataclass(frozen=True)
class MixedRing:
    """``Z_S1 x ... x Z_Sr x tail``; ``tail`` may be None (no finite factor)."""

    flavors: tuple
    tail: fc.FiniteRing | None = None

    def __post_init__(self):
        object.__setattr__(self, "flavors", tuple(self.flavors))

    @property
    def r(self) -> int:
        return len(self.flavors)

    def label(self) -> str:
        parts = [f.label() for f in self.flavors]
        if self.tail is not None:
            parts.append(f"F{len(self.tail)}")
        return " x ".join(parts) or "0"


@dataclass(frozen=True)
class MixedExtension:
    """``A ⊆ Q^r x tail_B`` for a mixed ring ``A`` with ``A.tail ⊆ tail_B``."""

    A: MixedRing
    tail_B: fc.FiniteRing | None = None

    def __post_init__(self):
        if (self.A.tail is None) != (self.tail_B is None):
            raise MixedOwners("tail of A and tail of B must both be present or both absent")
        if self.A.tail is not None and not self.A.tail.issubring(self.tail_B):
            raise MixedOwners("tail of A is not a subring of the tail of B")

    @property
    def r(self) -> int:
        return self.A.r

    @property
    def flavors(self) -> tuple:
        return self.A.flavors

    @cached_property
    def tail_ext(self) -> fc.FiniteExtension | None:
        if self.A.tail is None:
            return None
        return fc.FiniteExtension(self.A.tail, self.tail_B)

    @cached_property
    def whole(self) -> "MixedIdeal":
        """``A`` as an A-submodule of ``B``."""
        tail = self.tail_ext.A_in_B if self.tail_ext else None
        return MixedIdeal(self, tuple(Fraction(1) for _ in self.flavors), tail)

    @cached_property
    def B_module(self) -> "MixedIdeal":
        tail = self.tail_ext.B_module if self.tail_ext else None
        return MixedIdeal(self, tuple(WHOLE for _ in self.flavors), tail)

    @cached_property
    def one(self):
        return (tuple(Fraction(1) for _ in self.flavors),
                self.tail_B.one if self.tail_B is not None else None)

    @cached_property
    def zero(self):
        return (tuple(Fraction(0) for _ in self.flavors),
                self.tail_B.zero if self.tail_B is not None else None)

    def mul(self, x, y):
        t = self.tail_B.mul(x[1], y[1]) if self.tail_B is not None else None
        return (tuple(a * b for a, b in zip(x[0], y[0])), t)

    def add(self, x, y):
        t = self.tail_B.add(x[1], y[1]) if self.tail_B is not None else None
        return (tuple(a + b for a, b in zip(x[0], y[0])), t)

    def in_A(self, x) -> bool:
        slots_ok = all(f.contains(q) for f, q in zip(self.flavors, x[0]))
        return slots_ok and (x[1] is None or x[1] in self.A.tail)

    def ideal(self, slots: Sequence, tail_gens: Sequence = ()) -> "MixedIdeal":
        """Ideal from per-slot rationals (None = whole Q) and tail generators in ``tail_B``."""
        vals = tuple(WHOLE if q is WHOLE else f.canonical(q) for f, q in zip(self.flavors, slots))
        if len(vals) != self.r:
            raise ValueError(f"expected {self.r} slot values, got {len(slots)}")
        tail = None
        if self.tail_ext is not None:
            tail = fc.submodule_closure(self.A.tail, self.tail_B, list(tail_gens))
        gens = self._default_generators(vals, tail)
        return MixedIdeal(self, vals, tail, gens)

    def from_generators(self, gens: Sequence) -> "MixedIdeal":
        """Ideal generated by explicit elements of ``B``; yields the canonical form."""
        gens = tuple(gens)
        vals = []
        for i, f in enumerate(self.flavors):
            g = Fraction(0)
            for x in gens:
                g = qgcd(g, x[0][i])
            vals.append(f.canonical(g))
        tail = None
        if self.tail_ext is not None:
            tail = fc.submodule_closure(self.A.tail, self.tail_B, [x[1] for x in gens])
        return MixedIdeal(self, tuple(vals), tail, gens)

    def _default_generators(self, vals, tail):
        if any(v is WHOLE for v in vals):
            return None
        zero_tail = self.tail_B.zero if self.tail_B is not None else None
        gens = []
        for i, v in enumerate(vals):
            if v != 0:
                slots = tuple(v if j == i else Fraction(0) for j in range(self.r))
                gens.append((slots, zero_tail))
        if tail is not None:
            zeros = tuple(Fraction(0) for _ in vals)
            gens.extend((zeros, t) for t in tail.generators)
        return tuple(gens)

    def maximal_ideal(self, slot: int | None = None, prime: int | None = None,
                      tail: fc.PrimeSpot | None = None) -> "MixedMaximalIdeal":
        M = MixedMaximalIdeal(slot, prime, tail)
        M.validate(self)
        return M

    def fmt_element(self, x):
        out = {"slots": [str(q) for q in x[0]]}
        if x[1] is not None:
            out["tail"] = self.tail_B.fmt(x[1])
        return out


@dataclass(frozen=True, eq=False)
class MixedIdeal:
    """An A-submodule of ``B`` in canonical slot form plus a finite tail module."""

    ext: MixedExtension
    slots: tuple
    tail: fc.Submodule | None = None
    generators_: tuple | None = field(default=None, repr=False)

    def __eq__(self, other):
        if not isinstance(other, MixedIdeal):
            return NotImplemented
        return (self.ext == other.ext and self.slots == other.slots
                and (self.tail is None or self.tail.elements == other.tail.elements))

    def __hash__(self):
        return hash((self.slots, None if self.tail is None else self.tail.elements))

    @property
    def generators(self) -> tuple:
        if self.generators_ is not None:
            return self.generators_
        gens = self.ext._default_generators(self.slots, self.tail)
        if gens is None:
            raise ValueError("a module with a whole-Q slot has no finite generating set")
        return gens

    @property
    def is_integral(self) -> bool:
        for f, q in zip(self.ext.flavors, self.slots):
            if q is WHOLE or q.denominator != 1:
                return False
        return self.tail is None or self.tail.elements <= self.ext.A.tail._members

    @property
    def tail_ideal(self) -> fc.Submodule | None:
        """The tail as an ideal of ``A.tail`` (integral ideals only)."""
        if self.tail is None:
            return None
        At = self.ext.A.tail
        if not self.tail.elements <= At._members:
            raise NotIntegral("tail component is not inside the tail of A")
        return fc.Submodule(At, At, self.tail.generators, self.tail.elements)

    def __add__(self, other):
        return mixed_sum(self, other)

    def __mul__(self, other):
        return mixed_product(self, other)

    def describe(self):
        out = {"slots": ["Q" if q is WHOLE else str(q) for q in self.slots]}
        if self.tail is not None:
            out["tail"] = self.tail.fmt()
        return out

    def label(self) -> str:
        parts = [("Q" if q is WHOLE else f"{q}") + "Z" for q in self.slots]
        if self.tail is not None:
            parts.append(f"T{len(self.tail)}")
        return " x ".join(parts)


@dataclass(frozen=True)
class MixedMaximalIdeal:
    """Either ``(slot i, prime p)`` or a maximal ideal of the tail of ``A``."""

    slot: int | None = None
    prime: int | None = None
    tail: fc.PrimeSpot | None = None

    def validate(self, ext: MixedExtension):
        if (self.slot is None) == (self.tail is None):
            raise NotMaximal("exactly one of slot/tail must be given")
        if self.slot is not None:
            if not 0 <= self.slot < ext.r:
                raise NotMaximal(f"slot {self.slot} out of range")
            if self.prime is None or not fc.is_prime(self.prime) or not ext.flavors[self.slot].admits(self.prime):
                raise NotMaximal(f"{self.prime} is not a maximal prime of slot {self.slot}")
        elif ext.A.tail is None or not fc.is_maximal_ideal(self.tail.ideal):
            raise NotMaximal("tail ideal is not maximal in the tail of A")

    def as_ideal(self, ext: MixedExtension) -> MixedIdeal:
        if self.slot is not None:
            slots = [Fraction(self.prime) if i == self.slot else Fraction(1) for i in range(ext.r)]
            tail = ext.tail_ext.A.whole.generators if ext.tail_ext else ()
            return ext.ideal(slots, tail)
        return ext.ideal([Fraction(1)] * ext.r, self.tail.ideal.generators)

    def describe(self, ext: MixedExtension | None = None):
        if self.slot is not None:
            return {"slot": self.slot, "prime": self.prime}
        R = self.tail.ideal.carrier
        return {"tail": [R.fmt(x) for x in self.tail.ideal.generators]}

    def label(self) -> str:
        if self.slot is not None:
            return f"slot{self.slot}:{self.prime}Z"
        return f"tail:{len(self.tail.ideal)}"


def _check(a: MixedIdeal, b: MixedIdeal):
    if a.ext != b.ext:
        raise MixedOwners("mixed ideals live in different extensions")


def _slot_sum(x, y):
    if x is WHOLE or y is WHOLE:
        return WHOLE
    return qgcd(x, y)


def _slot_product(x, y):
    if x is WHOLE:
        return Fraction(0) if y == 0 else WHOLE
    if y is WHOLE:
        return Fraction(0) if x == 0 else WHOLE
    return x * y


def _slot_colon(s, t):
    """``{x in Q : x*t ⊆ s}`` for slot modules ``s``, ``t``."""
    if t is not WHOLE and t == 0:
        return WHOLE
    if s is WHOLE:
        return WHOLE
    if t is WHOLE or s == 0:
        return Fraction(0)
    return s / t


def _slot_meet(x, y):
    if x is WHOLE:
        return y
    if y is WHOLE:
        return x
    return qlcm(x, y)


def _combine(a, b, slot_op, tail_op):
    _check(a, b)
    ext = a.ext
    vals = tuple(WHOLE if v is WHOLE else f.canonical(v)
                 for f, v in zip(ext.flavors, (slot_op(x, y) for x, y in zip(a.slots, b.slots))))
    tail = tail_op(a.tail, b.tail) if a.tail is not None else None
    return MixedIdeal(ext, vals, tail)


def mixed_sum(a: MixedIdeal, b: MixedIdeal) -> MixedIdeal:
    return _combine(a, b, _slot_sum, fc.module_sum)


def mixed_product(a: MixedIdeal, b: MixedIdeal) -> MixedIdeal:
    return _combine(a, b, _slot_product, fc.module_product)


def mixed_colon(a: MixedIdeal, b: MixedIdeal) -> MixedIdeal:
    return _combine(a, b, _slot_colon, fc.colon)


def mixed_intersection(a: MixedIdeal, b: MixedIdeal) -> MixedIdeal:
    return _combine(a, b, _slot_meet, fc.intersection)


def mixed_ideal_arithmetic(op: str, a: MixedIdeal, b: MixedIdeal) -> MixedIdeal:
    ops = {"sum": mixed_sum, "product": mixed_product, "colon": mixed_colon,
           "intersection": mixed_intersection}
    return ops[op](a, b)


def tail_maximals(ext: MixedExtension) -> list:
    if ext.A.tail is None:
        return []
    return [MixedMaximalIdeal(tail=P) for P in ext.A.tail.maximal_ideals()]


def mixed_support(a: MixedIdeal, bound: int = FACTOR_BOUND) -> list:
    """Maximal ideals of ``A`` containing the integral ideal ``a``."""
    if not a.is_integral:
        raise NotIntegral("support is defined for integral ideals")
    out = []
    for i, (f, q) in enumerate(zip(a.ext.flavors, a.slots)):
        if q == 0:
            if f.kind != "local":
                raise InfiniteSupport(f"slot {i} of the ideal is zero")
            primes = sorted(f.primes)
        else:
            primes = [p for p in sorted(factorize(q.numerator, bound)) if f.admits(p)]
        out.extend(MixedMaximalIdeal(slot=i, prime=p) for p in primes)
    if a.tail is not None:
        I = a.tail_ideal
        out.extend(M for M in tail_maximals(a.ext) if I.elements <= M.tail.ideal.elements)
    return out


@dataclass(frozen=True)
class SlotLocalization:
    """``a * Z_(p)`` recorded by its valuation; ``None`` means the zero ideal."""

    prime: int
    valuation: int | None


def mixed_localize(ext: MixedExtension, M: MixedMaximalIdeal):
    """``A_M``: the DVR ``Z_(p)`` for a slot prime, the finite local ring for a tail maximal."""
    M.validate(ext)
    if M.slot is not None:
        return Flavor.local(M.prime)
    return fc.localize(ext.A.tail, M.tail)


def mixed_localize_ideal(a: MixedIdeal, M: MixedMaximalIdeal):
    M.validate(a.ext)
    if M.slot is not None:
        q = a.slots[M.slot]
        if q is WHOLE:
            raise NotIntegral("cannot localize a whole-Q slot inside Z_(p)")
        return SlotLocalization(M.prime, None if q == 0 else valuation(q, M.prime))
    return fc.localize_submodule(a.tail_ideal, M.tail)


def total_quotient_ring(A: MixedRing) -> MixedExtension:
    """``A ⊆ Q^r x F``; a finite tail is its own total quotient ring."""
    return MixedExtension(A, A.tail)


def is_regular_element(ext: MixedExtension, x) -> bool:
    if any(q == 0 for q in x[0]):
        return False
    if x[1] is None:
        return True
    return not ext.A.tail.is_zero_divisor(x[1])


def ideal_sweep(ext: MixedExtension, numerators: Sequence[int]) -> list:
    """Integral ideals with slot values drawn from ``numerators`` (0 allowed) and every tail ideal."""
    per_slot = []
    for f in ext.flavors:
        vals = sorted({f.canonical(n) for n in numerators}, key=lambda q: (q != 0, q))
        per_slot.append(vals)
    tails = ext.A.tail.ideals() if ext.A.tail is not None else [None]
    out, seen = [], set()
    for combo in itertools.product(*per_slot):
        for T in tails:
            gens = T.generators if T is not None else ()
            I = ext.ideal(combo, gens)
            key = (I.slots, None if I.tail is None else I.tail.elements)
            if key not in seen:
                seen.add(key)
                out.append(I)
    return out


def bounded_numerators(limit: int = 64, extra: int = 16, cap: int = 10**4,
                       max_factors: int = 3, seed: int = 0) -> list:
    """``0..limit`` plus a seeded sample up to ``cap``; at most ``max_factors`` distinct primes."""
    def ok(n):
        return n == 0 or len(factorize(n)) <= max_factors

    base = [n for n in range(0, limit + 1) if ok(n)]
    rng = random.Random(seed)
    pool = [n for n in range(limit + 1, cap + 1)]
    picked = []
    while len(picked) < extra and pool:
        n = pool.pop(rng.randrange(len(pool)))
        if ok(n):
            picked.append(n)
    return base + sorted(picked)
