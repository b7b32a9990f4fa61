"""Explicit finite commutative rings and their module theory.

Every ring lives inside an *ambient* product of Galois-style components
``(Z/p^k)[x]/(f)`` with ``f`` monic of degree at most 3.  An element is a
tuple holding one component index per ambient component; component indices
enumerate residue polynomials in lexicographic order of their coefficient
tuples, so ordinary tuple comparison is the lexicographic order on
coordinates.  All objects are immutable once built.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

from .errors import (
    InvalidComponent,
    MixedOwners,
    NotMaximal,
    NotPrime,
    NotSubring,
    SizeCapExceeded,
)

DEFAULT_CAP = 4096
_TABLE_LIMIT = 256

Element = tuple  # one component index per ambient component


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    i = 3
    while i * i <= n:
        if n % i == 0:
            return False
        i += 2
    return True


class _LazyTable:
    """Row-cached operation table for components too large to tabulate."""

    def __init__(self, size, op):
        self._size = size
        self._op = op
        self._rows = {}

    def __getitem__(self, i):
        row = self._rows.get(i)
        if row is None:
            row = [self._op(i, j) for j in range(self._size)]
            self._rows[i] = row
        return row


@dataclass(frozen=True)
class AmbientComponent:
    """The ring ``(Z/p^k)[x]/(f)``; ``f`` is given low-to-high and must be monic."""

    p: int
    k: int
    f: tuple

    def __post_init__(self):
        if not is_prime(self.p):
            raise InvalidComponent(f"p={self.p} is not prime")
        if self.k < 1:
            raise InvalidComponent(f"exponent k={self.k} must be >= 1")
        n = self.p**self.k
        f = tuple(int(c) % n for c in self.f)
        if not 2 <= len(f) <= 4:
            raise InvalidComponent(f"f must have degree 1..3, got coefficients {list(self.f)}")
        if f[-1] != 1 % n:
            raise InvalidComponent(f"f={list(self.f)} is not monic modulo {n}")
        object.__setattr__(self, "f", f)

    @property
    def modulus(self) -> int:
        return self.p**self.k

    @property
    def degree(self) -> int:
        return len(self.f) - 1

    @property
    def size(self) -> int:
        return self.modulus**self.degree

    def describe(self):
        return [self.p, self.k, list(self.f)]

    @cached_property
    def residues(self) -> list:
        return list(itertools.product(range(self.modulus), repeat=self.degree))

    @cached_property
    def index(self) -> dict:
        return {r: i for i, r in enumerate(self.residues)}

    def _poly_add(self, a, b):
        n = self.modulus
        return tuple((x + y) % n for x, y in zip(a, b))

    def _poly_mul(self, a, b):
        n, d, f = self.modulus, self.degree, self.f
        prod = [0] * (2 * d - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    prod[i + j] += ai * bj
        for e in range(2 * d - 2, d - 1, -1):
            c = prod[e] % n
            if c:
                for t in range(d + 1):
                    prod[e - d + t] -= c * f[t]
        return tuple(x % n for x in prod[:d])

    def _build(self, poly_op):
        res, idx = self.residues, self.index

        def op(i, j):
            return idx[poly_op(res[i], res[j])]

        if self.size <= _TABLE_LIMIT:
            return [[op(i, j) for j in range(self.size)] for i in range(self.size)]
        return _LazyTable(self.size, op)

    @cached_property
    def add_table(self):
        return self._build(self._poly_add)

    @cached_property
    def mul_table(self):
        return self._build(self._poly_mul)

    @cached_property
    def neg_table(self) -> list:
        n = self.modulus
        return [self.index[tuple((-c) % n for c in r)] for r in self.residues]

    @property
    def zero_index(self) -> int:
        return 0

    @cached_property
    def one_index(self) -> int:
        return self.index[(1 % self.modulus,) + (0,) * (self.degree - 1)]


@dataclass(frozen=True)
class Ambient:
    components: tuple

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))

    @cached_property
    def zero(self) -> Element:
        return tuple(0 for _ in self.components)

    @cached_property
    def one(self) -> Element:
        return tuple(c.one_index for c in self.components)

    @property
    def size(self) -> int:
        s = 1
        for c in self.components:
            s *= c.size
        return s

    @cached_property
    def _tables(self):
        return [(c.add_table, c.mul_table, c.neg_table) for c in self.components]

    def add(self, x, y):
        return tuple(t[0][a][b] for t, a, b in zip(self._tables, x, y))

    def mul(self, x, y):
        return tuple(t[1][a][b] for t, a, b in zip(self._tables, x, y))

    def neg(self, x):
        return tuple(t[2][a] for t, a in zip(self._tables, x))

    def sub(self, x, y):
        return self.add(x, self.neg(y))

    def element(self, coords: Sequence) -> Element:
        """Build an element from per-component coefficient lists (or bare ints)."""
        if len(coords) != len(self.components):
            raise ValueError(f"expected {len(self.components)} coordinates, got {len(coords)}")
        out = []
        for c, coord in zip(self.components, coords):
            coeffs = [coord] if isinstance(coord, int) else list(coord)
            if len(coeffs) > c.degree:
                raise ValueError(f"coordinate {coord} has too many coefficients for degree {c.degree}")
            coeffs += [0] * (c.degree - len(coeffs))
            out.append(c.index[tuple(int(v) % c.modulus for v in coeffs)])
        return tuple(out)

    def coords(self, x: Element) -> list:
        out = []
        for c, i in zip(self.components, x):
            r = c.residues[i]
            out.append(r[0] if c.degree == 1 else list(r))
        return out

    def describe(self):
        return [c.describe() for c in self.components]


def additive_span(ring, gens: Iterable, start: Iterable | None = None, cap: int | None = None) -> set:
    """Smallest additive subgroup of ``ring`` containing ``start`` (a subgroup) and ``gens``."""
    span = set(start) if start is not None else {ring.zero}
    for g in gens:
        if g in span:
            continue
        base = list(span)
        t = g
        while t not in span:
            span.update(ring.add(h, t) for h in base)
            if cap is not None and len(span) > cap:
                raise SizeCapExceeded(f"additive closure exceeds cap {cap}")
            t = ring.add(t, g)
        # t landed back in the previous subgroup; cosets are complete
    return span


class _RingBase:
    """Operations shared by embedded finite rings and their quotients."""

    elements: tuple
    _members: frozenset

    def __contains__(self, x):
        return x in self._members

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def sub(self, x, y):
        return self.add(x, self.neg(y))

    @cached_property
    def additive_generators(self) -> tuple:
        gens, span = [], {self.zero}
        for x in self.elements:
            if x not in span:
                gens.append(x)
                span = additive_span(self, [x], start=span)
        return tuple(gens)

    @cached_property
    def whole(self) -> "Submodule":
        return Submodule(self, self, (self.one,), self._members)

    @cached_property
    def zero_ideal(self) -> "Submodule":
        return Submodule(self, self, (), frozenset([self.zero]))

    def ideal(self, gens: Iterable) -> "Submodule":
        return submodule_closure(self, self, list(gens))

    def annihilator(self, x) -> frozenset:
        return frozenset(y for y in self.elements if self.mul(x, y) == self.zero)

    def is_zero_divisor(self, x) -> bool:
        return any(self.mul(x, y) == self.zero for y in self.elements if y != self.zero)

    @cached_property
    def units(self) -> frozenset:
        one = self.one
        return frozenset(x for x in self.elements if any(self.mul(x, y) == one for y in self.elements))

    def is_nilpotent(self, x) -> bool:
        seen = set()
        while x not in seen:
            if x == self.zero:
                return True
            seen.add(x)
            x = self.mul(x, x)
        return False

    @cached_property
    def idempotents(self) -> tuple:
        return tuple(x for x in self.elements if self.mul(x, x) == x)

    @cached_property
    def primitive_idempotents(self) -> tuple:
        nonzero = [e for e in self.idempotents if e != self.zero]
        return tuple(
            e for e in nonzero
            if not any(f != e and self.mul(f, e) == f for f in nonzero)
        )

    def ideals(self) -> list:
        """Every ideal, sorted by element tuples; sums of principal ideals suffice."""
        cached = self.__dict__.get("_ideals")
        if cached is not None:
            return cached
        principal = {}
        for x in self.elements:
            P = self.ideal([x])
            principal.setdefault(P.elements, x)
        found = {frozenset([self.zero]): ()}
        frontier = [frozenset([self.zero])]
        while frontier:
            nxt = []
            for I in frontier:
                for x in principal.values():
                    if x in I:
                        continue
                    J = frozenset(additive_span(
                        self, (self.mul(a, x) for a in self.additive_generators), start=I))
                    if J not in found:
                        found[J] = found[I] + (x,)
                        nxt.append(J)
            frontier = nxt
        out = sorted(
            (Submodule(self, self, gens, els) for els, gens in found.items()),
            key=lambda S: S.sorted_elements,
        )
        self.__dict__["_ideals"] = out
        return out

    def maximal_ideals(self) -> list:
        """Maximal ideals, one per primitive idempotent ``e``: ``{a : a*e nilpotent}``."""
        cached = self.__dict__.get("_maximals")
        if cached is not None:
            return cached
        out = []
        for e in self.primitive_idempotents:
            els = frozenset(a for a in self.elements if self.is_nilpotent(self.mul(a, e)))
            I = Submodule(self, self, None, els)
            out.append(PrimeSpot(I, "maximal"))
        out.sort(key=lambda P: P.ideal.sorted_elements)
        self.__dict__["_maximals"] = out
        return out


class FiniteRing(_RingBase):
    """A subring of an ambient product, stored as its sorted element list."""

    def __init__(self, ambient: Ambient, elements: Iterable, generators: Sequence = ()):
        self.ambient = ambient
        self.elements = tuple(sorted(elements))
        self._members = frozenset(self.elements)
        self.generators = tuple(generators)
        self.zero = ambient.zero
        self.one = ambient.one
        if self.zero not in self._members or self.one not in self._members:
            raise NotSubring("ring must contain the ambient 0 and 1")
        self._hash = hash((ambient, self._members))

    def add(self, x, y):
        return self.ambient.add(x, y)

    def mul(self, x, y):
        return self.ambient.mul(x, y)

    def neg(self, x):
        return self.ambient.neg(x)

    def __eq__(self, other):
        if self is other:
            return True
        return (isinstance(other, FiniteRing) and self.ambient == other.ambient
                and self._members == other._members)

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"FiniteRing(order={len(self)}, components={self.ambient.describe()})"

    def issubring(self, other: "FiniteRing") -> bool:
        return self.ambient == other.ambient and self._members <= other._members

    def fmt(self, x):
        return self.ambient.coords(x)

    def check_closure(self) -> bool:
        els = self.elements
        return all(
            self.add(x, y) in self and self.sub(x, y) in self and self.mul(x, y) in self
            for x in els for y in els
        )


class QuotientRing(_RingBase):
    """``parent / kernel``; classes are represented by their smallest element."""

    def __init__(self, parent, kernel: frozenset):
        self.parent = parent
        self.kernel = frozenset(kernel)
        klist = sorted(self.kernel)
        cls = {}
        for a in parent.elements:
            if a not in cls:
                coset = [parent.add(a, k) for k in klist]
                rep = min(coset)
                for c in coset:
                    cls[c] = rep
        self.class_map = cls
        self.elements = tuple(sorted(set(cls.values())))
        self._members = frozenset(self.elements)
        self.zero = cls[parent.zero]
        self.one = cls[parent.one]
        self._hash = hash((parent, self.kernel))

    def add(self, x, y):
        return self.class_map[self.parent.add(x, y)]

    def mul(self, x, y):
        return self.class_map[self.parent.mul(x, y)]

    def neg(self, x):
        return self.class_map[self.parent.neg(x)]

    def __eq__(self, other):
        if self is other:
            return True
        return (isinstance(other, QuotientRing) and self.parent == other.parent
                and self.kernel == other.kernel)

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"QuotientRing(order={len(self)}, kernel_order={len(self.kernel)})"

    def fmt(self, x):
        return self.parent.fmt(x)


class Submodule:
    """An ``owner``-submodule of ``carrier`` given by its full element set."""

    def __init__(self, owner, carrier, generators, elements: frozenset):
        self.owner = owner
        self.carrier = carrier
        self.elements = frozenset(elements)
        self._generators = None if generators is None else tuple(generators)
        self._hash = hash((carrier, self.elements))

    @property
    def generators(self) -> tuple:
        if self._generators is None:
            self._generators = minimal_generators(self)
        return self._generators

    @cached_property
    def sorted_elements(self) -> tuple:
        return tuple(sorted(self.elements))

    @property
    def is_ideal(self) -> bool:
        return self.owner == self.carrier

    def __contains__(self, x):
        return x in self.elements

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.sorted_elements)

    def __eq__(self, other):
        if self is other:
            return True
        return (isinstance(other, Submodule) and self.elements == other.elements
                and self.carrier == other.carrier and self.owner == other.owner)

    def __hash__(self):
        return self._hash

    def __le__(self, other):
        return self.elements <= other.elements

    def __lt__(self, other):
        return self.elements < other.elements

    def __repr__(self):
        return f"Submodule(order={len(self)}, generators={len(self.generators)})"

    def __add__(self, other):
        return module_sum(self, other)

    def __mul__(self, other):
        return module_product(self, other)

    def fmt(self):
        return [self.carrier.fmt(x) for x in self.generators]


@dataclass(frozen=True)
class PrimeSpot:
    ideal: Submodule
    kind: str = "maximal"


@dataclass(frozen=True)
class LocalRingResult:
    quotient_ring: QuotientRing
    kernel: frozenset
    map: dict = field(repr=False, compare=False)


@dataclass(frozen=True)
class FiniteExtension:
    """A ring extension ``A ⊆ B`` of finite rings sharing one ambient."""

    A: FiniteRing
    B: FiniteRing

    def __post_init__(self):
        if self.A.ambient != self.B.ambient:
            raise NotSubring("A and B must share an ambient")
        if not self.A.issubring(self.B):
            raise NotSubring("A is not contained in B")

    @cached_property
    def A_in_B(self) -> Submodule:
        """``A`` viewed as an A-submodule of ``B``."""
        return Submodule(self.A, self.B, (self.A.one,), self.A._members)

    @cached_property
    def B_module(self) -> Submodule:
        """``B`` viewed as an A-submodule of itself."""
        return Submodule(self.A, self.B, None, self.B._members)

    def submodule(self, gens) -> Submodule:
        return submodule_closure(self.A, self.B, list(gens))


def close_subring(ambient: Ambient, generator_list: Iterable, cap: int = DEFAULT_CAP) -> FiniteRing:
    """Smallest subring of the ambient containing the generators (and 1)."""
    gens = list(dict.fromkeys(generator_list))
    for g in gens:
        if len(g) != len(ambient.components):
            raise ValueError(f"generator {g} does not match the ambient")
    monoid = {ambient.one}
    frontier = [ambient.one]
    while frontier:
        nxt = []
        for m in frontier:
            for g in gens:
                y = ambient.mul(m, g)
                if y not in monoid:
                    monoid.add(y)
                    nxt.append(y)
                    if len(monoid) > cap:
                        raise SizeCapExceeded(f"subring closure exceeds cap {cap}")
        frontier = nxt
    els = additive_span(ambient, sorted(monoid), cap=cap)
    return FiniteRing(ambient, els, gens)


def submodule_closure(owner, carrier, generator_list: Sequence) -> Submodule:
    if owner is not carrier and not set(owner.elements) <= set(carrier.elements):
        raise NotSubring("owner ring is not contained in the carrier")
    gens = tuple(dict.fromkeys(generator_list))
    for g in gens:
        if g not in carrier:
            raise ValueError(f"generator {g} is not an element of the carrier")
    els = additive_span(carrier, (carrier.mul(a, g) for g in gens for a in owner.additive_generators))
    return Submodule(owner, carrier, gens, frozenset(els))


def minimal_generators(S: Submodule) -> tuple:
    """Greedy generating set: scan elements in order, keep those outside the current span."""
    owner, carrier = S.owner, S.carrier
    gens, span = [], {carrier.zero}
    for x in S.sorted_elements:
        if x not in span:
            gens.append(x)
            span = additive_span(carrier, (carrier.mul(a, x) for a in owner.additive_generators), start=span)
            if len(span) == len(S.elements):
                break
    return tuple(gens)


def _same_frame(S: Submodule, T: Submodule):
    if S.owner != T.owner or S.carrier != T.carrier:
        raise MixedOwners("submodules have different owner or carrier rings")


def module_sum(S: Submodule, T: Submodule) -> Submodule:
    _same_frame(S, T)
    gens = S.generators + tuple(g for g in T.generators if g not in S.generators)
    els = additive_span(S.carrier, T.elements, start=S.elements)
    return Submodule(S.owner, S.carrier, gens, frozenset(els))


def module_product(S: Submodule, T: Submodule) -> Submodule:
    _same_frame(S, T)
    mul = S.carrier.mul
    return submodule_closure(S.owner, S.carrier, [mul(g, h) for g in S.generators for h in T.generators])


def module_power(S: Submodule, k: int, unit: Submodule) -> Submodule:
    out = unit
    for _ in range(k):
        out = module_product(out, S)
    return out


def colon(S: Submodule, T: Submodule) -> Submodule:
    """``[S : T] = {x in carrier : x*T ⊆ S}``."""
    _same_frame(S, T)
    mul = S.carrier.mul
    tg = T.generators
    els = frozenset(x for x in S.carrier.elements if all(mul(x, t) in S.elements for t in tg))
    return Submodule(S.owner, S.carrier, None, els)


def intersection(S: Submodule, T: Submodule) -> Submodule:
    _same_frame(S, T)
    return Submodule(S.owner, S.carrier, None, S.elements & T.elements)


def is_prime_ideal(I: Submodule) -> bool:
    R = I.carrier
    if len(I) == len(R):
        return False
    outside = [x for x in R.elements if x not in I]
    return all(R.mul(x, y) not in I for x in outside for y in outside)


def is_maximal_ideal(I: Submodule) -> bool:
    return any(P.ideal.elements == I.elements for P in I.carrier.maximal_ideals())


def fraction_ring(R, multiplicative: Iterable) -> QuotientRing:
    """Localization of a finite ring at a multiplicative set: ``R / {x : s*x = 0, s in S}``.

    Surjectivity of ``R -> R_S`` holds because every ``s`` acts invertibly on the
    idempotent piece ``e_s R`` and nilpotently on the complement.
    """
    S = list(multiplicative)
    zero = R.zero
    kernel = frozenset(x for x in R.elements if any(R.mul(s, x) == zero for s in S))
    return QuotientRing(R, kernel)


def localize(A, m) -> LocalRingResult:
    """``A_m`` realized as ``A / K_m`` (valid because finite rings are artinian)."""
    I = m.ideal if isinstance(m, PrimeSpot) else m
    if not is_maximal_ideal(I):
        raise NotMaximal("localize requires a maximal ideal")
    cache = A.__dict__.setdefault("_local_cache", {})
    hit = cache.get(I.elements)
    if hit is not None:
        return hit
    Q = fraction_ring(A, [s for s in A.elements if s not in I])
    out = LocalRingResult(Q, Q.kernel, Q.class_map)
    cache[I.elements] = out
    return out


def localize_submodule(S: Submodule, m) -> Submodule:
    """Image of an ideal ``S`` of ``A`` in ``A_m``."""
    if not S.is_ideal:
        raise MixedOwners("localize_submodule expects an ideal of its owner ring")
    loc = localize(S.owner, m)
    Q, cls = loc.quotient_ring, loc.map
    return Submodule(Q, Q, tuple(dict.fromkeys(cls[g] for g in S.generators)),
                     frozenset(cls[x] for x in S.elements))


def principal_generator(I: Submodule):
    """Some ``x`` with ``I = R*x``, or None."""
    R = I.carrier
    n = len(I)
    for x in I.sorted_elements:
        if len(additive_span(R, (R.mul(a, x) for a in R.additive_generators))) == n:
            return x
    return None


def generalized_localization(ext: FiniteExtension, p) -> FiniteRing:
    """``A_[p] = {x in B : v*x in A for some v in A - p}``."""
    I = p.ideal if isinstance(p, PrimeSpot) else p
    if not is_prime_ideal(I):
        raise NotPrime("generalized localization requires a prime ideal")
    A, B = ext.A, ext.B
    outside = [v for v in A.elements if v not in I]
    els = [x for x in B.elements if any(B.mul(v, x) in A for v in outside)]
    return FiniteRing(A.ambient, els)


def generalized_localization_ideal(ext: FiniteExtension, p, ideal: Submodule) -> frozenset:
    """``{x in B : v*x in ideal for some v in A - p}`` as an element set."""
    I = p.ideal if isinstance(p, PrimeSpot) else p
    A, B = ext.A, ext.B
    outside = [v for v in A.elements if v not in I]
    return frozenset(x for x in B.elements if any(B.mul(v, x) in ideal for v in outside))
