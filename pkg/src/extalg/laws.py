"""Registered laws.  Each law runs over one corpus entry and reports instance
counts, vacuous instances and failures with replayable witnesses.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from . import finite_core as fc
from . import mixed_symbolic as ms
from . import module_props as mp
from . import prufer_theory as pt
from .errors import ConfigInvalid, ExtAlgError
from .formats import ideal_doc
from .poset_finiteness import build_regular_ideal_poset


@dataclass
class LawContext:
    oracle_cap: int = mp.ORACLE_CAP
    bounds: pt.SweepBounds = field(default_factory=pt.SweepBounds)
    poset_bound: int = 30


@dataclass
class LawOutcome:
    law: str
    entry: str
    instances: int = 0
    vacuous: int = 0
    failures: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    counts: dict = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return not self.failures

    def fail(self, witness: dict, replay: dict | None = None):
        item = {"witness": witness}
        if replay is not None:
            item["replay"] = replay
        self.failures.append(item)

    def to_json(self):
        out = {"law": self.law, "instances": self.instances, "vacuous": self.vacuous,
               "failures": self.failures, "holds": self.holds}
        if self.notes:
            out["notes"] = self.notes
        if self.counts:
            out["counts"] = self.counts
        return out


LAWS: dict = {}


def law(name: str, description: str):
    def deco(fn: Callable):
        fn.law_id = name
        fn.description = description
        LAWS[name] = fn
        return fn
    return deco


def resolve_laws(selection) -> list:
    """``"all"`` or a comma list (or sequence) of registered ids."""
    if selection in (None, "all", ["all"], ("all",)):
        return sorted(LAWS)
    names = [s.strip() for s in selection.split(",")] if isinstance(selection, str) else list(selection)
    unknown = [n for n in names if n not in LAWS]
    if unknown or not names:
        raise ConfigInvalid(f"unknown law id(s): {', '.join(unknown) or '(empty)'}")
    return sorted(dict.fromkeys(names))


# --- per-ideal facts with memoization --------------------------------------------------------

FACTS = {
    "flat": lambda I, ext: mp.is_flat(I).holds,
    "faithfully_flat": lambda I, ext: mp.is_faithfully_flat(I).holds,
    "locally_principal": lambda I, ext: mp.is_locally_principal(I).holds,
    "regular": lambda I, ext: mp.is_regular_ideal(I).holds,
    "B_regular": lambda I, ext: mp.is_B_regular(I, ext).holds,
    "B_invertible": lambda I, ext: mp.is_B_invertible(I, ext).holds,
}


class IdealTable:
    """The ideal universe of an entry with cached predicate values."""

    def __init__(self, entry, ctx: LawContext):
        self.entry = entry
        self.ext = entry.ext
        self.ideals = pt.ideal_universe(self.ext, ctx.bounds)
        self._cache = {}

    def fact(self, i: int, name: str) -> bool:
        key = (i, name)
        if key not in self._cache:
            self._cache[key] = FACTS[name](self.ideals[i], self.ext)
        return self._cache[key]

    def replay(self, i: int, props: list) -> dict:
        doc = dict(self.entry.doc)
        doc["ideal"] = ideal_doc(self.ext, self.ideals[i])
        return {"file": doc, "props": props,
                "observed": {p: self.fact(i, p) for p in props}}


def _table(entry, ctx) -> IdealTable:
    cache = entry.__dict__.setdefault("_tables", {})
    key = (ctx.bounds, ctx.oracle_cap)
    if key not in cache:
        cache[key] = IdealTable(entry, ctx)
    return cache[key]


def _ext_replay(entry, props: list, observed: dict) -> dict:
    return {"file": dict(entry.doc), "props": props, "observed": observed}


def _is_finite(entry) -> bool:
    return isinstance(entry.ext, fc.FiniteExtension)


# --- module-level laws -----------------------------------------------------------------------


@law("remark_b", "golden ideal flags (flat, faithfully flat, idempotent, regular, locally principal)")
def law_remark_b(entry, ctx) -> LawOutcome:
    out = LawOutcome("remark_b", entry.id)
    for doc, flags in entry.ideal_expectations:
        I = entry.ideal(doc)
        got = ideal_flags(I, entry.ext, list(flags))
        out.instances += 1
        if got != flags:
            out.fail({"ideal": doc, "expected": flags, "observed": got},
                     {"file": {**entry.doc, "ideal": doc}, "props": sorted(flags), "observed": got})
    return out


def ideal_flags(I, ext, props) -> dict:
    got = {}
    for p in props:
        if p == "idempotent":
            got[p] = _same_ideal(_product(I, I), I)
        else:
            got[p] = FACTS[p](I, ext)
    return got


def _product(a, b):
    return fc.module_product(a, b) if isinstance(a, fc.Submodule) else ms.mixed_product(a, b)


def _same_ideal(a, b):
    return a.elements == b.elements if isinstance(a, fc.Submodule) else a == b


@law("remark_a", "faithfully flat implies locally principal, over all ideals")
def law_remark_a(entry, ctx) -> LawOutcome:
    out = LawOutcome("remark_a", entry.id)
    T = _table(entry, ctx)
    for i in range(len(T.ideals)):
        out.instances += 1
        if T.fact(i, "faithfully_flat") and not T.fact(i, "locally_principal"):
            out.fail({"ideal": ideal_doc(T.ext, T.ideals[i])},
                     T.replay(i, ["faithfully_flat", "locally_principal"]))
    return out


@law("prop_inv_flat", "B-invertible iff (B-regular and flat), with verified partitions of unity")
def law_inv_flat(entry, ctx) -> LawOutcome:
    out = LawOutcome("prop_inv_flat", entry.id)
    T = _table(entry, ctx)
    for i, I in enumerate(T.ideals):
        out.instances += 1
        reg = T.fact(i, "B_regular")
        if not reg:
            out.vacuous += 1  # invertible forces regular, so both sides are false
        inv = T.fact(i, "B_invertible")
        rhs = reg and T.fact(i, "flat")
        if inv != rhs:
            out.fail({"ideal": ideal_doc(T.ext, I), "B_invertible": inv, "B_regular_and_flat": rhs},
                     T.replay(i, ["B_invertible", "B_regular", "flat"]))
            continue
        if inv:
            out.counts["B_invertible"] = out.counts.get("B_invertible", 0) + 1
            pou = mp.partition_of_unity(I, T.ext)
            if mp.verify_partition(pou, I, T.ext):
                out.counts["partitions_verified"] = out.counts.get("partitions_verified", 0) + 1
            else:
                replay = T.replay(i, [])
                replay.update(props=["partition_of_unity"], observed={"partition_of_unity": False})
                out.fail({"ideal": ideal_doc(T.ext, I), "partition_of_unity": "does not verify"}, replay)
    return out


@law("prop_faithfully", "for B-regular ideals: faithfully flat iff locally principal")
def law_faithfully(entry, ctx) -> LawOutcome:
    out = LawOutcome("prop_faithfully", entry.id)
    T = _table(entry, ctx)
    for i, I in enumerate(T.ideals):
        out.instances += 1
        if not T.fact(i, "B_regular"):
            out.vacuous += 1
            continue
        ff, lp = T.fact(i, "faithfully_flat"), T.fact(i, "locally_principal")
        if ff != lp:
            out.fail({"ideal": ideal_doc(T.ext, I), "faithfully_flat": ff, "locally_principal": lp},
                     T.replay(i, ["faithfully_flat", "locally_principal", "B_regular"]))
    return out


@law("flatness_oracle", "local flatness test agrees with the Tor-style oracle on small rings")
def law_flatness_oracle(entry, ctx) -> LawOutcome:
    out = LawOutcome("flatness_oracle", entry.id)
    ext = entry.ext
    if _is_finite(entry):
        rings = [("A", ext.A)] + ([("B", ext.B)] if ext.B != ext.A else [])
    else:
        rings = [("tail_A", ext.A.tail)] if ext.A.tail is not None else []
    for name, R in rings:
        if len(R) > ctx.oracle_cap:
            out.notes.append(f"{name} of order {len(R)} exceeds the oracle cap")
            continue
        for I in R.ideals():
            out.instances += 1
            a, b = mp.is_flat(I).holds, mp.flatness_oracle(I, ctx.oracle_cap).holds
            if a != b:
                doc = {"kind": "finite", "ambient": R.ambient.describe(),
                       "A": [R.fmt(g) for g in R.generators],
                       "ideal": {"generators": [R.fmt(g) for g in I.generators]}}
                out.fail({"ring": name, "ideal": doc["ideal"], "is_flat": a, "oracle": b},
                         {"file": doc, "props": ["flat", "flatness_oracle"],
                          "observed": {"flat": a, "flatness_oracle": b}})
    return out


# --- theory-level laws -----------------------------------------------------------------------


@law("golden_flags", "golden extension flags and weak-surjectivity witness validation")
def law_golden_flags(entry, ctx) -> LawOutcome:
    out = LawOutcome("golden_flags", entry.id)
    ext = entry.ext
    checks = {"almost_prufer": lambda: pt.is_almost_prufer(ext, ctx.bounds),
              "weakly_surjective": lambda: pt.is_weakly_surjective(ext),
              "prufer": lambda: pt.is_prufer(ext),
              "finite_character": lambda: pt.has_finite_character(ext, ctx.bounds)}
    for flag, want in sorted(entry.expected.items()):
        if flag not in checks:
            continue
        out.instances += 1
        v = checks[flag]()
        if v.holds != want:
            out.fail({"flag": flag, "expected": want, "observed": v.holds},
                     _ext_replay(entry, [flag], {flag: v.holds}))
        if flag == "weakly_surjective" and not v.holds:
            problem = _validate_ws_witness(ext, v, entry.expected.get("weak_surjectivity_witness_x"))
            if problem:
                out.fail({"flag": "weak_surjectivity_witness", "problem": problem, "witness": v.witness})
    return out


def _validate_ws_witness(ext, v, expected_x):
    """The witness ``x`` lies in ``B`` but outside ``A_[m]``, with ``mB != B``."""
    if isinstance(ext, ms.MixedExtension):
        ext = ext.tail_ext
        P, x = pt.is_weakly_surjective(ext).payload
    else:
        P, x = v.payload
    if not pt._extends_properly(ext, P.ideal):
        return "mB = B at the witness maximal ideal"
    if x in fc.generalized_localization(ext, P):
        return "x lies in A_[m]"
    if expected_x is not None and v.witness.get("x") != expected_x:
        return f"x = {v.witness.get('x')} differs from the expected {expected_x}"
    return None


@law("theorem_2_1", "Prufer iff (weakly surjective and almost Prufer)")
def law_theorem_2_1(entry, ctx) -> LawOutcome:
    out = LawOutcome("theorem_2_1", entry.id)
    v = pt.verify_theorem_2_1(entry.ext, ctx.bounds)
    out.instances = 1
    if not v:
        out.fail(v.witness, _ext_replay(entry, ["prufer", "weakly_surjective", "almost_prufer"], v.evidence))
    return out


@law("weak_surjectivity_crosscheck", "membership form of weak surjectivity matches explicit fraction rings")
def law_ws_cross(entry, ctx) -> LawOutcome:
    out = LawOutcome("weak_surjectivity_crosscheck", entry.id)
    ext = entry.ext if _is_finite(entry) else entry.ext.tail_ext
    if ext is None:
        out.instances, out.vacuous = 1, 1
        return out
    out.instances = 1
    a = pt._finite_weak_surjectivity(ext).holds
    b = pt.direct_weak_surjectivity(ext)
    if a != b:
        out.fail({"membership_form": a, "fraction_ring_form": b})
    return out


@law("finite_character", "every B-regular ideal lies in finitely many maximal ideals")
def law_finite_character(entry, ctx) -> LawOutcome:
    out = LawOutcome("finite_character", entry.id)
    v = pt.has_finite_character(entry.ext, ctx.bounds)
    out.instances = 1
    out.vacuous = int(v.vacuous)
    if not v:
        out.fail(v.witness, _ext_replay(entry, ["finite_character"], {"finite_character": False}))
    return out


@law("main_theorem", "B-regular locally principal ideals are invertible iff finite character")
def law_main_theorem(entry, ctx) -> LawOutcome:
    out = LawOutcome("main_theorem", entry.id)
    v = pt.verify_main_theorem(entry.ext, ctx.bounds)
    out.instances = 1
    out.vacuous = int(v.vacuous)
    out.notes.append(pt.DESK_SCALE_NOTE)
    if not v:
        out.fail(v.witness, _ext_replay(entry, ["main_theorem"], {"main_theorem": False}))
    return out


def _is_total_quotient(ext) -> bool:
    if isinstance(ext, fc.FiniteExtension):
        return ext.A == ext.B
    return ext.A.tail is None or ext.A.tail == ext.tail_B


@law("prufer_ring_corollary", "for Prufer rings: regular locally principal ideals invertible iff finite character")
def law_prufer_ring(entry, ctx) -> LawOutcome:
    out = LawOutcome("prufer_ring_corollary", entry.id)
    ext = entry.ext
    if not _is_total_quotient(ext) or not pt.is_almost_prufer(ext, ctx.bounds):
        return out
    v = pt.verify_prufer_ring_corollary(ext.A, ctx.bounds)
    out.instances = 1
    out.vacuous = int(v.vacuous)
    if not v:
        out.fail(v.witness, _ext_replay(entry, ["prufer_ring_corollary"], {"prufer_ring_corollary": False}))
    return out


@law("manis_consistency", "accepted valuations satisfy the axioms and their pairs pass the Manis criterion")
def law_manis(entry, ctx) -> LawOutcome:
    out = LawOutcome("manis_consistency", entry.id)
    ext = entry.ext
    if _is_finite(entry):
        B = ext.B
        for P in B.maximal_ideals():
            table = {x: (None if x in P.ideal else (0,)) for x in B.elements}
            v = pt.check_manis_valuation(pt.ManisValuationData(1, table=table), B)
            out.instances += 1
            if not v:
                out.fail({"prime_indicator": [B.fmt(x) for x in P.ideal.generators], **v.witness})
                continue
            A_v, p_v = v.payload
            if not (A_v.check_closure() and pt.is_manis_pair(A_v, p_v, B)):
                out.fail({"derived_pair": "not a Manis pair", "prime": [B.fmt(x) for x in P.ideal.generators]})
        one = {x: (0,) for x in B.elements}
        bad = pt.check_manis_valuation(pt.ManisValuationData(1, table=one), B)
        out.instances += 1
        if bad.holds:
            out.fail({"constant_zero_valuation": "accepted although v(0) must be infinite"})
        return out
    for slot, f in enumerate(ext.flavors):
        for p in itertools.islice(ms.Flavor("Z").admissible_primes(), 3):
            v = pt.check_manis_valuation(pt.ManisValuationData(1, rule=("p-adic", slot, p)), ext)
            out.instances += 1
            if not v or not pt.is_manis_pair(v.payload, None, ext):
                out.fail({"slot": slot, "prime": p})
    return out


# --- the technical lemma and generator construction ------------------------------------------


def lemma_instances(ext) -> list:
    """Pairs ``(a, members)`` with members comaximal, B-invertible and containing ``a``."""
    if isinstance(ext, fc.FiniteExtension):
        return [(a, [ext.A.whole]) for a in ext.A.ideals()]
    if any(f.kind == "Q" for f in ext.flavors):
        return []
    tail_whole = ext.A.tail.whole.generators if ext.A.tail is not None else ()
    tail_bases = [I.generators for I in ext.A.tail.ideals()] if ext.A.tail is not None else [()]
    out = []
    for n in (12, 30, 60, 8, 90, 36):
        for tb in tail_bases[-2:]:
            slots = [Fraction(n)] * ext.r
            a = ext.ideal(slots, tb)
            atoms = []
            for i, f in enumerate(ext.flavors):
                q = a.slots[i]
                for p, e in sorted(ms.factorize(q.numerator).items()):
                    atoms.append([(i, p, j) for j in range(1, e + 1)])
            for choice in itertools.product(*[[None] + opts for opts in atoms]):
                chosen = [c for c in choice if c is not None]
                if not chosen:
                    continue
                members = []
                for i, p, j in chosen:
                    vals = [Fraction(p ** j) if k == i else Fraction(1) for k in range(ext.r)]
                    members.append(ext.ideal(vals, tail_whole))
                out.append((a, members))
    return out


@law("lemma_technical", "the i_F ideal: finite subfamily G and the local formula at every maximal ideal")
def law_lemma(entry, ctx) -> LawOutcome:
    out = LawOutcome("lemma_technical", entry.id)
    ext = entry.ext
    for a, members in lemma_instances(ext):
        out.instances += 1
        try:
            F = pt.comaximal_family(a, members, ext)
            v = pt.verify_lemma_technical(a, F, ext)
        except ExtAlgError as e:
            out.fail({"ideal": ideal_doc(ext, a), "error": f"{type(e).__name__}: {e}"})
            continue
        if not v:
            out.fail({"ideal": ideal_doc(ext, a), "members": [ideal_doc(ext, b) for b in members], **v.witness})
        elif isinstance(ext, fc.FiniteExtension) and v.payload[0].elements != a.elements:
            out.fail({"ideal": ideal_doc(ext, a), "problem": "i_F for F = {A} differs from a"})
    if entry.id == "z_in_q":
        for n, fam, want in ((12, [3], 4), (12, [4, 3], 1)):
            out.instances += 1
            F = pt.comaximal_family(ext.ideal([n]), [ext.ideal([m]) for m in fam], ext)
            got = pt.compute_i_F(ext.ideal([n]), F, ext).ideal.slots[0]
            if got != want:
                out.fail({"worked_value": [n, fam], "expected": want, "observed": str(got)})
    return out


@law("finite_generators", "the generator construction rebuilds every B-regular ideal")
def law_finite_generators(entry, ctx) -> LawOutcome:
    out = LawOutcome("finite_generators", entry.id)
    T = _table(entry, ctx)
    ext = T.ext
    regular = [i for i in range(len(T.ideals)) if T.fact(i, "B_regular")]
    for i in regular[:40]:
        a = T.ideals[i]
        out.instances += 1
        if isinstance(ext, fc.FiniteExtension):
            out.vacuous += 1  # only A itself is B-regular here
        g = pt.construct_finite_generators(a, ext)
        if not g.equal:
            out.fail({"ideal": ideal_doc(ext, a), "rebuilt": ideal_doc(ext, g.b)})
    if entry.id == "z_in_q":
        out.instances += 1
        g = pt.construct_finite_generators(ext.ideal([12]), ext, a0=ext.ideal([24]))
        gens = [x[0][0] for x in g.generators]
        if gens != [24, 36, 24] or g.b.slots != (Fraction(12),):
            out.fail({"worked_example": "a = 12Z, a0 = 24Z", "generators": [str(q) for q in gens]})
    return out


@law("poset_bridge", "the poset of proper B-regular ideals satisfies the three order hypotheses")
def law_poset_bridge(entry, ctx) -> LawOutcome:
    out = LawOutcome("poset_bridge", entry.id)
    ext = entry.ext
    bound = ctx.poset_bound if isinstance(ext, fc.FiniteExtension) or ext.r == 1 else 8
    R = build_regular_ideal_poset(ext, bound)
    out.instances = 1
    if R.poset.size == 0:
        out.vacuous = 1
        out.notes.extend(R.notes)
        return out
    for v in list(R.hypotheses) + list(R.claims.values()):
        if not v:
            out.fail({"check": v.name, **(v.witness or {})})
    return out
