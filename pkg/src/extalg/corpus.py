"""Built-in corpus: golden extensions plus seeded random subring extensions."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import cached_property

from . import finite_core as fc
from .errors import ConfigInvalid, ParseError, SizeCapExceeded
from .formats import load_file, parse_extension, parse_ideal

PROFILES = {"tiny": 4, "small": 20, "medium": 40}
MIN_IDEALS = 8  # random A must have at least this many ideals
RANDOM_A_CAP = 36

# Small ambient components: [p, k, f] with at most 16 elements.  Local
# non-fields come first and are drawn more often: they carry most ideals.
LOCAL_POOL = (
    [2, 2, [0, 1]], [2, 3, [0, 1]], [3, 2, [0, 1]], [2, 1, [0, 0, 1]],
    [2, 1, [0, 0, 0, 1]], [3, 1, [0, 0, 1]], [2, 2, [0, 0, 1]],
)
FIELD_POOL = ([2, 1, [0, 1]], [3, 1, [0, 1]], [5, 1, [0, 1]], [2, 1, [1, 1, 1]], [2, 1, [1, 1, 0, 1]])


@dataclass
class CorpusEntry:
    id: str
    universe: str
    doc: dict
    expected: dict = field(default_factory=dict)
    ideal_expectations: list = field(default_factory=list)  # (ideal doc, flags)
    source: str = "derived"

    @property
    def golden(self) -> bool:
        return bool(self.expected or self.ideal_expectations)

    @cached_property
    def ext(self):
        return parse_extension(self.doc)

    def ideal(self, doc):
        return parse_ideal(self.ext, doc)

    def describe(self):
        ext = self.ext
        if self.universe == "finite":
            return f"A({len(ext.A)}) in B({len(ext.B)})"
        tail = f" x F{len(ext.A.tail)} in Q^{ext.r} x F{len(ext.tail_B)}" if ext.tail_B is not None else f" in Q^{ext.r}"
        return " x ".join(f.label() for f in ext.flavors) + tail


def _field(p):
    return [p, 1, [0, 1]]


def golden_entries() -> list:
    out = []
    for p, q in ((2, 3), (2, 5), (3, 5)):
        out.append(CorpusEntry(
            f"remark_b_{p}_{q}", "finite",
            {"kind": "finite", "ambient": [_field(p), _field(q)], "A": []},
            ideal_expectations=[({"generators": [[0, p % q]]},
                                 {"flat": True, "faithfully_flat": False, "idempotent": True,
                                  "regular": False, "locally_principal": True})],
            source="golden"))
    for p in (2, 3, 5):
        for n in (2, 3):
            x = [1] + [0] * (n - 1)
            out.append(CorpusEntry(
                f"example_diag_F{p}_n{n}", "finite",
                {"kind": "finite", "ambient": [_field(p)] * n, "A": [], "B": "ambient"},
                expected={"almost_prufer": True, "weakly_surjective": False, "prufer": False,
                          "weak_surjectivity_witness_x": x},
                source="golden"))
    out.append(CorpusEntry("z_in_q", "mixed", {"kind": "mixed", "slots": [{"flavor": "Z"}]},
                           expected={"weakly_surjective": True, "prufer": True, "almost_prufer": True,
                                     "finite_character": True}))
    for p in (2, 3):
        out.append(CorpusEntry(f"zloc{p}_in_q", "mixed",
                               {"kind": "mixed", "slots": [{"flavor": "local", "p": p}]},
                               expected={"prufer": True, "almost_prufer": True,
                                         "weakly_surjective": True}))
    z6 = {"ambient": [_field(2), _field(3)], "A": []}
    out.append(CorpusEntry("z_x_z6", "mixed", {"kind": "mixed", "slots": [{"flavor": "Z"}], "tail": z6},
                           expected={"weakly_surjective": True, "prufer": True, "almost_prufer": True}))
    out.append(CorpusEntry(
        "xy_ring", "finite",
        {"kind": "finite", "ambient": [[2, 1, [0, 0, 1]], [2, 1, [0, 0, 1]]],
         "A": [[[0, 1], 0], [0, [0, 1]]]},
        ideal_expectations=[({"generators": [[[0, 1], 0], [0, [0, 1]]]},
                             {"locally_principal": False, "flat": False})]))
    out.append(CorpusEntry("z4", "finite", {"kind": "finite", "ambient": [[2, 2, [0, 1]]], "A": []},
                           ideal_expectations=[({"generators": [[2]]}, {"flat": False, "locally_principal": True})]))
    for p, d in ((2, 3), (2, 4), (3, 2)):
        amb = [[p, 1, [0, 0, 1]]] * d
        gens = [[[0, 1] if j == i else 0 for j in range(d)] for i in range(d)]
        out.append(CorpusEntry(f"square_zero_F{p}_d{d}", "finite",
                               {"kind": "finite", "ambient": amb, "A": gens}))
    out.append(CorpusEntry("z12", "finite",
                           {"kind": "finite", "ambient": [[2, 2, [0, 1]], _field(3)], "A": []}))
    out.append(CorpusEntry("z_inv2_in_q", "mixed",
                           {"kind": "mixed", "slots": [{"flavor": "inverted", "primes": [2]}]}))
    out.append(CorpusEntry("z_x_zloc2_in_q2", "mixed",
                           {"kind": "mixed", "slots": [{"flavor": "Z"}, {"flavor": "local", "p": 2}]}))
    out.append(CorpusEntry(
        "z_x_f2_in_q_x_f2sq", "mixed",
        {"kind": "mixed", "slots": [{"flavor": "Z"}],
         "tail": {"ambient": [_field(2), _field(2)], "A": [], "B": "ambient"}},
        expected={"weakly_surjective": False, "prufer": False, "almost_prufer": True}))
    out.append(CorpusEntry("z_x_z4", "mixed",
                           {"kind": "mixed", "slots": [{"flavor": "Z"}],
                            "tail": {"ambient": [[2, 2, [0, 1]]], "A": []}}))
    return out


def _random_element(rng, amb: fc.Ambient):
    return tuple(rng.randrange(c.size) for c in amb.components)


def random_entries(seed: int, count: int, max_ring_size: int, retries: int = 400) -> list:
    """Seeded subring extensions ``A ⊆ B`` inside small ambients.

    Draws are rejected until ``B`` fits the size cap and ``A`` is small with
    at least ``MIN_IDEALS`` ideals; after ``retries`` failures the slot is skipped.
    """
    out = []
    rng = random.Random(seed)
    for n in range(count):
        for _ in range(retries):
            square_zero = rng.random() < 0.4
            if square_zero:
                comps = [[2, 1, [0, 0, 1]]] * 4
            else:
                comps = [rng.choice(LOCAL_POOL if rng.random() < 0.7 else FIELD_POOL)
                         for _ in range(rng.randint(1, 4))]
            amb = fc.Ambient(tuple(fc.AmbientComponent(p, k, tuple(f)) for p, k, f in comps))
            if square_zero:
                # index 1 is the residue t, so these generators multiply to zero
                a_gens = [tuple(rng.randint(0, 1) for _ in comps) for _ in range(rng.randint(3, 4))]
            else:
                a_gens = [_random_element(rng, amb) for _ in range(rng.randint(1, 3))]
            extra = rng.randint(0, 2) if square_zero else rng.randint(1, 3)
            b_gens = a_gens + [_random_element(rng, amb) for _ in range(extra)]
            try:
                B = fc.close_subring(amb, b_gens, cap=max_ring_size)
            except SizeCapExceeded:
                continue
            A = fc.close_subring(amb, a_gens)
            if len(A) > RANDOM_A_CAP or len(A.ideals()) < MIN_IDEALS:
                continue
            doc = {"kind": "finite", "ambient": amb.describe(),
                   "A": [amb.coords(g) for g in a_gens],
                   "B": [amb.coords(g) for g in b_gens[len(a_gens):]]}
            out.append(CorpusEntry(f"random_{seed}_{n:02d}", "finite", doc, source="random"))
            break
    return out


def builtin_corpus(seed: int = 0, profile: str = "small", max_ring_size: int = 64) -> list:
    if profile not in PROFILES:
        raise ConfigInvalid(f"unknown corpus profile {profile!r}")
    entries = golden_entries() + random_entries(seed, PROFILES[profile], max_ring_size)
    return sorted(entries, key=lambda e: e.id)


def load_corpus_file(path: str) -> list:
    """A corpus file is a JSON list of entry objects (``id``, ``doc``, optional ``expected``)."""
    data = load_file(path)
    if not isinstance(data, list):
        raise ParseError(f"{path}: expected a list of corpus entries")
    out = []
    for i, item in enumerate(data):
        if not isinstance(item, dict) or "id" not in item or "doc" not in item:
            raise ParseError(f"{path}: field '[{i}]': needs 'id' and 'doc'")
        doc = item["doc"]
        universe = doc.get("kind") if isinstance(doc, dict) else None
        expectations = [(e["ideal"], e["flags"]) for e in item.get("ideal_expectations", [])]
        out.append(CorpusEntry(str(item["id"]), universe, doc, item.get("expected", {}),
                               expectations, item.get("source", "file")))
    ids = [e.id for e in out]
    if len(set(ids)) != len(ids):
        raise ParseError(f"{path}: duplicate entry ids")
    return sorted(out, key=lambda e: e.id)
