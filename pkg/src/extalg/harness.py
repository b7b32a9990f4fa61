"""Suite execution, single-instance analysis, witness replay and report assembly."""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from . import __version__
from . import finite_core as fc
from . import module_props as mp
from . import prufer_theory as pt
from .corpus import CorpusEntry, builtin_corpus, load_corpus_file
from .errors import ConfigInvalid, HypothesesFail, ParseError
from .formats import load_file, parse_extension, parse_ideal, parse_poset
from .laws import LAWS, LawContext, LawOutcome, ideal_flags, resolve_laws
from .poset_finiteness import FINITE_NOTE, check_equivalence, check_hypotheses, maximal_elements

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class SuiteConfig:
    corpus: str = "builtin"
    profile: str = "small"
    laws: str = "all"
    seed: int = 0
    max_ring_size: int = 64
    oracle_cap: int = mp.ORACLE_CAP
    poset_bound: int = 30
    bounds: pt.SweepBounds = field(default_factory=pt.SweepBounds)

    def validate(self):
        for name in ("max_ring_size", "oracle_cap", "poset_bound"):
            if getattr(self, name) < 1:
                raise ConfigInvalid(f"{name} must be positive")
        resolve_laws(self.laws)

    def context(self) -> LawContext:
        return LawContext(self.oracle_cap, self.bounds, self.poset_bound)

    def to_json(self):
        return {"corpus": self.corpus, "profile": self.profile, "laws": resolve_laws(self.laws),
                "seed": self.seed, "max_ring_size": self.max_ring_size,
                "oracle_cap": self.oracle_cap, "poset_bound": self.poset_bound,
                "sweep": self.bounds.describe()}


@dataclass
class SuiteReport:
    config: dict
    entries: list
    laws: list
    notes: list

    @property
    def failures(self) -> int:
        return sum(row["failures"] for row in self.laws)

    @property
    def exit_code(self) -> int:
        return 1 if self.failures else 0

    def to_json(self):
        return jsonable({"schema_version": SCHEMA_VERSION,
                         "tool": {"name": "extalg", "version": __version__},
                         "config": self.config, "entries": self.entries, "laws": self.laws,
                         "notes": self.notes, "status": "fail" if self.failures else "pass"})

    def summary(self) -> str:
        lines = [f"extalg {__version__}: {len(self.entries)} entries, "
                 f"{len(self.laws)} laws, {self.failures} failures"]
        for row in self.laws:
            flag = "PASS" if not row["failures"] else "FAIL"
            lines.append(f"  {flag} {row['law']:<30} entries={row['entries']:<3} "
                         f"instances={row['instances']:<6} vacuous={row['vacuous']:<5} "
                         f"failures={row['failures']}")
        lines.extend(f"  note: {n}" for n in self.notes)
        return "\n".join(lines) + "\n"


def jsonable(obj):
    """Convert verdict payload types to JSON-ready values with deterministic order."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, (set, frozenset)):
        return sorted(jsonable(v) for v in obj)
    if isinstance(obj, Fraction):
        return str(obj)
    return obj


def _threads() -> int:
    raw = os.environ.get("EXTALG_THREADS")
    if raw is None or raw == "":
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise ConfigInvalid(f"EXTALG_THREADS must be an integer, got {raw!r}") from None
    if n < 1:
        raise ConfigInvalid("EXTALG_THREADS must be at least 1")
    return n


def _run_entry(args):
    entry, law_ids, ctx = args
    rows = []
    for name in law_ids:
        outcome = LAWS[name](entry, ctx)
        for f in outcome.failures:
            f.setdefault("replay", {"file": dict(entry.doc), "props": [name],
                                    "observed": {name: False}})
        rows.append(outcome.to_json())
    return {"id": entry.id, "universe": entry.universe, "description": entry.describe(),
            "golden": entry.golden, "source": entry.source, "laws": rows}


def load_corpus(config: SuiteConfig) -> list:
    if config.corpus == "builtin":
        return builtin_corpus(config.seed, config.profile, config.max_ring_size)
    return load_corpus_file(config.corpus)


def run_suite(corpus: list | None = None, laws=None, config: SuiteConfig | None = None) -> SuiteReport:
    config = config or SuiteConfig()
    if laws is not None:
        config = SuiteConfig(**{**config.__dict__, "laws": laws if isinstance(laws, str) else ",".join(laws)})
    config.validate()
    law_ids = resolve_laws(config.laws)
    entries = sorted(corpus if corpus is not None else load_corpus(config), key=lambda e: e.id)
    ctx = config.context()
    jobs = [(e, law_ids, ctx) for e in entries]
    n = _threads()
    if n > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=n) as pool:
            results = list(pool.map(_run_entry, jobs))
    else:
        results = [_run_entry(j) for j in jobs]
    aggregate = []
    for name in law_ids:
        rows = [r for res in results for r in res["laws"] if r["law"] == name]
        applied = [r for r in rows if r["instances"]]
        row = {"law": name, "description": LAWS[name].description,
               "entries": len(applied),
               "instances": sum(r["instances"] for r in rows),
               "vacuous": sum(r["vacuous"] for r in rows),
               "failures": sum(len(r["failures"]) for r in rows)}
        counts = {}
        for r in rows:
            for k, v in r.get("counts", {}).items():
                counts[k] = counts.get(k, 0) + v
        if counts:
            row["counts"] = counts
        aggregate.append(row)
    notes = [pt.DESK_SCALE_NOTE, FINITE_NOTE,
             "regular-ideal laws on finite extensions are counted as vacuous: only A is B-regular there"]
    return SuiteReport(jsonable(config.to_json()), results, aggregate, notes)


# --- analyze ---------------------------------------------------------------------------------

IDEAL_PROPS = ("flat", "faithfully_flat", "locally_principal", "regular", "B_regular",
               "B_invertible", "idempotent", "flatness_oracle", "partition_of_unity",
               "lemma_technical_family", "finite_generators_of")
EXT_PROPS = ("weakly_surjective", "prufer", "almost_prufer", "finite_character",
             "theorem_2_1", "main_theorem", "prufer_ring_corollary")
POSET_PROPS = ("maximal_elements", "hypotheses", "equivalence")


def _ext_verdict(ext, prop):
    if prop == "weakly_surjective":
        return pt.is_weakly_surjective(ext)
    if prop == "prufer":
        return pt.is_prufer(ext)
    if prop == "almost_prufer":
        return pt.is_almost_prufer(ext)
    if prop == "finite_character":
        return pt.has_finite_character(ext)
    if prop == "theorem_2_1":
        return pt.verify_theorem_2_1(ext)
    if prop == "main_theorem":
        return pt.verify_main_theorem(ext)
    return pt.verify_prufer_ring_corollary(ext.A)


def _ideal_verdict(ext, I, prop, doc):
    if prop in ("flat", "faithfully_flat", "locally_principal", "regular", "B_regular",
                "B_invertible", "idempotent"):
        value = ideal_flags(I, ext, [prop])[prop]
        detail = {"flat": mp.is_flat, "faithfully_flat": mp.is_faithfully_flat,
                  "locally_principal": mp.is_locally_principal,
                  "regular": mp.is_regular_ideal}.get(prop)
        v = detail(I) if detail else mp.PropertyVerdict(prop, value)
        return mp.PropertyVerdict(prop, value, v.witness, evidence=v.evidence)
    if prop == "flatness_oracle":
        if not isinstance(I, fc.Submodule):
            raise ParseError("field 'ideal': the flatness oracle needs a finite ideal")
        return mp.flatness_oracle(I)
    if prop == "partition_of_unity":
        if not mp.is_B_invertible(I, ext):
            return mp.PropertyVerdict(prop, False, {"reason": "not B-invertible"})
        pou = mp.partition_of_unity(I, ext)
        return mp.PropertyVerdict(prop, mp.verify_partition(pou, I, ext),
                                  evidence={"pairs": len(pou.pairs)})
    if prop == "lemma_technical_family":
        fam = doc.get("family")
        if not isinstance(fam, list):
            raise ParseError("field 'family': expected a list of ideals")
        members = [parse_ideal(ext, m, f"family[{i}]") for i, m in enumerate(fam)]
        return pt.verify_lemma_technical(I, pt.comaximal_family(I, members, ext), ext)
    a0 = parse_ideal(ext, doc["a0"], "a0") if "a0" in doc else None
    g = pt.construct_finite_generators(I, ext, a0)
    return mp.PropertyVerdict(prop, g.equal, evidence={"generators": len(g.generators)})


def analyze_doc(doc, props, source="<doc>") -> dict:
    props = [p.strip() for p in props.split(",")] if isinstance(props, str) else list(props)
    if not props:
        raise ConfigInvalid("no properties requested")
    verdicts = []
    if isinstance(doc, dict) and doc.get("kind") == "poset":
        P = parse_poset(doc)
        for prop in props:
            if prop == "maximal_elements":
                verdicts.append({"name": prop, "holds": True, "evidence": {"elements": maximal_elements(P)}})
            elif prop == "hypotheses":
                verdicts.extend(v.to_json() for v in check_hypotheses(P))
            elif prop == "equivalence":
                try:
                    verdicts.append(check_equivalence(P).to_json())
                except HypothesesFail as e:
                    verdicts.append({"name": "poset_equivalence", "holds": False,
                                     "evidence": {"skipped": str(e)}})
            else:
                raise ConfigInvalid(f"unknown poset property {prop!r}")
        return jsonable({"schema_version": SCHEMA_VERSION, "source": source, "verdicts": verdicts})
    ext = parse_extension(doc)
    ideal = parse_ideal(ext, doc["ideal"]) if "ideal" in doc else None
    for prop in props:
        if prop in LAWS:
            entry = CorpusEntry(str(doc.get("id", "analyze")), doc["kind"], doc)
            outcome = LAWS[prop](entry, LawContext())
            verdicts.append({"name": prop, "holds": outcome.holds, "instances": outcome.instances,
                             "witness": [f["witness"] for f in outcome.failures] or None})
        elif prop in EXT_PROPS:
            verdicts.append(_ext_verdict(ext, prop).to_json())
        elif prop in IDEAL_PROPS:
            if ideal is None:
                raise ParseError(f"field 'ideal': property {prop!r} needs an ideal in the file")
            verdicts.append(_ideal_verdict(ext, ideal, prop, doc).to_json())
        else:
            raise ConfigInvalid(f"unknown property {prop!r}")
    for v in verdicts:
        if v.get("witness") is None:
            v.pop("witness", None)
    return jsonable({"schema_version": SCHEMA_VERSION, "source": source, "verdicts": verdicts})


def analyze(file: str, properties) -> dict:
    return analyze_doc(load_file(file), properties, file)


def replay_failure(failure: dict) -> bool:
    """True iff re-running the recorded properties reproduces the recorded values."""
    rp = failure["replay"]
    result = analyze_doc(rp["file"], rp["props"])
    got = {v["name"]: v["holds"] for v in result["verdicts"]}
    return all(got.get(k) == want for k, want in rp["observed"].items())


def iter_failures(report: SuiteReport):
    for entry in report.entries:
        for row in entry["laws"]:
            for f in row["failures"]:
                yield entry["id"], row["law"], f
