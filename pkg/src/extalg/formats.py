"""JSON descriptions of extensions, ideals and posets.

Finite extension::

    {"kind": "finite", "ambient": [[p, k, [f0, f1, ...]], ...],
     "A": [generator coords...], "B": [generator coords...] | "ambient",
     "ideal": {"generators": [coords...]}}

``B`` defaults to ``A``.  Mixed extension::

    {"kind": "mixed", "slots": [{"flavor": "Z"}, {"flavor": "local", "p": 2}, ...],
     "tail": {"ambient": ..., "A": [...], "B": [...]},
     "ideal": {"slots": ["12"], "tail": [coords...]}}

Poset::

    {"kind": "poset", "elements": [...], "covers": [[x, y], ...], "gamma": [...]}
"""
from __future__ import annotations

import json
from fractions import Fraction
from typing import Any

from . import finite_core as fc
from . import mixed_symbolic as ms
from .errors import ExtAlgError, ParseError
from .poset_finiteness import FinitePoset


def _fail(path: str, msg: str):
    raise ParseError(f"field '{path}': {msg}")


def _need(doc, key, path, kind=None):
    if not isinstance(doc, dict) or key not in doc:
        _fail(f"{path}.{key}" if path else key, "missing")
    value = doc[key]
    if kind is not None and not isinstance(value, kind):
        _fail(f"{path}.{key}" if path else key, f"expected {kind.__name__}")
    return value


def load_json_text(text: str, source: str = "<input>"):
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"{source}: line {e.lineno} column {e.colno}: {e.msg}") from None


def load_file(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise ParseError(f"{path}: cannot read ({e.strerror})") from None
    return load_json_text(text, path)


# --- finite -------------------------------------------------------------------------------------


def parse_ambient(doc, path="ambient") -> fc.Ambient:
    if not isinstance(doc, list) or not doc:
        _fail(path, "expected a nonempty list of [p, k, f] triples")
    comps = []
    for i, c in enumerate(doc):
        if not (isinstance(c, list) and len(c) == 3 and isinstance(c[0], int)
                and isinstance(c[1], int) and isinstance(c[2], list)):
            _fail(f"{path}[{i}]", "expected [p, k, [f coefficients]]")
        try:
            comps.append(fc.AmbientComponent(c[0], c[1], tuple(c[2])))
        except (ExtAlgError, ValueError, TypeError) as e:
            _fail(f"{path}[{i}]", str(e))
    return fc.Ambient(tuple(comps))


def parse_element(amb: fc.Ambient, doc, path: str):
    try:
        return amb.element(doc)
    except (ValueError, TypeError, KeyError, IndexError) as e:
        _fail(path, f"bad element {doc!r}: {e}")


def _parse_ring(amb, gens_doc, path, cap):
    if not isinstance(gens_doc, list):
        _fail(path, "expected a list of generators")
    gens = [parse_element(amb, g, f"{path}[{i}]") for i, g in enumerate(gens_doc)]
    return fc.close_subring(amb, gens, cap)


def parse_finite_extension(doc, path="", cap: int = fc.DEFAULT_CAP) -> fc.FiniteExtension:
    amb = parse_ambient(_need(doc, "ambient", path), f"{path}.ambient" if path else "ambient")
    A = _parse_ring(amb, doc.get("A", []), f"{path}.A" if path else "A", cap)
    bdoc = doc.get("B")
    if bdoc is None:
        B = A
    elif bdoc == "ambient":
        B = _full_ambient(amb, cap)
    else:
        gens = list(A.generators) + [parse_element(amb, g, f"{path}.B[{i}]" if path else f"B[{i}]") for i, g in enumerate(bdoc)]
        B = fc.close_subring(amb, gens, cap)
    try:
        return fc.FiniteExtension(A, B)
    except ExtAlgError as e:
        _fail(path or "B", str(e))


def _full_ambient(amb: fc.Ambient, cap: int) -> fc.FiniteRing:
    gens = []
    for i, c in enumerate(amb.components):
        for d in range(c.degree):
            coords = []
            for j, cj in enumerate(amb.components):
                if j != i:
                    coords.append(0)
                else:
                    coords.append([1 if t == d else 0 for t in range(cj.degree)])
            gens.append(amb.element(coords))
    return fc.close_subring(amb, gens, cap)


# --- mixed --------------------------------------------------------------------------------------


def parse_flavor(doc, path) -> ms.Flavor:
    kind = _need(doc, "flavor", path, str)
    try:
        if kind == "local":
            return ms.Flavor.local(_need(doc, "p", path, int))
        if kind == "inverted":
            return ms.Flavor.inverted(_need(doc, "primes", path, list))
        return ms.Flavor(kind)
    except ValueError as e:
        _fail(path, str(e))


def parse_mixed_extension(doc, path="", cap: int = fc.DEFAULT_CAP) -> ms.MixedExtension:
    slots = _need(doc, "slots", path, list)
    flavors = tuple(parse_flavor(s, f"slots[{i}]") for i, s in enumerate(slots))
    tail_doc = doc.get("tail")
    tail_A = tail_B = None
    if tail_doc is not None:
        t = parse_finite_extension(tail_doc, "tail", cap)
        tail_A, tail_B = t.A, t.B
    try:
        return ms.MixedExtension(ms.MixedRing(flavors, tail_A), tail_B)
    except ExtAlgError as e:
        _fail("tail", str(e))


def parse_extension(doc, cap: int = fc.DEFAULT_CAP):
    if not isinstance(doc, dict):
        raise ParseError("top level: expected an object")
    kind = doc.get("kind")
    if kind == "finite":
        return parse_finite_extension(doc, "", cap)
    if kind == "mixed":
        return parse_mixed_extension(doc, "", cap)
    _fail("kind", f"expected 'finite' or 'mixed', got {kind!r}")


def _rational(value, path) -> Fraction:
    try:
        return Fraction(str(value))
    except (ValueError, ZeroDivisionError):
        _fail(path, f"not a rational: {value!r}")


def parse_ideal(ext, doc, path="ideal"):
    if isinstance(ext, fc.FiniteExtension):
        gens = _need(doc, "generators", path, list)
        amb = ext.A.ambient
        xs = [parse_element(amb, g, f"{path}.generators[{i}]") for i, g in enumerate(gens)]
        bad = [i for i, x in enumerate(xs) if x not in ext.A]
        if bad:
            _fail(f"{path}.generators[{bad[0]}]", "not an element of A")
        return ext.A.ideal(xs)
    slots = _need(doc, "slots", path, list)
    if len(slots) != ext.r:
        _fail(f"{path}.slots", f"expected {ext.r} values")
    vals = [_rational(v, f"{path}.slots[{i}]") for i, v in enumerate(slots)]
    tail = []
    if ext.tail_B is not None:
        amb = ext.tail_B.ambient
        tail = [parse_element(amb, g, f"{path}.tail[{i}]") for i, g in enumerate(doc.get("tail", []))]
        if any(x not in ext.A.tail for x in tail):
            _fail(f"{path}.tail", "tail generators must lie in the tail of A")
    return ext.ideal(vals, tail)


def ideal_doc(ext, I) -> dict:
    if isinstance(I, fc.Submodule):
        return {"generators": [I.carrier.fmt(x) for x in I.generators]}
    out = {"slots": [str(q) for q in I.slots]}
    if I.tail is not None:
        out["tail"] = [I.tail.carrier.fmt(x) for x in I.tail.generators]
    return out


def parse_poset(doc) -> FinitePoset:
    if not isinstance(doc, dict):
        raise ParseError("top level: expected an object")
    elements = _need(doc, "elements", "", list)
    covers = doc.get("covers", [])
    if not isinstance(covers, list) or any(not (isinstance(c, list) and len(c) == 2) for c in covers):
        _fail("covers", "expected a list of [lower, upper] pairs")
    gamma = doc.get("gamma")
    return FinitePoset.from_covers([str(e) for e in elements],
                                   [(str(a), str(b)) for a, b in covers],
                                   None if gamma is None else [str(g) for g in gamma])


def dump(doc: Any) -> str:
    """Canonical JSON text used for every emitted report and file."""
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
