"""Small builders shared by the test modules."""
from fractions import Fraction as Q

from extalg.formats import parse_extension


def field(p):
    return [p, 1, [0, 1]]


def finite_ext(ambient, A=(), B=None):
    doc = {"kind": "finite", "ambient": ambient, "A": list(A)}
    if B is not None:
        doc["B"] = B
    return parse_extension(doc)


def mixed_ext(slots, tail=None):
    doc = {"kind": "mixed", "slots": slots}
    if tail is not None:
        doc["tail"] = tail
    return parse_extension(doc)


def num(ring, n):
    """The image of the integer ``n`` in a ring of integer residues."""
    return ring.ambient.element([n] * len(ring.ambient.components))


def nums(ring, values):
    return frozenset(num(ring, v) for v in values)


Z6_TAIL = {"ambient": [field(2), field(3)], "A": []}

__all__ = ["Q", "field", "finite_ext", "mixed_ext", "num", "nums", "Z6_TAIL", "ACCEPTANCE_LINES"]


# one line per acceptance criterion, printed at the end of the session
ACCEPTANCE_LINES: list = []
