"""Reader and writer for the ``.crn`` text format.

One statement per line::

    # comment
    formal: A B C
    intermediate: i j
    fuel: g t
    waste: W
    label: A1=A A2=A B1=B
    interpret: j=A+B
    A + B -> C + D
    2A <=> i
    i -> 0

``<=>`` expands into the forward and the reverse reaction. An empty side or
``0`` stands for the empty multiset. Species without a declaration follow
the case convention (leading uppercase means formal).
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

from .crn import CRN, Reaction, State, default_is_formal

SPECIES_RE = re.compile(r"[A-Za-z][A-Za-z0-9_']*")
TERM_RE = re.compile(r"\s*(\d+)?\s*([A-Za-z][A-Za-z0-9_']*)\s*$")
KINDS = ("formal", "intermediate", "fuel", "waste")
DIRECTIVES = KINDS + ("label", "interpret")


class CrnSyntaxError(ValueError):
    def __init__(self, message: str, line: int, column: int = 1):
        self.line = line
        self.column = column
        super().__init__(f"line {line}, column {column}: {message}")


@dataclass
class CrnDocument:
    reactions: List[Reaction] = field(default_factory=list)
    declarations: Dict[str, List[str]] = field(
        default_factory=lambda: {k: [] for k in KINDS})
    labels: Dict[str, str] = field(default_factory=dict)
    hints: Dict[str, State] = field(default_factory=dict)
    positions: List[int] = field(default_factory=list, compare=False)

    @property
    def species(self) -> set:
        out = set()
        for r in self.reactions:
            out |= r.species()
        for names in self.declarations.values():
            out |= set(names)
        return out

    def kind_of(self, sp: str) -> str:
        for kind in KINDS:
            if sp in self.declarations[kind]:
                return kind
        if sp in self.labels:
            return "formal"
        return "formal" if default_is_formal(sp) else "intermediate"

    @property
    def fuels(self) -> frozenset:
        return frozenset(self.declarations["fuel"])

    @property
    def wastes(self) -> frozenset:
        return frozenset(self.declarations["waste"])

    @property
    def formal_species(self) -> frozenset:
        """Species playing the formal role (wastes included, fuels excluded)."""
        return frozenset(sp for sp in self.species
                         if self.kind_of(sp) in ("formal", "waste"))

    def to_crn(self) -> CRN:
        return CRN(self.reactions, self.formal_species, self.species)


def parse_state(text: str, line: int = 1, offset: int = 0) -> State:
    """Parse one side of a reaction, e.g. ``2A + B`` or ``0``."""
    text_s = text.strip()
    if text_s in ("", "0", "∅"):
        return State()
    counts: Dict[str, int] = {}
    col = offset
    for term in text.split("+"):
        m = TERM_RE.match(term)
        if not m:
            raise CrnSyntaxError(f"bad term {term.strip()!r}", line, col + 1)
        n = int(m.group(1)) if m.group(1) else 1
        counts[m.group(2)] = counts.get(m.group(2), 0) + n
        col += len(term) + 1
    return State(counts)


def _split_arrow(stmt: str, line: int) -> Tuple[str, str, bool, int]:
    for arrow, rev in (("<=>", True), ("->", False)):
        pos = stmt.find(arrow)
        if pos >= 0:
            rhs = stmt[pos + len(arrow):]
            if "->" in rhs or "<=>" in rhs:
                raise CrnSyntaxError("more than one arrow", line, pos + 1)
            return stmt[:pos], rhs, rev, pos + len(arrow)
    raise CrnSyntaxError("expected '->' or '<=>'", line, 1)


def parse_reactions(stmt: str, line: int = 1) -> List[Reaction]:
    lhs, rhs, rev, rpos = _split_arrow(stmt, line)
    r = Reaction(parse_state(lhs, line, 0), parse_state(rhs, line, rpos))
    return [r, r.reverse()] if rev else [r]


def parse_reaction(stmt: str) -> Reaction:
    rxns = parse_reactions(stmt)
    if len(rxns) != 1:
        raise ValueError("expected a single irreversible reaction")
    return rxns[0]


def _parse_names(body: str, line: int, col: int) -> List[str]:
    names = body.replace(",", " ").split()
    for name in names:
        if not SPECIES_RE.fullmatch(name):
            raise CrnSyntaxError(f"bad species name {name!r}", line, col + 1)
    return names


def parse_crn(text: str) -> CrnDocument:
    doc = CrnDocument()
    for lineno, raw in enumerate(text.splitlines(), 1):
        stmt = raw.split("#", 1)[0].rstrip()
        if not stmt.strip():
            continue
        head, sep, body = stmt.partition(":")
        key = head.strip().lower()
        if sep and key in DIRECTIVES:
            col = len(head) + 1
            if key in KINDS:
                doc.declarations[key].extend(_parse_names(body, lineno, col))
            else:
                for item in body.split():
                    name, eq, value = item.partition("=")
                    if not eq or not SPECIES_RE.fullmatch(name):
                        raise CrnSyntaxError(f"expected NAME=VALUE, got {item!r}", lineno, col + 1)
                    if key == "label":
                        if not SPECIES_RE.fullmatch(value):
                            raise CrnSyntaxError(f"bad label target {value!r}", lineno, col + 1)
                        doc.labels[name] = value
                    else:
                        doc.hints[name] = parse_state(value, lineno, col)
            continue
        for rxn in parse_reactions(stmt, lineno):
            if rxn.trivial:
                raise CrnSyntaxError(f"trivial reaction {rxn}", lineno, 1)
            if rxn not in doc.reactions:
                doc.reactions.append(rxn)
                doc.positions.append(lineno)
    _check_declarations(doc)
    return doc


def _check_declarations(doc: CrnDocument) -> None:
    seen: Dict[str, str] = {}
    for kind in KINDS:
        for sp in doc.declarations[kind]:
            if seen.get(sp, kind) != kind:
                raise CrnSyntaxError(f"species {sp!r} declared both {seen[sp]} and {kind}", 0)
            seen[sp] = kind
    for sp in doc.labels:
        if seen.get(sp) in ("fuel", "waste", "intermediate"):
            raise CrnSyntaxError(f"labeled species {sp!r} declared {seen[sp]}", 0)


def serialize(doc: CrnDocument) -> str:
    lines = []
    for kind in KINDS:
        if doc.declarations[kind]:
            lines.append(f"{kind}: " + " ".join(doc.declarations[kind]))
    if doc.labels:
        lines.append("label: " + " ".join(f"{k}={v}" for k, v in doc.labels.items()))
    if doc.hints:
        lines.append("interpret: " + " ".join(
            f"{k}={_compact(v)}" for k, v in doc.hints.items()))
    lines.extend(str(r) for r in doc.reactions)
    return "\n".join(lines) + "\n"


def _compact(s: State) -> str:
    return "+".join(sp if n == 1 else f"{n}{sp}" for sp, n in s.items()) or "0"


def load_crn(path) -> CrnDocument:
    with open(path, encoding="utf-8") as fh:
        return parse_crn(fh.read())


def crn_from_text(text: str, formal=None) -> CRN:
    """Shortcut: reactions separated by newlines or ``;``."""
    doc = parse_crn(text.replace(";", "\n"))
    crn = doc.to_crn()
    return crn if formal is None else crn.with_formal(formal)
