"""Multiset semantics of chemical reaction networks.

Species are plain strings. Whether a species is formal or intermediate is a
property of the CRN it lives in (``CRN.formal``), so the pathway helpers below
take the formal species set explicitly.
"""
from __future__ import annotations

from collections import Counter
from collections.abc import Collection, Iterable, Mapping
from dataclasses import dataclass
from typing import Tuple


class OccurrenceError(ValueError):
    """A reaction was applied to a state lacking some of its reactants."""

    def __init__(self, missing: "State", state: "State", rxn: "Reaction"):
        self.missing = missing
        super().__init__(f"reaction {rxn} cannot occur in {state}: missing {missing}")


def default_is_formal(name: str) -> bool:
    """Case convention: a leading uppercase letter marks a formal species."""
    return name[:1].isupper()


class State:
    """An immutable multiset of species with a canonical (sorted) form.

    ``len(S)`` is the total number of molecules; iteration yields species
    with multiplicity.
    """

    __slots__ = ("_items", "_hash", "_size")

    def __init__(self, species: Mapping[str, int] | Iterable[str] = ()):
        if isinstance(species, State):
            items = species._items
        else:
            counts = species if isinstance(species, Mapping) else Counter(species)
            for sp, n in counts.items():
                if n < 0:
                    raise ValueError(f"negative count for {sp!r}")
            items = tuple(sorted((sp, n) for sp, n in counts.items() if n))
        self._set(items)

    def _set(self, items: Tuple[Tuple[str, int], ...]) -> None:
        # hash and size are filled in lazily; most states are short-lived
        self._items = items
        self._hash = None
        self._size = None

    @classmethod
    def _from_items(cls, items) -> "State":
        obj = cls.__new__(cls)
        obj._set(tuple(items))
        return obj

    @classmethod
    def _from_dict(cls, counts: dict) -> "State":
        return cls._from_items(sorted((sp, n) for sp, n in counts.items() if n > 0))

    @classmethod
    def of(cls, *species: str) -> "State":
        return cls(species)

    # container protocol

    def counts(self) -> dict:
        return dict(self._items)

    def items(self):
        return self._items

    def species(self) -> frozenset:
        return frozenset(sp for sp, _ in self._items)

    def count(self, sp: str) -> int:
        for s, n in self._items:
            if s == sp:
                return n
        return 0

    def __len__(self) -> int:
        if self._size is None:
            self._size = sum(n for _, n in self._items)
        return self._size

    def __iter__(self):
        for sp, n in self._items:
            for _ in range(n):
                yield sp

    def __bool__(self) -> bool:
        return bool(self._items)

    def __contains__(self, sp) -> bool:
        return any(s == sp for s, _ in self._items)

    def __eq__(self, other) -> bool:
        if not isinstance(other, State):
            return NotImplemented
        return self._items == other._items

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self._items)
        return self._hash

    def __lt__(self, other: "State") -> bool:
        return self._items < other._items

    # multiset arithmetic

    def __add__(self, other: "State") -> "State":
        if not other._items:
            return self
        if not self._items:
            return other
        d = dict(self._items)
        for sp, n in other._items:
            d[sp] = d.get(sp, 0) + n
        return State._from_dict(d)

    def __sub__(self, other: "State") -> "State":
        """Strict difference; raises if ``other`` is not contained in ``self``."""
        if not other._items:
            return self
        d = dict(self._items)
        for sp, n in other._items:
            left = d.get(sp, 0) - n
            if left < 0:
                raise ValueError(f"{other} is not contained in {self}")
            d[sp] = left
        return State._from_dict(d)

    def deficit(self, other: "State") -> "State":
        """The part of ``self`` not covered by ``other``: max(self - other, 0)."""
        if not self._items:
            return self
        od = dict(other._items)
        return State._from_items(
            (sp, n - od.get(sp, 0)) for sp, n in self._items if n > od.get(sp, 0))

    def step(self, consumed: "State", produced: "State") -> "State":
        """``self - consumed + produced`` in one pass (strict on ``consumed``)."""
        d = dict(self._items)
        for sp, n in consumed._items:
            left = d.get(sp, 0) - n
            if left < 0:
                raise ValueError(f"{consumed} is not contained in {self}")
            d[sp] = left
        for sp, n in produced._items:
            d[sp] = d.get(sp, 0) + n
        return State._from_dict(d)

    def issubset(self, other: "State") -> bool:
        if len(self) > len(other):
            return False
        od = dict(other._items)
        return all(n <= od.get(sp, 0) for sp, n in self._items)

    def union(self, other: "State") -> "State":
        """Species-wise maximum."""
        if not other._items:
            return self
        if not self._items:
            return other
        d = dict(self._items)
        for sp, n in other._items:
            if n > d.get(sp, 0):
                d[sp] = n
        return State._from_dict(d)

    def restrict(self, keep: Collection[str]) -> "State":
        return State._from_items((sp, n) for sp, n in self._items if sp in keep)

    def is_within(self, allowed: Collection[str]) -> bool:
        return all(sp in allowed for sp, _ in self._items)

    def __str__(self) -> str:
        if not self._items:
            return "∅"
        return " + ".join(sp if n == 1 else f"{n}{sp}" for sp, n in self._items)

    def __repr__(self) -> str:
        return "{" + ", ".join(self) + "}"


EMPTY = State()


@dataclass(frozen=True)
class Reaction:
    """A pair of multisets (reactants, products). Either side may be empty."""

    reactants: State
    products: State

    @classmethod
    def of(cls, reactants: Iterable[str], products: Iterable[str]) -> "Reaction":
        return cls(State(reactants), State(products))

    @property
    def trivial(self) -> bool:
        return self.reactants == self.products

    def reverse(self) -> "Reaction":
        return Reaction(self.products, self.reactants)

    def species(self) -> frozenset:
        return self.reactants.species() | self.products.species()

    def is_formal(self, formal: Collection[str]) -> bool:
        return self.reactants.is_within(formal) and self.products.is_within(formal)

    def sort_key(self):
        return (self.reactants._items, self.products._items)

    def __str__(self) -> str:
        lhs = str(self.reactants) if self.reactants else "0"
        rhs = str(self.products) if self.products else "0"
        return f"{lhs} -> {rhs}"


Pathway = Tuple[Reaction, ...]


class CRN:
    """An ordered set of nontrivial reactions plus a formal/intermediate split.

    Duplicate reactions collapse (first occurrence wins the position).
    ``formal`` defaults to the case convention over all mentioned species.
    """

    def __init__(self, reactions: Iterable[Reaction],
                 formal: Collection[str] | None = None,
                 species: Collection[str] = ()):
        rxns: list = []
        seen = set()
        for r in reactions:
            if r.trivial:
                raise ValueError(f"trivial reaction {r} not allowed in a CRN")
            if r not in seen:
                seen.add(r)
                rxns.append(r)
        self.reactions: Tuple[Reaction, ...] = tuple(rxns)
        universe = set(species)
        for r in rxns:
            universe |= r.species()
        if formal is None:
            formal = {sp for sp in universe if default_is_formal(sp)}
        self.formal: frozenset = frozenset(formal)
        self.species: frozenset = frozenset(universe | self.formal)

    @property
    def intermediates(self) -> frozenset:
        return self.species - self.formal

    def is_formal(self) -> bool:
        return all(r.is_formal(self.formal) for r in self.reactions)

    def with_formal(self, formal: Collection[str]) -> "CRN":
        return CRN(self.reactions, formal, self.species)

    def index(self, rxn: Reaction) -> int:
        return self.reactions.index(rxn)

    def __iter__(self):
        return iter(self.reactions)

    def __len__(self) -> int:
        return len(self.reactions)

    def __eq__(self, other) -> bool:
        if not isinstance(other, CRN):
            return NotImplemented
        return set(self.reactions) == set(other.reactions) and self.formal == other.formal

    def __hash__(self) -> int:
        return hash((frozenset(self.reactions), self.formal))

    def __repr__(self) -> str:
        return "CRN([" + ", ".join(str(r) for r in self.reactions) + "])"


# -- operations ------------------------------------------------------------

def reaction_can_occur(state: State, rxn: Reaction) -> bool:
    return rxn.reactants.issubset(state)


def apply(state: State, rxn: Reaction) -> State:
    """Return ``state - R + P``; raises :class:`OccurrenceError` if R ⊄ state."""
    missing = rxn.reactants.deficit(state)
    if missing:
        raise OccurrenceError(missing, state, rxn)
    return state.step(rxn.reactants, rxn.products)


def minimal_initial_state(p: Iterable[Reaction]) -> State:
    """Pointwise-least state in which every step of ``p`` can occur in turn."""
    need: dict = {}
    cur: dict = {}
    for rxn in p:
        for sp, n in rxn.reactants.items():
            have = cur.get(sp, 0)
            if have < n:
                need[sp] = need.get(sp, 0) + n - have
                have = n
            cur[sp] = have - n
        for sp, n in rxn.products.items():
            cur[sp] = cur.get(sp, 0) + n
    return State._from_dict(need)


def trajectory(p: Iterable[Reaction]) -> list:
    """States S_0..S_k that ``p`` passes through from its minimal initial state."""
    p = tuple(p)
    states = [minimal_initial_state(p)]
    for rxn in p:
        states.append(apply(states[-1], rxn))
    return states


def final_state(p: Iterable[Reaction]) -> State:
    return trajectory(p)[-1]


def width(p: Iterable[Reaction]) -> int:
    return max(len(s) for s in trajectory(p))


def branching_factor(crn: CRN) -> int:
    if not crn.reactions:
        raise ValueError("branching factor of an empty CRN is undefined")
    return max(max(len(r.reactants), len(r.products)) for r in crn.reactions)


def is_formal_state(state: State, formal: Collection[str]) -> bool:
    return state.is_within(formal)


@dataclass(frozen=True)
class PathwayClass:
    semiformal: bool
    formal: bool
    trivial: bool


def classify(p: Iterable[Reaction], formal: Collection[str]) -> PathwayClass:
    states = trajectory(p)
    init, fin = states[0], states[-1]
    semi = init.is_within(formal)
    return PathwayClass(semi, semi and fin.is_within(formal), init == fin)


def pathway_str(p: Iterable[Reaction]) -> str:
    return "(" + ", ".join(str(r) for r in p) + ")"
