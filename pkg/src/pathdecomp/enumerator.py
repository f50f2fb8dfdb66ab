"""Formal basis enumeration with signature memoization.

The search extends pathways one reaction at a time, starting from the empty
pathway, and drops any pathway that stops being semiformal, grows wider than
the current bound, or reproduces a signature already seen. A widening loop
raises the bound until no undecomposable pathway can exist beyond it.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

from .crn import CRN, Pathway, Reaction, branching_factor
from .packed import PackedCRN
from .signatures import (EMPTY_REDUCED, EMPTY_SIGNATURE,
                         extend_reduced, is_decomposable,
                         extend_signature)

log = logging.getLogger(__name__)


class EnumerationLimitError(RuntimeError):
    """A search cap was hit before the enumeration could finish."""

    def __init__(self, cap: str, limit: int, message: str = ""):
        self.cap = cap
        self.limit = limit
        super().__init__(message or f"{cap}={limit} exceeded")


@dataclass(frozen=True)
class EnumerationCaps:
    max_width_bound: int = 12
    max_iterations: int = 20
    max_memo: int = 10**6

    def __post_init__(self):
        for name in ("max_width_bound", "max_iterations", "max_memo"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")

    def as_dict(self) -> dict:
        return {"max_width_bound": self.max_width_bound,
                "max_iterations": self.max_iterations,
                "max_memo": self.max_memo}


DEFAULT_CAPS = EnumerationCaps()


def _stays_decomposable(key) -> bool:
    # A part left with no intermediates lets the other part absorb every
    # later reaction, so no extension can become undecomposable.
    return any(not a for a, _ in key.dfs)


class SignatureTable:
    """Explored signatures with a parent pointer each, for witness recovery.

    Keys are full :class:`Signature` objects (``mode="full"``), reduced ones
    (``"reduced"``), or bit-packed reduced ones (``"packed"``); :meth:`view`
    turns any key into a Signature-like object with State fields.
    """

    def __init__(self, crn: CRN, mode: str, packer: Optional[PackedCRN] = None):
        self.crn = crn
        self.mode = mode
        self.packer = packer
        self.parents: Dict[object, Optional[Tuple[object, int]]] = {}

    def __len__(self) -> int:
        return len(self.parents)

    def __iter__(self):
        return iter(self.parents)

    def __contains__(self, key) -> bool:
        return key in self.parents

    def view(self, key):
        return self.packer.view(key) if self.packer else key

    def views(self) -> list:
        return [self.view(k) for k in self.parents]

    def witness(self, key) -> Pathway:
        steps = []
        entry = self.parents[key]
        while entry is not None:
            parent, idx = entry
            steps.append(self.crn.reactions[idx])
            entry = self.parents[parent]
        return tuple(reversed(steps))

    def undecomposable(self) -> list:
        return [k for k in self.parents if not k.dfs]


def explore(crn: CRN, w: int, caps: EnumerationCaps = DEFAULT_CAPS,
            mode: str = "packed", prune: bool = True) -> SignatureTable:
    """Breadth-first signature enumeration up to width ``w``.

    Visiting pathways by increasing length means the parent chain of each
    signature spells out a shortest pathway carrying it. ``prune`` stops
    expanding signatures whose extensions are all decomposable; they are
    still recorded.
    """
    if w < 0:
        raise ValueError("width bound must be nonnegative")
    formal = crn.formal
    n = len(crn.reactions)
    if mode == "packed":
        packer = PackedCRN(crn, max(w, 1))
        start, extend = packer.empty, packer.extend
    elif mode == "reduced":
        packer = None
        start = EMPTY_REDUCED
        extend = lambda k, i: extend_reduced(k, crn.reactions[i], formal)
    elif mode == "full":
        packer = None
        start = EMPTY_SIGNATURE
        extend = lambda k, i: extend_signature(k, crn.reactions[i], formal)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    table = SignatureTable(crn, mode, packer)
    parents = table.parents
    parents[start] = None
    # Full DFS sides may carry formal molecules borrowed by one part, and with
    # reactions like 0 -> 2A those grow without bound at a fixed width. Charging
    # stored pairs against the memo cap keeps that case from running forever.
    weigh = (lambda k: len(k.dfs)) if mode == "full" else (lambda k: 0)
    stored = 1
    frontier = [start]
    while frontier:
        nxt = []
        for key in frontier:
            for idx in range(n):
                new = extend(key, idx)
                if new is None or new.width > w or new in parents:
                    continue
                parents[new] = (key, idx)
                stored += 1 + weigh(new)
                if prune and _stays_decomposable(new):
                    continue
                nxt.append(new)
        if stored > caps.max_memo:
            raise EnumerationLimitError(
                "max_memo", caps.max_memo,
                f"signature memo exceeded max_memo={caps.max_memo} at width bound {w}")
        frontier = nxt
    return table


def enumerate_signatures(crn: CRN, w: int, caps: EnumerationCaps = DEFAULT_CAPS,
                         mode: str = "full", prune: bool = False) -> frozenset:
    """Signatures of all semiformal pathways of width at most ``w``.

    The defaults follow the textbook procedure (full signatures, no
    pruning); other settings return the corresponding reduced views.
    """
    table = explore(crn, w, caps, mode, prune)
    return frozenset(table.views())


@dataclass
class BasisResult:
    crn: CRN
    formal_basis: frozenset
    elementary_witnesses: Dict[Reaction, Pathway]
    table: SignatureTable = field(repr=False)
    w_max: int
    w: int
    iterations: int

    @property
    def signatures(self) -> frozenset:
        return frozenset(self.table.views())

    @property
    def nontrivial(self) -> frozenset:
        return frozenset(r for r in self.formal_basis if not r.trivial)

    @property
    def trivial(self) -> frozenset:
        return frozenset(r for r in self.formal_basis if r.trivial)

    def pathway_key(self, p: Pathway):
        return (len(p), tuple(self.crn.index(r) for r in p))

    def undecomposable(self) -> list:
        """(signature view, witness) for every undecomposable nonempty pathway
        class, ordered by witness (shortest first, then reaction order)."""
        out = []
        for k in self.table.undecomposable():
            if k.width == 0:
                continue
            out.append((self.table.view(k), self.table.witness(k)))
        out.sort(key=lambda sw: self.pathway_key(sw[1]))
        return out

    def prime_formal(self) -> list:
        formal = self.crn.formal
        return [(s, p) for s, p in self.undecomposable() if s.final.is_within(formal)]

    def sorted_basis(self, include_trivial: bool = False) -> list:
        rs = self.formal_basis if include_trivial else self.nontrivial
        return sorted(rs, key=Reaction.sort_key)


def find_basis(crn: CRN, caps: EnumerationCaps = DEFAULT_CAPS,
               mode: str = "packed", prune: bool = True) -> BasisResult:
    """Compute the formal basis, widening the width bound until it is safe.

    Raises :class:`EnumerationLimitError` when the bound would pass
    ``caps.max_width_bound`` or the loop runs more than ``caps.max_iterations``
    rounds; either usually means the undecomposable width is unbounded.
    """
    if not crn.reactions:
        raise ValueError("cannot compute the formal basis of an empty CRN")
    b = branching_factor(crn)
    w_max = 0
    for iteration in range(1, caps.max_iterations + 1):
        table = explore(crn, w_max, caps, mode, prune)
        w = max(k.width for k in table.undecomposable())
        log.debug("round %d: w_max=%d, %d signatures, w=%d",
                  iteration, w_max, len(table), w)
        if (w + 1) * b <= w_max:
            break
        w_max = (w + 1) * b
        if w_max > caps.max_width_bound:
            raise EnumerationLimitError(
                "max_width_bound", caps.max_width_bound,
                f"width bound exceeded (next bound {w_max} > max_width_bound="
                f"{caps.max_width_bound}); undecomposable width may be unbounded "
                f"or the basis infinite")
    else:
        raise EnumerationLimitError(
            "max_iterations", caps.max_iterations,
            f"widening loop did not settle within max_iterations={caps.max_iterations}")

    result = BasisResult(crn, frozenset(), {}, table, w_max, w, iteration)
    witnesses: Dict[Reaction, Pathway] = {}
    for sig, p in result.prime_formal():
        witnesses.setdefault(sig.as_reaction(), p)
    result.formal_basis = frozenset(witnesses)
    result.elementary_witnesses = witnesses
    return result


def naive_basis_oracle(crn: CRN, max_len: int = 8,
                       max_width: Optional[int] = None,
                       max_visits: Optional[int] = None) -> frozenset:
    """Formal basis by brute force over concrete pathways (no memoization).

    Enumerates every semiformal pathway up to ``max_len`` steps (and
    ``max_width`` if given), keeps the formal ones and tests primality by
    searching for a 2-partition into semiformal parts. ``max_visits`` bounds
    the number of pathways walked; exceeding it raises
    :class:`EnumerationLimitError`.
    """
    formal = crn.formal
    rxns = crn.reactions
    out = set()
    visits = [0]

    def walk(path, initial, current, wid):
        visits[0] += 1
        if max_visits is not None and visits[0] > max_visits:
            raise EnumerationLimitError("max_visits", max_visits)
        if path and current.is_within(formal):
            if not is_decomposable(path, formal):
                out.add(Reaction(initial, current))
        if len(path) == max_len:
            return
        for rxn in rxns:
            need = rxn.reactants.deficit(current)
            if not need.is_within(formal):
                continue
            cur = (current + need).step(rxn.reactants, rxn.products)
            nw = max(wid + len(need), len(cur))
            if max_width is not None and nw > max_width:
                continue
            walk(path + (rxn,), initial + need, cur, nw)

    walk((), EMPTY_SIGNATURE.initial, EMPTY_SIGNATURE.final, 0)
    return frozenset(out)
