"""Hybrid verification: pathway decomposition, then weak bisimulation.

Implementation species are labeled by the user as implementing a target
species or as waste; fuels are stripped first. The labeled species (plus
any extra species the caller promotes) play the formal role during basis
enumeration, and the resulting basis is compared to the target under the
natural interpretation.
"""
from __future__ import annotations

import logging
from collections.abc import Collection, Iterable, Mapping
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, FrozenSet, List, Optional

from .analysis import (FAIL, INCONCLUSIVE, PASS, Verdict, check_regularity,
                       check_strong_tidiness, inconclusive)
from .crn import CRN, EMPTY, Reaction, State
from .enumerator import DEFAULT_CAPS, EnumerationCaps, EnumerationLimitError, find_basis

log = logging.getLogger(__name__)

DEFAULT_DEPTH_CAP = 8
DEFAULT_SEARCH_CAP = 64


@dataclass(frozen=True)
class Labeling:
    """User labels for an implementation CRN.

    ``assignment`` maps a species to the target species it implements, or to
    ``None`` for a waste. ``hints`` optionally interpret extra species that
    the V search may promote to the formal role.
    """

    fuels: FrozenSet[str] = frozenset()
    assignment: Mapping[str, Optional[str]] = field(default_factory=dict)
    hints: Mapping[str, State] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "fuels", frozenset(self.fuels))
        object.__setattr__(self, "assignment", dict(self.assignment))
        object.__setattr__(self, "hints", dict(self.hints))
        both = self.fuels & set(self.assignment)
        if both:
            raise ValueError(f"species both fuel and labeled: {sorted(both)}")

    @property
    def tagged(self) -> frozenset:
        return frozenset(self.assignment)

    @property
    def wastes(self) -> frozenset:
        return frozenset(s for s, t in self.assignment.items() if t is None)

    @classmethod
    def identity(cls, species: Iterable[str], fuels: Iterable[str] = ()) -> "Labeling":
        return cls(frozenset(fuels), {s: s for s in species})

    @classmethod
    def from_document(cls, doc, target_species: Collection[str] = ()) -> "Labeling":
        """Labels from a parsed implementation file.

        Explicit ``label:`` entries win; wastes map to ``None``; any other
        formal-kind species implements the target species of the same name.
        """
        assignment: Dict[str, Optional[str]] = {}
        for sp in sorted(doc.species):
            kind = doc.kind_of(sp)
            if sp in doc.labels:
                assignment[sp] = doc.labels[sp]
            elif kind == "waste":
                assignment[sp] = None
            elif kind == "formal":
                assignment[sp] = sp
        return cls(doc.fuels, assignment, doc.hints)


class Interpretation:
    """Additive map from tagged species to target states."""

    def __init__(self, mapping: Mapping[str, State]):
        self.mapping: Dict[str, State] = dict(mapping)

    @property
    def domain(self) -> frozenset:
        return frozenset(self.mapping)

    def __getitem__(self, sp: str) -> State:
        return self.mapping[sp]

    def __eq__(self, other) -> bool:
        return isinstance(other, Interpretation) and self.mapping == other.mapping

    def __repr__(self) -> str:
        body = ", ".join(f"{k}->{v}" for k, v in sorted(self.mapping.items()))
        return f"Interpretation({body})"

    def __call__(self, s: State) -> State:
        out: Dict[str, int] = {}
        for sp, n in s.items():
            if sp not in self.mapping:
                raise ValueError(f"species {sp!r} has no interpretation")
            for t, k in self.mapping[sp].items():
                out[t] = out.get(t, 0) + n * k
        return State(out)

    def reaction(self, r: Reaction) -> Reaction:
        return Reaction(self(r.reactants), self(r.products))

    def extended(self, extra: Mapping[str, State]) -> "Interpretation":
        return Interpretation({**self.mapping, **extra})


def natural_interpretation(labeling: Labeling) -> Interpretation:
    return Interpretation({sp: EMPTY if t is None else State.of(t)
                           for sp, t in labeling.assignment.items()})


def remove_fuels(crn: CRN, fuels: Collection[str]) -> CRN:
    """Delete fuel species everywhere; reactions left trivial are dropped."""
    fuels = frozenset(fuels)
    if not fuels:
        return crn
    keep = lambda s: State({sp: n for sp, n in s.items() if sp not in fuels})
    out = []
    for r in crn.reactions:
        q = Reaction(keep(r.reactants), keep(r.products))
        if q.trivial:
            log.warning("dropping %s: trivial after fuel removal", r)
            continue
        out.append(q)
    species = frozenset(crn.species) - fuels
    return CRN(out, frozenset(crn.formal) - fuels, species)


# -- weak bisimulation -------------------------------------------------------

def minimal_covering_states(need: State, m: Interpretation,
                            candidates: Iterable[str]) -> List[State]:
    """Minimal states S of candidate species with m(S) containing ``need``."""
    suppliers = {x: sorted(s for s in candidates if m[s].count(x))
                 for x in need.species()}
    found = set()

    def grow(s: State):
        missing = need.deficit(m(s))
        if not missing:
            found.add(s)
            return
        x = min(missing.species())
        for sp in suppliers[x]:
            grow(s + State.of(sp))

    grow(EMPTY)
    minimal = []
    for s in found:
        if not any(need.issubset(m(s - State.of(sp))) for sp in s.species()):
            minimal.append(s)
    return sorted(minimal)


def _permissive_from(start: State, goal: Reaction, basis: CRN, m: Interpretation,
                     depth_cap: int) -> Optional[bool]:
    """True if ``goal`` can fire after trivial moves, False if provably not,
    None if the depth cap cut the search short."""
    silent = [r for r in basis.reactions if m.reaction(r).trivial]
    firing = [r for r in basis.reactions if m.reaction(r) == goal]
    seen = {start}
    frontier = [start]
    for depth in range(depth_cap + 1):
        for s in frontier:
            if any(r.reactants.issubset(s) for r in firing):
                return True
        if depth == depth_cap:
            break
        nxt = []
        for s in frontier:
            for r in silent:
                if r.reactants.issubset(s):
                    t = s.step(r.reactants, r.products)
                    if t not in seen:
                        seen.add(t)
                        nxt.append(t)
        if not nxt:
            return False
        frontier = nxt
    return None if frontier else False


def weak_bisim_equivalent(basis: CRN, target: CRN, m: Interpretation,
                          depth_cap: int = DEFAULT_DEPTH_CAP) -> Verdict:
    """Reaction, atomic and permissive checks of ``basis`` against ``target``."""
    outside = basis.species - m.domain
    if outside:
        raise ValueError(f"basis species without interpretation: {sorted(outside)}")
    targets = set(target.reactions)
    for r in sorted(basis.reactions, key=Reaction.sort_key):
        mr = m.reaction(r)
        if not mr.trivial and mr not in targets:
            return Verdict(FAIL, f"reaction check: {r} is interpreted as {mr}, "
                                 f"which is not a target reaction",
                           (r,), {"stage": "reaction", "basis_reaction": r,
                                  "interpreted": mr})
    domain = sorted(basis.species)
    for x in sorted(target.species):
        if not any(m[s] == State.of(x) for s in domain):
            return Verdict(FAIL, f"atomic check: no species is interpreted as exactly {{{x}}}",
                           detail={"stage": "atomic", "species": x})
    capped = []
    for goal in sorted(target.reactions, key=Reaction.sort_key):
        for start in minimal_covering_states(goal.reactants, m, domain):
            ok = _permissive_from(start, goal, basis, m, depth_cap)
            if ok is False:
                return Verdict(FAIL, f"permissive check: {goal} cannot fire from {start}",
                               detail={"stage": "permissive", "target_reaction": goal,
                                       "start": start})
            if ok is None:
                capped.append((goal, start))
    if capped:
        goal, start = capped[0]
        return Verdict(INCONCLUSIVE,
                       f"permissive check for {goal} from {start} exceeded depth_cap={depth_cap}",
                       detail={"stage": "permissive", "cap": "depth_cap", "limit": depth_cap,
                               "target_reaction": goal, "start": start})
    return Verdict(PASS, "basis is weakly bisimilar to the target under the interpretation",
                   detail={"stage": "bisimulation"})


# -- pipeline ----------------------------------------------------------------

def _verify_with(target: CRN, crn: CRN, m: Interpretation, V: frozenset,
                 caps: EnumerationCaps, depth_cap: int, jobs: int) -> Verdict:
    tagged = crn.with_formal(V)
    try:
        basis = find_basis(tagged, caps)
    except EnumerationLimitError as err:
        return inconclusive(err, stage="basis", V=V)
    base = {"V": V, "basis": basis}
    for check in (check_strong_tidiness(tagged, basis, jobs), check_regularity(basis)):
        if not check.passed:
            return Verdict(FAIL, f"precondition failed: {check.reason}",
                           check.counterexample, {**check.detail, **base})
    basis_crn = CRN(basis.sorted_basis(), V, V & tagged.species)
    verdict = weak_bisim_equivalent(basis_crn, target, m, depth_cap)
    verdict.detail.update(base)
    return verdict


def hybrid_verify(target: CRN, impl: CRN, labeling: Labeling,
                  V: Optional[Collection[str]] = None,
                  caps: EnumerationCaps = DEFAULT_CAPS,
                  depth_cap: int = DEFAULT_DEPTH_CAP,
                  search_v: bool = False, search_cap: int = DEFAULT_SEARCH_CAP,
                  jobs: int = 1) -> Verdict:
    """Fuel removal, basis w.r.t. V, tidiness/regularity, weak bisimulation.

    V defaults to the tagged species. With ``search_v`` the supersets of the
    tagged set built from species that have an interpretation hint are
    tried in order of size (at most ``search_cap`` of them) and the first
    passing choice wins.
    """
    crn = remove_fuels(impl, labeling.fuels)
    X = labeling.tagged
    m = natural_interpretation(labeling)
    if V is not None:
        V = frozenset(V)
        if not X <= V:
            raise ValueError(f"V must contain the tagged species; missing {sorted(X - V)}")
        extra = V - X
        unknown = extra - set(labeling.hints)
        if unknown:
            raise ValueError(f"species in V lack an interpretation: {sorted(unknown)}")
        return _verify_with(target, crn, m.extended({s: labeling.hints[s] for s in extra}),
                            V, caps, depth_cap, jobs)
    if not search_v:
        return _verify_with(target, crn, m, X, caps, depth_cap, jobs)

    pool = sorted(s for s in labeling.hints if s in crn.species and s not in X)
    tried = []
    for k in range(len(pool) + 1):
        for extra in combinations(pool, k):
            if len(tried) >= search_cap:
                break
            Vc = X | frozenset(extra)
            v = _verify_with(target, crn, m.extended({s: labeling.hints[s] for s in extra}),
                             Vc, caps, depth_cap, jobs)
            tried.append(v)
            if v.passed:
                v.detail["candidates_tried"] = len(tried)
                return v
    first = tried[0]
    status = INCONCLUSIVE if any(v.status == INCONCLUSIVE for v in tried) else FAIL
    note = f"no V among {len(tried)} candidates passed"
    if len(pool) and len(tried) >= search_cap:
        note += f" (search_cap={search_cap} reached)"
    detail = {**first.detail, "candidates_tried": len(tried)}
    if status == INCONCLUSIVE:
        detail.setdefault("cap", "search_cap")
    return Verdict(status, f"{note}; with V = tagged species: {first.reason}",
                   first.counterexample, detail)
