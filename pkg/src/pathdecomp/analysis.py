"""Tidiness and regularity verdicts, basis comparison and equivalence."""
from __future__ import annotations

import logging
from collections import deque
from collections.abc import Callable, Collection, Iterable
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .crn import (CRN, Pathway, Reaction, State, minimal_initial_state,
                  pathway_str, trajectory)
from .enumerator import (DEFAULT_CAPS, BasisResult, EnumerationCaps,
                         EnumerationLimitError, find_basis)
from .signatures import (ORACLE_MAX_LENGTH, decomposed_final_states,
                         implements_formal_reaction)

log = logging.getLogger(__name__)

PASS = "pass"
FAIL = "fail"
INCONCLUSIVE = "inconclusive"
EXIT_CODES = {PASS: 0, FAIL: 1, INCONCLUSIVE: 2}


@dataclass
class Verdict:
    status: str
    reason: str = ""
    counterexample: Optional[Pathway] = None
    detail: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.status not in EXIT_CODES:
            raise ValueError(f"unknown verdict status {self.status!r}")

    @property
    def passed(self) -> bool:
        return self.status == PASS

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.status]

    def __str__(self) -> str:
        s = f"{self.status.upper()}: {self.reason}" if self.reason else self.status.upper()
        if self.counterexample is not None:
            s += f"\n  witness: {pathway_str(self.counterexample)}"
        return s


def inconclusive(err: EnumerationLimitError, **detail) -> Verdict:
    return Verdict(INCONCLUSIVE, str(err), detail={"cap": err.cap, "limit": err.limit, **detail})


def minimize_pathway(p: Pathway, violates: Callable[[Pathway], bool]) -> Pathway:
    """Greedily drop steps while ``violates`` keeps holding. No optimality claim."""
    p = tuple(p)
    changed = True
    while changed:
        changed = False
        for i in range(len(p)):
            q = p[:i] + p[i + 1:]
            if q and violates(q):
                p = q
                changed = True
                break
    return p


# -- regularity ------------------------------------------------------------

def _irregular_prime(formal: Collection[str]) -> Callable[[Pathway], bool]:
    def check(p: Pathway) -> bool:
        if len(p) > ORACLE_MAX_LENGTH:
            return False
        states = trajectory(p)
        if not (states[0].is_within(formal) and states[-1].is_within(formal)):
            return False
        if decomposed_final_states(p, formal):
            return False
        return not implements_formal_reaction(p, formal)
    return check


def check_regularity(basis: BasisResult) -> Verdict:
    """Every prime formal pathway must have its final state among its RFS."""
    formal = basis.crn.formal
    irregular = [(s, p) for s, p in basis.prime_formal() if s.final not in s.rfs]
    if not irregular:
        return Verdict(PASS, "every prime formal pathway has a turning point")
    sig, witness = irregular[0]
    witness = minimize_pathway(witness, _irregular_prime(formal))
    rxn = sig.as_reaction()
    return Verdict(
        FAIL,
        f"not regular: prime formal pathway implementing {rxn} has no turning point",
        witness,
        {"stage": "regularity", "basis_reaction": rxn,
         "regular_final_states": sorted(sig.rfs),
         "irregular_classes": len(irregular)})


# -- tidiness --------------------------------------------------------------

def find_closing_pathway(start: State, reactions: Sequence[Reaction],
                         formal: Collection[str], max_size: int,
                         strong: bool = True) -> Optional[Pathway]:
    """Breadth-first search for a pathway from ``start`` to a formal state.

    With ``strong`` only reactions whose reactants hold no formal species are
    used. States larger than ``max_size`` are not entered.
    """
    if start.is_within(formal):
        return ()
    usable = [r for r in reactions
              if not strong or not (r.reactants.species() & set(formal))]
    seen = {start: None}
    queue = deque([start])
    while queue:
        s = queue.popleft()
        for r in usable:
            if not r.reactants.issubset(s):
                continue
            t = s.step(r.reactants, r.products)
            if len(t) > max_size or t in seen:
                continue
            seen[t] = (s, r)
            if t.is_within(formal):
                steps = []
                cur = t
                while seen[cur] is not None:
                    prev, rxn = seen[cur]
                    steps.append(rxn)
                    cur = prev
                return tuple(reversed(steps))
            queue.append(t)
    return None


def _closable(args) -> bool:
    start, reactions, formal, max_size = args
    return find_closing_pathway(start, reactions, formal, max_size) is not None


def check_strong_tidiness(crn: CRN, basis: BasisResult, jobs: int = 1) -> Verdict:
    """Every undecomposable semiformal pathway needs a strong closing pathway.

    Closers are searched only up to the enumeration width bound, which is
    enough for undecomposable pathways. If every stuck pathway can still be
    closed by consuming formal species, the verdict notes the CRN may be
    weakly tidy; that never turns a failure into a pass.
    """
    formal = crn.formal
    cap = basis.w_max
    candidates = [(s, p) for s, p in basis.undecomposable()
                  if not s.final.is_within(formal)]
    finals = sorted({s.final for s, _ in candidates})
    args = [(t, crn.reactions, formal, cap) for t in finals]
    if jobs > 1 and len(args) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            ok = dict(zip(finals, pool.map(_closable, args, chunksize=8)))
    else:
        ok = {a[0]: _closable(a) for a in args}
    stuck = [(s, p) for s, p in candidates if not ok[s.final]]
    if not stuck:
        return Verdict(PASS, f"all {len(candidates)} open undecomposable pathway "
                             f"classes have strong closing pathways")
    weak = all(find_closing_pathway(s.final, crn.reactions, formal, cap, strong=False)
               is not None for s, _ in stuck)
    sig, witness = stuck[0]

    def still_stuck(q: Pathway) -> bool:
        if not minimal_initial_state(q).is_within(formal):
            return False
        t = trajectory(q)[-1]
        return (not t.is_within(formal)
                and find_closing_pathway(t, crn.reactions, formal, cap) is None)

    witness = minimize_pathway(witness, still_stuck)
    stuck_state = trajectory(witness)[-1]
    reason = (f"not strongly tidy: intermediates in {stuck_state} cannot be "
              f"cleared without consuming formal species")
    if weak:
        reason += " (weakly tidy: a closer consuming formal species exists for every stuck pathway)"
    return Verdict(FAIL, reason, witness,
                   {"stage": "tidiness", "stuck_state": stuck_state,
                    "weakly_tidy": weak, "stuck_classes": len(stuck)})


# -- comparison --------------------------------------------------------------

def bases_equal(b1: Iterable[Reaction], b2: Iterable[Reaction]) -> bool:
    return ({r for r in b1 if not r.trivial} == {r for r in b2 if not r.trivial})


def analyze(crn: CRN, caps: EnumerationCaps = DEFAULT_CAPS, jobs: int = 1):
    """find_basis plus both checks; returns (basis, tidiness, regularity).

    Raises :class:`EnumerationLimitError` if the basis search hits a cap.
    """
    basis = find_basis(crn, caps)
    return basis, check_strong_tidiness(crn, basis, jobs), check_regularity(basis)


def basis_difference(b1: BasisResult, b2: BasisResult) -> tuple:
    """Nontrivial reactions only in ``b1`` and only in ``b2``, canonically sorted."""
    only1 = sorted(b1.nontrivial - b2.nontrivial, key=Reaction.sort_key)
    only2 = sorted(b2.nontrivial - b1.nontrivial, key=Reaction.sort_key)
    return only1, only2


def pd_equivalent(crn1: CRN, crn2: CRN, caps: EnumerationCaps = DEFAULT_CAPS,
                  names: Sequence[str] = ("first", "second"), jobs: int = 1) -> Verdict:
    """Pathway decomposition equivalence of two CRNs.

    Both must be strongly tidy and regular; a CRN that is not fails the
    verdict with ``detail["stage"]`` naming the violated precondition. The
    basis difference is computed regardless and stored in the detail, so a
    report can show both problems at once.
    """
    bases, checks = {}, []
    for name, crn in zip(names, (crn1, crn2)):
        try:
            basis, tidy, regular = analyze(crn, caps, jobs)
        except EnumerationLimitError as err:
            return inconclusive(err, stage="basis", crn=name, bases=bases)
        bases[name] = basis
        checks += [(name, tidy), (name, regular)]
    b1, b2 = (bases[n] for n in names)
    only1, only2 = basis_difference(b1, b2)
    detail = {"bases": bases, f"only_in_{names[0]}": only1, f"only_in_{names[1]}": only2,
              "checks": {f"{n}:{c.detail.get('stage', 'ok')}": c.status for n, c in checks}}
    for name, check in checks:
        if not check.passed:
            return Verdict(FAIL, f"precondition failed for {name} CRN: {check.reason}",
                           check.counterexample, {**detail, **check.detail, "crn": name})
    if not only1 and not only2:
        return Verdict(PASS, "formal bases are identical up to trivial reactions",
                       detail={**detail, "stage": "basis"})
    culprit, owner = (only1[0], b1) if only1 else (only2[0], b2)
    parts = [f"only in {n}: " + ", ".join(map(str, only))
             for n, only in zip(names, (only1, only2)) if only]
    return Verdict(FAIL, "formal bases differ; " + "; ".join(parts),
                   owner.elementary_witnesses[culprit],
                   {**detail, "stage": "basis", "basis_reaction": culprit})


# -- reachability oracle -----------------------------------------------------

class ReachableStates(frozenset):
    """Frozenset of states with a ``truncated`` flag."""
    truncated: bool = False


def bounded_reachability(crn: CRN, initial: State, max_state_size: int = 8,
                         max_states: int = 100_000) -> ReachableStates:
    """Breadth-first closure of ``initial`` skipping states above ``max_state_size``."""
    if max_state_size <= 0 or max_states <= 0:
        raise ValueError("caps must be positive")
    seen = {initial}
    queue = deque([initial])
    truncated = False
    while queue and not truncated:
        s = queue.popleft()
        for r in crn.reactions:
            if not r.reactants.issubset(s):
                continue
            t = s.step(r.reactants, r.products)
            if len(t) > max_state_size or t in seen:
                continue
            if len(seen) >= max_states:
                truncated = True
                break
            seen.add(t)
            queue.append(t)
    out = ReachableStates(seen)
    out.truncated = truncated
    return out


def formal_reachability(crn: CRN, initial: State, max_state_size: int = 8,
                        max_states: int = 100_000) -> frozenset:
    reach = bounded_reachability(crn, initial, max_state_size, max_states)
    return frozenset(s for s in reach if s.is_within(crn.formal))
