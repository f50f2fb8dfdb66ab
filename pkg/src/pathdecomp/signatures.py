"""Pathway signatures: the memoization key of the basis enumeration.

A signature summarizes a semiformal pathway by its initial state, final
state, width, formal closure, decomposed final states (DFS) and regular
final states (RFS). Two pathways with equal signatures have equal
signatures after appending the same reaction, which is what makes
:func:`extend_signature` well defined.

:func:`signature_of` computes everything from the concrete pathway, with
the DFS taken by brute force over all 2-partitions. It is the oracle for
the incremental :func:`extend_signature`.
"""
from __future__ import annotations

from collections.abc import Collection, Sequence
from dataclasses import dataclass

from .crn import EMPTY, Pathway, Reaction, State, minimal_initial_state, trajectory

#: Longest pathway the exhaustive-partition DFS oracle accepts by default.
ORACLE_MAX_LENGTH = 12


class NotSemiformalError(ValueError):
    pass


def _pair(a: State, b: State) -> tuple:
    return (a, b) if not b < a else (b, a)


@dataclass(frozen=True)
class Signature:
    initial: State
    final: State
    width: int
    formal_closure: State
    dfs: frozenset  # of sorted (State, State) pairs
    rfs: frozenset  # of States

    @property
    def undecomposable(self) -> bool:
        return not self.dfs

    def is_formal(self, formal: Collection[str]) -> bool:
        return self.final.is_within(formal)

    def as_reaction(self) -> Reaction:
        return Reaction(self.initial, self.final)


EMPTY_SIGNATURE = Signature(EMPTY, EMPTY, 0, EMPTY, frozenset(), frozenset())


def formal_closure(p: Sequence[Reaction], formal: Collection[str]) -> State:
    states = trajectory(p)
    if not states[0].is_within(formal):
        raise NotSemiformalError(f"initial state {states[0]} is not formal")
    closure = EMPTY
    for s in states:
        closure = closure.union(s.restrict(formal))
    return closure


def _is_semiformal(p: Sequence[Reaction], formal: Collection[str]) -> bool:
    return minimal_initial_state(p).is_within(formal)


def decomposed_final_states(p: Sequence[Reaction], formal: Collection[str],
                            max_length: int = ORACLE_MAX_LENGTH) -> frozenset:
    """All unordered final-state pairs over semiformal 2-partitions of ``p``.

    Exhaustive over splits of the step sequence into two nonempty,
    order-preserving subsequences. Step 0 is pinned to the first part (the
    pairs are unordered) and a partial split dies as soon as one part would
    need an intermediate it was not given.
    """
    k = len(p)
    if k > max_length:
        raise ValueError(f"pathway length {k} exceeds the oracle cap {max_length}")
    out = set()
    if k < 2:
        return frozenset()

    steps = [(tuple(r.reactants.items()), tuple(r.products.items())) for r in p]
    formal = frozenset(formal)

    def fire(cur: dict, idx: int):
        # one step on a plain dict; None if it would need an outside intermediate
        reactants, products = steps[idx]
        nxt = dict(cur)
        for sp, n in reactants:
            have = nxt.get(sp, 0)
            if have < n:
                if sp not in formal:
                    return None
                have = n
            nxt[sp] = have - n
        for sp, n in products:
            nxt[sp] = nxt.get(sp, 0) + n
        return nxt

    def go(idx: int, a: dict, b: dict, b_used: bool) -> None:
        if idx == k:
            if b_used:
                out.add(_pair(State._from_dict(a), State._from_dict(b)))
            return
        na = fire(a, idx)
        if na is not None:
            go(idx + 1, na, b, b_used)
        if idx > 0:
            nb = fire(b, idx)
            if nb is not None:
                go(idx + 1, a, nb, True)

    go(0, {}, {}, False)
    return frozenset(out)


def is_decomposable(p: Sequence[Reaction], formal: Collection[str]) -> bool:
    """Does some 2-partition of ``p`` into semiformal parts exist?

    Backtracking over step assignments; each part's running state is kept
    so a part that would need an intermediate from outside is cut at once.
    """
    k = len(p)
    if k < 2:
        return False

    def go(idx: int, states: list, used: list) -> bool:
        if idx == k:
            return used[0] and used[1]
        rxn = p[idx]
        for side in ((0,) if idx == 0 else (0, 1)):
            cur = states[side]
            need = rxn.reactants.deficit(cur)
            if need and not need.is_within(formal):
                continue
            nxt = list(states)
            nxt[side] = (cur + need).step(rxn.reactants, rxn.products)
            u = list(used)
            u[side] = True
            if go(idx + 1, nxt, u):
                return True
        return False

    return go(0, [EMPTY, EMPTY], [False, False])


def regular_final_states(p: Sequence[Reaction], formal: Collection[str]) -> frozenset:
    """Final states that ``p`` would need if each potential turning point were real.

    For every step j that could be a turning point, emit the least T covering
    the formal part of every state from S_j on. Candidates are deduplicated
    but not minimized against each other.
    """
    if not p:
        return frozenset()
    states = trajectory(p)
    init = states[0]
    if not init.is_within(formal):
        raise NotSemiformalError(f"initial state {init} is not formal")
    formal_parts = [s.restrict(formal) for s in states]
    out = set()
    for j in range(1, len(states)):
        if not all(formal_parts[i].issubset(init) for i in range(j)):
            break  # the condition only gets harder for later j
        before = states[j - 1] - p[j - 1].reactants
        if before.restrict(formal):
            continue
        t = EMPTY
        for fp in formal_parts[j:]:
            t = t.union(fp)
        out.add(t)
    return frozenset(out)


def signature_of(p: Sequence[Reaction], formal: Collection[str],
                 max_length: int = ORACLE_MAX_LENGTH) -> Signature:
    p = tuple(p)
    states = trajectory(p)
    if not states[0].is_within(formal):
        raise NotSemiformalError(f"initial state {states[0]} is not formal")
    return Signature(
        initial=states[0],
        final=states[-1],
        width=max(len(s) for s in states),
        formal_closure=formal_closure(p, formal),
        dfs=decomposed_final_states(p, formal, max_length),
        rfs=regular_final_states(p, formal),
    )


def extend_signature(sig: Signature, rxn: Reaction,
                     formal: Collection[str]) -> Signature | None:
    """Signature of ``p + (rxn)`` given only the signature of ``p``.

    Returns ``None`` when the extension is not semiformal, i.e. ``rxn``
    needs an intermediate species that ``p`` does not leave behind.
    """
    R, P = rxn.reactants, rxn.products
    final = sig.final
    # Extra molecules the initial state must supply; every earlier state grows by it.
    delta = R.deficit(final)
    if delta and not delta.is_within(formal):
        return None
    initial = sig.initial + delta
    new_final = (final + delta).step(R, P)
    new_formal_final = new_final.restrict(formal)
    width = max(sig.width + len(delta), len(new_final))
    closure = (sig.formal_closure + delta).union(new_formal_final)

    dfs = set()
    if sig.width > 0 and R.is_within(formal):
        # rxn alone is semiformal and forms the second part
        dfs.add(_pair(final, P))
    for t1, t2 in sig.dfs:
        for keep, grow in ((t1, t2), (t2, t1)):
            d = R.deficit(grow)
            if d.is_within(formal):
                dfs.add(_pair(keep, grow + d - R + P))

    if delta:
        # a turning point must clear all formal species; new ones invalidate the old
        rfs = set()
    else:
        rfs = {t.union(new_formal_final) for t in sig.rfs}
    if sig.formal_closure == sig.initial and final.restrict(formal).issubset(R):
        rfs.add(P.restrict(formal))

    return Signature(initial, new_final, width, closure, frozenset(dfs), frozenset(rfs))


def signature_by_extension(p: Sequence[Reaction], formal: Collection[str]) -> Signature | None:
    sig = EMPTY_SIGNATURE
    for rxn in p:
        sig = extend_signature(sig, rxn, formal)
        if sig is None:
            return None
    return sig


@dataclass(frozen=True)
class ReducedSignature:
    """Projection of a :class:`Signature` that still determines every future step.

    Joining a reaction to one side of a decomposition depends only on the
    intermediate species that side has left over, and a new turning point
    depends on the formal closure only through ``closure == initial``. Both
    projections are preserved by extension, so memoizing on this key yields
    the same initial/final/width/RFS/decomposability facts as the full
    signature while merging far more pathways.
    """

    initial: State
    final: State
    width: int
    closed: bool  # formal closure equals the initial state
    dfs: frozenset  # pairs of intermediate-only States
    rfs: frozenset

    @property
    def undecomposable(self) -> bool:
        return not self.dfs

    def as_reaction(self) -> Reaction:
        return Reaction(self.initial, self.final)


EMPTY_REDUCED = ReducedSignature(EMPTY, EMPTY, 0, True, frozenset(), frozenset())


def reduce_signature(sig: Signature, formal: Collection[str]) -> ReducedSignature:
    inter = lambda s: s.deficit(s.restrict(formal))
    return ReducedSignature(
        sig.initial, sig.final, sig.width, sig.formal_closure == sig.initial,
        frozenset(_pair(inter(a), inter(b)) for a, b in sig.dfs), sig.rfs)


def extend_reduced(sig: ReducedSignature, rxn: Reaction,
                   formal: Collection[str]) -> ReducedSignature | None:
    """:func:`extend_signature` on the reduced key."""
    R, P = rxn.reactants, rxn.products
    final = sig.final
    delta = R.deficit(final)
    if delta and not delta.is_within(formal):
        return None
    initial = sig.initial + delta
    new_final = (final + delta).step(R, P)
    new_formal_final = new_final.restrict(formal)
    width = max(sig.width + len(delta), len(new_final))
    closed = sig.closed and new_formal_final.issubset(initial)

    dfs = set()
    r_inter = R.deficit(R.restrict(formal))
    if r_inter:
        p_inter = P.deficit(P.restrict(formal))
        for t1, t2 in sig.dfs:
            if r_inter.issubset(t2):
                dfs.add(_pair(t1, t2 - r_inter + p_inter))
            if r_inter.issubset(t1):
                dfs.add(_pair(t2, t1 - r_inter + p_inter))
    else:
        if sig.width > 0:
            dfs.add(_pair(final.deficit(final.restrict(formal)), P.deficit(P.restrict(formal))))
        p_inter = P.deficit(P.restrict(formal))
        for t1, t2 in sig.dfs:
            dfs.add(_pair(t1, t2 + p_inter))
            dfs.add(_pair(t2, t1 + p_inter))

    if delta:
        rfs = set()
    else:
        rfs = {t.union(new_formal_final) for t in sig.rfs}
    if sig.closed and final.restrict(formal).issubset(R):
        rfs.add(P.restrict(formal))

    return ReducedSignature(initial, new_final, width, closed, frozenset(dfs), frozenset(rfs))


def is_prime_formal(sig, formal: Collection[str]) -> bool:
    return (sig.initial.is_within(formal) and sig.final.is_within(formal)
            and not sig.dfs)


def is_regular_prime(sig, formal: Collection[str]) -> bool:
    if not is_prime_formal(sig, formal):
        raise ValueError("regularity test applies to prime formal signatures only")
    return sig.final in sig.rfs


def implements_formal_reaction(p: Sequence[Reaction], formal: Collection[str]) -> bool:
    """Direct turning-point scan: does formal pathway ``p`` implement (S, T)?"""
    states = trajectory(p)
    init, fin = states[0], states[-1]
    if not (init.is_within(formal) and fin.is_within(formal)):
        return False
    fparts = [s.restrict(formal) for s in states]
    for j in range(1, len(states)):
        if (all(fparts[i].issubset(init) for i in range(j))
                and all(fparts[i].issubset(fin) for i in range(j, len(states)))
                and not (states[j - 1] - p[j - 1].reactants).restrict(formal)):
            return True
    return False
