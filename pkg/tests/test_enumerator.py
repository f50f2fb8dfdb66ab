from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pathdecomp.crn import width
from pathdecomp.enumerator import (EnumerationCaps, EnumerationLimitError,
                                   enumerate_signatures, explore, find_basis,
                                   naive_basis_oracle)
from pathdecomp.parser import crn_from_text
from pathdecomp.signatures import (EMPTY_SIGNATURE, extend_signature,
                                   reduce_signature, signature_of)

from conftest import DELAYED_CHOICE, crns, path, rx

SMALL = EnumerationCaps(max_width_bound=6, max_iterations=10, max_memo=50_000)


def brute_signatures(crn, w, max_len):
    """signature_of over every semiformal pathway with width <= w, by walking."""
    out = set()

    def walk(p, sig):
        out.add(signature_of(p, crn.formal))
        if len(p) == max_len:
            return
        for r in crn.reactions:
            nxt = extend_signature(sig, r, crn.formal)
            if nxt is not None and nxt.width <= w:
                walk(p + (r,), nxt)

    walk((), EMPTY_SIGNATURE)
    return out


def test_enumeration_at_width_one_matches_brute_force():
    crn = crn_from_text("A -> i; i -> B")
    sigs = enumerate_signatures(crn, 1)
    assert sigs == brute_signatures(crn, 1, max_len=6)
    assert sigs == {EMPTY_SIGNATURE, signature_of(path("A -> i"), crn.formal),
                    signature_of(path("A -> i", "i -> B"), crn.formal)}


def test_enumeration_terminates_on_infinitely_many_width_one_pathways():
    crn = crn_from_text("A -> i; i -> j; j -> i; j -> B")
    sigs = enumerate_signatures(crn, 1)
    assert sigs == brute_signatures(crn, 1, max_len=8)


def test_width_zero_holds_only_the_empty_pathway():
    assert enumerate_signatures(crn_from_text("A -> i; i -> B"), 0) == {EMPTY_SIGNATURE}


def test_memo_cap():
    with pytest.raises(EnumerationLimitError) as info:
        explore(crn_from_text("A -> i; i + B -> j; j -> C"), 6,
                EnumerationCaps(max_memo=3))
    assert info.value.cap == "max_memo"


def test_full_mode_with_formal_creation_stops_at_the_memo_cap():
    # one part may borrow ever more A, so full DFS sides grow without bound
    crn = crn_from_text("2A -> 0; 0 -> 2A")
    with pytest.raises(EnumerationLimitError) as info:
        explore(crn, 2, EnumerationCaps(max_memo=20_000), mode="full", prune=False)
    assert info.value.cap == "max_memo"
    assert len(explore(crn, 2, mode="reduced", prune=False)) < 10


def test_caps_validate():
    with pytest.raises(ValueError):
        EnumerationCaps(max_width_bound=0)
    assert EnumerationCaps().as_dict() == {
        "max_width_bound": 12, "max_iterations": 20, "max_memo": 10**6}


# -- find_basis ---------------------------------------------------------------

def test_formal_crn_is_its_own_basis(family):
    res = find_basis(family["crn1"])
    assert res.formal_basis == set(family["crn1"].reactions)
    assert res.w_max == 6 and res.iterations == 3


def test_composed_unit_pathways():
    res = find_basis(crn_from_text("A -> i; i -> B; B -> j; j -> C"))
    assert res.nontrivial == {rx("A -> B"), rx("B -> C")}


def test_delayed_choice_basis():
    res = find_basis(crn_from_text(DELAYED_CHOICE))
    assert res.formal_basis == {rx("A -> B"), rx("A -> C"), rx("A -> D")}
    assert res.elementary_witnesses[rx("A -> B")] == path("A -> i", "i -> B")


def test_crn2_basis_contains_the_wrong_reaction(family):
    res = find_basis(family["crn2"])
    assert rx("2A + B -> C + D") in res.nontrivial
    assert rx("A + B -> C + D") not in res.nontrivial


@pytest.mark.parametrize("text", ["A -> i; i -> i + i; i -> 0",
                                  "A -> i; i -> i + i; i -> B"])
def test_unbounded_width_hits_a_cap(text):
    with pytest.raises(EnumerationLimitError) as info:
        find_basis(crn_from_text(text))
    assert info.value.cap == "max_width_bound"


def test_iteration_cap():
    with pytest.raises(EnumerationLimitError) as info:
        find_basis(crn_from_text("A -> i; i + B -> C"), EnumerationCaps(max_iterations=1))
    assert info.value.cap == "max_iterations"


def test_empty_crn_rejected():
    from pathdecomp.crn import CRN
    with pytest.raises(ValueError):
        find_basis(CRN([]))


def test_witnesses_reproduce_their_basis_reactions(family):
    for name in ("crn2", "crn5"):
        crn = family[name]
        res = find_basis(crn)
        for rxn, p in res.elementary_witnesses.items():
            sig = signature_of(p, crn.formal)
            assert sig.as_reaction() == rxn
            assert not sig.dfs
            assert width(p) <= res.w


@pytest.mark.parametrize("text, expected", [
    ("A + B -> C + D; C + A -> C + C", {"A + B -> C + D", "A + C -> 2C"}),
    ("A -> i; i -> B", {"A -> B"}),
    ("A -> i; i -> A", {"A -> A"}),
])
def test_naive_oracle_examples(text, expected):
    assert naive_basis_oracle(crn_from_text(text), max_len=4) == {rx(e) for e in expected}


# -- the search modes agree -------------------------------------------------------

def _summary(res):
    undec = sorted((s.initial, s.final, s.width, s.rfs) for s, _ in res.undecomposable())
    return res.formal_basis, res.w, res.w_max, undec


@settings(max_examples=40)
@given(crns(max_reactions=3))
def test_modes_and_pruning_agree(crn):
    try:
        ref = find_basis(crn, SMALL, mode="packed", prune=True)
    except EnumerationLimitError:
        return
    for mode in ("full", "reduced", "packed"):
        for prune in (False, True):
            try:
                res = find_basis(crn, SMALL, mode=mode, prune=prune)
            except EnumerationLimitError as err:
                # the unpruned full table is larger; only the memo cap may differ
                assert err.cap == "max_memo"
                continue
            assert res.formal_basis == ref.formal_basis
            assert res.w == ref.w and res.w_max == ref.w_max
            assert _summary(res)[3] == _summary(ref)[3]


def test_full_table_projects_onto_reduced_table(family):
    crn = family["crn4"]
    full = explore(crn, 4, mode="full", prune=False)
    red = explore(crn, 4, mode="reduced", prune=False)
    assert {reduce_signature(s, crn.formal) for s in full} == set(red)


@settings(max_examples=30)
@given(crns(max_reactions=3))
def test_basis_agrees_with_naive_oracle(crn):
    try:
        res = find_basis(crn, SMALL)
        oracle = naive_basis_oracle(crn, max_len=6, max_width=res.w_max,
                                    max_visits=200_000)
    except EnumerationLimitError:
        return
    assert oracle <= res.formal_basis
    short = {r for r, p in res.elementary_witnesses.items() if len(p) <= 6}
    assert short <= oracle
