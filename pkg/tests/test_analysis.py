from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pathdecomp.analysis import (FAIL, INCONCLUSIVE, PASS, Verdict, analyze,
                                 bases_equal, bounded_reachability,
                                 check_regularity, check_strong_tidiness,
                                 find_closing_pathway, minimize_pathway,
                                 pd_equivalent)
from pathdecomp.crn import trajectory
from pathdecomp.enumerator import EnumerationCaps, EnumerationLimitError, find_basis
from pathdecomp.parser import crn_from_text

from conftest import REVERSIBLE, S, crns, path, rx

SMALL = EnumerationCaps(max_width_bound=6, max_iterations=10, max_memo=50_000)


def tidiness(text):
    crn = crn_from_text(text)
    return check_strong_tidiness(crn, find_basis(crn))


# -- regularity ------------------------------------------------------------------

def test_crn5_is_regular(family):
    assert check_regularity(find_basis(family["crn5"])).status == PASS


def test_reversible_scheme_is_irregular():
    v = check_regularity(find_basis(crn_from_text(REVERSIBLE)))
    assert v.status == FAIL
    assert v.counterexample == path("A -> i", "i + B -> j", "j -> k + C",
                                    "k + C -> j", "j -> i + B", "i -> A")
    states = trajectory(v.counterexample)
    assert states[0] == states[-1] == S("A", "B")
    assert v.detail["basis_reaction"] == rx("A + B -> A + B")


@settings(max_examples=25)
@given(crns(inter=()))
def test_formal_crns_are_regular_and_tidy(crn):
    basis = find_basis(crn, SMALL)
    assert check_regularity(basis).status == PASS
    assert check_strong_tidiness(crn, basis).status == PASS


# -- tidiness -----------------------------------------------------------------------

def test_strongly_tidy():
    assert tidiness("A -> i + j; i + j -> B").status == PASS


def test_not_tidy():
    v = tidiness("A -> i; i + B -> C")
    assert v.status == FAIL
    assert v.counterexample == path("A -> i")
    assert v.detail["stuck_state"] == S("i")
    assert not v.detail["weakly_tidy"]
    assert "weakly tidy" not in v.reason


def test_weakly_tidy_is_annotated_but_still_fails():
    v = tidiness("A -> i + D; D -> E; E + i -> C")
    assert v.status == FAIL
    assert v.detail["weakly_tidy"]
    assert "weakly tidy" in v.reason


def test_crn4_gets_stuck_holding_i(family):
    v = check_strong_tidiness(family["crn4"], find_basis(family["crn4"]))
    assert v.status == FAIL
    assert "i" in trajectory(v.counterexample)[-1]


def test_closing_pathway_search():
    crn = crn_from_text("A -> i + j; i -> k; k + j -> B; j + C -> D")
    closer = find_closing_pathway(S("i", "j"), crn.reactions, crn.formal, 4)
    assert closer == path("i -> k", "j + k -> B")
    assert find_closing_pathway(S("j"), crn.reactions, crn.formal, 4) is None
    assert find_closing_pathway(S("j", "C"), crn.reactions, crn.formal, 4, strong=False) == \
        path("j + C -> D")


def test_parallel_tidiness_matches_serial(family):
    for name in ("crn4", "crn5"):
        basis = find_basis(family[name])
        serial = check_strong_tidiness(family[name], basis)
        parallel = check_strong_tidiness(family[name], basis, jobs=2)
        assert (serial.status, serial.counterexample) == (parallel.status, parallel.counterexample)


@settings(max_examples=30)
@given(crns(max_reactions=4), st.randoms(use_true_random=False))
def test_tidy_verdict_is_sound_on_sampled_pathways(crn, rnd):
    try:
        basis = find_basis(crn, SMALL)
    except EnumerationLimitError:
        return
    if check_strong_tidiness(crn, basis).status != PASS:
        return
    for _ in range(10):
        p = ()
        for _ in range(rnd.randint(1, 8)):
            options = [r for r in crn.reactions if trajectory(p + (r,))[0].is_within(crn.formal)]
            if not options:
                break
            p += (rnd.choice(options),)
        end = trajectory(p)[-1]
        # generous bound, independent of the one the checker uses
        assert find_closing_pathway(end, crn.reactions, crn.formal,
                                    max_size=len(end) + 2 * basis.w_max + 4) is not None


# -- comparison ----------------------------------------------------------------------

@pytest.mark.parametrize("b1, b2, equal", [
    (["A -> B", "A -> A"], ["A -> B"], True),
    (["2A + B -> C + D", "C + A -> C + C"], ["A + B -> C + D", "C + A -> C + C"], False),
    (["A -> B", "B -> C", "C -> A"], ["A -> C", "C -> B", "B -> A"], False),
])
def test_bases_equal(b1, b2, equal):
    assert bases_equal(map(rx, b1), map(rx, b2)) is equal


def test_crn5_implements_crn1(family):
    v = pd_equivalent(family["crn1"], family["crn5"])
    assert v.status == PASS and v.exit_code == 0


def test_crn2_fails_and_reports_the_extra_reaction(family):
    v = pd_equivalent(family["crn1"], family["crn2"], names=("target", "impl"))
    assert v.status == FAIL
    assert rx("2A + B -> C + D") in v.detail["only_in_impl"]
    assert v.counterexample is not None


def test_crn4_fails_on_tidiness(family):
    v = pd_equivalent(family["crn1"], family["crn4"])
    assert v.status == FAIL
    assert v.detail["stage"] == "tidiness" and v.detail["crn"] == "second"
    assert "precondition" in v.reason


def test_crn3_fails_on_regularity(family):
    v = pd_equivalent(family["crn1"], family["crn3"])
    assert v.status == FAIL
    assert v.detail["stage"] == "regularity"


def test_bases_differ_verdict():
    v = pd_equivalent(crn_from_text("A -> B"), crn_from_text("A -> i; i -> C"))
    assert v.status == FAIL and v.detail["stage"] == "basis"
    assert v.detail["only_in_first"] == [rx("A -> B")]
    assert v.detail["only_in_second"] == [rx("A -> C")]
    assert v.counterexample == path("A -> B")


def test_caps_give_inconclusive():
    v = pd_equivalent(crn_from_text("A -> B"), crn_from_text("A -> i; i -> i + i; i -> B"))
    assert v.status == INCONCLUSIVE and v.exit_code == 2
    assert "max_width_bound" in v.reason


def test_verdict_rejects_unknown_status():
    with pytest.raises(ValueError):
        Verdict("maybe")


def test_minimize_pathway_drops_irrelevant_steps():
    p = path("A -> i", "B -> j", "C -> k")
    assert minimize_pathway(p, lambda q: rx("B -> j") in q) == path("B -> j")


# -- reachability -----------------------------------------------------------------------

def test_reachability_examples(family):
    assert bounded_reachability(crn_from_text("A -> B"), S("A"), 4, 100) == {S("A"), S("B")}
    assert S("A", "B", "C") in bounded_reachability(family["crn3"], S("A", "A", "B"), 6)
    assert S("A", "B", "C") not in bounded_reachability(family["crn1"], S("A", "A", "B"), 6)


def test_reachability_truncation_and_size_cap():
    crn = crn_from_text("A -> A + A")
    r = bounded_reachability(crn, S("A"), 3, 100)
    assert r == {S("A"), S("A", "A"), S("A", "A", "A")} and not r.truncated
    r = bounded_reachability(crn, S("A"), 50, 5)
    assert r.truncated and len(r) == 5
    with pytest.raises(ValueError):
        bounded_reachability(crn, S("A"), 0, 5)


def test_analyze_returns_all_three(family):
    basis, tidy, regular = analyze(family["crn1"])
    assert basis.nontrivial == set(family["crn1"].reactions)
    assert tidy.passed and regular.passed
