from __future__ import annotations

import os
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from pathdecomp.crn import CRN, Reaction, State
from pathdecomp.parser import crn_from_text

settings.register_profile(
    "default", deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", deadline=None, max_examples=400)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

DATA = Path(__file__).parent / "data"

CRN_FAMILY = {
    "crn1": "A + B -> C + D; C + A -> C + C",
    "crn2": "A <=> i; i + B <=> j; i + j -> C + k; k <=> D; C + A <=> m + n; m + n -> C + C",
    "crn3": "A <=> i; i + B <=> j; j <=> C + k; k -> D; C + A <=> m + n; m + n -> C + C",
    "crn4": "A -> i; i + B <=> j; j -> C + k; k <=> D; C + A <=> m + n; m + n -> C + C",
    "crn5": "A <=> i; i + B <=> j; j -> C + k; k <=> D; C + A <=> m + n; m + n -> C + C",
}
REVERSIBLE = "A <=> i; i + B <=> j; j <=> k + C; k <=> D"
DELAYED_CHOICE = "A -> i; i -> B; i -> C; A -> j; j -> D"


def rx(text: str) -> Reaction:
    """One reaction from text, e.g. ``rx("2A + B -> C")``."""
    from pathdecomp.parser import parse_reaction
    return parse_reaction(text)


def path(*texts: str) -> tuple:
    return tuple(rx(t) for t in texts)


def S(*names: str) -> State:
    return State.of(*names)


@pytest.fixture(scope="session")
def family() -> dict:
    return {name: crn_from_text(text) for name, text in CRN_FAMILY.items()}


@pytest.fixture
def data_dir() -> Path:
    return DATA


# -- hypothesis strategies ------------------------------------------------

FORMAL = ("A", "B", "C")
INTER = ("i", "j")


def states(species=FORMAL + INTER, max_size: int = 3):
    return st.lists(st.sampled_from(species), max_size=max_size).map(State)


@st.composite
def reactions(draw, species=FORMAL + INTER, max_side: int = 2):
    r = draw(st.builds(Reaction, states(species, max_side), states(species, max_side)))
    return r


@st.composite
def crns(draw, formal=FORMAL, inter=INTER, max_reactions: int = 4, max_side: int = 2):
    rs = draw(st.lists(reactions(formal + inter, max_side), min_size=1,
                       max_size=max_reactions))
    rs = [r for r in rs if not r.trivial]
    if not rs:
        rs = [Reaction(State.of(formal[0]), State.of(inter[0] if inter else formal[-1]))]
    return CRN(rs, frozenset(formal))


@st.composite
def semiformal_pathways(draw, crn: CRN, max_len: int = 6):
    """A random semiformal pathway of ``crn`` grown one step at a time."""
    from pathdecomp.crn import minimal_initial_state
    p = ()
    for _ in range(draw(st.integers(0, max_len))):
        options = [r for r in crn.reactions
                   if minimal_initial_state(p + (r,)).is_within(crn.formal)]
        if not options:
            break
        p += (draw(st.sampled_from(options)),)
    return p


# -- acceptance summary ------------------------------------------------------

_CRITERIA: dict = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or report.when not in ("setup", "call"):
        return
    n, text = mark.args
    if report.when == "call" or report.failed:
        _CRITERIA[n] = (text, "PASS" if report.passed else "FAIL")


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        text, status = _CRITERIA[n]
        terminalreporter.write_line(f"criterion {n:>2}: {status}  {text}")
