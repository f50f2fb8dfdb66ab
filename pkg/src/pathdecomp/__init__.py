"""Pathway decomposition verification of chemical reaction networks."""
from __future__ import annotations

from .analysis import (Verdict, bases_equal, bounded_reachability,
                       check_regularity, check_strong_tidiness, pd_equivalent)
from .crn import CRN, EMPTY, Reaction, State, classify, minimal_initial_state, width
from .enumerator import (DEFAULT_CAPS, BasisResult, EnumerationCaps,
                         EnumerationLimitError, enumerate_signatures, find_basis)
from .hybrid import (Interpretation, Labeling, hybrid_verify, natural_interpretation,
                     remove_fuels, weak_bisim_equivalent)
from .parser import CrnDocument, CrnSyntaxError, crn_from_text, load_crn, parse_crn
from .signatures import (Signature, extend_signature, regular_final_states,
                         signature_of)

__version__ = "0.1.0"

__all__ = [
    "BasisResult", "CRN", "CrnDocument", "CrnSyntaxError", "DEFAULT_CAPS", "EMPTY",
    "EnumerationCaps", "EnumerationLimitError", "Interpretation", "Labeling",
    "Reaction", "Signature", "State", "Verdict", "bases_equal",
    "bounded_reachability", "check_regularity", "check_strong_tidiness",
    "classify", "crn_from_text", "enumerate_signatures", "extend_signature",
    "find_basis", "hybrid_verify", "load_crn", "minimal_initial_state",
    "natural_interpretation", "parse_crn", "pd_equivalent",
    "regular_final_states", "remove_fuels", "signature_of", "weak_bisim_equivalent",
    "width",
]
