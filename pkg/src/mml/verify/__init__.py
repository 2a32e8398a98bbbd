"""Theorem-by-theorem checkers returning signed margins.

Each checker samples inputs trial by trial from ``default_rng([seed, i])``
and returns a ``CheckReport``; a trial is a violation when its margin falls
below ``-tol``.
"""

from .alternative import check_alternative_dominance, check_alternative_necessity
from .ando_hiai import (
    ah_threshold,
    check_ah_property,
    check_eq_see,
    check_grand_furuta,
    check_two_variable_ah,
    family_log_excess,
    fkt_threshold,
    natural_threshold,
    see_exponent,
    two_var_regime,
)
from .identities import check_prop22, check_riccati, check_similarity, check_spectral
from .logmaj import THEOREMS, check_lie_trotter, check_log_maj, lie_trotter_errors
from .norms import check_norm_sequence, check_uab_refinement
from .report import (
    REGISTRY,
    CheckReport,
    Outcome,
    ViolationRecord,
    evaluate_inputs,
    replay,
    reverify,
    run_check,
)

__all__ = [
    "REGISTRY",
    "THEOREMS",
    "CheckReport",
    "Outcome",
    "ViolationRecord",
    "ah_threshold",
    "check_ah_property",
    "check_alternative_dominance",
    "check_alternative_necessity",
    "check_eq_see",
    "check_grand_furuta",
    "check_lie_trotter",
    "check_log_maj",
    "check_norm_sequence",
    "check_prop22",
    "check_riccati",
    "check_similarity",
    "check_spectral",
    "check_two_variable_ah",
    "check_uab_refinement",
    "evaluate_inputs",
    "family_log_excess",
    "fkt_threshold",
    "lie_trotter_errors",
    "natural_threshold",
    "replay",
    "reverify",
    "run_check",
    "see_exponent",
    "two_var_regime",
]
