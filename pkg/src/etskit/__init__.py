"""Model checking and proof checking for a trimodal logic of coalition
knowledge, strategic ability, and know-how over epistemic transition systems.
"""

from .errors import (
    CapacityError, ClaimsFormatError, EtskitError, FormulaSyntaxError,
    InputError, ProofFormatError, SystemFormatError, UnknownIdentifierError,
)
from .formula import (
    FALSE, TRUE, And, FalseLit, Formula, How, Implies, Know, Not, Or, Strat,
    TrueLit, Var, lower_derived, parse_formula, print_formula,
)
from .model import (
    EpistemicTransitionSystem, Mechanism, StrategyProfile, ValidationReport,
    coalition, coalition_class, enumerate_profiles, indist_coalition,
    load_system, load_system_path, outcomes, validate_system,
)
from .semantics import (
    Claim, EvalReport, Evaluator, HAVE_COMPILED, check_claims, evaluate,
    evaluate_naive, find_witness, holds_everywhere, parse_claims,
)

__version__ = "0.1.0"
