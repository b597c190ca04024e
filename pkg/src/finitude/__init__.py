"""Finite-or-infinite classification of linear predicate constraints over
the integers, with sieve-backed empirical verification."""

from .arith import CongruenceClass, crt, ext_gcd, solve_linear_congruence
from .decide import (
    FINITE,
    INCONSISTENT,
    INFINITE,
    Classification,
    classify_conjunction,
    classify_primary,
    decide_exists_basic,
    resolve_equalities,
)
from .formula import (
    BasicFormula,
    CongruenceAtom,
    EqualityAtom,
    MixedFormula,
    ParseError,
    PredicateAtom,
    PrimaryFormula,
    Term,
    are_compatible,
    is_good_position,
    parse_formula,
    parse_mixed,
    render,
    unify_coefficients,
)
from .normalize import (
    BranchCapExceeded,
    DerivationTrace,
    NormalizationBranch,
    branch_cover_check,
    expand_neg_Pk,
    normalize_basic,
)
from .randomness import (
    DICKSON_CONDITIONAL,
    GENERIC_PROBABILISTIC,
    UNCONDITIONAL,
    ChiClause,
    ChiCondition,
    GenericOracle,
    Instance,
    PrimesOracle,
    RandomnessOracle,
    SquarefreeOracle,
    get_oracle,
)
from .verify import (
    MemoryCapExceeded,
    VerificationReport,
    audit,
    check_axioms,
    count_mixed,
    count_solutions,
    sieve_window,
)

__version__ = "0.1.0"

__all__ = [
    "BasicFormula",
    "BranchCapExceeded",
    "ChiClause",
    "ChiCondition",
    "Classification",
    "CongruenceAtom",
    "CongruenceClass",
    "DerivationTrace",
    "DICKSON_CONDITIONAL",
    "EqualityAtom",
    "FINITE",
    "GENERIC_PROBABILISTIC",
    "GenericOracle",
    "INCONSISTENT",
    "INFINITE",
    "Instance",
    "MemoryCapExceeded",
    "MixedFormula",
    "NormalizationBranch",
    "ParseError",
    "PredicateAtom",
    "PrimaryFormula",
    "PrimesOracle",
    "RandomnessOracle",
    "SquarefreeOracle",
    "Term",
    "UNCONDITIONAL",
    "VerificationReport",
    "are_compatible",
    "audit",
    "branch_cover_check",
    "check_axioms",
    "classify_conjunction",
    "classify_primary",
    "count_mixed",
    "count_solutions",
    "crt",
    "decide_exists_basic",
    "expand_neg_Pk",
    "ext_gcd",
    "get_oracle",
    "is_good_position",
    "normalize_basic",
    "parse_formula",
    "parse_mixed",
    "render",
    "resolve_equalities",
    "sieve_window",
    "solve_linear_congruence",
    "unify_coefficients",
]
