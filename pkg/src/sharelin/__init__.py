"""Set-sharing analysis with freeness and linearity over rational-tree
unification: abstract unification variants, a groundness-pruning pipeline,
and a concrete-semantics oracle for randomised soundness checking."""

from .amgu import (
    AlgorithmId,
    AmguConfig,
    AnalysisProblem,
    amgu1,
    amgu2,
    amgu3,
    analyze,
    decomposed_reference,
    early_prune,
    fold_equations,
)
from .concrete import (
    RationalSolvedForm,
    UnifyOutcome,
    binding_multiplicity,
    describes,
    groundness_abstraction,
    is_free,
    occurrence_set,
    reachable_vars,
    sharing_abstraction,
    unify,
)
from .groundness import (
    NotPositiveError,
    PosFormula,
    UniverseTooLargeError,
    biconditional,
    conjoin,
    conjunction_of,
    entailed_ground,
    equation_groundness,
    format_formula,
    parse_formula,
    trim,
    truth,
)
from .problem_io import (
    ParseError,
    SemanticError,
    format_term,
    format_triple,
    parse_problem,
    print_problem,
)
from .sharing import (
    DecompositionLimitError,
    SharingTriple,
    abstract_multiplicity,
    freeness_decomposition,
    group_vars,
    pairwise_union,
    relevant,
    union_closure,
)
from .terms import (
    Compound,
    Equation,
    EquationSet,
    Term,
    Variable,
    VariableUniverse,
    term_multiplicity,
    term_vars,
    variable_counts,
)

__version__ = "0.1.0"

__all__ = [
    "AlgorithmId",
    "AmguConfig",
    "AnalysisProblem",
    "Compound",
    "DecompositionLimitError",
    "Equation",
    "EquationSet",
    "NotPositiveError",
    "ParseError",
    "PosFormula",
    "RationalSolvedForm",
    "SemanticError",
    "SharingTriple",
    "Term",
    "UnifyOutcome",
    "UniverseTooLargeError",
    "Variable",
    "VariableUniverse",
    "abstract_multiplicity",
    "amgu1",
    "amgu2",
    "amgu3",
    "analyze",
    "biconditional",
    "binding_multiplicity",
    "conjoin",
    "conjunction_of",
    "decomposed_reference",
    "describes",
    "early_prune",
    "entailed_ground",
    "equation_groundness",
    "fold_equations",
    "format_formula",
    "format_term",
    "format_triple",
    "freeness_decomposition",
    "group_vars",
    "groundness_abstraction",
    "is_free",
    "occurrence_set",
    "pairwise_union",
    "parse_formula",
    "parse_problem",
    "print_problem",
    "reachable_vars",
    "relevant",
    "sharing_abstraction",
    "term_multiplicity",
    "term_vars",
    "trim",
    "truth",
    "unify",
    "union_closure",
    "variable_counts",
]
