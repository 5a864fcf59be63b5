"""Argument-profile analysis for a small moded logic language.

The package parses flat moded logic programs, computes per-argument
dataflow profiles by a bottom-up fixpoint analysis, orders arguments by a
total order on profiles, rewrites programs into that argument normal form,
detects profile-equivalent predicates, and includes a reference
interpreter for validating that rewrites preserve answers.
"""

from .analysis import (
    AnalysisError,
    AnalysisTrace,
    Environment,
    NonDirectRecursionError,
    TraceEntry,
    analyze_atom,
    analyze_predicate,
    initial_environment,
    leafs,
    project,
    round_counts,
    run_analysis,
    transitive_closure,
)
from .domain import (
    ASSIGN,
    PSI_BOT,
    TEST,
    ArgumentProfile,
    AssignOp,
    ConstructOp,
    DeconstructOp,
    DomainError,
    Interaction,
    InteractionSet,
    OSet,
    Operation,
    PredicateProfile,
    PsiBotOp,
    PsiOp,
    SitedOperation,
    TestOp,
    WellDefinednessError,
    bottom,
    canon_op,
    canon_oset,
    canon_profile,
    canon_profile_seq,
    join_interaction,
    join_sets,
    leq_sets,
    make_interaction,
    make_oset,
    make_profile,
    render_interaction_set,
    strip_points,
)
from .interp import (
    GroundTerm,
    RuntimeModeError,
    SolveError,
    StepLimitExceeded,
    format_ground,
    solve,
)
from .modecheck import (
    ValidationReport,
    Violation,
    validate_direct_recursion,
    validate_modes,
    validate_program,
)
from .normalize import (
    Distinct,
    Equivalent,
    NormalizationPlan,
    PlanError,
    compare,
    ordered_profile_of,
    plan,
    rewrite,
)
from .ordering import (
    FeatureVector,
    OrderedProfile,
    ProfileOrder,
    canon_ordered,
    compare_profiles,
    features,
    oprof,
)
from .parse import (
    LexError,
    ParseError,
    ProgramError,
    Query,
    SourceError,
    parse_program,
    parse_query,
)
from .syntax import (
    Assign,
    Atom,
    Call,
    Clause,
    Construct,
    Deconstruct,
    FunctorTerm,
    Mode,
    Predicate,
    Program,
    Term,
    Test,
    Var,
    build_call_graph,
    format_atom,
    format_program,
    make_program,
    renumber_points,
)

__version__ = "0.1.0"
