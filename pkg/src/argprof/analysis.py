"""The dataflow analysis: atomic and predicate analysis plus the driver.

The atomic analysis turns one body atom into interactions:

  * ``V => f(Y1..Yn)`` yields ``V ~{deconstruct_f}~> Yi`` for each i,
  * ``V <= f(Y1..Yn)`` yields ``Yi ~{construct_f}~> V``,
  * ``V := W`` yields ``W ~{assign}~> V``,
  * ``V == W`` yields nothing,
  * a call ``q(Y1..Ym)`` yields the callee's current interaction set with
    formals renamed to actuals, joined with one interaction per (input
    actual, output actual) pair carrying ``psi_bot`` for a directly
    recursive call and ``psi(<callee's ordered profile>)`` otherwise.

Clause analysis joins the atom results, closes them transitively (data
flowing through local variables composes into argument-to-argument flow)
and projects onto the formal arguments. The driver analyzes predicates
bottom-up over the call graph: each predicate is iterated to a local
fixpoint before any caller of it is considered, which is what makes call
abstractions stable. Directly recursive programs always converge because
interaction sets over a predicate form a finite lattice and each round
only ever grows or refreshes them.
"""

from __future__ import annotations

from dataclasses import dataclass

from .domain import (
    ASSIGN,
    PSI_BOT,
    ConstructOp,
    DeconstructOp,
    Interaction,
    InteractionSet,
    PsiOp,
    bottom,
    join_interaction,
    join_sets,
    make_interaction,
)
from .ordering import ProfileOrder, compare_profiles, oprof
from .syntax import Assign, Atom, Call, Construct, Deconstruct, Predicate, Program, Test

Environment = dict[str, InteractionSet]


class AnalysisError(Exception):
    pass


class NonDirectRecursionError(AnalysisError):
    def __init__(self, remaining: list[str]):
        super().__init__(
            "no analyzable predicate left; mutual recursion among " + ", ".join(remaining)
        )
        self.remaining = remaining


@dataclass(frozen=True)
class TraceEntry:
    round: int
    predicate: str
    snapshot: InteractionSet
    changed: bool


AnalysisTrace = list[TraceEntry]


def initial_environment(program: Program) -> Environment:
    return {
        name: bottom(name, pred.input_arg_names())
        for name, pred in program.predicates.items()
    }


def _owner_set(program: Program, owner: str) -> InteractionSet:
    return bottom(owner, program.predicates[owner].input_arg_names())


def analyze_atom(
    atom: Atom,
    env: Environment,
    program: Program,
    order: ProfileOrder = compare_profiles,
) -> InteractionSet:
    """Interactions contributed by one atom under the current environment."""
    owner = program.owner_of_point(atom.point)
    result = _owner_set(program, owner)

    if isinstance(atom, Deconstruct):
        op = DeconstructOp(atom.functor, len(atom.args))
        for y in atom.args:
            result = join_interaction(
                make_interaction(atom.var.name, y.name, [(op, atom.point)]), result
            )
        return result
    if isinstance(atom, Construct):
        op = ConstructOp(atom.functor, len(atom.args))
        for y in atom.args:
            result = join_interaction(
                make_interaction(y.name, atom.var.name, [(op, atom.point)]), result
            )
        return result
    if isinstance(atom, Assign):
        return join_interaction(
            make_interaction(atom.source.name, atom.target.name, [(ASSIGN, atom.point)]),
            result,
        )
    if isinstance(atom, Test):
        return result
    if isinstance(atom, Call):
        if atom.pred not in env:
            raise AnalysisError(f"predicate '{atom.pred}' missing from environment")
        callee = program.predicates[atom.pred]
        callee_set = env[atom.pred]
        rename = {f.name: a.name for f, a in zip(callee.args, atom.args)}
        for i in callee_set:
            src, tgt = rename[i.source], rename[i.target]
            if src == tgt:  # aliased actuals collapse the edge
                continue
            result = join_interaction(Interaction(src, tgt, i.ops), result)
        recursive = atom.pred == owner
        if recursive:
            call_op = PSI_BOT
        else:
            ordered = oprof(callee_set, callee.arg_names, callee.modes, order)
            call_op = PsiOp(ordered.profiles)
        inputs = {a.name for a, m in zip(atom.args, callee.modes) if m == "in"}
        outputs = {a.name for a, m in zip(atom.args, callee.modes) if m == "out"}
        for src in sorted(inputs):
            for tgt in sorted(outputs):
                if src == tgt:
                    continue
                result = join_interaction(
                    make_interaction(src, tgt, [(call_op, atom.point)]), result
                )
        return result
    raise TypeError(f"not an atom: {atom!r}")


def transitive_closure(s: InteractionSet) -> InteractionSet:
    """Least fixpoint of composing interactions through shared variables.

    For pairwise-distinct X, Y, Z with X ~{O}~> Y and Y ~{O'}~> Z, the
    interaction X ~{O u O'}~> Z is merged in (union keyed by program
    point) until nothing changes.
    """
    current = s
    while True:
        additions: list[Interaction] = []
        by_source: dict[str, list[Interaction]] = {}
        for i in current:
            by_source.setdefault(i.source, []).append(i)
        for first in current:
            for second in by_source.get(first.target, ()):
                if second.target in (first.source, first.target):
                    continue
                merged = dict(first.by_point())
                merged.update(second.by_point())
                additions.append(
                    make_interaction(first.source, second.target, [(op, pt) for pt, op in merged.items()])
                )
        next_set = current
        for add in additions:
            next_set = join_interaction(add, next_set)
        if next_set == current:
            return current
        current = next_set


def project(s: InteractionSet, pred: Predicate) -> InteractionSet:
    """Close ``s`` transitively, then keep only argument-to-argument flow."""
    closed = transitive_closure(s)
    formals = set(pred.arg_names)
    result = bottom(s.owner, s.input_args)
    for i in closed:
        if i.source in formals and i.target in formals:
            result = join_interaction(i, result)
    return result


def analyze_predicate(
    pred: Predicate,
    env: Environment,
    program: Program,
    order: ProfileOrder = compare_profiles,
) -> InteractionSet:
    """Join, over the clauses, the projected closure of the body analysis."""
    acc = _owner_set(program, pred.name)
    for clause in pred.clauses:
        clause_set = _owner_set(program, pred.name)
        for atom in clause.body:
            clause_set = join_sets(analyze_atom(atom, env, program, order), clause_set)
        acc = join_sets(project(clause_set, pred), acc)
    return acc


def leafs(
    remaining: set[str], analyzed: set[str], call_graph: dict[str, frozenset[str]]
) -> set[str]:
    """Predicates whose callees are all themselves or already analyzed."""
    return {
        p
        for p in remaining
        if all(q == p or q in analyzed for q in call_graph.get(p, ()))
    }


def run_analysis(
    program: Program, order: ProfileOrder = compare_profiles
) -> tuple[Environment, AnalysisTrace]:
    """Analyze a whole program bottom-up to a global fixpoint.

    Among eligible predicates the lexicographically first is selected, so
    runs are deterministic. Each predicate is iterated until its computed
    set equals its environment entry (program points included), then
    discharged. Raises NonDirectRecursionError if a call-graph cycle of
    length two or more blocks progress.
    """
    env = initial_environment(program)
    remaining = set(program.predicates)
    analyzed: set[str] = set()
    trace: AnalysisTrace = []
    round_index = 0
    while remaining:
        eligible = leafs(remaining, analyzed, program.call_graph)
        if not eligible:
            raise NonDirectRecursionError(sorted(remaining))
        name = min(eligible)
        pred = program.predicates[name]
        while True:
            round_index += 1
            new = analyze_predicate(pred, env, program, order)
            changed = new != env[name]
            trace.append(TraceEntry(round_index, name, new, changed))
            if not changed:
                break
            env[name] = new
        analyzed.add(name)
        remaining.discard(name)
    return env, trace


def round_counts(trace: AnalysisTrace) -> dict[str, tuple[int, int]]:
    """Per predicate: (changing rounds, total rounds)."""
    counts: dict[str, tuple[int, int]] = {}
    for entry in trace:
        changing, total = counts.get(entry.predicate, (0, 0))
        counts[entry.predicate] = (changing + (1 if entry.changed else 0), total + 1)
    return counts
