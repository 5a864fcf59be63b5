"""Abstract syntax for the flat moded logic language.

A program is a set of predicates, each with a mandatory mode declaration
and a set of clauses sharing one head. Clause bodies are flat: every term
has an outermost functor applied to variables only, and calls take
variables only. Each body atom carries a program point, unique across the
whole file and assigned in textual order starting at 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterator, Literal, Mapping

Mode = Literal["in", "out"]


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class FunctorTerm:
    """A flat term: a functor applied to variables only."""

    name: str
    args: tuple[Var, ...] = ()

    @property
    def arity(self) -> int:
        return len(self.args)


Term = Var | FunctorTerm


@dataclass(frozen=True)
class Atom:
    """Base of all body atoms. ``point`` is the global program point."""

    point: int
    line: int = field(compare=False)
    col: int = field(compare=False)


@dataclass(frozen=True)
class Deconstruct(Atom):
    """``V => f(X1,...,Xn)``: V is input, the Xi are output."""

    var: Var
    functor: str
    args: tuple[Var, ...]


@dataclass(frozen=True)
class Construct(Atom):
    """``V <= f(X1,...,Xn)``: the Xi are input, V is output."""

    var: Var
    functor: str
    args: tuple[Var, ...]


@dataclass(frozen=True)
class Test(Atom):
    """``V == W``: both input."""

    left: Var
    right: Var


@dataclass(frozen=True)
class Assign(Atom):
    """``V := W``: W is input, V is output."""

    target: Var
    source: Var


@dataclass(frozen=True)
class Call(Atom):
    """``p(X1,...,Xn)``: moded per the callee's declaration."""

    pred: str
    args: tuple[Var, ...]


def atom_inputs(atom: Atom, modes_of: Mapping[str, tuple[Mode, ...]]) -> tuple[Var, ...]:
    """Variables at input positions of ``atom`` (with repetitions)."""
    if isinstance(atom, Deconstruct):
        return (atom.var,)
    if isinstance(atom, Construct):
        return atom.args
    if isinstance(atom, Test):
        return (atom.left, atom.right)
    if isinstance(atom, Assign):
        return (atom.source,)
    if isinstance(atom, Call):
        modes = modes_of[atom.pred]
        return tuple(v for v, m in zip(atom.args, modes) if m == "in")
    raise TypeError(f"not an atom: {atom!r}")


def atom_outputs(atom: Atom, modes_of: Mapping[str, tuple[Mode, ...]]) -> tuple[Var, ...]:
    """Variables at output positions of ``atom`` (with repetitions)."""
    if isinstance(atom, Deconstruct):
        return atom.args
    if isinstance(atom, Construct):
        return (atom.var,)
    if isinstance(atom, Test):
        return ()
    if isinstance(atom, Assign):
        return (atom.target,)
    if isinstance(atom, Call):
        modes = modes_of[atom.pred]
        return tuple(v for v, m in zip(atom.args, modes) if m == "out")
    raise TypeError(f"not an atom: {atom!r}")


@dataclass(frozen=True)
class Clause:
    head_args: tuple[Var, ...]
    body: tuple[Atom, ...]
    line: int = field(compare=False, default=0)
    col: int = field(compare=False, default=0)


@dataclass(frozen=True)
class Predicate:
    name: str
    arity: int
    modes: tuple[Mode, ...]
    clauses: tuple[Clause, ...]
    line: int = field(compare=False, default=0)
    col: int = field(compare=False, default=0)

    @property
    def args(self) -> tuple[Var, ...]:
        """Formal argument variables (synthesized for clause-less predicates)."""
        if self.clauses:
            return self.clauses[0].head_args
        return tuple(Var(f"A{i}") for i in range(1, self.arity + 1))

    @property
    def arg_names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.args)

    def input_arg_names(self) -> frozenset[str]:
        return frozenset(v.name for v, m in zip(self.args, self.modes) if m == "in")

    def output_arg_names(self) -> frozenset[str]:
        return frozenset(v.name for v, m in zip(self.args, self.modes) if m == "out")

    def body_points(self) -> list[int]:
        return [a.point for c in self.clauses for a in c.body]


@dataclass(frozen=True)
class Program:
    predicates: dict[str, Predicate]
    call_graph: dict[str, frozenset[str]]
    # point -> owning predicate name, derived; excluded from equality
    point_owner: dict[int, str] = field(compare=False, default_factory=dict)

    def owner_of_point(self, point: int) -> str:
        return self.point_owner[point]

    def atoms(self) -> Iterator[Atom]:
        for pred in self.predicates.values():
            for clause in pred.clauses:
                yield from clause.body

    def modes_of(self) -> dict[str, tuple[Mode, ...]]:
        return {name: p.modes for name, p in self.predicates.items()}


def build_call_graph(
    predicates: "Program | Mapping[str, Predicate]",
) -> dict[str, frozenset[str]]:
    """Edge p -> q iff some clause of p calls q. Raises on undefined targets."""
    if isinstance(predicates, Program):
        predicates = predicates.predicates
    graph: dict[str, frozenset[str]] = {}
    for name, pred in predicates.items():
        callees = set()
        for clause in pred.clauses:
            for atom in clause.body:
                if isinstance(atom, Call):
                    if atom.pred not in predicates:
                        raise UndefinedPredicateError(atom.pred, atom.line, atom.col)
                    callees.add(atom.pred)
        graph[name] = frozenset(callees)
    return graph


def make_program(predicates: dict[str, Predicate]) -> Program:
    """Assemble a Program, building the call graph and point index."""
    graph = build_call_graph(predicates)
    owner = {
        atom.point: name
        for name, pred in predicates.items()
        for clause in pred.clauses
        for atom in clause.body
    }
    return Program(predicates=predicates, call_graph=graph, point_owner=owner)


class UndefinedPredicateError(Exception):
    def __init__(self, pred: str, line: int, col: int):
        super().__init__(f"call to undefined predicate '{pred}'")
        self.pred = pred
        self.line = line
        self.col = col


# ---------------------------------------------------------------------------
# Surface-syntax emission. Byte-stable for identical programs; re-parsing
# the output yields a structurally identical Program.
# ---------------------------------------------------------------------------


def format_functor(name: str, args: tuple[Var, ...]) -> str:
    if not args:
        return name
    return f"{name}({','.join(v.name for v in args)})"


def format_atom(atom: Atom) -> str:
    if isinstance(atom, Deconstruct):
        return f"{atom.var.name} => {format_functor(atom.functor, atom.args)}"
    if isinstance(atom, Construct):
        return f"{atom.var.name} <= {format_functor(atom.functor, atom.args)}"
    if isinstance(atom, Test):
        return f"{atom.left.name} == {atom.right.name}"
    if isinstance(atom, Assign):
        return f"{atom.target.name} := {atom.source.name}"
    if isinstance(atom, Call):
        return format_functor(atom.pred, atom.args)
    raise TypeError(f"not an atom: {atom!r}")


def format_clause(name: str, clause: Clause) -> str:
    head = format_functor(name, clause.head_args)
    if not clause.body:
        return f"{head}."
    body = ", ".join(format_atom(a) for a in clause.body)
    return f"{head} :- {body}."


def format_predicate(pred: Predicate) -> str:
    lines = [f":- pred {pred.name}({','.join(pred.modes)})."]
    lines.extend(format_clause(pred.name, c) for c in pred.clauses)
    return "\n".join(lines)


def format_program(program: Program) -> str:
    blocks = [format_predicate(p) for p in program.predicates.values()]
    return "\n\n".join(blocks) + "\n" if blocks else ""


def renumber_points(program: Program) -> Program:
    """Re-assign program points 1..N in textual order of body atoms."""
    preds: dict[str, Predicate] = {}
    point = 0
    for name, pred in program.predicates.items():
        clauses = []
        for clause in pred.clauses:
            body = []
            for atom in clause.body:
                point += 1
                body.append(replace(atom, point=point))
            clauses.append(replace(clause, body=tuple(body)))
        preds[name] = replace(pred, clauses=tuple(clauses))
    return make_program(preds)
