"""Parser, program-point assignment, call graph and round-trip tests."""

from __future__ import annotations

import random

import pytest

from argprof import (
    Assign,
    Call,
    Construct,
    Deconstruct,
    ParseError,
    ProgramError,
    build_call_graph,
    format_program,
    parse_program,
)
from argprof import syntax
from helpers import fixture_names, gen_program_source, load_fixture

APP_SRC = """\
:- pred app(in,in,out).
app(X,Y,Z) :- X => nil, Z := Y.
app(X,Y,Z) :- X => cons(E,Es), app(Es,Y,Zs), Z <= cons(E,Zs).
"""


def test_parse_append():
    program = parse_program(APP_SRC)
    assert list(program.predicates) == ["app"]
    app = program.predicates["app"]
    assert app.arity == 3
    assert app.modes == ("in", "in", "out")
    assert [a.point for a in program.atoms()] == [1, 2, 3, 4, 5]
    kinds = [type(a) for a in program.atoms()]
    assert kinds == [Deconstruct, Assign, Deconstruct, Call, Construct]


def test_parse_minimal_program():
    program = parse_program(":- pred p(out). p(X) :- X <= nil.")
    assert [a.point for a in program.atoms()] == [1]
    (atom,) = program.atoms()
    assert isinstance(atom, Construct)
    assert atom.functor == "nil" and atom.args == ()


def test_nested_functor_rejected():
    with pytest.raises(ParseError):
        parse_program(":- pred p(in). p(X) :- X => f(g(Y)).")


def test_call_args_must_be_variables():
    with pytest.raises(ParseError):
        parse_program(":- pred p(in). p(X) :- p(nil).")


def test_duplicate_declaration_rejected():
    src = ":- pred p(in).\n:- pred p(in).\np(X) :- X => nil."
    with pytest.raises(ProgramError) as exc:
        parse_program(src)
    assert "duplicate" in str(exc.value)
    assert exc.value.line == 2


def test_functor_arity_conflict_rejected():
    src = ":- pred p(in,out). p(X,Y) :- X => cons(A,B), Y <= cons(A)."
    with pytest.raises(ProgramError) as exc:
        parse_program(src)
    assert "arity" in str(exc.value)


def test_undefined_call_rejected():
    with pytest.raises(ProgramError) as exc:
        parse_program(":- pred p(in). p(X) :- q(X).")
    assert "undefined" in str(exc.value)


def test_head_args_must_be_distinct():
    with pytest.raises(ProgramError):
        parse_program(":- pred p(in,in). p(X,X).")


def test_clause_heads_must_agree():
    src = ":- pred p(in).\np(X) :- X => nil.\np(Y) :- Y => nil."
    with pytest.raises(ProgramError):
        parse_program(src)


def test_missing_mode_declaration_rejected():
    with pytest.raises(ProgramError):
        parse_program("p(X) :- X => nil.")


def test_missing_declaration_position_is_reported():
    try:
        parse_program("p(X) :- X => nil.")
    except ProgramError as exc:
        assert (exc.line, exc.col) == (1, 1)


def test_zero_arity_functor_forms():
    bare = parse_program(":- pred p(out). p(X) :- X <= nil.")
    parens = parse_program(":- pred p(out). p(X) :- X <= nil().")
    assert bare == parens
    assert "<= nil." in format_program(parens)


def test_integer_literals_are_functors():
    program = parse_program(":- pred p(out). p(X) :- X <= 42.")
    (atom,) = program.atoms()
    assert atom.functor == "42" and atom.args == ()


def test_test_atom_parses():
    program = parse_program(":- pred p(in,in). p(X,Y) :- X == Y.")
    (atom,) = program.atoms()
    assert isinstance(atom, syntax.Test)


def test_program_points_are_global_and_textual():
    program = load_fixture("double_append.lp")
    assert [a.point for a in program.atoms()] == list(range(1, 13))
    assert program.owner_of_point(5) == "app"
    assert program.owner_of_point(6) == "concat"
    assert program.owner_of_point(11) == "dapp"


def test_call_graph_double_append():
    program = load_fixture("double_append.lp")
    assert program.call_graph == {
        "app": frozenset({"app"}),
        "concat": frozenset({"concat"}),
        "dapp": frozenset({"app", "concat"}),
    }


def test_call_graph_single_nonrecursive():
    program = parse_program(":- pred p(out). p(X) :- X <= nil.")
    assert program.call_graph == {"p": frozenset()}


def test_call_graph_self_loop():
    program = parse_program(APP_SRC)
    assert build_call_graph(program.predicates) == {"app": frozenset({"app"})}


@pytest.mark.parametrize("name", fixture_names())
def test_round_trip_fixtures(name):
    program = load_fixture(name)
    assert parse_program(format_program(program)) == program


def test_round_trip_random_programs():
    rng = random.Random(20260810)
    for _ in range(25):
        program = parse_program(gen_program_source(rng))
        assert parse_program(format_program(program)) == program


def test_comments_and_whitespace_ignored():
    src = "% leading comment\n:- pred p(out).\n  p(X) :-\n     X <= nil. % trailing\n"
    program = parse_program(src)
    assert list(program.predicates) == ["p"]


def test_error_positions():
    with pytest.raises(ParseError) as exc:
        parse_program(":- pred p(in).\np(X) :- X =>\n.")
    assert exc.value.line == 3


def test_declared_predicate_without_clauses():
    program = parse_program(":- pred p(in,out).")
    pred = program.predicates["p"]
    assert pred.clauses == ()
    assert pred.arg_names == ("A1", "A2")
    assert parse_program(format_program(program)) == program


def test_lexical_error_position():
    from argprof import LexError

    with pytest.raises(LexError) as exc:
        parse_program(":- pred p(in).\np(X) :- X => @nil.")
    assert (exc.value.line, exc.value.col) == (2, 14)
