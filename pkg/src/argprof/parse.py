"""Lexer and recursive-descent parser for the surface syntax.

Surface syntax, one program per UTF-8 file:

    % line comment
    :- pred app(in,in,out).
    app(X,Y,Z) :- X => nil, Z := Y.
    app(X,Y,Z) :- X => cons(E,Es), app(Es,Y,Zs), Z <= cons(E,Zs).

Operators: ``=>`` deconstruction, ``<=`` construction, ``:=`` assignment,
``==`` test. Variables start with an uppercase letter or ``_``; functor and
predicate names start with a lowercase letter; integer literals are 0-arity
functors. Zero-arity functors may be written bare (``nil``) or as ``nil()``;
they are emitted bare. A mode declaration is mandatory for every predicate
and clauses of one predicate must be contiguous.

Queries use the same lexer: ``?- app(cons(1,nil), cons(2,nil), Z).`` where
input positions may hold nested ground terms and output positions hold
fresh variables.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .syntax import (
    Assign,
    Atom,
    Call,
    Clause,
    Construct,
    Deconstruct,
    Mode,
    Predicate,
    Program,
    Test,
    UndefinedPredicateError,
    Var,
    make_program,
)


class SourceError(Exception):
    """An error tied to a position in the source text."""

    def __init__(self, message: str, line: int, col: int):
        super().__init__(message)
        self.message = message
        self.line = line
        self.col = col

    def render(self, filename: str = "<input>") -> str:
        return f"{filename}:{self.line}:{self.col}: error: {self.message}"


class LexError(SourceError):
    pass


class ParseError(SourceError):
    pass


class ProgramError(SourceError):
    """Structural errors: duplicate definitions, arity conflicts, undefined calls."""


@dataclass(frozen=True)
class Token:
    kind: str  # 'name' | 'var' | 'int' | punctuation | 'eof'
    text: str
    line: int
    col: int


_PUNCT = (":-", "?-", ":=", "=>", "<=", "==", "(", ")", ",", ".")
_NAME_RE = re.compile(r"[a-z][A-Za-z0-9_]*")
_VAR_RE = re.compile(r"[A-Z_][A-Za-z0-9_]*")
_INT_RE = re.compile(r"[0-9]+")


def tokenize(source: str) -> list[Token]:
    tokens: list[Token] = []
    line, col = 1, 1
    i, n = 0, len(source)
    while i < n:
        ch = source[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "%":
            while i < n and source[i] != "\n":
                i += 1
            continue
        two = source[i : i + 2]
        if two in _PUNCT:
            tokens.append(Token(two, two, line, col))
            i += 2
            col += 2
            continue
        if ch in "(),.":
            tokens.append(Token(ch, ch, line, col))
            i += 1
            col += 1
            continue
        m = _NAME_RE.match(source, i)
        if m:
            tokens.append(Token("name", m.group(), line, col))
            col += len(m.group())
            i = m.end()
            continue
        m = _VAR_RE.match(source, i)
        if m:
            tokens.append(Token("var", m.group(), line, col))
            col += len(m.group())
            i = m.end()
            continue
        m = _INT_RE.match(source, i)
        if m:
            tokens.append(Token("int", m.group(), line, col))
            col += len(m.group())
            i = m.end()
            continue
        raise LexError(f"unexpected character {ch!r}", line, col)
    tokens.append(Token("eof", "", line, col))
    return tokens


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def next(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str) -> Token:
        tok = self.peek()
        if tok.kind != kind:
            raise ParseError(f"expected {kind!r}, found {tok.text or 'end of input'!r}", tok.line, tok.col)
        return self.next()

    def at(self, kind: str) -> bool:
        return self.peek().kind == kind

    # -- shared small pieces -------------------------------------------------

    def variable(self) -> Var:
        tok = self.expect("var")
        return Var(tok.text)

    def var_list(self) -> tuple[Var, ...]:
        """Parenthesized comma-separated variables; absent parens mean arity 0."""
        if not self.at("("):
            return ()
        self.next()
        if self.at(")"):
            self.next()
            return ()
        out = [self.variable()]
        while self.at(","):
            self.next()
            out.append(self.variable())
        self.expect(")")
        return tuple(out)

    def functor_name(self) -> Token:
        tok = self.peek()
        if tok.kind not in ("name", "int"):
            raise ParseError(f"expected functor, found {tok.text or 'end of input'!r}", tok.line, tok.col)
        return self.next()


# ---------------------------------------------------------------------------
# Program parsing
# ---------------------------------------------------------------------------


@dataclass
class _RawPred:
    name: str
    modes: tuple[Mode, ...] | None = None
    decl_line: int = 0
    decl_col: int = 0
    head_args: tuple[Var, ...] | None = None
    clauses: list[Clause] | None = None
    closed: bool = False  # a later predicate started; new clauses are an error


def parse_program(source: str) -> Program:
    """Parse a program, assign program points and build the call graph.

    Raises LexError, ParseError or ProgramError, each carrying line/col.
    """
    parser = _Parser(tokenize(source))
    preds: dict[str, _RawPred] = {}
    functor_arity: dict[str, tuple[int, int, int]] = {}  # name -> (arity, line, col)
    point = 0
    current: str | None = None

    def note_functor(name: str, arity: int, line: int, col: int) -> None:
        seen = functor_arity.get(name)
        if seen is None:
            functor_arity[name] = (arity, line, col)
        elif seen[0] != arity:
            raise ProgramError(
                f"functor '{name}' used with arity {arity} but previously with arity {seen[0]}",
                line,
                col,
            )

    def raw(name: str) -> _RawPred:
        if name not in preds:
            preds[name] = _RawPred(name)
        return preds[name]

    def parse_decl() -> None:
        tok = parser.expect(":-")
        kw = parser.expect("name")
        if kw.text != "pred":
            raise ParseError(f"expected 'pred' after ':-', found {kw.text!r}", kw.line, kw.col)
        name_tok = parser.expect("name")
        modes: list[Mode] = []
        parser.expect("(")
        if not parser.at(")"):
            while True:
                mtok = parser.expect("name")
                if mtok.text not in ("in", "out"):
                    raise ParseError(f"expected mode 'in' or 'out', found {mtok.text!r}", mtok.line, mtok.col)
                modes.append(mtok.text)
                if parser.at(","):
                    parser.next()
                    continue
                break
        parser.expect(")")
        parser.expect(".")
        pred = raw(name_tok.text)
        if pred.modes is not None:
            raise ProgramError(f"duplicate predicate definition for '{name_tok.text}'", name_tok.line, name_tok.col)
        pred.modes = tuple(modes)
        pred.decl_line, pred.decl_col = tok.line, tok.col

    def parse_atom() -> Atom:
        nonlocal point
        tok = parser.peek()
        if tok.kind == "var":
            left = parser.variable()
            op = parser.peek()
            if op.kind in ("=>", "<="):
                parser.next()
                ftok = parser.functor_name()
                args = parser.var_list()
                note_functor(ftok.text, len(args), ftok.line, ftok.col)
                point += 1
                cls = Deconstruct if op.kind == "=>" else Construct
                return cls(point, tok.line, tok.col, left, ftok.text, args)
            if op.kind == ":=":
                parser.next()
                right = parser.variable()
                point += 1
                return Assign(point, tok.line, tok.col, left, right)
            if op.kind == "==":
                parser.next()
                right = parser.variable()
                point += 1
                return Test(point, tok.line, tok.col, left, right)
            raise ParseError(f"expected '=>', '<=', ':=' or '==', found {op.text!r}", op.line, op.col)
        if tok.kind == "name":
            name = parser.next()
            args = parser.var_list()
            point += 1
            return Call(point, tok.line, tok.col, name.text, args)
        raise ParseError(f"expected atom, found {tok.text or 'end of input'!r}", tok.line, tok.col)

    def parse_clause() -> None:
        nonlocal current
        name_tok = parser.expect("name")
        head_args = parser.var_list()
        if len(set(head_args)) != len(head_args):
            raise ProgramError("head arguments must be pairwise distinct variables", name_tok.line, name_tok.col)
        body: list[Atom] = []
        if parser.at(":-"):
            parser.next()
            body.append(parse_atom())
            while parser.at(","):
                parser.next()
                body.append(parse_atom())
        parser.expect(".")
        pred = raw(name_tok.text)
        if pred.closed:
            raise ProgramError(
                f"clauses of '{name_tok.text}' must be contiguous", name_tok.line, name_tok.col
            )
        if pred.head_args is None:
            pred.head_args = head_args
            pred.clauses = []
        elif pred.head_args != head_args:
            raise ProgramError(
                f"clause head of '{name_tok.text}' differs from previous clauses", name_tok.line, name_tok.col
            )
        if current is not None and current != name_tok.text:
            prev = preds.get(current)
            if prev is not None:
                prev.closed = True
        current = name_tok.text
        pred.clauses.append(Clause(head_args, tuple(body), name_tok.line, name_tok.col))

    while not parser.at("eof"):
        if parser.at(":-"):
            parse_decl()
        else:
            parse_clause()

    built: dict[str, Predicate] = {}
    for name, rp in preds.items():
        if rp.modes is None:
            line, col = (rp.clauses[0].line, rp.clauses[0].col) if rp.clauses else (0, 0)
            raise ProgramError(f"missing mode declaration for '{name}'", line, col)
        arity = len(rp.modes)
        clauses = tuple(rp.clauses or [])
        for cl in clauses:
            if len(cl.head_args) != arity:
                raise ProgramError(
                    f"'{name}' declared with arity {arity} but clause head has {len(cl.head_args)} arguments",
                    cl.line,
                    cl.col,
                )
        built[name] = Predicate(name, arity, rp.modes, clauses, rp.decl_line, rp.decl_col)

    for name, pred in built.items():
        for cl in pred.clauses:
            for atom in cl.body:
                if isinstance(atom, Call):
                    callee = built.get(atom.pred)
                    if callee is None:
                        raise ProgramError(f"call to undefined predicate '{atom.pred}'", atom.line, atom.col)
                    if callee.arity != len(atom.args):
                        raise ProgramError(
                            f"'{atom.pred}' called with {len(atom.args)} arguments but declared with arity {callee.arity}",
                            atom.line,
                            atom.col,
                        )

    try:
        return make_program(built)
    except UndefinedPredicateError as exc:  # already reported above; defensive
        raise ProgramError(str(exc), exc.line, exc.col) from exc


# ---------------------------------------------------------------------------
# Query parsing
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QStruct:
    """A possibly nested term in a query; ground once variables are bound."""

    functor: str
    args: tuple["QTerm", ...] = ()


QTerm = Var | QStruct


@dataclass(frozen=True)
class QCall:
    pred: str
    args: tuple[QTerm, ...]


@dataclass(frozen=True)
class QDeconstruct:
    var: QTerm
    functor: str
    args: tuple[QTerm, ...]


@dataclass(frozen=True)
class QConstruct:
    var: QTerm
    functor: str
    args: tuple[QTerm, ...]


@dataclass(frozen=True)
class QTest:
    left: QTerm
    right: QTerm


@dataclass(frozen=True)
class QAssign:
    target: QTerm
    source: QTerm


QAtom = QCall | QDeconstruct | QConstruct | QTest | QAssign


@dataclass(frozen=True)
class Query:
    goal: tuple[QAtom, ...]


def parse_query(source: str) -> Query:
    """Parse ``?- atom1, ..., atomN.`` with nested terms allowed."""
    parser = _Parser(tokenize(source))
    parser.expect("?-")

    def qterm() -> QTerm:
        tok = parser.peek()
        if tok.kind == "var":
            return parser.variable()
        ftok = parser.functor_name()
        args: list[QTerm] = []
        if parser.at("("):
            parser.next()
            if not parser.at(")"):
                args.append(qterm())
                while parser.at(","):
                    parser.next()
                    args.append(qterm())
            parser.expect(")")
        return QStruct(ftok.text, tuple(args))

    def qatom() -> QAtom:
        tok = parser.peek()
        left = qterm()
        op = parser.peek()
        if op.kind not in ("=>", "<=", ":=", "=="):
            # No unification operator follows: the term itself is a call.
            if isinstance(left, QStruct):
                return QCall(left.functor, left.args)
            raise ParseError(f"expected atom, found {tok.text or 'end of input'!r}", tok.line, tok.col)

        if op.kind in ("=>", "<="):
            parser.next()
            ftok = parser.functor_name()
            args: list[QTerm] = []
            if parser.at("("):
                parser.next()
                if not parser.at(")"):
                    args.append(qterm())
                    while parser.at(","):
                        parser.next()
                        args.append(qterm())
                parser.expect(")")
            cls = QDeconstruct if op.kind == "=>" else QConstruct
            return cls(left, ftok.text, tuple(args))
        if op.kind == ":=":
            parser.next()
            return QAssign(left, qterm())
        if op.kind == "==":
            parser.next()
            return QTest(left, qterm())
        raise ParseError(f"expected '=>', '<=', ':=' or '==', found {op.text!r}", op.line, op.col)

    goal = [qatom()]
    while parser.at(","):
        parser.next()
        goal.append(qatom())
    parser.expect(".")
    parser.expect("eof")
    return Query(tuple(goal))
