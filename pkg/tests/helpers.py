"""Shared test utilities: fixture loading, hand-rolled oracles and random
generators for programs, interaction sets and ground terms."""

from __future__ import annotations

import random
from collections import Counter
from pathlib import Path

from argprof import (
    ASSIGN,
    PSI_BOT,
    ArgumentProfile,
    ConstructOp,
    DeconstructOp,
    GroundTerm,
    Interaction,
    InteractionSet,
    OSet,
    Operation,
    Program,
    PsiOp,
    bottom,
    join_interaction,
    make_interaction,
    parse_program,
)

FIXTURES = Path(__file__).parent / "fixtures"


def load_fixture(name: str) -> Program:
    return parse_program((FIXTURES / name).read_text())


def fixture_names() -> list[str]:
    return sorted(p.name for p in FIXTURES.glob("*.lp"))


# Fixtures whose predicates all have pairwise-distinct argument profiles;
# these are the ones where the profile order pins a unique permutation.
TIE_FREE_FIXTURES = [
    "append.lp",
    "concat.lp",
    "double_append.lp",
    "pick.lp",
    "reverse.lp",
    "nat_add.lp",
    "last.lp",
    "mixed.lp",
]


def iset(owner: str, inputs: list[str], edges: list[tuple[str, str, list[tuple[Operation, int]]]]) -> InteractionSet:
    """Build an interaction set from (source, target, [(op, point)]) triples."""
    s = bottom(owner, inputs)
    for source, target, sited in edges:
        s = join_interaction(make_interaction(source, target, sited), s)
    return s


# ---------------------------------------------------------------------------
# Independent oracle: transitive closure by a naive from-scratch loop
# ---------------------------------------------------------------------------


def naive_closure(
    edges: dict[tuple[str, str], dict[int, Operation]]
) -> dict[tuple[str, str], dict[int, Operation]]:
    """Fixpoint of merging X->Y->Z compositions, written over plain dicts."""
    current = {pair: dict(ops) for pair, ops in edges.items()}
    while True:
        changed = False
        items = list(current.items())
        for (x, y), ops1 in items:
            for (y2, z), ops2 in items:
                if y != y2 or z == x or z == y:
                    continue
                merged = dict(ops1)
                merged.update(ops2)
                have = current.get((x, z))
                if have is None:
                    current[(x, z)] = merged
                    changed = True
                else:
                    union = dict(have)
                    union.update(merged)
                    if union != have:
                        current[(x, z)] = union
                        changed = True
        if not changed:
            return current


def as_edge_dict(s: InteractionSet) -> dict[tuple[str, str], dict[int, Operation]]:
    return {(i.source, i.target): i.by_point() for i in s}


# ---------------------------------------------------------------------------
# Random well-defined interaction sets over a fixed predicate context
# ---------------------------------------------------------------------------

_BASE_OPS: list[Operation] = [
    ASSIGN,
    PSI_BOT,
    ConstructOp("cons", 2),
    ConstructOp("nil", 0),
    DeconstructOp("cons", 2),
    DeconstructOp("s", 1),
    PsiOp((ArgumentProfile((OSet((ASSIGN,), 2),)), ArgumentProfile(()))),
]


class SetContext:
    """A fixed predicate shape: variables, input formals, and one operation
    per program point, so joins of generated sets never disagree on a point."""

    def __init__(self, rng: random.Random):
        n_args = rng.randint(2, 4)
        names = [f"A{i}" for i in range(1, n_args + 1)]
        n_inputs = rng.randint(1, n_args - 1)
        self.owner = "p"
        self.inputs = names[:n_inputs]
        self.locals = [f"L{i}" for i in range(1, rng.randint(2, 4))]
        self.variables = names + self.locals
        self.op_at = {pt: rng.choice(_BASE_OPS) for pt in range(1, rng.randint(4, 10))}
        self.pairs = [
            (s, t)
            for s in self.variables
            for t in self.variables
            if s != t and t not in self.inputs
        ]

    def random_set(self, rng: random.Random) -> InteractionSet:
        s = bottom(self.owner, self.inputs)
        for pair in self.pairs:
            if rng.random() < 0.35:
                points = rng.sample(sorted(self.op_at), rng.randint(1, min(3, len(self.op_at))))
                s = join_interaction(
                    make_interaction(pair[0], pair[1], [(self.op_at[pt], pt) for pt in points]), s
                )
        return s


# ---------------------------------------------------------------------------
# Random valid program generation (mode-correct and directly recursive
# by construction)
# ---------------------------------------------------------------------------

_FUNCTORS = [("nil", 0), ("cons", 2), ("z", 0), ("s", 1), ("pair", 2)]


def gen_program_source(rng: random.Random, max_preds: int = 6, max_args: int = 5, max_atoms: int = 12) -> str:
    """Emit the source of a random valid program.

    Bodies are built left to right against a bound-variable set, so mode
    checking succeeds; calls target earlier predicates or the predicate
    itself, so recursion is always direct.
    """
    lines: list[str] = []
    defined: list[tuple[str, tuple[str, ...]]] = []  # (name, modes)
    n_preds = rng.randint(1, max_preds)
    for k in range(n_preds):
        name = f"p{k}"
        arity = rng.randint(1, max_args)
        modes = tuple(rng.choice(("in", "out")) for _ in range(arity))
        head = [f"A{i}" for i in range(1, arity + 1)]
        lines.append(f":- pred {name}({','.join(modes)}).")
        for _ in range(rng.randint(1, 3)):
            bound = [v for v, m in zip(head, modes) if m == "in"]
            atoms: list[str] = []
            fresh = 0

            def new_var() -> str:
                nonlocal fresh
                fresh += 1
                return f"L{fresh}"

            budget = rng.randint(0, max_atoms - arity - 1)
            for _ in range(budget):
                choice = rng.choice(["decon", "con", "assign", "test", "call", "call"])
                if choice == "decon" and bound:
                    f, n = rng.choice(_FUNCTORS)
                    outs = [new_var() for _ in range(n)]
                    args = f"({','.join(outs)})" if outs else ""
                    atoms.append(f"{rng.choice(bound)} => {f}{args}")
                    bound.extend(outs)
                elif choice == "con" and bound:
                    f, n = rng.choice(_FUNCTORS)
                    ins = [rng.choice(bound) for _ in range(n)]
                    target = new_var()
                    args = f"({','.join(ins)})" if ins else ""
                    atoms.append(f"{target} <= {f}{args}")
                    bound.append(target)
                elif choice == "con" and not bound:
                    target = new_var()
                    atoms.append(f"{target} <= nil")
                    bound.append(target)
                elif choice == "assign" and bound:
                    target = new_var()
                    atoms.append(f"{target} := {rng.choice(bound)}")
                    bound.append(target)
                elif choice == "test" and bound:
                    atoms.append(f"{rng.choice(bound)} == {rng.choice(bound)}")
                elif choice == "call":
                    candidates = list(defined)
                    if rng.random() < 0.5:
                        candidates.append((name, modes))
                    rng.shuffle(candidates)
                    for callee, callee_modes in candidates:
                        if any(m == "in" for m in callee_modes) and not bound:
                            continue
                        avail = list(bound)  # outputs of this call are not usable as its inputs
                        call_args = []
                        for m in callee_modes:
                            if m == "in":
                                call_args.append(rng.choice(avail))
                            else:
                                out = new_var()
                                call_args.append(out)
                                bound.append(out)
                        arglist = f"({','.join(call_args)})" if call_args else ""
                        atoms.append(f"{callee}{arglist}")
                        break
            for v, m in zip(head, modes):
                if m == "out":
                    if bound:
                        atoms.append(f"{v} := {rng.choice(bound)}")
                    else:
                        atoms.append(f"{v} <= nil")
            if atoms:
                lines.append(f"{name}({','.join(head)}) :- {', '.join(atoms)}.")
            else:
                lines.append(f"{name}({','.join(head)}).")
        defined.append((name, modes))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Random ground terms and query answers
# ---------------------------------------------------------------------------


def gen_ground_term(rng: random.Random, depth: int = 4) -> GroundTerm:
    if depth == 0 or rng.random() < 0.3:
        return GroundTerm(rng.choice(["nil", "z", "0", "1", "2"]))
    f, n = rng.choice([f for f in _FUNCTORS if f[1] > 0])
    return GroundTerm(f, tuple(gen_ground_term(rng, depth - 1) for _ in range(n)))


def gen_ground_list(rng: random.Random, max_len: int = 4) -> GroundTerm:
    term = GroundTerm("nil")
    for _ in range(rng.randint(0, max_len)):
        head = GroundTerm(rng.choice(["0", "1", "2", "a", "b"]))
        term = GroundTerm("cons", (head, term))
    return term


def gen_input_term(rng: random.Random) -> GroundTerm:
    return gen_ground_list(rng) if rng.random() < 0.6 else gen_ground_term(rng)


def answer_multiset(answers: list[dict[str, GroundTerm]]) -> Counter:
    return Counter(tuple(sorted(a.items())) for a in answers)
