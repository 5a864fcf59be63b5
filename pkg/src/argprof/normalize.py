"""Argument-order normalization and profile-equivalence checking.

Normalization reorders every predicate's arguments into the order of its
ordered profile: clause heads, mode declarations and all call sites are
permuted consistently, so the rewritten program computes the same answers
with permuted argument positions. Two predicates are profile-equivalent
when their ordered profiles have identical canonical serializations; the
witness maps argument positions of one onto the other through the two
permutations. Equivalence of ordered profiles is a necessary condition for
one predicate being a renaming of the other modulo argument order, not a
sufficient one, so results are reported as profile equivalence.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .analysis import Environment
from .domain import canon_profile
from .ordering import OrderedProfile, ProfileOrder, canon_ordered, compare_profiles, oprof
from .syntax import Atom, Call, Clause, Predicate, Program, make_program, renumber_points

NormalizationPlan = dict[str, tuple[int, ...]]


class PlanError(Exception):
    pass


def ordered_profile_of(
    pred: Predicate, env: Environment, order: ProfileOrder = compare_profiles
) -> OrderedProfile:
    return oprof(env[pred.name], pred.arg_names, pred.modes, order)


def plan(
    program: Program, env: Environment, order: ProfileOrder = compare_profiles
) -> NormalizationPlan:
    """Per predicate, the permutation (new position -> original position)
    realizing its ordered profile."""
    return {
        name: ordered_profile_of(pred, env, order).permutation
        for name, pred in program.predicates.items()
    }


def _permute(seq: tuple, permutation: tuple[int, ...]) -> tuple:
    return tuple(seq[orig - 1] for orig in permutation)


def rewrite(program: Program, normalization: NormalizationPlan) -> Program:
    """Apply a normalization plan to the whole program.

    Heads, mode declarations and call atoms are permuted by the owning or
    called predicate's permutation; atom order, variable names and
    everything else stay untouched. Program points are re-assigned in the
    new textual order (which leaves them unchanged, since atom order is
    preserved).
    """
    for name in program.predicates:
        if name not in normalization:
            raise PlanError(f"plan is missing predicate '{name}'")
    preds: dict[str, Predicate] = {}
    for name, pred in program.predicates.items():
        perm = normalization[name]
        clauses = []
        for clause in pred.clauses:
            body: list[Atom] = []
            for atom in clause.body:
                if isinstance(atom, Call):
                    body.append(replace(atom, args=_permute(atom.args, normalization[atom.pred])))
                else:
                    body.append(atom)
            clauses.append(
                Clause(_permute(clause.head_args, perm), tuple(body), clause.line, clause.col)
            )
        preds[name] = Predicate(
            name, pred.arity, _permute(pred.modes, perm), tuple(clauses), pred.line, pred.col
        )
    return renumber_points(make_program(preds))


@dataclass(frozen=True)
class Equivalent:
    """Profile equivalence with a positional witness: ``mapping[i]`` is the
    position in the second predicate playing the role of position i in the
    first (1-based)."""

    mapping: dict[int, int]


@dataclass(frozen=True)
class Distinct:
    reason: str


def compare(
    p: Predicate,
    q: Predicate,
    env: Environment,
    order: ProfileOrder = compare_profiles,
) -> Equivalent | Distinct:
    """Decide profile equivalence of two analyzed predicates."""
    if p.arity != q.arity:
        return Distinct(f"arity mismatch ({p.arity} vs {q.arity})")
    op_p = ordered_profile_of(p, env, order)
    op_q = ordered_profile_of(q, env, order)
    if canon_ordered(op_p) != canon_ordered(op_q):
        for k, (a, b) in enumerate(zip(op_p.profiles, op_q.profiles), start=1):
            ca, cb = canon_profile(a), canon_profile(b)
            if ca != cb:
                return Distinct(f"ordered profiles differ at position {k}: {ca} vs {cb}")
        return Distinct("ordered profiles differ")
    mapping = {op_p.permutation[k]: op_q.permutation[k] for k in range(p.arity)}
    return Equivalent(mapping)
