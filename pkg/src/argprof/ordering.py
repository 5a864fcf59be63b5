"""A total order on argument profiles and the ordered-profile operator.

Profiles are compared on a feature vector (number of o-sets, total
operations, psi-based operations, constructions, deconstructions,
assignments): the profile whose first differing feature is larger sorts
first. Profiles with equal features are ordered by their canonical
serialization, which makes the order total and deterministic; profiles
with identical serializations are equal.

``oprof`` sorts a predicate's argument profiles by this order (stable on
the original argument index for canonically equal profiles), keeps empty
profiles in the sequence, and rewrites every o-set target to the target
argument's new position. Sorting is what makes the result insensitive to
how the predicate's arguments happened to be arranged: two predicates that
differ only by an argument permutation get identical ordered profiles.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Callable, Sequence

from .domain import (
    ArgumentProfile,
    AssignOp,
    ConstructOp,
    DeconstructOp,
    InteractionSet,
    OSet,
    PredicateProfile,
    canon_profile,
    canon_profile_seq,
    is_psi_based,
    make_profile,
    strip_points,
)

ProfileOrder = Callable[[ArgumentProfile, ArgumentProfile], int]


@dataclass(frozen=True)
class FeatureVector:
    n_osets: int
    n_ops: int
    n_psi: int
    n_construct: int
    n_deconstruct: int
    n_assign: int

    def as_tuple(self) -> tuple[int, int, int, int, int, int]:
        return (
            self.n_osets,
            self.n_ops,
            self.n_psi,
            self.n_construct,
            self.n_deconstruct,
            self.n_assign,
        )


def features(profile: ArgumentProfile) -> FeatureVector:
    """Count features over all o-sets; psi payloads are treated opaquely."""
    n_ops = n_psi = n_con = n_dec = n_asn = 0
    for oset in profile.osets:
        for op in oset.ops:
            n_ops += 1
            if is_psi_based(op):
                n_psi += 1
            elif isinstance(op, ConstructOp):
                n_con += 1
            elif isinstance(op, DeconstructOp):
                n_dec += 1
            elif isinstance(op, AssignOp):
                n_asn += 1
    return FeatureVector(len(profile.osets), n_ops, n_psi, n_con, n_dec, n_asn)


def compare_profiles(a: ArgumentProfile, b: ArgumentProfile) -> int:
    """-1 if a sorts before b, 1 if after, 0 if canonically equal."""
    for fa, fb in zip(features(a).as_tuple(), features(b).as_tuple()):
        if fa != fb:
            return -1 if fa > fb else 1
    ca, cb = canon_profile(a), canon_profile(b)
    if ca == cb:
        return 0
    return -1 if ca < cb else 1


@dataclass(frozen=True)
class OrderedProfile:
    """Argument profiles sorted ascending, with targets remapped to new
    positions. ``permutation[k]`` is the original position (1-based) of the
    argument now at position k+1."""

    profiles: tuple[ArgumentProfile, ...]
    permutation: tuple[int, ...]


def oprof(
    phi: InteractionSet | PredicateProfile,
    args: Sequence[str],
    modes: Sequence[str],
    order: ProfileOrder = compare_profiles,
) -> OrderedProfile:
    """Order a predicate profile (or a projected interaction set) by ``order``.

    Canonically equal profiles keep their original relative order, so the
    permutation is unique and re-applying oprof to an ordered profile is
    the identity.
    """
    profile = strip_points(phi, args, modes) if isinstance(phi, InteractionSet) else phi
    n = len(profile.per_arg)
    indexed = sorted(
        range(n), key=functools.cmp_to_key(lambda i, j: order(profile.per_arg[i], profile.per_arg[j]))
    )
    permutation = tuple(i + 1 for i in indexed)
    new_pos = {orig: new + 1 for new, orig in enumerate(permutation)}
    remapped = tuple(
        make_profile(
            OSet(o.ops, new_pos[o.target]) for o in profile.per_arg[orig - 1].osets
        )
        for orig in permutation
    )
    return OrderedProfile(remapped, permutation)


def canon_ordered(ordered: OrderedProfile) -> str:
    """Canonical string of an ordered profile (permutation excluded)."""
    return canon_profile_seq(ordered.profiles)
