"""
Sign rule and linear relations of signed simplex volumes.

Volumes are keyed by increasing index tuples (1-based). For every set of
m+2 points the alternating sum of its m+2 facet volumes vanishes; these are
the only linear relations with unit coefficients, so checking them is the
linear part of any consistency test on a volume assignment.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from itertools import combinations
from typing import TYPE_CHECKING, Iterable, Mapping, Sequence

from pointspectra.errors import ArityMismatchError, DuplicateIndexError, WrongArityError
from pointspectra.geometry.scalar import QuadScalar

if TYPE_CHECKING:
    from pointspectra.geometry.configuration import PointConfiguration

logger = logging.getLogger(__name__)

Subset = tuple[int, ...]


def reorder_sign(idx: Sequence[int]) -> tuple[Subset, int]:
    """Sort the indices and return the sign of the sorting permutation."""
    if len(set(idx)) != len(idx):
        raise DuplicateIndexError(f"indices {tuple(idx)} are not distinct")
    inversions = sum(1 for a, b in combinations(idx, 2) if a > b)
    return tuple(sorted(idx)), -1 if inversions % 2 else 1


def facets(idx: Sequence[int]) -> list[tuple[int, Subset]]:
    """(sign, facet) pairs of the alternating sum over an increasing index tuple."""
    return [(-1 if k % 2 else 1, tuple(idx[:k]) + tuple(idx[k + 1 :])) for k in range(len(idx))]


def alternating_sum(P: "PointConfiguration", idx: Sequence[int]) -> QuadScalar:
    if len(idx) != P.m + 2:
        raise WrongArityError(f"alternating sum needs {P.m + 2} indices, got {len(idx)}")
    if P.n <= P.m + 1:
        raise ArityMismatchError(f"{P.n} points carry no relation among {P.m + 1}-simplices")
    if len(set(idx)) != len(idx):
        raise DuplicateIndexError(f"indices {tuple(idx)} are not distinct")
    total = QuadScalar.zero(P.d)
    for k in range(len(idx)):
        sign = -1 if k % 2 else 1
        total = total + sign * P.signed_volume(tuple(idx[:k]) + tuple(idx[k + 1 :]))
    return total


def relations_touching(subset: Subset, n: int) -> list[Subset]:
    """All (|subset|+1)-subsets of 1..n containing the given simplex."""
    return [tuple(sorted(subset + (extra,))) for extra in range(1, n + 1) if extra not in subset]


@dataclass(frozen=True)
class RelationVerdict:
    consistent: bool
    violated: Subset | None = None

    def __bool__(self) -> bool:
        return self.consistent


def _relation_holds(assignment: Mapping[Subset, QuadScalar], relation: Subset) -> bool | None:
    total = None
    for sign, facet in facets(relation):
        value = assignment.get(facet)
        if value is None:
            return None
        total = sign * value if total is None else total + sign * value
    return total.is_zero()


def linear_relation_filter(
    assignment: Mapping[Subset, QuadScalar],
    n: int | None = None,
    touched: Iterable[Subset] | None = None,
) -> RelationVerdict:
    """
    Check every fully assigned alternating-sum relation.

    With `touched` only relations containing one of the given simplices are
    checked, which is what an incremental search needs after each step.
    """
    if not assignment:
        return RelationVerdict(True)
    simplex_size = len(next(iter(assignment)))
    if n is None:
        n = max(max(subset) for subset in assignment)
    if touched is None:
        relations: Iterable[Subset] = combinations(range(1, n + 1), simplex_size + 1)
    else:
        relations = sorted({r for subset in touched for r in relations_touching(subset, n)})
    for relation in relations:
        if _relation_holds(assignment, relation) is False:
            logger.debug(f"alternating relation on {relation} violated")
            return RelationVerdict(False, relation)
    return RelationVerdict(True)
