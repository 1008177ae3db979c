"""
Permutations of the pair set {1..C(n,2)}, the subgroups they generate and
double coset decompositions G psi H of the full symmetric group on pairs.

Pairs are numbered 1..C(n,2) in lexicographic order. A PairPermutation maps
pair number k to images[k-1]; composition `a * b` applies b first.
"""
from __future__ import annotations

import logging
import math
import random
import re
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import TYPE_CHECKING, Iterator, Sequence

import numpy as np
from sympy.combinatorics import Permutation, PermutationGroup

from pointspectra.algebra.relideal import PairPolynomial, minor_index_sets, relation_minor
from pointspectra.config import settings
from pointspectra.errors import DocumentParseError, SizeMismatchError, TooLargeError
from pointspectra.geometry.configuration import (
    PointConfiguration,
    RelationMatrix,
    pair_list,
    pair_position,
    relation_matrix,
)
from pointspectra.geometry.scalar import QuadScalar

if TYPE_CHECKING:
    from pointspectra.services.storage import CertificationReport

logger = logging.getLogger(__name__)

MAX_SWEEP_PAIRS = 10

_CYCLE_PATTERN = re.compile(r"\(([\d,\s]+)\)")


@dataclass(frozen=True)
class PairPermutation:
    n: int
    images: tuple[int, ...]

    def __post_init__(self):
        size = self.n * (self.n - 1) // 2
        if sorted(self.images) != list(range(1, size + 1)):
            raise SizeMismatchError(
                f"{self.images} is not a permutation of the {size} pairs of {self.n} points"
            )

    @property
    def size(self) -> int:
        return len(self.images)

    @classmethod
    def identity(cls, n: int) -> PairPermutation:
        return cls(n, tuple(range(1, n * (n - 1) // 2 + 1)))

    @classmethod
    def from_cycles(cls, n: int, cycles: str | Sequence[Sequence[int]]) -> PairPermutation:
        """Build from cycle notation such as "(1,3,4,6)" or "(2,4)(3,5)"."""
        if isinstance(cycles, str):
            text = cycles.replace(" ", "")
            parsed = [[int(k) for k in body.split(",")] for body in _CYCLE_PATTERN.findall(text)]
            if "".join(f"({','.join(map(str, c))})" for c in parsed) != text and text not in ("", "()"):
                raise DocumentParseError(f"malformed cycle notation {cycles!r}", 1, 1)
            cycles = parsed
        images = list(range(1, n * (n - 1) // 2 + 1))
        for cycle in cycles:
            for position, k in enumerate(cycle):
                if not 1 <= k <= len(images):
                    raise SizeMismatchError(f"pair number {k} outside 1..{len(images)}")
                images[k - 1] = cycle[(position + 1) % len(cycle)]
        return cls(n, tuple(images))

    def __call__(self, k: int) -> int:
        return self.images[k - 1]

    def __mul__(self, other: PairPermutation) -> PairPermutation:
        if other.n != self.n:
            raise SizeMismatchError("pair permutations over different point counts")
        return PairPermutation(self.n, tuple(self.images[k - 1] for k in other.images))

    def inverse(self) -> PairPermutation:
        inverse = [0] * self.size
        for k, image in enumerate(self.images, start=1):
            inverse[image - 1] = k
        return PairPermutation(self.n, tuple(inverse))

    def is_identity(self) -> bool:
        return all(image == k for k, image in enumerate(self.images, start=1))

    def map_pair(self, i: int, j: int) -> tuple[int, int]:
        return pair_list(self.n)[self(pair_position(i, j, self.n)) - 1]

    def cycles(self) -> list[tuple[int, ...]]:
        seen, result = set(), []
        for start in range(1, self.size + 1):
            if start in seen or self(start) == start:
                continue
            cycle, k = [], start
            while k not in seen:
                seen.add(k)
                cycle.append(k)
                k = self(k)
            result.append(tuple(cycle))
        return result

    def to_sympy(self) -> Permutation:
        return Permutation([k - 1 for k in self.images])

    def as_array(self) -> np.ndarray:
        return np.array(self.images, dtype=np.int8) - 1

    def permute_values(self, values: Sequence[QuadScalar]) -> list[QuadScalar]:
        """The distance vector d o phi: entry S becomes d_{phi(S)}."""
        return [values[image - 1] for image in self.images]

    def __str__(self) -> str:
        cycles = self.cycles()
        return "".join(f"({','.join(map(str, c))})" for c in cycles) or "()"


def induced_from_point_permutation(perm: Sequence[int]) -> PairPermutation:
    """phi_pi({i,j}) = {pi(i), pi(j)} for a 1-based point permutation."""
    n = len(perm)
    if sorted(perm) != list(range(1, n + 1)):
        raise ValueError(f"{tuple(perm)} is not a permutation of 1..{n}")
    return PairPermutation(
        n, tuple(pair_position(perm[i - 1], perm[j - 1], n) for i, j in pair_list(n))
    )


def induced_generators(n: int) -> list[PairPermutation]:
    """Images of a transposition and an n-cycle, which generate S_n."""
    if n < 3:
        return []
    swap = [2, 1] + list(range(3, n + 1))
    rotate = list(range(2, n + 1)) + [1]
    return [induced_from_point_permutation(swap), induced_from_point_permutation(rotate)]


def distance_stabilizer(P: PointConfiguration) -> list[PairPermutation]:
    """
    Generators of the group of pair permutations preserving the labeled
    distances: a symmetric group on every class of equal values.
    """
    classes: dict[QuadScalar, list[int]] = {}
    for k, value in enumerate(P.distance_values(), start=1):
        classes.setdefault(value, []).append(k)
    generators = []
    for members in classes.values():
        if len(members) < 2:
            continue
        generators.append(PairPermutation.from_cycles(P.n, [members[:2]]))
        if len(members) > 2:
            generators.append(PairPermutation.from_cycles(P.n, [members]))
    return generators


def preserves_distances(phi: PairPermutation, P: PointConfiguration) -> bool:
    values = P.distance_values()
    return phi.permute_values(values) == list(values)


def group_order(generators: Sequence[PairPermutation], n: int) -> int:
    size = n * (n - 1) // 2
    if not generators:
        return 1
    return int(PermutationGroup([g.to_sympy() for g in generators]).order()) if size > 1 else 1


# double cosets ----------------------------------------------------------


@lru_cache(maxsize=2)
def _all_permutations(size: int) -> np.ndarray:
    """Every permutation of 0..size-1, row index equal to its lexicographic rank."""
    table = np.zeros((1, 0), dtype=np.int8)
    for k in range(1, size + 1):
        blocks = []
        for first in range(k):
            rest = (table + (table >= first)).astype(np.int8)
            head = np.full((len(table), 1), first, dtype=np.int8)
            blocks.append(np.hstack([head, rest]))
        table = np.vstack(blocks)
    table.setflags(write=False)
    return table


def lehmer_rank(perms: np.ndarray) -> np.ndarray:
    """Lexicographic ranks of the rows of a (count, size) permutation array."""
    size = perms.shape[1]
    ranks = np.zeros(len(perms), dtype=np.int64)
    for i in range(size - 1):
        smaller = (perms[:, i + 1 :] < perms[:, i : i + 1]).sum(axis=1)
        ranks += smaller * math.factorial(size - 1 - i)
    return ranks


@dataclass
class DoubleCosetDecomposition:
    n: int
    g_generators: list[PairPermutation]
    h_generators: list[PairPermutation]
    representatives: list[PairPermutation]
    sizes: list[int]
    _labels: np.ndarray = field(repr=False)
    _label_index: dict[int, int] = field(repr=False)

    def __len__(self) -> int:
        return len(self.representatives)

    def locate(self, psi: PairPermutation) -> int:
        """Index of the double coset containing psi."""
        rank = int(lehmer_rank(psi.as_array()[None, :])[0])
        return self._label_index[int(self._labels[rank])]


def double_cosets(
    g_generators: Sequence[PairPermutation],
    h_generators: Sequence[PairPermutation],
    n: int,
) -> DoubleCosetDecomposition:
    """
    Split the symmetric group on the C(n,2) pairs into double cosets G psi H.

    Every permutation is labeled with the smallest rank in its orbit under
    left multiplication by G and right multiplication by H; labels are
    propagated along generator edges until stable. The identity has rank 0,
    so its double coset comes first.
    """
    size = n * (n - 1) // 2
    if size > MAX_SWEEP_PAIRS:
        raise TooLargeError(
            f"double cosets need a sweep over {math.factorial(size)} permutations of "
            f"{size} pairs; supported up to n = 5"
        )
    perms = _all_permutations(size)
    total = len(perms)
    logger.info(f"Sweeping {total} pair permutations for n={n}")
    neighbours = []
    for g in g_generators:
        neighbours.append(lehmer_rank(g.as_array()[perms]).astype(np.int32))
    for h in h_generators:
        neighbours.append(lehmer_rank(perms[:, h.as_array()]).astype(np.int32))

    labels = np.arange(total, dtype=np.int32)
    rounds = 0
    while True:
        updated = labels.copy()
        for image in neighbours:
            np.minimum(updated, labels[image], out=updated)
        updated = updated[updated]
        rounds += 1
        if np.array_equal(updated, labels):
            break
        labels = updated
    logger.debug(f"Label propagation settled after {rounds} rounds")

    roots, sizes = np.unique(labels, return_counts=True)
    representatives = [PairPermutation(n, tuple(int(k) + 1 for k in perms[root])) for root in roots]
    logger.info(f"Found {len(roots)} double cosets")
    return DoubleCosetDecomposition(
        n=n,
        g_generators=list(g_generators),
        h_generators=list(h_generators),
        representatives=representatives,
        sizes=[int(s) for s in sizes],
        _labels=labels,
        _label_index={int(root): index for index, root in enumerate(roots)},
    )


# certificates -----------------------------------------------------------


class Verdict(str, Enum):
    CERTIFIED = "certified"
    INCONCLUSIVE = "inconclusive"
    NOT_APPLICABLE = "not-applicable"


@dataclass(frozen=True)
class CertificateCandidate:
    """A minor of the relation matrix, optionally times one pair variable."""

    n: int
    rows: tuple[int, ...]
    cols: tuple[int, ...]
    factor: int | None = None

    def polynomial(self) -> PairPolynomial:
        base = relation_minor(self.n, self.rows, self.cols)
        if self.factor is None:
            return base
        return base * PairPolynomial(self.n, {(self.factor,): 1})

    def evaluate(self, values: Sequence[QuadScalar], d: int = 1) -> QuadScalar:
        """Value at a distance vector, computed numerically from the minor."""
        return self.evaluate_on(relation_matrix(values, n=self.n, d=d), values)

    def evaluate_on(self, matrix: RelationMatrix, values: Sequence[QuadScalar]) -> QuadScalar:
        value = matrix.minor(self.rows, self.cols)
        if self.factor is not None:
            value = value * values[self.factor - 1]
        return value

    def __str__(self) -> str:
        rows, cols = ",".join(map(str, self.rows)), ",".join(map(str, self.cols))
        text = f"minor[{rows}|{cols}]"
        if self.factor is not None:
            i, j = pair_list(self.n)[self.factor - 1]
            text += f"*D{{{i},{j}}}"
        return text


def certificate_candidates(n: int, m: int) -> Iterator[CertificateCandidate]:
    """(m+1)-minors in lexicographic (rows, cols) order, then their multiples by one variable."""
    index_sets = minor_index_sets(n, m + 1)
    for rows, cols in index_sets:
        yield CertificateCandidate(n, rows, cols)
    for rows, cols in index_sets:
        for factor in range(1, n * (n - 1) // 2 + 1):
            yield CertificateCandidate(n, rows, cols, factor)


@dataclass(frozen=True)
class CertificateRecord:
    psi: PairPermutation
    coset_size: int
    candidate: CertificateCandidate | None
    value: QuadScalar | None
    permuted_value: QuadScalar | None
    generic_nonmember: bool
    tried: int


def random_generic_configuration(n: int, m: int, rng: random.Random) -> PointConfiguration:
    """Random integer configuration in [-10, 10]^m whose relation matrix has rank min(n-1, m)."""
    while True:
        P = PointConfiguration.from_coordinates(
            [[rng.randint(-10, 10) for _ in range(m)] for _ in range(n)]
        )
        if P.has_generic_rank():
            return P


def generic_probes(n: int, m: int, count: int | None = None, seed: int | None = None) -> list[PointConfiguration]:
    count = settings.generic_probes if count is None else count
    rng = random.Random(settings.random_seed if seed is None else seed)
    return [random_generic_configuration(n, m, rng) for _ in range(count)]


def find_certificate(
    P: PointConfiguration,
    psi: PairPermutation,
    probes: Sequence[PointConfiguration] = (),
    budget: int | None = None,
    coset_size: int = 0,
) -> CertificateRecord:
    """
    Search F in the ideal with psi(F) non-zero at the distances of P.

    psi(F) evaluated at d equals F evaluated at d o psi, so each candidate is
    a single exact minor of the relation matrix at the permuted distances.
    """
    budget = settings.certificate_budget if budget is None else budget
    values = list(P.distance_values())
    permuted = psi.permute_values(values)
    permuted_matrix = relation_matrix(permuted, n=P.n, d=P.d)
    tried = 0
    for candidate in certificate_candidates(P.n, P.m):
        if tried >= budget:
            break
        tried += 1
        permuted_value = candidate.evaluate_on(permuted_matrix, permuted)
        if permuted_value.is_zero():
            continue
        nonmember = any(
            not candidate.evaluate(psi.permute_values(list(probe.distance_values()))).is_zero()
            for probe in probes
        )
        return CertificateRecord(
            psi=psi,
            coset_size=coset_size,
            candidate=candidate,
            value=candidate.evaluate(values, P.d),
            permuted_value=permuted_value,
            generic_nonmember=nonmember or not probes,
            tried=tried,
        )
    logger.debug(f"No certificate for psi={psi} after {tried} candidates")
    return CertificateRecord(psi, coset_size, None, None, None, False, tried)


def certify_reconstructible(
    P: PointConfiguration,
    stabilizer: Sequence[PairPermutation] | None = None,
    budget: int | None = None,
) -> "CertificationReport":
    """Run the certification workflow and return its report."""
    from pointspectra.graph.graph import run_certification

    return run_certification(P, stabilizer=stabilizer, budget=budget)
