"""
Polynomials in the pair variables D{i,j} and minors of the relation matrix.

The relation matrix has entries D{i,j} - D{i,n} - D{j,n} (i, j < n) with
D{i,i} = 0. Its (m+1)-minors generate every polynomial relation among the
squared distances of n points in m-space. The ideal itself is never built:
questions about it are answered through single minors or by evaluating at
concrete distance vectors.
"""
from __future__ import annotations

import logging
import re
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, combinations_with_replacement, permutations
from typing import TYPE_CHECKING, Iterable, Mapping, Sequence

from pointspectra.errors import (
    DegreeMismatchError,
    DocumentParseError,
    IndexOutOfRangeError,
    SizeMismatchError,
    TooLargeError,
)
from pointspectra.geometry.configuration import pair_list, pair_position
from pointspectra.geometry.scalar import QuadScalar

if TYPE_CHECKING:
    from pointspectra.algebra.permact import PairPermutation

logger = logging.getLogger(__name__)

Monomial = tuple[int, ...]

_TERM_PATTERN = re.compile(r"D\{(\d+),(\d+)\}(?:\^(\d+))?")


class PairPolynomial:
    """
    Sparse polynomial with rational coefficients. A monomial is the sorted
    tuple of the 1-based pair numbers of its factors, repeated by exponent.
    """

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: Mapping[Monomial, Fraction | int] | None = None):
        self.n = n
        self.terms: dict[Monomial, Fraction] = {}
        for monomial, coefficient in (terms or {}).items():
            if coefficient:
                key = tuple(sorted(monomial))
                self.terms[key] = self.terms.get(key, Fraction(0)) + Fraction(coefficient)
                if not self.terms[key]:
                    del self.terms[key]

    @classmethod
    def variable(cls, n: int, i: int, j: int) -> PairPolynomial:
        if i == j:
            return cls(n)
        return cls(n, {(pair_position(i, j, n),): 1})

    @classmethod
    def constant(cls, n: int, value: Fraction | int) -> PairPolynomial:
        return cls(n, {(): value})

    def _check(self, other: PairPolynomial) -> None:
        if other.n != self.n:
            raise SizeMismatchError(f"polynomials over {self.n} and {other.n} points")

    def __add__(self, other: PairPolynomial) -> PairPolynomial:
        self._check(other)
        terms = dict(self.terms)
        for monomial, coefficient in other.terms.items():
            terms[monomial] = terms.get(monomial, Fraction(0)) + coefficient
        return PairPolynomial(self.n, terms)

    def __neg__(self) -> PairPolynomial:
        return PairPolynomial(self.n, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other: PairPolynomial) -> PairPolynomial:
        return self + (-other)

    def __mul__(self, other: PairPolynomial | Fraction | int) -> PairPolynomial:
        if isinstance(other, (int, Fraction)):
            return PairPolynomial(self.n, {k: v * other for k, v in self.terms.items()})
        self._check(other)
        terms: dict[Monomial, Fraction] = {}
        for left, a in self.terms.items():
            for right, b in other.terms.items():
                key = tuple(sorted(left + right))
                terms[key] = terms.get(key, Fraction(0)) + a * b
        return PairPolynomial(self.n, terms)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, PairPolynomial):
            return NotImplemented
        return self.n == other.n and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.n, frozenset(self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        return max((len(k) for k in self.terms), default=0)

    def coefficient(self, monomial: Monomial | "MonomialSpec") -> Fraction:
        if isinstance(monomial, MonomialSpec):
            monomial = monomial.key(self.n)
        return self.terms.get(tuple(sorted(monomial)), Fraction(0))

    def monomials(self) -> set[Monomial]:
        return set(self.terms)

    def evaluate(self, values: Sequence[QuadScalar]) -> QuadScalar:
        """Value at squared distances listed in lexicographic pair order."""
        d = next((v.d for v in values if v.d != 1), 1)
        total = QuadScalar.zero(d)
        for monomial, coefficient in self.terms.items():
            term = QuadScalar(coefficient, 0, d)
            for pair in monomial:
                term = term * values[pair - 1]
            total = total + term
        return total

    def substitute(self, images: Sequence[int]) -> PairPolynomial:
        """Rename D_S to D_{images[S]} (1-based pair numbers)."""
        return PairPolynomial(
            self.n, {tuple(images[p - 1] for p in k): v for k, v in self.terms.items()}
        )

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        pairs = pair_list(self.n)
        chunks = []
        for monomial in sorted(self.terms, key=lambda k: (len(k), k)):
            coefficient = self.terms[monomial]
            sign = "-" if coefficient < 0 else "+"
            factors = [f"D{{{pairs[p - 1][0]},{pairs[p - 1][1]}}}" for p in monomial]
            magnitude = abs(coefficient)
            if magnitude != 1 or not factors:
                factors.insert(0, str(magnitude))
            chunks.append(f"{sign}{'*'.join(factors)}")
        text = "".join(chunks)
        return text[1:] if text.startswith("+") else text

    def __repr__(self) -> str:
        return f"PairPolynomial(n={self.n}, {self})"


def parse_polynomial(text: str, n: int) -> PairPolynomial:
    """Inverse of `str(PairPolynomial)`."""
    compact = text.replace(" ", "")
    if compact in ("", "0"):
        return PairPolynomial(n)
    polynomial = PairPolynomial(n)
    for match in re.finditer(r"([+-]?)([^+-]+)", compact):
        sign, body = match.groups()
        coefficient = Fraction(-1 if sign == "-" else 1)
        monomial: list[int] = []
        for factor in body.split("*"):
            term = _TERM_PATTERN.fullmatch(factor)
            if term is None:
                try:
                    coefficient *= Fraction(factor)
                except ValueError:
                    raise DocumentParseError(f"malformed factor {factor!r}", 1, match.start() + 1)
                continue
            i, j, power = int(term.group(1)), int(term.group(2)), int(term.group(3) or 1)
            monomial.extend([pair_position(i, j, n)] * power)
        polynomial = polynomial + PairPolynomial(n, {tuple(monomial): coefficient})
    return polynomial


@dataclass(frozen=True)
class MonomialSpec:
    """A product of pair variables, with repeats for powers."""

    factors: tuple[tuple[int, int], ...]

    @classmethod
    def of(cls, factors: Iterable[Sequence[int]]) -> MonomialSpec:
        return cls(tuple(sorted((min(f), max(f)) for f in factors)))

    @property
    def degree(self) -> int:
        return len(self.factors)

    def key(self, n: int) -> Monomial:
        return tuple(sorted(pair_position(i, j, n) for i, j in self.factors))

    def index_counts(self) -> Counter:
        return Counter(index for pair in self.factors for index in pair)

    def relabel(self, perm: Sequence[int]) -> MonomialSpec:
        return MonomialSpec.of((perm[i - 1], perm[j - 1]) for i, j in self.factors)

    def __str__(self) -> str:
        return "*".join(f"D{{{i},{j}}}" for i, j in self.factors)


def symbolic_relation_matrix(n: int) -> list[list[PairPolynomial]]:
    if n < 2:
        raise SizeMismatchError("the relation matrix needs at least two points")

    def var(i: int, j: int) -> PairPolynomial:
        return PairPolynomial.variable(n, i, j)

    return [[var(i, j) - var(i, n) - var(j, n) for j in range(1, n)] for i in range(1, n)]


def minor(
    matrix: Sequence[Sequence[PairPolynomial]], rows: Sequence[int], cols: Sequence[int]
) -> PairPolynomial:
    """
    Determinant of the submatrix on 1-based rows and columns, by Laplace
    expansion along rows memoized on the remaining column subset.
    """
    if len(rows) != len(cols):
        raise SizeMismatchError("a minor needs as many rows as columns")
    size = len(matrix)
    for index in (*rows, *cols):
        if not 1 <= index <= size:
            raise IndexOutOfRangeError(f"row/column {index} outside 1..{size}")
    n = matrix[0][0].n
    rows, cols = tuple(rows), tuple(cols)

    @lru_cache(maxsize=None)
    def expand(depth: int, remaining: tuple[int, ...]) -> PairPolynomial:
        if depth == len(rows):
            return PairPolynomial.constant(n, 1)
        total = PairPolynomial(n)
        for position, col in enumerate(remaining):
            entry = matrix[rows[depth] - 1][col - 1]
            if entry.is_zero():
                continue
            rest = expand(depth + 1, remaining[:position] + remaining[position + 1 :])
            term = entry * rest
            total = total - term if position % 2 else total + term
        return total

    return expand(0, cols)


@lru_cache(maxsize=512)
def relation_minor(n: int, rows: tuple[int, ...], cols: tuple[int, ...]) -> PairPolynomial:
    """Cached minor of the symbolic relation matrix of n points."""
    return minor(symbolic_relation_matrix(n), rows, cols)


def minor_index_sets(n: int, size: int) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """All (rows, cols) of size-r minors in lexicographic order."""
    subsets = list(combinations(range(1, n), size))
    return [(rows, cols) for rows in subsets for cols in subsets]


def monomial_admissible(t: MonomialSpec, r: int, n: int) -> bool:
    """True iff no point index occurs more than twice among the factors."""
    if t.degree != r:
        raise DegreeMismatchError(f"monomial {t} has degree {t.degree}, expected {r}")
    if not 1 <= r <= n - 1:
        raise DegreeMismatchError(f"degree {r} outside 1..{n - 1}")
    for i, j in t.factors:
        if i == j or not (1 <= i <= n and 1 <= j <= n):
            raise IndexOutOfRangeError(f"factor D{{{i},{j}}} is not a pair of 1..{n}")
    return all(count <= 2 for count in t.index_counts().values())


@lru_cache(maxsize=32)
def occurring_monomials(n: int, r: int) -> frozenset[Monomial]:
    """Union of the monomials of all r x r minors of the relation matrix."""
    if n > 6:
        raise TooLargeError(f"exhaustive minor expansion is limited to n <= 6, got {n}")
    if not 1 <= r <= n - 1:
        raise DegreeMismatchError(f"degree {r} outside 1..{n - 1}")
    found: set[Monomial] = set()
    index_sets = minor_index_sets(n, r)
    logger.info(f"Expanding {len(index_sets)} minors of size {r} for n={n}")
    for rows, cols in index_sets:
        found |= relation_minor(n, rows, cols).monomials()
    return frozenset(found)


def monomial_occurs_bruteforce(t: MonomialSpec, r: int, n: int) -> bool:
    if t.degree != r:
        raise DegreeMismatchError(f"monomial {t} has degree {t.degree}, expected {r}")
    return t.key(n) in occurring_monomials(n, r)


def apply_pair_permutation(F: PairPolynomial, phi: "PairPermutation") -> PairPolynomial:
    """Substitute D_S -> D_{phi(S)}."""
    if phi.n != F.n:
        raise SizeMismatchError(f"pair permutation on {phi.n} points applied to a polynomial on {F.n}")
    return F.substitute(phi.images)


def canonical_monomial(t: MonomialSpec, n: int) -> MonomialSpec:
    """Smallest relabeling of t under the symmetric group on 1..n."""
    return min(
        (t.relabel(perm) for perm in permutations(range(1, n + 1))), key=lambda s: s.factors
    )


def inequivalent_monomials(n: int, r: int) -> list[MonomialSpec]:
    """One representative per symmetric-group class of degree-r monomials."""
    seen: dict[tuple, MonomialSpec] = {}
    for factors in combinations_with_replacement(pair_list(n), r):
        canonical = canonical_monomial(MonomialSpec.of(factors), n)
        seen.setdefault(canonical.factors, canonical)
    return [seen[key] for key in sorted(seen)]
