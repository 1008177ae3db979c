"""
Point configurations and their exact spectra.

A configuration is an ordered tuple of n points in m-space with coordinates in
a fixed field Q(sqrt d). Distances are always squared distances; volumes are
signed determinants of the offset vectors of an (m+1)-simplex.
"""
from __future__ import annotations

import hashlib
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

from pointspectra.algebra.volrel import reorder_sign
from pointspectra.config import settings
from pointspectra.errors import (
    ArityMismatchError,
    DuplicateIndexError,
    IndexOutOfRangeError,
    MissingDistanceError,
    MixedFieldError,
    NonPositiveBinError,
    ShapeMismatchError,
    WrongArityError,
    WrongNError,
)
from pointspectra.geometry import matrix as mx
from pointspectra.geometry.scalar import QuadScalar

logger = logging.getLogger(__name__)

ScalarLike = Union[QuadScalar, int, str]
Pair = tuple[int, int]


def pair_list(n: int) -> list[Pair]:
    """Unordered pairs of 1..n in lexicographic order."""
    return list(combinations(range(1, n + 1), 2))


def pair_position(i: int, j: int, n: int) -> int:
    """1-based position of the pair {i, j} in `pair_list(n)`."""
    if i == j:
        raise DuplicateIndexError(f"pair {{{i},{j}}} repeats an index")
    i, j = min(i, j), max(i, j)
    if i < 1 or j > n:
        raise IndexOutOfRangeError(f"pair {{{i},{j}}} outside 1..{n}")
    return (i - 1) * n - (i - 1) * i // 2 + (j - i)


def subset_list(n: int, size: int) -> list[tuple[int, ...]]:
    return list(combinations(range(1, n + 1), size))


def point_count(pair_count: int) -> int:
    n = (1 + math.isqrt(1 + 8 * pair_count)) // 2
    if n * (n - 1) // 2 != pair_count:
        raise ArityMismatchError(f"{pair_count} values do not fill the pairs of any point set")
    return n


class SpectrumKind(str, Enum):
    DISTANCE = "distance"
    VOLUME = "volume"


@dataclass(frozen=True)
class Spectrum:
    """Sorted multiset of exact values; equality is exact list equality."""

    values: tuple[QuadScalar, ...]
    kind: SpectrumKind

    @classmethod
    def of(cls, values: Iterable[QuadScalar], kind: SpectrumKind | str) -> Spectrum:
        return cls(tuple(sorted(values)), SpectrumKind(kind))

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    @property
    def d(self) -> int:
        return next((v.d for v in self.values if v.d != 1), 1)

    def key(self) -> str:
        return ",".join(str(v) for v in self.values)

    def digest(self) -> str:
        return hashlib.sha256(f"{self.kind.value}:{self.key()}".encode()).hexdigest()

    def as_floats(self) -> np.ndarray:
        return np.array([float(v) for v in self.values], dtype=float)


@dataclass(frozen=True)
class Histogram:
    bin_size: float
    counts: tuple[tuple[float, int], ...]

    @property
    def total(self) -> int:
        return sum(count for _, count in self.counts)


@dataclass(frozen=True)
class RelationMatrix:
    """The matrix D_{ij} - D_{in} - D_{jn} evaluated at concrete distances."""

    entries: tuple[tuple[QuadScalar, ...], ...]

    @property
    def size(self) -> int:
        return len(self.entries)

    def rows(self) -> list[list[QuadScalar]]:
        return [list(row) for row in self.entries]

    def rank(self) -> int:
        return mx.rank(self.rows())

    def determinant(self) -> QuadScalar:
        return mx.determinant(self.rows())

    def minor(self, rows: Sequence[int], cols: Sequence[int]) -> QuadScalar:
        """Determinant of the submatrix on 1-based rows and columns."""
        if len(rows) != len(cols):
            raise ShapeMismatchError("minor needs as many rows as columns")
        for index in (*rows, *cols):
            if not 1 <= index <= self.size:
                raise IndexOutOfRangeError(f"row/column {index} outside 1..{self.size}")
        return mx.determinant([[self.entries[i - 1][j - 1] for j in cols] for i in rows])


@dataclass(frozen=True)
class SymmetricInvariants:
    """Elementary symmetric functions of the three side lengths of a triangle."""

    squared: tuple[QuadScalar, QuadScalar, QuadScalar]
    lengths: tuple[float, float, float]


@dataclass(frozen=True)
class PointConfiguration:
    points: tuple[tuple[QuadScalar, ...], ...]
    d: int = 1
    weights: tuple[QuadScalar, ...] | None = field(default=None)

    def __post_init__(self):
        if not self.points:
            raise ShapeMismatchError("a configuration needs at least one point")
        m = len(self.points[0])
        if m < 1 or any(len(p) != m for p in self.points):
            raise ShapeMismatchError("all points must have the same positive dimension")
        for point in self.points:
            for x in point:
                if x.d != self.d and not (x.d == 1 and not x.b):
                    raise MixedFieldError(f"coordinate {x} does not belong to Q(sqrt {self.d})")
        if self.weights is not None:
            if len(self.weights) != m:
                raise ShapeMismatchError(f"{len(self.weights)} form weights for dimension {m}")
            if any(w.sign() <= 0 for w in self.weights):
                raise ValueError("bilinear form weights must be positive")

    @classmethod
    def from_coordinates(
        cls,
        points: Iterable[Iterable[ScalarLike]],
        d: int = 1,
        weights: Iterable[ScalarLike] | None = None,
    ) -> PointConfiguration:
        coerced = tuple(tuple(QuadScalar.coerce(x, d) for x in point) for point in points)
        form = None if weights is None else tuple(QuadScalar.coerce(w, d) for w in weights)
        return cls(coerced, d, form)

    @property
    def n(self) -> int:
        return len(self.points)

    @property
    def m(self) -> int:
        return len(self.points[0])

    def _check_index(self, i: int) -> None:
        if not isinstance(i, (int, np.integer)) or not 1 <= i <= self.n:
            raise IndexOutOfRangeError(f"point index {i} outside 1..{self.n}")

    def point(self, i: int) -> tuple[QuadScalar, ...]:
        self._check_index(i)
        return self.points[i - 1]

    # distances --------------------------------------------------------

    def squared_distance(self, i: int, j: int) -> QuadScalar:
        self._check_index(i)
        self._check_index(j)
        if i == j:
            raise DuplicateIndexError(f"squared_distance needs two different points, got {i} twice")
        return self._distances[pair_position(i, j, self.n) - 1]

    @cached_property
    def _distances(self) -> tuple[QuadScalar, ...]:
        weights = self.weights or (QuadScalar.one(self.d),) * self.m
        values = []
        for i, j in pair_list(self.n):
            total = QuadScalar.zero(self.d)
            for w, x, y in zip(weights, self.points[i - 1], self.points[j - 1]):
                diff = x - y
                total = total + w * diff * diff
            values.append(total)
        return tuple(values)

    def distance_values(self) -> tuple[QuadScalar, ...]:
        """Squared distances in lexicographic pair order."""
        return self._distances

    def distance_spectrum(self) -> Spectrum:
        if self.n < 2:
            raise ArityMismatchError("a distance spectrum needs at least two points")
        return Spectrum.of(self._distances, SpectrumKind.DISTANCE)

    # volumes ----------------------------------------------------------

    def signed_volume(self, *idx: int | Sequence[int]) -> QuadScalar:
        if len(idx) == 1 and not isinstance(idx[0], (int, np.integer)):
            idx = tuple(idx[0])
        if self.n <= self.m:
            raise ArityMismatchError(f"{self.n} points span no {self.m}-simplex")
        if len(idx) != self.m + 1:
            raise WrongArityError(f"a {self.m}-simplex has {self.m + 1} vertices, got {len(idx)}")
        for i in idx:
            self._check_index(i)
        ordered, sign = reorder_sign(idx)
        value = self._volumes[ordered]
        return value if sign > 0 else -value

    @cached_property
    def _volumes(self) -> dict[tuple[int, ...], QuadScalar]:
        volumes = {}
        for subset in subset_list(self.n, self.m + 1):
            base = self.points[subset[0] - 1]
            rows = [[x - y for x, y in zip(self.points[k - 1], base)] for k in subset[1:]]
            volumes[subset] = mx.determinant(rows)
        return volumes

    def volume_values(self) -> dict[tuple[int, ...], QuadScalar]:
        """Signed volumes keyed by increasing index tuples."""
        if self.n <= self.m:
            raise ArityMismatchError(f"{self.n} points span no {self.m}-simplex")
        return dict(self._volumes)

    def volume_spectrum(self) -> Spectrum:
        if self.n <= self.m:
            raise ArityMismatchError(f"volume spectrum needs more than {self.m} points, got {self.n}")
        return Spectrum.of((v * v for v in self._volumes.values()), SpectrumKind.VOLUME)

    def spectrum(self, kind: SpectrumKind | str) -> Spectrum:
        if SpectrumKind(kind) is SpectrumKind.DISTANCE:
            return self.distance_spectrum()
        return self.volume_spectrum()

    def is_flat(self) -> bool:
        """True when every (m+1)-simplex has zero volume."""
        return self.n <= self.m or all(v.is_zero() for v in self._volumes.values())

    # matrices ---------------------------------------------------------

    def gram_matrix(self, base: int | None = None) -> list[list[QuadScalar]]:
        """Inner products of offsets from `base`, computed from squared distances only."""
        base = self.n if base is None else base
        self._check_index(base)
        others = [i for i in range(1, self.n + 1) if i != base]
        half = QuadScalar(Fraction(1, 2), 0, self.d)

        def dist(i: int, j: int) -> QuadScalar:
            return QuadScalar.zero(self.d) if i == j else self.squared_distance(i, j)

        return [
            [half * (dist(i, base) + dist(j, base) - dist(i, j)) for j in others] for i in others
        ]

    def relation_matrix(self) -> RelationMatrix:
        return relation_matrix(self)

    def has_generic_rank(self) -> bool:
        return generic_rank_check(self)

    def offsets(self, base: int | None = None) -> list[list[QuadScalar]]:
        base = self.n if base is None else base
        origin = self.point(base)
        return [
            [x - y for x, y in zip(self.points[i - 1], origin)]
            for i in range(1, self.n + 1)
            if i != base
        ]

    # transformations --------------------------------------------------

    def relabel(self, perm: Sequence[int]) -> PointConfiguration:
        """Configuration whose i-th point is the perm[i]-th point of this one."""
        if sorted(perm) != list(range(1, self.n + 1)):
            raise ValueError(f"{tuple(perm)} is not a permutation of 1..{self.n}")
        return PointConfiguration(tuple(self.points[k - 1] for k in perm), self.d, self.weights)

    def translate(self, vector: Sequence[ScalarLike]) -> PointConfiguration:
        shift = [QuadScalar.coerce(x, self.d) for x in vector]
        if len(shift) != self.m:
            raise ShapeMismatchError(f"translation of dimension {len(shift)} for {self.m}-space")
        return PointConfiguration(
            tuple(tuple(x + t for x, t in zip(p, shift)) for p in self.points), self.d, self.weights
        )

    def apply_linear(self, matrix: Sequence[Sequence[ScalarLike]]) -> PointConfiguration:
        """Apply p -> A p to every point."""
        linear = [[QuadScalar.coerce(x, self.d) for x in row] for row in matrix]
        if len(linear) != self.m or any(len(row) != self.m for row in linear):
            raise ShapeMismatchError(f"linear map must be {self.m}x{self.m}")
        return PointConfiguration(
            tuple(tuple(mx.matvec(linear, p)) for p in self.points), self.d, self.weights
        )

    def to_array(self) -> np.ndarray:
        return np.array([[float(x) for x in p] for p in self.points], dtype=float)

    def __str__(self) -> str:
        body = ", ".join("(" + ",".join(str(x) for x in p) + ")" for p in self.points)
        return f"[{body}]"


def relation_matrix(
    source: PointConfiguration | Mapping[Pair, ScalarLike] | Sequence[ScalarLike],
    n: int | None = None,
    d: int = 1,
) -> RelationMatrix:
    """
    Evaluate D_{ij} - D_{in} - D_{jn} at a configuration or at abstract
    squared distances (a pair-keyed mapping or a list in pair order).
    """
    if isinstance(source, PointConfiguration):
        n, d = source.n, source.d
        values = dict(zip(pair_list(n), source.distance_values()))
    elif isinstance(source, Mapping):
        if n is None:
            n = max(max(pair) for pair in source) if source else 0
        values = {}
        for i, j in pair_list(n):
            raw = source.get((i, j), source.get((j, i)))
            if raw is None:
                raise MissingDistanceError(f"no distance given for pair {{{i},{j}}}")
            values[(i, j)] = QuadScalar.coerce(raw, d)
    else:
        raw_values = list(source)
        n = point_count(len(raw_values)) if n is None else n
        if len(raw_values) != n * (n - 1) // 2:
            raise MissingDistanceError(f"{n} points need {n * (n - 1) // 2} distances, got {len(raw_values)}")
        values = {pair: QuadScalar.coerce(v, d) for pair, v in zip(pair_list(n), raw_values)}

    def dist(i: int, j: int) -> QuadScalar:
        if i == j:
            return QuadScalar.zero(d)
        return values[(min(i, j), max(i, j))]

    return RelationMatrix(
        tuple(
            tuple(dist(i, j) - dist(i, n) - dist(j, n) for j in range(1, n))
            for i in range(1, n)
        )
    )


def generic_rank_check(P: PointConfiguration) -> bool:
    return relation_matrix(P).rank() == min(P.n - 1, P.m)


def symmetric_distance_invariants_n3(P: PointConfiguration) -> SymmetricInvariants:
    """
    Exact elementary symmetric functions of the three squared sides, plus the
    float elementary symmetric functions of the side lengths themselves.
    """
    if P.n != 3:
        raise WrongNError(f"symmetric triangle invariants need n = 3, got {P.n}")
    a, b, c = P.distance_values()
    squared = (a + b + c, a * b + a * c + b * c, a * b * c)
    x, y, z = np.sqrt([float(a), float(b), float(c)])
    lengths = (float(x + y + z), float(x * y + x * z + y * z), float(x * y * z))
    return SymmetricInvariants(squared, lengths)


def histogram(S: Spectrum, bin_size: float, take_sqrt: bool = False) -> Histogram:
    """Counts per left-closed bin [k*bin_size, (k+1)*bin_size)."""
    if not bin_size > 0:
        raise NonPositiveBinError(f"bin size must be positive, got {bin_size}")
    values = S.as_floats()
    if take_sqrt:
        values = np.sqrt(np.clip(values, 0.0, None))
    if values.size == 0:
        return Histogram(bin_size, ())
    bins, counts = np.unique(np.floor(values / bin_size).astype(np.int64), return_counts=True)
    return Histogram(
        bin_size, tuple((float(k * bin_size), int(c)) for k, c in zip(bins, counts))
    )


def spectra_match(S: Spectrum, T: Spectrum, tol: float | None = None) -> bool:
    """Tolerance comparison for spectra of noisy input; exact spectra use ==."""
    tol = settings.tolerance if tol is None else tol
    if S.kind != T.kind or len(S) != len(T):
        return False
    a, b = np.sort(S.as_floats()), np.sort(T.as_floats())
    scale = np.maximum(1.0, np.maximum(np.abs(a), np.abs(b)))
    return bool(np.all(np.abs(a - b) <= tol * scale))


def extend_on_line(
    P: PointConfiguration,
    Q: PointConfiguration,
    extra_points: Iterable[Iterable[ScalarLike]],
) -> tuple[PointConfiguration, PointConfiguration]:
    """Append the same extra points to both configurations of a collision pair."""
    if (P.m, P.d) != (Q.m, Q.d):
        raise ShapeMismatchError("both configurations must share dimension and field")
    extra = tuple(tuple(QuadScalar.coerce(x, P.d) for x in p) for p in extra_points)
    if any(len(p) != P.m for p in extra):
        raise ShapeMismatchError(f"extra points must live in {P.m}-space")
    return (
        PointConfiguration(P.points + extra, P.d, P.weights),
        PointConfiguration(Q.points + extra, Q.d, Q.weights),
    )


def embed(P: PointConfiguration, m: int, add_unit_points: bool = True) -> PointConfiguration:
    """
    Lift P into m-space by padding coordinates with zeros. With
    `add_unit_points` the unit vectors e_{P.m+1} .. e_m are appended, so every
    simplex through all of them has the volume of its base in P.
    """
    if m < P.m:
        raise ShapeMismatchError(f"cannot embed {P.m}-space into {m}-space")
    zero, one = QuadScalar.zero(P.d), QuadScalar.one(P.d)
    lifted = [tuple(p) + (zero,) * (m - P.m) for p in P.points]
    if add_unit_points:
        for axis in range(P.m, m):
            lifted.append(tuple(one if k == axis else zero for k in range(m)))
    return PointConfiguration(tuple(lifted), P.d)
