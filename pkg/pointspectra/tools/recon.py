"""
Reconstruction oracles: enumerate every class of configurations that realize
a distance or volume spectrum. A configuration is reconstructible from its
spectrum exactly when one class comes back.
"""
from __future__ import annotations

import logging
import warnings
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations, permutations, product
from typing import Sequence

import numpy as np

from pointspectra.algebra.permact import induced_from_point_permutation
from pointspectra.algebra.volrel import linear_relation_filter
from pointspectra.config import settings
from pointspectra.errors import (
    AllVolumesZeroError,
    ArityMismatchError,
    HypothesisUnmet,
    NotASquareError,
    SearchBudgetExceededError,
    TooLargeError,
)
from pointspectra.geometry import matrix as mx
from pointspectra.geometry.configuration import (
    PointConfiguration,
    Spectrum,
    SpectrumKind,
    generic_rank_check,
    pair_list,
)
from pointspectra.geometry.scalar import QuadScalar
from pointspectra.tools.congruence import distance_relabelings, orbit_volume_equivalent

logger = logging.getLogger(__name__)

MAX_DISTANCE_POINTS = 7
MAX_ALIASES = 720


@dataclass(frozen=True)
class DistanceClass:
    """One realizable labeling of a distance spectrum, up to relabeling."""

    distances: tuple[QuadScalar, ...]
    gram: list[list[QuadScalar]] = field(repr=False)
    coordinates: np.ndarray = field(repr=False)
    residual: float = 0.0

    @property
    def n(self) -> int:
        return len(self.coordinates)


@dataclass
class ReconstructionResult:
    kind: SpectrumKind
    n: int
    m: int
    classes: list
    nodes: int = 0
    leaves: int = 0
    experimental: bool = False

    @property
    def count(self) -> int:
        return len(self.classes)


@dataclass
class ReconstructibilityResult:
    reconstructible: bool
    result: ReconstructionResult
    witnesses: list


def _gram_prefix(assigned: dict, k: int, d: int) -> list[list[QuadScalar]]:
    """Gram matrix of points 2..k around point 1, from the squared distances."""
    half = QuadScalar(1, 0, d) / 2

    def dist(i: int, j: int) -> QuadScalar:
        return QuadScalar.zero(d) if i == j else assigned[(min(i, j), max(i, j))]

    return [
        [half * (dist(1, i) + dist(1, j) - dist(i, j)) for j in range(2, k + 1)]
        for i in range(2, k + 1)
    ]


def _realizable(assigned: dict, k: int, m: int, d: int) -> bool:
    rank = mx.psd_rank(_gram_prefix(assigned, k, d))
    return rank is not None and rank <= m


def _coordinates(values: Sequence[QuadScalar], n: int, m: int, d: int) -> tuple[np.ndarray, float]:
    """Float coordinates from the exact Gram matrix, with the relative residual."""
    if n == 1:
        return np.zeros((1, m)), 0.0
    assigned = dict(zip(pair_list(n), values))
    gram = np.array([[float(x) for x in row] for row in _gram_prefix(assigned, n, d)])
    eigenvalues, vectors = np.linalg.eigh(gram)
    order = np.argsort(eigenvalues)[::-1][: min(m, n - 1)]
    X = vectors[:, order] * np.sqrt(np.clip(eigenvalues[order], 0.0, None))
    if X.shape[1] < m:
        X = np.hstack([X, np.zeros((n - 1, m - X.shape[1]))])
    coords = np.vstack([np.zeros((1, m)), X])
    target = np.array([float(v) for v in values])
    diffs = coords[:, None, :] - coords[None, :, :]
    rebuilt = (diffs**2).sum(axis=2)[np.triu_indices(n, 1)]
    scale = max(1.0, float(np.abs(target).max()))
    return coords, float(np.abs(rebuilt - target).max() / scale)


def realize_from_distances(
    S: Spectrum,
    n: int,
    m: int,
    tol: float | None = None,
    budget: int | None = None,
    prune: bool = True,
) -> ReconstructionResult:
    """
    Assign spectrum values to pairs point by point, keeping only assignments
    whose Gram matrix stays positive semidefinite of rank at most m. With
    `prune` the largest value sits on {1,2} and the test runs after every
    completed point; without it only complete assignments are tested.
    """
    tol = settings.tolerance if tol is None else tol
    budget = settings.search_budget if budget is None else budget
    if len(S) != n * (n - 1) // 2:
        raise ArityMismatchError(f"{len(S)} values cannot label the pairs of {n} points")
    if n > MAX_DISTANCE_POINTS:
        raise TooLargeError(f"distance reconstruction is limited to n <= {MAX_DISTANCE_POINTS}")
    d = S.d
    order = [(i, k) for k in range(2, n + 1) for i in range(1, k)]
    remaining = Counter(S.values)
    distinct = sorted(remaining, reverse=True)
    result = ReconstructionResult(SpectrumKind.DISTANCE, n, m, [], experimental=4 <= n <= m + 1)
    assigned: dict[tuple[int, int], QuadScalar] = {}

    def record_leaf() -> None:
        result.leaves += 1
        if not prune and not _realizable(assigned, n, m, d):
            return
        values = tuple(assigned[pair] for pair in pair_list(n))
        for known in result.classes:
            if next(iter(distance_relabelings(known.distances, values, n)), None) is not None:
                return
        coords, residual = _coordinates(values, n, m, d)
        if residual > tol:
            logger.warning(f"Float realization residual {residual:.3g} exceeds tolerance {tol:.3g}")
        gram = _gram_prefix(assigned, n, d)
        result.classes.append(DistanceClass(values, gram, coords, residual))
        logger.debug(f"Class {len(result.classes)} found after {result.nodes} nodes")

    def extend(position: int) -> None:
        result.nodes += 1
        if result.nodes > budget:
            raise SearchBudgetExceededError(f"distance oracle exceeded {budget} nodes")
        if position == len(order):
            record_leaf()
            return
        pair = order[position]
        candidates = distinct[:1] if prune and position == 0 else distinct
        for value in candidates:
            if not remaining[value]:
                continue
            remaining[value] -= 1
            assigned[pair] = value
            completes_point = pair[0] == pair[1] - 1
            if not (prune and completes_point) or _realizable(assigned, pair[1], m, d):
                extend(position + 1)
            del assigned[pair]
            remaining[value] += 1

    if n == 1:
        result.classes.append(DistanceClass((), [], np.zeros((1, m)), 0.0))
        return result
    extend(0)
    logger.info(f"Distance oracle: {result.count} classes, {result.nodes} nodes, {result.leaves} leaves")
    return result


def is_reconstructible_from_distances(
    P: PointConfiguration, tol: float | None = None, budget: int | None = None
) -> ReconstructibilityResult:
    result = realize_from_distances(P.distance_spectrum(), P.n, P.m, tol=tol, budget=budget)
    own = P.distance_values()
    witnesses = [
        c for c in result.classes if next(iter(distance_relabelings(c.distances, own, P.n)), None) is None
    ]
    return ReconstructibilityResult(result.count == 1, result, witnesses)


def _colex(n: int, size: int) -> list[tuple[int, ...]]:
    return sorted(combinations(range(1, n + 1), size), key=lambda s: s[::-1])


def realize_from_volumes(S: Spectrum, n: int, m: int, budget: int | None = None) -> ReconstructionResult:
    """
    Rebuild configurations from squared simplex volumes.

    The largest volume V is placed on {1..m+1} with a positive sign and that
    simplex is normalized to P1 = 0, P2 = V e1, Pj = e_{j-1}. Each further
    point is solved by Cramer's rule from the signed volumes of its first m
    simplices (chosen from the multiset, both signs); all of its other
    volumes are then forced and must still be available in the multiset.
    """
    budget = settings.search_budget if budget is None else budget
    if n <= m:
        raise ArityMismatchError(f"{n} points in {m}-space have no simplex volumes")
    if len(S) != len(list(combinations(range(n), m + 1))):
        raise ArityMismatchError(f"{len(S)} values cannot label the {m + 1}-subsets of {n} points")
    if all(v.is_zero() for v in S.values):
        raise AllVolumesZeroError("every volume is zero; the spectrum fixes no frame")
    d = S.d
    try:
        remaining = Counter(v.sqrt() for v in S.values)
    except NotASquareError as e:
        logger.info(f"Volume spectrum has no realization over Q(sqrt {d}): {e}")
        return ReconstructionResult(SpectrumKind.VOLUME, n, m, [])
    largest = max(remaining)
    remaining[largest] -= 1
    zero, one = QuadScalar.zero(d), QuadScalar.one(d)

    frame = tuple(range(1, m + 2))
    points: dict[int, list[QuadScalar]] = {1: [zero] * m, 2: [largest] + [zero] * (m - 1)}
    for j in range(3, m + 2):
        points[j] = [one if axis == j - 2 else zero for axis in range(m)]
    assignment: dict[tuple[int, ...], QuadScalar] = {frame: largest}
    result = ReconstructionResult(SpectrumKind.VOLUME, n, m, [])

    def volume(subset: tuple[int, ...]) -> QuadScalar:
        base = points[subset[0]]
        return mx.determinant([[x - y for x, y in zip(points[k], base)] for k in subset[1:]])

    def solve(k: int, free: list[tuple[tuple[int, ...], QuadScalar]]) -> list[QuadScalar]:
        # free[j-1] is the volume of the frame without point j+1, plus k
        x = [(-1 if (m - j) % 2 else 1) * value / largest for j, (_, value) in enumerate(free, start=1)]
        return [largest * x[0]] + x[1:]

    def place(k: int) -> None:
        result.nodes += 1
        if result.nodes > budget:
            raise SearchBudgetExceededError(f"volume oracle exceeded {budget} nodes")
        if k > n:
            record_leaf()
            return
        free_subsets = [tuple(sorted(set(frame) - {j + 1} | {k})) for j in range(1, m + 1)]
        forced = [
            rest + (k,)
            for rest in _colex(k - 1, m)
            if rest + (k,) not in free_subsets
        ]
        choose(k, free_subsets, forced, [])

    def choose(k: int, free_subsets, forced, chosen) -> None:
        if len(chosen) < len(free_subsets):
            subset = free_subsets[len(chosen)]
            for magnitude in sorted(remaining):
                if not remaining[magnitude]:
                    continue
                for sign in (1, -1) if magnitude else (1,):
                    value = magnitude if sign > 0 else -magnitude
                    remaining[magnitude] -= 1
                    assignment[subset] = value
                    if linear_relation_filter(assignment, n=k, touched=[subset]):
                        choose(k, free_subsets, forced, chosen + [(subset, value)])
                    del assignment[subset]
                    remaining[magnitude] += 1
            return
        points[k] = solve(k, chosen)
        taken: list[QuadScalar] = []
        ok = True
        for subset in forced:
            value = volume(subset)
            magnitude = abs(value)
            if not remaining[magnitude]:
                ok = False
                break
            remaining[magnitude] -= 1
            taken.append(magnitude)
            assignment[subset] = value
        if ok and linear_relation_filter(assignment, n=k, touched=forced):
            place(k + 1)
        for subset in forced:
            assignment.pop(subset, None)
        for magnitude in taken:
            remaining[magnitude] += 1
        del points[k]

    def record_leaf() -> None:
        result.leaves += 1
        candidate = PointConfiguration(tuple(tuple(points[k]) for k in range(1, n + 1)), d)
        for known in result.classes:
            if orbit_volume_equivalent(known, candidate):
                return
        result.classes.append(candidate)
        logger.debug(f"Volume class {len(result.classes)}: {candidate}")

    place(m + 2)
    logger.info(f"Volume oracle: {result.count} classes, {result.nodes} nodes, {result.leaves} leaves")
    return result


def is_reconstructible_from_volumes(P: PointConfiguration, budget: int | None = None) -> ReconstructibilityResult:
    result = realize_from_volumes(P.volume_spectrum(), P.n, P.m, budget=budget)
    witnesses = [c for c in result.classes if not orbit_volume_equivalent(c, P)]
    return ReconstructibilityResult(result.count == 1, result, witnesses)


# local probe -----------------------------------------------------------


@dataclass(frozen=True)
class LocalProbeResult:
    levels: tuple[float, ...]
    violations: tuple[int, ...]
    samples: int
    hypothesis_met: bool
    # samples per level that had nearly equal distances to relabel
    checked: tuple[int, ...] = ()

    @property
    def vacuous(self) -> bool:
        return not any(self.checked)

    @property
    def largest_clean_noise(self) -> float | None:
        clean = [level for level, count in zip(self.levels, self.violations) if count == 0]
        return max(clean) if clean else None


@lru_cache(maxsize=8)
def _induced_arrays(n: int) -> np.ndarray:
    return np.array(
        [induced_from_point_permutation(perm).images for perm in permutations(range(1, n + 1))]
    ) - 1


def _squared_distances(coords: np.ndarray) -> np.ndarray:
    n = len(coords)
    diffs = coords[:, None, :] - coords[None, :, :]
    return (diffs**2).sum(axis=2)[np.triu_indices(n, 1)]


def _near_equal_classes(values: np.ndarray, gap: float) -> list[list[int]]:
    order = np.argsort(values)
    classes = [[int(order[0])]]
    for previous, current in zip(order, order[1:]):
        if values[current] - values[previous] <= gap:
            classes[-1].append(int(current))
        else:
            classes.append([int(current)])
    return classes


def _float_realizable(values: np.ndarray, n: int, m: int, tol: float) -> bool:
    full = np.zeros((n, n))
    full[np.triu_indices(n, 1)] = values
    full = full + full.T
    gram = 0.5 * (full[0, 1:, None] + full[0, None, 1:] - full[1:, 1:])
    eigenvalues = np.sort(np.linalg.eigvalsh(gram))[::-1]
    return bool(eigenvalues[-1] >= -tol and np.all(eigenvalues[m:] <= tol))


def local_reconstructibility_radius(
    P: PointConfiguration,
    samples: int = 100,
    noise: float = 1e-6,
    levels: int | None = None,
    seed: int | None = None,
    tol: float | None = None,
) -> LocalProbeResult:
    """
    Perturb P by uniform noise and look for aliases: relabelings of the
    perturbed distances that keep the spectrum (permutations inside classes
    of nearly equal values), are realizable in m-space and are not just a
    relabeling of the perturbed configuration. Any such alias is a violation.
    Noise grows by a factor 10 per level.
    """
    levels = settings.probe_levels if levels is None else levels
    tol = settings.tolerance if tol is None else tol
    if P.n > MAX_DISTANCE_POINTS:
        raise TooLargeError(f"local probe is limited to n <= {MAX_DISTANCE_POINTS}")
    values = P.distance_values()
    distinct = len(set(values)) == len(values)
    generic = generic_rank_check(P)
    if not distinct:
        warnings.warn(HypothesisUnmet(f"{P.n}-point configuration has repeated distances"), stacklevel=2)
    if not generic:
        warnings.warn(HypothesisUnmet("relation matrix does not have the generic rank"), stacklevel=2)

    rng = np.random.default_rng(settings.random_seed if seed is None else seed)
    base = P.to_array()
    if P.weights is not None:
        base = base * np.sqrt([float(w) for w in P.weights])
    relabelings = _induced_arrays(P.n)
    tested, violations, checked = [], [], []
    for level in range(levels):
        epsilon = noise * 10**level
        count = clustered = 0
        for _ in range(samples):
            perturbed = base + rng.uniform(-epsilon, epsilon, size=base.shape)
            dq = _squared_distances(perturbed)
            scale = max(1.0, float(dq.max()))
            gap = 8 * epsilon * (np.sqrt(scale) + epsilon) * np.sqrt(P.m)
            threshold = tol * scale * P.n
            classes = [c for c in _near_equal_classes(dq, gap) if len(c) > 1]
            if not classes:
                continue
            clustered += 1
            shuffles = product(*(permutations(c) for c in classes))
            for index, shuffle in enumerate(shuffles):
                if index >= MAX_ALIASES:
                    break
                alias_index = np.arange(len(dq))
                for source, target in zip(classes, shuffle):
                    alias_index[source] = target
                alias = dq[alias_index]
                if np.array_equal(alias_index, np.arange(len(dq))):
                    continue
                if not _float_realizable(alias, P.n, P.m, threshold):
                    continue
                if np.any(np.abs(dq[relabelings] - alias).max(axis=1) <= threshold):
                    continue
                count += 1
                break
        tested.append(epsilon)
        violations.append(count)
        checked.append(clustered)
        if clustered == 0:
            logger.info(f"Noise {epsilon:.1e}: no nearly equal distances in {samples} samples, the level is vacuous")
        else:
            logger.info(f"Noise {epsilon:.1e}: {count} violations in {clustered} of {samples} samples")
    return LocalProbeResult(tuple(tested), tuple(violations), samples, distinct and generic, tuple(checked))
