"""
Equivalence of configurations under rigid motions and under equi-affine maps,
with or without relabeling of the points.

Rigid: Q_i = A P_{pi(i)} + t with A orthogonal for the configuration's form.
Affine: Q_i = sigma(P_{pi(i)} + v) with det(sigma) = eps in {+1, -1}.
Verdicts are exact; witnesses are exact whenever the offsets span the space
and otherwise come from a least-squares fit with its residual.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from itertools import combinations, permutations
from typing import Callable, Iterator, Sequence

import numpy as np

from pointspectra.errors import DegenerateFrameError, RankDeficientError, ShapeMismatchError
from pointspectra.geometry import matrix as mx
from pointspectra.geometry.configuration import PointConfiguration, pair_position
from pointspectra.geometry.scalar import QuadScalar

logger = logging.getLogger(__name__)

Matrix = list[list[QuadScalar]]


@dataclass(frozen=True)
class RigidWitness:
    """Q_i = linear * P_{permutation[i]} + translation."""

    permutation: tuple[int, ...]
    linear: Matrix | None = None
    translation: list[QuadScalar] | None = None
    approximate_linear: np.ndarray | None = None
    approximate_translation: np.ndarray | None = None
    residual: float = 0.0

    @property
    def exact(self) -> bool:
        return self.linear is not None


@dataclass(frozen=True)
class AffineWitness:
    """Q_i = linear * (P_{permutation[i]} + translation), det(linear) = sign."""

    permutation: tuple[int, ...]
    linear: Matrix
    translation: list[QuadScalar]
    sign: int


@dataclass(frozen=True)
class EquivalenceResult:
    equivalent: bool
    witness: RigidWitness | AffineWitness | None = None

    def __bool__(self) -> bool:
        return self.equivalent


def _check_shapes(P: PointConfiguration, Q: PointConfiguration) -> None:
    if (P.n, P.m, P.d) != (Q.n, Q.m, Q.d):
        raise ShapeMismatchError(
            f"configurations differ in shape: n={P.n},m={P.m},d={P.d} vs n={Q.n},m={Q.m},d={Q.d}"
        )
    if P.weights != Q.weights:
        raise ShapeMismatchError("configurations use different bilinear forms")


def _frame(offsets: Matrix) -> list[int] | None:
    """Row indices of a basis among the offset vectors, or None if they do not span."""
    m = len(offsets[0])
    _, pivots = mx.row_echelon(mx.transpose(offsets))
    return pivots if len(pivots) == m else None


def _columns(rows: Matrix, chosen: Sequence[int]) -> Matrix:
    return mx.transpose([rows[k] for k in chosen])


def _procrustes(P: PointConfiguration, Q: PointConfiguration) -> tuple[np.ndarray, np.ndarray, float]:
    """Best orthogonal fit Q ~ R P + t in the coordinates of the form."""
    scale = np.ones(P.m) if P.weights is None else np.sqrt([float(w) for w in P.weights])
    A, B = P.to_array() * scale, Q.to_array() * scale
    centroid_a, centroid_b = A.mean(axis=0), B.mean(axis=0)
    H = (A - centroid_a).T @ (B - centroid_b)
    U, _, Vt = np.linalg.svd(H)
    R = Vt.T @ U.T
    t = centroid_b - R @ centroid_a
    residual = float(np.abs(A @ R.T + t - B).max()) if len(A) else 0.0
    linear = np.diag(1 / scale) @ R @ np.diag(scale)
    return linear, t / scale, residual


def labeled_congruent(P: PointConfiguration, Q: PointConfiguration) -> EquivalenceResult:
    _check_shapes(P, Q)
    if P.distance_values() != Q.distance_values():
        return EquivalenceResult(False)
    identity = tuple(range(1, P.n + 1))
    if P.n == 1:
        shift = [y - x for x, y in zip(P.points[0], Q.points[0])]
        return EquivalenceResult(True, RigidWitness(identity, mx.identity(P.m, P.d), shift))
    offsets_p, offsets_q = P.offsets(), Q.offsets()
    chosen = _frame(offsets_p)
    if chosen is not None:
        linear = mx.matmul(_columns(offsets_q, chosen), mx.inverse(_columns(offsets_p, chosen)))
        base_p, base_q = P.point(P.n), Q.point(Q.n)
        translation = [q - x for q, x in zip(base_q, mx.matvec(linear, base_p))]
        mapped = P.apply_linear(linear).translate(translation)
        if mapped.points != Q.points:
            raise RankDeficientError("recovered orthogonal map does not reproduce the target")
        return EquivalenceResult(True, RigidWitness(identity, linear, translation))
    approx, shift, residual = _procrustes(P, Q)
    logger.debug(f"Offsets do not span; approximate witness with residual {residual:.3g}")
    return EquivalenceResult(
        True,
        RigidWitness(identity, approximate_linear=approx, approximate_translation=shift, residual=residual),
    )


def _search(
    n: int,
    keys_a: Sequence,
    keys_b: Sequence,
    consistent: Callable[[list[int], int], bool],
) -> Iterator[tuple[int, ...]]:
    """
    Backtracking over relabelings perm with point i of B matched to point
    perm[i] of A. Candidates must carry the same per-point key; the callback
    checks the constraints between the new point and those already placed.
    """
    candidates = [[k for k in range(1, n + 1) if keys_a[k - 1] == keys_b[i]] for i in range(n)]
    if any(not options for options in candidates):
        return
    order = sorted(range(n), key=lambda i: (len(candidates[i]), i))
    perm: list[int] = [0] * n
    used = [False] * (n + 1)

    def extend(depth: int) -> Iterator[tuple[int, ...]]:
        if depth == n:
            yield tuple(perm)
            return
        i = order[depth]
        for k in candidates[i]:
            if used[k]:
                continue
            perm[i] = k
            if consistent(perm, i) if depth else True:
                used[k] = True
                yield from extend(depth + 1)
                used[k] = False
            perm[i] = 0

    yield from extend(0)


def _point_keys(values: Sequence[QuadScalar], n: int) -> list[tuple[QuadScalar, ...]]:
    keys = []
    for i in range(1, n + 1):
        keys.append(tuple(sorted(values[pair_position(i, j, n) - 1] for j in range(1, n + 1) if j != i)))
    return keys


def distance_relabelings(
    values_a: Sequence[QuadScalar], values_b: Sequence[QuadScalar], n: int
) -> Iterator[tuple[int, ...]]:
    """
    Point relabelings perm with values_a[{perm(i), perm(j)}] = values_b[{i, j}]
    for all pairs, on bare distance vectors in pair order.
    """
    if sorted(values_a) != sorted(values_b):
        return iter(())
    if n == 1:
        return iter([(1,)])

    def consistent(perm: list[int], i: int) -> bool:
        for j in range(n):
            if j == i or not perm[j]:
                continue
            if values_a[pair_position(perm[i], perm[j], n) - 1] != values_b[pair_position(i + 1, j + 1, n) - 1]:
                return False
        return True

    return _search(n, _point_keys(values_a, n), _point_keys(values_b, n), consistent)


def orbit_congruent(P: PointConfiguration, Q: PointConfiguration) -> EquivalenceResult:
    _check_shapes(P, Q)
    for perm in distance_relabelings(P.distance_values(), Q.distance_values(), P.n):
        result = labeled_congruent(P.relabel(perm), Q)
        if result:
            witness = result.witness
            return EquivalenceResult(
                True,
                RigidWitness(
                    perm,
                    witness.linear,
                    witness.translation,
                    witness.approximate_linear,
                    witness.approximate_translation,
                    witness.residual,
                ),
            )
    return EquivalenceResult(False)


def _volume_frame(P: PointConfiguration) -> tuple[int, ...] | None:
    """First simplex through the last point with non-zero volume."""
    for rest in combinations(range(1, P.n), P.m):
        if not P.signed_volume(rest + (P.n,)).is_zero():
            return rest
    return None


def labeled_volume_equivalent(P: PointConfiguration, Q: PointConfiguration) -> EquivalenceResult:
    _check_shapes(P, Q)
    if P.n <= P.m:
        raise DegenerateFrameError(f"{P.n} points in {P.m}-space carry no simplex volume")
    flat_p, flat_q = P.is_flat(), Q.is_flat()
    if flat_p and flat_q:
        raise DegenerateFrameError("all simplex volumes vanish in both configurations")
    if flat_p or flat_q:
        return EquivalenceResult(False)
    volumes_p, volumes_q = P.volume_values(), Q.volume_values()
    sign = 0
    for subset, a in volumes_p.items():
        b = volumes_q[subset]
        if a.is_zero() != b.is_zero():
            return EquivalenceResult(False)
        if a.is_zero():
            continue
        if not sign:
            if b == a:
                sign = 1
            elif b == -a:
                sign = -1
            else:
                return EquivalenceResult(False)
        elif b != sign * a:
            return EquivalenceResult(False)

    frame = _volume_frame(P)
    offsets_p = [[x - y for x, y in zip(P.point(k), P.point(P.n))] for k in frame]
    offsets_q = [[x - y for x, y in zip(Q.point(k), Q.point(Q.n))] for k in frame]
    linear = mx.matmul(mx.transpose(offsets_q), mx.inverse(mx.transpose(offsets_p)))
    back = mx.matvec(mx.inverse(linear), Q.point(Q.n))
    translation = [x - y for x, y in zip(back, P.point(P.n))]
    mapped = P.translate(translation).apply_linear(linear)
    if mapped.points != Q.points or mx.determinant(linear) != sign:
        raise RankDeficientError("recovered equi-affine map does not reproduce the target")
    return EquivalenceResult(True, AffineWitness(tuple(range(1, P.n + 1)), linear, translation, sign))


def volume_relabelings(P: PointConfiguration, Q: PointConfiguration, sign: int) -> Iterator[tuple[int, ...]]:
    """Relabelings perm with Q's volume on S equal to sign times P's volume on perm(S)."""
    n, size = P.n, P.m + 1
    squares_p = {s: v * v for s, v in P.volume_values().items()}
    squares_q = {s: v * v for s, v in Q.volume_values().items()}

    def keys(squares: dict) -> list[tuple[QuadScalar, ...]]:
        return [tuple(sorted(v for s, v in squares.items() if i in s)) for i in range(1, n + 1)]

    def consistent(perm: list[int], i: int) -> bool:
        placed = [j + 1 for j in range(n) if perm[j] and j != i]
        for rest in combinations(placed, size - 1):
            subset = tuple(sorted(rest + (i + 1,)))
            image = tuple(perm[k - 1] for k in subset)
            if Q.signed_volume(subset) != sign * P.signed_volume(image):
                return False
        return True

    return _search(n, keys(squares_p), keys(squares_q), consistent)


def orbit_volume_equivalent(P: PointConfiguration, Q: PointConfiguration) -> EquivalenceResult:
    _check_shapes(P, Q)
    if P.n <= P.m or (P.is_flat() and Q.is_flat()):
        raise DegenerateFrameError("all simplex volumes vanish in both configurations")
    if P.volume_spectrum() != Q.volume_spectrum():
        return EquivalenceResult(False)
    for sign in (1, -1):
        for perm in volume_relabelings(P, Q, sign):
            result = labeled_volume_equivalent(P.relabel(perm), Q)
            if result:
                witness = result.witness
                return EquivalenceResult(
                    True, AffineWitness(perm, witness.linear, witness.translation, witness.sign)
                )
    return EquivalenceResult(False)


def brute_force_orbit_test(
    P: PointConfiguration,
    Q: PointConfiguration,
    labeled: Callable[[PointConfiguration, PointConfiguration], EquivalenceResult],
) -> bool:
    """Try every relabeling; the reference the backtracking deciders must agree with."""
    _check_shapes(P, Q)
    return any(labeled(P.relabel(perm), Q) for perm in permutations(range(1, P.n + 1)))

