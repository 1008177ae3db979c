"""
Search integer grids for collision pairs: configurations with identical
spectra that lie in different orbits.
"""
from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations
from math import comb

from pointspectra.config import settings
from pointspectra.errors import BudgetExceededError, DegenerateFrameError
from pointspectra.geometry.configuration import PointConfiguration
from pointspectra.tools.congruence import orbit_congruent, orbit_volume_equivalent

logger = logging.getLogger(__name__)

GridPoint = tuple[int, int]

_SYMMETRIES = (
    lambda x, y: (x, y),
    lambda x, y: (-x, y),
    lambda x, y: (x, -y),
    lambda x, y: (-x, -y),
    lambda x, y: (y, x),
    lambda x, y: (-y, x),
    lambda x, y: (y, -x),
    lambda x, y: (-y, -x),
)


class MiningKind(str, Enum):
    DISTANCE = "distance"
    VOLUME = "volume"
    BOTH = "both"


@dataclass(frozen=True)
class CollisionPair:
    left: PointConfiguration
    right: PointConfiguration
    kind: MiningKind
    digest: str
    rigid_equivalent: bool | None = None
    affine_equivalent: bool | None = None


@dataclass
class MiningResult:
    width: int
    height: int
    n: int
    kind: MiningKind
    collisions: list[CollisionPair] = field(default_factory=list)
    enumerated: int = 0
    distinct: int = 0
    buckets: int = 0
    partial: bool = False


def canonical_form(points: tuple[GridPoint, ...]) -> tuple[GridPoint, ...]:
    """Lexicographically least image under the symmetries of the square lattice and translations."""
    best = None
    for symmetry in _SYMMETRIES:
        moved = [symmetry(x, y) for x, y in points]
        min_x = min(x for x, _ in moved)
        min_y = min(y for _, y in moved)
        image = tuple(sorted((x - min_x, y - min_y) for x, y in moved))
        if best is None or image < best:
            best = image
    return best


def spectrum_key(points: tuple[GridPoint, ...], kind: MiningKind) -> tuple[str, str] | None:
    """(digest, exact key) of the spectrum used for bucketing, or None for flat volume input."""
    P = PointConfiguration.from_coordinates(points)
    parts = []
    if kind in (MiningKind.DISTANCE, MiningKind.BOTH):
        parts.append(P.distance_spectrum())
    if kind in (MiningKind.VOLUME, MiningKind.BOTH):
        if P.is_flat():
            return None
        parts.append(P.volume_spectrum())
    exact = "|".join(s.key() for s in parts)
    digest = "".join(s.digest()[:16] for s in parts)
    return digest, exact


def _shard(args: tuple[list[GridPoint], int, int, str, int]) -> list[tuple[tuple[GridPoint, ...], str, str]]:
    """Canonical subsets whose first point is grid[first], with their spectrum keys."""
    grid, first, n, kind, limit = args
    kind = MiningKind(kind)
    seen: set[tuple[GridPoint, ...]] = set()
    found = []
    for count, rest in enumerate(combinations(grid[first + 1 :], n - 1)):
        if count >= limit:
            break
        canonical = canonical_form((grid[first],) + rest)
        if canonical in seen:
            continue
        seen.add(canonical)
        key = spectrum_key(canonical, kind)
        if key is not None:
            found.append((canonical, key[0], key[1]))
    return found


def _orbit_equivalent(P: PointConfiguration, Q: PointConfiguration, kind: MiningKind) -> tuple[bool, bool | None, bool | None]:
    """(equivalent for this kind, rigid verdict, affine verdict)."""
    rigid = affine = None
    if kind in (MiningKind.DISTANCE, MiningKind.BOTH):
        rigid = bool(orbit_congruent(P, Q))
    if kind in (MiningKind.VOLUME, MiningKind.BOTH):
        try:
            affine = bool(orbit_volume_equivalent(P, Q))
        except DegenerateFrameError:
            affine = None
    if kind is MiningKind.DISTANCE:
        return rigid, rigid, affine
    if kind is MiningKind.VOLUME:
        return bool(affine), rigid, affine
    return rigid, rigid, affine


def mine(
    width: int,
    height: int,
    n: int,
    kind: MiningKind | str = MiningKind.DISTANCE,
    budget: int | None = None,
    jobs: int | None = None,
) -> MiningResult:
    """
    Enumerate n-subsets of the width x height grid, bucket them by exact
    spectrum and emit one pair per two orbit classes sharing a bucket.
    """
    kind = MiningKind(kind)
    budget = settings.mining_budget if budget is None else budget
    jobs = settings.jobs if jobs is None else jobs
    grid = [(x, y) for x in range(width) for y in range(height)]
    total = comb(len(grid), n)
    result = MiningResult(width, height, n, kind)
    partial = total > budget
    # shards take the budget in order
    limits, remaining = [], budget
    for first in range(len(grid) - n + 1):
        limits.append(min(comb(len(grid) - first - 1, n - 1), max(0, remaining)))
        remaining -= limits[-1]
    logger.info(f"Mining {total} subsets of a {width}x{height} grid (n={n}, kind={kind.value})")

    tasks = [(grid, first, n, kind.value, limit) for first, limit in enumerate(limits) if limit > 0]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            shards = list(pool.map(_shard, tasks))
    else:
        shards = [_shard(task) for task in tasks]

    buckets: dict[str, dict[str, list[tuple[GridPoint, ...]]]] = {}
    seen: set[tuple[GridPoint, ...]] = set()
    result.enumerated = sum(limits)
    for first, shard in enumerate(shards):
        for canonical, digest, exact in shard:
            if canonical in seen:
                continue
            seen.add(canonical)
            buckets.setdefault(digest, {}).setdefault(exact, []).append(canonical)
        logger.debug(f"Shard {first}: {len(shard)} canonical subsets")
    result.distinct = len(seen)

    for digest in sorted(buckets):
        for exact, members in sorted(buckets[digest].items()):
            if len(members) < 2:
                continue
            result.buckets += 1
            classes: list[PointConfiguration] = []
            for points in sorted(members):
                candidate = PointConfiguration.from_coordinates(points)
                if not any(_orbit_equivalent(known, candidate, kind)[0] for known in classes):
                    classes.append(candidate)
            for left_index, right_index in combinations(range(len(classes)), 2):
                left, right = classes[left_index], classes[right_index]
                _, rigid, affine = _orbit_equivalent(left, right, kind)
                result.collisions.append(CollisionPair(left, right, kind, digest, rigid, affine))
    logger.info(f"Found {len(result.collisions)} collision pairs in {result.buckets} shared buckets")

    if partial:
        result.partial = True
        raise BudgetExceededError(
            f"{total} subsets exceed the mining budget of {budget}; results are partial", partial=result
        )
    return result
