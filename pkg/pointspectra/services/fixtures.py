"""
Bundled example configurations with their recorded expected outputs.

Each fixture keeps its coordinates as canonical strings, the same way a
configuration document stores them.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

from pointspectra.geometry.configuration import PointConfiguration, extend_on_line

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Fixture:
    name: str
    description: str
    provenance: str
    points: tuple[tuple[tuple[str, ...], ...], ...]
    d: int = 1
    expected: dict = field(default_factory=dict)

    @property
    def configurations(self) -> tuple[PointConfiguration, ...]:
        return tuple(PointConfiguration.from_coordinates(p, d=self.d) for p in self.points)

    def configuration(self, index: int = 0) -> PointConfiguration:
        return self.configurations[index]


def _pts(*coords) -> tuple[tuple[str, ...], ...]:
    return tuple(tuple(str(x) for x in p) for p in coords)


def rhombus(p: int, q: int) -> PointConfiguration:
    """Rhombus with half-diagonals p and q; squared side p^2+q^2, squared diagonals 4p^2 and 4q^2."""
    return PointConfiguration.from_coordinates([(0, 0), (p, q), (2 * p, 0), (p, -q)])


_FIXTURES = [
    Fixture(
        name="distance-pair-4",
        description="Two planar 4-point configurations with equal distance spectra in different rigid orbits",
        provenance="four-point distance collision; the moved point reflects across the line x + y = 2",
        points=(
            _pts((0, 0), (3, 1), (3, -1), (4, 0)),
            _pts((0, 0), (1, -1), (3, -1), (4, 0)),
        ),
        expected={
            "distance_spectrum": ["2", "2", "4", "10", "10", "16"],
            "rigid_equivalent": False,
            "min_distance_classes": 2,
        },
    ),
    Fixture(
        name="area-pair-5",
        description="Two 5-point configurations on the unit grid with equal area spectra in different affine orbits",
        provenance="five-point signed area table, rows P and Q",
        points=(
            _pts((0, 1), (1, 1), (1, 2), (3, 2), (5, 2)),
            _pts((1, 0), (2, 0), (2, 1), (2, 2), (4, 2)),
        ),
        expected={
            "signed_volumes": [
                ["1", "1", "1", "-2", "-4", "-2", "-2", "-4", "-2", "0"],
                ["1", "2", "2", "1", "-1", "-4", "0", "-2", "-4", "-2"],
            ],
            "volume_spectrum": ["0", "1", "1", "1", "4", "4", "4", "4", "16", "16"],
            "affine_equivalent": False,
        },
    ),
    Fixture(
        name="area-pair-6",
        description="Two 6-point configurations on two parallel lines with equal area spectra",
        provenance="six-point area collision; one lower point moves from (1,0) to (2,0)",
        points=(
            _pts((0, 1), (1, 1), (3, 1), (0, 0), (1, 0), (3, 0)),
            _pts((0, 1), (1, 1), (3, 1), (0, 0), (2, 0), (3, 0)),
        ),
        expected={"affine_equivalent": False},
    ),
    Fixture(
        name="combined-pair-4",
        description="Equal distance and area spectra; affinely equivalent but not congruent",
        provenance="combined invariant example over Q(sqrt 2)",
        d=2,
        points=(
            _pts((0, 0), (0, 6), ("6*sqrt(2)", 0), ("2*sqrt(2)", -1)),
            _pts((0, 0), (0, 6), ("6*sqrt(2)", 0), ("2*sqrt(2)", 5)),
        ),
        expected={
            "distance_spectrum": ["9", "33", "36", "57", "72", "108"],
            "volume_spectrum": ["72", "288", "1800", "2592"],
            "signed_volumes": [
                ["-36*sqrt(2)", "-12*sqrt(2)", "-6*sqrt(2)", "-30*sqrt(2)"],
                ["-36*sqrt(2)", "-12*sqrt(2)", "30*sqrt(2)", "6*sqrt(2)"],
            ],
            "rigid_equivalent": False,
            "affine_equivalent": True,
        },
    ),
    Fixture(
        name="rhombus",
        description="Rhombus with squared side 5 and squared diagonals 4 and 16",
        provenance="rhombus family with b + c = 4a, here p = 1, q = 2",
        points=(_pts((0, 0), (1, 2), (2, 0), (1, -2)),),
        expected={
            "verdict": "certified",
            "cosets": 2,
            "det_relation_matrix": "0",
            "det_swapped": "330",
            "distance_classes": 1,
        },
    ),
    Fixture(
        name="rhombus-60",
        description="Rhombus with 60 degree angles; five distances are equal",
        provenance="rhombus family with p = 1, q = sqrt(3)",
        d=3,
        points=(_pts((0, 0), (1, "sqrt(3)"), (2, 0), (1, "-sqrt(3)")),),
        expected={
            "verdict": "certified",
            "cosets": 1,
            "stabilizer_order": 120,
            "distance_spectrum": ["4", "4", "4", "4", "4", "12"],
        },
    ),
    Fixture(
        name="square",
        description="Square with squared side 2; its two distance values sit on a 4-cycle and a matching",
        provenance="rhombus family with p = q = 1",
        points=(_pts((0, 0), (1, 1), (2, 0), (1, -1)),),
        expected={"verdict": "certified", "cosets": 2},
    ),
]

FIXTURES: dict[str, Fixture] = {f.name: f for f in _FIXTURES}


def list_fixtures() -> list[Fixture]:
    return list(FIXTURES.values())


def get_fixture(name: str) -> Fixture:
    try:
        return FIXTURES[name]
    except KeyError:
        logger.error(f"Unknown fixture {name!r}; available: {', '.join(FIXTURES)}")
        raise


def extended_distance_pair(extra=((1, 1), (2, 0), (-1, 3))) -> tuple[PointConfiguration, PointConfiguration]:
    """distance-pair-4 with the same extra points on the line x + y = 2 added to both sides."""
    P, Q = FIXTURES["distance-pair-4"].configurations
    return extend_on_line(P, Q, extra)


def extended_area_pair(extra=((-2, 1), (5, 1))) -> tuple[PointConfiguration, PointConfiguration]:
    """area-pair-6 with extra points on the upper line y = 1."""
    P, Q = FIXTURES["area-pair-6"].configurations
    return extend_on_line(P, Q, extra)
