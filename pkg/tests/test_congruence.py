import random
from functools import lru_cache

import pytest

from pointspectra.errors import DegenerateFrameError, ShapeMismatchError
from pointspectra.geometry import matrix as mx
from pointspectra.geometry.configuration import PointConfiguration
from pointspectra.tools.congruence import (
    brute_force_orbit_test,
    distance_relabelings,
    labeled_congruent,
    labeled_volume_equivalent,
    orbit_congruent,
    orbit_volume_equivalent,
)
from tests.conftest import SEED, random_configuration, random_permutation, random_rotation, random_unimodular


def _spanning_configuration(rng, n, m):
    while True:
        P = random_configuration(rng, n, m)
        if not P.is_flat():
            return P


def test_distance_collision_is_not_congruent(distance_pair):
    P, Q = distance_pair
    assert not labeled_congruent(P, Q)
    assert not orbit_congruent(P, Q)
    assert not brute_force_orbit_test(P, Q, labeled_congruent)


def test_congruent_copies_are_found_with_witness(rng):
    for _ in range(25):
        m = rng.randint(2, 3)
        n = rng.randint(m + 1, 6)
        P = _spanning_configuration(rng, n, m)
        Q = (
            P.relabel(random_permutation(rng, n))
            .apply_linear(random_rotation(rng, m))
            .translate([rng.randint(-3, 3) for _ in range(m)])
        )
        result = orbit_congruent(P, Q)
        assert result.equivalent
        witness = result.witness
        assert witness.exact
        mapped = P.relabel(witness.permutation).apply_linear(witness.linear).translate(witness.translation)
        assert mapped.points == Q.points


def test_orbit_search_agrees_with_brute_force(rng, distance_pair):
    pairs = [distance_pair]
    for _ in range(10):
        P = _spanning_configuration(rng, 4, 2)
        pairs.append((P, P.relabel(random_permutation(rng, 4)).apply_linear(random_rotation(rng, 2))))
        pairs.append((P, _spanning_configuration(rng, 4, 2)))
    for P, Q in pairs:
        assert orbit_congruent(P, Q).equivalent == brute_force_orbit_test(P, Q, labeled_congruent)


def test_distance_relabelings_on_bare_vectors(rhombus):
    moved = rhombus.relabel([3, 4, 1, 2])
    found = list(distance_relabelings(rhombus.distance_values(), moved.distance_values(), 4))
    assert (3, 4, 1, 2) in found
    assert all(
        rhombus.relabel(perm).distance_values() == moved.distance_values() for perm in found
    )


def test_non_spanning_offsets_give_approximate_witness():
    P = PointConfiguration.from_coordinates([(0, 0), (3, 4)])
    Q = PointConfiguration.from_coordinates([(1, 1), (6, 1)])
    result = labeled_congruent(P, Q)
    assert result.equivalent
    assert not result.witness.exact
    assert result.witness.residual < 1e-9


def test_shape_mismatch(distance_pair, area_pair_5):
    with pytest.raises(ShapeMismatchError):
        orbit_congruent(distance_pair[0], area_pair_5[0])


def test_combined_pair_affine_but_not_rigid(combined_pair):
    P, Q = combined_pair
    assert not orbit_congruent(P, Q)
    result = orbit_volume_equivalent(P, Q)
    assert result.equivalent
    w = result.witness
    mapped = P.relabel(w.permutation).translate(w.translation).apply_linear(w.linear)
    assert mapped.points == Q.points
    assert mx.determinant(w.linear) == w.sign


@pytest.mark.parametrize("fixture", ["area_pair_5", "area_pair_6"])
def test_area_collisions_are_not_affinely_equivalent(fixture, request):
    P, Q = request.getfixturevalue(fixture)
    assert P.volume_spectrum() == Q.volume_spectrum()
    assert not orbit_volume_equivalent(P, Q)


def test_volume_orbit_search_agrees_with_brute_force(rng, area_pair_5):
    P, Q = area_pair_5
    assert not brute_force_orbit_test(P, Q, labeled_volume_equivalent)
    R = _spanning_configuration(rng, 5, 2)
    image = R.relabel(random_permutation(rng, 5)).apply_linear(random_unimodular(rng, 2))
    assert orbit_volume_equivalent(R, image).equivalent
    assert brute_force_orbit_test(R, image, labeled_volume_equivalent)


def test_labeled_unimodular_image(rng):
    for _ in range(20):
        m = rng.randint(1, 3)
        P = _spanning_configuration(rng, m + 2, m)
        U = random_unimodular(rng, m)
        Q = P.apply_linear(U).translate([2] * m)
        result = labeled_volume_equivalent(P, Q)
        assert result.equivalent
        assert result.witness.sign == mx.determinant(U)


def test_volume_equivalence_degenerate_cases():
    flat = PointConfiguration.from_coordinates([(0, 0), (1, 1), (2, 2), (5, 5)])
    other_flat = PointConfiguration.from_coordinates([(0, 0), (1, 0), (2, 0), (3, 0)])
    with pytest.raises(DegenerateFrameError):
        labeled_volume_equivalent(flat, other_flat)
    with pytest.raises(DegenerateFrameError):
        orbit_volume_equivalent(flat, other_flat)
    square = PointConfiguration.from_coordinates([(0, 0), (1, 0), (0, 1), (1, 1)])
    assert not labeled_volume_equivalent(flat, square)
    with pytest.raises(DegenerateFrameError):
        labeled_volume_equivalent(
            PointConfiguration.from_coordinates([(0, 0), (1, 0)]),
            PointConfiguration.from_coordinates([(0, 0), (0, 1)]),
        )


@lru_cache(maxsize=1)
def _pair_corpus() -> tuple[tuple[PointConfiguration, PointConfiguration, int], ...]:
    """Planar pairs; the variant is 0 for moved copies, 1 for unimodular images, 2 for unrelated, 3 for one moved point."""
    rng = random.Random(SEED)
    corpus = []
    for k in range(50):
        n, variant = 3 + k % 3, k % 4
        coords = [[rng.randint(-10, 10) for _ in range(2)] for _ in range(n)]
        while PointConfiguration.from_coordinates(coords).is_flat():
            coords = [[rng.randint(-10, 10) for _ in range(2)] for _ in range(n)]
        P = PointConfiguration.from_coordinates(coords)
        if variant == 0:
            Q = P.relabel(random_permutation(rng, n)).apply_linear(random_rotation(rng, 2))
        elif variant == 1:
            Q = P.relabel(random_permutation(rng, n)).apply_linear(random_unimodular(rng, 2))
        elif variant == 2:
            Q = _spanning_configuration(rng, n, 2)
        else:
            while True:
                moved = [list(p) for p in coords]
                moved[rng.randrange(n)] = [rng.randint(-10, 10) for _ in range(2)]
                Q = PointConfiguration.from_coordinates(moved)
                if not Q.is_flat():
                    break
        corpus.append((P, Q, variant))
    return tuple(corpus)


@pytest.mark.parametrize("index", range(50))
def test_orbit_deciders_on_pair_corpus(index):
    P, Q, variant = _pair_corpus()[index]
    assert orbit_congruent(P, P) and orbit_volume_equivalent(P, P)

    rigid = bool(orbit_congruent(P, Q))
    affine = bool(orbit_volume_equivalent(P, Q))
    assert rigid == bool(orbit_congruent(Q, P))
    assert affine == bool(orbit_volume_equivalent(Q, P))
    assert rigid == brute_force_orbit_test(P, Q, labeled_congruent)
    assert affine == brute_force_orbit_test(P, Q, labeled_volume_equivalent)

    if rigid:
        assert P.distance_spectrum() == Q.distance_spectrum()
    if affine:
        assert P.volume_spectrum() == Q.volume_spectrum()
    if variant == 0:
        assert rigid and affine
    if variant == 1:
        assert affine
