import logging

import pytest

from pointspectra.errors import (
    AllVolumesZeroError,
    ArityMismatchError,
    HypothesisUnmet,
    SearchBudgetExceededError,
    TooLargeError,
)
from pointspectra.geometry.configuration import PointConfiguration, Spectrum
from pointspectra.geometry.scalar import QuadScalar
from pointspectra.tools.congruence import distance_relabelings, orbit_volume_equivalent
from pointspectra.tools.recon import (
    is_reconstructible_from_distances,
    is_reconstructible_from_volumes,
    local_reconstructibility_radius,
    realize_from_distances,
    realize_from_volumes,
)
from tests.conftest import random_configuration


def _generic(rng, n, m, low=-50, high=50):
    while True:
        P = random_configuration(rng, n, m, low, high)
        values = P.distance_values()
        if len(set(values)) == len(values) and P.has_generic_rank():
            return P


def _contains(result, P):
    return any(
        next(iter(distance_relabelings(c.distances, P.distance_values(), P.n)), None) is not None
        for c in result.classes
    )


def test_distance_collision_has_two_classes(distance_pair):
    P, Q = distance_pair
    result = realize_from_distances(P.distance_spectrum(), 4, 2)
    assert result.count >= 2
    assert _contains(result, P) and _contains(result, Q)
    assert not result.experimental

    verdict = is_reconstructible_from_distances(P)
    assert not verdict.reconstructible
    assert verdict.witnesses


def test_pruning_does_not_change_the_count(distance_pair, rhombus):
    for P in (distance_pair[0], rhombus):
        S = P.distance_spectrum()
        assert realize_from_distances(S, 4, 2).count == realize_from_distances(S, 4, 2, prune=False).count


def test_equilateral_spectrum_has_one_class():
    S = Spectrum.of([QuadScalar(1)] * 3, "distance")
    result = realize_from_distances(S, 3, 2)
    assert result.count == 1
    assert result.classes[0].residual < 1e-9


def test_rhombus_reconstructible_from_distances(rhombus):
    verdict = is_reconstructible_from_distances(rhombus)
    assert verdict.reconstructible
    assert verdict.witnesses == []


def test_generic_configurations_reconstructible_from_distances(rng):
    for n, count in ((4, 50), (5, 50)):
        for _ in range(count):
            P = _generic(rng, n, 2)
            result = realize_from_distances(P.distance_spectrum(), n, 2)
            assert result.count == 1, str(P)
            assert _contains(result, P)


def test_points_on_a_line():
    P = PointConfiguration.from_coordinates([(0,), (1,), (3,)])
    assert realize_from_distances(P.distance_spectrum(), 3, 1).count == 1
    assert realize_from_volumes(P.volume_spectrum(), 3, 1).count == 1


def test_distance_oracle_limits(distance_pair):
    S = distance_pair[0].distance_spectrum()
    with pytest.raises(ArityMismatchError):
        realize_from_distances(S, 5, 2)
    with pytest.raises(SearchBudgetExceededError):
        realize_from_distances(S, 4, 2, budget=1)
    big = Spectrum.of([QuadScalar(k) for k in range(1, 29)], "distance")
    with pytest.raises(TooLargeError):
        realize_from_distances(big, 8, 2)
    assert realize_from_distances(S, 4, 3).experimental


def test_area_collision_has_two_classes(area_pair_5):
    P, Q = area_pair_5
    result = realize_from_volumes(P.volume_spectrum(), 5, 2)
    assert result.count >= 2
    assert any(orbit_volume_equivalent(c, P) for c in result.classes)
    assert any(orbit_volume_equivalent(c, Q) for c in result.classes)

    verdict = is_reconstructible_from_volumes(P)
    assert not verdict.reconstructible
    assert verdict.witnesses


def test_volume_oracle_contains_its_source(rng):
    for n in (4, 4, 4, 5, 5):
        P = random_configuration(rng, n, 2)
        if P.is_flat():
            continue
        result = realize_from_volumes(P.volume_spectrum(), n, 2)
        assert any(orbit_volume_equivalent(c, P) for c in result.classes)


def test_four_points_reconstructible_from_volumes(rng):
    for _ in range(50):
        P = _generic(rng, 4, 2, -10, 10)
        assert is_reconstructible_from_volumes(P).reconstructible


def test_volume_oracle_errors():
    zeros = Spectrum.of([QuadScalar(0)] * 4, "volume")
    with pytest.raises(AllVolumesZeroError):
        realize_from_volumes(zeros, 4, 2)
    with pytest.raises(ArityMismatchError):
        realize_from_volumes(Spectrum.of([QuadScalar(1)] * 3, "volume"), 4, 2)
    with pytest.raises(ArityMismatchError):
        realize_from_volumes(Spectrum.of([QuadScalar(1)], "volume"), 2, 2)



def test_volumes_without_rational_roots_have_no_realization():
    S = Spectrum.of([QuadScalar(v) for v in (2, 1, 1, 1)], "volume")
    result = realize_from_volumes(S, 4, 2)
    assert result.count == 0
    assert result.classes == []

def test_local_probe_on_generic_configurations(rng):
    for _ in range(10):
        P = _generic(rng, 4, 2, -10, 10)
        result = local_reconstructibility_radius(P, samples=100, noise=1e-6, levels=1)
        assert result.hypothesis_met
        assert result.violations == (0,)
        assert result.largest_clean_noise == pytest.approx(1e-6)


def test_local_probe_warns_outside_hypotheses(distance_pair):
    with pytest.warns(HypothesisUnmet):
        result = local_reconstructibility_radius(distance_pair[0], samples=5, levels=2)
    assert not result.hypothesis_met
    assert len(result.levels) == 2
    assert result.levels[1] == pytest.approx(10 * result.levels[0])


def test_local_probe_on_a_triangle():
    triangle = PointConfiguration.from_coordinates([(0, 0), (4, 0), (1, 3)])
    result = local_reconstructibility_radius(triangle, samples=20, noise=1e-4, levels=2)
    assert result.violations == (0, 0)


def test_local_probe_reports_levels_without_nearly_equal_distances(rng, caplog):
    P = _generic(rng, 4, 2, -10, 10)
    with caplog.at_level(logging.INFO, logger="pointspectra.tools.recon"):
        result = local_reconstructibility_radius(P, samples=20, noise=1e-6, levels=1)
    assert result.checked == (0,)
    assert result.vacuous
    assert "vacuous" in caplog.text


def test_local_probe_checks_every_sample_with_repeated_distances(rhombus):
    with pytest.warns(HypothesisUnmet):
        result = local_reconstructibility_radius(rhombus, samples=20, noise=1e-4, levels=2)
    assert result.checked == (20, 20)
    assert not result.vacuous
