import pytest

from pointspectra.algebra.permact import (
    CertificateCandidate,
    PairPermutation,
    distance_stabilizer,
    double_cosets,
    find_certificate,
    generic_probes,
    group_order,
    induced_from_point_permutation,
    induced_generators,
    lehmer_rank,
    preserves_distances,
)
from pointspectra.errors import DocumentParseError, SizeMismatchError, TooLargeError
from pointspectra.geometry.configuration import PointConfiguration
from pointspectra.services.fixtures import rhombus as make_rhombus
from tests.conftest import random_permutation


def test_cycle_notation_round_trip():
    phi = PairPermutation.from_cycles(4, "(1,4,6,3)(2,5)")
    assert phi(1) == 4 and phi(3) == 1 and phi(2) == 5
    assert str(phi) == "(1,4,6,3)(2,5)"
    assert str(PairPermutation.identity(4)) == "()"
    with pytest.raises(DocumentParseError):
        PairPermutation.from_cycles(4, "(1,2")
    with pytest.raises(SizeMismatchError):
        PairPermutation.from_cycles(4, "(1,7)")


def test_composition_applies_right_factor_first():
    a = PairPermutation.from_cycles(4, "(1,2)")
    b = PairPermutation.from_cycles(4, "(2,3)")
    assert (a * b)(3) == a(b(3)) == 1
    assert (a * a.inverse()).is_identity()


def test_induced_generators_match_known_cycles():
    swap, rotate = induced_generators(4)
    assert swap == PairPermutation.from_cycles(4, "(2,4)(3,5)")
    assert rotate == PairPermutation.from_cycles(4, "(1,4,6,3)(2,5)")
    assert group_order(induced_generators(4), 4) == 24
    assert group_order(induced_generators(5), 5) == 120


def test_induced_map_is_a_homomorphism(rng):
    for _ in range(20):
        pi, rho = random_permutation(rng, 5), random_permutation(rng, 5)
        composed = [pi[rho[i] - 1] for i in range(5)]
        assert induced_from_point_permutation(pi) * induced_from_point_permutation(rho) == (
            induced_from_point_permutation(composed)
        )


def test_map_pair():
    phi = induced_from_point_permutation([2, 3, 4, 1])
    assert phi.map_pair(1, 2) == (2, 3)
    assert phi.map_pair(3, 4) == (1, 4)


def test_rhombus_stabilizer(rhombus):
    generators = distance_stabilizer(rhombus)
    assert generators == [
        PairPermutation.from_cycles(4, "(1,3)"),
        PairPermutation.from_cycles(4, "(1,3,4,6)"),
    ]
    assert group_order(generators, 4) == 24
    assert all(preserves_distances(g, rhombus) for g in generators)
    assert not preserves_distances(PairPermutation.from_cycles(4, "(1,2)"), rhombus)


def test_stabilizer_trivial_for_distinct_distances():
    distinct = PointConfiguration.from_coordinates([(0, 0), (4, 0), (1, 3), (7, 5)])
    assert len(set(distinct.distance_values())) == 6
    assert distance_stabilizer(distinct) == []
    assert group_order([], 4) == 1


def test_lehmer_rank_of_identity_and_reverse():
    import numpy as np

    perms = np.array([[0, 1, 2], [2, 1, 0], [1, 0, 2]], dtype=np.int8)
    assert list(lehmer_rank(perms)) == [0, 5, 2]


def test_rhombus_double_cosets(rhombus):
    G = distance_stabilizer(rhombus)
    H = induced_generators(4)
    decomposition = double_cosets(G, H, 4)
    assert len(decomposition) == 2
    assert decomposition.representatives[0].is_identity()
    assert sum(decomposition.sizes) == 720
    assert decomposition.locate(PairPermutation.identity(4)) == 0
    assert decomposition.locate(PairPermutation.from_cycles(4, "(1,2)")) == 1


def test_larger_stabilizers_give_one_double_coset():
    H = induced_generators(4)
    extended = [PairPermutation.from_cycles(4, "(1,2)"), PairPermutation.from_cycles(4, "(1,2,3,4,6)")]
    assert len(double_cosets(extended, H, 4)) == 1
    full = [PairPermutation.from_cycles(4, "(1,2)"), PairPermutation.from_cycles(4, "(1,2,3,4,5,6)")]
    assert len(double_cosets(full, H, 4)) == 1


def test_trivial_stabilizer_gives_right_cosets():
    decomposition = double_cosets([], induced_generators(4), 4)
    assert len(decomposition) == 30
    assert set(decomposition.sizes) == {24}


def test_double_cosets_size_limit():
    with pytest.raises(TooLargeError):
        double_cosets([], induced_generators(6), 6)


def test_certificate_at_swapped_rhombus(rhombus):
    psi = PairPermutation.from_cycles(4, "(1,2)")
    record = find_certificate(rhombus, psi, probes=generic_probes(4, 2))
    assert record.candidate == CertificateCandidate(4, (1, 2, 3), (1, 2, 3))
    assert record.value == 0
    assert record.permuted_value == 330
    assert record.generic_nonmember
    assert record.tried == 1


@pytest.mark.parametrize("p, q", [(1, 2), (2, 1), (1, 3), (2, 3), (3, 1)])
def test_rhombus_family_determinants(p, q):
    P = make_rhombus(p, q)
    a, b, c = p * p + q * q, 4 * p * p, 4 * q * q
    candidate = CertificateCandidate(4, (1, 2, 3), (1, 2, 3))
    values = list(P.distance_values())
    assert candidate.evaluate(values) == 2 * b * c * (b + c - 4 * a) == 0
    swapped = PairPermutation.from_cycles(4, "(1,2)").permute_values(values)
    assert candidate.evaluate(swapped) == 2 * a * ((a - b) ** 2 + c * (c - b - 2 * a))


def test_no_certificate_for_repeated_values(rhombus):
    # (1,3) swaps two equal distances, so the permuted distances are realizable
    record = find_certificate(rhombus, PairPermutation.from_cycles(4, "(1,3)"))
    assert record.candidate is None
    assert record.tried > 0
